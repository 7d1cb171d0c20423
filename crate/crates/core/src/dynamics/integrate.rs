//! Dormand–Prince 5(4) with the standard fourth-order continuous extension.
//!
//! A right-hand side that fails with a domain error (or returns non-finite
//! values) rejects the step and shrinks it.

use nalgebra::DVector;

use super::VectorField;
use crate::error::{Error, Result};

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: None,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }
}

impl OdeOptions {
    /// Same bound for relative and absolute local error.
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            ..Self::default()
        }
    }
}

/// Continuous extension of one accepted step.
#[derive(Debug, Clone)]
pub struct DenseStep {
    pub t0: f64,
    pub t1: f64,
    cont: [DVector<f64>; 5],
}

impl DenseStep {
    pub fn start(&self) -> &DVector<f64> {
        &self.cont[0]
    }

    pub fn end(&self) -> DVector<f64> {
        &self.cont[0] + &self.cont[1]
    }

    pub fn eval(&self, t: f64) -> DVector<f64> {
        let h = self.t1 - self.t0;
        let s = if h == 0.0 { 0.0 } else { (t - self.t0) / h };
        let s1 = 1.0 - s;
        let [r1, r2, r3, r4, r5] = &self.cont;
        r1 + (r2 + (r3 + (r4 + r5 * s1) * s) * s1) * s
    }

    /// First root of `g` inside the step, assuming g(start) and g(end) have
    /// opposite signs. Illinois false position on the dense output.
    pub fn locate_root(&self, g: impl Fn(&DVector<f64>) -> f64, tol: f64) -> Option<f64> {
        let (mut a, mut b) = (self.t0, self.t1);
        let (mut ga, mut gb) = (g(self.start()), g(&self.end()));
        if ga == 0.0 {
            return Some(a);
        }
        if ga.signum() == gb.signum() {
            return None;
        }
        let mut side = 0;
        for _ in 0..200 {
            let t = (a * gb - b * ga) / (gb - ga);
            let gt = g(&self.eval(t));
            if gt == 0.0 || (b - a).abs() <= tol {
                return Some(t);
            }
            if gt.signum() == ga.signum() {
                a = t;
                ga = gt;
                if side == -1 {
                    gb *= 0.5;
                }
                side = -1;
            } else {
                b = t;
                gb = gt;
                if side == 1 {
                    ga *= 0.5;
                }
                side = 1;
            }
            if (b - a).abs() <= tol {
                return Some(0.5 * (a + b));
            }
        }
        Some(0.5 * (a + b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    steps: Vec<DenseStep>,
    pub rejected: usize,
}

impl Trajectory {
    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory has an initial point")
    }

    pub fn final_state(&self) -> &DVector<f64> {
        self.states.last().expect("trajectory has an initial point")
    }

    pub fn steps(&self) -> &[DenseStep] {
        &self.steps
    }

    /// Dense-output state at `t` within the integrated range.
    pub fn state_at(&self, t: f64) -> Option<DVector<f64>> {
        if self.steps.is_empty() {
            return (t == self.times[0]).then(|| self.states[0].clone());
        }
        if t < self.times[0] || t > self.final_time() {
            return None;
        }
        let i = self
            .steps
            .partition_point(|s| s.t1 < t)
            .min(self.steps.len() - 1);
        Some(self.steps[i].eval(t))
    }

    /// `n + 1` equally spaced samples over the integrated range.
    pub fn resample(&self, n: usize) -> (Vec<f64>, Vec<DVector<f64>>) {
        let (t0, t1) = (self.times[0], self.final_time());
        let n = n.max(1);
        let times: Vec<f64> = (0..=n)
            .map(|i| t0 + (t1 - t0) * i as f64 / n as f64)
            .collect();
        let states = times
            .iter()
            .map(|&t| self.state_at(t.min(t1)).unwrap())
            .collect();
        (times, states)
    }

    /// CSV with header `t,x1,...,xr`.
    pub fn to_csv(&self) -> String {
        let dim = self.states[0].len();
        let mut out = String::from("t");
        for i in 1..=dim {
            out.push_str(&format!(",x{i}"));
        }
        out.push('\n');
        for (t, x) in self.times.iter().zip(&self.states) {
            out.push_str(&format!("{t:?}"));
            for v in x.iter() {
                out.push_str(&format!(",{v:?}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Integrates from `u0` at t = 0 to `t_end`.
pub fn integrate<F: VectorField>(
    field: &F,
    u0: &[f64],
    t_end: f64,
    opts: &OdeOptions,
) -> Result<Trajectory> {
    integrate_with(field, u0, t_end, opts, |_| Control::Continue)
}

/// As [`integrate`], calling `observer` after every accepted step; returning
/// [`Control::Stop`] ends the integration at that step.
pub fn integrate_with<F: VectorField>(
    field: &F,
    u0: &[f64],
    t_end: f64,
    opts: &OdeOptions,
    observer: impl FnMut(&DenseStep) -> Control,
) -> Result<Trajectory> {
    if u0.len() != field.dim() {
        return Err(Error::Dimension(format!(
            "initial state has length {}, system dimension is {}",
            u0.len(),
            field.dim()
        )));
    }
    let mut f = |y: &[f64]| field.rhs(y);
    dopri5(
        &mut f,
        DVector::from_column_slice(u0),
        t_end,
        opts,
        observer,
    )
}

pub(crate) fn dopri5(
    f: &mut dyn FnMut(&[f64]) -> Result<DVector<f64>>,
    y0: DVector<f64>,
    t_end: f64,
    opts: &OdeOptions,
    mut observer: impl FnMut(&DenseStep) -> Control,
) -> Result<Trajectory> {
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "end time {t_end} must be finite and non-negative"
        )));
    }
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(Error::InvalidArgument("tolerances must be positive".into()));
    }
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![y0.clone()],
        steps: Vec::new(),
        rejected: 0,
    };
    if t_end == 0.0 {
        return Ok(traj);
    }
    let fail = |t: f64, y: &DVector<f64>, reason: String| Error::Integration {
        t,
        state: y.as_slice().to_vec(),
        reason,
    };
    let mut k1 = f(y0.as_slice()).map_err(|e| fail(0.0, &y0, e.to_string()))?;
    let mut y = y0;
    let mut t = 0.0;
    let n = y.len() as f64;
    let scale = |a: &DVector<f64>, b: &DVector<f64>, i: usize| {
        opts.atol + opts.rtol * a[i].abs().max(b[i].abs())
    };
    let mut h = match opts.h_init {
        Some(h) => h,
        None => {
            let d0 = (y
                .iter()
                .enumerate()
                .map(|(i, v)| (v / scale(&y, &y, i)).powi(2))
                .sum::<f64>()
                / n)
                .sqrt();
            let d1 = (k1
                .iter()
                .enumerate()
                .map(|(i, v)| (v / scale(&y, &y, i)).powi(2))
                .sum::<f64>()
                / n)
                .sqrt();
            let h = if d0 < 1e-5 || d1 < 1e-5 {
                1e-6
            } else {
                0.01 * d0 / d1
            };
            h.min(t_end)
        }
    }
    .min(opts.h_max);
    let mut last_domain_error = None;
    let mut accepted_since_reject = true;

    for _ in 0..opts.max_steps {
        if t >= t_end {
            break;
        }
        let mut last = false;
        if t + h >= t_end {
            h = t_end - t;
            last = true;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            let reason = match last_domain_error.take() {
                Some(e) => format!("step size underflow at domain boundary: {e}"),
                None => "step size underflow".to_string(),
            };
            return Err(fail(t, &y, reason));
        }

        match stages(f, &y, &k1, h) {
            Err(Error::Domain(msg)) => {
                last_domain_error = Some(msg);
                traj.rejected += 1;
                h *= 0.25;
                accepted_since_reject = false;
                continue;
            }
            Err(e) => return Err(fail(t, &y, e.to_string())),
            Ok((y1, k, err_vec)) => {
                let err = (err_vec
                    .iter()
                    .enumerate()
                    .map(|(i, e)| (e / scale(&y, &y1, i)).powi(2))
                    .sum::<f64>()
                    / n)
                    .sqrt();
                if !err.is_finite() {
                    traj.rejected += 1;
                    h *= 0.25;
                    continue;
                }
                if err <= 1.0 {
                    let cont = dense(&y, &y1, &k, h);
                    let step = DenseStep {
                        t0: t,
                        t1: if last { t_end } else { t + h },
                        cont,
                    };
                    t = step.t1;
                    k1 = k[6].clone();
                    y = y1;
                    traj.times.push(t);
                    traj.states.push(y.clone());
                    let control = observer(&step);
                    traj.steps.push(step);
                    if control == Control::Stop {
                        return Ok(traj);
                    }
                    let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
                    if !accepted_since_reject {
                        fac = fac.min(1.0);
                    }
                    accepted_since_reject = true;
                    h = (h * fac.clamp(0.2, 5.0)).min(opts.h_max);
                } else {
                    traj.rejected += 1;
                    accepted_since_reject = false;
                    h *= (0.9 * err.powf(-0.2)).max(0.2);
                }
            }
        }
    }
    if t < t_end {
        return Err(fail(
            t,
            &y,
            format!("step budget of {} exhausted", opts.max_steps),
        ));
    }
    Ok(traj)
}

type StageResult = (DVector<f64>, [DVector<f64>; 7], DVector<f64>);

fn stages(
    f: &mut dyn FnMut(&[f64]) -> Result<DVector<f64>>,
    y: &DVector<f64>,
    k1: &DVector<f64>,
    h: f64,
) -> Result<StageResult> {
    let mut eval = |v: DVector<f64>| -> Result<DVector<f64>> {
        let out = f(v.as_slice())?;
        if out.iter().all(|x| x.is_finite()) {
            Ok(out)
        } else {
            Err(Error::Domain("non-finite right-hand side".into()))
        }
    };
    let k2 = eval(y + k1 * (h * A21))?;
    let k3 = eval(y + (k1 * A31 + &k2 * A32) * h)?;
    let k4 = eval(y + (k1 * A41 + &k2 * A42 + &k3 * A43) * h)?;
    let k5 = eval(y + (k1 * A51 + &k2 * A52 + &k3 * A53 + &k4 * A54) * h)?;
    let k6 = eval(y + (k1 * A61 + &k2 * A62 + &k3 * A63 + &k4 * A64 + &k5 * A65) * h)?;
    let y1 = y + (k1 * A71 + &k3 * A73 + &k4 * A74 + &k5 * A75 + &k6 * A76) * h;
    let k7 = eval(y1.clone())?;
    let err = (k1 * E1 + &k3 * E3 + &k4 * E4 + &k5 * E5 + &k6 * E6 + &k7 * E7) * h;
    Ok((y1, [k1.clone(), k2, k3, k4, k5, k6, k7], err))
}

fn dense(y0: &DVector<f64>, y1: &DVector<f64>, k: &[DVector<f64>; 7], h: f64) -> [DVector<f64>; 5] {
    let r2 = y1 - y0;
    let r3 = &k[0] * h - &r2;
    let r4 = &r2 - &k[6] * h - &r3;
    let r5 = (&k[0] * D1 + &k[2] * D3 + &k[3] * D4 + &k[4] * D5 + &k[5] * D6 + &k[6] * D7) * h;
    [y0.clone(), r2, r3, r4, r5]
}
