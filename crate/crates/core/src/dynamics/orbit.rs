//! Periodic orbits by single shooting on a Poincaré section.
//!
//! The section passes through the seed orthogonally to the flow. Newton acts
//! on the return map in section coordinates s (u = p + E s, E an orthonormal
//! basis of n⊥), with derivative DP = Eᵀ(I − f nᵀ/(nᵀf)) M E where M is the
//! monodromy from the variational equations. The nontrivial multipliers are
//! the eigenvalues of DP; reading them off M directly loses half the digits
//! when M has a Jordan block at 1 (centres).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::equilibrium::{eigenvalues, serialize_complex};
use super::integrate::{dopri5, integrate, Control, DenseStep, OdeOptions};
use super::{norm_inf, VectorField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitOptions {
    pub ode: OdeOptions,
    /// Bound on ‖φ(T, u) − u‖∞ relative to max(1, ‖u‖∞).
    pub tol: f64,
    pub max_iter: usize,
    /// A return must occur before `return_factor · t_guess`.
    pub return_factor: f64,
    /// Distance from the unit circle below which a multiplier counts as 1.
    pub unit_tol: f64,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        Self {
            ode: OdeOptions {
                rtol: 1e-12,
                atol: 1e-12,
                ..OdeOptions::default()
            },
            tol: 1e-9,
            max_iter: 40,
            return_factor: 10.0,
            unit_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrbitStability {
    Stable,
    Unstable,
    Nonhyperbolic,
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodicOrbitRecord {
    /// Full species coordinates of the point on the section.
    pub anchor: Vec<f64>,
    pub reduced_anchor: Vec<f64>,
    pub period: f64,
    /// Trivial multiplier first, then the nontrivial ones by decreasing modulus.
    #[serde(serialize_with = "serialize_complex")]
    pub floquet: Vec<Complex64>,
    pub stability: OrbitStability,
    /// ‖φ(T, anchor) − anchor‖∞.
    pub return_error: f64,
    /// ∫₀ᵀ tr J dt; the multipliers multiply to its exponential.
    pub trace_integral: f64,
}

impl PeriodicOrbitRecord {
    pub fn trivial_multiplier(&self) -> Complex64 {
        self.floquet[0]
    }

    pub fn nontrivial_multipliers(&self) -> &[Complex64] {
        &self.floquet[1..]
    }

    /// `n + 1` equally spaced points of one period, in local coordinates.
    pub fn sample<F: VectorField>(
        &self,
        sys: &F,
        n: usize,
        ode: &OdeOptions,
    ) -> Result<Vec<DVector<f64>>> {
        let tr = integrate(sys, &self.reduced_anchor, self.period, ode)?;
        Ok(tr.resample(n).1)
    }
}

#[derive(Debug, Clone)]
pub struct Monodromy {
    pub end: DVector<f64>,
    pub matrix: DMatrix<f64>,
    pub trace_integral: f64,
}

fn augmented_rhs<F: VectorField>(sys: &F, y: &[f64]) -> Result<DVector<f64>> {
    let r = sys.dim();
    let u = &y[..r];
    let f = sys.rhs(u)?;
    let j = sys.jacobian(u)?;
    let m = DMatrix::from_column_slice(r, r, &y[r..r + r * r]);
    let jm = &j * m;
    let mut out = DVector::zeros(r + r * r + 1);
    out.rows_mut(0, r).copy_from(&f);
    out.rows_mut(r, r * r).copy_from_slice(jm.as_slice());
    out[r + r * r] = j.trace();
    Ok(out)
}

fn augmented_start(u0: &[f64]) -> DVector<f64> {
    let r = u0.len();
    let mut y = DVector::zeros(r + r * r + 1);
    y.rows_mut(0, r).copy_from_slice(u0);
    for i in 0..r {
        y[r + i * r + i] = 1.0;
    }
    y
}

fn split(y: &DVector<f64>, r: usize) -> Monodromy {
    Monodromy {
        end: y.rows(0, r).into_owned(),
        matrix: DMatrix::from_column_slice(r, r, y.rows(r, r * r).as_slice()),
        trace_integral: y[r + r * r],
    }
}

/// State transition matrix ∂φ(t, u0)/∂u0 with ∫ tr J along the way.
pub fn monodromy<F: VectorField>(
    sys: &F,
    u0: &[f64],
    t: f64,
    ode: &OdeOptions,
) -> Result<Monodromy> {
    let mut f = |y: &[f64]| augmented_rhs(sys, y);
    let tr = dopri5(&mut f, augmented_start(u0), t, ode, |_| Control::Continue)?;
    Ok(split(tr.final_state(), sys.dim()))
}

struct Section {
    point: DVector<f64>,
    normal: DVector<f64>,
    /// Orthonormal basis of the normal's complement, as columns.
    basis: DMatrix<f64>,
}

impl Section {
    fn new(point: DVector<f64>, flow: &DVector<f64>) -> Self {
        let r = point.len();
        let normal = flow.normalize();
        // Householder reflection taking e₁ to ±normal; its other columns span n⊥
        let mut v = normal.clone();
        v[0] += if normal[0] >= 0.0 { 1.0 } else { -1.0 };
        let h = DMatrix::identity(r, r) - &v * v.transpose() * (2.0 / v.norm_squared());
        let basis = h.columns(1, r - 1).into_owned();
        Self {
            point,
            normal,
            basis,
        }
    }

    fn g(&self, u: &[f64]) -> f64 {
        u.iter()
            .zip(self.point.iter())
            .zip(self.normal.iter())
            .map(|((a, p), n)| (a - p) * n)
            .sum()
    }

    fn lift(&self, s: &DVector<f64>) -> DVector<f64> {
        &self.point + &self.basis * s
    }
}

struct Return {
    time: f64,
    point: DVector<f64>,
    mono: Monodromy,
}

fn first_return<F: VectorField>(
    sys: &F,
    section: &Section,
    u0: &DVector<f64>,
    t_max: f64,
    ode: &OdeOptions,
) -> Result<Return> {
    let r = sys.dim();
    let delta = 1e-9 * norm_inf(section.point.as_slice()).max(1.0);
    let mut armed = false;
    let mut hit: Option<(f64, DVector<f64>)> = None;
    let g = |y: &DVector<f64>| section.g(&y.as_slice()[..r]);
    let observer = |step: &DenseStep| {
        let (g0, g1) = (g(step.start()), g(&step.end()));
        if armed && g0 < 0.0 && g1 >= 0.0 {
            let t = step
                .locate_root(g, 1e-15 * step.t1.abs().max(1.0))
                .unwrap_or(step.t1);
            hit = Some((t, step.eval(t)));
            return Control::Stop;
        }
        if g0.min(g1) < -delta {
            armed = true;
        }
        Control::Continue
    };
    let mut f = |y: &[f64]| augmented_rhs(sys, y);
    dopri5(&mut f, augmented_start(u0.as_slice()), t_max, ode, observer)?;
    let (time, y) =
        hit.ok_or_else(|| Error::Orbit(format!("no return to the section within t = {t_max}")))?;
    let mono = split(&y, r);
    Ok(Return {
        time,
        point: mono.end.clone(),
        mono,
    })
}

fn pseudo_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    svd.solve(b, 1e-10 * smax.max(f64::MIN_POSITIVE))
        .unwrap_or_else(|_| DVector::zeros(b.len()))
}

fn return_map_derivative(
    sys_f: &DVector<f64>,
    section: &Section,
    m: &DMatrix<f64>,
) -> DMatrix<f64> {
    let r = m.nrows();
    let nf = section.normal.dot(sys_f);
    let proj = DMatrix::identity(r, r) - sys_f * section.normal.transpose() / nf;
    section.basis.transpose() * proj * m * &section.basis
}

/// Locates the periodic orbit through (or near) `seed`. `t_guess` is a rough
/// period used to bound the return time.
pub fn find_periodic_orbit<F: VectorField>(
    sys: &F,
    seed: &[f64],
    t_guess: f64,
    opts: &OrbitOptions,
) -> Result<PeriodicOrbitRecord> {
    let r = sys.dim();
    if r < 2 {
        return Err(Error::InvalidArgument(
            "periodic orbits need dimension at least 2".into(),
        ));
    }
    if seed.len() != r {
        return Err(Error::Dimension(format!(
            "seed has length {}, expected {r}",
            seed.len()
        )));
    }
    if !(t_guess > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "period guess {t_guess} must be positive"
        )));
    }
    let p = DVector::from_column_slice(seed);
    let f0 = sys.rhs(seed)?;
    let scale = norm_inf(seed).max(1.0);
    if norm_inf(f0.as_slice()) <= 1e-10 * scale {
        return Err(Error::Orbit(
            "degenerate section: seed is (nearly) an equilibrium".into(),
        ));
    }
    let section = Section::new(p, &f0);
    let t_max = opts.return_factor * t_guess;
    let ode = OdeOptions {
        h_max: opts.ode.h_max.min(t_guess / 20.0),
        ..opts.ode.clone()
    };

    let mut s = DVector::zeros(r - 1);
    let mut u = section.lift(&s);
    let mut ret = first_return(sys, &section, &u, t_max, &ode)?;
    let mut err = norm_inf((&ret.point - &u).as_slice());
    let mut iter = 0;
    while err > opts.tol * scale {
        iter += 1;
        if iter > opts.max_iter {
            return Err(Error::NoConvergence(format!(
                "shooting did not converge in {} iterations (return error {err:e})",
                opts.max_iter
            )));
        }
        let f_end = sys.rhs(ret.point.as_slice())?;
        let dp = return_map_derivative(&f_end, &section, &ret.mono.matrix);
        let residual = section.basis.transpose() * (&ret.point - &section.point) - &s;
        let a = dp - DMatrix::identity(r - 1, r - 1);
        let step = pseudo_solve(&a, &(-&residual));
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda >= 1.0 / 256.0 {
            let s_try = &s + &step * lambda;
            let u_try = section.lift(&s_try);
            if let Ok(rt) = first_return(sys, &section, &u_try, t_max, &ode) {
                let e_try = norm_inf((&rt.point - &u_try).as_slice());
                if e_try < err {
                    s = s_try;
                    u = u_try;
                    ret = rt;
                    err = e_try;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence(format!(
                "shooting stalled with return error {err:e} after {iter} iterations"
            )));
        }
    }

    let f_anchor = sys.rhs(u.as_slice())?;
    if norm_inf(f_anchor.as_slice()) <= 1e-8 * scale {
        return Err(Error::Orbit("orbit collapsed onto an equilibrium".into()));
    }
    let m = &ret.mono.matrix;
    let trivial = f_anchor.dot(&(m * &f_anchor)) / f_anchor.norm_squared();
    let f_end = sys.rhs(ret.point.as_slice())?;
    let dp = return_map_derivative(&f_end, &section, m);
    let mut nontrivial = eigenvalues(&dp);
    nontrivial.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(b.im.total_cmp(&a.im)));
    if (trivial - 1.0).abs() > 1e-3 {
        return Err(Error::Orbit(format!(
            "trivial multiplier {trivial} is not 1; not a periodic orbit"
        )));
    }
    let stability = if nontrivial
        .iter()
        .any(|z| (z.norm() - 1.0).abs() <= opts.unit_tol)
    {
        OrbitStability::Nonhyperbolic
    } else if nontrivial.iter().all(|z| z.norm() < 1.0) {
        OrbitStability::Stable
    } else {
        OrbitStability::Unstable
    };
    let mut floquet = vec![Complex64::new(trivial, 0.0)];
    floquet.extend(nontrivial);
    Ok(PeriodicOrbitRecord {
        anchor: sys.embed(u.as_slice()),
        reduced_anchor: u.as_slice().to_vec(),
        period: ret.time,
        floquet,
        stability,
        return_error: err,
        trace_integral: ret.mono.trace_integral,
    })
}
