//! Equilibria by damped Newton in local class coordinates.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{norm_inf, VectorField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    Stable,
    Unstable,
    Saddle,
    Nonhyperbolic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOptions {
    /// Residual bound relative to the local scale ‖u‖·‖J‖.
    pub tol: f64,
    pub max_iter: usize,
    /// |Re λ| at or below this is treated as zero.
    pub hyperbolicity: f64,
    /// Relative distance under which two equilibria are identified.
    pub dedup: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 100,
            hyperbolicity: 1e-8,
            dedup: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumRecord {
    /// Full species coordinates.
    pub point: Vec<f64>,
    /// Local class coordinates.
    pub reduced: Vec<f64>,
    #[serde(serialize_with = "serialize_complex")]
    pub eigenvalues: Vec<Complex64>,
    pub stability: Stability,
    pub residual: f64,
}

impl EquilibriumRecord {
    pub fn is_positive(&self) -> bool {
        let scale = norm_inf(&self.point).max(1.0);
        self.point.iter().all(|&v| v > 1e-8 * scale)
    }
}

pub(crate) fn serialize_complex<S: serde::Serializer>(
    values: &[Complex64],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let pairs: Vec<[f64; 2]> = values.iter().map(|z| [z.re, z.im]).collect();
    pairs.serialize(s)
}

pub fn classify(eigenvalues: &[Complex64], threshold: f64) -> Stability {
    if eigenvalues.iter().any(|z| z.re.abs() <= threshold) {
        Stability::Nonhyperbolic
    } else if eigenvalues.iter().all(|z| z.re < 0.0) {
        Stability::Stable
    } else if eigenvalues.iter().all(|z| z.re > 0.0) {
        Stability::Unstable
    } else {
        Stability::Saddle
    }
}

/// Eigenvalues sorted by decreasing real part, then decreasing imaginary part.
pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<Complex64> {
    let mut ev: Vec<Complex64> = if m.nrows() == 0 {
        Vec::new()
    } else {
        m.complex_eigenvalues()
            .iter()
            .map(|z| Complex64::new(z.re, z.im))
            .collect()
    };
    ev.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    ev
}

fn residual_scale(u: &[f64], j: &DMatrix<f64>) -> f64 {
    let jn = j
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    (norm_inf(u).max(1.0) * jn).max(1.0)
}

pub fn find_equilibrium<F: VectorField>(
    sys: &F,
    seed: &[f64],
    opts: &NewtonOptions,
) -> Result<EquilibriumRecord> {
    if seed.len() != sys.dim() {
        return Err(Error::Dimension(format!(
            "seed has length {}, expected {}",
            seed.len(),
            sys.dim()
        )));
    }
    let mut u = DVector::from_column_slice(seed);
    let mut f = sys.rhs(u.as_slice())?;
    for _ in 0..=opts.max_iter {
        let j = sys.jacobian(u.as_slice())?;
        let res = norm_inf(f.as_slice());
        if res <= opts.tol * residual_scale(u.as_slice(), &j) {
            let (u, j, res) = polish(sys, u, j, res);
            return record(sys, u, j, res, opts);
        }
        let Some(step) = j.clone().lu().solve(&(-&f)) else {
            return Err(Error::SingularJacobian(format!(
                "singular Jacobian at {:?} with residual {res:e} (possible fold)",
                u.as_slice()
            )));
        };
        // trust region: keeps Newton in the basin of the nearest root
        let radius = 0.5 * norm_inf(u.as_slice()).max(1.0);
        let mut lambda = (radius / norm_inf(step.as_slice())).min(1.0);
        loop {
            let trial = &u + &step * lambda;
            if let Ok(ft) = sys.rhs(trial.as_slice()) {
                let rt = norm_inf(ft.as_slice());
                if rt.is_finite() && rt <= (1.0 - 1e-4 * lambda) * res {
                    u = trial;
                    f = ft;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-10 {
                // no descent: accept if already at rounding level
                if norm_inf(step.as_slice()) <= 1e-13 * norm_inf(u.as_slice()).max(1.0)
                    && res <= 1e-9 * residual_scale(u.as_slice(), &j)
                {
                    return record(sys, u, j, res, opts);
                }
                return Err(Error::NoConvergence(format!(
                    "line search failed at {:?}, residual {res:e}",
                    u.as_slice()
                )));
            }
        }
    }
    Err(Error::NoConvergence(format!(
        "Newton did not converge in {} iterations (last iterate {:?})",
        opts.max_iter,
        u.as_slice()
    )))
}

/// Full Newton steps past the residual test while they keep shrinking.
/// Regular roots stop after one step; at a degenerate root, where Newton is
/// only linear, this moves the iterate from ~√tol to ~√ε_mach.
fn polish<F: VectorField>(
    sys: &F,
    mut u: DVector<f64>,
    mut j: DMatrix<f64>,
    mut res: f64,
) -> (DVector<f64>, DMatrix<f64>, f64) {
    let mut last = f64::INFINITY;
    for _ in 0..60 {
        let Ok(f) = sys.rhs(u.as_slice()) else { break };
        let Some(step) = j.clone().lu().solve(&(-f)) else {
            break;
        };
        let size = norm_inf(step.as_slice());
        if !(size < 0.9 * last) || size <= 4.0 * f64::EPSILON * norm_inf(u.as_slice()).max(1.0) {
            break;
        }
        let trial = &u + &step;
        let (Ok(ft), Ok(jt)) = (sys.rhs(trial.as_slice()), sys.jacobian(trial.as_slice())) else {
            break;
        };
        let rt = norm_inf(ft.as_slice());
        if !(rt <= res.max(f64::MIN_POSITIVE) * 2.0) {
            break;
        }
        (u, j, res, last) = (trial, jt, rt, size);
    }
    (u, j, res)
}

fn record<F: VectorField>(
    sys: &F,
    u: DVector<f64>,
    j: DMatrix<f64>,
    residual: f64,
    opts: &NewtonOptions,
) -> Result<EquilibriumRecord> {
    let j = sys.jacobian(u.as_slice()).unwrap_or(j);
    let eigenvalues = eigenvalues(&j);
    Ok(EquilibriumRecord {
        point: sys.embed(u.as_slice()),
        reduced: u.as_slice().to_vec(),
        stability: classify(&eigenvalues, opts.hyperbolicity),
        eigenvalues,
        residual,
    })
}

/// Newton from `grid` seeds per axis over `search_box` (one interval per
/// local coordinate, or a single interval used for all of them). Returns the
/// distinct positive equilibria found, sorted lexicographically.
pub fn find_all_equilibria<F: VectorField>(
    sys: &F,
    search_box: &[(f64, f64)],
    grid: usize,
    opts: &NewtonOptions,
) -> Result<Vec<EquilibriumRecord>> {
    let r = sys.dim();
    let bounds: Vec<(f64, f64)> = match search_box.len() {
        1 => vec![search_box[0]; r],
        n if n == r => search_box.to_vec(),
        n => {
            return Err(Error::Dimension(format!(
                "search box has {n} sides for dimension {r}"
            )))
        }
    };
    if bounds
        .iter()
        .any(|&(lo, hi)| !(lo <= hi) || !lo.is_finite() || !hi.is_finite())
    {
        return Err(Error::InvalidArgument(format!(
            "invalid search box {bounds:?}"
        )));
    }
    let grid = grid.max(1);
    let total = grid
        .checked_pow(r as u32)
        .ok_or_else(|| Error::InvalidArgument("seed grid too large".into()))?;
    let axis = |i: usize, (lo, hi): (f64, f64)| {
        if grid == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * i as f64 / (grid - 1) as f64
        }
    };
    let found: Vec<EquilibriumRecord> = (0..total)
        .into_par_iter()
        .filter_map(|mut idx| {
            let seed: Vec<f64> = bounds
                .iter()
                .map(|&b| {
                    let i = idx % grid;
                    idx /= grid;
                    axis(i, b)
                })
                .collect();
            find_equilibrium(sys, &seed, opts)
                .ok()
                .filter(|e| e.is_positive())
        })
        .collect();

    let mut distinct: Vec<EquilibriumRecord> = Vec::new();
    for e in found {
        let scale = norm_inf(&e.point).max(1.0);
        let dup = distinct.iter().any(|d| {
            d.point
                .iter()
                .zip(&e.point)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
                <= opts.dedup * scale
        });
        if !dup {
            distinct.push(e);
        }
    }
    distinct.sort_by(|a, b| {
        a.point
            .iter()
            .zip(&b.point)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(distinct)
}
