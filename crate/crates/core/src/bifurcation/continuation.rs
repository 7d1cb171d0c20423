//! Equilibrium branches along one-parameter paths.
//!
//! Hopf points are found by natural-parameter continuation. Folds need
//! pseudo-arclength continuation since the branch turns back in the
//! parameter exactly where det J vanishes.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use super::{focal_value_l1, illinois, BifurcationKind, BifurcationPoint};
use crate::dynamics::{find_equilibrium, norm_inf, NewtonOptions, VectorField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterPath {
    pub name: String,
    pub start: f64,
    pub end: f64,
    pub samples: usize,
}

impl ParameterPath {
    pub fn new(name: impl Into<String>, start: f64, end: f64, samples: usize) -> Self {
        Self {
            name: name.into(),
            start,
            end,
            samples,
        }
    }

    fn points(&self) -> Vec<f64> {
        let n = self.samples.max(1);
        (0..=n)
            .map(|i| self.start + (self.end - self.start) * i as f64 / n as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOptions {
    pub newton: NewtonOptions,
    /// Parameter-relative location tolerance.
    pub param_tol: f64,
    /// Bound on the test function (det or trace) at a located point,
    /// relative to the Jacobian scale.
    pub test_tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            newton: NewtonOptions::default(),
            param_tol: 1e-10,
            test_tol: 1e-10,
        }
    }
}

fn jac_scale(j: &DMatrix<f64>) -> f64 {
    j.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0)
}

fn point(
    kind: BifurcationKind,
    name: &str,
    p: f64,
    state: Vec<f64>,
    j: &DMatrix<f64>,
) -> BifurcationPoint {
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("det".to_string(), j.determinant());
    diagnostics.insert("trace".to_string(), j.trace());
    BifurcationPoint {
        kind,
        parameters: BTreeMap::from([(name.to_string(), p)]),
        state,
        diagnostics,
    }
}

fn lost(p: f64, e: impl std::fmt::Display) -> Error {
    Error::BranchLost {
        param: p,
        reason: e.to_string(),
    }
}

/// Tracks the equilibrium branch through `seed` along `path` and reports
/// every point where the trace of the Jacobian changes sign with det > 0.
/// Needs a planar system.
pub fn hopf_scan<S, B>(
    family: &B,
    path: &ParameterPath,
    seed: &[f64],
    opts: &ScanOptions,
) -> Result<Vec<BifurcationPoint>>
where
    S: VectorField,
    B: Fn(f64) -> Result<S>,
{
    let solve = |p: f64, guess: &[f64]| -> Result<(Vec<f64>, DMatrix<f64>)> {
        let sys = family(p)?;
        if sys.dim() != 2 {
            return Err(Error::InvalidArgument(
                "Hopf scans need a planar system".into(),
            ));
        }
        let e = find_equilibrium(&sys, guess, &opts.newton).map_err(|e| lost(p, e))?;
        let j = sys.jacobian(&e.reduced)?;
        Ok((e.reduced, j))
    };
    let mut found = Vec::new();
    let mut prev: Option<(f64, Vec<f64>, DMatrix<f64>)> = None;
    let mut guess = seed.to_vec();
    for p in path.points() {
        let (u, j) = solve(p, &guess)?;
        if let Some((pa, ua, ja)) = &prev {
            let (ta, tb) = (ja.trace(), j.trace());
            if ta.signum() != tb.signum() && ja.determinant() > 0.0 && j.determinant() > 0.0 {
                let (pa, pb) = (*pa, p);
                let interp = |q: f64| -> Vec<f64> {
                    let w = (q - pa) / (pb - pa);
                    ua.iter().zip(&u).map(|(a, b)| a + w * (b - a)).collect()
                };
                let scale = jac_scale(&j);
                let ph = illinois(
                    |q| Ok(solve(q, &interp(q))?.1.trace()),
                    (pa, ta),
                    (pb, tb),
                    opts.param_tol * 1e-2 * pb.abs().max(1.0),
                    opts.test_tol * 1e-2 * scale,
                )?;
                let (uh, jh) = solve(ph, &interp(ph))?;
                let sys = family(ph)?;
                let mut bp = point(BifurcationKind::Hopf, &path.name, ph, sys.embed(&uh), &jh);
                bp.diagnostics
                    .insert("omega".into(), jh.determinant().max(0.0).sqrt());
                if let Ok(l1) = focal_value_l1(&sys, &uh) {
                    bp.diagnostics.insert("l1".into(), l1);
                }
                found.push(bp);
            }
        }
        guess = u.clone();
        prev = Some((p, u, j));
    }
    Ok(found)
}

struct Branch<'a, S, B> {
    family: &'a B,
    opts: &'a ScanOptions,
    _marker: std::marker::PhantomData<S>,
}

impl<S, B> Branch<'_, S, B>
where
    S: VectorField,
    B: Fn(f64) -> Result<S>,
{
    /// Rows: [J_u | f_p].
    fn extended_jacobian(&self, u: &[f64], p: f64) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let sys = (self.family)(p)?;
        let r = sys.dim();
        let f = sys.rhs(u)?;
        let j = sys.jacobian(u)?;
        let h = 1e-6 * p.abs().max(1.0);
        let fp = ((self.family)(p + h)?.rhs(u)? - (self.family)(p - h)?.rhs(u)?) / (2.0 * h);
        let mut m = DMatrix::zeros(r, r + 1);
        m.view_mut((0, 0), (r, r)).copy_from(&j);
        m.set_column(r, &fp);
        Ok((f, m))
    }

    fn tangent(&self, x: &DVector<f64>, reference: &DVector<f64>) -> Result<DVector<f64>> {
        let r = x.len() - 1;
        let (_, m) = self.extended_jacobian(&x.as_slice()[..r], x[r])?;
        let mut a = DMatrix::zeros(r + 1, r + 1);
        a.view_mut((0, 0), (r, r + 1)).copy_from(&m);
        a.set_row(r, &reference.transpose());
        let mut rhs = DVector::zeros(r + 1);
        rhs[r] = 1.0;
        let t = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| lost(x[r], "singular extended Jacobian"))?;
        Ok(t.normalize())
    }

    /// Newton on f(u, p) = 0 with vᵀ(x − pred) = 0.
    fn correct(&self, pred: &DVector<f64>, v: &DVector<f64>) -> Result<DVector<f64>> {
        let r = pred.len() - 1;
        let mut x = pred.clone();
        for _ in 0..25 {
            let (f, m) = self.extended_jacobian(&x.as_slice()[..r], x[r])?;
            let mut a = DMatrix::zeros(r + 1, r + 1);
            a.view_mut((0, 0), (r, r + 1)).copy_from(&m);
            a.set_row(r, &v.transpose());
            let mut g = DVector::zeros(r + 1);
            g.rows_mut(0, r).copy_from(&f);
            g[r] = v.dot(&(&x - pred));
            let dx = a
                .lu()
                .solve(&(-&g))
                .ok_or_else(|| lost(x[r], "singular corrector matrix"))?;
            x += &dx;
            let scale = norm_inf(x.as_slice()).max(1.0);
            if norm_inf(dx.as_slice()) <= 1e-13 * scale {
                let (f, m) = self.extended_jacobian(&x.as_slice()[..r], x[r])?;
                let fscale = jac_scale(&m) * scale;
                if norm_inf(f.as_slice()) <= self.opts.newton.tol * fscale * 1e2 {
                    return Ok(x);
                }
            }
        }
        Err(lost(x[r], "corrector did not converge"))
    }

    fn det(&self, x: &DVector<f64>) -> Result<(f64, f64)> {
        let r = x.len() - 1;
        let j = (self.family)(x[r])?.jacobian(&x.as_slice()[..r])?;
        Ok((j.determinant(), jac_scale(&j).powi(r as i32)))
    }
}

/// Pseudo-arclength continuation of the equilibrium branch through `seed`
/// (at `path.start`) until the parameter leaves the path's interval; reports
/// every sign change of det J, refined along the arc.
pub fn fold_scan<S, B>(
    family: &B,
    path: &ParameterPath,
    seed: &[f64],
    opts: &ScanOptions,
) -> Result<Vec<BifurcationPoint>>
where
    S: VectorField,
    B: Fn(f64) -> Result<S>,
{
    let branch = Branch {
        family,
        opts,
        _marker: std::marker::PhantomData,
    };
    let (lo, hi) = (path.start.min(path.end), path.start.max(path.end));
    let start_sys = family(path.start)?;
    let r = start_sys.dim();
    let e = find_equilibrium(&start_sys, seed, &opts.newton).map_err(|e| lost(path.start, e))?;
    let mut x = DVector::from_iterator(r + 1, e.reduced.iter().copied().chain([path.start]));
    let mut dir = DVector::zeros(r + 1);
    dir[r] = (path.end - path.start).signum();
    let mut v = branch.tangent(&x, &dir)?;
    if v[r] * dir[r] < 0.0 {
        v = -v;
    }
    let ds0 = (hi - lo) / path.samples.max(1) as f64;
    let mut ds = ds0;
    let (mut d_old, _) = branch.det(&x)?;
    let mut found = Vec::new();
    let max_steps = 200 * path.samples.max(1);
    for _ in 0..max_steps {
        let pred = &x + &v * ds;
        let y = match branch.correct(&pred, &v) {
            Ok(y) => y,
            Err(err) => {
                ds *= 0.5;
                if ds < 1e-8 * ds0 {
                    return Err(lost(x[r], err));
                }
                continue;
            }
        };
        let w = branch.tangent(&y, &v)?;
        let (d_new, dscale) = branch.det(&y)?;
        if d_new.signum() != d_old.signum() && d_old != 0.0 {
            let at = |s: f64| -> Result<DVector<f64>> { branch.correct(&(&x + &v * s), &v) };
            let s = illinois(
                |s| Ok(branch.det(&at(s)?)?.0),
                (0.0, d_old),
                (ds, d_new),
                1e-14 * ds0,
                opts.test_tol * 1e-2 * dscale,
            )?;
            let z = at(s)?;
            let p = z[r];
            let sys = family(p)?;
            let u = &z.as_slice()[..r];
            found.push(point(
                BifurcationKind::Fold,
                &path.name,
                p,
                sys.embed(u),
                &sys.jacobian(u)?,
            ));
        }
        x = y;
        v = w;
        d_old = d_new;
        if x[r] < lo || x[r] > hi {
            return Ok(found);
        }
        ds = (ds * 1.5).min(ds0);
    }
    Err(lost(
        x[r],
        format!("parameter interval not left after {max_steps} steps"),
    ))
}
