//! First focal value (first Lyapunov coefficient) of a planar Hopf point.
//!
//! l₁ = (1/2ω) Re[⟨p, C(q,q,q̄)⟩ − 2⟨p, B(q, A⁻¹B(q,q̄))⟩ + ⟨p, B(q̄, (2iω − A)⁻¹B(q,q))⟩]
//! with Aq = iωq, Aᵀp = −iωp, ⟨p,q⟩ = 1. B and C come from differencing
//! the analytic Jacobian (step 1e-4, one Richardson extrapolation).

use nalgebra::{Complex, DMatrix, DVector};

use crate::dynamics::VectorField;
use crate::error::{Error, Result};

type C64 = Complex<f64>;

const STEP: f64 = 1e-4;

struct Derivatives<'a, F> {
    sys: &'a F,
    u: DVector<f64>,
}

impl<F: VectorField> Derivatives<'_, F> {
    fn jac(&self, d: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.sys.jacobian((&self.u + d).as_slice())
    }

    /// D_x J along a real direction.
    fn dj(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        let central = |h: f64| -> Result<DMatrix<f64>> {
            Ok((self.jac(&(x * h))? - self.jac(&(x * -h))?) / (2.0 * h))
        };
        let (a, b) = (central(STEP)?, central(STEP / 2.0)?);
        Ok((b * 4.0 - a) / 3.0)
    }

    /// D²J along real directions x, y.
    fn d2j(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<DMatrix<f64>> {
        let mixed = |h: f64| -> Result<DMatrix<f64>> {
            let pp = self.jac(&((x + y) * h))?;
            let pm = self.jac(&((x - y) * h))?;
            let mp = self.jac(&((y - x) * h))?;
            let mm = self.jac(&((x + y) * -h))?;
            Ok((pp - pm - mp + mm) / (4.0 * h * h))
        };
        let (a, b) = (mixed(STEP)?, mixed(STEP / 2.0)?);
        Ok((b * 4.0 - a) / 3.0)
    }

    fn b(&self, x: &DVector<C64>, y: &DVector<C64>) -> Result<DVector<C64>> {
        let (xr, xi) = (x.map(|z| z.re), x.map(|z| z.im));
        let yc = y.clone();
        let jr = self.dj(&xr)?.map(|v| C64::new(v, 0.0));
        let ji = self.dj(&xi)?.map(|v| C64::new(v, 0.0));
        Ok(jr * &yc + ji * yc * C64::new(0.0, 1.0))
    }

    fn c(&self, x: &DVector<C64>, y: &DVector<C64>, z: &DVector<C64>) -> Result<DVector<C64>> {
        let parts = |v: &DVector<C64>| (v.map(|w| w.re), v.map(|w| w.im));
        let (xr, xi) = parts(x);
        let (yr, yi) = parts(y);
        let i = C64::new(0.0, 1.0);
        let cplx = |m: DMatrix<f64>| m.map(|v| C64::new(v, 0.0));
        let m = cplx(self.d2j(&xr, &yr)?) - cplx(self.d2j(&xi, &yi)?)
            + (cplx(self.d2j(&xr, &yi)?) + cplx(self.d2j(&xi, &yr)?)) * i;
        Ok(m * z)
    }
}

fn inner(p: &DVector<C64>, q: &DVector<C64>) -> C64 {
    p.iter().zip(q.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// First focal value at a Hopf equilibrium `u` of a planar system.
pub fn focal_value_l1<F: VectorField>(sys: &F, u: &[f64]) -> Result<f64> {
    if sys.dim() != 2 {
        return Err(Error::InvalidArgument(
            "focal values need a planar system".into(),
        ));
    }
    let a = sys.jacobian(u)?;
    let (tr, det) = (a.trace(), a.determinant());
    let scale = a
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    if !(det > 0.0) || tr.abs() > 1e-6 * scale {
        return Err(Error::InvalidArgument(format!(
            "not a Hopf configuration: trace {tr:e}, det {det:e}"
        )));
    }
    let omega = (det - tr * tr / 4.0).sqrt();
    let lambda = C64::new(tr / 2.0, omega);
    let (a11, a12, a21, a22) = (a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
    let re = |v: f64| C64::new(v, 0.0);
    // eigenvectors of A (for λ) and Aᵀ (for λ̄) from whichever row is better conditioned
    let q = if a12.abs() >= a21.abs() {
        DVector::from_vec(vec![re(a12), lambda - a11])
    } else {
        DVector::from_vec(vec![lambda - a22, re(a21)])
    };
    let mut p = if a21.abs() >= a12.abs() {
        DVector::from_vec(vec![re(a21), lambda.conj() - a11])
    } else {
        DVector::from_vec(vec![lambda.conj() - a22, re(a12)])
    };
    let q = &q / C64::new(q.norm(), 0.0);
    let s = inner(&p, &q);
    p /= s.conj();

    let d = Derivatives {
        sys,
        u: DVector::from_column_slice(u),
    };
    let qb = q.map(|z| z.conj());
    let ac = a.map(re);
    let bqq = d.b(&q, &q)?;
    let bqqb = d.b(&q, &qb)?;
    let s1 = ac
        .clone()
        .lu()
        .solve(&bqqb)
        .ok_or_else(|| Error::SingularJacobian("A is singular".into()))?;
    let shifted = DMatrix::<C64>::identity(2, 2) * C64::new(0.0, 2.0 * omega) - &ac;
    let s2 = shifted
        .lu()
        .solve(&bqq)
        .ok_or_else(|| Error::SingularJacobian("2iω − A is singular".into()))?;
    let term = inner(&p, &d.c(&q, &q, &qb)?) - inner(&p, &d.b(&q, &s1)?) * 2.0
        + inner(&p, &d.b(&qb, &s2)?);
    Ok(term.re / (2.0 * omega))
}
