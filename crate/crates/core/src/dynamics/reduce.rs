//! Local coordinates on a stoichiometric class.
//!
//! With conservation-law basis W and levels L, a class is {x : Wx = L}. We keep
//! `r = rank Γ` species whose rows of Γ are independent and solve the laws for
//! the remaining ones: x_D = W_D⁻¹(L − W_I x_I). The inverse is formed in exact
//! arithmetic; only the final affine map is converted to floating point.

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Zero};

use super::{simplex, VectorField};
use crate::error::{Error, Result};
use crate::kinetics::KineticModel;
use crate::rational::{self, Rational};
use crate::stoich::{rref, StoichMatrix};

#[derive(Debug, Clone)]
pub struct ReducedSystem {
    model: KineticModel,
    kept: Vec<usize>,
    laws: Vec<Vec<Rational>>,
    levels: Vec<f64>,
    offset: DVector<f64>,
    basis: DMatrix<f64>,
    interior: Vec<f64>,
}

pub fn reduce_to_class(model: &KineticModel, levels: &[f64]) -> Result<ReducedSystem> {
    let kept = StoichMatrix::of(model.net()).independent_species();
    reduce_to_class_with(model, levels, &kept)
}

/// Levels taken from a point of the class.
pub fn reduce_through_point(model: &KineticModel, point: &[f64]) -> Result<ReducedSystem> {
    if point.len() != model.num_species() {
        return Err(Error::Dimension(
            "point length differs from species count".into(),
        ));
    }
    let laws = StoichMatrix::of(model.net()).left_kernel();
    let levels: Vec<f64> = laws
        .iter()
        .map(|w| {
            w.iter()
                .zip(point)
                .map(|(wi, xi)| rational::to_f64(wi) * xi)
                .sum()
        })
        .collect();
    reduce_to_class(model, &levels)
}

/// Like [`reduce_to_class`] with an explicit choice of retained species.
pub fn reduce_to_class_with(
    model: &KineticModel,
    levels: &[f64],
    kept: &[usize],
) -> Result<ReducedSystem> {
    let gamma = StoichMatrix::of(model.net());
    let n = model.num_species();
    let laws = gamma.left_kernel();
    let k = laws.len();
    if levels.len() != k {
        return Err(Error::Dimension(format!(
            "{} class levels supplied for {k} conservation laws",
            levels.len()
        )));
    }
    let r = n - k;
    if kept.len() != r || kept.iter().any(|&s| s >= n) || !gamma.rows_independent(kept) {
        return Err(Error::InvalidArgument(format!(
            "species {kept:?} are not {r} independent coordinates for the class"
        )));
    }
    let dependent: Vec<usize> = (0..n).filter(|s| !kept.contains(s)).collect();

    // [W_D | W_I | I] -> [I | W_D⁻¹W_I | W_D⁻¹]
    let width = k + r + k;
    let rows: Vec<Vec<Rational>> = laws
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let mut row: Vec<Rational> = dependent.iter().map(|&d| w[d].clone()).collect();
            row.extend(kept.iter().map(|&s| w[s].clone()));
            row.extend((0..k).map(|j| {
                if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            row
        })
        .collect();
    let (reduced, pivots) = rref(rows, width);
    if pivots.len() < k || pivots[..k] != (0..k).collect::<Vec<_>>()[..] {
        return Err(Error::InvalidArgument(
            "eliminated block of the laws is singular".into(),
        ));
    }
    let coupling = DMatrix::from_fn(k, r, |i, j| rational::to_f64(&reduced[i][k + j]));
    let inverse = DMatrix::from_fn(k, k, |i, j| rational::to_f64(&reduced[i][k + r + j]));
    let dep_offset = &inverse * DVector::from_column_slice(levels);

    let mut offset = DVector::zeros(n);
    let mut basis = DMatrix::zeros(n, r);
    for (col, &s) in kept.iter().enumerate() {
        basis[(s, col)] = 1.0;
    }
    for (row, &d) in dependent.iter().enumerate() {
        offset[d] = dep_offset[row];
        for col in 0..r {
            basis[(d, col)] = -coupling[(row, col)];
        }
    }

    let interior = most_interior_point(&offset, &basis, kept, &dependent).ok_or_else(|| {
        Error::EmptyClass(format!(
            "levels {levels:?} do not meet the positive orthant"
        ))
    })?;

    Ok(ReducedSystem {
        model: model.clone(),
        kept: kept.to_vec(),
        laws,
        levels: levels.to_vec(),
        offset,
        basis,
        interior,
    })
}

/// Maximises min_j x_j over the class (capped), returning local coordinates
/// of the maximiser, or `None` if the class misses the open positive orthant.
fn most_interior_point(
    offset: &DVector<f64>,
    basis: &DMatrix<f64>,
    kept: &[usize],
    dependent: &[usize],
) -> Option<Vec<f64>> {
    let r = kept.len();
    let scale = offset.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let shift = dependent.iter().fold(0.0_f64, |m, &d| m.max(-offset[d])) + 1.0;
    let cap = scale;
    // variables (u_1..u_r, τ), t = τ − shift
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 0..r {
        let mut row = vec![0.0; r + 1];
        row[i] = -1.0;
        row[r] = 1.0;
        a.push(row);
        b.push(shift);
    }
    for &d in dependent {
        let mut row: Vec<f64> = (0..r).map(|j| -basis[(d, j)]).collect();
        row.push(1.0);
        a.push(row);
        b.push(offset[d] + shift);
    }
    let mut cap_row = vec![0.0; r + 1];
    cap_row[r] = 1.0;
    a.push(cap_row);
    b.push(shift + cap);
    let mut objective = vec![0.0; r + 1];
    objective[r] = 1.0;
    let (value, z) = simplex::maximize(&objective, &a, &b)?;
    let t = value - shift;
    if t <= 1e-12 * scale {
        return None;
    }
    Some(z[..r].to_vec())
}

impl ReducedSystem {
    pub fn model(&self) -> &KineticModel {
        &self.model
    }

    /// Species indices used as local coordinates.
    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn laws(&self) -> &[Vec<Rational>] {
        &self.laws
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn dimension(&self) -> usize {
        self.kept.len()
    }

    pub fn full_state(&self, u: &[f64]) -> DVector<f64> {
        &self.offset + &self.basis * DVector::from_column_slice(u)
    }

    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        self.kept.iter().map(|&s| x[s]).collect()
    }

    /// Local coordinates of the point of the class farthest from the
    /// boundary (min concentration maximised, capped at the class scale).
    pub fn interior_point(&self) -> &[f64] {
        &self.interior
    }

    /// Same class and coordinates, different rate constants.
    pub fn with_kappa(&self, kappa: Vec<f64>) -> Result<Self> {
        Ok(Self {
            model: self.model.with_kappa(kappa)?,
            ..self.clone()
        })
    }
}

impl VectorField for ReducedSystem {
    fn dim(&self) -> usize {
        self.kept.len()
    }

    fn rhs(&self, u: &[f64]) -> Result<DVector<f64>> {
        let x = self.full_state(u);
        let f = self.model.ode_rhs(x.as_slice())?;
        Ok(DVector::from_iterator(
            self.kept.len(),
            self.kept.iter().map(|&s| f[s]),
        ))
    }

    fn jacobian(&self, u: &[f64]) -> Result<DMatrix<f64>> {
        let x = self.full_state(u);
        let j = self.model.ode_jacobian(x.as_slice())?;
        Ok(j.select_rows(self.kept.iter()) * &self.basis)
    }

    fn embed(&self, u: &[f64]) -> Vec<f64> {
        self.full_state(u).as_slice().to_vec()
    }
}
