//! Dynamics on stoichiometric classes: reduction to local coordinates,
//! adaptive integration, equilibria and periodic orbits.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::kinetics::KineticModel;

pub mod equilibrium;
pub mod integrate;
pub mod orbit;
pub mod reduce;
mod simplex;

pub use equilibrium::{
    classify, eigenvalues, find_all_equilibria, find_equilibrium, EquilibriumRecord, NewtonOptions,
    Stability,
};
pub use integrate::{integrate, integrate_with, Control, DenseStep, OdeOptions, Trajectory};
pub use orbit::{
    find_periodic_orbit, monodromy, Monodromy, OrbitOptions, OrbitStability, PeriodicOrbitRecord,
};
pub use reduce::{reduce_through_point, reduce_to_class, reduce_to_class_with, ReducedSystem};

/// An autonomous vector field with an analytic Jacobian.
pub trait VectorField: Sync {
    fn dim(&self) -> usize;

    /// Fails with [`crate::Error::Domain`] outside the admissible region.
    fn rhs(&self, u: &[f64]) -> Result<DVector<f64>>;

    fn jacobian(&self, u: &[f64]) -> Result<DMatrix<f64>>;

    /// Species concentrations corresponding to the local coordinates `u`.
    fn embed(&self, u: &[f64]) -> Vec<f64> {
        u.to_vec()
    }
}

impl VectorField for KineticModel {
    fn dim(&self) -> usize {
        self.num_species()
    }

    fn rhs(&self, u: &[f64]) -> Result<DVector<f64>> {
        self.ode_rhs(u)
    }

    fn jacobian(&self, u: &[f64]) -> Result<DMatrix<f64>> {
        self.ode_jacobian(u)
    }
}

impl<F: VectorField + ?Sized> VectorField for &F {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn rhs(&self, u: &[f64]) -> Result<DVector<f64>> {
        (**self).rhs(u)
    }

    fn jacobian(&self, u: &[f64]) -> Result<DMatrix<f64>> {
        (**self).jacobian(u)
    }

    fn embed(&self, u: &[f64]) -> Vec<f64> {
        (**self).embed(u)
    }
}

/// Time-reversed field: repelling sets of `F` become attracting.
#[derive(Debug, Clone, Copy)]
pub struct Reversed<F>(pub F);

impl<F: VectorField> VectorField for Reversed<F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn rhs(&self, u: &[f64]) -> Result<DVector<f64>> {
        Ok(-self.0.rhs(u)?)
    }

    fn jacobian(&self, u: &[f64]) -> Result<DMatrix<f64>> {
        Ok(-self.0.jacobian(u)?)
    }

    fn embed(&self, u: &[f64]) -> Vec<f64> {
        self.0.embed(u)
    }
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
