//! Adding a linearly dependent species to a network.
//!
//! Given a model ẋ = Γv(x) and a rational vector `c`, the lifted network has
//! one more species whose row of the stoichiometric matrix is cᵗΓ. Reaction
//! `j` gets exponent α_j in the new species and rate constant ε^{α_j} κ_j. On
//! the invariant set y = 1/ε + cᵗx the lifted dynamics, written in the
//! original coordinates, are
//!
//! ```text
//! ẋ = Γ (v(x) ∘ (1 + ε cᵗx)^α)
//! ```
//!
//! which reduces to the original field at ε = 0.

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::dynamics::VectorField;
use crate::error::{Error, Result};
use crate::kinetics::KineticModel;
use crate::network::{Crn, Reaction};
use crate::rational::{self, Rational};
use crate::stoich::StoichMatrix;

/// Data that determines the lifted network and its ε-family of kinetics.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftSpec {
    /// Dependency coefficients; the new row of Γ′ is cᵗΓ.
    pub c: Vec<Rational>,
    /// Exponent of the new species in each reaction rate.
    pub alpha: Vec<f64>,
    /// Coefficient of the new species in each reactant complex.
    pub reactant_coeffs: Vec<Rational>,
}

/// Optional overrides for [`lift_species_with`].
#[derive(Debug, Clone, Default)]
pub struct LiftOptions {
    /// Defaults to the minimal realisation r_j = max(0, −(cᵗΓ)_j).
    pub reactant_coeffs: Option<Vec<Rational>>,
    /// Defaults to the reactant coefficients (mass action).
    pub alpha: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct LiftedFamily {
    base: KineticModel,
    spec: LiftSpec,
    lifted_net: Crn,
    new_row: Vec<Rational>,
    c: Vec<f64>,
}

/// Lifts with mass-action exponents for the new species (α = r).
pub fn lift_species(
    model: &KineticModel,
    c: &[Rational],
    name: &str,
    reactant_coeffs: Option<Vec<Rational>>,
) -> Result<LiftedFamily> {
    lift_species_with(
        model,
        c,
        name,
        LiftOptions {
            reactant_coeffs,
            alpha: None,
        },
    )
}

pub fn lift_species_with(
    model: &KineticModel,
    c: &[Rational],
    name: &str,
    options: LiftOptions,
) -> Result<LiftedFamily> {
    let net = model.net();
    let (n, m) = (net.num_species(), net.num_reactions());
    if c.len() != n {
        return Err(Error::InvalidLift(format!(
            "c has {} entries for {n} species",
            c.len()
        )));
    }
    if net.species_index(name).is_some() {
        return Err(Error::InvalidLift(format!(
            "species `{name}` already exists"
        )));
    }
    let gamma = StoichMatrix::of(net);
    let new_row = gamma.left_multiply(c);
    let r = match options.reactant_coeffs {
        Some(r) => r,
        None => new_row
            .iter()
            .map(|d| rational::max_zero(&-d.clone()))
            .collect(),
    };
    if r.len() != m {
        return Err(Error::InvalidLift(format!(
            "r has {} entries for {m} reactions",
            r.len()
        )));
    }
    for (j, (rj, dj)) in r.iter().zip(&new_row).enumerate() {
        if rj.is_negative() {
            return Err(Error::InvalidLift(format!(
                "reactant coefficient r[{j}] is negative"
            )));
        }
        if (rj + dj).is_negative() {
            return Err(Error::InvalidLift(format!(
                "product coefficient r[{j}] + (cᵗΓ)[{j}] = {} is negative",
                rational::format_rational(&(rj + dj))
            )));
        }
    }
    let alpha = match options.alpha {
        Some(a) if a.len() != m => {
            return Err(Error::InvalidLift(format!(
                "alpha has {} entries for {m} reactions",
                a.len()
            )))
        }
        Some(a) => a,
        None => r.iter().map(rational::to_f64).collect(),
    };

    let mut species = net.species().to_vec();
    species.push(name.to_string());
    let reactions = net
        .reactions()
        .iter()
        .zip(r.iter().zip(&new_row))
        .map(|(reaction, (rj, dj))| {
            let mut reactant = reaction.reactant.clone();
            let mut product = reaction.product.clone();
            reactant.add(n, rj);
            product.add(n, &(rj + dj));
            Reaction { reactant, product }
        })
        .collect();
    let lifted_net = Crn::new(species, reactions)?;

    let lifted_gamma = StoichMatrix::of(&lifted_net);
    if lifted_gamma.row(n) != new_row {
        return Err(Error::InvalidLift("new row of Γ′ differs from cᵗΓ".into()));
    }
    if lifted_gamma.rank() != gamma.rank() {
        return Err(Error::InvalidLift(
            "lifting changed the network rank".into(),
        ));
    }

    let c_f64 = c.iter().map(rational::to_f64).collect();
    Ok(LiftedFamily {
        base: model.clone(),
        spec: LiftSpec {
            c: c.to_vec(),
            alpha,
            reactant_coeffs: r,
        },
        lifted_net,
        new_row,
        c: c_f64,
    })
}

/// κ′_j = ε^{α_j} κ_j
pub fn scaled_rate_constants(kappa: &[f64], alpha: &[f64], eps: f64) -> Vec<f64> {
    assert_eq!(kappa.len(), alpha.len());
    kappa
        .iter()
        .zip(alpha)
        .map(|(k, &a)| if a == 0.0 { *k } else { k * eps.powf(a) })
        .collect()
}

/// Level 1/ε of the conservation law −cᵗx + y on which the lifted dynamics
/// track the original ones.
pub fn selected_class_level(eps: f64) -> f64 {
    1.0 / eps
}

/// ε₁ = 1 / sup_{x ∈ box} |cᵗx|, or 1 when c = 0. The box is given as
/// per-coordinate `(lo, hi)` bounds.
pub fn epsilon_bound(c: &[f64], bounds: &[(f64, f64)]) -> Result<f64> {
    if c.len() != bounds.len() {
        return Err(Error::Dimension(format!(
            "c has {} entries, box {}",
            c.len(),
            bounds.len()
        )));
    }
    if let Some((lo, hi)) = bounds
        .iter()
        .find(|(lo, hi)| !(*lo > 0.0 && lo <= hi && hi.is_finite()))
    {
        return Err(Error::InvalidArgument(format!(
            "degenerate box side [{lo}, {hi}]"
        )));
    }
    if c.iter().all(|&ci| ci == 0.0) {
        return Ok(1.0);
    }
    // a linear functional attains its extremes at vertices, coordinatewise
    let (min, max) = c
        .iter()
        .zip(bounds)
        .fold((0.0, 0.0), |(mn, mx), (&ci, &(lo, hi))| {
            let (a, b) = (ci * lo, ci * hi);
            (mn + a.min(b), mx + a.max(b))
        });
    let sup = f64::max(min.abs(), max.abs());
    Ok(if sup == 0.0 { f64::INFINITY } else { 1.0 / sup })
}

impl LiftedFamily {
    pub fn base(&self) -> &KineticModel {
        &self.base
    }

    pub fn spec(&self) -> &LiftSpec {
        &self.spec
    }

    pub fn lifted_net(&self) -> &Crn {
        &self.lifted_net
    }

    /// cᵗΓ, the net change of the new species in each reaction.
    pub fn new_species_row(&self) -> &[Rational] {
        &self.new_row
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// (−c, 1): conserved by the lifted network.
    pub fn new_conservation_law(&self) -> Vec<Rational> {
        let mut w: Vec<Rational> = self.spec.c.iter().map(|ci| -ci.clone()).collect();
        w.push(Rational::one());
        w
    }

    pub fn scaled_rate_constants(&self, eps: f64) -> Vec<f64> {
        scaled_rate_constants(self.base.kappa(), &self.spec.alpha, eps)
    }

    /// The concrete lifted kinetic model at one value of ε.
    pub fn lifted_model(&self, eps: f64) -> Result<KineticModel> {
        if !(eps > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "ε must be positive, got {eps}"
            )));
        }
        let exponents = self.base.exponents().with_column(&self.spec.alpha);
        KineticModel::power_law(
            self.lifted_net.clone(),
            exponents,
            self.scaled_rate_constants(eps),
        )
    }

    pub fn c_dot(&self, x: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// x ↦ (x, 1/ε + cᵗx)
    pub fn embed(&self, x: &[f64], eps: f64) -> Vec<f64> {
        let mut full = x.to_vec();
        full.push(selected_class_level(eps) + self.c_dot(x));
        full
    }

    fn scale_factor(&self, x: &[f64], eps: f64) -> Result<f64> {
        let s = 1.0 + eps * self.c_dot(x);
        if !(s > 0.0) {
            return Err(Error::Domain(format!("1 + ε cᵗx = {s} is not positive")));
        }
        Ok(s)
    }

    /// Γ (v(x) ∘ (1 + ε cᵗx)^α)
    pub fn reduced_lifted_rhs(&self, x: &[f64], eps: f64) -> Result<DVector<f64>> {
        let s = self.scale_factor(x, eps)?;
        let mut w = self.base.rate_vector(x)?;
        for (wi, &a) in w.iter_mut().zip(&self.spec.alpha) {
            if a != 0.0 {
                *wi *= s.powf(a);
            }
        }
        Ok(self.base.gamma() * w)
    }

    pub fn reduced_lifted_jacobian(&self, x: &[f64], eps: f64) -> Result<DMatrix<f64>> {
        let s = self.scale_factor(x, eps)?;
        let v = self.base.rate_vector(x)?;
        let mut dw = self.base.rate_jacobian(x)?;
        for (i, &a) in self.spec.alpha.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let sa = s.powf(a);
            let ds = v[i] * a * s.powf(a - 1.0) * eps;
            for q in 0..x.len() {
                dw[(i, q)] = dw[(i, q)] * sa + ds * self.c[q];
            }
        }
        Ok(self.base.gamma() * dw)
    }

    /// The reduced lifted dynamics at fixed ε, as a vector field.
    pub fn at(&self, eps: f64) -> ReducedLifted<'_> {
        ReducedLifted { family: self, eps }
    }

    /// Exponent table of κ′(ε) for export.
    pub fn scaling_table(&self) -> Vec<KappaScaling> {
        self.base
            .kappa()
            .iter()
            .zip(&self.spec.alpha)
            .enumerate()
            .map(|(j, (&kappa, &exponent))| KappaScaling {
                reaction: j,
                equation: format!(
                    "{} -> {}",
                    self.lifted_net
                        .format_complex(&self.lifted_net.reactions()[j].reactant),
                    self.lifted_net
                        .format_complex(&self.lifted_net.reactions()[j].product)
                ),
                kappa,
                eps_exponent: exponent,
            })
            .collect()
    }

    /// Whether the lift adds only a row of zeros (c = 0 or cᵗΓ = 0).
    pub fn is_trivial(&self) -> bool {
        self.new_row.iter().all(Zero::is_zero)
    }
}

/// κ′_j = κ_j · ε^eps_exponent
#[derive(Debug, Clone, Serialize)]
pub struct KappaScaling {
    pub reaction: usize,
    pub equation: String,
    pub kappa: f64,
    pub eps_exponent: f64,
}

/// Borrowing view of a lifted family at one ε.
#[derive(Debug, Clone, Copy)]
pub struct ReducedLifted<'a> {
    family: &'a LiftedFamily,
    eps: f64,
}

impl ReducedLifted<'_> {
    pub fn eps(&self) -> f64 {
        self.eps
    }
}

impl VectorField for ReducedLifted<'_> {
    fn dim(&self) -> usize {
        self.family.base.num_species()
    }

    fn rhs(&self, x: &[f64]) -> Result<DVector<f64>> {
        self.family.reduced_lifted_rhs(x, self.eps)
    }

    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.family.reduced_lifted_jacobian(x, self.eps)
    }

    fn embed(&self, u: &[f64]) -> Vec<f64> {
        self.family.embed(u, self.eps)
    }
}
