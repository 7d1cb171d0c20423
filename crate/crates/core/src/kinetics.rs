//! Power-law and mass-action kinetics: ẋ = Γ(κ∘x^A) with analytic Jacobian.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::network::Crn;
use crate::parse::NetworkFile;
use crate::rational;
use crate::stoich::StoichMatrix;

/// Row `i` holds the exponents of every species in the rate of reaction `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentMatrix {
    entries: DMatrix<f64>,
    /// Set when the matrix was converted from exact reactant coefficients
    /// that are all representable without rounding.
    pub mass_action_exact: bool,
}

impl ExponentMatrix {
    pub fn new(entries: DMatrix<f64>) -> Self {
        Self {
            entries,
            mass_action_exact: false,
        }
    }

    pub fn get(&self, reaction: usize, species: usize) -> f64 {
        self.entries[(reaction, species)]
    }

    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Appends one column (exponents of an added species).
    pub fn with_column(&self, column: &[f64]) -> Self {
        let (m, n) = self.entries.shape();
        assert_eq!(column.len(), m);
        let entries = DMatrix::from_fn(m, n + 1, |i, j| {
            if j < n {
                self.entries[(i, j)]
            } else {
                column[i]
            }
        });
        Self {
            entries,
            mass_action_exact: false,
        }
    }
}

pub fn mass_action_exponents(net: &Crn) -> ExponentMatrix {
    let (m, n) = (net.num_reactions(), net.num_species());
    let mut exact = true;
    let entries = DMatrix::from_fn(m, n, |i, j| {
        let q = net.reactions()[i].reactant.coefficient(j);
        let v = rational::to_f64(&q);
        exact &= rational::Rational::from_float(v).as_ref() == Some(&q);
        v
    });
    ExponentMatrix {
        entries,
        mass_action_exact: exact,
    }
}

/// A network with a fixed exponent matrix and positive rate constants.
#[derive(Debug, Clone)]
pub struct KineticModel {
    net: Crn,
    gamma: DMatrix<f64>,
    exponents: ExponentMatrix,
    kappa: Vec<f64>,
}

fn check_kappa(kappa: &[f64], m: usize) -> Result<()> {
    if kappa.len() != m {
        return Err(Error::Dimension(format!(
            "{} rate constants for {m} reactions",
            kappa.len()
        )));
    }
    if let Some((i, k)) = kappa
        .iter()
        .enumerate()
        .find(|(_, k)| !(**k > 0.0 && k.is_finite()))
    {
        return Err(Error::InvalidArgument(format!(
            "rate constant {i} = {k} is not positive"
        )));
    }
    Ok(())
}

impl KineticModel {
    pub fn mass_action(net: Crn, kappa: Vec<f64>) -> Result<Self> {
        let exponents = mass_action_exponents(&net);
        Self::power_law(net, exponents, kappa)
    }

    pub fn power_law(net: Crn, exponents: ExponentMatrix, kappa: Vec<f64>) -> Result<Self> {
        let (m, n) = (net.num_reactions(), net.num_species());
        if exponents.nrows() != m || exponents.ncols() != n {
            return Err(Error::Dimension(format!(
                "exponent matrix is {}x{}, network needs {m}x{n}",
                exponents.nrows(),
                exponents.ncols()
            )));
        }
        check_kappa(&kappa, m)?;
        let gamma = StoichMatrix::of(&net).to_f64();
        Ok(Self {
            net,
            gamma,
            exponents,
            kappa,
        })
    }

    /// Builds a model from a parsed file. `kappa` overrides the file's rate
    /// constants; exponent overrides in the file are applied on top of
    /// mass-action exponents.
    pub fn from_file(file: &NetworkFile, kappa: Option<Vec<f64>>) -> Result<Self> {
        let kappa = match kappa {
            Some(k) => k,
            None => file.rate_constants().ok_or_else(|| {
                Error::InvalidArgument("rate constants missing from file and not supplied".into())
            })?,
        };
        let mut a = mass_action_exponents(&file.crn);
        for (i, k) in file.kinetics.iter().enumerate() {
            for &(s, v) in &k.exponents {
                a.entries[(i, s)] = v;
                a.mass_action_exact = false;
            }
        }
        Self::power_law(file.crn.clone(), a, kappa)
    }

    pub fn with_kappa(&self, kappa: Vec<f64>) -> Result<Self> {
        check_kappa(&kappa, self.net.num_reactions())?;
        Ok(Self {
            kappa,
            ..self.clone()
        })
    }

    pub fn net(&self) -> &Crn {
        &self.net
    }

    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn exponents(&self) -> &ExponentMatrix {
        &self.exponents
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn num_species(&self) -> usize {
        self.net.num_species()
    }

    pub fn num_reactions(&self) -> usize {
        self.net.num_reactions()
    }

    /// Zero concentrations are admissible only for species that never carry
    /// a negative exponent.
    pub fn check_domain(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.num_species() {
            return Err(Error::Dimension(format!(
                "state has {} entries for {} species",
                x.len(),
                self.num_species()
            )));
        }
        for (j, &xj) in x.iter().enumerate() {
            if !xj.is_finite() || xj < 0.0 {
                return Err(Error::Domain(format!("x[{j}] = {xj}")));
            }
            if xj == 0.0 && (0..self.num_reactions()).any(|i| self.exponents.get(i, j) < 0.0) {
                return Err(Error::Domain(format!(
                    "x[{j}] = 0 with a negative exponent"
                )));
            }
        }
        Ok(())
    }

    fn monomial(&self, i: usize, x: &[f64]) -> f64 {
        x.iter()
            .enumerate()
            .map(|(j, &xj)| {
                let a = self.exponents.get(i, j);
                if a == 0.0 {
                    1.0
                } else {
                    xj.powf(a)
                }
            })
            .product()
    }

    /// v_i = κ_i ∏_j x_j^{A_ij}
    pub fn rate_vector(&self, x: &[f64]) -> Result<DVector<f64>> {
        self.check_domain(x)?;
        Ok(DVector::from_fn(self.num_reactions(), |i, _| {
            self.kappa[i] * self.monomial(i, x)
        }))
    }

    pub fn ode_rhs(&self, x: &[f64]) -> Result<DVector<f64>> {
        Ok(&self.gamma * self.rate_vector(x)?)
    }

    /// ∂v_i/∂x_q, evaluated without dividing by x_q so that boundary points
    /// with nonnegative exponents stay finite.
    pub fn rate_jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_domain(x)?;
        let (m, n) = (self.num_reactions(), self.num_species());
        let mut dv = DMatrix::zeros(m, n);
        for i in 0..m {
            for q in 0..n {
                let a = self.exponents.get(i, q);
                if a == 0.0 {
                    continue;
                }
                if x[q] == 0.0 && a < 1.0 {
                    return Err(Error::Domain(format!(
                        "rate {i} is not differentiable in x[{q}] at 0 (exponent {a})"
                    )));
                }
                let rest: f64 = (0..n)
                    .filter(|&j| j != q)
                    .map(|j| {
                        let e = self.exponents.get(i, j);
                        if e == 0.0 {
                            1.0
                        } else {
                            x[j].powf(e)
                        }
                    })
                    .product();
                let own = if a == 1.0 {
                    1.0
                } else {
                    a * x[q].powf(a - 1.0)
                };
                dv[(i, q)] = self.kappa[i] * own * rest;
            }
        }
        Ok(dv)
    }

    /// (p,q) entry Σ_i Γ[p][i] ∂v_i/∂x_q.
    pub fn ode_jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        Ok(&self.gamma * self.rate_jacobian(x)?)
    }
}
