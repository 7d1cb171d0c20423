//! Fold and Hopf detection along parameter paths, first focal values of planar
//! systems, and the closed-form analysis of the homogenised Brusselator.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

pub mod brusselator;
mod continuation;
mod focal;

pub use brusselator::{
    boundary_equilibrium_check, brusselator_bifurcation_sets, brusselator_l1_closed_form,
    brusselator_p, focal_sign_map, BoundaryCheck, BrusselatorDiagram, BrusselatorParams, SignCell,
};
pub use continuation::{fold_scan, hopf_scan, ParameterPath, ScanOptions};
pub use focal::focal_value_l1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BifurcationKind {
    Fold,
    Hopf,
    Bautin,
    BogdanovTakens,
}

#[derive(Debug, Clone, Serialize)]
pub struct BifurcationPoint {
    pub kind: BifurcationKind,
    pub parameters: BTreeMap<String, f64>,
    /// Full species coordinates.
    pub state: Vec<f64>,
    /// det, trace and, for Hopf points, L1 and ω.
    pub diagnostics: BTreeMap<String, f64>,
}

impl BifurcationPoint {
    pub fn parameter(&self, name: &str) -> Option<f64> {
        self.parameters.get(name).copied()
    }

    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.get(name).copied()
    }
}

/// x^{−κ₃} y^{−κ₁} e^{κ₂(x+y)}, conserved by the Lotka network
/// X → 2X, X + Y → 2Y, Y → 0.
pub fn lotka_first_integral(k: [f64; 3], x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::Domain(format!(
            "first integral needs x, y > 0, got ({x}, {y})"
        )));
    }
    Ok((-k[2] * x.ln() - k[0] * y.ln() + k[1] * (x + y)).exp())
}

/// Illinois false position on a sign change of `g` over [a, b].
pub(crate) fn illinois(
    mut g: impl FnMut(f64) -> Result<f64>,
    (mut a, mut ga): (f64, f64),
    (mut b, mut gb): (f64, f64),
    x_tol: f64,
    g_tol: f64,
) -> Result<f64> {
    if ga == 0.0 {
        return Ok(a);
    }
    if gb == 0.0 {
        return Ok(b);
    }
    if ga.signum() == gb.signum() {
        return Err(Error::InvalidArgument(format!(
            "no sign change on [{a}, {b}]"
        )));
    }
    let mut side = 0;
    for _ in 0..300 {
        let mut x = (a * gb - b * ga) / (gb - ga);
        if !(x > a.min(b) && x < a.max(b)) {
            x = 0.5 * (a + b);
        }
        let gx = g(x)?;
        if gx.abs() <= g_tol || (b - a).abs() <= x_tol {
            return Ok(x);
        }
        if gx.signum() == ga.signum() {
            a = x;
            ga = gx;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            gb = gx;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        }
    }
    Ok(0.5 * (a + b))
}
