//! Closed-form analysis of the homogenised Brusselator
//! Z ⇌ X (κ₁, κ₂), X → Y (κ₃), 2X + Y → 3X (κ₄) on the class x + y + z = c.
//!
//! Positive equilibria are parameterised by t = x:
//! (t, κ₃/(κ₄t), κ₂t/κ₁), with class level t(κ₁+κ₂)/κ₁ + κ₃/(κ₄t).

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use super::{illinois, BifurcationKind, BifurcationPoint};
use crate::dynamics::{reduce_to_class_with, ReducedSystem, VectorField};
use crate::error::{Error, Result};
use crate::kinetics::KineticModel;
use crate::network::Crn;
use crate::parse::parse_network;

pub const HOMOGENISED_BRUSSELATOR: &str = "species: X, Y, Z\nZ <-> X\nX -> Y\n2 X + Y -> 3 X\n";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BrusselatorParams {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub c: f64,
}

impl BrusselatorParams {
    pub fn new(k: [f64; 4], c: f64) -> Result<Self> {
        if k.iter().chain([&c]).any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "κ = {k:?} and c = {c} must be positive"
            )));
        }
        Ok(Self {
            k1: k[0],
            k2: k[1],
            k3: k[2],
            k4: k[3],
            c,
        })
    }

    pub fn kappa(&self) -> [f64; 4] {
        [self.k1, self.k2, self.k3, self.k4]
    }

    pub fn a(&self) -> f64 {
        self.k2 / self.k1
    }

    pub fn b(&self) -> f64 {
        self.k3 / self.k1
    }

    /// Equilibrium parameter at which the class is tangent to the
    /// equilibrium curve.
    pub fn t_star(&self) -> f64 {
        (self.k1 * self.k3 / ((self.k1 + self.k2) * self.k4)).sqrt()
    }

    /// Smallest class level carrying a positive equilibrium.
    pub fn c_star(&self) -> f64 {
        2.0 * ((self.k1 + self.k2) * self.k3 / (self.k1 * self.k4)).sqrt()
    }

    pub fn class_level(&self, t: f64) -> f64 {
        t * (self.k1 + self.k2) / self.k1 + self.k3 / (self.k4 * t)
    }

    pub fn equilibrium(&self, t: f64) -> [f64; 3] {
        [t, self.k3 / (self.k4 * t), self.k2 * t / self.k1]
    }

    /// Equilibrium parameters on the class `c`, ascending (0, 1 or 2 values).
    pub fn equilibrium_parameters(&self) -> Vec<f64> {
        // ((κ₁+κ₂)/κ₁) t² − c t + κ₃/κ₄ = 0
        let qa = (self.k1 + self.k2) / self.k1;
        let qc = self.k3 / self.k4;
        let disc = self.c * self.c - 4.0 * qa * qc;
        if disc < 0.0 {
            return Vec::new();
        }
        if disc == 0.0 {
            return vec![self.c / (2.0 * qa)];
        }
        // cancellation-free pair
        let big = (self.c + disc.sqrt()) / (2.0 * qa);
        vec![qc / (qa * big), big]
    }

    /// Jacobian in (x, y) at the equilibrium with parameter t.
    pub fn jacobian(&self, t: f64) -> DMatrix<f64> {
        let s = self.k4 * t * t;
        DMatrix::from_row_slice(
            2,
            2,
            &[self.k3 - self.k1 - self.k2, s - self.k1, -self.k3, -s],
        )
    }

    pub fn det(&self, t: f64) -> f64 {
        (self.k1 + self.k2) * self.k4 * t * t - self.k1 * self.k3
    }

    pub fn trace(&self, t: f64) -> f64 {
        -self.k4 * t * t + (self.k3 - self.k1 - self.k2)
    }

    /// Positive factor multiplying P/Q in the first focal value.
    pub fn l1_prefactor(t: f64) -> f64 {
        1.0 / (t * t)
    }

    pub fn network() -> Crn {
        parse_network(HOMOGENISED_BRUSSELATOR).expect("fixed network parses")
    }

    pub fn model(&self) -> Result<KineticModel> {
        KineticModel::mass_action(Self::network(), self.kappa().to_vec())
    }

    /// Planar system in (x, y) with z = c − x − y.
    pub fn reduced(&self) -> Result<ReducedSystem> {
        reduce_to_class_with(&self.model()?, &[self.c], &[0, 1])
    }

    /// The Hopf set at fixed κ₁, κ₂, c: for κ₃ above κ₁ + κ₂, the (t, κ₄)
    /// with zero trace on the class. Positive det additionally needs
    /// κ₂κ₃ > (κ₁+κ₂)².
    pub fn hopf_k4(k1: f64, k2: f64, c: f64, k3: f64) -> Option<(f64, f64)> {
        let excess = k3 - k1 - k2;
        if !(excess > 0.0) {
            return None;
        }
        let t = c / ((k1 + k2) / k1 + k3 / excess);
        Some((t, excess / (t * t)))
    }

    /// The fold set at fixed κ₁, κ₂, c: c = c*.
    pub fn fold_k4(k1: f64, k2: f64, c: f64, k3: f64) -> f64 {
        4.0 * (k1 + k2) * k3 / (k1 * c * c)
    }
}

/// P(a, b); its sign is the sign of the first focal value along H.
pub fn brusselator_p(a: f64, b: f64) -> f64 {
    b.powi(3) * (2.0 - a) - b * b * (5.0 + 3.0 * a - a * a)
        + b * (5.0 + 12.0 * a + 8.0 * a * a + a.powi(3))
        - (4.0 + 13.0 * a + 15.0 * a * a + 7.0 * a.powi(3) + a.powi(4))
}

/// P(a,b)/Q(a,b) with Q = (ab − (1+a)²)^{3/2}(b − a − 2). Multiply by 1/t²
/// for the focal value.
pub fn brusselator_l1_closed_form(a: f64, b: f64) -> Result<f64> {
    let gap = a * b - (1.0 + a) * (1.0 + a);
    if !(a > 0.0 && b > 0.0 && gap > 0.0 && b > a + 2.0) {
        return Err(Error::Domain(format!(
            "(a, b) = ({a}, {b}) is off the Hopf set: need ab > (1+a)²"
        )));
    }
    Ok(brusselator_p(a, b) / (gap.powf(1.5) * (b - a - 2.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignCell {
    pub a: f64,
    pub b: f64,
    pub sign_p: i8,
    pub on_h_boundary: bool,
}

/// Sign of P over an (a, b) grid, restricted to ab > (1+a)². A cell is on
/// the boundary when its lower-b neighbour is outside that region.
pub fn focal_sign_map(a_range: (f64, f64), b_range: (f64, f64), n: usize) -> Vec<SignCell> {
    let n = n.max(2);
    let at = |(lo, hi): (f64, f64), i: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;
    let inside = |a: f64, b: f64| a * b > (1.0 + a) * (1.0 + a);
    (0..n * n)
        .into_par_iter()
        .filter_map(|idx| {
            let (i, j) = (idx / n, idx % n);
            let (a, b) = (at(a_range, i), at(b_range, j));
            if !inside(a, b) {
                return None;
            }
            let p = brusselator_p(a, b);
            let sign_p = if p > 0.0 {
                1
            } else if p < 0.0 {
                -1
            } else {
                0
            };
            let on_h_boundary = j == 0 || !inside(a, at(b_range, j - 1));
            Some(SignCell {
                a,
                b,
                sign_p,
                on_h_boundary,
            })
        })
        .collect()
}

pub fn sign_map_csv(cells: &[SignCell]) -> String {
    let mut out = String::from("a,b,sign_P,on_H_boundary\n");
    for c in cells {
        out.push_str(&format!(
            "{:?},{:?},{},{}\n",
            c.a, c.b, c.sign_p, c.on_h_boundary as u8
        ));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct BrusselatorDiagram {
    pub k1: f64,
    pub k2: f64,
    pub c: f64,
    /// (κ₃, κ₄) samples of the fold curve.
    pub t_curve: Vec<[f64; 2]>,
    /// (κ₃, κ₄) samples of the Hopf curve (det > 0 part only).
    pub h_curve: Vec<[f64; 2]>,
    pub bt: Option<BifurcationPoint>,
    pub gh: Option<BifurcationPoint>,
    pub notes: Vec<String>,
}

impl BrusselatorDiagram {
    /// Columns k3, k4, curve_id.
    pub fn curves_csv(&self) -> String {
        let mut out = String::from("k3,k4,curve_id\n");
        for (id, curve) in [("T", &self.t_curve), ("H", &self.h_curve)] {
            for [k3, k4] in curve {
                out.push_str(&format!("{k3:?},{k4:?},{id}\n"));
            }
        }
        out
    }

    pub fn points_json(&self) -> Result<String> {
        let coords = |p: &Option<BifurcationPoint>| {
            p.as_ref().map(|p| {
                serde_json::json!({
                    "k3": p.parameters["k3"],
                    "k4": p.parameters["k4"],
                    "t": p.parameters["t"],
                    "state": p.state,
                    "diagnostics": p.diagnostics,
                })
            })
        };
        Ok(serde_json::to_string_pretty(&serde_json::json!({
            "k1": self.k1,
            "k2": self.k2,
            "c": self.c,
            "BT": coords(&self.bt),
            "GH": coords(&self.gh),
            "notes": self.notes,
        }))?)
    }
}

fn codim2_point(
    kind: BifurcationKind,
    p: &BrusselatorParams,
    t: f64,
    extra: &[(&str, f64)],
) -> BifurcationPoint {
    let parameters = BTreeMap::from([
        ("k1".to_string(), p.k1),
        ("k2".to_string(), p.k2),
        ("k3".to_string(), p.k3),
        ("k4".to_string(), p.k4),
        ("c".to_string(), p.c),
        ("t".to_string(), t),
    ]);
    let mut diagnostics = BTreeMap::from([
        ("det".to_string(), p.det(t)),
        ("trace".to_string(), p.trace(t)),
        ("class_residual".to_string(), p.class_level(t) - p.c),
    ]);
    for (k, v) in extra {
        diagnostics.insert(k.to_string(), *v);
    }
    BifurcationPoint {
        kind,
        parameters,
        state: p.equilibrium(t).to_vec(),
        diagnostics,
    }
}

/// Fold and Hopf curves in the (κ₃, κ₄) plane at fixed κ₁, κ₂, c, together
/// with the Bogdanov–Takens point and the first zero of P along H.
pub fn brusselator_bifurcation_sets(
    k1: f64,
    k2: f64,
    c: f64,
    k3_range: (f64, f64),
    samples: usize,
) -> Result<BrusselatorDiagram> {
    BrusselatorParams::new([k1, k2, 1.0, 1.0], c)?;
    let (lo, hi) = k3_range;
    if !(lo < hi) || !(hi > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "invalid κ₃ range [{lo}, {hi}]"
        )));
    }
    let n = samples.max(2);
    let grid: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    let k3_bt = (k1 + k2) * (k1 + k2) / k2;
    let t_curve = grid
        .iter()
        .filter(|&&k3| k3 > 0.0)
        .map(|&k3| [k3, BrusselatorParams::fold_k4(k1, k2, c, k3)])
        .collect();
    let h_curve = grid
        .iter()
        .filter(|&&k3| k3 >= k3_bt)
        .filter_map(|&k3| BrusselatorParams::hopf_k4(k1, k2, c, k3).map(|(_, k4)| [k3, k4]))
        .collect();

    let mut notes = Vec::new();
    let bt = match BrusselatorParams::hopf_k4(k1, k2, c, k3_bt) {
        Some((t, k4)) if (lo..=hi).contains(&k3_bt) => {
            let p = BrusselatorParams::new([k1, k2, k3_bt, k4], c)?;
            Some(codim2_point(BifurcationKind::BogdanovTakens, &p, t, &[]))
        }
        _ => {
            notes.push(format!(
                "Bogdanov-Takens point κ₃ = {k3_bt} outside the κ₃ range"
            ));
            None
        }
    };

    // first zero of P(a, ·) along H beyond the BT point
    let a = k2 / k1;
    let (b_lo, b_hi) = (k3_bt.max(lo) / k1, hi / k1);
    let mut gh = None;
    if b_lo < b_hi {
        let m = 4000;
        let bs: Vec<f64> = (0..=m)
            .map(|i| b_lo + (b_hi - b_lo) * i as f64 / m as f64)
            .collect();
        for w in bs.windows(2) {
            let (pa, pb) = (brusselator_p(a, w[0]), brusselator_p(a, w[1]));
            if pa == 0.0 && w[0] == b_lo {
                continue;
            }
            if pa.signum() != pb.signum() || pb == 0.0 {
                let b = illinois(
                    |b| Ok(brusselator_p(a, b)),
                    (w[0], pa),
                    (w[1], pb),
                    1e-15 * w[1],
                    0.0,
                )?;
                let k3 = b * k1;
                if let Some((t, k4)) = BrusselatorParams::hopf_k4(k1, k2, c, k3) {
                    let p = BrusselatorParams::new([k1, k2, k3, k4], c)?;
                    gh = Some(codim2_point(
                        BifurcationKind::Bautin,
                        &p,
                        t,
                        &[("P", brusselator_p(a, b))],
                    ));
                    break;
                }
            }
        }
    }
    if gh.is_none() {
        notes.push("no zero of the first focal value on H in the κ₃ range".to_string());
    }
    Ok(BrusselatorDiagram {
        k1,
        k2,
        c,
        t_curve,
        h_curve,
        bt,
        gh,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCheck {
    /// Jacobian at the corner (x, y) = (0, c), from the kinetic model.
    pub jacobian: [[f64; 2]; 2],
    /// Ascending.
    pub eigenvalues: [f64; 2],
    /// (κ₁+κ₂−κ₃)² + 4κ₂κ₃.
    pub discriminant: f64,
    pub stable: bool,
}

/// Linearisation at the boundary equilibrium x = z = 0, y = c.
pub fn boundary_equilibrium_check(k: [f64; 4], c: f64) -> Result<BoundaryCheck> {
    let p = BrusselatorParams::new(k, c)?;
    let sys = p.reduced()?;
    let j = sys.jacobian(&[0.0, c])?;
    let closed = [[-k[0] - k[1] - k[2], -k[0]], [k[2], 0.0]];
    let scale = k.iter().fold(1.0_f64, |m, v| m.max(*v));
    for (r, row) in closed.iter().enumerate() {
        for (col, v) in row.iter().enumerate() {
            if (j[(r, col)] - v).abs() > 1e-12 * scale {
                return Err(Error::InvalidNetwork(format!(
                    "corner Jacobian {j} differs from its closed form {closed:?}"
                )));
            }
        }
    }
    let (tr, det) = (j.trace(), j.determinant());
    let discriminant = (k[0] + k[1] - k[2]).powi(2) + 4.0 * k[1] * k[2];
    let root = (tr * tr - 4.0 * det).max(0.0).sqrt();
    // tr < 0: the larger-magnitude root first, then det/λ
    let big = (tr - root) / 2.0;
    let small = if big != 0.0 { det / big } else { 0.0 };
    let eigenvalues = [big.min(small), big.max(small)];
    Ok(BoundaryCheck {
        jacobian: [[j[(0, 0)], j[(0, 1)]], [j[(1, 0)], j[(1, 1)]]],
        eigenvalues,
        discriminant,
        stable: discriminant > 0.0 && eigenvalues.iter().all(|&l| l < 0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p_exact(a: i64, b: i64) -> i64 {
        b.pow(3) * (2 - a) - b * b * (5 + 3 * a - a * a) + b * (5 + 12 * a + 8 * a * a + a.pow(3))
            - (4 + 13 * a + 15 * a * a + 7 * a.pow(3) + a.pow(4))
    }

    #[test]
    fn p_values() {
        assert_eq!(p_exact(2, 6), 0);
        assert_eq!(p_exact(1, 9), 356);
        assert_eq!(p_exact(2, 7), -22);
        assert_eq!(brusselator_p(2.0, 6.0), 0.0);
        assert!(brusselator_l1_closed_form(1.0, 9.0).unwrap() > 0.0);
        assert!(brusselator_l1_closed_form(2.0, 7.0).unwrap() < 0.0);
        assert!(matches!(
            brusselator_l1_closed_form(2.0, 4.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn equilibria_and_thresholds() {
        let p = BrusselatorParams::new([2.0, 4.0, 9.0, 3.0], 6.0).unwrap();
        assert!((p.t_star() - 1.0).abs() < 1e-15);
        assert!((p.c_star() - 6.0).abs() < 1e-14);
        let q = BrusselatorParams::new([1.2, 0.7, 2.5, 0.9], 8.0).unwrap();
        let ts = q.equilibrium_parameters();
        assert_eq!(ts.len(), 2);
        for t in ts {
            assert!((q.class_level(t) - 8.0).abs() < 1e-12);
            let e = q.equilibrium(t);
            let f = q.model().unwrap().ode_rhs(&e).unwrap();
            assert!(f.amax() < 1e-12);
            let j = q.reduced().unwrap().jacobian(&e[..2]).unwrap();
            assert!((j - q.jacobian(t)).amax() < 1e-12);
        }
        let below = BrusselatorParams::new([1.2, 0.7, 2.5, 0.9], 0.5 * q.c_star()).unwrap();
        assert!(below.equilibrium_parameters().is_empty());
    }

    #[test]
    fn diagram_points() {
        let d = brusselator_bifurcation_sets(2.0, 4.0, 6.0, (0.5, 20.0), 200).unwrap();
        let bt = d.bt.as_ref().unwrap();
        assert!(
            (bt.parameters["k3"] - 9.0).abs() < 1e-12 && (bt.parameters["k4"] - 3.0).abs() < 1e-12
        );
        assert!((bt.parameters["t"] - 1.0).abs() < 1e-12);
        let gh = d.gh.as_ref().unwrap();
        assert!((gh.parameters["k3"] - 12.0).abs() < 1e-10);
        assert!((gh.parameters["k4"] - 25.0 / 6.0).abs() < 1e-9);
        assert!((gh.parameters["t"] - 1.2).abs() < 1e-10);
        for [k3, k4] in &d.t_curve {
            assert!((k3 - 3.0 * k4).abs() < 1e-12 * k3);
        }
        assert!(d.curves_csv().starts_with("k3,k4,curve_id\n"));
        assert!(d.points_json().unwrap().contains("\"GH\""));
    }

    #[test]
    fn corner_is_a_stable_node() {
        let b = boundary_equilibrium_check([1.0; 4], 1.0).unwrap();
        let s5 = 5f64.sqrt();
        assert!((b.eigenvalues[0] - (-3.0 - s5) / 2.0).abs() < 1e-14);
        assert!((b.eigenvalues[1] - (-3.0 + s5) / 2.0).abs() < 1e-14);
        assert!(b.stable);
        let other = boundary_equilibrium_check([1.0, 1.0, 1.0, 7.0], 3.0).unwrap();
        assert_eq!(other.eigenvalues, b.eigenvalues);
    }

    #[test]
    fn sign_map_cells() {
        let cells = focal_sign_map((0.1, 4.0), (0.1, 20.0), 60);
        assert!(cells.iter().all(|c| c.a * c.b > (1.0 + c.a).powi(2)));
        assert!(cells.iter().any(|c| c.sign_p > 0) && cells.iter().any(|c| c.sign_p < 0));
        assert!(cells.iter().any(|c| c.on_h_boundary));
        assert!(sign_map_csv(&cells).starts_with("a,b,sign_P,on_H_boundary\n"));
    }
}
