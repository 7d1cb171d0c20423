//! Locates the Hopf point of the LVA model along κ₄ and reports its first
//! focal value.

use crnlift::bifurcation::{hopf_scan, ParameterPath, ScanOptions};
use crnlift::{parse_network, KineticModel};

fn main() -> crnlift::Result<()> {
    let model = KineticModel::mass_action(
        parse_network("2 X <-> 3 X\nX + Y -> 2 Y\nY -> 0")?,
        vec![1.0; 4],
    )?;
    let family = |k4: f64| model.with_kappa(vec![1.0, 1.0, 1.0, k4]);
    let path = ParameterPath::new("k4", 0.3, 0.7, 40);
    for p in hopf_scan(&family, &path, &[0.3, 0.21], &ScanOptions::default())? {
        println!(
            "{:?} at κ₄ = {:.12}, state {:?}, ω = {:.6}, L1 = {:.6}",
            p.kind,
            p.parameter("k4").unwrap(),
            p.state,
            p.diagnostic("omega").unwrap(),
            p.diagnostic("l1").unwrap()
        );
    }
    Ok(())
}
