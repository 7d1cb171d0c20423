//! Follows the Schlögl equilibrium branch in κ₁ around its folds.

use crnlift::bifurcation::{fold_scan, ParameterPath, ScanOptions};
use crnlift::{parse_network, KineticModel};

fn main() -> crnlift::Result<()> {
    let model = KineticModel::mass_action(
        parse_network("0 <-> X\n2 X <-> 3 X")?,
        vec![6.0, 11.0, 6.0, 1.0],
    )?;
    let family = |k1: f64| model.with_kappa(vec![k1, 11.0, 6.0, 1.0]);
    for (start, end, seed) in [(6.0, 7.0, 1.0), (6.0, 5.0, 3.0)] {
        let path = ParameterPath::new("k1", start, end, 50);
        for p in fold_scan(&family, &path, &[seed], &ScanOptions::default())? {
            println!(
                "fold at κ₁ = {:.12}, x = {:.12}",
                p.parameter("k1").unwrap(),
                p.state[0]
            );
        }
    }
    Ok(())
}
