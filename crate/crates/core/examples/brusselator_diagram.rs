//! Fold and Hopf curves of the homogenised Brusselator, its codimension-two
//! points and the sign of the first focal value, written as CSV/JSON.

use std::fs;

use crnlift::bifurcation::brusselator::sign_map_csv;
use crnlift::bifurcation::{brusselator_bifurcation_sets, focal_sign_map};

fn main() -> crnlift::Result<()> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "brusselator-out".into());
    fs::create_dir_all(&out)?;
    let d = brusselator_bifurcation_sets(2.0, 4.0, 6.0, (0.5, 20.0), 400)?;
    for (name, p) in [("Bogdanov-Takens", &d.bt), ("generalised Hopf", &d.gh)] {
        if let Some(p) = p {
            println!(
                "{name}: κ₃ = {:.12}, κ₄ = {:.12}, state {:?}",
                p.parameter("k3").unwrap(),
                p.parameter("k4").unwrap(),
                p.state
            );
        }
    }
    fs::write(format!("{out}/fig2.csv"), d.curves_csv())?;
    fs::write(format!("{out}/fig2_points.json"), d.points_json()?)?;
    let cells = focal_sign_map((0.04, 4.0), (0.25, 25.0), 100);
    let negative = cells.iter().filter(|c| c.sign_p < 0).count();
    println!(
        "{} sign-map cells inside H, {negative} with negative P",
        cells.len()
    );
    fs::write(format!("{out}/fig1.csv"), sign_map_csv(&cells))?;
    println!("wrote {out}/fig1.csv, {out}/fig2.csv, {out}/fig2_points.json");
    Ok(())
}
