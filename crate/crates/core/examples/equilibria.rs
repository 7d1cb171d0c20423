//! Positive equilibria and their stability on stoichiometric classes.

use crnlift::dynamics::{find_all_equilibria, reduce_to_class, NewtonOptions};
use crnlift::{parse_network, KineticModel};

fn report(
    title: &str,
    model: &KineticModel,
    levels: &[f64],
    search: (f64, f64),
) -> crnlift::Result<()> {
    let sys = reduce_to_class(model, levels)?;
    println!("{title}");
    for e in find_all_equilibria(&sys, &[search], 30, &NewtonOptions::default())? {
        let eigs: Vec<String> = e
            .eigenvalues
            .iter()
            .map(|z| format!("{:.6}{:+.6}i", z.re, z.im))
            .collect();
        println!(
            "  {:?} {:?} eigenvalues [{}]",
            e.point,
            e.stability,
            eigs.join(", ")
        );
    }
    Ok(())
}

fn main() -> crnlift::Result<()> {
    let schlogl = KineticModel::mass_action(
        parse_network("0 <-> X\n2 X <-> 3 X")?,
        vec![6.0, 11.0, 6.0, 1.0],
    )?;
    report("Schlögl", &schlogl, &[], (0.1, 5.0))?;

    let hb = parse_network("Z <-> X\nX -> Y\n2 X + Y -> 3 X")?;
    for k4 in [4.0, 4.6, 6.0] {
        let model = KineticModel::mass_action(hb.clone(), vec![2.0, 4.0, 13.0, k4])?;
        report(
            &format!("homogenised Brusselator κ₄ = {k4}, x + y + z = 6"),
            &model,
            &[6.0],
            (0.01, 5.9),
        )?;
    }
    Ok(())
}
