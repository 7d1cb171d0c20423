//! Lifts the Schlögl model to a homogeneous two-species network and follows
//! the positive equilibria of the reduced lifted system as ε → 0.

use crnlift::dynamics::{find_all_equilibria, NewtonOptions};
use crnlift::lifting::lift_species;
use crnlift::rational::int;
use crnlift::{parse_network, serialize_network, KineticModel, NetworkFile};

fn main() -> crnlift::Result<()> {
    let net = parse_network("0 <-> X\n2 X <-> 3 X")?;
    let model = KineticModel::mass_action(net, vec![6.0, 11.0, 6.0, 1.0])?;
    // non-minimal reactant coefficients: 0 -> X becomes 2 Y -> X + Y
    let r = vec![int(2), int(1), int(1), int(0)];
    let family = lift_species(&model, &[int(-1)], "Y", Some(r))?;
    print!(
        "{}",
        serialize_network(&NetworkFile::bare(family.lifted_net().clone()))
    );
    for row in family.scaling_table() {
        println!(
            "  {:<14} κ' = {} ε^{}",
            row.equation, row.kappa, row.eps_exponent
        );
    }
    println!("{:>8} {:>24} {:>24} {:>24}", "ε", "x₁", "x₂", "x₃");
    for eps in [0.04, 0.02, 0.01, 0.005, 0.0025] {
        let eq = find_all_equilibria(
            &family.at(eps),
            &[(0.1, 5.0)],
            40,
            &NewtonOptions::default(),
        )?;
        let xs: Vec<String> = eq
            .iter()
            .map(|e| format!("{:>24.16}", e.point[0]))
            .collect();
        println!("{eps:>8} {}", xs.join(" "));
    }
    Ok(())
}
