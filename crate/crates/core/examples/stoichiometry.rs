//! Exact stoichiometric data of a few small networks.

use crnlift::{parse_network, rational::format_rational, StoichMatrix};

fn main() -> crnlift::Result<()> {
    let networks = [
        ("Schlögl", "0 <-> X\n2 X <-> 3 X"),
        ("Brusselator", "0 <-> X\nX -> Y\n2 X + Y -> 3 X"),
        ("homogenised Brusselator", "Z <-> X\nX -> Y\n2 X + Y -> 3 X"),
        ("lifted Lotka", "X + Z -> 2 X\nX + Y -> 2 Y\nY -> Z"),
    ];
    for (name, text) in networks {
        let net = parse_network(text)?;
        let gamma = StoichMatrix::of(&net);
        println!("{name}: species {:?}", net.species());
        for i in 0..gamma.nrows() {
            let row: Vec<String> = gamma.row(i).iter().map(format_rational).collect();
            println!("  Γ[{}] = ({})", net.species()[i], row.join(", "));
        }
        let laws: Vec<String> = gamma
            .left_kernel()
            .iter()
            .map(|w| {
                format!(
                    "({})",
                    w.iter().map(format_rational).collect::<Vec<_>>().join(", ")
                )
            })
            .collect();
        println!(
            "  rank {}, conservation laws [{}], homogeneous {}",
            gamma.rank(),
            laws.join(", "),
            net.is_homogeneous()
        );
    }
    Ok(())
}
