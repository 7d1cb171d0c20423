//! Limit cycles and Floquet multipliers of the Brusselator and the LVA model.

use crnlift::dynamics::{find_periodic_orbit, integrate, OdeOptions, OrbitOptions};
use crnlift::{parse_network, KineticModel};

fn orbit(title: &str, model: &KineticModel, start: &[f64], t_guess: f64) -> crnlift::Result<()> {
    let transient = integrate(model, start, 300.0, &OdeOptions::default())?;
    let rec = find_periodic_orbit(
        model,
        transient.final_state().as_slice(),
        t_guess,
        &OrbitOptions::default(),
    )?;
    println!("{title}: period {:.10}, {:?}", rec.period, rec.stability);
    println!("  anchor {:?}", rec.anchor);
    println!("  trivial multiplier {:.3e}", rec.trivial_multiplier().re);
    for mu in rec.nontrivial_multipliers() {
        println!(
            "  nontrivial multiplier {:.10} (exp ∫tr J = {:.10})",
            mu.re,
            rec.trace_integral.exp()
        );
    }
    Ok(())
}

fn main() -> crnlift::Result<()> {
    let brusselator = parse_network("0 <-> X\nX -> Y\n2 X + Y -> 3 X")?;
    orbit(
        "Brusselator κ = (1,1,3,1)",
        &KineticModel::mass_action(brusselator, vec![1.0, 1.0, 3.0, 1.0])?,
        &[2.0, 2.0],
        7.0,
    )?;
    let lva = parse_network("2 X <-> 3 X\nX + Y -> 2 Y\nY -> 0")?;
    orbit(
        "LVA κ₄ = 0.4",
        &KineticModel::mass_action(lva, vec![1.0, 1.0, 1.0, 0.4])?,
        &[0.3, 0.21],
        30.0,
    )
}
