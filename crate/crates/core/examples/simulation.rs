//! Integrates the Lotka system and monitors its first integral.

use crnlift::bifurcation::lotka_first_integral;
use crnlift::dynamics::{integrate, OdeOptions};
use crnlift::{parse_network, KineticModel};

fn main() -> crnlift::Result<()> {
    let k = [1.0, 1.0, 1.0];
    let model =
        KineticModel::mass_action(parse_network("X -> 2 X\nX + Y -> 2 Y\nY -> 0")?, k.to_vec())?;
    let tr = integrate(&model, &[2.0, 0.5], 100.0, &OdeOptions::with_tol(1e-10))?;
    let h0 = lotka_first_integral(k, 2.0, 0.5)?;
    let drift = tr
        .states
        .iter()
        .map(|s| (lotka_first_integral(k, s[0], s[1]).unwrap() / h0 - 1.0).abs())
        .fold(0.0, f64::max);
    println!(
        "{} accepted steps, {} rejected",
        tr.times.len() - 1,
        tr.rejected
    );
    println!("final state {:?}", tr.final_state().as_slice());
    println!("max relative drift of the first integral {drift:.3e}");
    let (times, states) = tr.resample(5);
    for (t, s) in times.iter().zip(&states) {
        println!("  t = {t:>6.2}  x = {:.6}  y = {:.6}", s[0], s[1]);
    }
    Ok(())
}
