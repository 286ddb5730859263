//! Statevector simulation: a Bell pair from the native gate set and the
//! fidelity of a few candidate circuits against it.

use std::f64::consts::FRAC_PI_2;

use dqcopt::circuit::{Circuit, Gate};
use dqcopt::statevector::{fidelity, run};

fn main() -> dqcopt::Result<()> {
    // RZ(pi/2) SX RZ(pi/2) is a Hadamard up to global phase
    let bell = Circuit::from_gates(
        2,
        vec![Gate::RZ(0, FRAC_PI_2), Gate::SX(0), Gate::RZ(0, FRAC_PI_2), Gate::CX(0, 1)],
    )?;
    let target = run(&bell)?;
    print!("{}", target.to_csv());

    let candidates = [
        ("itself", bell.clone()),
        ("no cx", Circuit::from_gates(2, bell.gates()[..3].to_vec())?),
        ("extra rz", {
            let mut c = bell.clone();
            c.push(Gate::RZ(1, 0.1))?;
            c
        }),
        ("empty", Circuit::new(2)),
    ];
    for (name, c) in &candidates {
        println!("{name:<9} F = {:.6}", fidelity(&target, c)?);
    }
    Ok(())
}
