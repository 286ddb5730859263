//! Rewrite a circuit so that it needs less communication while preparing
//! nearly the same state.

use dqcopt::circuit::random_circuit;
use dqcopt::network::build_grid;
use dqcopt::qco::{qco_evolve, QcoParams};
use dqcopt::statevector::{fidelity, run};

fn main() -> dqcopt::Result<()> {
    let original = random_circuit(8, 30, 600)?;
    let net = build_grid(2, 2, 2)?;
    let r = qco_evolve(&original, &net, &QcoParams::with_seed(0))?;

    println!("{}", serde_json::to_string_pretty(&r.report)?);
    println!(
        "gates {} -> {}, cx {} -> {}",
        original.len(),
        r.circuit.len(),
        original.cx_count(),
        r.circuit.cx_count()
    );
    let f = fidelity(&run(&original)?, &r.circuit)?;
    println!("re-verified fidelity {f:.6}");
    Ok(())
}
