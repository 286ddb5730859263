//! Parse a circuit, split it into ASAP layers, and print the CX pairs per layer.

use dqcopt::circuit::{layerize, parse_circuit};

const CIRCUIT: &str = "\
qubits 4
cx 0 1
sx 2
x 3
sx 0
cx 1 2
sx 3
x 0
sx 1
cx 2 3
cx 0 3
sx 1
sx 2
";

fn main() -> dqcopt::Result<()> {
    let c = parse_circuit(CIRCUIT)?;
    let lc = layerize(&c);
    println!("{} gates, {} CX, depth {}", c.len(), c.cx_count(), lc.depth());
    for (t, layer) in lc.layers().iter().enumerate() {
        let gates: Vec<String> = layer.iter().map(|g| g.to_string()).collect();
        println!("t{t}: {}", gates.join(", "));
    }
    println!("cx pairs: {:?}", lc.cx_pairs_per_layer());
    Ok(())
}
