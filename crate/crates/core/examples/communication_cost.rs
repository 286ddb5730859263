//! Cost of a dynamic and a static schedule, and the exhaustive optimum.

use dqcopt::circuit::{layerize, Circuit, Gate};
use dqcopt::network::build_grid;
use dqcopt::schedule::{brute_force_optimum, cost, Schedule, DEFAULT_LAMBDA};

fn main() -> dqcopt::Result<()> {
    let c = Circuit::from_gates(
        4,
        vec![
            Gate::CX(0, 1),
            Gate::SX(2),
            Gate::X(3),
            Gate::SX(0),
            Gate::CX(1, 2),
            Gate::SX(3),
            Gate::X(0),
            Gate::SX(1),
            Gate::CX(2, 3),
            Gate::CX(0, 3),
            Gate::SX(1),
            Gate::SX(2),
        ],
    )?;
    let lc = layerize(&c);
    // two QPUs joined by one link, two qubits each
    let net = build_grid(1, 2, 2)?;

    let moving = Schedule::from_rows(vec![
        vec![0, 0, 0, 0],
        vec![0, 1, 0, 1],
        vec![1, 1, 1, 1],
        vec![1, 0, 1, 0],
    ])?;
    println!("moving schedule: {}", cost(&moving, &lc, &net, DEFAULT_LAMBDA)?);

    let fixed = Schedule::constant(&[0, 0, 1, 1], lc.depth());
    println!("static split:    {}", cost(&fixed, &lc, &net, DEFAULT_LAMBDA)?);

    let crowded = Schedule::constant(&[0, 0, 0, 1], lc.depth());
    println!("over capacity:   {}", cost(&crowded, &lc, &net, DEFAULT_LAMBDA)?);

    let (best, b) = brute_force_optimum(&lc, &net, DEFAULT_LAMBDA)?;
    println!("optimum:         {b}");
    print!("{}", best.to_csv()?);
    Ok(())
}
