//! Simulated annealing on a random 8-qubit circuit over a 2x2 grid.

use dqcopt::anneal::{anneal, SaParams};
use dqcopt::baselines::{gp_schedule, sequential_schedule};
use dqcopt::circuit::{layerize, random_circuit};
use dqcopt::network::build_grid;
use dqcopt::schedule::{cost, DEFAULT_LAMBDA};

fn main() -> dqcopt::Result<()> {
    let lc = layerize(&random_circuit(8, 30, 11)?);
    let net = build_grid(2, 2, 2)?;

    let seq = cost(&sequential_schedule(&lc, &net)?, &lc, &net, DEFAULT_LAMBDA)?;
    let gp = cost(&gp_schedule(&lc, &net, 0)?, &lc, &net, DEFAULT_LAMBDA)?;
    println!("sequential: {seq}");
    println!("gp:         {gp}");

    for (name, p) in [
        ("default", SaParams::default()),
        (
            "slow cooling",
            SaParams {
                initial_temp: 1.0,
                cooling_rate: 0.99998,
                max_iterations: 300_000,
                ..SaParams::default()
            },
        ),
    ] {
        let r = anneal(&lc, &net, &p)?;
        println!("sa {name}: {}", r.cost);
        for pt in r.trace.iter().step_by(r.trace.len() / 5 + 1) {
            println!("  iter {:>6}  current {:>6}  best {:>6}", pt.iteration, pt.current_cost, pt.best_cost);
        }
    }
    Ok(())
}
