//! Evolutionary scheduler against the baselines, over a few seeds.

use dqcopt::baselines::gp_schedule;
use dqcopt::circuit::{layerize, random_circuit};
use dqcopt::evolve::{evolve, EaParams};
use dqcopt::network::build_star;
use dqcopt::schedule::{cost, DEFAULT_LAMBDA};

fn main() -> dqcopt::Result<()> {
    let lc = layerize(&random_circuit(8, 30, 3)?);
    let net = build_star(4, 2)?;
    let gp = cost(&gp_schedule(&lc, &net, 0)?, &lc, &net, DEFAULT_LAMBDA)?;
    println!("gp: {gp}");

    for seed in 0..3 {
        let r = evolve(&lc, &net, &EaParams { generations: 2000, ..EaParams::with_seed(seed) })?;
        let moves = (0..lc.num_qubits())
            .map(|q| r.schedule.row(q).windows(2).filter(|w| w[0] != w[1]).count())
            .sum::<usize>();
        println!(
            "seed {seed}: {}  ({:+.1}% vs gp, {moves} teleports, gen0 best {})",
            r.cost,
            (gp.total - r.cost.total) / gp.total * 100.0,
            r.trace[0].best_cost
        );
    }
    Ok(())
}
