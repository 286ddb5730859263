//! Static baselines: graph partitioning, sequential fill, and shuffled fill.

use dqcopt::baselines::{
    gp_schedule, gp_schedule_with, interaction_graph, partition, random_sequential_schedule,
    sequential_schedule, GpOptions,
};
use dqcopt::circuit::{layerize, random_circuit};
use dqcopt::network::build_grid;
use dqcopt::schedule::{cost, DEFAULT_LAMBDA};

fn main() -> dqcopt::Result<()> {
    let c = random_circuit(8, 20, 5)?;
    let lc = layerize(&c);
    let net = build_grid(2, 2, 2)?;

    let g = interaction_graph(&c);
    let parts = partition(&g, 4, net.capacities(), 0)?;
    println!("parts {parts:?}, cut {} of {}", g.cut_weight(&parts), g.total_weight());

    let runs = [
        ("gp", gp_schedule(&lc, &net, 0)?),
        ("gp remapped", gp_schedule_with(&lc, &net, 0, GpOptions { remap: true })?),
        ("seq", sequential_schedule(&lc, &net)?),
        ("randseq", random_sequential_schedule(&lc, &net, 0)?),
    ];
    for (name, s) in &runs {
        println!("{name:<12} {}", cost(s, &lc, &net, DEFAULT_LAMBDA)?);
    }
    Ok(())
}
