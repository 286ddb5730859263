//! Run the quick experiment config and print the summary table.

use std::path::Path;

use dqcopt::bench::{report, run_experiment, summarize, ExperimentConfig, ReportFormat};

fn main() -> dqcopt::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/quick.json");
    let cfg = ExperimentConfig::from_path(&path)?;
    let out = run_experiment(&cfg)?;

    println!("{:<14} {:<8} {:<8} {:>8} {:>8} {:>8} {:>8}", "circuit", "topology", "alg", "mean", "min", "max", "vs gp");
    for row in summarize(&out).rows {
        println!(
            "{:<14} {:<8} {:<8} {:>8.1} {:>8.1} {:>8.1} {:>7.1}%",
            row.circuit,
            row.topology,
            row.algorithm,
            row.mean_total,
            row.min_total,
            row.max_total,
            row.improvement_vs_gp.unwrap_or(f64::NAN)
        );
    }

    let dir = std::env::temp_dir().join("dqcopt-benchmark");
    let written = report(&out, &dir, ReportFormat::Json)?;
    println!("wrote {} files under {}", written.len(), dir.display());
    Ok(())
}
