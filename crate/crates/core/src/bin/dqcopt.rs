use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dqcopt::anneal::{self, SaParams};
use dqcopt::baselines::{gp_schedule, random_sequential_schedule, sequential_schedule};
use dqcopt::bench::{self, ExperimentConfig, ReportFormat};
use dqcopt::circuit::{layerize, parse_circuit, random_circuit_with, Circuit, DEFAULT_P_CX};
use dqcopt::evolve::{self, EaParams};
use dqcopt::network::{NetworkTopology, TopologySpec, DEFAULT_CAPACITY};
use dqcopt::qco::{qco_evolve, QcoParams};
use dqcopt::schedule::{cost, Schedule, DEFAULT_LAMBDA};
use dqcopt::{Error, Result};

#[derive(Parser)]
#[command(name = "dqcopt", version, about = "Qubit scheduling and circuit optimization for distributed quantum computers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleAlg {
    Sa,
    Ea,
    Gp,
    Seq,
    Randseq,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random layered circuit
    GenCircuit {
        #[arg(long)]
        qubits: usize,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_P_CX)]
        p_cx: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Schedule a circuit onto a network
    Schedule {
        #[arg(long, value_enum)]
        alg: ScheduleAlg,
        #[arg(long)]
        circuit: PathBuf,
        /// grid:RxC, star:N, or a topology file
        #[arg(long)]
        topology: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CAPACITY)]
        capacity: usize,
        #[arg(long, default_value_t = DEFAULT_LAMBDA)]
        lambda: f64,
        /// JSON parameter block for sa or ea
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Rewrite a circuit to lower its communication cost
    Qco {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        topology: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CAPACITY)]
        capacity: usize,
        /// JSON parameter block
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run an experiment config
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Recompute the cost of a schedule
    Verify {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        topology: String,
        #[arg(long, default_value_t = DEFAULT_CAPACITY)]
        capacity: usize,
        #[arg(long, default_value_t = DEFAULT_LAMBDA)]
        lambda: f64,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn load_circuit(path: &Path) -> Result<Circuit> {
    parse_circuit(&read(path)?)
}

fn load_topology(spec: &str, capacity: usize) -> Result<NetworkTopology> {
    spec.parse::<TopologySpec>()?.build(capacity)
}

fn load_params<T: serde::de::DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    match path {
        Some(p) => serde_json::from_str(&read(p)?).map_err(|e| Error::Config(e.to_string())),
        None => Ok(T::default()),
    }
}

fn write(path: PathBuf, contents: String) -> Result<()> {
    fs::write(path, contents)?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::GenCircuit { qubits, depth, seed, p_cx, output } => {
            let c = random_circuit_with(qubits, depth, p_cx, seed)?;
            write(output, c.to_text())?;
        }
        Command::Schedule { alg, circuit, topology, seed, capacity, lambda, params, output } => {
            let c = load_circuit(&circuit)?;
            let net = load_topology(&topology, capacity)?;
            net.check_capacity(c.num_qubits())?;
            let lc = layerize(&c);
            fs::create_dir_all(&output)?;
            let (schedule, trace): (Schedule, Option<String>) = match alg {
                ScheduleAlg::Sa => {
                    let p = SaParams { seed, lambda, ..load_params(params.as_deref())? };
                    let r = anneal::anneal(&lc, &net, &p)?;
                    (r.schedule, Some(anneal::trace_to_csv(&r.trace)?))
                }
                ScheduleAlg::Ea => {
                    let p = EaParams { seed, lambda, ..load_params(params.as_deref())? };
                    let r = evolve::evolve(&lc, &net, &p)?;
                    (r.schedule, Some(evolve::trace_to_csv(&r.trace)?))
                }
                ScheduleAlg::Gp => (gp_schedule(&lc, &net, seed)?, None),
                ScheduleAlg::Seq => (sequential_schedule(&lc, &net)?, None),
                ScheduleAlg::Randseq => (random_sequential_schedule(&lc, &net, seed)?, None),
            };
            let b = cost(&schedule, &lc, &net, lambda)?;
            write(output.join("schedule.csv"), schedule.to_csv()?)?;
            write(output.join("cost.json"), serde_json::to_string_pretty(&b)?)?;
            if let Some(t) = trace {
                write(output.join("trace.csv"), t)?;
            }
            println!("{}", serde_json::to_string(&b)?);
        }
        Command::Qco { circuit, topology, seed, capacity, params, output } => {
            let c = load_circuit(&circuit)?;
            let net = load_topology(&topology, capacity)?;
            net.check_capacity(c.num_qubits())?;
            let p = QcoParams { seed, ..load_params(params.as_deref())? };
            let r = qco_evolve(&c, &net, &p)?;
            fs::create_dir_all(&output)?;
            write(output.join("report.json"), serde_json::to_string_pretty(&r.report)?)?;
            write(output.join("optimized.circuit"), r.circuit.to_text())?;
            write(output.join("schedule.csv"), r.schedule.to_csv()?)?;
            println!("{}", serde_json::to_string(&r.report)?);
        }
        Command::Bench { config, format, output } => {
            let cfg = ExperimentConfig::from_path(&config)?;
            let out = bench::run_experiment(&cfg)?;
            let format = match format {
                Format::Csv => ReportFormat::Csv,
                Format::Json => ReportFormat::Json,
            };
            bench::report(&out, &output, format)?;
            for s in &out.skipped {
                eprintln!("skipped {} on {}: {}", s.circuit, s.topology, s.reason);
            }
            if out.records.is_empty() && !out.skipped.is_empty() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Verify { schedule, circuit, topology, capacity, lambda } => {
            let s = Schedule::from_csv(&read(&schedule)?)?;
            let c = load_circuit(&circuit)?;
            let net = load_topology(&topology, capacity)?;
            let b = cost(&s, &layerize(&c), &net, lambda)?;
            println!("{}", serde_json::to_string(&b)?);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::CapacityInfeasible { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
