//! Experiment harness: runs every (circuit, topology, algorithm, seed) cell,
//! and emits raw per-run CSV plus a per-cell summary.
//!
//! A config is one JSON document:
//!
//! ```json
//! {
//!   "circuits": [{"qubits": 8, "depth": 30, "seed": 1}, {"file": "c.txt"}],
//!   "topologies": ["grid:2x2", "star:4"],
//!   "capacity": 2,
//!   "algorithms": ["sa", "ea", "gp", "seq", "randseq", "qco"],
//!   "seeds": [0, 1, 2, 3, 4],
//!   "sa": {"initial_temp": 50.0},
//!   "ea": {"population_size": 100},
//!   "qco": {"generations": 300}
//! }
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::anneal::{anneal, SaParams};
use crate::baselines::{gp_schedule, random_sequential_schedule, sequential_schedule};
use crate::circuit::{layerize, parse_circuit, random_circuit_with, Circuit, DEFAULT_P_CX};
use crate::error::{Error, Result};
use crate::evolve::{evolve, EaParams};
use crate::network::{NetworkTopology, TopologySpec, DEFAULT_CAPACITY};
use crate::qco::{qco_evolve, QcoParams};
use crate::schedule::{cost, CostBreakdown, Schedule, DEFAULT_LAMBDA};

pub const RAW_CSV_HEADER: &str = "circuit,topology,algorithm,seed,a,b,c,total,fidelity,wall_ms";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Sa,
    Ea,
    Gp,
    Seq,
    Randseq,
    Qco,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sa => "sa",
            Algorithm::Ea => "ea",
            Algorithm::Gp => "gp",
            Algorithm::Seq => "seq",
            Algorithm::Randseq => "randseq",
            Algorithm::Qco => "qco",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sa" => Ok(Algorithm::Sa),
            "ea" => Ok(Algorithm::Ea),
            "gp" => Ok(Algorithm::Gp),
            "seq" => Ok(Algorithm::Seq),
            "randseq" => Ok(Algorithm::Randseq),
            "qco" => Ok(Algorithm::Qco),
            _ => Err(Error::Config(format!("unknown algorithm `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CircuitSpec {
    Random {
        qubits: usize,
        depth: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        p_cx: Option<f64>,
    },
    File {
        file: String,
    },
}

impl CircuitSpec {
    pub fn id(&self) -> String {
        match self {
            CircuitSpec::Random { qubits, depth, seed, .. } => format!("q{qubits}_d{depth}_s{seed}"),
            CircuitSpec::File { file } => Path::new(file)
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| file.clone()),
        }
    }

    pub fn load(&self) -> Result<Circuit> {
        match self {
            CircuitSpec::Random { qubits, depth, seed, p_cx } => {
                random_circuit_with(*qubits, *depth, p_cx.unwrap_or(DEFAULT_P_CX), *seed)
            }
            CircuitSpec::File { file } => parse_circuit(&fs::read_to_string(file)?),
        }
    }
}

fn default_capacity() -> usize {
    DEFAULT_CAPACITY
}

fn default_seeds() -> Vec<u64> {
    vec![0, 1, 2, 3, 4]
}

fn default_lambda() -> f64 {
    DEFAULT_LAMBDA
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub circuits: Vec<CircuitSpec>,
    pub topologies: Vec<String>,
    #[serde(default = "default_capacity")]
    pub capacity: usize,
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default)]
    pub sa: SaParams,
    #[serde(default)]
    pub ea: EaParams,
    #[serde(default)]
    pub qco: QcoParams,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative circuit and topology paths resolve
    /// against the config's directory.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &str| -> String {
            let pb = Path::new(p);
            if pb.is_absolute() {
                p.to_string()
            } else {
                base.join(pb).to_string_lossy().into_owned()
            }
        };
        for c in &mut cfg.circuits {
            if let CircuitSpec::File { file } = c {
                *file = resolve(file);
            }
        }
        for t in &mut cfg.topologies {
            if let Ok(TopologySpec::File(p)) = t.parse::<TopologySpec>() {
                *t = format!("file:{}", resolve(&p));
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::Config("seeds must not be empty".into()));
        }
        if self.capacity == 0 {
            return Err(Error::Config("capacity must be positive".into()));
        }
        for t in &self.topologies {
            t.parse::<TopologySpec>()?;
        }
        self.sa.validate().map_err(|e| Error::Config(format!("sa: {e}")))?;
        self.ea.validate().map_err(|e| Error::Config(format!("ea: {e}")))?;
        self.qco.validate().map_err(|e| Error::Config(format!("qco: {e}")))?;
        Ok(())
    }
}

/// One run of one algorithm on one (circuit, topology) pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub circuit: String,
    pub topology: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub a: u64,
    pub b: u64,
    pub c: f64,
    pub total: f64,
    /// QCO only.
    pub fidelity: Option<f64>,
    pub wall_ms: f64,
    /// Percent improvement over the mean GP cost of the same (circuit, topology).
    pub improvement_vs_gp: Option<f64>,
}

/// Report plus the artifacts needed to re-verify it.
#[derive(Clone, Debug)]
pub struct RunRecord {
    pub report: RunReport,
    pub schedule: Schedule,
    /// Circuit the schedule belongs to; the optimized circuit for QCO.
    pub circuit: Circuit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedCell {
    pub circuit: String,
    pub topology: String,
    pub algorithm: Option<Algorithm>,
    pub reason: String,
}

#[derive(Clone, Debug, Default)]
pub struct ExperimentOutput {
    pub records: Vec<RunRecord>,
    pub skipped: Vec<SkippedCell>,
}

impl ExperimentOutput {
    pub fn reports(&self) -> impl Iterator<Item = &RunReport> {
        self.records.iter().map(|r| &r.report)
    }
}

/// Runs one algorithm; returns the schedule, the circuit it schedules, its
/// cost, and the fidelity for QCO.
pub fn run_algorithm(
    alg: Algorithm,
    circuit: &Circuit,
    net: &NetworkTopology,
    seed: u64,
    cfg: &ExperimentConfig,
) -> Result<(Schedule, Circuit, CostBreakdown, Option<f64>)> {
    let lc = layerize(circuit);
    let lambda = cfg.lambda;
    let static_cost = |s: Schedule| -> Result<(Schedule, Circuit, CostBreakdown, Option<f64>)> {
        let b = cost(&s, &lc, net, lambda)?;
        Ok((s, circuit.clone(), b, None))
    };
    match alg {
        Algorithm::Sa => {
            let p = SaParams { seed, lambda, ..cfg.sa.clone() };
            let r = anneal(&lc, net, &p)?;
            Ok((r.schedule, circuit.clone(), r.cost, None))
        }
        Algorithm::Ea => {
            let p = EaParams { seed, lambda, ..cfg.ea.clone() };
            let r = evolve(&lc, net, &p)?;
            Ok((r.schedule, circuit.clone(), r.cost, None))
        }
        Algorithm::Gp => static_cost(gp_schedule(&lc, net, seed)?),
        Algorithm::Seq => static_cost(sequential_schedule(&lc, net)?),
        Algorithm::Randseq => static_cost(random_sequential_schedule(&lc, net, seed)?),
        Algorithm::Qco => {
            let p = QcoParams { seed, lambda, ..cfg.qco.clone() };
            let r = qco_evolve(circuit, net, &p)?;
            Ok((r.schedule, r.circuit, r.cost, Some(r.report.fidelity)))
        }
    }
}

struct Instance {
    circuit_id: String,
    circuit: Circuit,
    topology_id: String,
    net: NetworkTopology,
}

/// Runs every cell of the config. Output order follows the config order of
/// circuits, topologies, algorithms and seeds regardless of scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let circuits = cfg
        .circuits
        .iter()
        .map(|c| Ok((c.id(), c.load()?)))
        .collect::<Result<Vec<_>>>()?;
    let topologies = cfg
        .topologies
        .iter()
        .map(|t| {
            let spec: TopologySpec = t.parse()?;
            Ok((spec.id(), spec.build(cfg.capacity)?))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut out = ExperimentOutput::default();
    let mut instances = Vec::new();
    for (cid, circuit) in &circuits {
        for (tid, net) in &topologies {
            if let Err(e) = net.check_capacity(circuit.num_qubits()) {
                out.skipped.push(SkippedCell {
                    circuit: cid.clone(),
                    topology: tid.clone(),
                    algorithm: None,
                    reason: e.to_string(),
                });
                continue;
            }
            instances.push(Instance {
                circuit_id: cid.clone(),
                circuit: circuit.clone(),
                topology_id: tid.clone(),
                net: net.clone(),
            });
        }
    }

    // GP reference cost per instance, averaged over the seed set.
    let gp_means: Vec<f64> = instances
        .par_iter()
        .map(|inst| -> Result<f64> {
            let lc = layerize(&inst.circuit);
            let mut sum = 0.0;
            for &seed in &cfg.seeds {
                let s = gp_schedule(&lc, &inst.net, seed)?;
                sum += cost(&s, &lc, &inst.net, cfg.lambda)?.total;
            }
            Ok(sum / cfg.seeds.len() as f64)
        })
        .collect::<Result<_>>()?;

    let cells: Vec<(usize, Algorithm, u64)> = (0..instances.len())
        .flat_map(|i| {
            cfg.algorithms
                .iter()
                .flat_map(move |&alg| cfg.seeds.iter().map(move |&seed| (i, alg, seed)))
        })
        .collect();

    let results: Vec<std::result::Result<RunRecord, SkippedCell>> = cells
        .par_iter()
        .map(|&(i, alg, seed)| {
            let inst = &instances[i];
            let start = Instant::now();
            match run_algorithm(alg, &inst.circuit, &inst.net, seed, cfg) {
                Ok((schedule, circuit, b, fidelity)) => {
                    let wall_ms = start.elapsed().as_secs_f64() * 1000.0;
                    let gp = gp_means[i];
                    let improvement_vs_gp = (gp > 0.0).then(|| (gp - b.total) / gp * 100.0);
                    Ok(RunRecord {
                        report: RunReport {
                            circuit: inst.circuit_id.clone(),
                            topology: inst.topology_id.clone(),
                            algorithm: alg,
                            seed,
                            a: b.a,
                            b: b.b,
                            c: b.c,
                            total: b.total,
                            fidelity,
                            wall_ms,
                            improvement_vs_gp,
                        },
                        schedule,
                        circuit,
                    })
                }
                Err(e) => Err(SkippedCell {
                    circuit: inst.circuit_id.clone(),
                    topology: inst.topology_id.clone(),
                    algorithm: Some(alg),
                    reason: format!("seed {seed}: {e}"),
                }),
            }
        })
        .collect();

    for r in results {
        match r {
            Ok(rec) => out.records.push(rec),
            Err(skip) => out.skipped.push(skip),
        }
    }
    Ok(out)
}

/// Row of the raw per-run CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawRow {
    pub circuit: String,
    pub topology: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub a: u64,
    pub b: u64,
    pub c: f64,
    pub total: f64,
    pub fidelity: Option<f64>,
    pub wall_ms: Option<f64>,
}

/// Raw per-run CSV. With `include_wall_time = false` the `wall_ms` column is
/// left empty, which makes the output byte-identical across runs.
pub fn raw_csv<'a>(
    reports: impl IntoIterator<Item = &'a RunReport>,
    include_wall_time: bool,
) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(RAW_CSV_HEADER.split(','))?;
    for r in reports {
        w.serialize(RawRow {
            circuit: r.circuit.clone(),
            topology: r.topology.clone(),
            algorithm: r.algorithm,
            seed: r.seed,
            a: r.a,
            b: r.b,
            c: r.c,
            total: r.total,
            fidelity: r.fidelity,
            wall_ms: include_wall_time.then_some(r.wall_ms),
        })?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn read_raw_csv(text: &str) -> Result<Vec<RawRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != RAW_CSV_HEADER {
        return Err(Error::parse(1, 1, format!("unexpected header `{}`", header.join(","))));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Aggregate over the seeds of one (circuit, topology, algorithm) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub circuit: String,
    pub topology: String,
    pub algorithm: Algorithm,
    pub runs: usize,
    pub mean_total: f64,
    pub min_total: f64,
    pub max_total: f64,
    pub mean_fidelity: Option<f64>,
    /// Percent improvement of `mean_total` over the GP mean.
    pub improvement_vs_gp: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
    pub skipped: Vec<SkippedCell>,
}

pub fn summarize(out: &ExperimentOutput) -> Summary {
    // keyed by first appearance to keep config order
    let mut order: Vec<(String, String, Algorithm)> = Vec::new();
    let mut groups: BTreeMap<(String, String, Algorithm), Vec<&RunReport>> = BTreeMap::new();
    for r in out.reports() {
        let key = (r.circuit.clone(), r.topology.clone(), r.algorithm);
        let entry = groups.entry(key.clone()).or_default();
        if entry.is_empty() {
            order.push(key);
        }
        entry.push(r);
    }
    let rows = order
        .into_iter()
        .map(|key| {
            let runs = &groups[&key];
            let totals: Vec<f64> = runs.iter().map(|r| r.total).collect();
            let mean_total = totals.iter().sum::<f64>() / totals.len() as f64;
            let fids: Vec<f64> = runs.iter().filter_map(|r| r.fidelity).collect();
            // every run of a cell shares the same GP reference
            let reference = runs[0]
                .improvement_vs_gp
                .map(|imp| runs[0].total / (1.0 - imp / 100.0));
            let improvement_vs_gp = match (key.2, reference) {
                (Algorithm::Gp, Some(_)) => Some(0.0),
                (_, Some(gp)) if gp.is_finite() && gp > 0.0 => Some((gp - mean_total) / gp * 100.0),
                _ => None,
            };
            SummaryRow {
                circuit: key.0.clone(),
                topology: key.1.clone(),
                algorithm: key.2,
                runs: runs.len(),
                mean_total,
                min_total: totals.iter().copied().fold(f64::INFINITY, f64::min),
                max_total: totals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                mean_fidelity: (!fids.is_empty()).then(|| fids.iter().sum::<f64>() / fids.len() as f64),
                improvement_vs_gp,
            }
        })
        .collect();
    Summary {
        rows,
        skipped: out.skipped.clone(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(Error::Config(format!("unknown report format `{s}`"))),
        }
    }
}

pub fn summary_csv(summary: &Summary) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &summary.rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn artifact_stem(r: &RunReport) -> String {
    format!("{}__{}__{}__s{}", r.circuit, r.topology, r.algorithm, r.seed)
}

/// Writes `raw.csv`, `summary.csv` or `summary.json`, one schedule CSV per
/// run under `schedules/`, and optimized circuits under `circuits/`.
/// Returns the written paths.
pub fn report(out: &ExperimentOutput, dir: &Path, format: ReportFormat) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir.join("schedules"))?;
    let mut written = Vec::new();
    let mut write = |path: PathBuf, contents: String| -> Result<()> {
        fs::write(&path, contents)?;
        written.push(path);
        Ok(())
    };

    write(dir.join("raw.csv"), raw_csv(out.reports(), true)?)?;
    let summary = summarize(out);
    match format {
        ReportFormat::Csv => write(dir.join("summary.csv"), summary_csv(&summary)?)?,
        ReportFormat::Json => write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)?)?,
    }
    for rec in &out.records {
        let stem = artifact_stem(&rec.report);
        write(dir.join("schedules").join(format!("{stem}.csv")), rec.schedule.to_csv()?)?;
        if rec.report.algorithm == Algorithm::Qco {
            fs::create_dir_all(dir.join("circuits"))?;
            write(dir.join("circuits").join(format!("{stem}.txt")), rec.circuit.to_text())?;
        }
    }
    Ok(written)
}
