//! Simulated-annealing scheduler.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::sequential_schedule;
use crate::circuit::LayeredCircuit;
use crate::error::{Error, Result};
use crate::moves::Move;
use crate::network::NetworkTopology;
use crate::schedule::{CostBreakdown, CostModel, Schedule, DEFAULT_LAMBDA};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaParams {
    pub max_iterations: u64,
    pub initial_temp: f64,
    pub cooling_rate: f64,
    pub temp_floor: f64,
    pub seed: u64,
    pub lambda: f64,
    /// Record a trace point every `trace_stride` iterations.
    pub trace_stride: u64,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams {
            max_iterations: 100_000,
            initial_temp: 50.0,
            cooling_rate: 0.999,
            temp_floor: 0.00001,
            seed: 0,
            lambda: DEFAULT_LAMBDA,
            trace_stride: 1000,
        }
    }
}

impl SaParams {
    pub fn with_seed(seed: u64) -> Self {
        SaParams {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidParams("max_iterations must be positive".into()));
        }
        if !(self.initial_temp > 0.0) {
            return Err(Error::InvalidParams("initial_temp must be positive".into()));
        }
        if !(self.cooling_rate > 0.0 && self.cooling_rate < 1.0) {
            return Err(Error::InvalidParams("cooling_rate must lie in (0, 1)".into()));
        }
        if !(self.temp_floor > 0.0) {
            return Err(Error::InvalidParams("temp_floor must be positive".into()));
        }
        if self.trace_stride == 0 {
            return Err(Error::InvalidParams("trace_stride must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaTracePoint {
    pub iteration: u64,
    pub current_cost: f64,
    pub best_cost: f64,
}

#[derive(Clone, Debug)]
pub struct SaResult {
    pub schedule: Schedule,
    pub cost: CostBreakdown,
    pub trace: Vec<SaTracePoint>,
}

/// Metropolis acceptance: 1 when the neighbor is strictly better, otherwise
/// `exp(-(neighbor - current) / temperature)`.
pub fn accept_probability(current_cost: f64, neighbor_cost: f64, temperature: f64) -> f64 {
    if neighbor_cost < current_cost {
        1.0
    } else {
        (-(neighbor_cost - current_cost) / temperature).exp()
    }
}

/// Copy of `s` with one uniformly chosen neighbor move applied.
pub fn neighbor<R: Rng + ?Sized>(s: &Schedule, num_nodes: usize, rng: &mut R) -> Schedule {
    let mut next = s.clone();
    let mv = *Move::NEIGHBOR.choose(rng).expect("non-empty move set");
    mv.apply(&mut next, num_nodes, rng);
    next
}

pub fn anneal(lc: &LayeredCircuit, net: &NetworkTopology, p: &SaParams) -> Result<SaResult> {
    p.validate()?;
    net.check_capacity(lc.num_qubits())?;

    let model = CostModel::new(lc, net, p.lambda);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let num_nodes = net.num_nodes();

    let mut current = sequential_schedule(lc, net)?;
    let mut current_cost = model.evaluate(&current);
    let mut best = current.clone();
    let mut best_cost = current_cost;

    let mut trace = vec![SaTracePoint {
        iteration: 0,
        current_cost: current_cost.total,
        best_cost: best_cost.total,
    }];

    let mut temp = p.initial_temp;
    for i in 1..=p.max_iterations {
        temp = (temp * p.cooling_rate).max(p.temp_floor);
        let candidate = neighbor(&current, num_nodes, &mut rng);
        let candidate_cost = model.evaluate(&candidate);
        if candidate_cost.total < current_cost.total
            || accept_probability(current_cost.total, candidate_cost.total, temp) > rng.gen::<f64>()
        {
            current = candidate;
            current_cost = candidate_cost;
        }
        if current_cost.total < best_cost.total {
            best.clone_from(&current);
            best_cost = current_cost;
        }
        if i % p.trace_stride == 0 || i == p.max_iterations {
            trace.push(SaTracePoint {
                iteration: i,
                current_cost: current_cost.total,
                best_cost: best_cost.total,
            });
        }
    }

    Ok(SaResult {
        schedule: best,
        cost: best_cost,
        trace,
    })
}

/// Trace CSV: `iteration,current_cost,best_cost`.
pub fn trace_to_csv(trace: &[SaTracePoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for point in trace {
        w.serialize(point)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
