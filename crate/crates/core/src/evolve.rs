//! Evolutionary scheduler over the schedule matrix.
//!
//! Individuals are initialized either as a shuffled sequential fill (constant
//! rows) or uniformly at random. Offspring come from single-point row-wise or
//! column-wise crossover of two tournament winners, or are fresh individuals;
//! each child is mutated at most once. The worst individuals are replaced by
//! the best children every generation, so the best cost never increases.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::sequential_placement;
use crate::circuit::LayeredCircuit;
use crate::error::{Error, Result};
use crate::moves::Move;
use crate::network::NetworkTopology;
use crate::schedule::{CostBreakdown, CostModel, Schedule, DEFAULT_LAMBDA};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EaParams {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub offspring_rate: f64,
    pub replace_rate: f64,
    /// Contestants per parent tournament.
    pub tournament_size: usize,
    pub seed: u64,
    pub lambda: f64,
}

impl Default for EaParams {
    fn default() -> Self {
        EaParams {
            population_size: 100,
            generations: 500,
            crossover_rate: 0.9,
            mutation_rate: 0.5,
            offspring_rate: 0.5,
            replace_rate: 0.5,
            tournament_size: 2,
            seed: 0,
            lambda: DEFAULT_LAMBDA,
        }
    }
}

impl EaParams {
    pub fn with_seed(seed: u64) -> Self {
        EaParams {
            seed,
            ..Self::default()
        }
    }

    /// Children created per generation.
    pub fn offspring_count(&self) -> usize {
        (self.offspring_rate * self.population_size as f64).ceil() as usize
    }

    /// Individuals replaced per generation. At least one individual always survives.
    pub fn replace_count(&self) -> usize {
        let n = (self.replace_rate * self.population_size as f64).ceil() as usize;
        n.min(self.population_size.saturating_sub(1))
    }

    pub fn validate(&self) -> Result<()> {
        if self.tournament_size == 0 {
            return Err(Error::InvalidParams("tournament_size must be positive".into()));
        }
        check_rates(
            self.population_size,
            self.generations,
            self.crossover_rate,
            self.mutation_rate,
            self.offspring_rate,
            self.replace_rate,
        )
    }
}

pub(crate) fn check_rates(
    population_size: usize,
    generations: usize,
    crossover_rate: f64,
    mutation_rate: f64,
    offspring_rate: f64,
    replace_rate: f64,
) -> Result<()> {
    let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
    if population_size < 2 {
        return bad("population_size must be at least 2");
    }
    if generations == 0 {
        return bad("generations must be positive");
    }
    if !(0.0..=1.0).contains(&crossover_rate) {
        return bad("crossover_rate must lie in [0, 1]");
    }
    if !(0.0..=1.0).contains(&mutation_rate) {
        return bad("mutation_rate must lie in [0, 1]");
    }
    if !(offspring_rate > 0.0 && offspring_rate <= 1.0) {
        return bad("offspring_rate must lie in (0, 1]");
    }
    if !(replace_rate > 0.0 && replace_rate <= 1.0) {
        return bad("replace_rate must lie in (0, 1]");
    }
    if replace_rate > offspring_rate {
        return bad("replace_rate cannot exceed offspring_rate");
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EaTracePoint {
    pub generation: usize,
    pub best_cost: f64,
    pub mean_cost: f64,
}

#[derive(Clone, Debug)]
pub struct EaResult {
    pub schedule: Schedule,
    pub cost: CostBreakdown,
    pub trace: Vec<EaTracePoint>,
}

/// Sequential fill held constant over time, with the rows shuffled.
pub fn init_shuffled_sequential<R: Rng + ?Sized>(
    lc: &LayeredCircuit,
    net: &NetworkTopology,
    rng: &mut R,
) -> Result<Schedule> {
    let mut placement = sequential_placement(lc.num_qubits(), net)?;
    placement.shuffle(rng);
    Ok(Schedule::constant(&placement, lc.depth()))
}

/// Every cell drawn uniformly over the nodes.
pub fn init_uniform<R: Rng + ?Sized>(lc: &LayeredCircuit, net: &NetworkTopology, rng: &mut R) -> Schedule {
    let (q, t) = (lc.num_qubits(), lc.depth());
    let cells = (0..q * t).map(|_| rng.gen_range(0..net.num_nodes())).collect();
    Schedule::from_cells(q, t, cells)
}

/// One of the two initializers, chosen with equal probability.
pub fn init_individual<R: Rng + ?Sized>(
    lc: &LayeredCircuit,
    net: &NetworkTopology,
    rng: &mut R,
) -> Result<Schedule> {
    if rng.gen_bool(0.5) {
        init_shuffled_sequential(lc, net, rng)
    } else {
        Ok(init_uniform(lc, net, rng))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossoverKind {
    /// Rows `[0, cut)` from the first parent.
    RowWise,
    /// Columns `[0, cut)` from the first parent.
    ColumnWise,
}

/// Single-point crossover at an explicit cut.
pub fn crossover_at(p1: &Schedule, p2: &Schedule, kind: CrossoverKind, cut: usize) -> Result<Schedule> {
    if p1.num_qubits() != p2.num_qubits() || p1.depth() != p2.depth() {
        return Err(Error::DimensionMismatch {
            got_rows: p2.num_qubits(),
            got_cols: p2.depth(),
            want_rows: p1.num_qubits(),
            want_cols: p1.depth(),
        });
    }
    let mut child = p1.clone();
    for q in 0..p1.num_qubits() {
        for t in 0..p1.depth() {
            let from_second = match kind {
                CrossoverKind::RowWise => q >= cut,
                CrossoverKind::ColumnWise => t >= cut,
            };
            if from_second {
                child.set(q, t, p2.get(q, t));
            }
        }
    }
    Ok(child)
}

/// Row-wise or column-wise single-point crossover with a uniform cut in
/// `[1, dim - 1]`; a copy of `p1` when the chosen dimension is below 2.
pub fn crossover<R: Rng + ?Sized>(p1: &Schedule, p2: &Schedule, rng: &mut R) -> Result<Schedule> {
    let kind = if rng.gen_bool(0.5) {
        CrossoverKind::RowWise
    } else {
        CrossoverKind::ColumnWise
    };
    let dim = match kind {
        CrossoverKind::RowWise => p1.num_qubits(),
        CrossoverKind::ColumnWise => p1.depth(),
    };
    let cut = if dim >= 2 { rng.gen_range(1..dim) } else { dim };
    crossover_at(p1, p2, kind, cut)
}

/// Copy of `s` with one uniformly chosen mutation applied.
pub fn mutate<R: Rng + ?Sized>(s: &Schedule, num_nodes: usize, rng: &mut R) -> Schedule {
    let mut out = s.clone();
    let mv = *Move::ALL.choose(rng).expect("non-empty");
    mv.apply(&mut out, num_nodes, rng);
    out
}

struct Individual {
    schedule: Schedule,
    cost: CostBreakdown,
}

/// Best of `size` uniform draws; ties go to the lower index.
fn tournament<'p, R: Rng + ?Sized>(pop: &'p [Individual], size: usize, rng: &mut R) -> &'p Individual {
    let mut winner = rng.gen_range(0..pop.len());
    for _ in 1..size {
        let c = rng.gen_range(0..pop.len());
        let (wc, cc) = (pop[winner].cost.total, pop[c].cost.total);
        if cc < wc || (cc == wc && c < winner) {
            winner = c;
        }
    }
    &pop[winner]
}

fn sort_by_cost(pop: &mut [Individual]) {
    pop.sort_by(|x, y| x.cost.total.total_cmp(&y.cost.total));
}

fn trace_point(generation: usize, pop: &[Individual]) -> EaTracePoint {
    let best = pop.iter().map(|i| i.cost.total).fold(f64::INFINITY, f64::min);
    let mean = pop.iter().map(|i| i.cost.total).sum::<f64>() / pop.len() as f64;
    EaTracePoint {
        generation,
        best_cost: best,
        mean_cost: mean,
    }
}

pub fn evolve(lc: &LayeredCircuit, net: &NetworkTopology, p: &EaParams) -> Result<EaResult> {
    p.validate()?;
    net.check_capacity(lc.num_qubits())?;

    let model = CostModel::new(lc, net, p.lambda);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let num_nodes = net.num_nodes();

    let mut pop = Vec::with_capacity(p.population_size);
    for _ in 0..p.population_size {
        let schedule = init_individual(lc, net, &mut rng)?;
        let cost = model.evaluate(&schedule);
        pop.push(Individual { schedule, cost });
    }
    sort_by_cost(&mut pop);
    let mut trace = vec![trace_point(0, &pop)];

    let n_children = p.offspring_count();
    let n_replace = p.replace_count();
    for generation in 1..=p.generations {
        let mut children = Vec::with_capacity(n_children);
        for _ in 0..n_children {
            let mut child = if rng.gen_bool(p.crossover_rate) {
                let a = tournament(&pop, p.tournament_size, &mut rng);
                let b = tournament(&pop, p.tournament_size, &mut rng);
                crossover(&a.schedule, &b.schedule, &mut rng)?
            } else {
                init_individual(lc, net, &mut rng)?
            };
            if rng.gen_bool(p.mutation_rate) {
                child = mutate(&child, num_nodes, &mut rng);
            }
            let cost = model.evaluate(&child);
            children.push(Individual { schedule: child, cost });
        }
        sort_by_cost(&mut children);

        let keep = pop.len() - n_replace;
        pop.truncate(keep);
        pop.extend(children.into_iter().take(n_replace));
        sort_by_cost(&mut pop);
        trace.push(trace_point(generation, &pop));
    }

    let best = pop.swap_remove(0);
    Ok(EaResult {
        schedule: best.schedule,
        cost: best.cost,
        trace,
    })
}

/// Trace CSV: `generation,best_cost,mean_cost`.
pub fn trace_to_csv(trace: &[EaTracePoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for point in trace {
        w.serialize(point)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
