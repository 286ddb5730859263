//! Evolutionary circuit optimizer.
//!
//! Rewrites a state-preparation circuit `U` into `Û` so that the
//! communication cost `u(Û)` of its baseline schedule drops while the
//! prepared state stays within `epsilon` of `U|0>`:
//!
//! ```text
//! g(U, Û) = penalty                      if F(U|0>, Û) < 1 - epsilon
//!         = F(U|0>, Û) - u(Û) / u(U)     otherwise
//! ```
//!
//! Genomes are plain gate lists. A positive fitness implies `u(Û) < u(U)`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::anneal::{anneal, SaParams};
use crate::baselines::gp_schedule;
use crate::circuit::{layerize, Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::evolve::{check_rates, evolve, EaParams};
use crate::network::NetworkTopology;
use crate::schedule::{cost, CostBreakdown, Schedule, DEFAULT_LAMBDA};
use crate::statevector::{run, StateVector};

/// One gene of the optimizer's genome.
pub type GateGene = Gate;

/// Scheduler used to turn a circuit into its communication cost `u`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum CostScheduler {
    #[default]
    Gp,
    Sa(SaParams),
    Ea(EaParams),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QcoParams {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub offspring_rate: f64,
    pub replace_rate: f64,
    pub seed: u64,
    pub epsilon: f64,
    pub penalty: f64,
    /// Length cap for freshly generated circuits (and for offspring, unless
    /// the original circuit is longer).
    pub max_gates: usize,
    /// Capacity penalty inside the schedule cost.
    pub lambda: f64,
    /// Seed of the scheduler computing `u`, fixed so that `u` is a function of the circuit.
    pub schedule_seed: u64,
    pub scheduler: CostScheduler,
}

impl Default for QcoParams {
    fn default() -> Self {
        QcoParams {
            population_size: 100,
            generations: 300,
            crossover_rate: 0.9,
            mutation_rate: 0.5,
            offspring_rate: 0.5,
            replace_rate: 0.5,
            seed: 0,
            epsilon: 0.003,
            penalty: -100.0,
            max_gates: 100,
            lambda: DEFAULT_LAMBDA,
            schedule_seed: 0,
            scheduler: CostScheduler::Gp,
        }
    }
}

impl QcoParams {
    pub fn with_seed(seed: u64) -> Self {
        QcoParams {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_rates(
            self.population_size,
            self.generations,
            self.crossover_rate,
            self.mutation_rate,
            self.offspring_rate,
            self.replace_rate,
        )?;
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParams("epsilon must lie in (0, 1)".into()));
        }
        if self.max_gates == 0 {
            return Err(Error::InvalidParams("max_gates must be positive".into()));
        }
        Ok(())
    }

    fn offspring_count(&self) -> usize {
        (self.offspring_rate * self.population_size as f64).ceil() as usize
    }

    fn replace_count(&self) -> usize {
        let n = (self.replace_rate * self.population_size as f64).ceil() as usize;
        n.min(self.population_size - 1)
    }
}

/// Communication cost `u(c)`: the total cost of the schedule that `scheduler` builds for `c`.
pub fn communication_cost(
    c: &Circuit,
    net: &NetworkTopology,
    scheduler: &CostScheduler,
    seed: u64,
    lambda: f64,
) -> Result<(Schedule, CostBreakdown)> {
    let lc = layerize(c);
    match scheduler {
        CostScheduler::Gp => {
            let s = gp_schedule(&lc, net, seed)?;
            let b = cost(&s, &lc, net, lambda)?;
            Ok((s, b))
        }
        CostScheduler::Sa(p) => {
            let p = SaParams { seed, lambda, ..p.clone() };
            let r = anneal(&lc, net, &p)?;
            Ok((r.schedule, r.cost))
        }
        CostScheduler::Ea(p) => {
            let p = EaParams { seed, lambda, ..p.clone() };
            let r = evolve(&lc, net, &p)?;
            Ok((r.schedule, r.cost))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub fitness: f64,
    pub fidelity: f64,
    pub u: f64,
}

/// Fitness function bound to one original circuit and network. `u(U)` and
/// `U|0>` are computed once.
#[derive(Clone, Debug)]
pub struct QcoObjective<'a> {
    target: StateVector,
    u_original: f64,
    net: &'a NetworkTopology,
    epsilon: f64,
    penalty: f64,
    lambda: f64,
    schedule_seed: u64,
    scheduler: CostScheduler,
}

impl<'a> QcoObjective<'a> {
    pub fn new(original: &Circuit, net: &'a NetworkTopology, p: &QcoParams) -> Result<Self> {
        net.check_capacity(original.num_qubits())?;
        let target = run(original)?;
        let (_, b) = communication_cost(original, net, &p.scheduler, p.schedule_seed, p.lambda)?;
        if b.total <= 0.0 {
            return Err(Error::CommunicationFree);
        }
        Ok(QcoObjective {
            target,
            u_original: b.total,
            net,
            epsilon: p.epsilon,
            penalty: p.penalty,
            lambda: p.lambda,
            schedule_seed: p.schedule_seed,
            scheduler: p.scheduler.clone(),
        })
    }

    pub fn u_original(&self) -> f64 {
        self.u_original
    }

    pub fn target(&self) -> &StateVector {
        &self.target
    }

    pub fn u(&self, c: &Circuit) -> Result<(Schedule, CostBreakdown)> {
        communication_cost(c, self.net, &self.scheduler, self.schedule_seed, self.lambda)
    }

    pub fn evaluate(&self, candidate: &Circuit) -> Result<Evaluation> {
        if candidate.num_qubits() != self.target.num_qubits() {
            return Err(Error::QubitCountMismatch(
                self.target.num_qubits(),
                candidate.num_qubits(),
            ));
        }
        let fidelity = self.target.fidelity(&run(candidate)?)?;
        let (_, b) = self.u(candidate)?;
        let fitness = if fidelity < 1.0 - self.epsilon {
            self.penalty
        } else {
            fidelity - b.total / self.u_original
        };
        Ok(Evaluation {
            fitness,
            fidelity,
            u: b.total,
        })
    }
}

/// Fitness of `candidate` against `original`.
pub fn qco_fitness(
    original: &Circuit,
    candidate: &Circuit,
    net: &NetworkTopology,
    p: &QcoParams,
) -> Result<f64> {
    if original.num_qubits() != candidate.num_qubits() {
        return Err(Error::QubitCountMismatch(original.num_qubits(), candidate.num_qubits()));
    }
    Ok(QcoObjective::new(original, net, p)?.evaluate(candidate)?.fitness)
}

/// Uniform gate: kind uniform over the gate set (CX only with 2+ qubits),
/// operands uniform, RZ angle uniform in `[0, 2π)`.
pub fn random_gate<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Gate {
    let kinds: &[GateKind] = if num_qubits >= 2 {
        &GateKind::ALL
    } else {
        &GateKind::SINGLE_QUBIT
    };
    let q = rng.gen_range(0..num_qubits);
    match kinds.choose(rng).expect("non-empty") {
        GateKind::CX => {
            let mut t = rng.gen_range(0..num_qubits - 1);
            if t >= q {
                t += 1;
            }
            Gate::CX(q, t)
        }
        GateKind::X => Gate::X(q),
        GateKind::SX => Gate::SX(q),
        GateKind::RZ => Gate::RZ(q, rng.gen_range(0.0..std::f64::consts::TAU)),
    }
}

/// Fresh genome with length uniform in `[1, max_gates]`.
pub fn random_genes<R: Rng + ?Sized>(num_qubits: usize, max_gates: usize, rng: &mut R) -> Vec<Gate> {
    let len = rng.gen_range(1..=max_gates.max(1));
    (0..len).map(|_| random_gate(num_qubits, rng)).collect()
}

/// Prefix `p1[..cut1]` followed by suffix `p2[cut2..]`, truncated to `max_gates`.
pub fn single_point_crossover(
    p1: &[Gate],
    p2: &[Gate],
    cut1: usize,
    cut2: usize,
    max_gates: usize,
) -> Vec<Gate> {
    let mut child: Vec<Gate> = p1[..cut1.min(p1.len())]
        .iter()
        .chain(&p2[cut2.min(p2.len())..])
        .copied()
        .collect();
    child.truncate(max_gates);
    child
}

/// Slot-wise coin flips over the common length, then the longer parent's
/// tail with probability 1/2. Truncated to `max_gates`.
pub fn uniform_crossover<R: Rng + ?Sized>(
    p1: &[Gate],
    p2: &[Gate],
    max_gates: usize,
    rng: &mut R,
) -> Vec<Gate> {
    let common = p1.len().min(p2.len());
    let mut child: Vec<Gate> = (0..common)
        .map(|i| if rng.gen_bool(0.5) { p1[i] } else { p2[i] })
        .collect();
    let tail = if p1.len() > common { &p1[common..] } else { &p2[common..] };
    if !tail.is_empty() && rng.gen_bool(0.5) {
        child.extend_from_slice(tail);
    }
    child.truncate(max_gates);
    child
}

/// Single-point (independent cut per parent) or uniform crossover, equal odds.
pub fn qco_crossover<R: Rng + ?Sized>(
    p1: &[Gate],
    p2: &[Gate],
    max_gates: usize,
    rng: &mut R,
) -> Vec<Gate> {
    if rng.gen_bool(0.5) {
        let cut1 = rng.gen_range(0..=p1.len());
        let cut2 = rng.gen_range(0..=p2.len());
        single_point_crossover(p1, p2, cut1, cut2, max_gates)
    } else {
        uniform_crossover(p1, p2, max_gates, rng)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneMutation {
    AddGate,
    RemoveGate,
    SwapGates,
    ShuffleSubset,
    MutateGate,
}

impl GeneMutation {
    pub const ALL: [GeneMutation; 5] = [
        GeneMutation::AddGate,
        GeneMutation::RemoveGate,
        GeneMutation::SwapGates,
        GeneMutation::ShuffleSubset,
        GeneMutation::MutateGate,
    ];

    pub fn apply<R: Rng + ?Sized>(
        self,
        genes: &mut Vec<Gate>,
        num_qubits: usize,
        max_gates: usize,
        rng: &mut R,
    ) {
        let len = genes.len();
        match self {
            GeneMutation::AddGate => {
                if len < max_gates {
                    let pos = rng.gen_range(0..=len);
                    genes.insert(pos, random_gate(num_qubits, rng));
                }
            }
            GeneMutation::RemoveGate => {
                if len > 0 {
                    genes.remove(rng.gen_range(0..len));
                }
            }
            GeneMutation::SwapGates => {
                if len >= 2 {
                    let a = rng.gen_range(0..len);
                    let b = rng.gen_range(0..len);
                    genes.swap(a, b);
                }
            }
            GeneMutation::ShuffleSubset => {
                if len >= 2 {
                    let a = rng.gen_range(0..len);
                    let b = rng.gen_range(0..len);
                    let (lo, hi) = (a.min(b), a.max(b));
                    genes[lo..=hi].shuffle(rng);
                }
            }
            GeneMutation::MutateGate => {
                if len > 0 {
                    let i = rng.gen_range(0..len);
                    genes[i] = random_gate(num_qubits, rng);
                }
            }
        }
    }
}

/// Copy of `genes` with one uniformly chosen mutation applied.
pub fn qco_mutate<R: Rng + ?Sized>(
    genes: &[Gate],
    num_qubits: usize,
    max_gates: usize,
    rng: &mut R,
) -> Vec<Gate> {
    let mut out = genes.to_vec();
    let m = *GeneMutation::ALL.choose(rng).expect("non-empty");
    m.apply(&mut out, num_qubits, max_gates, rng);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QcoStatus {
    /// Fitness > 0: fidelity within epsilon and lower communication cost.
    Improved,
    /// Best individual is feasible but does not beat the original.
    NoImprovement,
    /// Every individual fell below the fidelity threshold.
    Infeasible,
}

/// Report JSON emitted next to the optimized circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QcoReport {
    pub best_fitness: f64,
    pub fidelity: f64,
    pub u_original: f64,
    pub u_optimized: f64,
    pub generations_run: usize,
    pub seed: u64,
    pub status: QcoStatus,
}

#[derive(Clone, Debug)]
pub struct QcoResult {
    pub circuit: Circuit,
    pub fitness: f64,
    pub report: QcoReport,
    /// Schedule of the optimized circuit under the cost scheduler.
    pub schedule: Schedule,
    pub cost: CostBreakdown,
    /// Best fitness after each generation, starting with the initial population.
    pub trace: Vec<f64>,
}

impl QcoResult {
    pub fn succeeded(&self) -> bool {
        self.report.status == QcoStatus::Improved
    }
}

struct Member {
    genes: Vec<Gate>,
    eval: Evaluation,
}

fn evaluate_all(objective: &QcoObjective<'_>, num_qubits: usize, genomes: Vec<Vec<Gate>>) -> Result<Vec<Member>> {
    genomes
        .into_par_iter()
        .map(|genes| {
            let c = Circuit::from_gates(num_qubits, genes)?;
            let eval = objective.evaluate(&c)?;
            Ok(Member {
                genes: c.into_gates(),
                eval,
            })
        })
        .collect()
}

fn sort_by_fitness(pop: &mut [Member]) {
    pop.sort_by(|a, b| b.eval.fitness.total_cmp(&a.eval.fitness));
}

fn tournament<'p, R: Rng + ?Sized>(pop: &'p [Member], rng: &mut R) -> &'p Member {
    let a = rng.gen_range(0..pop.len());
    let b = rng.gen_range(0..pop.len());
    let (lo, hi) = (a.min(b), a.max(b));
    if pop[hi].eval.fitness > pop[lo].eval.fitness {
        &pop[hi]
    } else {
        &pop[lo]
    }
}

pub fn qco_evolve(original: &Circuit, net: &NetworkTopology, p: &QcoParams) -> Result<QcoResult> {
    p.validate()?;
    let objective = QcoObjective::new(original, net, p)?;
    let n = original.num_qubits();
    let cap = p.max_gates.max(original.len());
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);

    let initial: Vec<Vec<Gate>> = (0..p.population_size)
        .map(|_| {
            if rng.gen_bool(0.5) {
                original.gates().to_vec()
            } else {
                random_genes(n, p.max_gates, &mut rng)
            }
        })
        .collect();
    let mut pop = evaluate_all(&objective, n, initial)?;
    sort_by_fitness(&mut pop);
    let mut trace = vec![pop[0].eval.fitness];

    let n_children = p.offspring_count();
    let n_replace = p.replace_count();
    for _ in 0..p.generations {
        let mut genomes = Vec::with_capacity(n_children);
        for _ in 0..n_children {
            let mut child = if rng.gen_bool(p.crossover_rate) {
                let a = tournament(&pop, &mut rng);
                let b = tournament(&pop, &mut rng);
                qco_crossover(&a.genes, &b.genes, cap, &mut rng)
            } else {
                random_genes(n, p.max_gates, &mut rng)
            };
            if rng.gen_bool(p.mutation_rate) {
                child = qco_mutate(&child, n, cap, &mut rng);
            }
            genomes.push(child);
        }
        let mut children = evaluate_all(&objective, n, genomes)?;
        sort_by_fitness(&mut children);

        pop.truncate(pop.len() - n_replace);
        pop.extend(children.into_iter().take(n_replace));
        sort_by_fitness(&mut pop);
        trace.push(pop[0].eval.fitness);
    }

    let best = pop.swap_remove(0);
    let circuit = Circuit::from_gates(n, best.genes)?;
    let (schedule, b) = objective.u(&circuit)?;
    let status = if best.eval.fitness > 0.0 {
        QcoStatus::Improved
    } else if best.eval.fitness <= p.penalty {
        QcoStatus::Infeasible
    } else {
        QcoStatus::NoImprovement
    };
    Ok(QcoResult {
        report: QcoReport {
            best_fitness: best.eval.fitness,
            fidelity: best.eval.fidelity,
            u_original: objective.u_original(),
            u_optimized: best.eval.u,
            generations_run: p.generations,
            seed: p.seed,
            status,
        },
        circuit,
        fitness: best.eval.fitness,
        schedule,
        cost: b,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::random_circuit;
    use crate::network::build_grid;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(42)
    }

    #[test]
    fn self_comparison_scores_zero() {
        let net = build_grid(2, 2, 2).unwrap();
        let c = random_circuit(8, 10, 1).unwrap();
        let f = qco_fitness(&c, &c, &net, &QcoParams::default()).unwrap();
        assert!(f.abs() < 1e-9, "{f}");
    }

    #[test]
    fn low_fidelity_is_penalized() {
        let net = build_grid(1, 2, 2).unwrap();
        // prepares |q3 q2 q1 q0> = |1110>; any 2+2 split of the CX ring is remote
        let original = Circuit::from_gates(
            4,
            vec![Gate::X(0), Gate::CX(0, 1), Gate::CX(1, 2), Gate::CX(2, 3), Gate::CX(3, 0)],
        )
        .unwrap();
        let candidate = Circuit::new(4);
        assert_eq!(qco_fitness(&original, &candidate, &net, &QcoParams::default()).unwrap(), -100.0);
    }

    #[test]
    fn canceling_pair_on_idle_qubit_scores_zero() {
        let net = build_grid(1, 2, 2).unwrap();
        let original = Circuit::from_gates(
            4,
            vec![Gate::SX(0), Gate::CX(0, 1), Gate::CX(1, 2), Gate::CX(2, 0)],
        )
        .unwrap();
        let mut gates = original.gates().to_vec();
        gates.extend([Gate::X(3), Gate::X(3)]);
        let candidate = Circuit::from_gates(4, gates).unwrap();
        let objective = QcoObjective::new(&original, &net, &QcoParams::default()).unwrap();
        let e = objective.evaluate(&candidate).unwrap();
        assert!((e.fidelity - 1.0).abs() < 1e-12);
        assert_eq!(e.u, objective.u_original());
        assert!(e.fitness.abs() < 1e-12);
    }

    #[test]
    fn communication_free_is_rejected() {
        let net = build_grid(1, 2, 2).unwrap();
        let bell = Circuit::from_gates(2, vec![Gate::SX(0), Gate::CX(0, 1)]).unwrap();
        assert!(matches!(
            qco_evolve(&bell, &net, &QcoParams::default()),
            Err(Error::CommunicationFree)
        ));
    }

    #[test]
    fn crossover_boundaries_and_cap() {
        let p1 = vec![Gate::X(0), Gate::SX(1), Gate::X(1)];
        let p2 = vec![Gate::CX(0, 1), Gate::RZ(0, 0.5)];
        assert_eq!(single_point_crossover(&p1, &p2, 3, 2, 10), p1);
        assert_eq!(single_point_crossover(&p1, &p2, 0, 0, 10), p2);
        assert_eq!(single_point_crossover(&p1, &p2, 3, 0, 4).len(), 4);

        let mut r = rng();
        assert_eq!(uniform_crossover(&p1, &p1, 10, &mut r), p1);
        for _ in 0..200 {
            let a = random_genes(3, 20, &mut r);
            let b = random_genes(3, 20, &mut r);
            assert!(qco_crossover(&a, &b, 7, &mut r).len() <= 7);
        }
    }

    #[test]
    fn mutation_contracts() {
        let mut r = rng();
        let mut one = vec![Gate::X(0)];
        GeneMutation::RemoveGate.apply(&mut one, 2, 10, &mut r);
        assert!(one.is_empty());

        let mut full = vec![Gate::X(0); 5];
        GeneMutation::AddGate.apply(&mut full, 2, 5, &mut r);
        assert_eq!(full.len(), 5);

        let orig: Vec<Gate> = (0..6).map(|q| Gate::X(q % 3)).chain([Gate::CX(0, 1)]).collect();
        let mut swapped = orig.clone();
        GeneMutation::SwapGates.apply(&mut swapped, 3, 10, &mut r);
        let key = |g: &Gate| format!("{g}");
        let mut a: Vec<_> = orig.iter().map(key).collect();
        let mut b: Vec<_> = swapped.iter().map(key).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn random_genes_are_valid() {
        let mut r = rng();
        for _ in 0..100 {
            let g = random_genes(3, 30, &mut r);
            assert!((1..=30).contains(&g.len()));
            assert!(Circuit::from_gates(3, g).is_ok());
        }
        let single = random_genes(1, 10, &mut r);
        assert!(single.iter().all(|g| !g.is_cx()));
    }

    #[test]
    fn small_run_is_elitist_and_deterministic() {
        let net = build_grid(2, 2, 2).unwrap();
        let c = random_circuit(8, 8, 3).unwrap();
        let p = QcoParams {
            population_size: 16,
            generations: 15,
            seed: 2,
            ..QcoParams::default()
        };
        let r = qco_evolve(&c, &net, &p).unwrap();
        assert!(r.trace.windows(2).all(|w| w[1] >= w[0]));
        let again = qco_evolve(&c, &net, &p).unwrap();
        assert_eq!(r.circuit, again.circuit);
        assert_eq!(r.report, again.report);
        if r.report.status != QcoStatus::Infeasible {
            assert!(r.report.fidelity >= 1.0 - p.epsilon);
        }
    }
}
