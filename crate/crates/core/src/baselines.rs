//! Static assignment baselines: graph partitioning, sequential fill and
//! shuffled sequential fill. All of them produce time-constant schedules that
//! respect node capacities.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate, LayeredCircuit};
use crate::error::{Error, Result};
use crate::network::NetworkTopology;
use crate::schedule::Schedule;

/// Qubit interaction graph weighted by CX counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteractionGraph {
    num_qubits: usize,
    weights: Vec<u64>,
}

impl InteractionGraph {
    pub fn new(num_qubits: usize) -> Self {
        InteractionGraph {
            num_qubits,
            weights: vec![0; num_qubits * num_qubits],
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> u64 {
        self.weights[i * self.num_qubits + j]
    }

    pub fn add_edge(&mut self, i: usize, j: usize, w: u64) {
        let n = self.num_qubits;
        self.weights[i * n + j] += w;
        self.weights[j * n + i] += w;
    }

    /// Sum of weights over all unordered pairs.
    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum::<u64>() / 2
    }

    /// Weight of edges whose endpoints land in different parts.
    pub fn cut_weight(&self, parts: &[usize]) -> u64 {
        let n = self.num_qubits;
        let mut cut = 0;
        for i in 0..n {
            for j in i + 1..n {
                if parts[i] != parts[j] {
                    cut += self.weight(i, j);
                }
            }
        }
        cut
    }

    fn from_gates<'a>(num_qubits: usize, gates: impl Iterator<Item = &'a Gate>) -> Self {
        let mut g = InteractionGraph::new(num_qubits);
        for gate in gates {
            if let Gate::CX(c, t) = *gate {
                g.add_edge(c, t, 1);
            }
        }
        g
    }
}

pub fn interaction_graph(c: &Circuit) -> InteractionGraph {
    InteractionGraph::from_gates(c.num_qubits(), c.gates().iter())
}

pub fn interaction_graph_layered(lc: &LayeredCircuit) -> InteractionGraph {
    InteractionGraph::from_gates(lc.num_qubits(), lc.layers().iter().flatten())
}

/// Random initial splits tried per bisection; the lowest refined cut wins.
const BISECTION_TRIES: usize = 4;

/// Capacity-bounded min-cut k-way partition.
///
/// Recursive bisection: the part range is split in half, qubits are divided
/// in proportion to the two halves' capacities, and each split is refined by
/// greedy pairwise swaps (and single moves where capacity allows) until no
/// move lowers the cut. Returns the part of every qubit.
pub fn partition(
    g: &InteractionGraph,
    k: usize,
    part_capacity: &[usize],
    seed: u64,
) -> Result<Vec<usize>> {
    if k == 0 || part_capacity.len() != k {
        return Err(Error::InvalidParams(format!(
            "need k >= 1 and one capacity per part (k = {k}, {} capacities)",
            part_capacity.len()
        )));
    }
    let capacity: usize = part_capacity.iter().sum();
    if capacity < g.num_qubits() {
        return Err(Error::CapacityInfeasible {
            capacity,
            qubits: g.num_qubits(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts = vec![0; g.num_qubits()];
    let vertices: Vec<usize> = (0..g.num_qubits()).collect();
    recurse(g, &vertices, 0, k, part_capacity, &mut parts, &mut rng);
    Ok(parts)
}

fn recurse(
    g: &InteractionGraph,
    vertices: &[usize],
    lo: usize,
    hi: usize,
    caps: &[usize],
    parts: &mut [usize],
    rng: &mut ChaCha8Rng,
) {
    if hi - lo == 1 || vertices.is_empty() {
        for &v in vertices {
            parts[v] = lo;
        }
        return;
    }
    let mid = lo + (hi - lo) / 2;
    let cap_left: usize = caps[lo..mid].iter().sum();
    let cap_right: usize = caps[mid..hi].iter().sum();
    let n = vertices.len();
    let proportional = (n as f64 * cap_left as f64 / (cap_left + cap_right) as f64).round() as usize;
    let left_size = proportional.clamp(n.saturating_sub(cap_right), cap_left.min(n));

    let mut best: Option<(u64, Vec<bool>)> = None;
    for _ in 0..BISECTION_TRIES {
        let mut order = vertices.to_vec();
        order.shuffle(rng);
        let mut side = vec![false; g.num_qubits()];
        for &v in &order[left_size..] {
            side[v] = true;
        }
        let history = refine_bisection(g, vertices, &mut side, cap_left, cap_right);
        let cut = *history.last().expect("history has the initial cut");
        if best.as_ref().map_or(true, |(c, _)| cut < *c) {
            best = Some((cut, side));
        }
    }
    let (_, side) = best.expect("at least one try");
    let (right, left): (Vec<usize>, Vec<usize>) = vertices.iter().partition(|&&v| side[v]);
    recurse(g, &left, lo, mid, caps, parts, rng);
    recurse(g, &right, mid, hi, caps, parts, rng);
}

/// Cut weight between the two sides restricted to `vertices`.
fn bisection_cut(g: &InteractionGraph, vertices: &[usize], side: &[bool]) -> u64 {
    let mut cut = 0;
    for (i, &u) in vertices.iter().enumerate() {
        for &v in &vertices[i + 1..] {
            if side[u] != side[v] {
                cut += g.weight(u, v);
            }
        }
    }
    cut
}

/// Kernighan-Lin style hill climbing on one bisection. `side[v] == false`
/// means left. Each step applies the single best improving swap or move
/// (ties go to the lowest qubit indices). Returns the cut after every step,
/// starting with the initial cut.
pub(crate) fn refine_bisection(
    g: &InteractionGraph,
    vertices: &[usize],
    side: &mut [bool],
    cap_left: usize,
    cap_right: usize,
) -> Vec<u64> {
    let mut history = vec![bisection_cut(g, vertices, side)];
    loop {
        // D[v] = external - internal weight within this bisection
        let d: Vec<i64> = vertices
            .iter()
            .map(|&u| {
                vertices.iter().fold(0i64, |acc, &v| {
                    let w = g.weight(u, v) as i64;
                    if side[u] != side[v] {
                        acc + w
                    } else {
                        acc - w
                    }
                })
            })
            .collect();
        let right_size = vertices.iter().filter(|&&v| side[v]).count();
        let left_size = vertices.len() - right_size;

        let mut best_gain = 0i64;
        let mut best_op: Option<(usize, Option<usize>)> = None;
        for (i, &u) in vertices.iter().enumerate() {
            let fits = if side[u] {
                left_size < cap_left
            } else {
                right_size < cap_right
            };
            if fits && d[i] > best_gain {
                best_gain = d[i];
                best_op = Some((i, None));
            }
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if side[u] == side[v] {
                    continue;
                }
                let gain = d[i] + d[j] - 2 * g.weight(u, v) as i64;
                if gain > best_gain {
                    best_gain = gain;
                    best_op = Some((i, Some(j)));
                }
            }
        }
        let Some((i, j)) = best_op else {
            return history;
        };
        let u = vertices[i];
        side[u] = !side[u];
        if let Some(j) = j {
            let v = vertices[j];
            side[v] = !side[v];
        }
        let prev = *history.last().expect("non-empty");
        history.push(prev - best_gain as u64);
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GpOptions {
    /// Permute part labels to minimize remote-gate distance on the actual
    /// topology. Off by default: part `p` maps to node `p`.
    pub remap: bool,
}

/// Graph-partitioning baseline with identity part-to-node mapping.
pub fn gp_schedule(lc: &LayeredCircuit, net: &NetworkTopology, seed: u64) -> Result<Schedule> {
    gp_schedule_with(lc, net, seed, GpOptions::default())
}

pub fn gp_schedule_with(
    lc: &LayeredCircuit,
    net: &NetworkTopology,
    seed: u64,
    opts: GpOptions,
) -> Result<Schedule> {
    net.check_capacity(lc.num_qubits())?;
    let g = interaction_graph_layered(lc);
    let mut parts = partition(&g, net.num_nodes(), net.capacities(), seed)?;
    if opts.remap {
        parts = remap_parts(&g, &parts, net);
    }
    Ok(Schedule::constant(&parts, lc.depth()))
}

/// Greedy pairwise relabeling of parts onto nodes, keeping capacities valid.
fn remap_parts(g: &InteractionGraph, parts: &[usize], net: &NetworkTopology) -> Vec<usize> {
    let k = net.num_nodes();
    let mut sizes = vec![0usize; k];
    for &p in parts {
        sizes[p] += 1;
    }
    let weighted = |map: &[usize]| -> u64 {
        let n = g.num_qubits();
        let mut total = 0;
        for i in 0..n {
            for j in i + 1..n {
                let w = g.weight(i, j);
                if w > 0 {
                    total += w * net.dist(map[parts[i]], map[parts[j]]) as u64;
                }
            }
        }
        total
    };
    let mut map: Vec<usize> = (0..k).collect();
    let mut current = weighted(&map);
    loop {
        let mut improved = false;
        for a in 0..k {
            for b in a + 1..k {
                map.swap(a, b);
                let ok = sizes[a] <= net.capacity(map[a]) && sizes[b] <= net.capacity(map[b]);
                let c = weighted(&map);
                if ok && c < current {
                    current = c;
                    improved = true;
                } else {
                    map.swap(a, b);
                }
            }
        }
        if !improved {
            break;
        }
    }
    parts.iter().map(|&p| map[p]).collect()
}

/// Fills node 0 to capacity with qubits 0, 1, ..., then node 1, and so on.
pub fn sequential_placement(num_qubits: usize, net: &NetworkTopology) -> Result<Vec<usize>> {
    net.check_capacity(num_qubits)?;
    Ok(net
        .capacities()
        .iter()
        .enumerate()
        .flat_map(|(node, &cap)| std::iter::repeat(node).take(cap))
        .take(num_qubits)
        .collect())
}

pub fn sequential_schedule(lc: &LayeredCircuit, net: &NetworkTopology) -> Result<Schedule> {
    let placement = sequential_placement(lc.num_qubits(), net)?;
    Ok(Schedule::constant(&placement, lc.depth()))
}

/// Sequential fill with the qubit-to-slot mapping shuffled.
pub fn random_sequential_schedule(
    lc: &LayeredCircuit,
    net: &NetworkTopology,
    seed: u64,
) -> Result<Schedule> {
    let mut placement = sequential_placement(lc.num_qubits(), net)?;
    placement.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok(Schedule::constant(&placement, lc.depth()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::layerize;
    use crate::network::{build_grid, build_star};
    use crate::schedule::{cost, DEFAULT_LAMBDA};

    fn example_circuit() -> Circuit {
        Circuit::from_gates(
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
        )
        .unwrap()
    }

    #[test]
    fn interaction_graph_example() {
        let g = interaction_graph(&example_circuit());
        for (i, j) in [(0, 1), (1, 2), (2, 3), (0, 3)] {
            assert_eq!(g.weight(i, j), 1);
            assert_eq!(g.weight(j, i), 1);
        }
        assert_eq!(g.weight(0, 2), 0);
        assert_eq!(g.weight(1, 3), 0);
        assert_eq!(g.total_weight(), 4);
    }

    #[test]
    fn interaction_graph_orientation_and_empty() {
        let c = Circuit::from_gates(2, vec![Gate::CX(0, 1), Gate::CX(1, 0)]).unwrap();
        assert_eq!(interaction_graph(&c).weight(0, 1), 2);
        let c = Circuit::from_gates(3, vec![Gate::X(0), Gate::SX(2)]).unwrap();
        assert_eq!(interaction_graph(&c).total_weight(), 0);
    }

    #[test]
    fn partition_four_cycle_cuts_two() {
        let g = interaction_graph(&example_circuit());
        for seed in 0..10 {
            let parts = partition(&g, 2, &[2, 2], seed).unwrap();
            assert_eq!(g.cut_weight(&parts), 2);
            assert_eq!(parts.iter().filter(|&&p| p == 0).count(), 2);
        }
    }

    #[test]
    fn partition_disconnected_pairs_and_single_part() {
        let mut g = InteractionGraph::new(4);
        g.add_edge(0, 1, 3);
        g.add_edge(2, 3, 2);
        for seed in 0..10 {
            assert_eq!(g.cut_weight(&partition(&g, 2, &[2, 2], seed).unwrap()), 0);
        }
        let parts = partition(&g, 1, &[4], 0).unwrap();
        assert_eq!(parts, vec![0; 4]);
    }

    #[test]
    fn partition_respects_capacities() {
        let c = crate::circuit::random_circuit(11, 20, 4).unwrap();
        let g = interaction_graph(&c);
        let caps = [3, 1, 4, 2, 2];
        let parts = partition(&g, 5, &caps, 1).unwrap();
        for (p, cap) in caps.iter().enumerate() {
            assert!(parts.iter().filter(|&&x| x == p).count() <= *cap);
        }
        assert!(partition(&g, 2, &[3, 3], 0).is_err());
    }

    #[test]
    fn refinement_is_monotone() {
        let c = crate::circuit::random_circuit(10, 30, 8).unwrap();
        let g = interaction_graph(&c);
        let vertices: Vec<usize> = (0..10).collect();
        let mut side: Vec<bool> = (0..10).map(|v| v % 2 == 0).collect();
        let history = refine_bisection(&g, &vertices, &mut side, 5, 5);
        assert!(history.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(*history.last().unwrap(), g.cut_weight(&side.iter().map(|&s| s as usize).collect::<Vec<_>>()));
    }

    #[test]
    fn gp_example_instance() {
        let lc = layerize(&example_circuit());
        let net = build_grid(1, 2, 2).unwrap();
        let s = gp_schedule(&lc, &net, 0).unwrap();
        let c = cost(&s, &lc, &net, DEFAULT_LAMBDA).unwrap();
        assert_eq!((c.a, c.b, c.c), (2, 0, 0.0));
    }

    #[test]
    fn gp_single_node() {
        let lc = layerize(&example_circuit());
        let net = crate::network::NetworkTopology::uniform(1, &[], 4).unwrap();
        let s = gp_schedule(&lc, &net, 3).unwrap();
        assert!(s.cells().iter().all(|&n| n == 0));
    }

    #[test]
    fn gp_remap_never_worse() {
        let net = build_star(4, 2).unwrap();
        for seed in 0..5 {
            let c = crate::circuit::random_circuit(8, 20, seed).unwrap();
            let lc = layerize(&c);
            let plain = gp_schedule(&lc, &net, seed).unwrap();
            let remapped = gp_schedule_with(&lc, &net, seed, GpOptions { remap: true }).unwrap();
            let a = cost(&plain, &lc, &net, DEFAULT_LAMBDA).unwrap();
            let b = cost(&remapped, &lc, &net, DEFAULT_LAMBDA).unwrap();
            assert!(b.total <= a.total);
            assert_eq!(b.c, 0.0);
        }
    }

    #[test]
    fn sequential_fill() {
        let c = crate::circuit::random_circuit(8, 3, 0).unwrap();
        let lc = layerize(&c);
        let net = build_grid(2, 2, 2).unwrap();
        let s = sequential_schedule(&lc, &net).unwrap();
        let first_col: Vec<_> = s.column(0).collect();
        assert_eq!(first_col, vec![0, 0, 1, 1, 2, 2, 3, 3]);
        assert!(s.is_time_constant());
        assert_eq!(s, sequential_schedule(&lc, &net).unwrap());

        let one = layerize(&Circuit::from_gates(1, vec![Gate::X(0), Gate::X(0)]).unwrap());
        assert_eq!(sequential_schedule(&one, &net).unwrap().cells(), &[0, 0]);
    }

    #[test]
    fn random_sequential_preserves_loads() {
        let c = crate::circuit::random_circuit(7, 3, 0).unwrap();
        let lc = layerize(&c);
        let net = build_grid(2, 2, 2).unwrap();
        let seq = sequential_schedule(&lc, &net).unwrap();
        let loads = |s: &Schedule| {
            let mut l = vec![0; 4];
            for n in s.column(0) {
                l[n] += 1;
            }
            l
        };
        for seed in 0..10 {
            let r = random_sequential_schedule(&lc, &net, seed).unwrap();
            assert_eq!(loads(&r), loads(&seq));
            assert!(r.is_time_constant());
            assert_eq!(r, random_sequential_schedule(&lc, &net, seed).unwrap());
        }
        let single = crate::network::NetworkTopology::uniform(1, &[], 8).unwrap();
        assert_eq!(
            random_sequential_schedule(&lc, &single, 5).unwrap(),
            sequential_schedule(&lc, &single).unwrap()
        );
    }
}
