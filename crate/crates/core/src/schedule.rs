//! Qubit schedules and the communication cost `f = A + B + C`.
//!
//! A [`Schedule`] stores, for every qubit `q` and time step `t`, the QPU the
//! qubit sits on. Its cost has three parts:
//!
//! * `A`: for every CX in layer `t`, the hop distance between the nodes of its
//!   control and target at `t` (remote-gate cost).
//! * `B`: for every qubit and consecutive pair of steps `t, t+1`, the hop
//!   distance it moves (teleportation cost).
//! * `C`: `lambda` for every `(node, step)` whose load exceeds the node's capacity.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circuit::LayeredCircuit;
use crate::error::{Error, Result};
use crate::network::NetworkTopology;

/// Default capacity-violation penalty.
pub const DEFAULT_LAMBDA: f64 = 100.0;

/// Default enumeration bound for [`brute_force_optimum`].
pub const DEFAULT_ENUMERATION_BOUND: u64 = 1 << 20;

/// `Q x T` matrix of node indices, stored row-major (one row per qubit).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Schedule {
    num_qubits: usize,
    depth: usize,
    cells: Vec<usize>,
}

impl Schedule {
    pub fn filled(num_qubits: usize, depth: usize, node: usize) -> Self {
        Schedule {
            num_qubits,
            depth,
            cells: vec![node; num_qubits * depth],
        }
    }

    /// Time-constant schedule: qubit `q` stays on `placement[q]` for all `depth` steps.
    pub fn constant(placement: &[usize], depth: usize) -> Self {
        let cells = placement
            .iter()
            .flat_map(|&n| std::iter::repeat(n).take(depth))
            .collect();
        Schedule {
            num_qubits: placement.len(),
            depth,
            cells,
        }
    }

    pub fn from_rows(rows: Vec<Vec<usize>>) -> Result<Self> {
        let depth = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != depth) {
            return Err(Error::InvalidParams(format!(
                "schedule row {bad} has {} entries, expected {depth}",
                rows[bad].len()
            )));
        }
        Ok(Schedule {
            num_qubits: rows.len(),
            depth,
            cells: rows.into_iter().flatten().collect(),
        })
    }

    pub(crate) fn from_cells(num_qubits: usize, depth: usize, cells: Vec<usize>) -> Self {
        debug_assert_eq!(cells.len(), num_qubits * depth);
        Schedule {
            num_qubits,
            depth,
            cells,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Number of time steps `T`.
    pub fn depth(&self) -> usize {
        self.depth
    }

    #[inline]
    pub fn get(&self, qubit: usize, t: usize) -> usize {
        self.cells[qubit * self.depth + t]
    }

    #[inline]
    pub fn set(&mut self, qubit: usize, t: usize, node: usize) {
        self.cells[qubit * self.depth + t] = node;
    }

    pub fn row(&self, qubit: usize) -> &[usize] {
        &self.cells[qubit * self.depth..(qubit + 1) * self.depth]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[usize]> {
        (0..self.num_qubits).map(move |q| self.row(q))
    }

    pub fn column(&self, t: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_qubits).map(move |q| self.get(q, t))
    }

    /// Flattened row-major cells.
    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub(crate) fn cells_mut(&mut self) -> &mut [usize] {
        &mut self.cells
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for t in 0..self.depth {
            self.cells.swap(a * self.depth + t, b * self.depth + t);
        }
    }

    pub fn swap_columns(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for q in 0..self.num_qubits {
            self.cells.swap(q * self.depth + a, q * self.depth + b);
        }
    }

    /// True when every row is constant (no qubit ever moves).
    pub fn is_time_constant(&self) -> bool {
        self.rows().all(|r| r.windows(2).all(|w| w[0] == w[1]))
    }

    /// Every entry must name an existing node.
    pub fn validate(&self, num_nodes: usize) -> Result<()> {
        match self.cells.iter().position(|&n| n >= num_nodes) {
            Some(i) => Err(Error::InvalidParams(format!(
                "schedule entry ({}, {}) = {} but the network has {num_nodes} nodes",
                i / self.depth.max(1),
                i % self.depth.max(1),
                self.cells[i]
            ))),
            None => Ok(()),
        }
    }

    /// CSV with header `t0,t1,...` and one row per qubit.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record((0..self.depth).map(|t| format!("t{t}")))?;
        for row in self.rows() {
            w.write_record(row.iter().map(usize::to_string))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = r.headers()?.clone();
        for (t, h) in header.iter().enumerate() {
            if h != format!("t{t}") {
                return Err(Error::parse(1, t + 1, format!("expected header `t{t}`, found `{h}`")));
            }
        }
        let depth = header.len();
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .enumerate()
                .map(|(t, v)| {
                    v.parse::<usize>()
                        .map_err(|_| Error::parse(i + 2, t + 1, format!("invalid node index `{v}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != depth {
                return Err(Error::parse(i + 2, 1, format!("expected {depth} columns, found {}", row.len())));
            }
            rows.push(row);
        }
        Ok(Schedule {
            num_qubits: rows.len(),
            depth,
            cells: rows.into_iter().flatten().collect(),
        })
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, row) in self.rows().enumerate() {
            write!(f, "q{q}:")?;
            for n in row {
                write!(f, " {n}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    /// Remote-gate distance sum.
    pub a: u64,
    /// Teleportation distance sum.
    pub b: u64,
    /// Capacity penalty sum.
    pub c: f64,
    pub total: f64,
}

impl CostBreakdown {
    fn new(a: u64, b: u64, c: f64) -> Self {
        CostBreakdown {
            a,
            b,
            c,
            total: a as f64 + b as f64 + c,
        }
    }
}

impl fmt::Display for CostBreakdown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A={} B={} C={} total={}", self.a, self.b, self.c, self.total)
    }
}

/// Precomputed cost evaluator for one (circuit, network) instance.
///
/// Optimizers evaluate millions of schedules against the same instance, so
/// the per-layer CX pairs are extracted once here.
#[derive(Clone, Debug)]
pub struct CostModel<'a> {
    net: &'a NetworkTopology,
    cx: Vec<Vec<(usize, usize)>>,
    num_qubits: usize,
    lambda: f64,
}

impl<'a> CostModel<'a> {
    pub fn new(lc: &LayeredCircuit, net: &'a NetworkTopology, lambda: f64) -> Self {
        CostModel {
            net,
            cx: lc.cx_pairs_per_layer(),
            num_qubits: lc.num_qubits(),
            lambda,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn depth(&self) -> usize {
        self.cx.len()
    }

    pub fn network(&self) -> &'a NetworkTopology {
        self.net
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn check_dimensions(&self, s: &Schedule) -> Result<()> {
        if s.num_qubits() != self.num_qubits || s.depth() != self.depth() {
            return Err(Error::DimensionMismatch {
                got_rows: s.num_qubits(),
                got_cols: s.depth(),
                want_rows: self.num_qubits,
                want_cols: self.depth(),
            });
        }
        Ok(())
    }

    /// Evaluates `s`. Dimensions and entries must already be valid.
    pub fn evaluate(&self, s: &Schedule) -> CostBreakdown {
        let depth = self.depth();
        let net = self.net;

        let mut a = 0u64;
        for (t, pairs) in self.cx.iter().enumerate() {
            for &(i, j) in pairs {
                a += net.dist(s.get(i, t), s.get(j, t)) as u64;
            }
        }

        let mut b = 0u64;
        for row in s.rows() {
            for w in row.windows(2) {
                b += net.dist(w[0], w[1]) as u64;
            }
        }

        let mut violations = 0u64;
        let mut load = vec![0usize; net.num_nodes()];
        for t in 0..depth {
            load.iter_mut().for_each(|l| *l = 0);
            for n in s.column(t) {
                load[n] += 1;
            }
            violations += load
                .iter()
                .zip(net.capacities())
                .filter(|(l, c)| l > c)
                .count() as u64;
        }

        CostBreakdown::new(a, b, violations as f64 * self.lambda)
    }

    pub fn total(&self, s: &Schedule) -> f64 {
        self.evaluate(s).total
    }
}

/// Communication cost of `s` for the layered circuit on `net`.
pub fn cost(
    s: &Schedule,
    lc: &LayeredCircuit,
    net: &NetworkTopology,
    lambda: f64,
) -> Result<CostBreakdown> {
    let model = CostModel::new(lc, net, lambda);
    model.check_dimensions(s)?;
    s.validate(net.num_nodes())?;
    Ok(model.evaluate(s))
}

/// Exhaustive search with the default enumeration bound.
pub fn brute_force_optimum(
    lc: &LayeredCircuit,
    net: &NetworkTopology,
    lambda: f64,
) -> Result<(Schedule, CostBreakdown)> {
    brute_force_optimum_bounded(lc, net, lambda, DEFAULT_ENUMERATION_BOUND)
}

/// Enumerates all `N^(Q*T)` schedules in lexicographic order of the flattened
/// matrix and returns the first one of minimum cost.
pub fn brute_force_optimum_bounded(
    lc: &LayeredCircuit,
    net: &NetworkTopology,
    lambda: f64,
    bound: u64,
) -> Result<(Schedule, CostBreakdown)> {
    let q = lc.num_qubits();
    let t = lc.depth();
    let cells = q * t;
    let n = net.num_nodes() as u64;
    let count = u32::try_from(cells)
        .ok()
        .and_then(|c| n.checked_pow(c))
        .filter(|&c| c <= bound)
        .ok_or_else(|| {
            Error::InstanceTooLarge(format!(
                "{n}^{cells} schedules exceeds the enumeration bound {bound}"
            ))
        })?;

    let model = CostModel::new(lc, net, lambda);
    let mut current = Schedule::filled(q, t, 0);
    let mut best = current.clone();
    let mut best_cost = model.evaluate(&current);

    for _ in 1..count {
        // odometer increment, last cell least significant
        for cell in current.cells_mut().iter_mut().rev() {
            *cell += 1;
            if (*cell as u64) < n {
                break;
            }
            *cell = 0;
        }
        let c = model.evaluate(&current);
        if c.total < best_cost.total {
            best_cost = c;
            best.clone_from(&current);
        }
    }
    Ok((best, best_cost))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{layerize, Circuit, Gate};
    use crate::network::{build_grid, NetworkTopology};

    fn path2() -> NetworkTopology {
        build_grid(1, 2, 2).unwrap()
    }

    fn example_layered() -> LayeredCircuit {
        let c = Circuit::from_gates(
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
        .unwrap();
        layerize(&c)
    }

    fn published_schedule() -> Schedule {
        Schedule::from_rows(vec![
            vec![0, 0, 0, 0],
            vec![0, 1, 0, 1],
            vec![1, 1, 1, 1],
            vec![1, 0, 1, 0],
        ])
        .unwrap()
    }

    #[test]
    fn published_schedule_cost() {
        let c = cost(&published_schedule(), &example_layered(), &path2(), DEFAULT_LAMBDA).unwrap();
        assert_eq!((c.a, c.b, c.c, c.total), (0, 6, 0.0, 6.0));
    }

    #[test]
    fn static_split_cost() {
        // CX(1,2) at t1 and CX(0,3) at t3 both cross the split.
        let s = Schedule::constant(&[0, 0, 1, 1], 4);
        let c = cost(&s, &example_layered(), &path2(), DEFAULT_LAMBDA).unwrap();
        assert_eq!((c.a, c.b, c.c, c.total), (2, 0, 0.0, 2.0));
    }

    #[test]
    fn capacity_penalty_is_flat() {
        let c = Circuit::from_gates(3, vec![Gate::X(0), Gate::X(1), Gate::X(2)]).unwrap();
        let lc = layerize(&c);
        let s = Schedule::constant(&[0, 0, 0], 1);
        let b = cost(&s, &lc, &path2(), DEFAULT_LAMBDA).unwrap();
        assert_eq!(b.total, 100.0);
        assert_eq!(b.c, 100.0);
    }

    #[test]
    fn dimension_mismatch() {
        let s = Schedule::filled(4, 3, 0);
        assert!(matches!(
            cost(&s, &example_layered(), &path2(), DEFAULT_LAMBDA),
            Err(Error::DimensionMismatch { .. })
        ));
        let s = Schedule::filled(4, 4, 2);
        assert!(cost(&s, &example_layered(), &path2(), DEFAULT_LAMBDA).is_err());
    }

    #[test]
    fn brute_force_trivial_cases() {
        let one = layerize(&Circuit::from_gates(1, vec![Gate::X(0), Gate::SX(0), Gate::X(0)]).unwrap());
        let (_, c) = brute_force_optimum(&one, &path2(), DEFAULT_LAMBDA).unwrap();
        assert_eq!(c.total, 0.0);

        let cx = layerize(&Circuit::from_gates(2, vec![Gate::CX(0, 1)]).unwrap());
        let (s, c) = brute_force_optimum(&cx, &path2(), DEFAULT_LAMBDA).unwrap();
        assert_eq!(c.total, 0.0);
        assert_eq!(s.cells(), &[0, 0]);
    }

    #[test]
    fn brute_force_example_instance() {
        let lc = example_layered();
        let (s, c) = brute_force_optimum(&lc, &path2(), DEFAULT_LAMBDA).unwrap();
        assert_eq!(c.total, 2.0);
        assert_eq!(cost(&s, &lc, &path2(), DEFAULT_LAMBDA).unwrap(), c);
    }

    #[test]
    fn brute_force_bound() {
        let lc = example_layered();
        assert!(matches!(
            brute_force_optimum_bounded(&lc, &path2(), DEFAULT_LAMBDA, 1000),
            Err(Error::InstanceTooLarge(_))
        ));
    }

    #[test]
    fn csv_round_trip_and_header() {
        let s = published_schedule();
        let text = s.to_csv().unwrap();
        assert!(text.starts_with("t0,t1,t2,t3\n0,0,0,0\n"));
        assert_eq!(Schedule::from_csv(&text).unwrap(), s);
        assert!(Schedule::from_csv("a,b\n0,1\n").is_err());
        assert!(Schedule::from_csv("t0,t1\n0,x\n").is_err());
    }
}
