//! QPU network topologies with per-node qubit capacities and hop distances.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Default number of qubit slots per QPU.
pub const DEFAULT_CAPACITY: usize = 2;

/// Undirected, connected QPU graph. Distances are precomputed by BFS.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkTopology {
    num_nodes: usize,
    edges: BTreeSet<(usize, usize)>,
    capacities: Vec<usize>,
    dist: Vec<usize>,
}

impl NetworkTopology {
    /// Builds a topology from an edge list. Edges are undirected; duplicates are merged.
    pub fn new(num_nodes: usize, edges: &[(usize, usize)], capacities: Vec<usize>) -> Result<Self> {
        if num_nodes == 0 {
            return Err(Error::InvalidTopology("network needs at least one node".into()));
        }
        if capacities.len() != num_nodes {
            return Err(Error::InvalidTopology(format!(
                "{} capacities given for {num_nodes} nodes",
                capacities.len()
            )));
        }
        if let Some(n) = capacities.iter().position(|&c| c == 0) {
            return Err(Error::InvalidTopology(format!("node {n} has zero capacity")));
        }
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a >= num_nodes || b >= num_nodes {
                return Err(Error::InvalidTopology(format!(
                    "edge ({a}, {b}) references a node outside 0..{num_nodes}"
                )));
            }
            if a == b {
                return Err(Error::InvalidTopology(format!("self-loop on node {a}")));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let edge_vec: Vec<_> = set.iter().copied().collect();
        let dist = all_pairs_hops(&edge_vec, num_nodes)?;
        Ok(NetworkTopology {
            num_nodes,
            edges: set,
            capacities,
            dist,
        })
    }

    /// Same as [`NetworkTopology::new`] with a uniform capacity.
    pub fn uniform(num_nodes: usize, edges: &[(usize, usize)], capacity: usize) -> Result<Self> {
        Self::new(num_nodes, edges, vec![capacity; num_nodes])
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Edges as `(low, high)` pairs in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }

    pub fn capacity(&self, node: usize) -> usize {
        self.capacities[node]
    }

    pub fn total_capacity(&self) -> usize {
        self.capacities.iter().sum()
    }

    /// Hop distance between two nodes.
    #[inline]
    pub fn dist(&self, a: usize, b: usize) -> usize {
        self.dist[a * self.num_nodes + b]
    }

    /// Row-major `num_nodes x num_nodes` distance matrix.
    pub fn dist_matrix(&self) -> &[usize] {
        &self.dist
    }

    pub fn dist_row(&self, a: usize) -> &[usize] {
        &self.dist[a * self.num_nodes..(a + 1) * self.num_nodes]
    }

    /// Fails unless the network can hold `num_qubits` qubits at once.
    pub fn check_capacity(&self, num_qubits: usize) -> Result<()> {
        let capacity = self.total_capacity();
        if capacity < num_qubits {
            return Err(Error::CapacityInfeasible {
                capacity,
                qubits: num_qubits,
            });
        }
        Ok(())
    }

    /// Serializes to the topology text format.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for NetworkTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nodes {}", self.num_nodes)?;
        for (n, c) in self.capacities.iter().enumerate() {
            writeln!(f, "cap {n} {c}")?;
        }
        for (a, b) in &self.edges {
            writeln!(f, "edge {a} {b}")?;
        }
        Ok(())
    }
}

/// Rows×cols 4-neighbor lattice; node id = `row * cols + col`.
pub fn build_grid(rows: usize, cols: usize, capacity: usize) -> Result<NetworkTopology> {
    if rows == 0 || cols == 0 || rows * cols < 2 {
        return Err(Error::InvalidTopology(format!(
            "grid {rows}x{cols} needs at least two nodes"
        )));
    }
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let id = r * cols + c;
            if c + 1 < cols {
                edges.push((id, id + 1));
            }
            if r + 1 < rows {
                edges.push((id, id + cols));
            }
        }
    }
    NetworkTopology::uniform(rows * cols, &edges, capacity)
}

/// Star with hub 0 and leaves `1..num_nodes`.
pub fn build_star(num_nodes: usize, capacity: usize) -> Result<NetworkTopology> {
    if num_nodes < 2 {
        return Err(Error::InvalidTopology(format!(
            "star needs at least two nodes, got {num_nodes}"
        )));
    }
    let edges: Vec<_> = (1..num_nodes).map(|k| (0, k)).collect();
    NetworkTopology::uniform(num_nodes, &edges, capacity)
}

/// BFS from every node. Returns a row-major distance matrix.
pub fn all_pairs_hops(edges: &[(usize, usize)], num_nodes: usize) -> Result<Vec<usize>> {
    let mut adj = vec![Vec::new(); num_nodes];
    for &(a, b) in edges {
        if a >= num_nodes || b >= num_nodes {
            return Err(Error::InvalidTopology(format!(
                "edge ({a}, {b}) references a node outside 0..{num_nodes}"
            )));
        }
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut dist = vec![usize::MAX; num_nodes * num_nodes];
    let mut queue = VecDeque::new();
    for src in 0..num_nodes {
        let row = &mut dist[src * num_nodes..(src + 1) * num_nodes];
        row[src] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if row[v] == usize::MAX {
                    row[v] = row[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if let Some(unreached) = row.iter().position(|&d| d == usize::MAX) {
            return Err(Error::Disconnected(unreached));
        }
    }
    Ok(dist)
}

/// Parses the topology text format: `nodes <N>`, `cap <node> <k>`, `edge <a> <b>`.
/// Every node needs a `cap` line.
pub fn parse_topology(text: &str) -> Result<NetworkTopology> {
    let mut num_nodes: Option<usize> = None;
    let mut caps: Vec<Option<usize>> = Vec::new();
    let mut edges = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let code = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = code.split_whitespace().collect();
        let Some(&head) = toks.first() else {
            continue;
        };
        let nums = toks[1..]
            .iter()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::parse(line, 1, format!("expected an integer, found `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        match (head, nums.as_slice()) {
            ("nodes", &[n]) => {
                if num_nodes.is_some() {
                    return Err(Error::parse(line, 1, "duplicate `nodes` declaration"));
                }
                if n == 0 {
                    return Err(Error::parse(line, 1, "node count must be positive"));
                }
                num_nodes = Some(n);
                caps = vec![None; n];
            }
            ("cap", &[node, k]) => {
                let n = num_nodes.ok_or_else(|| Error::parse(line, 1, "`cap` before `nodes`"))?;
                if node >= n {
                    return Err(Error::parse(line, 1, format!("node {node} out of range")));
                }
                caps[node] = Some(k);
            }
            ("edge", &[a, b]) => {
                if num_nodes.is_none() {
                    return Err(Error::parse(line, 1, "`edge` before `nodes`"));
                }
                edges.push((a, b));
            }
            ("nodes" | "cap" | "edge", _) => {
                return Err(Error::parse(line, 1, format!("wrong operand count for `{head}`")));
            }
            _ => return Err(Error::parse(line, 1, format!("unknown directive `{head}`"))),
        }
    }

    let n = num_nodes.ok_or_else(|| Error::parse(1, 1, "missing `nodes <N>` declaration"))?;
    let capacities = caps
        .into_iter()
        .enumerate()
        .map(|(node, c)| {
            c.ok_or_else(|| Error::InvalidTopology(format!("node {node} has no `cap` line")))
        })
        .collect::<Result<Vec<_>>>()?;
    NetworkTopology::new(n, &edges, capacities)
}

/// Topology selector used by the CLI and experiment configs:
/// `grid:RxC`, `star:N`, or a path to a topology file (optionally prefixed `file:`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TopologySpec {
    Grid { rows: usize, cols: usize },
    Star { nodes: usize },
    File(String),
}

impl TopologySpec {
    /// Builds the topology. `capacity` applies to grid and star; files carry their own.
    pub fn build(&self, capacity: usize) -> Result<NetworkTopology> {
        match self {
            TopologySpec::Grid { rows, cols } => build_grid(*rows, *cols, capacity),
            TopologySpec::Star { nodes } => build_star(*nodes, capacity),
            TopologySpec::File(path) => parse_topology(&std::fs::read_to_string(Path::new(path))?),
        }
    }

    /// Short identifier used in report rows.
    pub fn id(&self) -> String {
        match self {
            TopologySpec::Grid { rows, cols } => format!("grid{rows}x{cols}"),
            TopologySpec::Star { nodes } => format!("star{nodes}"),
            TopologySpec::File(path) => Path::new(path)
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.clone()),
        }
    }
}

impl FromStr for TopologySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad topology spec `{s}` (want grid:RxC, star:N or a file)"));
        if let Some(rest) = s.strip_prefix("grid:") {
            let (r, c) = rest.split_once(['x', 'X']).ok_or_else(bad)?;
            Ok(TopologySpec::Grid {
                rows: r.trim().parse().map_err(|_| bad())?,
                cols: c.trim().parse().map_err(|_| bad())?,
            })
        } else if let Some(rest) = s.strip_prefix("star:") {
            Ok(TopologySpec::Star {
                nodes: rest.trim().parse().map_err(|_| bad())?,
            })
        } else if let Some(rest) = s.strip_prefix("file:") {
            Ok(TopologySpec::File(rest.to_string()))
        } else if s.is_empty() {
            Err(bad())
        } else if s
            .split_once(':')
            .is_some_and(|(scheme, _)| scheme.len() > 1 && scheme.chars().all(|c| c.is_ascii_alphabetic()))
        {
            Err(bad())
        } else {
            Ok(TopologySpec::File(s.to_string()))
        }
    }
}

impl fmt::Display for TopologySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologySpec::Grid { rows, cols } => write!(f, "grid:{rows}x{cols}"),
            TopologySpec::Star { nodes } => write!(f, "star:{nodes}"),
            TopologySpec::File(p) => write!(f, "file:{p}"),
        }
    }
}
