//! Time-aware qubit assignment for distributed quantum computing.
//!
//! A circuit is split into ASAP layers and every qubit gets a node per
//! layer. The cost of such a schedule counts remote CX gates, qubit moves
//! between layers, and capacity violations. Schedulers:
//!
//! - [`anneal::anneal`], simulated annealing over schedule matrices
//! - [`evolve::evolve`], an evolutionary algorithm with row/column crossover
//! - [`baselines::gp_schedule`], static recursive graph partitioning
//!
//! [`qco::qco_evolve`] rewrites the circuit itself, trading statevector
//! fidelity for lower communication cost. [`bench`] runs whole grids of
//! experiments.
//!
//! ```
//! use dqcopt::circuit::{layerize, random_circuit};
//! use dqcopt::network::build_grid;
//! use dqcopt::baselines::gp_schedule;
//! use dqcopt::schedule::{cost, DEFAULT_LAMBDA};
//!
//! let c = random_circuit(8, 10, 7).unwrap();
//! let lc = layerize(&c);
//! let net = build_grid(2, 2, 2).unwrap();
//! let s = gp_schedule(&lc, &net, 0).unwrap();
//! let b = cost(&s, &lc, &net, DEFAULT_LAMBDA).unwrap();
//! assert_eq!(b.b, 0);
//! ```

pub mod anneal;
pub mod baselines;
pub mod bench;
pub mod circuit;
pub mod error;
pub mod evolve;
pub mod moves;
pub mod network;
pub mod qco;
pub mod schedule;
pub mod statevector;

pub use circuit::{layerize, parse_circuit, random_circuit, Circuit, Gate, GateKind, LayeredCircuit};
pub use error::{Error, Result};
pub use network::{build_grid, build_star, parse_topology, NetworkTopology, TopologySpec};
pub use schedule::{cost, CostBreakdown, CostModel, Schedule};
