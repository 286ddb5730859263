//! Circuit representation over the `{X, SX, RZ, CX}` gate set.
//!
//! A [`Circuit`] is a program-ordered gate list. [`layerize`] decomposes it
//! into ASAP time steps: every gate lands in the first layer after the last
//! layer touching any of its qubits. The resulting [`LayeredCircuit`] is the
//! time axis that schedules are indexed by.
//!
//! The text format is one construct per line:
//!
//! ```text
//! # comment
//! qubits 3
//! x 0
//! sx 1
//! rz 2 1.5707963267948966
//! cx 0 2
//! ```

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    X,
    SX,
    RZ,
    CX,
}

impl GateKind {
    pub const ALL: [GateKind; 4] = [GateKind::X, GateKind::SX, GateKind::RZ, GateKind::CX];
    pub const SINGLE_QUBIT: [GateKind; 3] = [GateKind::X, GateKind::SX, GateKind::RZ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::SX => "sx",
            GateKind::RZ => "rz",
            GateKind::CX => "cx",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::CX => 2,
            _ => 1,
        }
    }
}

impl FromStr for GateKind {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s {
            "x" => Ok(GateKind::X),
            "sx" => Ok(GateKind::SX),
            "rz" => Ok(GateKind::RZ),
            "cx" => Ok(GateKind::CX),
            _ => Err(()),
        }
    }
}

/// One gate. For `CX` the control comes first. `RZ` carries its angle in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    X(usize),
    SX(usize),
    RZ(usize, f64),
    CX(usize, usize),
}

impl Gate {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::X(_) => GateKind::X,
            Gate::SX(_) => GateKind::SX,
            Gate::RZ(..) => GateKind::RZ,
            Gate::CX(..) => GateKind::CX,
        }
    }

    /// Qubit operands, control first for `CX`.
    pub fn qubits(&self) -> impl Iterator<Item = usize> {
        let (first, second) = match *self {
            Gate::X(q) | Gate::SX(q) | Gate::RZ(q, _) => (q, None),
            Gate::CX(c, t) => (c, Some(t)),
        };
        std::iter::once(first).chain(second)
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::RZ(_, theta) => Some(theta),
            _ => None,
        }
    }

    pub fn is_cx(&self) -> bool {
        matches!(self, Gate::CX(..))
    }

    /// Checks the gate invariants against a register of `num_qubits`.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        for q in self.qubits() {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange {
                    index: q,
                    num_qubits,
                });
            }
        }
        match *self {
            Gate::CX(c, t) if c == t => Err(Error::InvalidGate(format!(
                "cx needs two distinct qubits, got {c} twice"
            ))),
            Gate::RZ(_, theta) if !theta.is_finite() => {
                Err(Error::InvalidGate(format!("non-finite rz angle {theta}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::X(q) => write!(f, "x {q}"),
            Gate::SX(q) => write!(f, "sx {q}"),
            // 17 significant digits round-trip every f64.
            Gate::RZ(q, theta) => write!(f, "rz {q} {theta:.16e}"),
            Gate::CX(c, t) => write!(f, "cx {c} {t}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            gates: Vec::new(),
        }
    }

    /// Builds a circuit, validating every gate against the register size.
    pub fn from_gates(num_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidGate("circuit needs at least one qubit".into()));
        }
        for g in &gates {
            g.validate(num_qubits)?;
        }
        Ok(Circuit { num_qubits, gates })
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn into_gates(self) -> Vec<Gate> {
        self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn cx_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_cx()).count()
    }

    /// Serializes to the line-based text format.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.num_qubits)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for Circuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_circuit(s)
    }
}

/// Splits a line into whitespace-separated tokens with 1-based columns,
/// dropping everything from the first `#`.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let code = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in code.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &code[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &code[s..]));
    }
    out
}

fn parse_index(line: usize, (col, tok): (usize, &str)) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| Error::parse(line, col, format!("expected a non-negative integer, found `{tok}`")))
}

/// Parses the circuit text format. Gates keep file order.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks = tokens(raw);
        let Some(&(col, head)) = toks.first() else {
            continue;
        };

        if head == "qubits" {
            if circuit.is_some() {
                return Err(Error::parse(line, col, "duplicate `qubits` declaration"));
            }
            if toks.len() != 2 {
                return Err(Error::parse(line, col, "expected `qubits <N>`"));
            }
            let n = parse_index(line, toks[1])?;
            if n == 0 {
                return Err(Error::parse(line, toks[1].0, "qubit count must be positive"));
            }
            circuit = Some(Circuit::new(n));
            continue;
        }

        let Some(c) = circuit.as_mut() else {
            return Err(Error::parse(line, col, "expected `qubits <N>` before any gate"));
        };
        let kind: GateKind = head
            .parse()
            .map_err(|_| Error::parse(line, col, format!("unknown gate `{head}`")))?;

        let operands = &toks[1..];
        let expected = kind.arity() + usize::from(kind == GateKind::RZ);
        if operands.len() != expected {
            let what = match (kind, operands.len()) {
                (GateKind::RZ, n) if n == 1 => "rz is missing its angle".to_string(),
                (GateKind::RZ, _) => "expected `rz <q> <angle>`".to_string(),
                (k, n) if n == k.arity() + 1 && k != GateKind::CX => {
                    format!("{} takes no angle", k.name())
                }
                (k, n) => format!(
                    "{} expects {} qubit operand(s), found {} token(s)",
                    k.name(),
                    k.arity(),
                    n
                ),
            };
            let at = operands.get(expected).map_or(col, |t| t.0);
            return Err(Error::parse(line, at, what));
        }

        let gate = match kind {
            GateKind::X => Gate::X(parse_index(line, operands[0])?),
            GateKind::SX => Gate::SX(parse_index(line, operands[0])?),
            GateKind::RZ => {
                let q = parse_index(line, operands[0])?;
                let (acol, atok) = operands[1];
                let theta: f64 = atok
                    .parse()
                    .map_err(|_| Error::parse(line, acol, format!("invalid angle `{atok}`")))?;
                if !theta.is_finite() {
                    return Err(Error::parse(line, acol, "angle must be finite"));
                }
                Gate::RZ(q, theta)
            }
            GateKind::CX => Gate::CX(
                parse_index(line, operands[0])?,
                parse_index(line, operands[1])?,
            ),
        };

        for (q, (qcol, _)) in gate.qubits().zip(operands.iter()) {
            if q >= c.num_qubits {
                return Err(Error::parse(
                    line,
                    *qcol,
                    format!("qubit index {q} out of range for {} qubits", c.num_qubits),
                ));
            }
        }
        if let Gate::CX(a, b) = gate {
            if a == b {
                return Err(Error::parse(line, operands[1].0, "cx control and target must differ"));
            }
        }
        c.gates.push(gate);
    }

    circuit.ok_or_else(|| Error::parse(1, 1, "missing `qubits <N>` declaration"))
}

/// A circuit decomposed into time steps. No two gates in a layer share a qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct LayeredCircuit {
    num_qubits: usize,
    layers: Vec<Vec<Gate>>,
}

impl LayeredCircuit {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    /// Number of time steps `T`.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Per-layer `(control, target)` pairs of the CX gates.
    pub fn cx_pairs_per_layer(&self) -> Vec<Vec<(usize, usize)>> {
        cx_pairs_per_layer(self)
    }

    /// Flattens back into a program-ordered circuit.
    pub fn flatten(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            gates: self.layers.iter().flatten().copied().collect(),
        }
    }
}

/// ASAP layering.
pub fn layerize(c: &Circuit) -> LayeredCircuit {
    // next_free[q] = first layer index strictly after the last gate on q
    let mut next_free = vec![0usize; c.num_qubits];
    let mut layers: Vec<Vec<Gate>> = Vec::new();
    for g in &c.gates {
        let layer = g.qubits().map(|q| next_free[q]).max().unwrap_or(0);
        if layer == layers.len() {
            layers.push(Vec::new());
        }
        layers[layer].push(*g);
        for q in g.qubits() {
            next_free[q] = layer + 1;
        }
    }
    LayeredCircuit {
        num_qubits: c.num_qubits,
        layers,
    }
}

pub fn cx_pairs_per_layer(lc: &LayeredCircuit) -> Vec<Vec<(usize, usize)>> {
    lc.layers
        .iter()
        .map(|layer| {
            layer
                .iter()
                .filter_map(|g| match *g {
                    Gate::CX(c, t) => Some((c, t)),
                    _ => None,
                })
                .collect()
        })
        .collect()
}

pub const DEFAULT_P_CX: f64 = 0.5;

/// Random circuit of exactly `target_depth` ASAP layers with the default CX density.
pub fn random_circuit(num_qubits: usize, target_depth: usize, seed: u64) -> Result<Circuit> {
    random_circuit_with(num_qubits, target_depth, DEFAULT_P_CX, seed)
}

/// Every qubit receives a gate in every layer: free qubits are visited in a
/// shuffled order and paired into a CX with probability `p_cx`, otherwise get
/// a uniform single-qubit gate. Because each qubit is busy in every layer the
/// ASAP depth equals `target_depth`.
pub fn random_circuit_with(
    num_qubits: usize,
    target_depth: usize,
    p_cx: f64,
    seed: u64,
) -> Result<Circuit> {
    if num_qubits < 2 {
        return Err(Error::InvalidParams(format!(
            "random circuits need at least 2 qubits, got {num_qubits}"
        )));
    }
    if target_depth == 0 {
        return Err(Error::InvalidParams("target depth must be positive".into()));
    }
    if !(0.0..=1.0).contains(&p_cx) {
        return Err(Error::InvalidParams(format!("p_cx must lie in [0, 1], got {p_cx}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gates = Vec::with_capacity(num_qubits * target_depth);
    let mut free: Vec<usize> = Vec::with_capacity(num_qubits);
    for _ in 0..target_depth {
        free.clear();
        free.extend(0..num_qubits);
        free.shuffle(&mut rng);
        while let Some(q) = free.pop() {
            if !free.is_empty() && rng.gen_bool(p_cx) {
                let partner = free.pop().expect("non-empty");
                gates.push(Gate::CX(q, partner));
            } else {
                gates.push(random_single_qubit_gate(q, &mut rng));
            }
        }
    }
    Ok(Circuit { num_qubits, gates })
}

pub(crate) fn random_single_qubit_gate<R: Rng + ?Sized>(q: usize, rng: &mut R) -> Gate {
    match rng.gen_range(0..3) {
        0 => Gate::X(q),
        1 => Gate::SX(q),
        _ => Gate::RZ(q, rng.gen_range(0.0..std::f64::consts::TAU)),
    }
}
