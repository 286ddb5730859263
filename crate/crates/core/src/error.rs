use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("network is disconnected: node {0} is unreachable from node 0")]
    Disconnected(usize),

    #[error("schedule is {got_rows}x{got_cols} but the circuit needs {want_rows}x{want_cols}")]
    DimensionMismatch {
        got_rows: usize,
        got_cols: usize,
        want_rows: usize,
        want_cols: usize,
    },

    #[error("total capacity {capacity} cannot hold {qubits} qubits")]
    CapacityInfeasible { capacity: usize, qubits: usize },

    #[error("instance too large for exhaustive search: {0}")]
    InstanceTooLarge(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{num_qubits} qubits exceeds the simulator cap of {cap}")]
    SimulatorCap { num_qubits: usize, cap: usize },

    #[error("qubit count mismatch: {0} vs {1}")]
    QubitCountMismatch(usize, usize),

    #[error("circuit is already communication-free (u = 0), nothing to optimize")]
    CommunicationFree,

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
