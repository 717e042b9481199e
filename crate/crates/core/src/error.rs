use crate::trace_io::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: self-contact for node {node}")]
    SelfContact { line: usize, node: NodeId },

    #[error("line {line}: interval start {start} is not before end {end}")]
    EmptyInterval { line: usize, start: f64, end: f64 },

    #[error("line {line}: unbalanced event for pair ({a}, {b}): {message}")]
    UnbalancedEvent {
        line: usize,
        a: NodeId,
        b: NodeId,
        message: &'static str,
    },

    #[error("horizon {horizon} is before the last contact end {last_end}")]
    HorizonTooShort { horizon: f64, last_end: f64 },

    #[error("unknown node id {0}")]
    UnknownNode(NodeId),

    #[error("time {time} outside [0, {horizon}]")]
    TimeOutOfRange { time: f64, horizon: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("trace with < 2 nodes")]
    TooFewNodes,

    #[error("no path between the endpoints")]
    NoPath,

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownName {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }
}
