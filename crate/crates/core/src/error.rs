//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("element {index} references node {node}, but the circuit has {nodes} nodes")]
    DanglingTerminal {
        index: usize,
        node: usize,
        nodes: usize,
    },

    #[error("element {index}: resistance must be positive and finite, got {value}")]
    NonpositiveResistance { index: usize, value: f64 },

    #[error("element {index}: value must be finite, got {value}")]
    NonfiniteValue { index: usize, value: f64 },

    #[error("element {index}: terminals must differ (self-loop at node {node})")]
    SelfLoop { index: usize, node: usize },

    #[error("inconsistent short: inductor path closes a loop across a {voltage} V source (element {index})")]
    InconsistentShort { index: usize, voltage: f64 },

    #[error(
        "inconsistent source loop: voltage sources around nodes {a} and {b} disagree by {mismatch} V"
    )]
    InconsistentSourceLoop { a: usize, b: usize, mismatch: f64 },

    #[error("singular nodal system in the component containing node {node}")]
    SingularSystem { node: usize },

    #[error("loss ratio undefined: loss before the addition is zero (before={loss_before} W, after={loss_after} W)")]
    UndefinedLossRatio { loss_before: f64, loss_after: f64 },

    #[error("bus {bus} is disconnected: at least two lines must be present")]
    DisconnectedBus { bus: usize },

    #[error("singular line network (D = {d})")]
    SingularNetwork { d: f64 },

    #[error("invalid parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("invalid input file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
