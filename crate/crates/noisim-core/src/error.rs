//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by circuit construction, transpilation, noise-model
/// assembly, simulation and fitting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("no decomposition of gate `{gate}` into gateset {gateset:?}")]
    UnknownDecomposition { gate: String, gateset: Vec<String> },

    #[error("topology has no path between physical qubits {0} and {1}")]
    DisconnectedTopology(usize, usize),

    #[error("no duration in device snapshot for gate `{gate}` on qubits {qubits:?}")]
    MissingDuration { gate: String, qubits: Vec<usize> },

    #[error("no calibration in device snapshot for {0}")]
    MissingCalibration(String),

    #[error("invalid GHZ triplet: {0}")]
    InvalidTriplet(String),

    #[error("register of {qubits} qubits exceeds the configured limit of {limit}")]
    RegisterTooLarge { qubits: usize, limit: usize },

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("distribution dimensions do not match: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("all states share the same energy; the fit condition is degenerate")]
    DegenerateSpectrum,

    #[error("empirical mean energy {mean} lies outside the open spectrum range ({min}, {max})")]
    OutOfRange { mean: f64, min: f64, max: f64 },

    #[error("optimizer did not converge within {0} iterations")]
    NonConvergence(usize),

    #[error("gain ratio denominator is non-positive: noiseless p-tilde {p_tilde} <= uniform {uniform}")]
    DenominatorNonpositive { p_tilde: f64, uniform: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
