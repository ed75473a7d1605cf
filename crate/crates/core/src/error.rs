//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    /// A matrix or vector was constructed with a zero dimension, or an
    /// operation that requires non-empty operands received one.
    #[error("dimension must be positive")]
    EmptyMatrix,

    /// A 1-based index fell outside its admissible range.
    #[error("{what}: index {index} out of range 1..={bound}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },

    /// Two operands had incompatible shapes.
    #[error("{context}: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    DimensionMismatch {
        context: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    /// A square matrix was required.
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },

    /// A Boolean matrix could not be reinterpreted as a logical matrix.
    #[error("column {col} of the Boolean matrix has {ones} ones, not exactly one")]
    NotLogical { col: usize, ones: usize },

    /// An experiment's state/input/output sequences have inconsistent lengths.
    #[error("experiment has {states} states, {inputs} inputs, outputs {outputs:?}; need |states| = |inputs| + 1 = |outputs| + 1")]
    TraceLengthMismatch {
        states: usize,
        inputs: usize,
        outputs: Option<usize>,
    },

    /// A data set needs at least one experiment, each with at least one step.
    #[error("a data set needs at least one experiment with at least one transition")]
    EmptyData,

    /// Some experiments record outputs and others do not.
    #[error("experiments mix output-recorded and output-free traces")]
    MixedOutputs,

    /// The recorded transitions cannot come from one deterministic network.
    #[error("inconsistent data: state {state} under input {input} maps to both {first} and {second}")]
    InconsistentData {
        state: usize,
        input: usize,
        first: usize,
        second: usize,
    },

    /// The recorded outputs cannot come from one output map.
    #[error("inconsistent data: state {state} emits both output {first} and output {second}")]
    InconsistentOutputs {
        state: usize,
        first: usize,
        second: usize,
    },

    /// Identification was requested but the data do not pin down the model.
    #[error("data are not informative for identifiability")]
    NotInformative,

    /// An output-based analysis was requested on output-free data.
    #[error("operation needs recorded outputs, but the data set has none")]
    MissingOutputs,

    /// A target state set was empty.
    #[error("target set must be non-empty")]
    EmptyTarget,

    /// Safe control with an unsafe set covering every state.
    #[error("unsafe set must leave at least one safe state")]
    EmptySafeSet,

    /// Simple-cycle enumeration hit the configured cap.
    #[error("cycle enumeration exceeded the cap of {cap} cycles")]
    CapExceeded { cap: usize },

    /// Malformed JSON input.
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}
