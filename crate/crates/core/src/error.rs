use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid surface size: M must be at least 1")]
    InvalidSize,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("hardware mode does not support this operation: {0}")]
    UnsupportedHardware(String),

    #[error("shared-pair hardware requires a symmetric permutation")]
    InvalidHardware,

    /// The forward and reverse optimal phases of an element are antipodal,
    /// so their normalized sum is undefined.
    #[error("degenerate beam split at element {element} (|sum| = {modulus:e})")]
    DegenerateSplit { element: usize, modulus: f64 },

    #[error("grid needs {required} evaluations but the budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
