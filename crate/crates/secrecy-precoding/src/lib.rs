//! Linear precoder design for the two-transmitter cognitive multiple-access
//! wiretap channel with finite-alphabet inputs and statistical CSI.
//!
//! The library evaluates the constellation-constrained average secrecy sum
//! rate (both an exact Monte-Carlo estimator and a closed-form
//! approximation), lifts the precoder optimization into a
//! difference-of-convex program over a matrix variable, and maximizes it
//! globally with a rectangle-splitting outer approximation whose node
//! subproblems are solved by a convex-concave procedure on top of a dense
//! log-barrier Newton solver. Gaussian-signaling and no-precoding baselines
//! are included for comparison.

pub mod baselines;
pub mod channel;
pub mod constellation;
pub mod lift;
pub mod mutual_info;
pub mod optimizer;
pub mod scenario;
pub mod subsolver;

pub use scenario::Scenario;

#[cfg(test)]
pub(crate) mod test_fixtures;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported constellation kind: {0}")]
    UnsupportedConstellation(String),
    #[error("symbol enumeration size {computed} exceeds cap {cap}")]
    EnumerationTooLarge { computed: u128, cap: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix not positive semidefinite: min eigenvalue {0}")]
    NotPsd(f64),
    #[error("non-finite value encountered in {0}")]
    NonFinite(String),
    #[error("initial box unbounded: coordinate {0} not covered by any constraint")]
    UnboundedBox(usize),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
