//! Spectral gaps of Kac-type random collision models.
//!
//! Four Markov jump processes share one analytical skeleton: a walk on the
//! energy sphere driven by random two-particle rotations, a momentum- and
//! energy-conserving three-dimensional collision model, the random
//! transposition shuffle, and a walk on SO(N) driven by random planar
//! rotations. For each model the one-step operator Q averages over pair
//! choices, and the gap of the generator N(Q - I) controls relaxation to
//! equilibrium.
//!
//! The crate computes these gaps three independent ways and cross-checks
//! them against each other:
//!
//! * closed forms for the single-pair correlation operator K and the gap
//!   recursion it drives ([`spectra`], [`gap`]);
//! * brute-force and quadrature oracles on small instances — restricted
//!   polynomial matrices on the sphere, full permutation matrices,
//!   discretized K operators ([`verify`]);
//! * Monte Carlo simulation of the walks themselves with autocovariance
//!   decay fits ([`simulate`]).

pub mod collision;
pub mod density;
pub mod gap;
pub mod jsonfmt;
pub mod linalg;
pub mod model;
pub mod poly;
pub mod quad;
pub mod simulate;
pub mod special;
pub mod spectra;
pub mod verify;

/// Failure modes, split by how the CLI must report them: bad inputs,
/// checks that ran and failed, and numerical breakdowns.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

/// Toolkit version echoed into every output artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
