//! Arbitrary-precision scalar kernels: the [`Real`] big-float type, a
//! decimal-denominated [`PrecisionContext`], Lambert W (principal branch),
//! and factorial asymptotics.

mod factorial;
mod lambert;
mod precision;
mod real;

pub use factorial::{log_factorial, stirling_factorial};
pub use lambert::{lambert_w0, lambert_w0_seeded};
pub use precision::PrecisionContext;
pub use real::Real;

/// Domain and convergence failures in the scalar kernels.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumericError {
    #[error("argument must be nonnegative, got {0}")]
    NegativeArgument(String),
    #[error("{what}: {detail}")]
    NoConvergence { what: String, detail: String },
}
