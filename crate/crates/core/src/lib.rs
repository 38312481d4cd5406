//! Exact-arithmetic engine for the rank-d Heisenberg vertex operator algebra,
//! its twisted modules attached to a finite-order isometry, and the induced
//! representations of the central extension of differential operators on the
//! circle. Everything is computed over cyclotomic rationals; there are no
//! floating-point numbers anywhere and every verification is an exact
//! coefficient comparison.

pub mod config;
pub mod dplus;
pub mod exact;
pub mod formal;
pub mod heis;
pub mod report;
pub mod twist;
pub mod voa;

pub use exact::{CycNum, Rat};

use thiserror::Error;

/// Errors shared across the computational modules. Verification *failures*
/// are not errors: checkers report them as structured outcomes. These are
/// reserved for inputs or budgets under which a requested computation is not
/// well defined.
#[derive(Debug, Error)]
pub enum CalcError {
    #[error("bilinear form is not symmetric")]
    NotSymmetric,
    #[error("bilinear form is degenerate")]
    Degenerate,
    #[error("isometry does not preserve the form or nu^p != 1")]
    BadIsometry,
    #[error("series product has an unbounded coefficient sum in variable {0}")]
    UnboundedConvolution(String),
    #[error("requested window exceeds the faithful window of an operand ({0})")]
    WindowTooSmall(String),
    #[error("operand variable lists differ")]
    VarMismatch,
    #[error("polynomial part is not in the odd-degree span ({0})")]
    NotInSpan(String),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
}

pub type Result<T> = std::result::Result<T, CalcError>;
