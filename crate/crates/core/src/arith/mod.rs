//! Exact closed-form scalars and certified ball arithmetic.

mod ball;
mod consts;
mod qexpr;

pub use ball::{Real, Scalar};
pub use consts::{pi, quantum_integer, root_of_unity, select_z_root, z_selection, z_value, RootSelection, Z_APPROX};
pub use qexpr::{int, qint, rat, z, zeta, EvalContext, QExpr, DEFAULT_Q_ORDER};

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 256;

/// Default zero tolerance exponent: residuals must certify below `2^-100`.
pub const DEFAULT_TOL_EXP: u32 = 100;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ArithError {
    #[error("division by a ball containing zero")]
    DivisionByZero,
    #[error("square root of a negative number")]
    NegativeSqrt,
    #[error("square root argument straddles the branch cut")]
    BranchAmbiguity,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("cannot isolate the roots of 9x^16 - 14x^8 + 9 at {0} bits")]
    RootIsolation(u32),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Evaluate `e` at `precision` bits.
pub fn eval(e: &QExpr, precision: u32) -> Result<Scalar, ArithError> {
    e.eval(precision)
}

/// `2^-k` as an f64.
pub fn tolerance(k: u32) -> f64 {
    2f64.powi(-(k as i32))
}
