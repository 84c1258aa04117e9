//! Exact arithmetic over the free differential ring of jet coordinates.

mod eps;
mod expr;
mod poly;
mod var;

use thiserror::Error;

pub use eps::EpsExpr;
pub use expr::{Exp, JetExpr};
pub use poly::{Monomial, Poly};
pub use var::{JetVar, VarKind, ARB_FUNCS, PARAMS};

pub(crate) use expr::exp_to_string;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("division by a polynomial that expands to zero")]
    DivisionByZeroPolynomial,
    #[error("fractional power of a base that vanishes identically")]
    FractionalPowerDerivative,
    #[error("division by zero during evaluation")]
    EvalDivisionByZero,
    #[error("fractional power has no rational value at this point")]
    IrrationalPower,
    #[error("even root of a negative constant needs a branch choice")]
    BranchChoice,
    #[error("sum of fractional powers whose exponents differ by a non-integer")]
    NonRationalSum,
    #[error("no value assigned to {0}")]
    UnboundVariable(JetVar),
}

/// Applies [`JetExpr::total_derivative`]; kept as a free function for the
/// operation table of the toolkit.
pub fn total_derivative(e: &JetExpr, k: u32) -> Result<JetExpr, JetError> {
    e.total_derivative(k)
}
