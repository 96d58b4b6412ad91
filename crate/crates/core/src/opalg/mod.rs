//! Exact noncommutative algebra over the pair `X`, `P` with `[X,P] = i`.
//!
//! Expressions are built in the free algebra (words are plain generator
//! sequences) and brought to the canonical `X`-left form by
//! [`OpExpr::normal_order`]. [`apply_to_polynomial`] realizes the algebra on
//! polynomials and is used as a brute-force check of the rewriting.

mod expr;
mod poly;
mod scalar;
mod word;

pub use expr::OpExpr;
pub use poly::{apply_to_polynomial, Polynomial};
pub use scalar::{Coeff, ComplexRational, Monomial, ParamValues, ScalarCoeff};
pub use word::{Gen, Word};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("[X^-n, P] needs n >= 1; X^0 is the identity and commutes with P")]
    ZeroInversePower,
    #[error("no value supplied for parameter `{0}`")]
    MissingParameter(String),
    #[error("`{expr}` is not a polynomial in {var} alone")]
    NotSingleVariable { expr: String, var: char },
    #[error("polynomial `{0}` has non-real coefficients")]
    NotReal(String),
}

/// Right-hand side `coeff · X^degree` of `[X^-n, P]`.
///
/// Negative powers never enter [`Word`]; this is the only place they appear.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InversePowerTerm {
    pub degree: i64,
    pub coeff: ComplexRational,
}

/// `[X^-n, P] = -i n X^(-n-1)`.
pub fn inverse_power_rule(n: u32) -> Result<InversePowerTerm, AlgebraError> {
    if n == 0 {
        return Err(AlgebraError::ZeroInversePower);
    }
    let n = i64::from(n);
    Ok(InversePowerTerm {
        degree: -n - 1,
        coeff: &ComplexRational::i() * &ComplexRational::from_integer(-n),
    })
}

/// `[a, b]` normal-ordered. Free-function spelling of [`OpExpr::commutator`].
pub fn commutator(a: &OpExpr, b: &OpExpr) -> OpExpr {
    a.commutator(b)
}

pub fn normal_order(e: &OpExpr) -> OpExpr {
    e.normal_order()
}
