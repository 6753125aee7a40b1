//! Exact polynomial and rational-function arithmetic.

mod gcd;
mod parse;
mod poly;
pub mod qserde;
mod ratexpr;

use thiserror::Error;

pub use gcd::{coprime, poly_gcd, poly_lcm};
pub use parse::{infer_variables, parse_expression, parse_rational_expression};
pub use poly::{
    default_names, euclidean_hessian, f64_to_rational, format_rational, gradient, grlex_cmp,
    rational_to_f64, Exponents, Polynomial,
};
pub use ratexpr::RatExpr;

/// Arbitrary-precision rational, always stored in lowest terms.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("expected a point of dimension {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("polynomial involves more than one variable")]
    NotUnivariate,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("denominator vanishes at the evaluation point")]
    PoleAtPoint,
    #[error("syntax error at {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable '{name}' at {position}")]
    UnknownVariable { name: String, position: usize },
    #[error("not a polynomial at {position}: {message}")]
    NonPolynomial { position: usize, message: String },
}

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Shorthand for `n/d`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
