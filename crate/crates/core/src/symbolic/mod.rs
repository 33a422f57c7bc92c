//! Coefficient functions and exact polynomial algebra.

pub mod antiderivative;
pub mod asymptotic;
pub mod expr;
pub mod parse;
pub mod poly;
pub mod quad;
pub mod ratfun;
pub mod signs;
pub mod sturm;

pub use antiderivative::Antiderivative;
pub use expr::{EvalError, Expression};
pub use parse::{parse, parse_with, ParseError};
pub use poly::Polynomial;
pub use ratfun::{ExpRational, RationalFunction};
pub use sturm::{sturm_sign_analysis, Bound, RealRoot, SignAnalysis, SignSummary};
