//! Arithmetic terms: expressions over `+ - * / ^ %` with exact big-integer
//! evaluation, and number-theoretic formulas (GCD, integer square root,
//! factorial, semiprime factorization) expressed as such terms and checked
//! against classical oracle algorithms.
//!
//! `/` is floored division (rounds toward negative infinity) and `%` is the
//! matching remainder, so `a % b == a - b*(a/b)` holds identically.

pub mod estimate;
pub mod eval;
pub mod formulas;
pub mod oracles;
pub mod parse;
pub mod term;

pub use estimate::{estimate_bits, NodeBound, SizeEstimate};
pub use eval::{evaluate, Bindings, EvalBudget, EvalError, EvalStats, Strategy};
pub use formulas::{
    auto_base, build_factorial_term, build_gcd_term, build_isqrt_term, factor_semiprime,
    factorial_term_value, gcd, isqrt_with_method, totient_semiprime, FactorMode, FactorResult,
    FormulaError, GcdMethod, MAZZANTI_MAX_INPUT,
};
pub use parse::{parse, ParseError};
pub use term::Term;

pub use rug::Integer;
