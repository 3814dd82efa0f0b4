//! Exact big-integer evaluation of terms with bit-budget enforcement.
//!
//! Semantics: `floor(a/b)` rounds toward negative infinity, `a % b` is
//! `a - b*floor(a/b)` (sign follows the divisor), and `x^0 == 1` including
//! `0^0 == 1`. Every intermediate is size-checked against the budget before
//! it is materialized, so an over-budget evaluation fails with
//! [`EvalError::BudgetExceeded`] instead of exhausting memory.

use crate::term::Term;
use rug::ops::{DivRounding, RemRounding};
use rug::Integer;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};
use thiserror::Error;

/// Exponents must evaluate below this; any power with a larger exponent is
/// over every realistic budget.
const MAX_EXPONENT: u64 = 1 << 63;

/// Variable bindings for evaluation: name -> value.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bindings(BTreeMap<String, Integer>);

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, name: impl Into<String>, value: impl Into<Integer>) -> &mut Self {
        self.0.insert(name.into(), value.into());
        self
    }

    pub fn get(&self, name: &str) -> Option<&Integer> {
        self.0.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Integer)> {
        self.0.iter()
    }
}

impl<N: Into<String>, V: Into<Integer>> FromIterator<(N, V)> for Bindings {
    fn from_iter<T: IntoIterator<Item = (N, V)>>(iter: T) -> Self {
        Bindings(
            iter.into_iter()
                .map(|(n, v)| (n.into(), v.into()))
                .collect(),
        )
    }
}

/// Ceiling on the bit length of any intermediate value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalBudget {
    max_bits: u64,
}

impl EvalBudget {
    pub const MIN_BITS: u64 = 64;
    pub const DEFAULT_BITS: u64 = 1 << 30;

    /// Panics if `max_bits < 64`.
    pub fn new(max_bits: u64) -> Self {
        assert!(
            max_bits >= Self::MIN_BITS,
            "budget must be at least {} bits",
            Self::MIN_BITS
        );
        EvalBudget { max_bits }
    }

    pub fn max_bits(&self) -> u64 {
        self.max_bits
    }
}

impl Default for EvalBudget {
    fn default() -> Self {
        EvalBudget {
            max_bits: Self::DEFAULT_BITS,
        }
    }
}

/// Observed cost of one evaluation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EvalStats {
    /// Largest bit length seen across all intermediates (and the working
    /// size of modular powerings), at least the bit length of the result.
    pub peak_bits: u64,
    pub mul_count: u64,
    pub pow_count: u64,
    pub div_count: u64,
    pub elapsed: Duration,
}

impl EvalStats {
    /// Combines stats from sequential evaluations: counts and times add,
    /// peaks take the maximum.
    pub fn merge(&mut self, other: &EvalStats) {
        self.peak_bits = self.peak_bits.max(other.peak_bits);
        self.mul_count += other.mul_count;
        self.pow_count += other.pow_count;
        self.div_count += other.div_count;
        self.elapsed += other.elapsed;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Straight structural recursion.
    #[default]
    Naive,
    /// Like `Naive`, but `(b^e) % m` and `(... * b^e * ...) % m` with
    /// integer operands, `e >= 0` and `m > 0` go through modular
    /// exponentiation. Results are bit-identical to `Naive`.
    Rewrite,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("negative exponent")]
    NegativeExponent,
    #[error("budget exceeded: intermediate needs {needed_bits} bits, limit is {max_bits}")]
    BudgetExceeded { needed_bits: u128, max_bits: u64 },
    #[error("unbound variable '{0}'")]
    UnboundVariable(String),
}

/// Bit length of the magnitude; zero counts as one bit.
pub(crate) fn bitlen(v: &Integer) -> u64 {
    (v.significant_bits() as u64).max(1)
}

/// Evaluates `t` under `env`, enforcing `budget` on every intermediate.
pub fn evaluate(
    t: &Term,
    env: &Bindings,
    budget: &EvalBudget,
    strategy: Strategy,
) -> Result<(Integer, EvalStats), EvalError> {
    let start = Instant::now();
    let mut ev = Evaluator {
        env,
        max_bits: budget.max_bits,
        strategy,
        stats: EvalStats::default(),
    };
    let value = ev.eval(t)?;
    let mut stats = ev.stats;
    stats.elapsed = start.elapsed();
    Ok((value, stats))
}

struct Evaluator<'a> {
    env: &'a Bindings,
    max_bits: u64,
    strategy: Strategy,
    stats: EvalStats,
}

impl Evaluator<'_> {
    fn note(&mut self, bits: u64) {
        self.stats.peak_bits = self.stats.peak_bits.max(bits);
    }

    fn check(&self, needed_bits: u128) -> Result<(), EvalError> {
        if needed_bits > self.max_bits as u128 {
            Err(EvalError::BudgetExceeded {
                needed_bits,
                max_bits: self.max_bits,
            })
        } else {
            Ok(())
        }
    }

    fn eval(&mut self, t: &Term) -> Result<Integer, EvalError> {
        let v = match t {
            Term::Literal(v) => v.clone(),
            Term::Variable(name) => self
                .env
                .get(name)
                .cloned()
                .ok_or_else(|| EvalError::UnboundVariable(name.clone()))?,
            Term::Add(l, r) => {
                let a = self.eval(l)?;
                let b = self.eval(r)?;
                self.check(bitlen(&a).max(bitlen(&b)) as u128 + 1)?;
                a + b
            }
            Term::Sub(l, r) => {
                let a = self.eval(l)?;
                let b = self.eval(r)?;
                self.check(bitlen(&a).max(bitlen(&b)) as u128 + 1)?;
                a - b
            }
            Term::Mul(l, r) => {
                let a = self.eval(l)?;
                let b = self.eval(r)?;
                self.check(bitlen(&a) as u128 + bitlen(&b) as u128)?;
                self.stats.mul_count += 1;
                a * b
            }
            Term::FloorDiv(l, r) => {
                let a = self.eval(l)?;
                let b = self.eval(r)?;
                if b == 0 {
                    return Err(EvalError::DivisionByZero);
                }
                self.stats.div_count += 1;
                a.div_floor(&b)
            }
            Term::Mod(l, r) => {
                if self.strategy == Strategy::Rewrite && mod_rewrite_applies(l) {
                    let m = self.eval(r)?;
                    if m > 0 {
                        return self.eval_mod(l, &m);
                    }
                    if m == 0 {
                        return Err(EvalError::DivisionByZero);
                    }
                    let a = self.eval(l)?;
                    self.stats.div_count += 1;
                    let v = a.rem_floor(&m);
                    self.note(bitlen(&v));
                    return Ok(v);
                }
                let a = self.eval(l)?;
                let b = self.eval(r)?;
                if b == 0 {
                    return Err(EvalError::DivisionByZero);
                }
                self.stats.div_count += 1;
                a.rem_floor(&b)
            }
            Term::Pow(b, e) => {
                let base = self.eval(b)?;
                let exp = self.eval(e)?;
                self.stats.pow_count += 1;
                self.pow(base, &exp)?
            }
        };
        self.note(bitlen(&v));
        Ok(v)
    }

    fn exponent_value(&self, exp: &Integer) -> Result<u64, EvalError> {
        if *exp < 0 {
            return Err(EvalError::NegativeExponent);
        }
        exp.to_u64()
            .filter(|&e| e < MAX_EXPONENT)
            .ok_or(EvalError::BudgetExceeded {
                needed_bits: u128::MAX,
                max_bits: self.max_bits,
            })
    }

    fn pow(&mut self, base: Integer, exp: &Integer) -> Result<Integer, EvalError> {
        let e = self.exponent_value(exp)?;
        // Bases of magnitude <= 1 never grow.
        if base == 0 {
            return Ok(Integer::from(if e == 0 { 1 } else { 0 }));
        }
        if base == 1 || (base == -1 && e % 2 == 0) {
            return Ok(Integer::from(1));
        }
        if base == -1 {
            return Ok(Integer::from(-1));
        }
        if e == 0 {
            return Ok(Integer::from(1));
        }
        // bits(base^e) <= e * bits(base); one upfront check covers every
        // partial product of the square-and-multiply loop below.
        self.check(e as u128 * bitlen(&base) as u128)?;
        let mut result = Integer::from(1);
        let mut square = base;
        let mut k = e;
        loop {
            if k & 1 == 1 {
                result *= &square;
                self.note(bitlen(&result));
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            square.square_mut();
            self.note(bitlen(&square));
        }
        Ok(result)
    }

    /// Evaluates `t % m` for `m > 0` through modular arithmetic.
    fn eval_mod(&mut self, t: &Term, m: &Integer) -> Result<Integer, EvalError> {
        match t {
            Term::Pow(b, e) => {
                let base = self.eval(b)?;
                let exp = self.eval(e)?;
                let _ = self.exponent_value(&exp)?;
                self.stats.pow_count += 1;
                // Modular powering works on values up to twice the modulus size.
                let working = 2 * bitlen(m) as u128;
                self.check(working)?;
                self.note(working as u64);
                let reduced = base.rem_floor(m);
                let v = reduced
                    .pow_mod(&exp, m)
                    .expect("pow_mod with non-negative exponent and positive modulus");
                self.note(bitlen(&v));
                Ok(v)
            }
            Term::Mul(l, r) => {
                let a = self.eval_mod_operand(l, m)?;
                let b = self.eval_mod_operand(r, m)?;
                self.check(bitlen(&a) as u128 + bitlen(&b) as u128)?;
                self.stats.mul_count += 1;
                self.stats.div_count += 1;
                let v = (a * b).rem_floor(m);
                self.note(bitlen(&v));
                Ok(v)
            }
            _ => {
                let a = self.eval(t)?;
                self.stats.div_count += 1;
                let v = a.rem_floor(m);
                self.note(bitlen(&v));
                Ok(v)
            }
        }
    }

    fn eval_mod_operand(&mut self, t: &Term, m: &Integer) -> Result<Integer, EvalError> {
        match t {
            Term::Pow(..) | Term::Mul(..) => self.eval_mod(t, m),
            _ => {
                let v = self.eval(t)?;
                Ok(v.rem_floor(m))
            }
        }
    }
}

/// The rewrite only fires on `b^e % m` or a product chain containing a
/// power under the modulus.
fn mod_rewrite_applies(l: &Term) -> bool {
    match l {
        Term::Pow(..) => true,
        Term::Mul(..) => mul_chain_contains_pow(l),
        _ => false,
    }
}

fn mul_chain_contains_pow(t: &Term) -> bool {
    match t {
        Term::Pow(..) => true,
        Term::Mul(l, r) => mul_chain_contains_pow(l) || mul_chain_contains_pow(r),
        _ => false,
    }
}
