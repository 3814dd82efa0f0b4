//! Closed-form number theory as arithmetic terms: GCD (three term methods
//! plus the Euclid oracle), integer square root, factorial, and the
//! semiprime factor pipeline built from them.

use crate::estimate::estimate_bits;
use crate::eval::{bitlen, evaluate, Bindings, EvalBudget, EvalError, EvalStats, Strategy};
use crate::oracles;
use crate::term::Term;
use rug::ops::Pow;
use rug::Integer;
use thiserror::Error;

/// How to compute a GCD.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcdMethod {
    /// Base-2 closed form with exponents quadratic in the inputs.
    Mazzanti,
    /// `floor(m^(a+ab) / ((m^a-1)(m^b-1))) mod m` over an integer base
    /// `m > 2`, `m > gcd(a,b)`.
    PolyBase,
    /// `(-(m^(a+ab) mod (m^(a+b)-m^a-m^b+1))) mod m`, same base rules;
    /// the inner reduction admits a modular-exponentiation fast path.
    ModMod,
    /// Classical algorithm, used as the oracle.
    Euclid,
}

impl GcdMethod {
    pub fn name(self) -> &'static str {
        match self {
            GcdMethod::Mazzanti => "mazzanti",
            GcdMethod::PolyBase => "poly-base",
            GcdMethod::ModMod => "modmod",
            GcdMethod::Euclid => "euclid",
        }
    }
}

/// How to run the semiprime factor pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorMode {
    /// Every quantity (root, factorial, gcd) by arithmetic-term evaluation.
    Pure,
    /// Root and factorial by oracle; the final gcd by the `ModMod` term
    /// with the modular-exponentiation rewrite.
    Hybrid,
    /// Trial division only.
    Oracle,
}

impl FactorMode {
    pub fn name(self) -> &'static str {
        match self {
            FactorMode::Pure => "pure",
            FactorMode::Hybrid => "hybrid",
            FactorMode::Oracle => "oracle",
        }
    }
}

/// Outcome of the semiprime factor pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorResult {
    pub n: Integer,
    pub p: Integer,
    pub q: Integer,
    pub mode: FactorMode,
    /// `floor(sqrt(n))`.
    pub omega: u64,
    /// Bit length of `omega!` (the value itself can be megabytes).
    pub gamma_bits: u64,
    /// Both factors passed the primality oracle and `p*q == n`.
    pub verified: bool,
    /// Set when `n` is a square of a prime: the result comes from the
    /// oracle root, not the non-square factorization formula.
    pub outside_paper_formula: bool,
    pub stats: EvalStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("invalid base {base}: need base > 2 and base > gcd(a, b) = {gcd}")]
    InvalidBase { base: Integer, gcd: Integer },
    #[error("{0}")]
    OutOfRange(String),
    #[error("the euclid method is oracle-only and has no term form")]
    NotATermMethod,
    #[error("{n} is not a non-square semiprime")]
    NotSemiprime { n: Integer },
    #[error(
        "budget exceeded: estimated peak {needed_bits} bits, limit {max_bits}; \
         hybrid mode keeps intermediates at modular size"
    )]
    Budget { needed_bits: u128, max_bits: u64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Mazzanti exponents stay reasonable only up to here; beyond, the term
/// dwarfs every other method (the leading exponent is `a^2*b*(b+1)`).
pub const MAZZANTI_MAX_INPUT: u64 = 24;

fn lit(v: impl Into<Integer>) -> Term {
    Term::lit(v)
}

/// Smallest safe base for the integer-base GCD forms:
/// `max(3, min(a,b)+1)`, which always exceeds both 2 and `gcd(a,b)`.
pub fn auto_base(a: &Integer, b: &Integer) -> Integer {
    let m = Integer::from(a.min(b) + 1);
    if m < 3 {
        Integer::from(3)
    } else {
        m
    }
}

fn require_positive(a: &Integer, b: &Integer) -> Result<(), FormulaError> {
    if *a < 1 || *b < 1 {
        return Err(FormulaError::OutOfRange(format!(
            "gcd inputs must be positive, got {a} and {b}"
        )));
    }
    Ok(())
}

/// Builds the closed gcd term for `a`, `b` under `method`.
///
/// `base` applies to `PolyBase` and `ModMod` (default [`auto_base`]) and is
/// rejected unless `base > 2` and `base > gcd(a,b)`. `Mazzanti` is fixed to
/// base 2 and capped at `a, b <= 24`. `Euclid` has no term form.
pub fn build_gcd_term(
    a: &Integer,
    b: &Integer,
    method: GcdMethod,
    base: Option<&Integer>,
) -> Result<Term, FormulaError> {
    require_positive(a, b)?;
    match method {
        GcdMethod::Euclid => Err(FormulaError::NotATermMethod),
        GcdMethod::Mazzanti => {
            if *a > MAZZANTI_MAX_INPUT || *b > MAZZANTI_MAX_INPUT {
                return Err(FormulaError::OutOfRange(format!(
                    "mazzanti method is capped at a, b <= {MAZZANTI_MAX_INPUT}"
                )));
            }
            let a2b = Integer::from(a * a) * b;
            let e1 = Integer::from(&a2b * b) + &a2b; // a^2*b*(b+1)
            let e2 = a2b.clone(); // a^2*b
            let e3 = Integer::from(&a2b * b); // a^2*b^2
            let e4 = Integer::from(a * b) * b; // a*b^2
            let e5 = Integer::from(a * b); // a*b
            let two = || lit(2);
            let num = two()
                .pow(lit(e1))
                .sub(two().pow(lit(e2.clone())))
                .mul(two().pow(lit(e3.clone())).sub(lit(1)));
            let den = two()
                .pow(lit(e2))
                .sub(lit(1))
                .mul(two().pow(lit(e4)).sub(lit(1)))
                .mul(two().pow(lit(e3)));
            Ok(num.div(den).modulo(two().pow(lit(e5))))
        }
        GcdMethod::PolyBase | GcdMethod::ModMod => {
            let m = match base {
                Some(m) => {
                    let g = oracles::gcd_euclid(a, b);
                    if *m <= 2 || *m <= g {
                        return Err(FormulaError::InvalidBase {
                            base: m.clone(),
                            gcd: g,
                        });
                    }
                    m.clone()
                }
                None => auto_base(a, b),
            };
            let e_num = Integer::from(a * b) + a; // a + a*b
            let m_t = || lit(m.clone());
            if method == GcdMethod::PolyBase {
                let den = m_t()
                    .pow(lit(a.clone()))
                    .sub(lit(1))
                    .mul(m_t().pow(lit(b.clone())).sub(lit(1)));
                Ok(m_t().pow(lit(e_num)).div(den).modulo(m_t()))
            } else {
                // m^(a+b) - m^a - m^b + 1
                let modulus = m_t()
                    .pow(lit(Integer::from(a + b)))
                    .sub(m_t().pow(lit(a.clone())))
                    .sub(m_t().pow(lit(b.clone())))
                    .add(lit(1));
                let residue = m_t().pow(lit(e_num)).modulo(modulus);
                Ok(lit(0).sub(residue).modulo(m_t()))
            }
        }
    }
}

/// Computes `gcd(a, b)` by the chosen method. Term methods build the closed
/// term and evaluate it (`ModMod` with the rewrite strategy); `Euclid` runs
/// the classical algorithm.
pub fn gcd(
    a: &Integer,
    b: &Integer,
    method: GcdMethod,
    base: Option<&Integer>,
    budget: &EvalBudget,
) -> Result<(Integer, EvalStats), FormulaError> {
    require_positive(a, b)?;
    if method == GcdMethod::Euclid {
        return Ok((oracles::gcd_euclid(a, b), EvalStats::default()));
    }
    let term = build_gcd_term(a, b, method, base)?;
    let strategy = if method == GcdMethod::ModMod {
        Strategy::Rewrite
    } else {
        Strategy::Naive
    };
    let (v, stats) = evaluate(&term, &Bindings::new(), budget, strategy)?;
    Ok((v, stats))
}

/// Builds the closed term for `floor(sqrt(n))`:
/// `floor((n^(2n)+1)^(2n+1) mod (n^(4n)-n)) / ((n^(2n)+1)^(2n) mod (n^(4n)-n))) - 1`.
///
/// The term is only guaranteed for non-square `n >= 3`; at `n = 2` it
/// evaluates to 0 while the true root is 1.
pub fn build_isqrt_term(n: &Integer) -> Result<Term, FormulaError> {
    if *n < 1 {
        return Err(FormulaError::OutOfRange(format!(
            "isqrt term needs n >= 1, got {n}"
        )));
    }
    let two_n = Integer::from(n * 2u32);
    let base = || lit(n.clone()).pow(lit(two_n.clone())).add(lit(1));
    let modulus = || {
        lit(n.clone())
            .pow(lit(Integer::from(n * 4u32)))
            .sub(lit(n.clone()))
    };
    let hi = base()
        .pow(lit(Integer::from(&two_n + 1u32)))
        .modulo(modulus());
    let lo = base().pow(lit(two_n.clone())).modulo(modulus());
    Ok(hi.div(lo).sub(lit(1)))
}

/// `floor(sqrt(n))`, preferring the closed term when requested.
///
/// The term path is used for non-square `n >= 3`; squares and `n < 3` are
/// outside its guaranteed domain and fall back to the oracle. Returns the
/// value and whether the term was actually used.
pub fn isqrt_with_method(
    n: &Integer,
    prefer_term: bool,
    budget: &EvalBudget,
) -> Result<(Integer, bool, EvalStats), FormulaError> {
    if *n < 0 {
        return Err(FormulaError::OutOfRange(format!(
            "isqrt needs n >= 0, got {n}"
        )));
    }
    let root = oracles::isqrt(n);
    let is_square = Integer::from(&root * &root) == *n;
    if !prefer_term || *n < 3 || is_square {
        return Ok((root, false, EvalStats::default()));
    }
    let term = build_isqrt_term(n)?;
    let (v, stats) = evaluate(&term, &Bindings::new(), budget, Strategy::Rewrite)?;
    Ok((v, true, stats))
}

/// Builds the closed term for `w!` over the base `β = w+1`:
/// `floor(β^(w(w+2)) / (floor((β^(w(w+2))+1)^(β^(w+2)) / β^(w^2(w+2))) mod β^(w(w+2))))`.
///
/// Requires `w >= 2`; at `w = 1` the inner reduction is identically zero
/// and the outer division has no value.
pub fn build_factorial_term(w: u64) -> Result<Term, FormulaError> {
    if w < 2 {
        return Err(FormulaError::OutOfRange(format!(
            "factorial term needs w >= 2, got {w}"
        )));
    }
    let beta = Integer::from(w + 1);
    let e_main = Integer::from(w) * (w + 2); // w*(w+2)
    let e_shift = Integer::from(w) * w * (w + 2); // w^2*(w+2)
    let e_pow = beta.clone().pow(u32::try_from(w + 2).expect("desk-scale w")); // (w+1)^(w+2)
    let b = || lit(beta.clone());
    let main_pow = || b().pow(lit(e_main.clone()));
    let inner = main_pow()
        .add(lit(1))
        .pow(lit(e_pow))
        .div(b().pow(lit(e_shift)))
        .modulo(main_pow());
    Ok(main_pow().div(inner))
}

/// Evaluates the factorial term for `w` with an estimator preflight, so an
/// over-budget request fails with the predicted size instead of grinding.
pub fn factorial_term_value(
    w: u64,
    budget: &EvalBudget,
) -> Result<(Integer, EvalStats), FormulaError> {
    let term = build_factorial_term(w)?;
    let est = estimate_bits(&term, &Bindings::new())?;
    if est.total_bound_bits > budget.max_bits() as u128 {
        return Err(FormulaError::Budget {
            needed_bits: est.total_bound_bits,
            max_bits: budget.max_bits(),
        });
    }
    let (v, stats) = evaluate(&term, &Bindings::new(), budget, Strategy::Naive)?;
    Ok((v, stats))
}

/// Factors a non-square semiprime `n = p*q` (`p < q`).
///
/// `Pure` evaluates the root, factorial and gcd terms; `Hybrid` takes the
/// root and factorial from oracles and evaluates only the gcd term (with
/// the modular fast path); `Oracle` is trial division. A square of a prime
/// is reported from the oracle root with `outside_paper_formula` set.
pub fn factor_semiprime(
    n: &Integer,
    mode: FactorMode,
    budget: &EvalBudget,
) -> Result<FactorResult, FormulaError> {
    if *n < 6 {
        return Err(FormulaError::OutOfRange(format!(
            "factorization needs n >= 6, got {n}"
        )));
    }
    let root = oracles::isqrt(n);
    let omega_oracle = root.to_u64().ok_or_else(|| {
        FormulaError::OutOfRange("input too large for the desk-scale pipeline".into())
    })?;
    if Integer::from(&root * &root) == *n {
        if !oracles::is_prime(&root) {
            return Err(FormulaError::NotSemiprime { n: n.clone() });
        }
        return Ok(FactorResult {
            n: n.clone(),
            p: root.clone(),
            q: root,
            mode,
            omega: omega_oracle,
            gamma_bits: bitlen(&oracles::factorial(omega_oracle)),
            verified: true,
            outside_paper_formula: true,
            stats: EvalStats::default(),
        });
    }

    let mut stats = EvalStats::default();
    let (p, omega, gamma_bits) = match mode {
        FactorMode::Oracle => {
            let fs = oracles::trial_division(n);
            if fs.len() != 2 {
                return Err(FormulaError::NotSemiprime { n: n.clone() });
            }
            let gamma_bits = bitlen(&oracles::factorial(omega_oracle));
            (fs[0].clone(), omega_oracle, gamma_bits)
        }
        FactorMode::Pure => {
            let isqrt_term = build_isqrt_term(n)?;
            let (omega_val, st) = evaluate(&isqrt_term, &Bindings::new(), budget, Strategy::Naive)?;
            stats.merge(&st);
            let omega = omega_val
                .to_u64()
                .ok_or_else(|| FormulaError::NotSemiprime { n: n.clone() })?;
            let (gamma, st) = factorial_term_value(omega, budget)?;
            stats.merge(&st);
            let gamma_bits = bitlen(&gamma);
            let p_term = build_gcd_term(n, &gamma, GcdMethod::PolyBase, Some(n))?;
            let (p, st) = evaluate(&p_term, &Bindings::new(), budget, Strategy::Naive)?;
            stats.merge(&st);
            (p, omega, gamma_bits)
        }
        FactorMode::Hybrid => {
            let gamma = oracles::factorial(omega_oracle);
            let gamma_bits = bitlen(&gamma);
            let p_term = build_gcd_term(n, &gamma, GcdMethod::ModMod, Some(n))?;
            let (p, st) = evaluate(&p_term, &Bindings::new(), budget, Strategy::Rewrite)?;
            stats.merge(&st);
            (p, omega_oracle, gamma_bits)
        }
    };

    if p < 2 || !n.is_divisible(&p) {
        return Err(FormulaError::NotSemiprime { n: n.clone() });
    }
    let q = Integer::from(n / &p);
    let verified = Integer::from(&p * &q) == *n
        && p < q
        && oracles::is_prime(&p)
        && oracles::is_prime(&q);
    if !verified {
        return Err(FormulaError::NotSemiprime { n: n.clone() });
    }
    Ok(FactorResult {
        n: n.clone(),
        p,
        q,
        mode,
        omega,
        gamma_bits,
        verified,
        outside_paper_formula: false,
        stats,
    })
}

/// Euler's totient of a semiprime via the factor pipeline:
/// `(p-1)(q-1)` for distinct primes, `p*(p-1)` for a prime square.
pub fn totient_semiprime(
    n: &Integer,
    mode: FactorMode,
    budget: &EvalBudget,
) -> Result<(Integer, FactorResult), FormulaError> {
    let fr = factor_semiprime(n, mode, budget)?;
    let phi = if fr.outside_paper_formula {
        Integer::from(&fr.p - 1u32) * &fr.p
    } else {
        Integer::from(&fr.p - 1u32) * Integer::from(&fr.q - 1u32)
    };
    Ok((phi, fr))
}
