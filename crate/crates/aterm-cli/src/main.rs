//! `aterm`: evaluate arithmetic terms, run the closed-form number-theory
//! formulas, sweep them against oracles, and benchmark the strategies.
//!
//! Exit codes: 0 ok, 1 verification mismatch, 2 usage/syntax, 3 budget
//! exceeded, 4 domain error (division by zero, negative exponent).

mod suites;

use aterm_core::{
    estimate_bits, evaluate, factor_semiprime, factorial_term_value, gcd, isqrt_with_method,
    oracles, parse, totient_semiprime, Bindings, EvalBudget, EvalError, FactorMode, FormulaError,
    GcdMethod, Integer, Strategy,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::process::ExitCode;

pub const EXIT_OK: u8 = 0;
pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_DOMAIN: u8 = 4;

#[derive(Parser)]
#[command(name = "aterm", version, about = "Arithmetic-term toolkit: exact evaluation and closed-form number theory")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Naive,
    Rewrite,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Naive => Strategy::Naive,
            StrategyArg::Rewrite => Strategy::Rewrite,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Mazzanti,
    PolyBase,
    Modmod,
    Euclid,
}

impl From<MethodArg> for GcdMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Mazzanti => GcdMethod::Mazzanti,
            MethodArg::PolyBase => GcdMethod::PolyBase,
            MethodArg::Modmod => GcdMethod::ModMod,
            MethodArg::Euclid => GcdMethod::Euclid,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Pure,
    Hybrid,
    Oracle,
}

impl From<ModeArg> for FactorMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Pure => FactorMode::Pure,
            ModeArg::Hybrid => FactorMode::Hybrid,
            ModeArg::Oracle => FactorMode::Oracle,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IsqrtMethodArg {
    Term,
    Oracle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FactorialMethodArg {
    Term,
    Matiyasevich,
    Oracle,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a term with exact big-integer arithmetic
    Eval {
        expr: String,
        /// Variable binding, e.g. --var x=13 (repeatable)
        #[arg(long = "var")]
        vars: Vec<String>,
        #[arg(long)]
        budget_bits: Option<u64>,
        #[arg(long, value_enum, default_value = "naive")]
        strategy: StrategyArg,
        /// Also print peak size and operation counts
        #[arg(long)]
        stats: bool,
        #[arg(long)]
        json: bool,
    },
    /// Greatest common divisor by a closed-form term or the Euclid oracle
    Gcd {
        a: String,
        b: String,
        #[arg(long, value_enum, default_value = "poly-base")]
        method: MethodArg,
        /// Integer base for poly-base/modmod (default: max(3, min(a,b)+1))
        #[arg(long)]
        base: Option<String>,
        #[arg(long)]
        budget_bits: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Integer square root by the closed-form term or Newton oracle
    Isqrt {
        n: String,
        #[arg(long, value_enum, default_value = "term")]
        method: IsqrtMethodArg,
        #[arg(long)]
        budget_bits: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Factorial by the closed-form term, the binomial-quotient identity, or direct product
    Factorial {
        k: u64,
        #[arg(long, value_enum, default_value = "term")]
        method: FactorialMethodArg,
        #[arg(long)]
        budget_bits: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Factor a non-square semiprime n = p*q
    Factor {
        n: String,
        #[arg(long, value_enum, default_value = "hybrid")]
        mode: ModeArg,
        #[arg(long)]
        budget_bits: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Euler's totient of a semiprime via the factor pipeline
    Totient {
        n: String,
        #[arg(long, value_enum, default_value = "hybrid")]
        mode: ModeArg,
        #[arg(long)]
        budget_bits: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Sweep a formula family against its oracle and report mismatches
    Verify(suites::VerifyArgs),
    /// Print sound per-node size bounds without evaluating
    Estimate {
        expr: String,
        #[arg(long = "var")]
        vars: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Time the methods over an input grid and emit CSV
    Bench(suites::BenchArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

/// A failure already mapped to the exit-code contract.
pub struct CmdError {
    pub code: u8,
    pub message: String,
}

impl CmdError {
    pub fn usage(message: impl Into<String>) -> Self {
        CmdError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<EvalError> for CmdError {
    fn from(e: EvalError) -> Self {
        let code = match e {
            EvalError::BudgetExceeded { .. } => EXIT_BUDGET,
            EvalError::DivisionByZero | EvalError::NegativeExponent => EXIT_DOMAIN,
            EvalError::UnboundVariable(_) => EXIT_USAGE,
        };
        CmdError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<FormulaError> for CmdError {
    fn from(e: FormulaError) -> Self {
        let code = match &e {
            FormulaError::Budget { .. } => EXIT_BUDGET,
            FormulaError::Eval(inner) => return CmdError::from(inner.clone()),
            FormulaError::NotSemiprime { .. } => EXIT_MISMATCH,
            FormulaError::InvalidBase { .. }
            | FormulaError::OutOfRange(_)
            | FormulaError::NotATermMethod => EXIT_USAGE,
        };
        CmdError {
            code,
            message: e.to_string(),
        }
    }
}

fn run(cmd: Cmd) -> Result<u8, CmdError> {
    match cmd {
        Cmd::Eval {
            expr,
            vars,
            budget_bits,
            strategy,
            stats,
            json,
        } => cmd_eval(&expr, &vars, budget_bits, strategy.into(), stats, json),
        Cmd::Gcd {
            a,
            b,
            method,
            base,
            budget_bits,
            json,
        } => cmd_gcd(&a, &b, method.into(), base.as_deref(), budget_bits, json),
        Cmd::Isqrt {
            n,
            method,
            budget_bits,
            json,
        } => cmd_isqrt(&n, method, budget_bits, json),
        Cmd::Factorial {
            k,
            method,
            budget_bits,
            json,
        } => cmd_factorial(k, method, budget_bits, json),
        Cmd::Factor {
            n,
            mode,
            budget_bits,
            json,
        } => cmd_factor(&n, mode.into(), budget_bits, json),
        Cmd::Totient {
            n,
            mode,
            budget_bits,
            json,
        } => cmd_totient(&n, mode.into(), budget_bits, json),
        Cmd::Verify(args) => suites::cmd_verify(args),
        Cmd::Estimate { expr, vars, json } => cmd_estimate(&expr, &vars, json),
        Cmd::Bench(args) => suites::cmd_bench(args),
    }
}

/// Budget resolution: --budget-bits flag, then ATERM_BUDGET_BITS, then default.
pub fn resolve_budget(flag: Option<u64>) -> Result<EvalBudget, CmdError> {
    let bits = match flag {
        Some(v) => v,
        None => match std::env::var("ATERM_BUDGET_BITS") {
            Ok(s) => s
                .parse::<u64>()
                .map_err(|_| CmdError::usage(format!("bad ATERM_BUDGET_BITS value '{s}'")))?,
            Err(_) => EvalBudget::DEFAULT_BITS,
        },
    };
    if bits < EvalBudget::MIN_BITS {
        return Err(CmdError::usage(format!(
            "budget must be at least {} bits, got {bits}",
            EvalBudget::MIN_BITS
        )));
    }
    Ok(EvalBudget::new(bits))
}

fn parse_bindings(vars: &[String]) -> Result<Bindings, CmdError> {
    let mut env = Bindings::new();
    for spec in vars {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| CmdError::usage(format!("bad --var '{spec}', expected name=value")))?;
        let value = value
            .parse::<Integer>()
            .map_err(|e| CmdError::usage(format!("bad value for --var '{name}': {e}")))?;
        env.set(name, value);
    }
    Ok(env)
}

pub fn parse_integer(text: &str, what: &str) -> Result<Integer, CmdError> {
    text.parse::<Integer>()
        .map_err(|e| CmdError::usage(format!("bad {what} '{text}': {e}")))
}

fn parse_positive(text: &str, what: &str) -> Result<Integer, CmdError> {
    let v = parse_integer(text, what)?;
    if v < 1 {
        return Err(CmdError::usage(format!("{what} must be positive, got {v}")));
    }
    Ok(v)
}

/// Big integers render as JSON numbers when they fit in i64, else strings.
pub fn int_json(v: &Integer) -> serde_json::Value {
    match v.to_i64() {
        Some(small) => json!(small),
        None => json!(v.to_string()),
    }
}

fn elapsed_ms(d: std::time::Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn cmd_eval(
    expr: &str,
    vars: &[String],
    budget_bits: Option<u64>,
    strategy: Strategy,
    stats: bool,
    json: bool,
) -> Result<u8, CmdError> {
    let term = parse(expr).map_err(|e| CmdError::usage(e.to_string()))?;
    let env = parse_bindings(vars)?;
    let budget = resolve_budget(budget_bits)?;
    let (value, st) = evaluate(&term, &env, &budget, strategy)?;
    if json {
        println!(
            "{}",
            json!({
                "expr": expr,
                "result": int_json(&value),
                "peak_bits": st.peak_bits,
                "elapsed_ms": elapsed_ms(st.elapsed),
            })
        );
    } else {
        println!("{value}");
        if stats {
            println!(
                "peak_bits={} mul={} pow={} div={} elapsed_ms={:.3}",
                st.peak_bits,
                st.mul_count,
                st.pow_count,
                st.div_count,
                elapsed_ms(st.elapsed)
            );
        }
    }
    Ok(EXIT_OK)
}

fn cmd_gcd(
    a: &str,
    b: &str,
    method: GcdMethod,
    base: Option<&str>,
    budget_bits: Option<u64>,
    json: bool,
) -> Result<u8, CmdError> {
    let a = parse_positive(a, "a")?;
    let b = parse_positive(b, "b")?;
    let base = base.map(|s| parse_integer(s, "base")).transpose()?;
    let budget = resolve_budget(budget_bits)?;
    let (value, st) = gcd(&a, &b, method, base.as_ref(), &budget)?;
    if json {
        println!(
            "{}",
            json!({
                "a": int_json(&a),
                "b": int_json(&b),
                "method": method.name(),
                "result": int_json(&value),
                "peak_bits": st.peak_bits,
                "elapsed_ms": elapsed_ms(st.elapsed),
            })
        );
    } else {
        println!("{value}");
    }
    Ok(EXIT_OK)
}

fn cmd_isqrt(
    n: &str,
    method: IsqrtMethodArg,
    budget_bits: Option<u64>,
    json: bool,
) -> Result<u8, CmdError> {
    let n = parse_integer(n, "n")?;
    let budget = resolve_budget(budget_bits)?;
    let (value, used_term, st) =
        isqrt_with_method(&n, method == IsqrtMethodArg::Term, &budget)?;
    if json {
        println!(
            "{}",
            json!({
                "n": int_json(&n),
                "method": if used_term { "term" } else { "oracle" },
                "result": int_json(&value),
                "peak_bits": st.peak_bits,
                "elapsed_ms": elapsed_ms(st.elapsed),
            })
        );
    } else {
        println!("{value}");
    }
    Ok(EXIT_OK)
}

fn cmd_factorial(
    k: u64,
    method: FactorialMethodArg,
    budget_bits: Option<u64>,
    json: bool,
) -> Result<u8, CmdError> {
    let budget = resolve_budget(budget_bits)?;
    let (value, st, name) = match method {
        FactorialMethodArg::Term => {
            let (v, st) = factorial_term_value(k, &budget)?;
            (v, st, "term")
        }
        FactorialMethodArg::Matiyasevich => {
            if k < 2 {
                return Err(CmdError::usage(format!(
                    "the binomial-quotient identity needs k >= 2, got {k}"
                )));
            }
            (
                oracles::factorial_matiyasevich(k),
                Default::default(),
                "matiyasevich",
            )
        }
        FactorialMethodArg::Oracle => (oracles::factorial(k), Default::default(), "oracle"),
    };
    if json {
        println!(
            "{}",
            json!({
                "k": k,
                "method": name,
                "result": int_json(&value),
                "peak_bits": st.peak_bits,
                "elapsed_ms": elapsed_ms(st.elapsed),
            })
        );
    } else {
        println!("{value}");
    }
    Ok(EXIT_OK)
}

fn cmd_factor(
    n: &str,
    mode: FactorMode,
    budget_bits: Option<u64>,
    json: bool,
) -> Result<u8, CmdError> {
    let n = parse_integer(n, "n")?;
    let budget = resolve_budget(budget_bits)?;
    let fr = factor_semiprime(&n, mode, &budget)?;
    if json {
        println!(
            "{}",
            json!({
                "n": int_json(&fr.n),
                "p": int_json(&fr.p),
                "q": int_json(&fr.q),
                "mode": fr.mode.name(),
                "omega": fr.omega,
                "gamma_bits": fr.gamma_bits,
                "verified": fr.verified,
                "outside_paper_formula": fr.outside_paper_formula,
                "peak_bits": fr.stats.peak_bits,
                "elapsed_ms": elapsed_ms(fr.stats.elapsed),
            })
        );
    } else {
        println!("{} {}", fr.p, fr.q);
        if fr.outside_paper_formula {
            eprintln!("note: {n} is a prime square, factored by the oracle root");
        }
    }
    if fr.verified {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_MISMATCH)
    }
}

fn cmd_totient(
    n: &str,
    mode: FactorMode,
    budget_bits: Option<u64>,
    json: bool,
) -> Result<u8, CmdError> {
    let n = parse_integer(n, "n")?;
    let budget = resolve_budget(budget_bits)?;
    let (phi, fr) = totient_semiprime(&n, mode, &budget)?;
    if json {
        println!(
            "{}",
            json!({
                "n": int_json(&n),
                "phi": int_json(&phi),
                "p": int_json(&fr.p),
                "q": int_json(&fr.q),
                "mode": fr.mode.name(),
            })
        );
    } else {
        println!("{phi}");
    }
    Ok(EXIT_OK)
}

fn cmd_estimate(expr: &str, vars: &[String], json: bool) -> Result<u8, CmdError> {
    let term = parse(expr).map_err(|e| CmdError::usage(e.to_string()))?;
    let env = parse_bindings(vars)?;
    let est = estimate_bits(&term, &env)?;
    let u128_json = |v: u128| -> serde_json::Value {
        match u64::try_from(v) {
            Ok(small) => json!(small),
            Err(_) => json!(v.to_string()),
        }
    };
    if json {
        let nodes: Vec<_> = est
            .nodes
            .iter()
            .map(|n| {
                json!({
                    "depth": n.depth,
                    "op": n.label,
                    "bound_bits": u128_json(n.bound_bits),
                })
            })
            .collect();
        println!(
            "{}",
            json!({
                "expr": expr,
                "total_bound_bits": u128_json(est.total_bound_bits),
                "nodes": nodes,
            })
        );
    } else {
        println!("total_bound_bits {}", est.total_bound_bits);
        for n in &est.nodes {
            println!("{}{} {}", "  ".repeat(n.depth), n.label, n.bound_bits);
        }
    }
    Ok(EXIT_OK)
}
