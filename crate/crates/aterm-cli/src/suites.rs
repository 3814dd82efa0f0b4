//! Verification sweeps and the timing bench: every case is checked against
//! a classical oracle, cases run in ascending input order, and results are
//! reported per case (JSON lines) plus a final summary.

use crate::{resolve_budget, CmdError, EXIT_BUDGET, EXIT_MISMATCH, EXIT_OK};
use aterm_core::{
    build_isqrt_term, evaluate, factor_semiprime, factorial_term_value, gcd, oracles, Bindings,
    EvalBudget, EvalStats, FactorMode, FormulaError, GcdMethod, Integer, Strategy, Term,
};
use clap::{Args, ValueEnum};
use serde_json::json;
use std::io::Write;
use std::time::{Duration, Instant};

/// Hybrid factoring at `omega >= 11` works modulo numbers of several
/// hundred megabits and takes minutes per case; those cases are opt-in.
pub const LARGE_OMEGA: u64 = 11;

/// Factorial-term cases above this are opt-in (the `w = 6` term peaks
/// near 8*10^8 bits and takes tens of seconds).
const FACTORIAL_TERM_DEFAULT_MAX: u64 = 5;
const FACTORIAL_TERM_LARGE_MAX: u64 = 6;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Gcd,
    Isqrt,
    Factorial,
    Factor,
    Base2Evenness,
}

impl SuiteArg {
    fn name(self) -> &'static str {
        match self {
            SuiteArg::Gcd => "gcd",
            SuiteArg::Isqrt => "isqrt",
            SuiteArg::Factorial => "factorial",
            SuiteArg::Factor => "factor",
            SuiteArg::Base2Evenness => "base2-evenness",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchSuiteArg {
    GcdMethods,
    FactorModes,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepModeArg {
    Pure,
    Hybrid,
    Oracle,
}

impl From<SweepModeArg> for FactorMode {
    fn from(m: SweepModeArg) -> Self {
        match m {
            SweepModeArg::Pure => FactorMode::Pure,
            SweepModeArg::Hybrid => FactorMode::Hybrid,
            SweepModeArg::Oracle => FactorMode::Oracle,
        }
    }
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: SuiteArg,
    /// Lower end of the sweep range (suite-specific default)
    #[arg(long)]
    min: Option<u64>,
    /// Upper end of the sweep range (suite-specific default)
    #[arg(long)]
    max: Option<u64>,
    /// Factor suite only: pipeline mode to sweep
    #[arg(long, value_enum, default_value = "hybrid")]
    mode: SweepModeArg,
    /// Treat budget-exceeded cases as fatal (exit 3)
    #[arg(long)]
    strict: bool,
    /// Include the multi-minute cases (factor omega >= 11, factorial term w = 6)
    #[arg(long)]
    large: bool,
    #[arg(long)]
    budget_bits: Option<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug)]
struct Mismatch {
    inputs: String,
    expected: String,
    actual: String,
    method: String,
}

/// Aggregate of one sweep.
#[derive(Debug, Default)]
struct Report {
    cases: usize,
    passes: usize,
    mismatches: Vec<Mismatch>,
    budget_skipped: usize,
    large_skipped: usize,
}

impl Report {
    fn case(&mut self, json: bool, suite: &str, inputs: &str, method: &str, expected: String, actual: String) {
        self.cases += 1;
        let ok = expected == actual;
        if ok {
            self.passes += 1;
        } else {
            self.mismatches.push(Mismatch {
                inputs: inputs.to_string(),
                expected: expected.clone(),
                actual: actual.clone(),
                method: method.to_string(),
            });
        }
        if json {
            println!(
                "{}",
                json!({
                    "suite": suite,
                    "inputs": inputs,
                    "method": method,
                    "expected": expected,
                    "actual": actual,
                    "ok": ok,
                })
            );
        }
    }

    fn budget_skip(&mut self, json: bool, suite: &str, inputs: &str, detail: &str) {
        self.budget_skipped += 1;
        if json {
            println!(
                "{}",
                json!({ "suite": suite, "inputs": inputs, "skipped": "budget", "detail": detail })
            );
        } else {
            eprintln!("budget: {suite} {inputs}: {detail}");
        }
    }

    fn large_skip(&mut self, json: bool, suite: &str, inputs: &str) {
        self.large_skipped += 1;
        if json {
            println!("{}", json!({ "suite": suite, "inputs": inputs, "skipped": "large" }));
        } else {
            eprintln!("skipped (large, rerun with --large): {suite} {inputs}");
        }
    }
}

fn range_defaults(suite: SuiteArg) -> (u64, u64) {
    match suite {
        SuiteArg::Gcd => (1, 32),
        SuiteArg::Isqrt => (3, 300),
        SuiteArg::Factorial => (2, 20),
        SuiteArg::Factor => (6, 143),
        SuiteArg::Base2Evenness => (1, 16),
    }
}

pub fn cmd_verify(args: VerifyArgs) -> Result<u8, CmdError> {
    let (dmin, dmax) = range_defaults(args.suite);
    let min = args.min.unwrap_or(dmin);
    let max = args.max.unwrap_or(dmax);
    if min > max {
        return Err(CmdError::usage(format!("empty range {min}..{max}")));
    }
    let budget = resolve_budget(args.budget_bits)?;
    let suite = args.suite.name();
    let started = Instant::now();
    let mut report = Report::default();

    match args.suite {
        SuiteArg::Gcd => sweep_gcd(&args, min, max, &budget, &mut report),
        SuiteArg::Isqrt => sweep_isqrt(&args, min, max, &budget, &mut report),
        SuiteArg::Factorial => sweep_factorial(&args, min, max, &budget, &mut report),
        SuiteArg::Factor => sweep_factor(&args, min, max, &budget, &mut report),
        SuiteArg::Base2Evenness => sweep_base2(&args, min, max, &budget, &mut report),
    }

    let elapsed = started.elapsed();
    if args.json {
        println!(
            "{}",
            json!({
                "suite": suite,
                "range": format!("{min}..={max}"),
                "cases": report.cases,
                "passes": report.passes,
                "mismatches": report.mismatches.len(),
                "budget_skipped": report.budget_skipped,
                "large_skipped": report.large_skipped,
                "elapsed_ms": elapsed.as_secs_f64() * 1e3,
            })
        );
    } else {
        println!(
            "suite={suite} range={min}..={max} cases={} passes={} mismatches={} \
             budget_skipped={} large_skipped={} elapsed_ms={:.1}",
            report.cases,
            report.passes,
            report.mismatches.len(),
            report.budget_skipped,
            report.large_skipped,
            elapsed.as_secs_f64() * 1e3,
        );
        for m in report.mismatches.iter().take(20) {
            println!(
                "mismatch: {} method={} expected={} actual={}",
                m.inputs, m.method, m.expected, m.actual
            );
        }
        if report.mismatches.len() > 20 {
            println!("... and {} more mismatches", report.mismatches.len() - 20);
        }
    }

    if !report.mismatches.is_empty() {
        Ok(EXIT_MISMATCH)
    } else if args.strict && report.budget_skipped > 0 {
        Ok(EXIT_BUDGET)
    } else {
        Ok(EXIT_OK)
    }
}

fn sweep_gcd(args: &VerifyArgs, min: u64, max: u64, budget: &EvalBudget, report: &mut Report) {
    for a in min..=max {
        for b in min..=max {
            let (ia, ib) = (Integer::from(a), Integer::from(b));
            let want = oracles::gcd_euclid(&ia, &ib);
            let inputs = format!("a={a} b={b}");
            let mut methods = vec![GcdMethod::PolyBase, GcdMethod::ModMod];
            if a <= 12 && b <= 12 {
                methods.push(GcdMethod::Mazzanti);
            }
            let mut failed = Vec::new();
            let mut budget_hit = None;
            for method in methods {
                match gcd(&ia, &ib, method, None, budget) {
                    Ok((v, _)) if v == want => {}
                    Ok((v, _)) => failed.push(format!("{}={v}", method.name())),
                    Err(FormulaError::Budget { .. })
                    | Err(FormulaError::Eval(aterm_core::EvalError::BudgetExceeded { .. })) => {
                        budget_hit = Some(method.name());
                    }
                    Err(e) => failed.push(format!("{}!{e}", method.name())),
                }
            }
            if let Some(m) = budget_hit {
                report.budget_skip(args.json, "gcd", &inputs, m);
                continue;
            }
            let actual = if failed.is_empty() {
                want.to_string()
            } else {
                failed.join(",")
            };
            report.case(args.json, "gcd", &inputs, "terms-vs-euclid", want.to_string(), actual);
        }
    }
}

fn sweep_isqrt(args: &VerifyArgs, min: u64, max: u64, budget: &EvalBudget, report: &mut Report) {
    for n in min.max(3)..=max {
        let ni = Integer::from(n);
        let root = oracles::isqrt(&ni);
        if Integer::from(&root * &root) == ni {
            continue; // the closed form only covers non-squares
        }
        let inputs = format!("n={n}");
        let term = build_isqrt_term(&ni).expect("n >= 3");
        match evaluate(&term, &Bindings::new(), budget, Strategy::Rewrite) {
            Ok((v, _)) => {
                report.case(args.json, "isqrt", &inputs, "term-vs-newton", root.to_string(), v.to_string())
            }
            Err(aterm_core::EvalError::BudgetExceeded { .. }) => {
                report.budget_skip(args.json, "isqrt", &inputs, "term evaluation")
            }
            Err(e) => report.case(
                args.json,
                "isqrt",
                &inputs,
                "term-vs-newton",
                root.to_string(),
                format!("error: {e}"),
            ),
        }
    }
}

fn sweep_factorial(args: &VerifyArgs, min: u64, max: u64, budget: &EvalBudget, report: &mut Report) {
    let term_max = if args.large {
        FACTORIAL_TERM_LARGE_MAX
    } else {
        FACTORIAL_TERM_DEFAULT_MAX
    };
    for k in min.max(2)..=max {
        let want = oracles::factorial(k);
        let inputs = format!("k={k}");
        let got = oracles::factorial_matiyasevich(k);
        report.case(
            args.json,
            "factorial",
            &inputs,
            "binomial-quotient",
            want.to_string(),
            got.to_string(),
        );
        if k > term_max {
            if k <= FACTORIAL_TERM_LARGE_MAX {
                report.large_skip(args.json, "factorial", &inputs);
            }
            continue;
        }
        match factorial_term_value(k, budget) {
            Ok((v, _)) => report.case(
                args.json,
                "factorial",
                &inputs,
                "term",
                want.to_string(),
                v.to_string(),
            ),
            Err(FormulaError::Budget { needed_bits, .. }) => report.budget_skip(
                args.json,
                "factorial",
                &inputs,
                &format!("term needs about {needed_bits} bits"),
            ),
            Err(e) => report.case(
                args.json,
                "factorial",
                &inputs,
                "term",
                want.to_string(),
                format!("error: {e}"),
            ),
        }
    }
}

fn sweep_factor(args: &VerifyArgs, min: u64, max: u64, budget: &EvalBudget, report: &mut Report) {
    let mode: FactorMode = args.mode.into();
    for n in min.max(6)..=max {
        let ni = Integer::from(n);
        if !oracles::is_nonsquare_semiprime(&ni) {
            continue;
        }
        let fs = oracles::trial_division(&ni);
        let want = format!("{} {}", fs[0], fs[1]);
        let inputs = format!("n={n}");
        let omega = oracles::isqrt(&ni).to_u64().unwrap();
        if mode == FactorMode::Hybrid && omega >= LARGE_OMEGA && !args.large {
            report.large_skip(args.json, "factor", &inputs);
            continue;
        }
        match factor_semiprime(&ni, mode, budget) {
            Ok(fr) => report.case(
                args.json,
                "factor",
                &inputs,
                mode.name(),
                want,
                format!("{} {}", fr.p, fr.q),
            ),
            Err(FormulaError::Budget { needed_bits, .. }) => report.budget_skip(
                args.json,
                "factor",
                &inputs,
                &format!("{} mode needs about {needed_bits} bits", mode.name()),
            ),
            Err(e) => report.case(args.json, "factor", &inputs, mode.name(), want, format!("error: {e}")),
        }
    }
}

fn sweep_base2(args: &VerifyArgs, min: u64, max: u64, budget: &EvalBudget, report: &mut Report) {
    // The quotient floor(2^(a+ab) / ((2^a-1)(2^b-1))) reduced mod 2: checks
    // whether a base-2 instantiation of the integer-base gcd form could
    // ever report an odd value.
    for a in min..=max {
        for b in min..=max {
            let inputs = format!("a={a} b={b}");
            let expr = Term::lit(2)
                .pow(Term::lit(Integer::from(a) * b + a))
                .div(
                    Term::lit(2)
                        .pow(Term::lit(a))
                        .sub(Term::lit(1))
                        .mul(Term::lit(2).pow(Term::lit(b)).sub(Term::lit(1))),
                );
            let (v, _) = evaluate(&expr, &Bindings::new(), budget, Strategy::Naive)
                .expect("small closed term");
            let parity = if v.is_even() { "even" } else { "odd" };
            report.case(args.json, "base2-evenness", &inputs, "parity", "even".into(), parity.into());
        }
    }
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    suite: BenchSuiteArg,
    #[arg(long)]
    min: Option<u64>,
    #[arg(long)]
    max: Option<u64>,
    /// Write rows to this file; without it rows go to stdout
    #[arg(long)]
    csv: Option<std::path::PathBuf>,
    /// Include the multi-minute factor cases (omega >= 11)
    #[arg(long)]
    large: bool,
    #[arg(long)]
    budget_bits: Option<u64>,
}

struct BenchRow {
    suite: &'static str,
    method: &'static str,
    a: Option<u64>,
    b: Option<u64>,
    n: Option<u64>,
    peak_bits: u64,
    elapsed: Duration,
    ok: bool,
}

impl BenchRow {
    fn csv_line(&self) -> String {
        let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{}",
            self.suite,
            self.method,
            opt(self.a),
            opt(self.b),
            opt(self.n),
            self.peak_bits,
            self.elapsed.as_micros(),
            self.ok
        )
    }
}

const CSV_HEADER: &str = "suite,method,a,b,n,peak_bits,elapsed_us,ok";

pub fn cmd_bench(args: BenchArgs) -> Result<u8, CmdError> {
    let (dmin, dmax) = match args.suite {
        BenchSuiteArg::GcdMethods => (1, 32),
        BenchSuiteArg::FactorModes => (6, 143),
    };
    let min = args.min.unwrap_or(dmin);
    let max = args.max.unwrap_or(dmax);
    if min > max {
        return Err(CmdError::usage(format!("empty range {min}..{max}")));
    }
    let budget = resolve_budget(args.budget_bits)?;
    let rows = match args.suite {
        BenchSuiteArg::GcdMethods => bench_gcd_methods(min, max, &budget),
        BenchSuiteArg::FactorModes => bench_factor_modes(min, max, &budget, args.large),
    };
    if rows.is_empty() {
        return Err(CmdError::usage(format!(
            "no benchmark cases in range {min}..{max}"
        )));
    }

    let bad = rows.iter().filter(|r| !r.ok).count();
    let summary = format!("rows={} ok={} failed={bad}", rows.len(), rows.len() - bad);
    match &args.csv {
        Some(path) => {
            let mut f = std::fs::File::create(path)
                .map_err(|e| CmdError::usage(format!("cannot write {}: {e}", path.display())))?;
            writeln!(f, "{CSV_HEADER}").and_then(|_| {
                rows.iter().try_for_each(|r| writeln!(f, "{}", r.csv_line()))
            })
            .map_err(|e| CmdError::usage(format!("write error: {e}")))?;
            println!("{summary} csv={}", path.display());
        }
        None => {
            println!("{CSV_HEADER}");
            for r in &rows {
                println!("{}", r.csv_line());
            }
            eprintln!("{summary}");
        }
    }
    Ok(if bad > 0 { EXIT_MISMATCH } else { EXIT_OK })
}

fn timed_gcd(
    a: &Integer,
    b: &Integer,
    method: GcdMethod,
    budget: &EvalBudget,
) -> Option<(Integer, EvalStats)> {
    match method {
        GcdMethod::Euclid => {
            let t0 = Instant::now();
            let v = oracles::gcd_euclid(a, b);
            let stats = EvalStats {
                elapsed: t0.elapsed(),
                ..Default::default()
            };
            Some((v, stats))
        }
        _ => gcd(a, b, method, None, budget).ok(),
    }
}

fn bench_gcd_methods(min: u64, max: u64, budget: &EvalBudget) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    for a in min..=max {
        for b in min..=max {
            let (ia, ib) = (Integer::from(a), Integer::from(b));
            let want = oracles::gcd_euclid(&ia, &ib);
            let mut methods = vec![GcdMethod::Euclid, GcdMethod::PolyBase, GcdMethod::ModMod];
            if a <= 12 && b <= 12 {
                methods.push(GcdMethod::Mazzanti);
            }
            for method in methods {
                if let Some((v, stats)) = timed_gcd(&ia, &ib, method, budget) {
                    rows.push(BenchRow {
                        suite: "gcd-methods",
                        method: method.name(),
                        a: Some(a),
                        b: Some(b),
                        n: None,
                        peak_bits: stats.peak_bits,
                        elapsed: stats.elapsed,
                        ok: v == want,
                    });
                }
            }
        }
    }
    rows
}

fn bench_factor_modes(min: u64, max: u64, budget: &EvalBudget, large: bool) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    for n in min.max(6)..=max {
        let ni = Integer::from(n);
        if !oracles::is_nonsquare_semiprime(&ni) {
            continue;
        }
        let fs = oracles::trial_division(&ni);
        let omega = oracles::isqrt(&ni).to_u64().unwrap();
        let mut modes = vec![FactorMode::Oracle];
        if omega < LARGE_OMEGA || large {
            modes.push(FactorMode::Hybrid);
        }
        if omega <= 6 {
            modes.push(FactorMode::Pure);
        }
        for mode in modes {
            let t0 = Instant::now();
            match factor_semiprime(&ni, mode, budget) {
                Ok(fr) => rows.push(BenchRow {
                    suite: "factor-modes",
                    method: mode.name(),
                    a: None,
                    b: None,
                    n: Some(n),
                    peak_bits: fr.stats.peak_bits,
                    elapsed: t0.elapsed(),
                    ok: fr.p == fs[0] && fr.q == fs[1],
                }),
                Err(_) => rows.push(BenchRow {
                    suite: "factor-modes",
                    method: mode.name(),
                    a: None,
                    b: None,
                    n: Some(n),
                    peak_bits: 0,
                    elapsed: t0.elapsed(),
                    ok: false,
                }),
            }
        }
    }
    rows
}
