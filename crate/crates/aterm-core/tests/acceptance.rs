//! Acceptance gate: one test per criterion, each printing a single
//! PASS/FAIL line (run with `--nocapture` to see the lines for passing
//! criteria; failing criteria always show theirs).
//!
//! Two criteria are expected to fail and are left red on purpose:
//!
//! * Criterion 1: the integer-base gcd corollary is stated for base > 2 and
//!   base > gcd(a,b), but it is false when b = 1 and the automatic base
//!   clamps to 3: floor(3^(a+a) / ((3^a-1)*(3-1))) mod 3 = 2, not
//!   gcd(a,1) = 1, for every a >= 1. Base 4 repairs every such case, so
//!   the defect is in the stated hypothesis, not the implementation.
//! * Criterion 3: the claim that floor(2^(a+ab)/((2^a-1)(2^b-1))) is
//!   always even is false for 56 of the 256 pairs in 1..=16 (first
//!   counterexample a=2, b=1: floor(64/3) = 21).
//!
//! The omega >= 11 factor cases (n >= 122; minutes of modular powering
//! each on one core) are covered by the `#[ignore]`d `large_` tests:
//! `cargo test --release --test acceptance -- --ignored`.

use aterm_core::{
    build_factorial_term, build_gcd_term, build_isqrt_term, evaluate, factor_semiprime,
    factorial_term_value, gcd, oracles, parse, totient_semiprime, Bindings, EvalBudget, FactorMode,
    GcdMethod, Integer, Strategy as EvalStrategy, Term,
};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;
use std::time::Instant;

fn report(id: u32, name: &str, ok: bool, detail: &str) {
    println!(
        "criterion {id:2} ({name}): {} — {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {id} ({name}): {detail}");
}

fn bits(v: &Integer) -> u64 {
    v.significant_bits().max(1) as u64
}

fn secs(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

/// Non-square semiprimes in `[lo, hi]`, ascending.
fn nonsquare_semiprimes(lo: u32, hi: u32) -> Vec<Integer> {
    (lo..=hi)
        .map(Integer::from)
        .filter(oracles::is_nonsquare_semiprime)
        .collect()
}

#[test]
fn criterion_01_gcd_equivalence_sweep() {
    let t0 = Instant::now();
    let budget = EvalBudget::default();
    let mut cases = 0;
    let mut mismatches = Vec::new();
    for a in 1u32..=64 {
        for b in 1u32..=64 {
            cases += 1;
            let (ia, ib) = (Integer::from(a), Integer::from(b));
            let want = oracles::gcd_euclid(&ia, &ib);
            for method in [GcdMethod::PolyBase, GcdMethod::ModMod] {
                let (got, _) = gcd(&ia, &ib, method, None, &budget).unwrap();
                if got != want {
                    mismatches.push((a, b, method.name(), got));
                }
            }
        }
    }
    let base3_b1 = mismatches
        .iter()
        .all(|(_, b, _, got)| *b == 1 && *got == 2);
    report(
        1,
        "gcd equivalence sweep 1..=64",
        mismatches.is_empty(),
        &format!(
            "{cases} cases, {} mismatching method results in {:.1} s{}",
            mismatches.len(),
            secs(t0),
            if !mismatches.is_empty() && base3_b1 {
                "; every mismatch has b=1 with automatic base 3 returning 2 \
                 (the corollary's base > 2, base > gcd hypothesis is \
                 insufficient there; base 4 fixes all of them)"
            } else {
                ""
            }
        ),
    );
}

#[test]
fn criterion_02_mazzanti_sweep() {
    let t0 = Instant::now();
    let budget = EvalBudget::default();
    let mut mismatches = 0;
    for a in 1u32..=12 {
        for b in 1u32..=12 {
            let (ia, ib) = (Integer::from(a), Integer::from(b));
            let want = oracles::gcd_euclid(&ia, &ib);
            let (got, _) = gcd(&ia, &ib, GcdMethod::Mazzanti, None, &budget).unwrap();
            if got != want {
                mismatches += 1;
            }
        }
    }
    let elapsed = secs(t0);
    report(
        2,
        "mazzanti gcd sweep 1..=12",
        mismatches == 0 && elapsed < 60.0,
        &format!("144 cases, {mismatches} mismatches in {elapsed:.1} s"),
    );
}

#[test]
fn criterion_03_base2_evenness() {
    let mut odd = Vec::new();
    for a in 1u32..=16 {
        for b in 1u32..=16 {
            let num = Integer::from(1) << (a + a * b);
            let den = ((Integer::from(1) << a) - 1u32) * ((Integer::from(1) << b) - 1u32);
            let q = num / den;
            if q.is_odd() {
                odd.push((a, b));
            }
        }
    }
    report(
        3,
        "base-2 quotient evenness 1..=16",
        odd.is_empty(),
        &format!(
            "256 cases, {} odd quotients{}",
            odd.len(),
            if odd.is_empty() {
                String::new()
            } else {
                format!(
                    "; the evenness claim is false, first counterexamples {:?}",
                    &odd[..odd.len().min(4)]
                )
            }
        ),
    );
}

#[test]
fn criterion_04_isqrt_term_sweep() {
    let t0 = Instant::now();
    let budget = EvalBudget::default();
    let env = Bindings::new();
    let mut cases = 0;
    let mut mismatches = 0;
    for n in 3u32..=300 {
        let ni = Integer::from(n);
        let root = oracles::isqrt(&ni);
        if Integer::from(&root * &root) == ni {
            continue;
        }
        cases += 1;
        let term = build_isqrt_term(&ni).unwrap();
        let (got, _) = evaluate(&term, &env, &budget, EvalStrategy::Rewrite).unwrap();
        if got != root {
            mismatches += 1;
        }
    }
    // The known deviation at n=2 is reproduced and excluded from the count:
    // the term yields 0 while floor(sqrt(2)) = 1.
    let term2 = build_isqrt_term(&Integer::from(2)).unwrap();
    let (at2, _) = evaluate(&term2, &env, &budget, EvalStrategy::Naive).unwrap();
    let elapsed = secs(t0);
    report(
        4,
        "isqrt term sweep, non-squares 3..=300",
        mismatches == 0 && elapsed < 120.0 && at2 == 0,
        &format!(
            "{cases} cases, {mismatches} mismatches in {elapsed:.1} s; \
             n=2 deviation reproduced (term gives {at2}, true root 1) and excluded"
        ),
    );
}

#[test]
fn criterion_05_factorial_term() {
    let t0 = Instant::now();
    let budget = EvalBudget::default();
    let env = Bindings::new();
    let mut mismatches = 0;
    for w in 2u64..=5 {
        let term = build_factorial_term(w).unwrap();
        let (got, _) = evaluate(&term, &env, &budget, EvalStrategy::Naive).unwrap();
        if got != oracles::factorial(w) {
            mismatches += 1;
        }
    }
    let small_elapsed = secs(t0);
    // w = 6 peaks near 7.8e8 bits, inside the default 2^30-bit budget.
    let t6 = Instant::now();
    let w6 = factorial_term_value(6, &budget);
    let w6_ok = matches!(&w6, Ok((v, _)) if *v == oracles::factorial(6));
    report(
        5,
        "factorial term w=2..=5 and w=6",
        mismatches == 0 && small_elapsed < 60.0 && w6_ok,
        &format!(
            "w<=5: {mismatches} mismatches in {small_elapsed:.1} s; \
             w=6 {} in {:.1} s",
            if w6_ok { "evaluates to 720" } else { "failed" },
            secs(t6)
        ),
    );
}

#[test]
fn criterion_06_matiyasevich_identity() {
    let t0 = Instant::now();
    let mut mismatches = 0;
    for k in 2u64..=20 {
        if oracles::factorial_matiyasevich(k) != oracles::factorial(k) {
            mismatches += 1;
        }
    }
    let elapsed = secs(t0);
    report(
        6,
        "binomial-quotient factorial identity k=2..=20",
        mismatches == 0 && elapsed < 10.0,
        &format!("19 cases, {mismatches} mismatches in {elapsed:.1} s"),
    );
}

#[test]
fn criterion_07_pure_mode_factorization() {
    let t0 = Instant::now();
    let budget = EvalBudget::default();
    let mut failures = Vec::new();
    for n in [6u32, 15, 21, 33, 35] {
        let ni = Integer::from(n);
        let want = oracles::trial_division(&ni);
        match factor_semiprime(&ni, FactorMode::Pure, &budget) {
            Ok(fr) if fr.verified && fr.p == want[0] && fr.q == want[1] => {}
            _ => failures.push(n),
        }
    }
    let elapsed = secs(t0);
    report(
        7,
        "pure-mode factorization",
        failures.is_empty() && elapsed < 300.0,
        &format!("5 cases, failures {failures:?} in {elapsed:.1} s"),
    );
}

/// Shared by criteria 8 and 9: the sub-minute hybrid cases (omega <= 10).
fn hybrid_case_list() -> Vec<Integer> {
    nonsquare_semiprimes(6, 121)
}

#[test]
fn criterion_08_hybrid_mode_factorization() {
    let t0 = Instant::now();
    let budget = EvalBudget::default();
    let cases = hybrid_case_list();
    let mut failures = Vec::new();
    for ni in &cases {
        let want = oracles::trial_division(ni);
        match factor_semiprime(ni, FactorMode::Hybrid, &budget) {
            Ok(fr) if fr.verified && fr.p == want[0] && fr.q == want[1] => {}
            _ => failures.push(ni.to_u32().unwrap()),
        }
    }
    let elapsed = secs(t0);
    report(
        8,
        "hybrid-mode factorization, n <= 121",
        failures.is_empty() && elapsed < 600.0,
        &format!(
            "{} cases, failures {failures:?} in {elapsed:.1} s; the 8 cases with \
             omega >= 11 (122 <= n <= 143, ~6 min of modular powering each) run \
             in the ignored large_hybrid_factorization test",
            cases.len()
        ),
    );
}

#[test]
fn criterion_09_totient() {
    let t0 = Instant::now();
    let budget = EvalBudget::default();
    let cases = hybrid_case_list();
    let mut failures = Vec::new();
    for ni in &cases {
        let fs = oracles::trial_division(ni);
        let want = (Integer::from(&fs[0] - 1u32)) * (Integer::from(&fs[1] - 1u32));
        match totient_semiprime(ni, FactorMode::Hybrid, &budget) {
            Ok((phi, _)) if phi == want => {}
            _ => failures.push(ni.to_u32().unwrap()),
        }
    }
    let elapsed = secs(t0);
    report(
        9,
        "totient via factor pipeline, n <= 121",
        failures.is_empty(),
        &format!(
            "{} cases, failures {failures:?} in {elapsed:.1} s (omega >= 11 \
             cases in the ignored large test)",
            cases.len()
        ),
    );
}

/// Evaluates every subterm of `t` independently and checks each pre-order
/// node bound against the actual bit length.
fn check_per_node(t: &Term, budget: &EvalBudget, violations: &mut u64, nodes_checked: &mut u64) {
    let env = Bindings::new();
    let est = aterm_core::estimate_bits(t, &env).unwrap();
    let mut subs = Vec::new();
    t.walk(&mut |s| subs.push(s));
    assert_eq!(subs.len(), est.nodes.len(), "pre-order walks must align");
    for (sub, node) in subs.into_iter().zip(&est.nodes) {
        let (v, _) = evaluate(sub, &env, budget, EvalStrategy::Naive).unwrap();
        *nodes_checked += 1;
        if (bits(&v) as u128) > node.bound_bits {
            *violations += 1;
        }
    }
}

#[test]
fn criterion_10_estimator_soundness() {
    let t0 = Instant::now();
    let budget = EvalBudget::default();
    let mut violations = 0u64;
    let mut nodes = 0u64;

    // Per-node checks on every tractable formula term.
    for a in 1u32..=12 {
        for b in 1u32..=12 {
            let (ia, ib) = (Integer::from(a), Integer::from(b));
            for method in [GcdMethod::Mazzanti, GcdMethod::PolyBase, GcdMethod::ModMod] {
                let t = build_gcd_term(&ia, &ib, method, None).unwrap();
                check_per_node(&t, &budget, &mut violations, &mut nodes);
            }
        }
    }
    for n in 3u32..=50 {
        let ni = Integer::from(n);
        let root = oracles::isqrt(&ni);
        if Integer::from(&root * &root) != ni {
            check_per_node(&build_isqrt_term(&ni).unwrap(), &budget, &mut violations, &mut nodes);
        }
    }
    for w in 2u64..=5 {
        check_per_node(&build_factorial_term(w).unwrap(), &budget, &mut violations, &mut nodes);
    }
    for n in [15u32, 21, 33, 35] {
        let ni = Integer::from(n);
        let gamma = oracles::factorial(oracles::isqrt(&ni).to_u64().unwrap());
        let t = build_gcd_term(&ni, &gamma, GcdMethod::PolyBase, Some(&ni)).unwrap();
        check_per_node(&t, &budget, &mut violations, &mut nodes);
    }

    // Whole-term peak check where per-node evaluation is intractable: the
    // estimate's maximum node bound must cover the observed evaluation peak
    // (including the working size of rewritten modular powerings).
    let mut peak_violations = 0u64;
    for n in [77u32, 91] {
        let ni = Integer::from(n);
        let gamma = oracles::factorial(oracles::isqrt(&ni).to_u64().unwrap());
        let t = build_gcd_term(&ni, &gamma, GcdMethod::ModMod, Some(&ni)).unwrap();
        let est = aterm_core::estimate_bits(&t, &Bindings::new()).unwrap();
        let (_, stats) = evaluate(&t, &Bindings::new(), &budget, EvalStrategy::Rewrite).unwrap();
        if est.total_bound_bits < stats.peak_bits as u128 {
            peak_violations += 1;
        }
    }

    report(
        10,
        "estimator soundness",
        violations == 0 && peak_violations == 0,
        &format!(
            "{nodes} nodes checked individually ({violations} violations), \
             2 large terms checked against the observed peak \
             ({peak_violations} violations) in {:.1} s",
            secs(t0)
        ),
    );
}

/// Leaves are literals up to 2^16 (optionally variables); depth <= 6.
fn arb_term(with_vars: bool) -> impl Strategy<Value = Term> {
    let leaf = if with_vars {
        prop_oneof![
            (0u32..=65535).prop_map(|v| Term::lit(v)),
            prop_oneof![Just("x"), Just("y"), Just("z")].prop_map(|n| Term::var(n)),
        ]
        .boxed()
    } else {
        (0u32..=65535).prop_map(|v| Term::lit(v)).boxed()
    };
    leaf.prop_recursive(6, 96, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| l.add(r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| l.sub(r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| l.mul(r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| l.div(r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| l.modulo(r)),
            (inner.clone(), inner).prop_map(|(l, r)| l.pow(r)),
        ]
    })
}

#[test]
fn criterion_11_strategy_fidelity() {
    let t0 = Instant::now();
    let budget = EvalBudget::new(1 << 22);
    let env: Bindings = [("x", 7u32), ("y", 12), ("z", 300)].into_iter().collect();
    let mut runner = TestRunner::deterministic();
    let strategy = arb_term(true);
    let mut compared = 0u64;
    let mut disagreements = 0u64;
    let mut generated = 0u64;
    while compared < 500 {
        generated += 1;
        assert!(generated < 50_000, "random term generation stalled");
        let t = strategy.new_tree(&mut runner).unwrap().current();
        // Terms whose naive evaluation hits a domain or budget error carry
        // no comparable value; both strategies must still agree when naive
        // completes.
        let naive = match evaluate(&t, &env, &budget, EvalStrategy::Naive) {
            Ok((v, _)) => v,
            Err(_) => continue,
        };
        compared += 1;
        match evaluate(&t, &env, &budget, EvalStrategy::Rewrite) {
            Ok((v, _)) if v == naive => {}
            _ => disagreements += 1,
        }
    }

    // Every formula term from criteria 1-7 at tractable sizes, both ways.
    let default_budget = EvalBudget::default();
    let closed = Bindings::new();
    let mut formula_terms: Vec<Term> = Vec::new();
    for a in 1u32..=16 {
        for b in 1u32..=16 {
            let (ia, ib) = (Integer::from(a), Integer::from(b));
            formula_terms.push(build_gcd_term(&ia, &ib, GcdMethod::PolyBase, None).unwrap());
            formula_terms.push(build_gcd_term(&ia, &ib, GcdMethod::ModMod, None).unwrap());
            if a <= 8 && b <= 8 {
                formula_terms.push(build_gcd_term(&ia, &ib, GcdMethod::Mazzanti, None).unwrap());
            }
        }
    }
    for n in 3u32..=100 {
        formula_terms.push(build_isqrt_term(&Integer::from(n)).unwrap());
    }
    for w in 2u64..=5 {
        formula_terms.push(build_factorial_term(w).unwrap());
    }
    for n in [6u32, 15, 21, 33, 35] {
        let ni = Integer::from(n);
        let gamma = oracles::factorial(oracles::isqrt(&ni).to_u64().unwrap());
        formula_terms.push(build_gcd_term(&ni, &gamma, GcdMethod::PolyBase, Some(&ni)).unwrap());
        formula_terms.push(build_gcd_term(&ni, &gamma, GcdMethod::ModMod, Some(&ni)).unwrap());
    }
    let mut formula_disagreements = 0u64;
    for t in &formula_terms {
        let (a, _) = evaluate(t, &closed, &default_budget, EvalStrategy::Naive).unwrap();
        let (b, _) = evaluate(t, &closed, &default_budget, EvalStrategy::Rewrite).unwrap();
        if a != b {
            formula_disagreements += 1;
        }
    }

    report(
        11,
        "strategy fidelity",
        disagreements == 0 && formula_disagreements == 0,
        &format!(
            "{compared} random terms ({disagreements} disagreements) and {} \
             formula terms ({formula_disagreements} disagreements) in {:.1} s",
            formula_terms.len(),
            secs(t0)
        ),
    );
}

#[test]
fn criterion_12_parser_round_trip() {
    let mut runner = TestRunner::deterministic();
    let strategy = arb_term(true);
    let mut failures = 0u64;
    for _ in 0..1000 {
        let t = strategy.new_tree(&mut runner).unwrap().current();
        match parse(&t.render()) {
            Ok(back) if back == t => {}
            _ => failures += 1,
        }
    }
    report(
        12,
        "parser round-trip, 1000 random terms",
        failures == 0,
        &format!("{failures} failures"),
    );
}

/// The omega >= 11 half of criteria 8 and 9: eight cases, each several
/// minutes of modular powering on one core (moduli up to ~2.9e8 bits).
#[test]
#[ignore = "runs ~50 minutes; cargo test --release --test acceptance -- --ignored"]
fn large_hybrid_factorization() {
    let t0 = Instant::now();
    let budget = EvalBudget::default();
    let cases = nonsquare_semiprimes(122, 143);
    assert_eq!(cases.len(), 8);
    let mut failures = Vec::new();
    for ni in &cases {
        let want = oracles::trial_division(ni);
        let phi_want = (Integer::from(&want[0] - 1u32)) * (Integer::from(&want[1] - 1u32));
        let fr = factor_semiprime(ni, FactorMode::Hybrid, &budget).unwrap();
        let (phi, _) = totient_semiprime(ni, FactorMode::Hybrid, &budget).unwrap();
        if !(fr.verified && fr.p == want[0] && fr.q == want[1] && phi == phi_want) {
            failures.push(ni.to_u32().unwrap());
        }
        println!(
            "large case n={ni}: p={} q={} ({:.1} s cumulative)",
            fr.p,
            fr.q,
            secs(t0)
        );
    }
    report(
        8,
        "hybrid-mode factorization + totient, 122 <= n <= 143",
        failures.is_empty(),
        &format!("8 cases, failures {failures:?} in {:.1} s", secs(t0)),
    );
}
