use aterm_bench::bench_gcd_pairs;
use aterm_core::{gcd, EvalBudget, GcdMethod};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn gcd_methods(c: &mut Criterion) {
    let budget = EvalBudget::default();
    let mut group = c.benchmark_group("gcd");
    for (a, b) in bench_gcd_pairs() {
        for method in [
            GcdMethod::Euclid,
            GcdMethod::PolyBase,
            GcdMethod::ModMod,
            GcdMethod::Mazzanti,
        ] {
            let id = BenchmarkId::new(method.name(), format!("{a}_{b}"));
            group.bench_function(id, |bench| {
                bench.iter(|| gcd(&a, &b, method, None, &budget).unwrap().0)
            });
        }
    }
    group.finish();
}

criterion_group!(benches, gcd_methods);
criterion_main!(benches);
