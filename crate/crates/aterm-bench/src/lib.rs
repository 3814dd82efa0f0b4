//! Shared inputs for the criterion benchmarks.

use aterm_core::Integer;

/// Small non-square semiprimes with cheap factor pipelines.
pub fn bench_semiprimes() -> Vec<Integer> {
    [15u32, 21, 33, 35].into_iter().map(Integer::from).collect()
}

/// Representative gcd input pairs.
pub fn bench_gcd_pairs() -> Vec<(Integer, Integer)> {
    [(12u32, 18u32), (7, 7), (21, 14), (48, 60)]
        .into_iter()
        .map(|(a, b)| (Integer::from(a), Integer::from(b)))
        .collect()
}
