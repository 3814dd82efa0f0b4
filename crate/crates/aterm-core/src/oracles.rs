//! Classical reference algorithms. Everything the formula terms compute is
//! cross-checked against these.

use rug::ops::Pow;
use rug::Integer;

/// Euclid's algorithm. Panics if both arguments are zero.
pub fn gcd_euclid(a: &Integer, b: &Integer) -> Integer {
    assert!(
        *a != 0 || *b != 0,
        "gcd(0, 0) is undefined"
    );
    let mut a = a.clone().abs();
    let mut b = b.clone().abs();
    while b != 0 {
        let r = a % &b;
        a = std::mem::replace(&mut b, r);
    }
    a
}

/// Integer square root by Newton iteration: returns `r` with
/// `r*r <= n < (r+1)*(r+1)`.
pub fn isqrt(n: &Integer) -> Integer {
    assert!(*n >= 0, "isqrt of a negative number");
    if *n < 2 {
        return n.clone();
    }
    // Start above the true root so the iteration decreases monotonically.
    let bits = n.significant_bits();
    let mut x = Integer::from(1) << (bits / 2 + 1);
    loop {
        let y: Integer = (Integer::from(n / &x) + &x) >> 1;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// Exact `k!`.
pub fn factorial(k: u64) -> Integer {
    let mut acc = Integer::from(1);
    for i in 2..=k {
        acc *= i;
    }
    acc
}

/// Exact binomial coefficient `C(r, k)` by the product formula with
/// running division (each partial quotient is an integer).
pub fn binomial(r: &Integer, k: u64) -> Integer {
    assert!(*r >= k, "binomial needs r >= k");
    let mut acc = Integer::from(1);
    for i in 1..=k {
        acc *= Integer::from(r - k) + i;
        acc /= i;
    }
    acc
}

/// `k!` through the identity `k! = floor(r^k / C(r, k))` with
/// `r = (k+1)^(k+2)` (Matiyasevich). Requires `k >= 2`.
pub fn factorial_matiyasevich(k: u64) -> Integer {
    assert!(k >= 2);
    let r = Integer::from(k + 1).pow(u32::try_from(k + 2).expect("desk-scale k"));
    let num = r.clone().pow(u32::try_from(k).unwrap());
    num / binomial(&r, k)
}

/// Prime factorization by trial division up to the square root, factors in
/// non-decreasing order. Requires `n >= 2`.
pub fn trial_division(n: &Integer) -> Vec<Integer> {
    assert!(*n >= 2, "trial division needs n >= 2");
    let mut factors = Vec::new();
    let mut m = n.clone();
    let mut d = Integer::from(2);
    while Integer::from(&d * &d) <= m {
        while m.is_divisible(&d) {
            m /= &d;
            factors.push(d.clone());
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        factors.push(m);
    }
    factors
}

pub fn is_prime(n: &Integer) -> bool {
    *n >= 2 && trial_division(n).len() == 1
}

/// Exactly two prime factors, equal or not.
pub fn is_semiprime(n: &Integer) -> bool {
    *n >= 2 && trial_division(n).len() == 2
}

/// A semiprime with two distinct prime factors.
pub fn is_nonsquare_semiprime(n: &Integer) -> bool {
    if *n < 2 {
        return false;
    }
    let fs = trial_division(n);
    fs.len() == 2 && fs[0] != fs[1]
}
