//! Small arithmetic helpers shared by the oracles.

use num_complex::Complex64;

use super::sieve::ArithmeticTables;
use crate::polynomial::factorial;
use crate::scalar::KahanSum;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `e_m(xs)`, the m-th elementary symmetric polynomial.
pub fn elementary_symmetric(xs: &[f64], m: usize) -> f64 {
    let mut e = vec![0.0; m + 1];
    e[0] = 1.0;
    for &x in xs {
        for k in (1..=m).rev() {
            e[k] += e[k - 1] * x;
        }
    }
    e[m]
}

/// `sum_{p_1 ... p_m | j} log p_1 ... log p_m` over ordered m-tuples of
/// pairwise distinct primes, given the logs of the prime divisors of `j`.
pub fn ordered_tuple_sum(logs: &[f64], m: usize) -> f64 {
    if m == 0 {
        return 1.0;
    }
    factorial(m as u64) as f64 * elementary_symmetric(logs, m)
}

/// Same sum over unordered tuples (sets) of distinct primes.
pub fn unordered_tuple_sum(logs: &[f64], m: usize) -> f64 {
    elementary_symmetric(logs, m)
}

/// `F(j, w) = prod_{p | j} (1 - p^-w)`.
pub fn euler_factor(primes: &[u64], w: Complex64) -> Complex64 {
    primes
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, &p| {
            acc * (1.0 - (-w * (p as f64).ln()).exp())
        })
}

/// `F_1(j, w) = prod_{p | j} (1 + p^-w)` for real `w`.
pub fn euler_factor_plus(primes: &[u64], w: f64) -> f64 {
    primes
        .iter()
        .map(|&p| 1.0 + (p as f64).powf(-w))
        .product()
}

/// Logs of the distinct prime divisors of `n`.
pub fn prime_logs(tables: &ArithmeticTables, n: u64) -> Vec<f64> {
    tables
        .prime_divisors(n)
        .into_iter()
        .map(|p| (p as f64).ln())
        .collect()
}

/// `Lambda(n)` for `0 <= n <= limit` (slot 0 unused).
pub fn von_mangoldt(tables: &ArithmeticTables, limit: u64) -> Vec<f64> {
    let mut out = vec![0.0; limit as usize + 1];
    for n in 2..=limit {
        let p = tables.spf(n);
        let mut m = n;
        while m % p == 0 {
            m /= p;
        }
        if m == 1 {
            out[n as usize] = (p as f64).ln();
        }
    }
    out
}

/// Dirichlet convolution `(f * g)(n) = sum_{d | n} f(d) g(n / d)` for
/// `1 <= n < len`, by direct enumeration of divisor pairs.
pub fn dirichlet_convolve(f: &[f64], g: &[f64]) -> Vec<f64> {
    let len = f.len().min(g.len());
    let mut acc: Vec<KahanSum<f64>> = vec![KahanSum::new(); len];
    for d in 1..len {
        if f[d] == 0.0 {
            continue;
        }
        let mut e = 1;
        while d * e < len {
            acc[d * e].add(f[d] * g[e]);
            e += 1;
        }
    }
    acc.iter().map(KahanSum::value).collect()
}
