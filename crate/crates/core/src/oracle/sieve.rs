//! Linear sieve for the Möbius function, smallest prime factors and primes.

use crate::error::{Error, Result};

/// Largest sieve limit accepted. Tables cost about five bytes per entry.
pub const SIEVE_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ArithmeticTables {
    limit: u64,
    mobius: Vec<i8>,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

/// Builds the tables for `1..=limit` by the linear (Euler) sieve.
pub fn sieve(limit: u64) -> Result<ArithmeticTables> {
    if limit > SIEVE_BUDGET {
        return Err(Error::Resource {
            requested: limit,
            budget: SIEVE_BUDGET,
        });
    }
    let limit = limit.max(2);
    let n = limit as usize;
    let mut mobius = vec![0i8; n + 1];
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    mobius[1] = 1;
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            mobius[i] = -1;
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            let m = i * p as usize;
            if p > si || m > n {
                break;
            }
            spf[m] = p;
            mobius[m] = if p == si { 0 } else { -mobius[i] };
        }
    }
    Ok(ArithmeticTables {
        limit,
        mobius,
        spf,
        primes,
    })
}

impl ArithmeticTables {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn mobius(&self, n: u64) -> i8 {
        self.mobius[n as usize]
    }

    pub fn spf(&self, n: u64) -> u64 {
        self.spf[n as usize] as u64
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn is_squarefree(&self, n: u64) -> bool {
        self.mobius(n) != 0
    }

    /// Distinct prime divisors of `n`, ascending.
    pub fn prime_divisors(&self, mut n: u64) -> Vec<u64> {
        let mut out = Vec::new();
        while n > 1 {
            let p = self.spf(n);
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        out
    }

    /// `sum_{k <= n} mu(k)`.
    pub fn mertens(&self, n: u64) -> i64 {
        self.mobius[1..=n as usize].iter().map(|&m| m as i64).sum()
    }

    /// `pi(n)` for `n <= limit`.
    pub fn prime_count(&self, n: u64) -> usize {
        self.primes.partition_point(|&p| (p as u64) <= n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let t = sieve(100).unwrap();
        assert_eq!(t.mobius(1), 1);
        assert_eq!(t.mobius(2), -1);
        assert_eq!(t.mobius(4), 0);
        assert_eq!(t.mobius(30), -1);
        assert_eq!(t.spf(91), 7);
        assert_eq!(t.prime_divisors(60), vec![2, 3, 5]);
        assert_eq!(t.prime_count(100), 25);
    }

    #[test]
    fn mobius_is_multiplicative() {
        let t = sieve(2000).unwrap();
        for a in 1..45u64 {
            for b in 1..45u64 {
                if gcd(a, b) == 1 {
                    assert_eq!(t.mobius(a * b), t.mobius(a) * t.mobius(b));
                }
            }
        }
    }

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn over_budget_is_resource_error() {
        assert!(matches!(
            sieve(SIEVE_BUDGET + 1),
            Err(Error::Resource { .. })
        ));
    }
}
