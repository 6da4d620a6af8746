//! Elementary arithmetic functions backed by a smallest-prime-factor sieve.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Default sieve limit when nothing else is configured.
pub const DEFAULT_SIEVE_LIMIT: usize = 10_000_000;

/// Environment variable overriding [`DEFAULT_SIEVE_LIMIT`] for the shared sieve.
pub const SIEVE_LIMIT_ENV: &str = "CLT_SIEVE_LIMIT";

/// Smallest-prime-factor table for `2..=limit`.
///
/// Immutable after construction. Queries beyond `limit` fail with a range
/// error instead of falling back to trial division.
#[derive(Debug, Clone)]
pub struct FactorSieve {
    limit: usize,
    spf: Vec<u32>,
}

impl FactorSieve {
    pub fn new(limit: usize) -> Result<Self> {
        if limit < 1 || limit > u32::MAX as usize {
            return Err(Error::range("sieve limit", limit as f64, format!("[1, {}]", u32::MAX)));
        }
        let mut spf = vec![0u32; limit + 1];
        let mut primes: Vec<u32> = Vec::new();
        // Linear sieve: every composite is crossed off exactly once by its least prime.
        for n in 2..=limit {
            if spf[n] == 0 {
                spf[n] = n as u32;
                primes.push(n as u32);
            }
            let p_n = spf[n];
            for &p in &primes {
                let m = n * p as usize;
                if p > p_n || m > limit {
                    break;
                }
                spf[m] = p;
            }
        }
        Ok(Self { limit, spf })
    }

    /// Process-wide sieve, built on first use. The limit comes from
    /// `CLT_SIEVE_LIMIT` when set, otherwise [`DEFAULT_SIEVE_LIMIT`].
    pub fn shared() -> &'static FactorSieve {
        static SHARED: OnceLock<FactorSieve> = OnceLock::new();
        SHARED.get_or_init(|| {
            let limit = std::env::var(SIEVE_LIMIT_ENV)
                .ok()
                .and_then(|v| v.trim().parse::<usize>().ok())
                .filter(|&l| l >= 1)
                .unwrap_or(DEFAULT_SIEVE_LIMIT);
            FactorSieve::new(limit).expect("valid sieve limit")
        })
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    fn check(&self, n: u64) -> Result<usize> {
        if n == 0 || n > self.limit as u64 {
            return Err(Error::range("n", n as f64, format!("[1, {}]", self.limit)));
        }
        Ok(n as usize)
    }

    pub fn smallest_prime_factor(&self, n: u64) -> Result<u64> {
        let n = self.check(n)?;
        Ok(if n == 1 { 1 } else { self.spf[n] as u64 })
    }

    pub fn is_prime(&self, n: u64) -> Result<bool> {
        let m = self.check(n)?;
        Ok(m >= 2 && self.spf[m] as usize == m)
    }

    /// Prime factorisation as `(p, exponent)` pairs in increasing `p`.
    pub fn factorize(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        let mut m = self.check(n)?;
        let mut out: Vec<(u64, u32)> = Vec::new();
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        Ok(out)
    }

    /// Möbius function μ(n).
    pub fn mobius(&self, n: u64) -> Result<i8> {
        let mut m = self.check(n)?;
        let mut sign = 1i8;
        while m > 1 {
            let p = self.spf[m] as usize;
            m /= p;
            if m % p == 0 {
                return Ok(0);
            }
            sign = -sign;
        }
        Ok(sign)
    }

    /// Von Mangoldt function Λ(n).
    pub fn von_mangoldt(&self, n: u64) -> Result<f64> {
        let mut m = self.check(n)?;
        if m == 1 {
            return Ok(0.0);
        }
        let p = self.spf[m] as usize;
        while m % p == 0 {
            m /= p;
        }
        Ok(if m == 1 { (p as f64).ln() } else { 0.0 })
    }

    /// Chebyshev ψ(x) = Σ_{n ≤ x} Λ(n), summed with compensation.
    pub fn chebyshev_psi(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::Domain(format!("chebyshev_psi needs x >= 0, got {x}")));
        }
        let top = x.floor();
        if top > self.limit as f64 {
            return Err(Error::range("x", x, format!("[0, {}]", self.limit)));
        }
        let top = top as usize;
        let mut acc = CompensatedSum::new();
        for n in 2..=top {
            let p = self.spf[n] as usize;
            let mut m = n;
            while m % p == 0 {
                m /= p;
            }
            if m == 1 {
                acc.add((p as f64).ln());
            }
        }
        Ok(acc.value())
    }

    /// Euler totient φ(n).
    pub fn euler_phi(&self, n: u64) -> Result<u64> {
        let mut phi = n;
        for (p, _) in self.factorize(n)? {
            phi = phi / p * (p - 1);
        }
        Ok(phi)
    }

    /// Primes up to `min(bound, limit)`.
    pub fn primes_up_to(&self, bound: u64) -> Vec<u64> {
        let top = (bound as usize).min(self.limit);
        (2..=top)
            .filter(|&n| self.spf[n] as usize == n)
            .map(|n| n as u64)
            .collect()
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Divisors of `n` in increasing order, by trial division.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Trial-division factorisation for moduli that may exceed any sieve.
pub fn factorize_trial(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}
