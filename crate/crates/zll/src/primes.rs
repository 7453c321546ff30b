//! Exact prime counting over a fixed range.
//!
//! An odd-only sieve bitmap with per-word cumulative counts answers
//! `prime_pi` in O(1) after a one-pass build. The default limit of 1e7
//! covers every run this crate performs; analytic approximations are out
//! of scope.

use crate::error::{Error, Result};
use crate::EULER;

/// Default sieve limit; covers all desk-scale runs.
pub const DEFAULT_PRIME_LIMIT: usize = 10_000_000;

/// Sieve-backed prime counter for x in [0, limit].
///
/// Bit i of the bitmap is set iff 2i+1 is prime (bit 0, the number 1, is
/// clear). `cum[w]` counts prime bits in words before w, so a query is one
/// table read plus one masked popcount.
pub struct PrimeCounter {
    limit: usize,
    words: Vec<u64>,
    cum: Vec<u32>,
}

impl PrimeCounter {
    pub fn new(limit: usize) -> Result<Self> {
        if limit < 3 {
            return Err(Error::Config(format!("sieve limit must be >= 3, got {limit}")));
        }
        let n_bits = limit / 2 + 1; // odd numbers 1, 3, .., up to limit
        let n_words = n_bits.div_ceil(64);
        let mut words = vec![u64::MAX; n_words];
        // Clear bit 0 (the number 1) and any bits past the limit.
        words[0] &= !1u64;
        let excess = n_words * 64 - n_bits;
        if excess > 0 {
            words[n_words - 1] &= u64::MAX >> excess;
        }
        let mut p = 3usize;
        while p * p <= limit {
            if words[(p - 1) / 2 / 64] >> ((p - 1) / 2 % 64) & 1 == 1 {
                let mut q = p * p;
                while q <= limit {
                    let bit = (q - 1) / 2;
                    words[bit / 64] &= !(1u64 << (bit % 64));
                    q += 2 * p;
                }
            }
            p += 2;
        }
        let mut cum = Vec::with_capacity(n_words);
        let mut running = 0u32;
        for &w in &words {
            cum.push(running);
            running += w.count_ones();
        }
        Ok(Self { limit, words, cum })
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    /// Exact count of primes <= floor(x).
    pub fn prime_pi(&self, x: f64) -> Result<u64> {
        if !(x >= 0.0) {
            return Err(Error::Domain(format!("prime_pi needs x >= 0, got {x}")));
        }
        if x > self.limit as f64 {
            return Err(Error::Domain(format!(
                "prime_pi range is x <= {}, got {x}",
                self.limit
            )));
        }
        let n = x.floor() as usize;
        if n < 2 {
            return Ok(0);
        }
        if n == 2 {
            return Ok(1);
        }
        let m = if n % 2 == 0 { n - 1 } else { n }; // largest odd <= n
        let bit = (m - 1) / 2;
        let (w, r) = (bit / 64, bit % 64);
        let mask = if r == 63 { u64::MAX } else { (1u64 << (r + 1)) - 1 };
        let odd = u64::from(self.cum[w]) + u64::from((self.words[w] & mask).count_ones());
        Ok(odd + 1) // +1 for the prime 2
    }

    /// (1 - c) * pi(t) with c the Euler constant: the predicted lag between
    /// t and its ladder companion.
    pub fn expected_drift(&self, t: f64) -> Result<f64> {
        Ok((1.0 - EULER) * self.prime_pi(t)? as f64)
    }
}
