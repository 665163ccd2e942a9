//! The coefficient field F_q and its residue arithmetic.
//!
//! Only odd primes q with q ≡ 1 (mod 4) are accepted: quadratic reciprocity
//! in F_q[T] is then sign-free, and a prime q keeps field elements plain
//! residues. Prime powers are rejected.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Field parameters for F_q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Field {
    q: u64,
}

impl Field {
    /// Validate and build field parameters. Requires q prime, q ≡ 1 (mod 4), q ≥ 5.
    pub fn new(q: u64) -> Result<Self> {
        if q < 5 {
            return Err(Error::Field(format!("q = {q} must be at least 5")));
        }
        if q % 4 != 1 {
            return Err(Error::Field(format!("q = {q} must satisfy q ≡ 1 (mod 4)")));
        }
        if !is_prime(q) {
            return Err(Error::Field(format!(
                "q = {q} must be prime (prime powers are not supported)"
            )));
        }
        Ok(Field { q })
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.q
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a nonzero residue.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a % self.q != 0, "inverse of zero residue");
        self.pow(a, self.q - 2)
    }

    /// Legendre symbol of a residue: 0 for 0, +1 for nonzero squares, -1 otherwise.
    pub fn legendre(&self, a: u64) -> i8 {
        let a = a % self.q;
        if a == 0 {
            return 0;
        }
        if self.pow(a, (self.q - 1) / 2) == 1 {
            1
        } else {
            -1
        }
    }
}

/// Deterministic trial-division primality test; q stays desk-sized here.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}
