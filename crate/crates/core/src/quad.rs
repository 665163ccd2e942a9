//! Exact elements a + b·q^(-1/2) with rational a, b.
//!
//! Central values and the approximate-functional-equation sums live here, so
//! their equalities are bit-exact and family moments stay rational. The ring
//! law is (q^(-1/2))^2 = 1/q; floating projections are derived on demand.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadValue {
    q: u64,
    a: BigRational,
    b: BigRational,
}

impl QuadValue {
    pub fn new(q: u64, a: BigRational, b: BigRational) -> Self {
        QuadValue { q, a, b }
    }

    pub fn zero(q: u64) -> Self {
        QuadValue { q, a: BigRational::zero(), b: BigRational::zero() }
    }

    pub fn one(q: u64) -> Self {
        QuadValue { q, a: BigRational::one(), b: BigRational::zero() }
    }

    pub fn from_integer(q: u64, n: i64) -> Self {
        QuadValue { q, a: BigRational::from_integer(n.into()), b: BigRational::zero() }
    }

    /// The rational c / q^(n/2): lands in the a-component for even n and the
    /// b-component for odd n.
    pub fn half_power_term(q: u64, c: i64, n: usize) -> Self {
        let den = BigInt::from(q).pow((n / 2) as u32);
        let r = BigRational::new(c.into(), den);
        if n % 2 == 0 {
            QuadValue { q, a: r, b: BigRational::zero() }
        } else {
            QuadValue { q, a: BigRational::zero(), b: r }
        }
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn a(&self) -> &BigRational {
        &self.a
    }

    #[inline]
    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn check(&self, other: &QuadValue) {
        assert_eq!(self.q, other.q, "mismatched q in QuadValue arithmetic");
    }

    pub fn add(&self, other: &QuadValue) -> QuadValue {
        self.check(other);
        QuadValue { q: self.q, a: &self.a + &other.a, b: &self.b + &other.b }
    }

    pub fn sub(&self, other: &QuadValue) -> QuadValue {
        self.check(other);
        QuadValue { q: self.q, a: &self.a - &other.a, b: &self.b - &other.b }
    }

    pub fn neg(&self) -> QuadValue {
        QuadValue { q: self.q, a: -self.a.clone(), b: -self.b.clone() }
    }

    pub fn mul(&self, other: &QuadValue) -> QuadValue {
        self.check(other);
        let inv_q = BigRational::new(BigInt::one(), BigInt::from(self.q));
        let a = &self.a * &other.a + (&self.b * &other.b) * &inv_q;
        let b = &self.a * &other.b + &self.b * &other.a;
        QuadValue { q: self.q, a, b }
    }

    pub fn mul_i64(&self, n: i64) -> QuadValue {
        let n = BigRational::from_integer(n.into());
        QuadValue { q: self.q, a: &self.a * &n, b: &self.b * &n }
    }

    pub fn div_u64(&self, n: u64) -> QuadValue {
        let n = BigRational::from_integer(BigInt::from(n));
        QuadValue { q: self.q, a: &self.a / &n, b: &self.b / &n }
    }

    pub fn pow(&self, e: u32) -> QuadValue {
        let mut acc = QuadValue::one(self.q);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().expect("rational to f64");
        let b = self.b.to_f64().expect("rational to f64");
        a + b / (self.q as f64).sqrt()
    }

    /// Exact sign of the real number a + b q^(-1/2).
    pub fn sign(&self) -> i32 {
        let sa = match (self.a.is_positive(), self.a.is_zero()) {
            (_, true) => 0,
            (true, _) => 1,
            (false, _) => -1,
        };
        let sb = match (self.b.is_positive(), self.b.is_zero()) {
            (_, true) => 0,
            (true, _) => 1,
            (false, _) => -1,
        };
        if sa == 0 {
            return sb;
        }
        if sb == 0 || sa == sb {
            return sa;
        }
        // mixed signs: compare a^2 against b^2/q
        let diff = &self.a * &self.a
            - (&self.b * &self.b) * BigRational::new(BigInt::one(), BigInt::from(self.q));
        if diff.is_zero() {
            0
        } else if diff.is_positive() {
            sa
        } else {
            -sa
        }
    }

    /// Exact comparison of absolute values.
    pub fn abs_cmp(&self, other: &QuadValue) -> std::cmp::Ordering {
        self.check(other);
        self.mul(self).sub(&other.mul(other)).sign().cmp(&0)
    }

    pub fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }
}

/// Serialize a rational as "p/q" (always with denominator).
pub fn rational_to_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rational_from_string(s: &str) -> Option<BigRational> {
    let (n, d) = s.split_once('/')?;
    let n: BigInt = n.trim().parse().ok()?;
    let d: BigInt = d.trim().parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

impl fmt::Display for QuadValue {
    /// e.g. `2 + 3·5^(-1/2)`; exact components, not a decimal.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |r: &BigRational| {
            if r.denom().is_one() {
                r.numer().to_string()
            } else {
                format!("{}/{}", r.numer(), r.denom())
            }
        };
        if self.b.is_zero() {
            return write!(f, "{}", show(&self.a));
        }
        if self.a.is_zero() {
            return write!(f, "{}·{}^(-1/2)", show(&self.b), self.q);
        }
        if self.b.is_negative() {
            write!(f, "{} - {}·{}^(-1/2)", show(&self.a), show(&(-self.b.clone())), self.q)
        } else {
            write!(f, "{} + {}·{}^(-1/2)", show(&self.a), show(&self.b), self.q)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn qv(a: i64, b: i64) -> QuadValue {
        QuadValue::new(
            5,
            BigRational::from_i64(a).unwrap(),
            BigRational::from_i64(b).unwrap(),
        )
    }

    #[test]
    fn ring_law() {
        // (q^{-1/2})^2 = 1/q
        let root = qv(0, 1);
        let sq = root.mul(&root);
        assert_eq!(sq, QuadValue::new(5, BigRational::new(1.into(), 5.into()), BigRational::zero()));
    }

    #[test]
    fn arithmetic_and_projection() {
        let x = qv(2, 3); // 2 + 3/sqrt(5)
        let y = qv(1, -1);
        assert_eq!(x.add(&y), qv(3, 2));
        assert_eq!(x.sub(&y), qv(1, 4));
        // (2 + 3r)(1 - r) = 2 - 2r + 3r - 3r^2 = (2 - 3/5) + r
        let p = x.mul(&y);
        assert_eq!(
            p,
            QuadValue::new(5, BigRational::new(7.into(), 5.into()), BigRational::from_i64(1).unwrap())
        );
        let f = x.to_f64();
        assert!((f - (2.0 + 3.0 / 5f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn pow_matches_repeated_mul() {
        let x = qv(1, 2);
        assert_eq!(x.pow(0), QuadValue::one(5));
        assert_eq!(x.pow(3), x.mul(&x).mul(&x));
    }

    #[test]
    fn half_power_terms() {
        assert_eq!(QuadValue::half_power_term(5, 7, 0), qv(7, 0));
        assert_eq!(QuadValue::half_power_term(5, 3, 1), qv(0, 3));
        let t2 = QuadValue::half_power_term(5, 5, 2);
        assert_eq!(t2, qv(1, 0));
        let t3 = QuadValue::half_power_term(5, 10, 3);
        assert_eq!(t3, QuadValue::new(5, BigRational::zero(), BigRational::from_i64(2).unwrap()));
    }

    #[test]
    fn display_and_rational_roundtrip() {
        assert_eq!(qv(2, 3).to_string(), "2 + 3·5^(-1/2)");
        assert_eq!(qv(2, -3).to_string(), "2 - 3·5^(-1/2)");
        assert_eq!(qv(2, 0).to_string(), "2");
        let r = BigRational::new(22.into(), 7.into());
        assert_eq!(rational_from_string(&rational_to_string(&r)).unwrap(), r);
        assert!(rational_from_string("1/0").is_none());
    }

    #[test]
    #[should_panic(expected = "mismatched q")]
    fn mixed_q_panics() {
        let x = qv(1, 1);
        let y = QuadValue::one(13);
        let _ = x.add(&y);
    }

    #[test]
    fn exact_sign_and_abs_cmp() {
        use std::cmp::Ordering;
        assert_eq!(qv(0, 0).sign(), 0);
        assert_eq!(qv(2, -3).sign(), 1); // 2 > 3/sqrt(5) since 4 > 9/5
        assert_eq!(qv(1, -3).sign(), -1); // 1 < 3/sqrt(5)
        assert_eq!(qv(-2, 3).sign(), -1);
        assert_eq!(qv(0, -7).sign(), -1);
        // 5 = b^2/q boundary: sqrt(5) - sqrt(5) = 0 via (a, b) = (-1, sqrt5)? not representable;
        // rational boundary: a = 2, b = -2*sqrt(5)? use (2, 0) vs itself instead
        assert_eq!(qv(2, 1).abs_cmp(&qv(2, 1)), Ordering::Equal);
        assert_eq!(qv(-3, 0).abs_cmp(&qv(2, 1)), Ordering::Greater); // 3 > 2.447
        assert_eq!(qv(1, 1).abs_cmp(&qv(2, 0)), Ordering::Less); // 1.447 < 2
    }
}
