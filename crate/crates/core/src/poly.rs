//! Dense polynomials over F_q[T]: ring operations, text formats, enumeration.
//!
//! Coefficients are stored lowest degree first with no trailing zeros; the
//! zero polynomial is the empty coefficient vector and its degree is the
//! distinguished sentinel `None` (never -infinity arithmetic).
//!
//! Two text formats round-trip:
//!  * human form `T^3+T+1` (decimal coefficients, decreasing degree, zero
//!    terms omitted);
//!  * compact form `poly:q5:1,1,0,1` (constant term first).

use crate::field::Field;
use crate::{Error, Result};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    field: Field,
    coeffs: Vec<u64>,
}

impl Poly {
    pub fn new(field: Field, mut coeffs: Vec<u64>) -> Self {
        for c in &mut coeffs {
            *c %= field.q();
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn zero(field: Field) -> Self {
        Poly { field, coeffs: Vec::new() }
    }

    pub fn one(field: Field) -> Self {
        Poly { field, coeffs: vec![1] }
    }

    pub fn constant(field: Field, c: u64) -> Self {
        Poly::new(field, vec![c])
    }

    /// The monomial T.
    pub fn t(field: Field) -> Self {
        Poly { field, coeffs: vec![0, 1] }
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.field.q()
    }

    #[inline]
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// Degree, or `None` for the zero polynomial.
    #[inline]
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    #[inline]
    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    #[inline]
    pub fn leading(&self) -> Option<u64> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(1)
    }

    fn check_same_field(&self, other: &Poly) {
        assert_eq!(
            self.field, other.field,
            "mismatched field parameters: q={} vs q={}",
            self.q(),
            other.q()
        );
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.check_same_field(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.field.add(self.coeff(i), other.coeff(i)));
        }
        Poly::new(self.field, out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.check_same_field(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.field.sub(self.coeff(i), other.coeff(i)));
        }
        Poly::new(self.field, out)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.check_same_field(other);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.field);
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a * b) % self.q();
            }
        }
        Poly { field: self.field, coeffs: out }
    }

    pub fn scale(&self, c: u64) -> Poly {
        let c = c % self.q();
        Poly::new(self.field, self.coeffs.iter().map(|&a| a * c % self.q()).collect())
    }

    /// Quotient and remainder; errors on a zero divisor.
    pub fn divrem(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        self.check_same_field(divisor);
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let dd = divisor.coeffs.len() - 1;
        if self.coeffs.len() < divisor.coeffs.len() {
            return Ok((Poly::zero(self.field), self.clone()));
        }
        let q = self.q();
        let inv_lead = self.field.inv(divisor.leading().unwrap());
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i] * inv_lead % q;
            if c == 0 {
                continue;
            }
            quot[i - dd] = c;
            for (j, &b) in divisor.coeffs.iter().enumerate() {
                let idx = i - dd + j;
                rem[idx] = self.field.sub(rem[idx], c * b % q);
            }
        }
        Ok((Poly::new(self.field, quot), Poly::new(self.field, rem)))
    }

    pub fn rem(&self, divisor: &Poly) -> Result<Poly> {
        Ok(self.divrem(divisor)?.1)
    }

    /// Monic greatest common divisor; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Poly) -> Poly {
        self.check_same_field(other);
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.make_monic()
    }

    /// Divide through by the leading coefficient (zero stays zero).
    pub fn make_monic(&self) -> Poly {
        match self.leading() {
            None | Some(1) => self.clone(),
            Some(c) => self.scale(self.field.inv(c)),
        }
    }

    pub fn eval(&self, x: u64) -> u64 {
        let q = self.q();
        let x = x % q;
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = (acc * x + c) % q;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero(self.field);
        }
        let q = self.q();
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| (i as u64 % q) * c % q)
            .collect();
        Poly::new(self.field, out)
    }

    /// self^e mod m by square and multiply.
    pub fn pow_mod(&self, mut e: u64, m: &Poly) -> Result<Poly> {
        let mut base = self.rem(m)?;
        let mut acc = Poly::one(self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m)?;
            }
            base = base.mul(&base).rem(m)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// self^(q^steps) mod m: the Frobenius applied `steps` times.
    pub fn frobenius_mod(&self, steps: usize, m: &Poly) -> Result<Poly> {
        let mut cur = self.rem(m)?;
        for _ in 0..steps {
            cur = cur.pow_mod(self.q(), m)?;
        }
        Ok(cur)
    }

    /// Compact form `poly:q5:1,1,0,1`, constant term first.
    pub fn to_compact(&self) -> String {
        if self.is_zero() {
            return format!("poly:q{}:0", self.q());
        }
        let digits: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!("poly:q{}:{}", self.q(), digits.join(","))
    }

    /// Parse either text format. A compact form carrying a different q than
    /// `field` is rejected.
    pub fn parse(s: &str, field: Field) -> Result<Poly> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("poly:") {
            return parse_compact(rest, field);
        }
        parse_human(s, field)
    }
}

fn parse_compact(rest: &str, field: Field) -> Result<Poly> {
    let (qpart, coeffs) = rest
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("compact form needs poly:qN:c0,c1,...: got poly:{rest}")))?;
    let q: u64 = qpart
        .strip_prefix('q')
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad field tag {qpart:?} in compact form")))?;
    if q != field.q() {
        return Err(Error::Parse(format!(
            "compact form is over F_{q} but context expects F_{}",
            field.q()
        )));
    }
    let mut out = Vec::new();
    for part in coeffs.split(',') {
        let part = part.trim();
        let c: u64 = part
            .parse()
            .map_err(|_| Error::Parse(format!("bad coefficient {part:?} in compact form")))?;
        out.push(c);
    }
    Ok(Poly::new(field, out))
}

fn parse_human(s: &str, field: Field) -> Result<Poly> {
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let q = field.q();
    let mut coeffs: Vec<u64> = Vec::new();
    let mut add_term = |coeff: i64, deg: usize| {
        if coeffs.len() <= deg {
            coeffs.resize(deg + 1, 0);
        }
        let c = coeff.rem_euclid(q as i64) as u64;
        coeffs[deg] = (coeffs[deg] + c) % q;
    };
    // split into signed terms
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut terms: Vec<(i64, String)> = Vec::new();
    let mut cur = String::new();
    let mut sign = 1i64;
    let mut chars = compact.chars().peekable();
    if chars.peek() == Some(&'+') {
        chars.next();
    } else if chars.peek() == Some(&'-') {
        sign = -1;
        chars.next();
    }
    for ch in chars {
        if ch == '+' || ch == '-' {
            terms.push((sign, std::mem::take(&mut cur)));
            sign = if ch == '-' { -1 } else { 1 };
        } else {
            cur.push(ch);
        }
    }
    terms.push((sign, cur));
    for (sign, term) in terms {
        if term.is_empty() {
            return Err(Error::Parse(format!("dangling sign in {s:?}")));
        }
        let (coeff_str, var_part) = match term.find(['T', 't']) {
            Some(pos) => (&term[..pos], &term[pos + 1..]),
            None => (term.as_str(), ""),
        };
        let coeff_str = coeff_str.trim_end_matches('*');
        let has_var = term.contains(['T', 't']);
        let coeff: i64 = if coeff_str.is_empty() {
            if has_var {
                1
            } else {
                return Err(Error::Parse(format!("empty term in {s:?}")));
            }
        } else {
            coeff_str
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient {coeff_str:?} in {s:?}")))?
        };
        let deg: usize = if !has_var {
            0
        } else if var_part.is_empty() {
            1
        } else {
            var_part
                .strip_prefix('^')
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad exponent {var_part:?} in {s:?}")))?
        };
        add_term(sign * coeff, deg);
    }
    Ok(Poly::new(field, coeffs))
}

impl fmt::Display for Poly {
    /// Human form: decreasing degree, zero terms omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "T")?,
                (1, c) => write!(f, "{c}T")?,
                (i, 1) => write!(f, "T^{i}")?,
                (i, c) => write!(f, "{c}T^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly(q={}, {})", self.q(), self)
    }
}

/// Number of monic polynomials of degree n, i.e. q^n.
pub fn monic_count(field: Field, n: usize) -> u64 {
    field.q().pow(n as u32)
}

/// Code of a monic degree-n polynomial in enumeration order.
///
/// The order is lexicographic in the coefficient vector read from the
/// constant term upward, so the constant term is the most significant digit.
pub fn encode_monic(p: &Poly) -> Option<u64> {
    if !p.is_monic() {
        return None;
    }
    let n = p.degree().unwrap();
    let q = p.q();
    let mut code = 0u64;
    for j in 0..n {
        code = code * q + p.coeff(j);
    }
    Some(code)
}

/// Inverse of [`encode_monic`] for degree n.
pub fn decode_monic(field: Field, n: usize, code: u64) -> Poly {
    let q = field.q();
    let mut coeffs = vec![0u64; n + 1];
    coeffs[n] = 1;
    let mut c = code;
    for j in (0..n).rev() {
        coeffs[j] = c % q;
        c /= q;
    }
    debug_assert_eq!(c, 0, "code out of range for degree {n}");
    Poly { field, coeffs }
}

/// All monic polynomials of degree n in deterministic enumeration order.
pub fn monic_polys(field: Field, n: usize) -> impl Iterator<Item = Poly> {
    let total = monic_count(field, n);
    (0..total).map(move |code| decode_monic(field, n, code))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Field {
        Field::new(5).unwrap()
    }

    #[test]
    fn product_example() {
        // (T+1)(T+4) = T^2 + 4 over F_5
        let f = f5();
        let a = Poly::new(f, vec![1, 1]);
        let b = Poly::new(f, vec![4, 1]);
        assert_eq!(a.mul(&b), Poly::new(f, vec![4, 0, 1]));
    }

    #[test]
    fn gcd_example() {
        // gcd(T^2+4, T+1) = T+1 over F_5
        let f = f5();
        let a = Poly::new(f, vec![4, 0, 1]);
        let b = Poly::new(f, vec![1, 1]);
        assert_eq!(a.gcd(&b), b);
    }

    #[test]
    fn eval_example() {
        // (T^3+T+1)(1) = 3 over F_5
        let f = f5();
        let p = Poly::new(f, vec![1, 1, 0, 1]);
        assert_eq!(p.eval(1), 3);
    }

    #[test]
    fn divrem_by_zero_errors() {
        let f = f5();
        let p = Poly::t(f);
        assert!(matches!(p.divrem(&Poly::zero(f)), Err(Error::DivisionByZero)));
    }

    #[test]
    fn divrem_roundtrip() {
        let f = f5();
        for acode in 0..125 {
            let a = decode_monic(f, 3, acode);
            for bcode in 0..25 {
                let b = decode_monic(f, 2, bcode);
                let (q, r) = a.divrem(&b).unwrap();
                assert_eq!(q.mul(&b).add(&r), a);
                assert!(r.degree().map_or(true, |d| d < 2));
            }
        }
    }

    #[test]
    fn zero_degree_is_sentinel() {
        let f = f5();
        assert_eq!(Poly::zero(f).degree(), None);
        assert_eq!(Poly::one(f).degree(), Some(0));
    }

    #[test]
    fn enumeration_counts_and_order() {
        let f = f5();
        let all: Vec<Poly> = monic_polys(f, 0).collect();
        assert_eq!(all, vec![Poly::one(f)]);
        assert_eq!(monic_polys(f, 2).count(), 25);
        let f13 = Field::new(13).unwrap();
        assert_eq!(monic_polys(f13, 1).count(), 13);
        // no repeats, codes round-trip
        for (code, p) in monic_polys(f, 3).enumerate() {
            assert_eq!(encode_monic(&p), Some(code as u64));
        }
    }

    #[test]
    fn parse_roundtrip_human_and_compact() {
        let f = f5();
        for code in 0..125u64 {
            let p = decode_monic(f, 3, code);
            let human = p.to_string();
            let compact = p.to_compact();
            assert_eq!(Poly::parse(&human, f).unwrap(), p, "human {human}");
            assert_eq!(Poly::parse(&compact, f).unwrap(), p, "compact {compact}");
        }
        assert_eq!(Poly::parse("0", f).unwrap(), Poly::zero(f));
        assert_eq!(Poly::parse("poly:q5:0", f).unwrap(), Poly::zero(f));
    }

    #[test]
    fn parse_accepts_signs_and_star() {
        let f = f5();
        let p = Poly::parse("T^2-1", f).unwrap();
        assert_eq!(p, Poly::new(f, vec![4, 0, 1]));
        let p = Poly::parse("2*T^2 + 3T", f).unwrap();
        assert_eq!(p, Poly::new(f, vec![0, 3, 2]));
    }

    #[test]
    fn parse_rejects_garbage() {
        let f = f5();
        for s in ["", "T^", "T^x", "++1", "poly:q7:1,1", "poly:q5:x"] {
            assert!(Poly::parse(s, f).is_err(), "{s:?}");
        }
    }
}
