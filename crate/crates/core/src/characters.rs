//! The quadratic residue symbol (A/B) in F_q[T] and the conductor
//! characters chi_P(f) = (P/f).
//!
//! Since q ≡ 1 (mod 4), reciprocity is sign-free for monic arguments, so the
//! symbol is computed by plain Euclidean descent. Units come out through
//! (c/B) = legendre(c)^deg(B). Non-coprime arguments give 0.

use crate::factor::FactorTable;
use crate::field::Field;
use crate::poly::{decode_monic, Poly};
use crate::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// Value of a quadratic symbol: -1, 0, or +1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Symbol(i8);

impl Symbol {
    pub const ZERO: Symbol = Symbol(0);
    pub const PLUS: Symbol = Symbol(1);
    pub const MINUS: Symbol = Symbol(-1);

    pub fn from_i8(v: i8) -> Symbol {
        debug_assert!((-1..=1).contains(&v));
        Symbol(v)
    }

    #[inline]
    pub fn value(self) -> i8 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn pow(self, e: u32) -> Symbol {
        if e % 2 == 0 && self.0 != 0 {
            Symbol(1)
        } else {
            self
        }
    }
}

impl std::ops::Mul for Symbol {
    type Output = Symbol;
    #[inline]
    fn mul(self, rhs: Symbol) -> Symbol {
        Symbol(self.0 * rhs.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.0)
    }
}

/// Jacobi-style quadratic residue symbol (A/B) for monic B of degree ≥ 1.
///
/// Multiplicative in B, equal to the Euler-criterion value for prime B,
/// and 0 exactly when gcd(A, B) is nonconstant.
pub fn residue_symbol(a: &Poly, b: &Poly) -> Result<Symbol> {
    if !b.is_monic() || b.degree() == Some(0) {
        return Err(Error::Precondition(format!(
            "residue symbol needs a monic modulus of degree >= 1, got {b}"
        )));
    }
    let field = a.field();
    let mut a = a.rem(b)?;
    let mut b = b.clone();
    let mut sign = 1i8;
    loop {
        if a.is_zero() {
            return Ok(Symbol::ZERO);
        }
        let lead = a.leading().unwrap();
        if lead != 1 {
            a = a.scale(field.inv(lead));
            // (c/B) = legendre(c)^deg(B)
            if b.degree().unwrap() % 2 == 1 && field.legendre(lead) == -1 {
                sign = -sign;
            }
        }
        if a.degree() == Some(0) {
            return Ok(Symbol(sign));
        }
        // reciprocity with trivial sign: (A/B) = (B/A) for monic coprime
        let next_a = b.rem(&a)?;
        b = a;
        a = next_a;
    }
}

/// A validated conductor: monic irreducible of odd degree 2g+1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Conductor {
    poly: Poly,
    genus: usize,
}

impl Conductor {
    pub fn new(poly: Poly) -> Result<Self> {
        let deg = poly
            .degree()
            .ok_or_else(|| Error::Precondition("conductor cannot be zero".into()))?;
        if deg % 2 == 0 {
            return Err(Error::Precondition(format!(
                "conductor must have odd degree 2g+1, got degree {deg}"
            )));
        }
        if !crate::factor::is_irreducible(&poly)? {
            return Err(Error::Precondition(format!("conductor {poly} is reducible")));
        }
        Ok(Conductor { poly, genus: (deg - 1) / 2 })
    }

    /// Skip the irreducibility test when the caller already knows it
    /// (enumeration-driven sweeps validate conductors upstream).
    pub fn new_unchecked(poly: Poly) -> Self {
        let deg = poly.degree().expect("nonzero");
        Conductor { poly, genus: (deg - 1) / 2 }
    }

    #[inline]
    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    #[inline]
    pub fn genus(&self) -> usize {
        self.genus
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.poly.field()
    }

    /// chi_P(f) = (P/f) for monic f; chi_P(1) = +1. Completely multiplicative.
    pub fn chi(&self, f: &Poly) -> Result<Symbol> {
        if !f.is_monic() {
            return Err(Error::Precondition(format!("chi needs a monic argument, got {f}")));
        }
        if f.degree() == Some(0) {
            return Ok(Symbol::PLUS);
        }
        residue_symbol(&self.poly, f)
    }
}

impl fmt::Display for Conductor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.poly.fmt(f)
    }
}

/// Character values chi_P(f) for every monic f up to a degree bound,
/// computed once per conductor: direct symbols on irreducibles, extended
/// multiplicatively along the shared factor table.
pub struct CharTable {
    conductor: Conductor,
    max_degree: usize,
    table: Arc<FactorTable>,
    vals: Vec<i8>,
}

impl CharTable {
    pub fn build(conductor: Conductor, max_degree: usize, table: Arc<FactorTable>) -> Self {
        assert!(
            table.max_degree() >= max_degree,
            "factor table covers degree {} < requested {max_degree}",
            table.max_degree()
        );
        let q = conductor.field().q();
        let len = table.offset(max_degree) + q.pow(max_degree as u32) as usize;
        let mut vals = vec![0i8; len];
        vals[0] = 1; // f = 1
        for d in 1..=max_degree {
            let lo = table.offset(d);
            let hi = lo + q.pow(d as u32) as usize;
            for gc in lo..hi {
                vals[gc] = match table.split_code(gc) {
                    None => residue_symbol(conductor.poly(), &table.decode(gc))
                        .expect("monic modulus")
                        .value(),
                    Some((p, rest)) => vals[p] * vals[rest],
                };
            }
        }
        CharTable { conductor, max_degree, table, vals }
    }

    #[inline]
    pub fn conductor(&self) -> &Conductor {
        &self.conductor
    }

    #[inline]
    pub fn genus(&self) -> usize {
        self.conductor.genus()
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.conductor.field()
    }

    #[inline]
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    #[inline]
    pub fn factor_table(&self) -> &Arc<FactorTable> {
        &self.table
    }

    /// Table lookup by global code (degree ≤ max_degree).
    #[inline]
    pub fn chi_code(&self, gc: usize) -> i8 {
        self.vals[gc]
    }

    /// chi_P(f) for any monic f, using the table where it reaches and the
    /// symbol beyond it.
    pub fn chi(&self, f: &Poly) -> Result<Symbol> {
        match f.degree() {
            Some(d) if d <= self.max_degree && f.is_monic() => {
                Ok(Symbol::from_i8(self.vals[self.table.encode(f).unwrap()]))
            }
            _ => self.conductor.chi(f),
        }
    }

    /// Sum of chi over all monic f of a given degree (an L-series coefficient).
    pub fn degree_sum(&self, degree: usize) -> i64 {
        assert!(degree <= self.max_degree);
        let q = self.field().q();
        let lo = self.table.offset(degree);
        let hi = lo + q.pow(degree as u32) as usize;
        self.vals[lo..hi].iter().map(|&v| v as i64).sum()
    }

    /// Self-test hook: check the multiplicative extension against the direct
    /// symbol on pseudo-random monic polynomials.
    pub fn self_check(&self, samples: usize) -> Result<()> {
        let q = self.field().q();
        let mut state = 0x9e3779b97f4a7c15u64 ^ crate::poly::encode_monic(self.conductor.poly()).unwrap();
        for _ in 0..samples {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let d = 1 + (state >> 33) as usize % self.max_degree;
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let code = (state >> 20) % q.pow(d as u32);
            let f = decode_monic(self.field(), d, code);
            let direct = residue_symbol(self.conductor.poly(), &f)?;
            let via_table = self.chi(&f)?;
            if direct != via_table {
                return Err(Error::Precondition(format!(
                    "character table disagrees with direct symbol at f = {f}: {via_table} vs {direct}"
                )));
            }
        }
        Ok(())
    }
}
