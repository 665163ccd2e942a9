//! Irreducibility, counting, factorization, and the arithmetic functions
//! built on them (von Mangoldt, square-free split).
//!
//! Family sweeps factor millions of small polynomials, so a smallest-prime-
//! factor sieve over all monic polynomials of degree ≤ D is built once per
//! (q, D) and shared read-only. Inputs beyond the table fall back to
//! square-free/distinct-degree/equal-degree splitting.

use crate::field::Field;
use crate::poly::{decode_monic, encode_monic, monic_count, Poly};
use crate::{Error, Result};

/// Complete factorization of a nonzero polynomial: unit times monic
/// irreducibles with multiplicities. Factors are pairwise distinct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: u64,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    /// Multiply the factorization back out.
    pub fn product(&self, field: Field) -> Poly {
        let mut acc = Poly::constant(field, self.unit);
        for (p, e) in &self.factors {
            for _ in 0..*e {
                acc = acc.mul(p);
            }
        }
        acc
    }

    pub fn distinct_factor_count(&self) -> usize {
        self.factors.len()
    }
}

/// Deterministic irreducibility test (Rabin): f of degree n is irreducible
/// iff T^(q^n) ≡ T (mod f) and gcd(T^(q^(n/p)) - T, f) = 1 for each prime
/// p | n. Errors on non-monic or constant input.
pub fn is_irreducible(f: &Poly) -> Result<bool> {
    if !f.is_monic() {
        return Err(Error::Precondition(format!("is_irreducible needs a monic input, got {f}")));
    }
    let n = f.degree().unwrap();
    if n == 0 {
        return Err(Error::Precondition("is_irreducible needs degree >= 1".into()));
    }
    if n == 1 {
        return Ok(true);
    }
    let t = Poly::t(f.field());
    let frob_n = t.frobenius_mod(n, f)?;
    if frob_n != t.rem(f)? {
        return Ok(false);
    }
    for p in prime_divisors(n) {
        let frob = t.frobenius_mod(n / p, f)?;
        let diff = frob.sub(&t);
        if diff.is_zero() {
            return Ok(false);
        }
        if f.gcd(&diff).degree() != Some(0) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Exact count of monic irreducibles of degree n via the necklace formula
/// (1/n) sum_{d|n} mu(d) q^(n/d).
pub fn count_irreducible(field: Field, n: usize) -> u64 {
    assert!(n >= 1, "count_irreducible needs n >= 1");
    let q = field.q() as u128;
    let mut total: i128 = 0;
    for d in 1..=n {
        if n % d == 0 {
            let mu = moebius(d);
            if mu != 0 {
                total += mu as i128 * q.pow((n / d) as u32) as i128;
            }
        }
    }
    let count = total / n as i128;
    debug_assert!(count > 0 && total % n as i128 == 0);
    count as u64
}

fn moebius(n: usize) -> i32 {
    let mut n = n;
    let mut mu = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            mu = -mu;
        }
        d += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// All monic irreducibles of degree n, in enumeration order.
pub fn irreducible_polys(field: Field, n: usize) -> impl Iterator<Item = Poly> {
    assert!(n >= 1);
    (0..monic_count(field, n))
        .map(move |code| decode_monic(field, n, code))
        .filter(|p| is_irreducible(p).expect("monic nonconstant"))
}

const IRRED: u32 = u32::MAX;
const UNSET: u32 = u32::MAX - 1;

/// Smallest-prime-factor table over all monic polynomials of degree ≤ max
/// degree. Entries hold the global codes of the smallest irreducible factor
/// and the cofactor, so a factor walk is pointer chasing.
pub struct FactorTable {
    field: Field,
    max_degree: usize,
    offsets: Vec<usize>,
    spf: Vec<u32>,
    cof: Vec<u32>,
}

impl FactorTable {
    pub fn build(field: Field, max_degree: usize) -> Self {
        let q = field.q();
        let mut offsets = Vec::with_capacity(max_degree + 2);
        let mut total = 0usize;
        for d in 0..=max_degree {
            offsets.push(total);
            total += q.pow(d as u32) as usize;
        }
        offsets.push(total);
        assert!(total < (u32::MAX - 2) as usize, "factor table too large");
        let mut spf = vec![UNSET; total];
        let mut cof = vec![0u32; total];
        spf[0] = IRRED; // the unit 1; never consulted as a factor

        let mut qbuf = [0u64; 32];
        let mut mbuf = [0u64; 32];
        let mut pbuf = [0u64; 64];
        for d in 1..=max_degree {
            let count = q.pow(d as u32);
            for i in 0..count {
                let gc = offsets[d] + i as usize;
                if spf[gc] != UNSET {
                    continue;
                }
                spf[gc] = IRRED;
                decode_into(q, d, i, &mut qbuf);
                // mark Q * m for every monic m with deg(Q*m) <= max_degree
                for dm in 1..=max_degree - d {
                    let mcount = q.pow(dm as u32);
                    for im in 0..mcount {
                        decode_into(q, dm, im, &mut mbuf);
                        let pc = mul_encode(q, &qbuf[..=d], &mbuf[..=dm], &mut pbuf);
                        let target = offsets[d + dm] + pc as usize;
                        if spf[target] == UNSET {
                            spf[target] = gc as u32;
                            cof[target] = (offsets[dm] + im as usize) as u32;
                        }
                    }
                }
            }
        }
        FactorTable { field, max_degree, offsets, spf, cof }
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Total number of monic polynomials of degree ≤ max_degree.
    #[inline]
    pub fn len(&self) -> usize {
        self.spf.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn offset(&self, degree: usize) -> usize {
        self.offsets[degree]
    }

    /// Degree of the polynomial behind a global code.
    pub fn degree_of(&self, gc: usize) -> usize {
        match self.offsets.binary_search(&gc) {
            Ok(d) if d <= self.max_degree => d,
            Ok(d) => d - 1,
            Err(d) => d - 1,
        }
    }

    #[inline]
    pub fn global_code(&self, degree: usize, code: u64) -> usize {
        self.offsets[degree] + code as usize
    }

    pub fn encode(&self, p: &Poly) -> Option<usize> {
        let d = p.degree()?;
        if d > self.max_degree || !p.is_monic() {
            return None;
        }
        Some(self.offsets[d] + encode_monic(p).unwrap() as usize)
    }

    pub fn decode(&self, gc: usize) -> Poly {
        let d = self.degree_of(gc);
        decode_monic(self.field, d, (gc - self.offsets[d]) as u64)
    }

    #[inline]
    pub fn is_irreducible_code(&self, gc: usize) -> bool {
        gc != 0 && self.spf[gc] == IRRED
    }

    /// Smallest factor and cofactor codes of a composite entry.
    #[inline]
    pub fn split_code(&self, gc: usize) -> Option<(usize, usize)> {
        if self.spf[gc] == IRRED || gc == 0 {
            None
        } else {
            Some((self.spf[gc] as usize, self.cof[gc] as usize))
        }
    }

    /// Global codes of the irreducibles of a given degree, ascending.
    pub fn irreducible_codes(&self, degree: usize) -> impl Iterator<Item = usize> + '_ {
        let lo = self.offsets[degree];
        let hi = self.offsets[degree + 1];
        (lo..hi).filter(move |&gc| self.spf[gc] == IRRED)
    }

    /// Factorize a monic polynomial of degree ≥ 1, walking the table when it
    /// covers the degree and falling back to the general splitter otherwise.
    pub fn factorize(&self, f: &Poly) -> Result<Factorization> {
        match f.degree() {
            Some(d) if d >= 1 && d <= self.max_degree && f.is_monic() => {
                let mut gc = self.encode(f).unwrap();
                let mut raw: Vec<usize> = Vec::new();
                while let Some((p, rest)) = self.split_code(gc) {
                    raw.push(p);
                    gc = rest;
                }
                raw.push(gc);
                raw.sort_unstable();
                let mut factors: Vec<(Poly, u32)> = Vec::new();
                for code in raw {
                    if let Some(last) = factors.last_mut() {
                        if self.encode(&last.0) == Some(code) {
                            last.1 += 1;
                            continue;
                        }
                    }
                    factors.push((self.decode(code), 1));
                }
                Ok(Factorization { unit: 1, factors })
            }
            _ => factorize(f),
        }
    }
}

fn decode_into(q: u64, d: usize, code: u64, buf: &mut [u64]) {
    let mut c = code;
    buf[d] = 1;
    for j in (0..d).rev() {
        buf[j] = c % q;
        c /= q;
    }
}

/// Multiply two monic coefficient slices and return the code of the product.
fn mul_encode(q: u64, a: &[u64], b: &[u64], scratch: &mut [u64]) -> u64 {
    let n = a.len() + b.len() - 1;
    scratch[..n].fill(0);
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            scratch[i + j] = (scratch[i + j] + x * y) % q;
        }
    }
    let mut code = 0u64;
    for c in scratch[..n - 1].iter() {
        code = code * q + c;
    }
    code
}

/// General-purpose factorization of a nonzero, nonconstant polynomial:
/// square-free decomposition, then distinct-degree, then equal-degree
/// splitting with a deterministic candidate sequence.
pub fn factorize(f: &Poly) -> Result<Factorization> {
    if f.is_zero() {
        return Err(Error::Precondition("cannot factorize the zero polynomial".into()));
    }
    if f.degree() == Some(0) {
        return Err(Error::Precondition("cannot factorize a constant".into()));
    }
    let unit = f.leading().unwrap();
    let monic = f.make_monic();
    let mut factors: Vec<(Poly, u32)> = Vec::new();
    for (part, mult) in squarefree_decomposition(&monic)? {
        for irr in split_squarefree(&part)? {
            factors.push((irr, mult));
        }
    }
    factors.sort_by_key(|(p, _)| (p.degree(), encode_monic(p)));
    // merge duplicates across square-free layers (cannot occur, but cheap)
    let mut merged: Vec<(Poly, u32)> = Vec::new();
    for (p, e) in factors {
        if let Some(last) = merged.last_mut() {
            if last.0 == p {
                last.1 += e;
                continue;
            }
        }
        merged.push((p, e));
    }
    Ok(Factorization { unit, factors: merged })
}

/// Yun-style square-free decomposition, with the p-th power descent for the
/// characteristic-q degenerate case f' = 0.
fn squarefree_decomposition(f: &Poly) -> Result<Vec<(Poly, u32)>> {
    let field = f.field();
    let q = field.q() as usize;
    let mut out: Vec<(Poly, u32)> = Vec::new();
    let mut stack = vec![(f.clone(), 1u32)];
    while let Some((g, scale)) = stack.pop() {
        if g.degree() == Some(0) {
            continue;
        }
        let dg = g.derivative();
        if dg.is_zero() {
            // g = h(T^q); take q-th roots of coefficients (identity in F_q)
            let root_coeffs: Vec<u64> =
                g.coeffs().iter().step_by(q).copied().collect();
            stack.push((Poly::new(field, root_coeffs), scale * q as u32));
            continue;
        }
        let mut c = g.gcd(&dg);
        let mut w = g.divrem(&c)?.0;
        let mut i = 1u32;
        while w.degree() != Some(0) {
            let y = w.gcd(&c);
            let piece = w.divrem(&y)?.0;
            if piece.degree() != Some(0) {
                out.push((piece, scale * i));
            }
            w = y;
            c = c.divrem(&w).map(|(q, _)| q).unwrap_or(c);
            i += 1;
        }
        if c.degree() != Some(0) {
            stack.push((c, scale));
        }
    }
    Ok(out)
}

/// Factor a monic square-free polynomial into irreducibles.
fn split_squarefree(f: &Poly) -> Result<Vec<Poly>> {
    let field = f.field();
    let t = Poly::t(field);
    let mut out = Vec::new();
    // distinct-degree: strip gcd(f, T^(q^d) - T) for d = 1, 2, ...
    let mut rest = f.clone();
    let mut frob = t.rem(&rest)?;
    let mut d = 0usize;
    while rest.degree().map_or(false, |deg| deg > 0) {
        d += 1;
        if rest.degree() == Some(d) {
            out.push(rest.clone());
            break;
        }
        if 2 * d > rest.degree().unwrap() {
            out.push(rest.clone());
            break;
        }
        frob = frob.pow_mod(field.q(), &rest)?;
        let g = rest.gcd(&frob.sub(&t));
        if g.degree().map_or(false, |deg| deg > 0) {
            equal_degree_split(&g, d, &mut out)?;
            rest = rest.divrem(&g)?.0;
            frob = frob.rem(&rest)?;
        }
    }
    Ok(out)
}

/// Equal-degree splitting of a product of degree-d irreducibles, iterating
/// candidates in enumeration order instead of sampling them. Each gcd of
/// h^((q^d - 1)/2) - 1 against f separates residues from non-residues.
fn equal_degree_split(f: &Poly, d: usize, out: &mut Vec<Poly>) -> Result<()> {
    let deg = f.degree().unwrap();
    if deg == d {
        out.push(f.clone());
        return Ok(());
    }
    let field = f.field();
    let exp = (field.q().pow(d as u32) - 1) / 2;
    let mut attempts = 0usize;
    for cand_deg in 1..=2 * d {
        for h in crate::poly::monic_polys(field, cand_deg) {
            attempts += 1;
            if attempts > 64 * deg * deg {
                return Err(Error::Precondition(format!(
                    "equal-degree splitting stalled on {f} (degree {deg}, pieces of degree {d})"
                )));
            }
            let power = h.pow_mod(exp, f)?;
            let g = f.gcd(&power.sub(&Poly::one(field)));
            if let Some(dg) = g.degree() {
                if dg > 0 && dg < deg {
                    equal_degree_split(&g, d, out)?;
                    equal_degree_split(&f.divrem(&g)?.0, d, out)?;
                    return Ok(());
                }
            }
        }
    }
    Err(Error::Precondition(format!("equal-degree splitting exhausted candidates on {f}")))
}

/// Von Mangoldt: deg(P) when f = c P^i for an irreducible P, else 0. Λ(1) = 0.
pub fn von_mangoldt(f: &Poly) -> u64 {
    match f.degree() {
        None | Some(0) => 0,
        Some(_) => {
            let fac = factorize(f).expect("nonzero nonconstant");
            if fac.distinct_factor_count() == 1 {
                fac.factors[0].0.degree().unwrap() as u64
            } else {
                0
            }
        }
    }
}

/// Split a monic l as l = l1 * l2^2 with l1 square-free.
pub fn squarefree_split(l: &Poly) -> (Poly, Poly) {
    let field = l.field();
    if l.degree() == Some(0) || l.is_zero() {
        return (Poly::one(field), Poly::one(field));
    }
    let fac = factorize(l).expect("nonzero nonconstant");
    let mut l1 = Poly::one(field);
    let mut l2 = Poly::one(field);
    for (p, e) in &fac.factors {
        if e % 2 == 1 {
            l1 = l1.mul(p);
        }
        for _ in 0..e / 2 {
            l2 = l2.mul(p);
        }
    }
    (l1, l2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::monic_polys;

    fn f5() -> Field {
        Field::new(5).unwrap()
    }

    #[test]
    fn irreducibility_examples() {
        let f = f5();
        assert!(is_irreducible(&Poly::new(f, vec![2, 0, 1])).unwrap()); // T^2+2
        assert!(is_irreducible(&Poly::new(f, vec![1, 1, 0, 1])).unwrap()); // T^3+T+1
        assert!(!is_irreducible(&Poly::new(f, vec![4, 0, 1])).unwrap()); // (T+1)(T+4)
        assert!(is_irreducible(&Poly::t(f)).unwrap());
        assert!(is_irreducible(&Poly::new(f, vec![3, 1])).unwrap());
    }

    #[test]
    fn irreducibility_rejects_bad_input() {
        let f = f5();
        assert!(is_irreducible(&Poly::constant(f, 2)).is_err());
        assert!(is_irreducible(&Poly::new(f, vec![1, 2])).is_err());
    }

    #[test]
    fn counts_match_enumeration() {
        let f = f5();
        for n in 1..=7 {
            let direct = irreducible_polys(f, n).count() as u64;
            assert_eq!(direct, count_irreducible(f, n), "n = {n}");
        }
        assert_eq!(count_irreducible(f, 1), 5);
        assert_eq!(count_irreducible(f, 2), 10);
        assert_eq!(count_irreducible(f, 3), 40);
        assert_eq!(count_irreducible(f, 7), 11160);
    }

    #[test]
    fn degree_counting_identity() {
        // sum_{d|n} d * pi(d) = q^n
        let f = f5();
        for n in 1..=10usize {
            let mut total: u128 = 0;
            for d in 1..=n {
                if n % d == 0 {
                    total += d as u128 * count_irreducible(f, d) as u128;
                }
            }
            assert_eq!(total, 5u128.pow(n as u32), "n = {n}");
        }
    }

    #[test]
    fn factor_table_agrees_with_general() {
        let f = f5();
        let table = FactorTable::build(f, 5);
        for n in 1..=5 {
            for p in monic_polys(f, n) {
                let via_table = table.factorize(&p).unwrap();
                assert_eq!(via_table.product(f), p, "{p}");
                let general = factorize(&p).unwrap();
                assert_eq!(via_table, general, "{p}");
            }
        }
    }

    #[test]
    fn factorize_examples() {
        let f = f5();
        let fac = factorize(&Poly::new(f, vec![4, 0, 1])).unwrap(); // T^2+4
        assert_eq!(fac.factors.len(), 2);
        assert_eq!(fac.unit, 1);
        let fac = factorize(&Poly::new(f, vec![0, 0, 1])).unwrap(); // T^2
        assert_eq!(fac.factors, vec![(Poly::t(f), 2)]);
        let p = Poly::new(f, vec![1, 1, 0, 1]);
        let fac = factorize(&p).unwrap();
        assert_eq!(fac.factors, vec![(p.clone(), 1)]);
        assert!(factorize(&Poly::zero(f)).is_err());
        assert!(factorize(&Poly::one(f)).is_err());
    }

    #[test]
    fn von_mangoldt_examples() {
        let f = f5();
        assert_eq!(von_mangoldt(&Poly::new(f, vec![0, 0, 1])), 1); // T^2
        assert_eq!(von_mangoldt(&Poly::new(f, vec![4, 0, 1])), 0); // split
        assert_eq!(von_mangoldt(&Poly::new(f, vec![2, 0, 1])), 2); // irreducible
        assert_eq!(von_mangoldt(&Poly::one(f)), 0);
    }

    #[test]
    fn squarefree_split_examples() {
        let f = f5();
        let l = Poly::new(f, vec![0, 0, 1]).mul(&Poly::new(f, vec![1, 1])); // T^2 (T+1)
        let (l1, l2) = squarefree_split(&l);
        assert_eq!(l1, Poly::new(f, vec![1, 1]));
        assert_eq!(l2, Poly::t(f));
        let (l1, l2) = squarefree_split(&Poly::one(f));
        assert!(l1.is_one() && l2.is_one());
        let t4 = Poly::new(f, vec![0, 0, 0, 0, 1]);
        let (l1, l2) = squarefree_split(&t4);
        assert!(l1.is_one());
        assert_eq!(l2, Poly::new(f, vec![0, 0, 1]));
    }

    #[test]
    fn squarefree_split_exhaustive_small() {
        let f = f5();
        for n in 1..=6 {
            for l in monic_polys(f, n) {
                let (l1, l2) = squarefree_split(&l);
                assert_eq!(l1.mul(&l2).mul(&l2), l, "{l}");
                // square-freeness: gcd(l1, l1') constant
                if l1.degree().map_or(false, |d| d > 0) {
                    assert_eq!(l1.gcd(&l1.derivative()).degree(), Some(0), "{l}");
                }
            }
        }
    }

    #[test]
    fn von_mangoldt_iff_single_factor() {
        let f = f5();
        for n in 1..=5 {
            for p in monic_polys(f, n) {
                let lam = von_mangoldt(&p);
                let fac = factorize(&p).unwrap();
                assert_eq!(lam > 0, fac.distinct_factor_count() == 1, "{p}");
            }
        }
    }
}
