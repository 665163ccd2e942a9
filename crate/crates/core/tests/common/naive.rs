//! Brute-force reference implementations. Everything here is written from
//! the definitions: polynomials are coefficient vectors, the character is
//! the Euler criterion in the residue field, coefficients are plain double
//! loops, factorization is trial division.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

pub type NPoly = Vec<u64>; // lowest degree first, no trailing zeros, empty = 0

pub fn trim(mut v: NPoly) -> NPoly {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

pub fn deg(f: &NPoly) -> Option<usize> {
    f.len().checked_sub(1)
}

pub fn pmul(q: u64, a: &NPoly, b: &NPoly) -> NPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % q;
        }
    }
    trim(out)
}

pub fn pmod(q: u64, a: &NPoly, m: &NPoly) -> NPoly {
    let mut a = a.clone();
    let dm = m.len() - 1;
    let inv = modpow(q, m[dm], q - 2);
    while a.len() >= m.len() {
        if *a.last().unwrap() == 0 {
            a.pop();
            continue;
        }
        let da = a.len() - 1;
        let c = a[da] * inv % q;
        for j in 0..=dm {
            let idx = da - dm + j;
            a[idx] = (a[idx] + q - c * m[j] % q) % q;
        }
        a = trim(a);
    }
    a
}

pub fn modpow(q: u64, mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    b %= q;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % q;
        }
        b = b * b % q;
        e >>= 1;
    }
    acc
}

/// Monic polynomials of degree n, constant-term-most-significant order.
pub fn monics(q: u64, n: usize) -> Vec<NPoly> {
    let total = q.pow(n as u32);
    (0..total)
        .map(|code| {
            let mut coeffs = vec![0u64; n + 1];
            coeffs[n] = 1;
            let mut c = code;
            for j in (0..n).rev() {
                coeffs[j] = c % q;
                c /= q;
            }
            coeffs
        })
        .collect()
}

pub fn is_irreducible(q: u64, f: &NPoly) -> bool {
    let n = deg(f).unwrap();
    if n == 1 {
        return true;
    }
    for d in 1..=n / 2 {
        for g in monics(q, d) {
            if pmod(q, f, &g).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Trial-division factorization into (irreducible, multiplicity) pairs.
pub fn factorize(q: u64, f: &NPoly) -> Vec<(NPoly, u32)> {
    let mut rest = f.clone();
    let mut out: Vec<(NPoly, u32)> = Vec::new();
    let mut d = 1usize;
    while deg(&rest).unwrap_or(0) > 0 {
        let dr = deg(&rest).unwrap();
        if d > dr / 2 {
            out.push((rest.clone(), 1));
            break;
        }
        let mut advanced = true;
        for cand in monics(q, d) {
            while pmod(q, &rest, &cand).is_empty() {
                // divide by cand
                rest = divide(q, &rest, &cand);
                if let Some(e) = out.iter_mut().find(|(p, _)| *p == cand) {
                    e.1 += 1;
                } else {
                    out.push((cand.clone(), 1));
                }
                advanced = false;
            }
            if deg(&rest) == Some(0) {
                break;
            }
        }
        if deg(&rest) == Some(0) {
            break;
        }
        let _ = advanced;
        d += 1;
    }
    out
}

fn divide(q: u64, a: &NPoly, b: &NPoly) -> NPoly {
    let mut rem = a.clone();
    let db = b.len() - 1;
    let mut quot = vec![0u64; rem.len() - db];
    let inv = modpow(q, b[db], q - 2);
    for i in (db..rem.len()).rev() {
        let c = rem[i] * inv % q;
        quot[i - db] = c;
        for j in 0..=db {
            rem[i - db + j] = (rem[i - db + j] + q - c * b[j] % q) % q;
        }
    }
    trim(quot)
}

/// (A/B) for irreducible B via the Euler criterion in F_q[T]/(B).
pub fn euler_symbol(q: u64, a: &NPoly, b: &NPoly) -> i64 {
    let exp = (q.pow(deg(b).unwrap() as u32) - 1) / 2;
    let mut acc: NPoly = vec![1];
    let mut base = pmod(q, a, b);
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = pmod(q, &pmul(q, &acc, &base), b);
        }
        base = pmod(q, &pmul(q, &base, &base), b);
        e >>= 1;
    }
    if acc.is_empty() {
        0
    } else if acc == vec![1] {
        1
    } else {
        -1
    }
}

/// chi_P(f) = (P/f): multiplicative over the trial-division factorization of
/// f, Euler criterion at each prime.
pub fn chi(q: u64, p: &NPoly, f: &NPoly) -> i64 {
    if deg(f) == Some(0) {
        return 1;
    }
    let mut v = 1i64;
    for (irr, e) in factorize(q, f) {
        let s = euler_symbol(q, p, &irr);
        if s == 0 {
            return 0;
        }
        if e % 2 == 1 {
            v *= s;
        }
    }
    v
}

/// L-series coefficients by the naive double loop.
pub fn coefficients(q: u64, p: &NPoly, up_to: usize) -> Vec<i64> {
    (0..=up_to)
        .map(|n| monics(q, n).iter().map(|f| chi(q, p, f)).sum())
        .collect()
}

/// Exact central value sum c_n q^{-n/2} as the pair (a, b) with value
/// a + b q^{-1/2}.
pub fn central_pair(q: u64, coeffs: &[i64]) -> (BigRational, BigRational) {
    let mut a = BigRational::zero();
    let mut b = BigRational::zero();
    for (n, &c) in coeffs.iter().enumerate() {
        let term = BigRational::new(BigInt::from(c), BigInt::from(q).pow((n / 2) as u32));
        if n % 2 == 0 {
            a += term;
        } else {
            b += term;
        }
    }
    (a, b)
}

/// Mean of the central values over all conductors of degree 2g+1.
pub fn first_moment(q: u64, g: usize) -> (BigRational, BigRational) {
    let mut sum_a = BigRational::zero();
    let mut sum_b = BigRational::zero();
    let mut count = 0u64;
    for p in monics(q, 2 * g + 1) {
        if !is_irreducible(q, &p) {
            continue;
        }
        let coeffs = coefficients(q, &p, 2 * g);
        let (a, b) = central_pair(q, &coeffs);
        sum_a += a;
        sum_b += b;
        count += 1;
    }
    let n = BigRational::new(BigInt::from(count), BigInt::from(1u32));
    (sum_a / &n, sum_b / &n)
}
