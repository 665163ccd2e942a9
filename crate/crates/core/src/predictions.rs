//! Closed-form prediction side: zeta_A, Mertens products, divisor functions,
//! the arithmetic factor A_k (two equivalent forms, cross-checked), Barnes
//! G / Gamma constants, and the predicted values the harness compares
//! against. Exact where integers allow, with explicit truncation tails on
//! every Euler product.

use crate::factor::{count_irreducible, squarefree_split};
use crate::field::Field;
use crate::poly::Poly;
use crate::special::EULER_GAMMA;
use crate::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// A named prediction with a rigorous truncation tail where one applies.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PredictionReport {
    pub kind: String,
    pub q: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(rename = "X", skip_serializing_if = "Option::is_none")]
    pub x: Option<u32>,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_bound: Option<f64>,
}

/// zeta_A(s) = 1/(1 - q^(1-s)) for s > 1; the pole at s = 1 is an error.
pub fn zeta_a(field: Field, s: f64) -> Result<f64> {
    if s <= 1.0 {
        return Err(Error::ZetaPole);
    }
    Ok(1.0 / (1.0 - (field.q() as f64).powf(1.0 - s)))
}

/// Exact rational zeta_A at integer s >= 2: q^(s-1)/(q^(s-1) - 1).
pub fn zeta_a_exact(field: Field, s: i64) -> Result<BigRational> {
    if s < 2 {
        return Err(Error::ZetaPole);
    }
    let p = BigInt::from(field.q()).pow((s - 1) as u32);
    Ok(BigRational::new(p.clone(), p - BigInt::one()))
}

/// Finite Mertens product over irreducibles of degree <= X:
/// prod (1 - q^(-n))^(-pi(n)). Compare against e^gamma X + O(1).
pub fn mertens_product(field: Field, x: u32) -> f64 {
    assert!(x >= 1);
    let q = field.q() as f64;
    let mut log_sum = 0.0f64;
    for n in 1..=x {
        let pi_n = count_irreducible(field, n as usize) as f64;
        log_sum -= pi_n * (1.0 - q.powi(-(n as i32))).ln();
    }
    log_sum.exp()
}

/// k-th divisor function on a prime power: d_k(P^j) = binomial(j + k - 1, k - 1).
pub fn d_k_primepower(k: u32, j: u64) -> u64 {
    assert!(k >= 1);
    // binomial(j + k - 1, k - 1) with small k
    let mut num = 1u128;
    let mut den = 1u128;
    for t in 1..=(k - 1) as u128 {
        num *= j as u128 + t;
        den *= t;
    }
    (num / den) as u64
}

/// Local factor of A_k at a prime of degree d, via the divisor-sum
/// series 1 + sum_j d_k(Q^(2j)) / |Q|^j.
fn a_k_factor_series(k: u32, d: u32, q: u64) -> f64 {
    let x = (q as f64).powi(-(d as i32));
    let mut sum = 1.0f64;
    let mut xj = 1.0f64;
    for j in 1..=400u64 {
        xj *= x;
        let term = d_k_primepower(k, 2 * j) as f64 * xj;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    (1.0 - x).powi((k * (k + 1) / 2) as i32) * sum
}

/// Exact local factor for integer k: folding the even part of (1+r)^k into
/// the square gives the polynomial identity
/// factor(d) = (1 - x)^(k(k-1)/2) * sum_i binomial(k, 2i) x^i, x = q^(-d).
/// Exactness matters: the factor sits at 1 + O(x^2) and is raised to the
/// pi(d) ~ q^d/d power, so rounding it at machine epsilon would not do.
fn a_k_factor_exact(k: u32, d: u32, q: u64) -> BigRational {
    let x = BigRational::new(BigInt::one(), BigInt::from(q).pow(d));
    let mut even_part = BigRational::zero();
    let mut xi = BigRational::one();
    for i in 0..=(k / 2) as u64 {
        even_part += BigRational::from_integer(binomial_u64(k as u64, 2 * i).into()) * &xi;
        xi *= &x;
    }
    let base = BigRational::one() - &x;
    let mut pow = BigRational::one();
    for _ in 0..(k * k.saturating_sub(1) / 2) {
        pow *= &base;
    }
    pow * even_part
}

fn binomial_u64(n: u64, r: u64) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc = 1u128;
    for t in 0..r {
        acc = acc * (n - t) as u128 / (t + 1) as u128;
    }
    acc as u64
}

/// log of the local factor for real k, as a cancellation-free series:
/// (k(k+1)/2) log1p(-x) + log1p(s) where s = sum_j binom(k+2j-1, 2j) x^j is
/// the even part of (1 - r)^(-k) minus 1.
fn a_k_log_factor_real(k: f64, d: u32, q: u64) -> f64 {
    let x = (q as f64).powi(-(d as i32));
    let mut s = 0.0f64;
    let mut coef = 1.0f64;
    let mut xj = 1.0f64;
    for j in 1..=500u64 {
        let a = 2 * j - 2;
        coef *= (k + a as f64) * (k + (a + 1) as f64) / ((a + 1) as f64 * (a + 2) as f64);
        xj *= x;
        let term = coef * xj;
        s += term;
        if term.abs() < 1e-20 * (1.0 + s.abs()) {
            break;
        }
    }
    (k * (k + 1.0) / 2.0) * (-x).ln_1p() + s.ln_1p()
}

/// Tail bound on the truncated product: sum over d > D of pi(d) |log factor|,
/// evaluated termwise with pi(d) <= q^d/d until the terms die out.
fn a_k_tail(k: f64, trunc: u32, q: u64) -> f64 {
    let mut tail = 0.0f64;
    for d in trunc + 1..=trunc + 80 {
        let per_prime = a_k_log_factor_real(k, d, q).abs();
        let count = (q as f64).powi(d as i32) / d as f64;
        let term = per_prime * count;
        tail += term;
        if term < 1e-300 {
            break;
        }
    }
    tail
}

/// The arithmetic factor A_k for integer k >= 0, truncated at degree `trunc`.
/// The exact-polynomial route is the value; the d_k series route must agree
/// with it to 1e-12 per factor (bug trap for either form).
pub fn a_k(field: Field, k: u32, trunc: u32) -> Result<PredictionReport> {
    assert!(trunc >= 4, "truncation degree must be at least 4");
    let q = field.q();
    let mut log_product = 0.0f64;
    for d in 1..=trunc {
        let exact = a_k_factor_exact(k, d, q);
        let exact_f = exact.to_f64().unwrap();
        let series = a_k_factor_series(k, d, q);
        if (series - exact_f).abs() > 1e-12 * exact_f.abs() {
            return Err(Error::Precondition(format!(
                "A_k factor forms disagree at degree {d}: {series} vs {exact_f}"
            )));
        }
        let fm1 = (exact - BigRational::one()).to_f64().unwrap();
        let pi_d = count_irreducible(field, d as usize) as f64;
        log_product += pi_d * fm1.ln_1p();
    }
    let log_tail = a_k_tail(k as f64, trunc, q);
    let value = log_product.exp();
    Ok(PredictionReport {
        kind: "a_k".into(),
        q,
        g: None,
        k: Some(k as f64),
        x: None,
        value,
        tail_bound: Some(value * log_tail.exp_m1().abs()),
    })
}

/// A_k for real k through the split-root series only (the d_k route needs
/// integer k). Returns (value, tail bound).
pub fn a_k_real(field: Field, k: f64, trunc: u32) -> (f64, f64) {
    let q = field.q();
    let mut log_product = 0.0f64;
    for d in 1..=trunc {
        let pi_d = count_irreducible(field, d as usize) as f64;
        log_product += pi_d * a_k_log_factor_real(k, d, q);
    }
    let value = log_product.exp();
    let tail = value * a_k_tail(k, trunc, q).exp_m1().abs();
    (value, tail)
}

/// Gamma at a positive integer: (n-1)!.
pub fn gamma_int(n: u64) -> BigUint {
    assert!(n >= 1);
    let mut acc = BigUint::one();
    for i in 2..n {
        acc *= BigUint::from(i);
    }
    acc
}

/// Barnes G at a positive integer: G(1) = G(2) = 1, G(n+1) = Gamma(n) G(n).
pub fn barnes_g(n: u64) -> BigUint {
    assert!(n >= 1);
    let mut acc = BigUint::one();
    for i in 1..n {
        acc *= gamma_int(i);
    }
    acc
}

fn big_ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    // shift both down so the conversion cannot overflow
    let bits = num.bits().max(den.bits());
    if bits > 900 {
        let shift = bits - 900;
        (num >> shift).to_f64().unwrap() / (den >> shift).to_f64().unwrap()
    } else {
        num.to_f64().unwrap() / den.to_f64().unwrap()
    }
}

/// The symplectic random-matrix constant
/// G(k+1) sqrt(Gamma(k+1)) / sqrt(G(2k+1) Gamma(2k+1)), exactly as the
/// square root of a rational.
pub fn rmt_factor(k: u32) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let k = k as u64;
    let num = barnes_g(k + 1).pow(2) * gamma_int(k + 1);
    let den = barnes_g(2 * k + 1) * gamma_int(2 * k + 1);
    big_ratio_to_f64(&num, &den).sqrt()
}

/// Leading-order prediction for the k-th family moment of L(1/2, chi_P):
/// 2^(-k/2) A_k rmt(k) (2g)^(k(k+1)/2).
pub fn predicted_moment(field: Field, k: u32, g: usize, trunc: u32) -> Result<f64> {
    let ak = a_k(field, k, trunc)?;
    let exponent = (k * (k + 1) / 2) as f64;
    Ok(2f64.powf(-(k as f64) / 2.0) * ak.value * rmt_factor(k) * (2.0 * g as f64).powf(exponent))
}

/// Predicted k-th moment of the partial Euler product:
/// 2^(-k/2) A_k (e^gamma X)^(k(k+1)/2), with the error envelope
/// q^(-X/2) X^(k(k+1)/2 - 1) reported as tail_bound (unit constant; the
/// harness fits the constant empirically).
pub fn predicted_euler_moment(field: Field, k: f64, x: u32, trunc: u32) -> PredictionReport {
    // keep the product truncation comfortably past the comparison scale
    let trunc = trunc.max(2 * x);
    let (ak, _) = a_k_real(field, k, trunc);
    let exponent = k * (k + 1.0) / 2.0;
    let main = 2f64.powf(-k / 2.0) * ak * (E_GAMMA_TIMES(x)).powf(exponent);
    let envelope = (field.q() as f64).powf(-(x as f64) / 2.0) * (x as f64).powf(exponent - 1.0);
    PredictionReport {
        kind: "euler_moment".into(),
        q: field.q(),
        g: None,
        k: Some(k),
        x: Some(x),
        value: main,
        tail_bound: Some(envelope),
    }
}

#[allow(non_snake_case)]
fn E_GAMMA_TIMES(x: u32) -> f64 {
    EULER_GAMMA.exp() * x as f64
}

/// Main term of the twisted first moment: (g - deg(l1) + 1) / sqrt(|l1|)
/// with l = l1 l2^2, l1 square-free. Requires deg(l) <= g.
pub fn predicted_twisted(l: &Poly, g: usize) -> Result<f64> {
    let deg_l = l.degree().ok_or_else(|| Error::Precondition("twist l cannot be zero".into()))?;
    if deg_l > g {
        return Err(Error::Precondition(format!(
            "twist degree {deg_l} exceeds the genus {g} (twisted averages assume deg l << g)"
        )));
    }
    if !l.is_monic() {
        return Err(Error::Precondition("twist l must be monic".into()));
    }
    let (l1, _) = squarefree_split(l);
    let d1 = l1.degree().unwrap_or(0);
    let norm = (l.q() as f64).powi(d1 as i32);
    Ok((g as f64 - d1 as f64 + 1.0) / norm.sqrt())
}

/// Random-matrix k-th moment of Z_X: rmt(k) (2g/(e^gamma X))^(k(k+1)/2).
pub fn predicted_zx_moment(k: u32, g: usize, x: u32) -> f64 {
    let exponent = (k * (k + 1) / 2) as f64;
    rmt_factor(k) * (2.0 * g as f64 / E_GAMMA_TIMES(x)).powf(exponent)
}

/// First-moment prediction for L * P_X^(-1): 2g/(e^gamma X).
pub fn predicted_l_over_p(g: usize, x: u32) -> f64 {
    2.0 * g as f64 / E_GAMMA_TIMES(x)
}
