//! The hybrid decomposition L(1/2, chi_P) = P_X * Z_X: the truncated Euler
//! product P_X, its truncated-coefficient Dirichlet form P*_{k,X} with the
//! alpha_k coefficients, and Z_X computed two independent ways (exact
//! quotient, and the smoothed sum over zeros).

use crate::characters::CharTable;
use crate::factor::FactorTable;
use crate::quad::QuadValue;
use crate::special::{ci_bound, cosine_integral, integrate, KahanSum};
use crate::{Error, Result};
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type Rat = Ratio<i64>;

/// Smooth unit-mass weight supported on [q, q^(1+1/X)].
#[derive(Clone, Debug)]
pub struct BumpWeight {
    pub x: u32,
    pub shape: BumpShape,
    lo: f64,
    hi: f64,
    norm: f64,
}

/// Admissible bump shapes; the decomposition must not depend on the choice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BumpShape {
    /// exp(-1/(1-t^2)) on (-1, 1)
    Standard,
    /// exp(-2/(1-t^2)): same support, narrower mass
    Narrow,
}

impl BumpShape {
    fn eval(self, t: f64) -> f64 {
        if t.abs() >= 1.0 {
            return 0.0;
        }
        let w = 1.0 - t * t;
        match self {
            BumpShape::Standard => (-1.0 / w).exp(),
            BumpShape::Narrow => (-2.0 / w).exp(),
        }
    }
}

impl std::str::FromStr for BumpShape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(BumpShape::Standard),
            "narrow" => Ok(BumpShape::Narrow),
            other => Err(Error::Parse(format!("unknown bump shape {other:?}"))),
        }
    }
}

impl BumpWeight {
    pub fn new(q: u64, x: u32, shape: BumpShape) -> Result<Self> {
        assert!(x >= 1, "bump weight needs X >= 1");
        let qf = q as f64;
        let lo = qf;
        let hi = qf.powf(1.0 + 1.0 / x as f64);
        let mut bump = BumpWeight { x, shape, lo, hi, norm: 1.0 };
        let mass = integrate(&|t| bump.raw(t), lo, hi, 1e-12, 1e-300)?;
        bump.norm = 1.0 / mass;
        Ok(bump)
    }

    fn raw(&self, t: f64) -> f64 {
        let tau = (2.0 * t - self.lo - self.hi) / (self.hi - self.lo);
        self.shape.eval(tau)
    }

    /// The normalized weight u(t).
    pub fn value(&self, t: f64) -> f64 {
        self.raw(t) * self.norm
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

/// P_X(s, chi_P) = exp( sum_{deg f <= X} Lambda(f) chi_P(f) / (|f|^s deg f) ),
/// accumulated with compensated summation. X = 0 gives the empty sum.
pub fn p_x_at(chart: &CharTable, x: u32, s: f64) -> f64 {
    assert!(chart.max_degree() >= x as usize, "character table too small for X = {x}");
    let q = chart.field().q() as f64;
    let table = chart.factor_table();
    let mut acc = KahanSum::new();
    for d in 1..=x as usize {
        for gc in table.irreducible_codes(d) {
            let sv = chart.chi_code(gc);
            if sv == 0 {
                continue; // Q = P: the character kills the term
            }
            let mut i = 1usize;
            while d * i <= x as usize {
                let sign = if sv > 0 || i % 2 == 0 { 1.0 } else { -1.0 };
                acc.add(sign / (i as f64 * q.powf(s * (d * i) as f64)));
                i += 1;
            }
        }
    }
    acc.value().exp()
}

/// P_X at the central point.
pub fn p_x(chart: &CharTable, x: u32) -> f64 {
    p_x_at(chart, x, 0.5)
}

/// The multiplicative coefficients alpha_k of the Dirichlet series of
/// P*_{k,X}: full d_k behaviour at primes of degree <= X/2, the quadratic
/// truncation (k, k^2/2, then 0) above, zero off X-smooth support.
#[derive(Clone, Debug)]
pub struct AlphaCoeffs {
    pub k: Rat,
    pub x: u32,
}

impl AlphaCoeffs {
    pub fn new(k: Rat, x: u32) -> Self {
        AlphaCoeffs { k, x }
    }

    /// alpha_k on a prime power Q^e with deg Q = d.
    pub fn prime_power(&self, d: usize, e: u32) -> Rat {
        if d > self.x as usize {
            return Rat::zero();
        }
        if 2 * d <= self.x as usize {
            // binomial(k + e - 1, e): the (1 - u)^{-k} series coefficient
            let mut v = Rat::one();
            for t in 0..e as i64 {
                v *= self.k + Rat::from_integer(t);
                v /= Rat::from_integer(t + 1);
            }
            v
        } else {
            match e {
                1 => self.k,
                2 => self.k * self.k / Rat::from_integer(2),
                _ => Rat::zero(),
            }
        }
    }

    /// alpha_k(f) for monic f, multiplicatively over the factor table.
    pub fn eval_code(&self, table: &FactorTable, gc: usize) -> Rat {
        if gc == 0 {
            return Rat::one(); // f = 1
        }
        let mut v = Rat::one();
        let mut cur = gc;
        let mut run_code = usize::MAX;
        let mut run_len = 0u32;
        loop {
            let (p, rest) = match table.split_code(cur) {
                Some(pair) => pair,
                None => (cur, 0),
            };
            if p == run_code {
                run_len += 1;
            } else {
                if run_len > 0 {
                    v *= self.prime_power(table.degree_of(run_code), run_len);
                    if v.is_zero() {
                        return v;
                    }
                }
                run_code = p;
                run_len = 1;
            }
            if rest == 0 {
                break;
            }
            cur = rest;
        }
        v * self.prime_power(table.degree_of(run_code), run_len)
    }

    pub fn eval(&self, table: &FactorTable, f: &crate::poly::Poly) -> Rat {
        match table.encode(f) {
            Some(gc) => self.eval_code(table, gc),
            None => {
                let fac = table.factorize(f).expect("monic nonconstant");
                let mut v = Rat::one();
                for (p, e) in &fac.factors {
                    v *= self.prime_power(p.degree().unwrap(), *e);
                    if v.is_zero() {
                        break;
                    }
                }
                v
            }
        }
    }
}

/// P*_{k,X}(chi_P) as the finite Euler product itself:
/// prod_{deg Q <= X/2} (1 - chi(Q)/|Q|^(1/2))^(-k) times the quadratic
/// truncation over X/2 < deg Q <= X. This is the object P_X^k approximates
/// to within O(q^(-X/6)/X).
pub fn p_star_product(chart: &CharTable, k: f64, x: u32) -> f64 {
    assert!(chart.max_degree() >= x as usize);
    let q = chart.field().q() as f64;
    let table = chart.factor_table();
    let mut log_acc = KahanSum::new();
    for d in 1..=x as usize {
        let u = q.powf(-0.5 * d as f64);
        for gc in table.irreducible_codes(d) {
            let s = chart.chi_code(gc) as f64;
            if s == 0.0 {
                continue;
            }
            if 2 * d <= x as usize {
                log_acc.add(-k * (1.0 - s * u).ln());
            } else {
                log_acc.add((1.0 + k * s * u + k * k * u * u / 2.0).ln());
            }
        }
    }
    log_acc.value().exp()
}

/// P*_{k,X}(chi_P) as the truncated Dirichlet sum over X-smooth monic f of
/// degree <= floor(theta * g). Converges to [`p_star_product`] as the cutoff
/// grows; at fixed theta the neglected tail only vanishes as g -> infinity.
pub fn p_star(chart: &CharTable, k: Rat, x: u32, theta: f64) -> f64 {
    let g = chart.genus();
    let cutoff = ((theta * g as f64).floor() as usize).min(chart.max_degree());
    let alpha = AlphaCoeffs::new(k, x);
    let q = chart.field().q() as f64;
    let table = chart.factor_table();
    let mut acc = KahanSum::new();
    acc.add(1.0); // f = 1
    for d in 1..=cutoff {
        let lo = table.offset(d);
        let hi = table.offset(d + 1);
        let scale = q.powf(0.5 * d as f64).recip();
        for gc in lo..hi {
            let sv = chart.chi_code(gc);
            if sv == 0 {
                continue;
            }
            let a = alpha.eval_code(table, gc);
            if a.is_zero() {
                continue;
            }
            acc.add(a.to_f64().unwrap() * sv as f64 * scale);
        }
    }
    acc.value()
}

/// Z_X as the exact quotient L(1/2)/P_X, in floating projection.
pub fn z_quotient(central: &QuadValue, p_x_value: f64) -> f64 {
    central.to_f64() / p_x_value
}

/// Z_X from the zeros: exp( sum_{gamma > 0} 2 int u(t) Ci(gamma X log t) dt ),
/// where the positive ordinates run over (theta + 2 pi j)/log q and the
/// reflected branch (2 pi - theta + 2 pi j)/log q for each stored angle.
///
/// A branch stops once its computed terms stay below tol/(8g) (the true
/// terms decay superpolynomially; the |Ci| <= 2/z bound alone is too weak
/// to terminate). Errors if a branch never meets the bound.
pub fn z_zeros(angles: &[f64], q: u64, x: u32, tol: f64, bump: &BumpWeight) -> Result<f64> {
    assert!(tol > 0.0);
    let g = angles.len().max(1);
    let log_q = (q as f64).ln();
    let (lo, hi) = bump.support();
    let xf = x as f64;
    let threshold = tol / (8.0 * g as f64);
    let quad_rtol = tol * 1e-2;
    let quad_atol = threshold * 1e-3;
    let mut total = KahanSum::new();
    for &theta in angles {
        if !(theta > 0.0) {
            return Err(Error::Precondition(format!(
                "zero angle {theta} on the real axis: L vanishes at the center"
            )));
        }
        for branch in [theta, 2.0 * std::f64::consts::PI - theta] {
            let mut small_streak = 0;
            let mut j = 0u32;
            loop {
                let gamma = (branch + 2.0 * std::f64::consts::PI * j as f64) / log_q;
                let integral = integrate(
                    &|t| bump.value(t) * cosine_integral(gamma * xf * t.ln()),
                    lo,
                    hi,
                    quad_rtol,
                    quad_atol,
                )?;
                let term = 2.0 * integral;
                total.add(term);
                // a priori per-term bound from |Ci(z)| <= 2/z
                let bound = 2.0 * ci_bound(gamma * xf * lo.ln());
                if term.abs() < threshold && bound < 1.0 {
                    small_streak += 1;
                    if small_streak >= 3 && j >= 8 {
                        break;
                    }
                } else {
                    small_streak = 0;
                }
                j += 1;
                if j > 100_000 {
                    return Err(Error::TruncationNonConvergent);
                }
            }
        }
    }
    Ok(total.value().exp())
}

/// One hybrid row: the decomposition of one conductor at one X.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridRecord {
    pub x: u32,
    pub p_x: f64,
    pub z_quotient: f64,
    pub z_zeros: Option<f64>,
}

impl HybridRecord {
    /// |z_zeros / z_quotient - 1| when the zero route was evaluated.
    pub fn hybrid_defect(&self) -> Option<f64> {
        self.z_zeros.map(|z| (z / self.z_quotient - 1.0).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::Conductor;
    use crate::field::Field;
    use crate::lfun::{LRecord, RecordMode};
    use crate::poly::Poly;
    use std::sync::Arc;

    fn worked_example(max_degree: usize) -> (CharTable, LRecord) {
        let f = Field::new(5).unwrap();
        let table = Arc::new(FactorTable::build(f, max_degree));
        let p = Conductor::new(Poly::new(f, vec![1, 1, 0, 1])).unwrap();
        let chart = CharTable::build(p, max_degree, table);
        let rec = LRecord::from_table(&chart, RecordMode::Full).unwrap();
        (chart, rec)
    }

    #[test]
    fn bump_has_unit_mass() {
        for shape in [BumpShape::Standard, BumpShape::Narrow] {
            for x in [1u32, 2, 4] {
                let bump = BumpWeight::new(5, x, shape).unwrap();
                let (lo, hi) = bump.support();
                assert!((lo - 5.0).abs() < 1e-12);
                assert!((hi - 5f64.powf(1.0 + 1.0 / x as f64)).abs() < 1e-9);
                let mass = integrate(&|t| bump.value(t), lo, hi, 1e-12, 1e-300).unwrap();
                assert!((mass - 1.0).abs() < 1e-12, "mass {mass}");
            }
        }
    }

    #[test]
    fn p_x_worked_values() {
        let (chart, _) = worked_example(2);
        // X = 0: empty sum
        assert_eq!(p_x(&chart, 0), 1.0);
        let p1 = p_x(&chart, 1);
        assert!((p1 - (3.0 / 5f64.sqrt()).exp()).abs() < 1e-12, "{p1}");
        let p2 = p_x(&chart, 2);
        assert!((p2 - (3.0 / 5f64.sqrt() + 0.1).exp()).abs() < 1e-12, "{p2}");
        // frozen decimals
        assert!((p1 - 3.8253148839820824).abs() < 1e-12);
        assert!((p2 - 4.2276267622589174).abs() < 1e-12);
    }

    #[test]
    fn quadratic_symbol_sum_is_minus_two() {
        // the degree-2 contribution to P_2 above relies on this oracle
        let (chart, _) = worked_example(2);
        let table = chart.factor_table();
        let s: i64 = table.irreducible_codes(2).map(|gc| chart.chi_code(gc) as i64).sum();
        assert_eq!(s, -2);
    }

    #[test]
    fn z_quotient_worked_value() {
        let (chart, rec) = worked_example(2);
        let zq = z_quotient(&rec.central, p_x(&chart, 1));
        assert!((zq - 0.8735596644585994).abs() < 1e-12, "{zq}");
        // X = 0 gives the central value itself
        let z0 = z_quotient(&rec.central, p_x(&chart, 0));
        assert!((z0 - rec.central.to_f64()).abs() < 1e-15);
    }

    #[test]
    fn identity_p_times_z_is_central() {
        let (chart, rec) = worked_example(2);
        for x in [0u32, 1, 2] {
            let px = p_x(&chart, x);
            let zq = z_quotient(&rec.central, px);
            let rel = (px * zq / rec.central.to_f64() - 1.0).abs();
            assert!(rel < 1e-12, "X = {x}: {rel}");
        }
    }

    #[test]
    fn zero_route_matches_quotient() {
        let (chart, rec) = worked_example(2);
        let zeros = rec.zeros.as_ref().unwrap();
        for x in [1u32, 2] {
            let bump = BumpWeight::new(5, x, BumpShape::Standard).unwrap();
            let zz = z_zeros(&zeros.angles, 5, x, 1e-6, &bump).unwrap();
            let zq = z_quotient(&rec.central, p_x(&chart, x));
            let rel = (zz / zq - 1.0).abs();
            assert!(rel < 1e-3, "X = {x}: z_zeros {zz} vs quotient {zq} (rel {rel:.2e})");
        }
    }

    #[test]
    fn zero_route_bump_independence() {
        let (chart, rec) = worked_example(2);
        let zeros = rec.zeros.as_ref().unwrap();
        let tol = 1e-6;
        let b1 = BumpWeight::new(5, 2, BumpShape::Standard).unwrap();
        let b2 = BumpWeight::new(5, 2, BumpShape::Narrow).unwrap();
        let z1 = z_zeros(&zeros.angles, 5, 2, tol, &b1).unwrap();
        let z2 = z_zeros(&zeros.angles, 5, 2, tol, &b2).unwrap();
        assert!((z1 / z2 - 1.0).abs() <= 10.0 * 2.0 * tol, "{z1} vs {z2}");
        let _ = chart;
    }

    #[test]
    fn zero_route_tolerance_semantics() {
        let (_, rec) = worked_example(2);
        let zeros = rec.zeros.as_ref().unwrap();
        let b = BumpWeight::new(5, 2, BumpShape::Standard).unwrap();
        let coarse = z_zeros(&zeros.angles, 5, 2, 1e-3, &b).unwrap();
        let fine = z_zeros(&zeros.angles, 5, 2, 1e-6, &b).unwrap();
        assert!((coarse - fine).abs() <= 2e-3, "{coarse} vs {fine}");
    }

    #[test]
    fn alpha_values() {
        let f = Field::new(5).unwrap();
        let table = FactorTable::build(f, 4);
        let one = Poly::one(f);
        let a2 = AlphaCoeffs::new(Rat::from_integer(2), 4);
        assert_eq!(a2.eval(&table, &one), Rat::one());
        // deg Q = 1 <= X/2: alpha_2(Q) = d_2(Q) = 2
        assert_eq!(a2.eval(&table, &Poly::t(f)), Rat::from_integer(2));
        // alpha_{-1}(Q^2) = 1/2 in the outer range
        let am1 = AlphaCoeffs::new(Rat::from_integer(-1), 1);
        let t2 = Poly::new(f, vec![0, 0, 1]);
        assert_eq!(am1.eval(&table, &t2), Rat::new(1, 2));
        // inner range: d_{-1}(Q^2) = 0
        let am1_wide = AlphaCoeffs::new(Rat::from_integer(-1), 2);
        assert_eq!(am1_wide.eval(&table, &t2), Rat::zero());
        // off-support
        let a_narrow = AlphaCoeffs::new(Rat::from_integer(2), 1);
        let q2 = Poly::new(f, vec![2, 0, 1]);
        assert_eq!(a_narrow.eval(&table, &q2), Rat::zero());
    }

    #[test]
    fn alpha_matches_d_k_on_half_smooth() {
        // alpha_k(f) = d_k(f) for f in S(X/2), exhaustively for smooth f of degree <= 8
        let f = Field::new(5).unwrap();
        let table = FactorTable::build(f, 8);
        let x = 8u32;
        for k in [1i64, 2, 3] {
            let alpha = AlphaCoeffs::new(Rat::from_integer(k), x);
            for d in 1..=8usize {
                let lo = table.offset(d);
                let hi = table.offset(d + 1);
                for gc in lo..hi {
                    let fac = table.factorize(&table.decode(gc)).unwrap();
                    if fac.factors.iter().any(|(p, _)| p.degree().unwrap() > 4) {
                        continue; // outside S(X/2)
                    }
                    let dk: i64 = fac
                        .factors
                        .iter()
                        .map(|(_, e)| crate::predictions::d_k_primepower(k as u32, *e as u64) as i64)
                        .product();
                    assert_eq!(
                        alpha.eval_code(&table, gc),
                        Rat::from_integer(dk),
                        "gc = {gc}"
                    );
                }
            }
        }
    }

    #[test]
    fn alpha_multiplicative_on_coprime() {
        let f = Field::new(5).unwrap();
        let table = FactorTable::build(f, 6);
        let alpha = AlphaCoeffs::new(Rat::new(3, 2), 3);
        let a = Poly::new(f, vec![0, 0, 1]); // T^2
        let b = Poly::new(f, vec![1, 1, 0, 1]); // irreducible cubic
        let ab = a.mul(&b);
        assert_eq!(
            alpha.eval(&table, &ab),
            alpha.eval(&table, &a) * alpha.eval(&table, &b)
        );
    }

    #[test]
    fn p_star_trivial_truncations() {
        let (chart, _) = worked_example(2);
        // X = 0: only f = 1 survives (alpha vanishes off S(0) = {1})
        let v = p_star(&chart, Rat::from_integer(2), 0, 1.0);
        assert_eq!(v, 1.0);
    }
}
