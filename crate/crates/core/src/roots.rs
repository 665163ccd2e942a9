//! Zeros of the L-polynomial on the circle |u| = q^(-1/2).
//!
//! Companion-matrix eigenvalues with a Newton polish per root; the circle
//! gives a built-in accuracy witness (rh_defect). One angle is kept per
//! conjugate pair; real roots would be angles 0 or pi and are reported, not
//! assumed away.

use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Zero bookkeeping for one conductor: angles in (0, pi], ascending, one per
/// conjugate pair, and the worst deviation of |u|·sqrt(q) from 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroData {
    pub angles: Vec<f64>,
    pub rh_defect: f64,
    /// Number of numerically real roots (should stay 0; a real root means
    /// the L-polynomial vanishes at u = ±q^(-1/2)).
    pub real_roots: usize,
}

const RESIDUAL_TOL: f64 = 1e-10;

/// All complex roots of sum c_n u^n, polished by one or two Newton steps.
pub fn polynomial_roots(coeffs: &[i64]) -> Result<Vec<Complex64>> {
    let deg = coeffs.len() - 1;
    assert!(deg >= 1 && coeffs[deg] != 0, "leading coefficient must be nonzero");
    let c: Vec<f64> = coeffs.iter().map(|&v| v as f64).collect();
    let lead = c[deg];
    // companion matrix of the monic normalization
    let mut m = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -c[i] / lead;
    }
    let eigen = m.complex_eigenvalues();
    let mut roots: Vec<Complex64> = eigen.iter().map(|e| Complex64::new(e.re, e.im)).collect();

    let scale: f64 = c.iter().map(|v| v.abs()).fold(0.0, f64::max);
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(&c, *r);
            if p.norm() <= 1e-15 * scale || dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *r -= step;
        }
        let (p, _) = horner(&c, *r);
        if !(p.norm() <= RESIDUAL_TOL * scale) {
            return Err(Error::RootsNonConvergent(format!(
                "residual {:.3e} at root {r} exceeds {RESIDUAL_TOL:.0e}",
                p.norm() / scale
            )));
        }
    }
    Ok(roots)
}

fn horner(c: &[f64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &coeff in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + coeff;
    }
    (p, dp)
}

/// Roots of the L-polynomial folded onto the RH circle: angles and defect.
pub fn zeros_on_circle(coeffs: &[i64], q: u64) -> Result<ZeroData> {
    let deg = coeffs.len() - 1;
    debug_assert!(deg % 2 == 0, "L-polynomial has even degree 2g");
    let g = deg / 2;
    let roots = polynomial_roots(coeffs)?;
    let target = (q as f64).sqrt().recip();
    let mut rh_defect = 0.0f64;
    let mut angles: Vec<f64> = Vec::with_capacity(g);
    let mut pos_real = 0usize;
    let mut neg_real = 0usize;
    // a root is "real" when its imaginary part is negligible at circle scale
    let real_eps = 1e-9 * target;
    for r in &roots {
        rh_defect = rh_defect.max((r.norm() * (q as f64).sqrt() - 1.0).abs());
        if r.im.abs() < real_eps {
            if r.re >= 0.0 {
                pos_real += 1;
            } else {
                neg_real += 1;
            }
        } else if r.im > 0.0 {
            angles.push(r.arg());
        }
    }
    // real roots pair among themselves: angle 0 for u = +q^{-1/2}, pi for
    // -q^{-1/2}; a leftover {+, -} pair is recorded once as the flag angle 0
    // (such an L vanishes at the center, and downstream refuses angle 0)
    for _ in 0..pos_real / 2 {
        angles.push(0.0);
    }
    for _ in 0..neg_real / 2 {
        angles.push(std::f64::consts::PI);
    }
    if pos_real % 2 == 1 {
        debug_assert_eq!(neg_real % 2, 1, "real roots come in an even total");
        angles.push(0.0);
    }
    if angles.len() != g {
        return Err(Error::RootsNonConvergent(format!(
            "expected {g} conjugate pairs, got {} angles from {} roots",
            angles.len(),
            roots.len()
        )));
    }
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(ZeroData { angles, rh_defect, real_roots: pos_real + neg_real })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_example_on_circle() {
        // 1 + 3u + 5u^2: roots (-3 ± i sqrt(11))/10, |u|^2 = 1/5 exactly
        let z = zeros_on_circle(&[1, 3, 5], 5).unwrap();
        assert_eq!(z.angles.len(), 1);
        let expect = std::f64::consts::PI - (11f64.sqrt() / 3.0).atan();
        assert!((z.angles[0] - expect).abs() < 1e-12, "{} vs {expect}", z.angles[0]);
        assert!(z.rh_defect < 1e-12);
        assert_eq!(z.real_roots, 0);
    }

    #[test]
    fn zero_middle_coefficient_gives_right_angle() {
        // c_1 = 0: purely imaginary pair, theta = pi/2
        let z = zeros_on_circle(&[1, 0, 5], 5).unwrap();
        assert!((z.angles[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn real_root_pair_is_reported() {
        // (1 - 5u^2) has real roots ±q^{-1/2}: one "pair" with mixed signs
        let z = zeros_on_circle(&[1, 0, -5], 5).unwrap();
        assert_eq!(z.real_roots, 2);
        assert_eq!(z.angles, vec![0.0]);
    }

    #[test]
    fn degree_six_against_product_structure() {
        // (1 + 3u + 5u^2)(1 - u + 5u^2)(1 + 5u^2) expanded
        let a = [1i64, 3, 5];
        let b = [1i64, -1, 5];
        let c = [1i64, 0, 5];
        let mut prod = vec![0i64; 7];
        let mut ab = vec![0i64; 5];
        for i in 0..3 {
            for j in 0..3 {
                ab[i + j] += a[i] * b[j];
            }
        }
        for i in 0..5 {
            for j in 0..3 {
                prod[i + j] += ab[i] * c[j];
            }
        }
        let z = zeros_on_circle(&prod, 5).unwrap();
        assert_eq!(z.angles.len(), 3);
        assert!(z.rh_defect < 1e-9);
        let mut expect = vec![
            std::f64::consts::PI - (11f64.sqrt() / 3.0).atan(),
            ((19f64).sqrt() / 1.0).atan(),
            std::f64::consts::FRAC_PI_2,
        ];
        expect.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (got, want) in z.angles.iter().zip(expect.iter()) {
            assert!((got - want).abs() < 1e-8, "{got} vs {want}");
        }
    }
}
