//! Special functions and numerics shared by the hybrid decomposition:
//! the cosine integral, adaptive Gauss-Legendre quadrature, compensated and
//! pairwise summation.

use crate::{Error, Result};
use num_complex::Complex64;
use std::sync::OnceLock;

/// Euler-Mascheroni constant to 30 digits.
pub const EULER_GAMMA: f64 = 0.577215664901532860606512090082;

/// Cosine integral Ci(x) = -int_x^inf cos(t)/t dt for x > 0.
///
/// Power series up to x = 8, complex Lentz continued fraction for
/// exp(ix) E1(ix) beyond (the auxiliary-function regime).
pub fn cosine_integral(x: f64) -> f64 {
    assert!(x > 0.0, "Ci needs a positive argument, got {x}");
    if x <= 8.0 {
        ci_series(x)
    } else {
        ci_continued_fraction(x)
    }
}

fn ci_series(x: f64) -> f64 {
    // gamma + ln x + sum_{k>=1} (-x^2)^k / (2k (2k)!)
    let x2 = x * x;
    let mut term = 1.0f64; // x^{2k}/(2k)!
    let mut sum = 0.0f64;
    let mut k = 1u32;
    loop {
        term *= x2 / ((2 * k - 1) as f64 * (2 * k) as f64);
        let contrib = if k % 2 == 0 { term } else { -term } / (2 * k) as f64;
        sum += contrib;
        if contrib.abs() < 1e-18 * (1.0 + sum.abs()) || k > 60 {
            break;
        }
        k += 1;
    }
    EULER_GAMMA + x.ln() + sum
}

fn ci_continued_fraction(x: f64) -> f64 {
    // Lentz evaluation of the continued fraction for E1(ix); then
    // Ci(x) = -Re(e^{-ix} h(x)).
    const FPMIN: f64 = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / FPMIN, 0.0);
    let mut d = b.inv();
    let mut h = d;
    let mut i = 1usize;
    loop {
        let a = -((i * i) as f64);
        b += Complex64::new(2.0, 0.0);
        d = (a * d + b).inv();
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < 1e-16 {
            break;
        }
        i += 1;
        if i > 10_000 {
            break; // CF converges in tens of steps for x > 8
        }
    }
    h *= Complex64::new(x.cos(), -x.sin());
    -h.re
}

/// |Ci(z)| ≤ 2/z for z > 0; the tail bound used when truncating zero sums.
pub fn ci_bound(z: f64) -> f64 {
    2.0 / z
}

fn gl16() -> &'static ([f64; 16], [f64; 16]) {
    static NODES: OnceLock<([f64; 16], [f64; 16])> = OnceLock::new();
    NODES.get_or_init(|| {
        // Legendre nodes on (-1, 1) by Newton iteration on P_16.
        let n = 16usize;
        let mut xs = [0.0f64; 16];
        let mut ws = [0.0f64; 16];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_eval(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_eval(n, x);
            xs[i] = x;
            ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (xs, ws)
    })
}

fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0f64;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Composite 16-point Gauss-Legendre over `segments` equal pieces.
pub fn gl_fixed<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, segments: usize) -> f64 {
    let (xs, ws) = gl16();
    let h = (b - a) / segments as f64;
    let mut terms = Vec::with_capacity(segments);
    for s in 0..segments {
        let lo = a + s as f64 * h;
        let mid = lo + 0.5 * h;
        let half = 0.5 * h;
        let mut acc = KahanSum::new();
        for i in 0..16 {
            acc.add(ws[i] * f(mid + half * xs[i]));
        }
        terms.push(acc.value() * half);
    }
    pairwise_sum(&terms)
}

/// Adaptive composite Gauss-Legendre: double the segment count until two
/// successive refinements agree to the requested tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rtol: f64, atol: f64) -> Result<f64> {
    let mut segments = 4usize;
    let mut prev = gl_fixed(f, a, b, segments);
    loop {
        segments *= 2;
        let cur = gl_fixed(f, a, b, segments);
        if (cur - prev).abs() <= atol.max(rtol * cur.abs()) {
            return Ok(cur);
        }
        if segments >= 1 << 15 {
            return Err(Error::QuadratureNonConvergent);
        }
        prev = cur;
    }
}

/// Compensated (Kahan) accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        KahanSum { sum: 0.0, c: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Pairwise summation in the order given; deterministic regardless of
/// available parallelism, and used for every floating family reduction.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}
