//! L(s, chi_P) as the degree-2g polynomial in u = q^(-s): coefficients,
//! exact central value by two independent routes, and zeros on the RH circle.

use crate::characters::{CharTable, Conductor};
use crate::factor::FactorTable;
use crate::quad::QuadValue;
pub use crate::roots::ZeroData;
use crate::roots::zeros_on_circle;
use crate::{Error, Result};
use std::sync::Arc;

/// How much of the record a sweep materializes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecordMode {
    /// All 2g+1 coefficients, both central-value routes checked bit-exact,
    /// zeros with rh_defect.
    Full,
    /// Coefficients only up to degree g (what the two-sum central value
    /// needs); no zeros. For large-g sweeps.
    Light,
}

/// Per-conductor bundle: the unit of a family sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct LRecord {
    pub conductor: Conductor,
    pub genus: usize,
    /// c_0..c_{2g} in full mode, c_0..c_g in light mode; c_n are integers
    /// with |c_n| <= q^n.
    pub coeffs: Vec<i64>,
    pub central: QuadValue,
    pub zeros: Option<ZeroData>,
}

/// L-series coefficients c_n = sum over monic f of degree n of chi_P(f),
/// read off the character table degree by degree.
pub fn coefficients(chart: &CharTable, up_to: usize) -> Vec<i64> {
    (0..=up_to).map(|n| chart.degree_sum(n)).collect()
}

/// Central value from the full coefficient list: sum c_n q^(-n/2).
pub fn central_from_polynomial(q: u64, coeffs: &[i64]) -> QuadValue {
    let mut acc = QuadValue::zero(q);
    for (n, &c) in coeffs.iter().enumerate() {
        if c != 0 {
            acc = acc.add(&QuadValue::half_power_term(q, c, n));
        }
    }
    acc
}

/// Central value from the approximate functional equation: the two finite
/// sums over monic f of degree <= g and <= g-1.
pub fn central_from_two_sums(q: u64, coeffs_low: &[i64], g: usize) -> QuadValue {
    debug_assert!(coeffs_low.len() >= g + 1);
    let mut acc = QuadValue::zero(q);
    for (n, &c) in coeffs_low.iter().enumerate().take(g + 1) {
        if c == 0 {
            continue;
        }
        let weight = if n <= g.saturating_sub(1) { 2 } else { 1 };
        acc = acc.add(&QuadValue::half_power_term(q, weight * c, n));
    }
    acc
}

/// Count violations of the empirical coefficient symmetry
/// c_n q^g = c_{2g-n} q^n. Measured, never assumed.
pub fn symmetry_violations(q: u64, coeffs: &[i64], g: usize) -> usize {
    let mut violations = 0;
    for n in 0..=g {
        let lhs = coeffs[n] as i128 * (q as i128).pow(g as u32);
        let rhs = coeffs[2 * g - n] as i128 * (q as i128).pow(n as u32);
        if lhs != rhs {
            violations += 1;
        }
    }
    violations
}

impl LRecord {
    /// Compute a record for one conductor. The character table must cover
    /// degree 2g (full) or at least g (light); `extra_degree` lets sweeps
    /// reuse one table that also feeds Euler products up to X.
    pub fn compute(
        conductor: Conductor,
        table: Arc<FactorTable>,
        mode: RecordMode,
        extra_degree: usize,
    ) -> Result<(LRecord, CharTable)> {
        let g = conductor.genus();
        let need = match mode {
            RecordMode::Full => (2 * g).max(extra_degree),
            RecordMode::Light => g.max(extra_degree),
        };
        let chart = CharTable::build(conductor.clone(), need, table);
        let record = Self::from_table(&chart, mode)?;
        Ok((record, chart))
    }

    /// Build the record from an existing character table.
    pub fn from_table(chart: &CharTable, mode: RecordMode) -> Result<LRecord> {
        let conductor = chart.conductor().clone();
        let g = conductor.genus();
        let q = conductor.field().q();
        match mode {
            RecordMode::Full => {
                assert!(chart.max_degree() >= 2 * g);
                let coeffs = coefficients(chart, 2 * g);
                for (n, &c) in coeffs.iter().enumerate() {
                    debug_assert!(
                        c.unsigned_abs() <= q.pow(n as u32),
                        "|c_{n}| = {c} exceeds q^{n}"
                    );
                }
                let central = central_from_polynomial(q, &coeffs);
                let two_sum = central_from_two_sums(q, &coeffs, g);
                if central != two_sum {
                    return Err(Error::CentralMismatch(conductor.poly().to_string()));
                }
                let zeros = if g > 0 {
                    Some(zeros_on_circle(&coeffs, q)?)
                } else {
                    Some(ZeroData { angles: Vec::new(), rh_defect: 0.0, real_roots: 0 })
                };
                Ok(LRecord { conductor, genus: g, coeffs, central, zeros })
            }
            RecordMode::Light => {
                assert!(chart.max_degree() >= g);
                let coeffs = coefficients(chart, g);
                let central = central_from_two_sums(q, &coeffs, g);
                Ok(LRecord { conductor, genus: g, coeffs, central, zeros: None })
            }
        }
    }

    pub fn is_full(&self) -> bool {
        self.coeffs.len() == 2 * self.genus + 1 && self.zeros.is_some()
    }
}
