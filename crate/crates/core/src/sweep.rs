//! Family sweeps over the conductors of degree 2g+1: data-parallel over
//! conductors, deterministic content independent of worker count, resumable
//! append-only caching.

use crate::cache::{
    completeness_marker, read_cache, render_row, CacheFile, CacheHeader, SweepRow, CACHE_VERSION,
};
use crate::characters::{CharTable, Conductor};
use crate::factor::{count_irreducible, is_irreducible, FactorTable};
use crate::field::Field;
use crate::hybrid::{p_x, z_quotient, z_zeros, BumpShape, BumpWeight, HybridRecord};
use crate::lfun::{symmetry_violations, LRecord, RecordMode};
use crate::poly::{decode_monic, monic_count};
use crate::{Error, Result};
use rayon::prelude::*;
use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub field: Field,
    pub genus: usize,
    pub x_list: Vec<u32>,
    pub mode: RecordMode,
    /// Roughly how many conductors per X get the zero-route evaluation
    /// (0 disables it; it is quadrature-heavy and sampled by stride).
    pub zeros_target: usize,
    pub tol: f64,
    pub bump: BumpShape,
    pub progress: bool,
}

impl SweepConfig {
    pub fn new(field: Field, genus: usize, x_list: Vec<u32>) -> Self {
        let mode = if genus >= 4 { RecordMode::Light } else { RecordMode::Full };
        let mut x_list = x_list;
        x_list.sort_unstable();
        x_list.dedup();
        SweepConfig {
            field,
            genus,
            x_list,
            mode,
            zeros_target: 100,
            tol: 1e-6,
            bump: BumpShape::Standard,
            progress: false,
        }
    }

    pub fn header(&self, zeros_stride: usize) -> CacheHeader {
        CacheHeader {
            version: CACHE_VERSION,
            q: self.field.q(),
            genus: self.genus,
            mode: self.mode,
            x_list: self.x_list.clone(),
            zeros_stride,
            tol: self.tol,
            bump: self.bump,
        }
    }

    fn max_x(&self) -> u32 {
        self.x_list.last().copied().unwrap_or(0)
    }

    /// Degree the character table must reach per conductor.
    fn char_degree(&self) -> usize {
        let base = match self.mode {
            RecordMode::Full => 2 * self.genus,
            RecordMode::Light => self.genus,
        };
        base.max(self.max_x() as usize)
    }
}

/// In-memory result of a sweep.
#[derive(Debug)]
pub struct SweepData {
    pub header: CacheHeader,
    pub rows: Vec<SweepRow>,
    pub fe_violations: usize,
}

impl SweepData {
    pub fn field(&self) -> Field {
        Field::new(self.header.q).expect("validated on construction")
    }

    pub fn genus(&self) -> usize {
        self.header.genus
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Error unless the cache holds every conductor of the family.
    pub fn require_complete(&self) -> Result<()> {
        let expect = count_irreducible(self.field(), 2 * self.genus() + 1);
        if self.rows.len() as u64 != expect {
            return Err(Error::IncompleteCache(format!(
                "{} rows, family has {expect}",
                self.rows.len()
            )));
        }
        Ok(())
    }

    pub fn hybrid_for<'a>(&self, row: &'a SweepRow, x: u32) -> Option<&'a HybridRecord> {
        row.hybrids.iter().find(|h| h.x == x)
    }

    pub fn max_rh_defect(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.record.zeros.as_ref().map(|z| z.rh_defect))
            .fold(None, |acc, d| Some(acc.map_or(d, |a: f64| a.max(d))))
    }
}

/// Enumerate the conductor codes of degree 2g+1 in enumeration order.
pub fn conductor_codes(field: Field, genus: usize) -> Vec<u64> {
    let n = 2 * genus + 1;
    let total = monic_count(field, n) as usize;
    let opts: Vec<Option<u64>> = (0..total)
        .into_par_iter()
        .map(|code| {
            let code = code as u64;
            let p = decode_monic(field, n, code);
            if is_irreducible(&p).expect("monic nonconstant") {
                Some(code)
            } else {
                None
            }
        })
        .collect();
    opts.into_iter().flatten().collect()
}

fn compute_row(
    config: &SweepConfig,
    table: &Arc<FactorTable>,
    bumps: &[(u32, BumpWeight)],
    code: u64,
    index: usize,
    zeros_stride: usize,
) -> Result<SweepRow> {
    let field = config.field;
    let n = 2 * config.genus + 1;
    let poly = decode_monic(field, n, code);
    let conductor = Conductor::new_unchecked(poly);
    let chart = CharTable::build(conductor, config.char_degree(), table.clone());
    let record = LRecord::from_table(&chart, config.mode)?;
    let sampled = zeros_stride > 0 && index % zeros_stride == 0;
    let mut hybrids = Vec::with_capacity(config.x_list.len());
    for &x in &config.x_list {
        let px = p_x(&chart, x);
        let zq = z_quotient(&record.central, px);
        let zz = match (&record.zeros, sampled) {
            (Some(z), true) => {
                let bump = &bumps.iter().find(|(bx, _)| *bx == x).unwrap().1;
                Some(z_zeros(&z.angles, field.q(), x, config.tol, bump)?)
            }
            _ => None,
        };
        hybrids.push(HybridRecord { x, p_x: px, z_quotient: zq, z_zeros: zz });
    }
    Ok(SweepRow { record, hybrids })
}

/// Run a sweep in memory (no cache file).
pub fn run(config: &SweepConfig) -> Result<SweepData> {
    let codes = conductor_codes(config.field, config.genus);
    let stride = zeros_stride(config, codes.len());
    let rows = compute_rows(config, &codes, 0, stride)?;
    let fe_violations = count_fe_violations(config, &rows);
    Ok(SweepData { header: config.header(stride), rows, fe_violations })
}

fn zeros_stride(config: &SweepConfig, n: usize) -> usize {
    if config.zeros_target == 0 || config.mode == RecordMode::Light || config.x_list.is_empty() {
        0
    } else {
        (n / config.zeros_target.min(n)).max(1)
    }
}

fn count_fe_violations(config: &SweepConfig, rows: &[SweepRow]) -> usize {
    if config.mode != RecordMode::Full {
        return 0;
    }
    rows.iter()
        .map(|r| symmetry_violations(config.field.q(), &r.record.coeffs, r.record.genus))
        .sum()
}

fn compute_rows(
    config: &SweepConfig,
    codes: &[u64],
    start: usize,
    zeros_stride: usize,
) -> Result<Vec<SweepRow>> {
    let table = Arc::new(FactorTable::build(config.field, config.char_degree()));
    let mut bumps = Vec::new();
    if zeros_stride > 0 {
        for &x in &config.x_list {
            bumps.push((x, BumpWeight::new(config.field.q(), x, config.bump)?));
        }
    }
    let done = AtomicUsize::new(0);
    let total = codes.len() - start;
    let tick = (total / 20).max(1);
    let rows: Result<Vec<SweepRow>> = codes[start..]
        .par_iter()
        .enumerate()
        .map(|(offset, &code)| {
            let row = compute_row(config, &table, &bumps, code, start + offset, zeros_stride);
            if config.progress {
                let k = done.fetch_add(1, Ordering::Relaxed) + 1;
                if k % tick == 0 {
                    eprintln!("  sweep progress: {k}/{total}");
                }
            }
            row
        })
        .collect();
    rows
}

/// Print the resource estimate the sweep contract asks for.
pub fn print_estimate(config: &SweepConfig) {
    let n = count_irreducible(config.field, 2 * config.genus + 1);
    let per_row_entries = {
        let q = config.field.q() as f64;
        (0..=config.char_degree() as u32).map(|d| q.powi(d as i32)).sum::<f64>()
    };
    eprintln!(
        "sweep estimate: q={} g={} mode={} -> {} conductors, char table of {} entries each, X = {:?}",
        config.field.q(),
        config.genus,
        if config.mode == RecordMode::Full { "full" } else { "light" },
        n,
        per_row_entries as u64,
        config.x_list,
    );
    warn_x_regime(config.field, config.genus, &config.x_list);
}

/// The asymptotic regime assumes X <= (2-c) log g / log q; at desk scale that is
/// nominal, so violations warn with the implied c instead of failing.
pub fn warn_x_regime(field: Field, genus: usize, x_list: &[u32]) {
    for &x in x_list {
        if genus <= 1 {
            eprintln!("warning: X regime bound is vacuous at g = {genus} (X = {x})");
            continue;
        }
        let c = 2.0 - (x as f64) * (field.q() as f64).ln() / (genus as f64).ln();
        if c <= 0.0 {
            eprintln!(
                "warning: X = {x} violates X <= (2-c) log g / log q for every c in (0,2) \
                 at g = {genus} (implied c = {c:.3}); asymptotic predictions are extrapolations here"
            );
        }
    }
}

/// Sweep into a cache file, resuming an interrupted run if the file holds a
/// matching incomplete cache. The result is byte-identical to an
/// uninterrupted run regardless of thread count.
pub fn run_to_file(config: &SweepConfig, path: &Path) -> Result<SweepData> {
    let codes = conductor_codes(config.field, config.genus);
    let stride = zeros_stride(config, codes.len());
    let header = config.header(stride);

    let mut start = 0usize;
    let mut existing: Option<CacheFile> = None;
    let file_len = if path.exists() { std::fs::metadata(path)?.len() } else { 0 };
    // a write torn inside the header block cannot be resumed; start fresh
    if file_len > 0 && file_len < header.render().len() as u64 {
        std::fs::remove_file(path)?;
    } else if file_len > 0 {
        let parsed = read_cache(path)?;
        if parsed.header != header {
            return Err(Error::Cache(format!(
                "cache {} holds a different sweep (header mismatch); refusing to overwrite",
                path.display()
            )));
        }
        if parsed.complete {
            let fe = parsed.fe_violations;
            return Ok(SweepData { header, rows: parsed.rows, fe_violations: fe });
        }
        // sanity: cached rows must form a prefix of the enumeration
        if parsed.rows.len() > codes.len() {
            return Err(Error::Cache("cache has more rows than the family".into()));
        }
        if let Some(last) = parsed.rows.last() {
            let expect = decode_monic(config.field, 2 * config.genus + 1, codes[parsed.rows.len() - 1]);
            if last.record.conductor.poly() != &expect {
                return Err(Error::Cache(
                    "cache rows are not a prefix of the enumeration order".into(),
                ));
            }
        }
        start = parsed.rows.len();
        existing = Some(parsed);
    }

    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }

    let new_rows = compute_rows(config, &codes, start, stride)?;

    // truncate away any torn tail, then append the remaining groups
    use std::fs::OpenOptions;
    let file = OpenOptions::new().create(true).write(true).truncate(false).open(path)?;
    if let Some(parsed) = &existing {
        file.set_len(parsed.resume_offset)?;
    } else {
        file.set_len(0)?;
    }
    let mut w = std::io::BufWriter::new(file);
    use std::io::Seek;
    w.seek(std::io::SeekFrom::End(0))?;
    if existing.is_none() {
        w.write_all(header.render().as_bytes())?;
    }
    for row in &new_rows {
        w.write_all(render_row(row).as_bytes())?;
    }

    let mut rows = existing.map(|p| p.rows).unwrap_or_default();
    rows.extend(new_rows);
    let fe_violations = count_fe_violations(config, &rows);
    w.write_all(completeness_marker(rows.len(), fe_violations).as_bytes())?;
    w.flush()?;
    Ok(SweepData { header, rows, fe_violations })
}

/// Load a cache written by [`run_to_file`].
pub fn load(path: &Path) -> Result<SweepData> {
    let parsed = read_cache(path)?;
    if !parsed.complete {
        return Err(Error::IncompleteCache(format!(
            "{} holds {} rows without a completeness marker (resume the sweep first)",
            path.display(),
            parsed.rows.len()
        )));
    }
    Ok(SweepData { header: parsed.header, rows: parsed.rows, fe_violations: parsed.fe_violations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> SweepConfig {
        let field = Field::new(5).unwrap();
        let mut c = SweepConfig::new(field, 1, vec![2]);
        c.zeros_target = 5;
        c
    }

    #[test]
    fn g1_sweep_counts_and_identity() {
        let data = run(&small_config()).unwrap();
        assert_eq!(data.len(), 40);
        assert_eq!(data.fe_violations, 0);
        data.require_complete().unwrap();
        for row in &data.rows {
            let h = &row.hybrids[0];
            let rel = (h.p_x * h.z_quotient / row.record.central.to_f64() - 1.0).abs();
            assert!(rel < 1e-12);
        }
        assert!(data.max_rh_defect().unwrap() < 1e-10);
        // some zero-route samples landed
        let sampled = data.rows.iter().filter(|r| r.hybrids[0].z_zeros.is_some()).count();
        assert!(sampled >= 5, "{sampled}");
    }

    #[test]
    fn cache_roundtrip_and_resume_identical() {
        let dir = std::env::temp_dir().join(format!("lchi-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let config = small_config();
        let full_path = dir.join("full.csv");
        let _ = std::fs::remove_file(&full_path);
        run_to_file(&config, &full_path).unwrap();
        let uninterrupted = std::fs::read(&full_path).unwrap();

        // simulate a kill at ~half the file, torn mid-line
        let cut = uninterrupted.len() / 2 + 7;
        let torn_path = dir.join("torn.csv");
        std::fs::write(&torn_path, &uninterrupted[..cut]).unwrap();
        run_to_file(&config, &torn_path).unwrap();
        let resumed = std::fs::read(&torn_path).unwrap();
        assert_eq!(uninterrupted, resumed, "resumed cache differs from uninterrupted");

        let loaded = load(&full_path).unwrap();
        assert_eq!(loaded.len(), 40);
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn header_mismatch_refuses() {
        let dir = std::env::temp_dir().join(format!("lchi-test-hm-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cache.csv");
        let _ = std::fs::remove_file(&path);
        run_to_file(&small_config(), &path).unwrap();
        let mut other = small_config();
        other.x_list = vec![3];
        assert!(matches!(run_to_file(&other, &path), Err(Error::Cache(_))));
        let _ = std::fs::remove_dir_all(&dir);
    }
}
