//! Persistent sweep caches: CSV with '#'-prefixed header lines, exact
//! rationals as "p/q" strings, append-only with a completeness marker.
//!
//! One LRecord line per conductor (`conductor,coeffs,central_a,central_b,
//! angles,rh_defect`), followed by one hybrid line per X (`conductor,X,p_x,
//! z_quotient,z_zeros,hybrid_defect`). The conductor field is quoted since
//! the compact polynomial form contains commas; hybrid lines are told apart
//! by their X field carrying no ';'. Floats that must round-trip use the
//! shortest exact representation; angles are pinned to 12 significant
//! digits.

use crate::characters::Conductor;
use crate::hybrid::{BumpShape, HybridRecord};
use crate::lfun::{LRecord, RecordMode, ZeroData};
use crate::poly::Poly;
use crate::quad::{rational_from_string, rational_to_string, QuadValue};
use crate::field::Field;
use crate::{Error, Result};
use std::fmt::Write as _;
use std::io::{BufReader, Read};
use std::path::Path;

pub const CACHE_VERSION: u32 = 1;

/// Sweep parameters carried in the cache header; resuming requires an exact
/// match.
#[derive(Clone, Debug, PartialEq)]
pub struct CacheHeader {
    pub version: u32,
    pub q: u64,
    pub genus: usize,
    pub mode: RecordMode,
    pub x_list: Vec<u32>,
    pub zeros_stride: usize,
    pub tol: f64,
    pub bump: BumpShape,
}

/// One conductor's worth of cache content.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub record: LRecord,
    pub hybrids: Vec<HybridRecord>,
}

/// Parsed cache: header, complete rows, completeness data.
#[derive(Debug)]
pub struct CacheFile {
    pub header: CacheHeader,
    pub rows: Vec<SweepRow>,
    pub complete: bool,
    pub fe_violations: usize,
    /// Byte offset just past the last complete conductor group; a resume
    /// truncates here and appends.
    pub resume_offset: u64,
}

fn mode_tag(mode: RecordMode) -> &'static str {
    match mode {
        RecordMode::Full => "full",
        RecordMode::Light => "light",
    }
}

fn bump_tag(b: BumpShape) -> &'static str {
    match b {
        BumpShape::Standard => "standard",
        BumpShape::Narrow => "narrow",
    }
}

impl CacheHeader {
    pub fn render(&self) -> String {
        let xs = self
            .x_list
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(";");
        format!(
            "# lchi cache v{}\n# q={} g={} mode={} X={} zeros_stride={} tol={:e} bump={} order=lex\n\
             # columns lrecord: conductor,coeffs,central_a,central_b,angles,rh_defect\n\
             # columns hybrid: conductor,X,p_x,z_quotient,z_zeros,hybrid_defect\n",
            self.version,
            self.q,
            self.genus,
            mode_tag(self.mode),
            xs,
            self.zeros_stride,
            self.tol,
            bump_tag(self.bump),
        )
    }

    fn parse(lines: &[String]) -> Result<CacheHeader> {
        let bad = |m: &str| Error::Cache(format!("bad cache header: {m}"));
        if lines.len() < 2 || !lines[0].starts_with("# lchi cache v") {
            return Err(bad("missing magic line"));
        }
        let version: u32 = lines[0]
            .trim_start_matches("# lchi cache v")
            .trim()
            .parse()
            .map_err(|_| bad("unparseable version"))?;
        if version != CACHE_VERSION {
            return Err(Error::Cache(format!("unsupported cache version {version}")));
        }
        let mut q = None;
        let mut g = None;
        let mut mode = None;
        let mut x_list = None;
        let mut zeros_stride = None;
        let mut tol = None;
        let mut bump = None;
        for token in lines[1].trim_start_matches('#').split_whitespace() {
            let Some((key, val)) = token.split_once('=') else { continue };
            match key {
                "q" => q = val.parse().ok(),
                "g" => g = val.parse().ok(),
                "mode" => {
                    mode = match val {
                        "full" => Some(RecordMode::Full),
                        "light" => Some(RecordMode::Light),
                        _ => None,
                    }
                }
                "X" => {
                    x_list = Some(if val.is_empty() {
                        Vec::new()
                    } else {
                        val.split(';')
                            .map(|v| v.parse())
                            .collect::<std::result::Result<Vec<u32>, _>>()
                            .map_err(|_| bad("unparseable X list"))?
                    })
                }
                "zeros_stride" => zeros_stride = val.parse().ok(),
                "tol" => tol = val.parse().ok(),
                "bump" => bump = val.parse().ok(),
                _ => {}
            }
        }
        Ok(CacheHeader {
            version,
            q: q.ok_or_else(|| bad("missing q"))?,
            genus: g.ok_or_else(|| bad("missing g"))?,
            mode: mode.ok_or_else(|| bad("missing mode"))?,
            x_list: x_list.ok_or_else(|| bad("missing X"))?,
            zeros_stride: zeros_stride.ok_or_else(|| bad("missing zeros_stride"))?,
            tol: tol.ok_or_else(|| bad("missing tol"))?,
            bump: bump.ok_or_else(|| bad("missing bump"))?,
        })
    }
}

fn format_angle(a: f64) -> String {
    format!("{a:.11e}")
}

pub fn render_lrecord(row: &LRecord) -> String {
    let coeffs = row
        .coeffs
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(";");
    let (angles, defect) = match &row.zeros {
        Some(z) => (
            z.angles.iter().map(|&a| format_angle(a)).collect::<Vec<_>>().join(";"),
            format!("{:.6e}", z.rh_defect),
        ),
        None => (String::new(), String::new()),
    };
    format!(
        "\"{}\",{},{},{},{},{}",
        row.conductor.poly().to_compact(),
        coeffs,
        rational_to_string(row.central.a()),
        rational_to_string(row.central.b()),
        angles,
        defect
    )
}

pub fn render_hybrid(conductor: &Conductor, h: &HybridRecord) -> String {
    let (zz, defect) = match h.z_zeros {
        Some(z) => (format!("{z}"), format!("{:.6e}", h.hybrid_defect().unwrap())),
        None => (String::new(), String::new()),
    };
    format!(
        "\"{}\",{},{},{},{},{}",
        conductor.poly().to_compact(),
        h.x,
        h.p_x,
        h.z_quotient,
        zz,
        defect
    )
}

pub fn render_row(row: &SweepRow) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", render_lrecord(&row.record));
    for h in &row.hybrids {
        let _ = writeln!(out, "{}", render_hybrid(&row.record.conductor, h));
    }
    out
}

pub fn completeness_marker(rows: usize, fe_violations: usize) -> String {
    format!("# complete rows={rows} fe_violations={fe_violations}\n")
}

/// Split a cache line into fields, honoring the quoted conductor field.
fn split_line(line: &str) -> Result<Vec<String>> {
    let bad = || Error::Cache(format!("malformed cache line: {line:?}"));
    let rest = line.strip_prefix('"').ok_or_else(bad)?;
    let (cond, rest) = rest.split_once('"').ok_or_else(bad)?;
    let rest = rest.strip_prefix(',').ok_or_else(bad)?;
    let mut fields = vec![cond.to_string()];
    fields.extend(rest.split(',').map(|s| s.to_string()));
    Ok(fields)
}

fn parse_lrecord(fields: &[String], field: Field) -> Result<LRecord> {
    let bad = |m: &str| Error::Cache(format!("bad lrecord field: {m}"));
    if fields.len() != 6 {
        return Err(bad("wrong field count"));
    }
    let poly = Poly::parse(&fields[0], field)?;
    let conductor = Conductor::new_unchecked(poly);
    let genus = conductor.genus();
    let coeffs = fields[1]
        .split(';')
        .map(|v| v.parse())
        .collect::<std::result::Result<Vec<i64>, _>>()
        .map_err(|_| bad("coefficients"))?;
    let a = rational_from_string(&fields[2]).ok_or_else(|| bad("central_a"))?;
    let b = rational_from_string(&fields[3]).ok_or_else(|| bad("central_b"))?;
    let central = QuadValue::new(field.q(), a, b);
    let zeros = if fields[5].is_empty() {
        None
    } else {
        let angles = if fields[4].is_empty() {
            Vec::new()
        } else {
            fields[4]
                .split(';')
                .map(|v| v.parse())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|_| bad("angles"))?
        };
        let rh_defect: f64 = fields[5].parse().map_err(|_| bad("rh_defect"))?;
        Some(ZeroData { angles, rh_defect, real_roots: 0 })
    };
    Ok(LRecord { conductor, genus, coeffs, central, zeros })
}

fn parse_hybrid(fields: &[String]) -> Result<HybridRecord> {
    let bad = |m: &str| Error::Cache(format!("bad hybrid field: {m}"));
    if fields.len() != 6 {
        return Err(bad("wrong field count"));
    }
    let x: u32 = fields[1].parse().map_err(|_| bad("X"))?;
    let p_x: f64 = fields[2].parse().map_err(|_| bad("p_x"))?;
    let z_quotient: f64 = fields[3].parse().map_err(|_| bad("z_quotient"))?;
    let z_zeros = if fields[4].is_empty() {
        None
    } else {
        Some(fields[4].parse().map_err(|_| bad("z_zeros"))?)
    };
    Ok(HybridRecord { x, p_x, z_quotient, z_zeros })
}

/// Read a cache file: header, all complete conductor groups, completeness.
/// Incomplete trailing content is ignored and reflected in `resume_offset`.
pub fn read_cache(path: &Path) -> Result<CacheFile> {
    let file = std::fs::File::open(path)?;
    let mut reader = BufReader::new(file);
    let mut contents = String::new();
    reader.read_to_string(&mut contents)?;
    read_cache_str(&contents)
}

pub fn read_cache_str(contents: &str) -> Result<CacheFile> {
    let mut header_lines = Vec::new();
    let mut offset = 0u64;
    let mut lines = contents.split_inclusive('\n');
    // header block: leading '#' lines
    let mut body_start = 0u64;
    for line in lines.by_ref() {
        if line.starts_with('#') {
            header_lines.push(line.trim_end().to_string());
            offset += line.len() as u64;
            body_start = offset;
            if header_lines.len() >= 4 {
                break;
            }
        } else {
            return Err(Error::Cache("cache body before header ended".into()));
        }
    }
    let header = CacheHeader::parse(&header_lines)?;
    let field = Field::new(header.q).map_err(|e| Error::Cache(e.to_string()))?;
    let group_len = 1 + header.x_list.len();

    let mut rows = Vec::new();
    let mut complete = false;
    let mut fe_violations = 0usize;
    let mut pending: Vec<Vec<String>> = Vec::new();
    let mut pending_bytes = 0u64;
    let mut resume_offset = body_start;
    for line in lines {
        let trimmed = line.trim_end();
        if trimmed.starts_with("# complete") {
            for token in trimmed.split_whitespace() {
                if let Some(v) = token.strip_prefix("rows=") {
                    let n: usize = v.parse().map_err(|_| Error::Cache("bad rows count".into()))?;
                    complete = n == rows.len() && pending.is_empty();
                }
                if let Some(v) = token.strip_prefix("fe_violations=") {
                    fe_violations = v.parse().unwrap_or(0);
                }
            }
            break;
        }
        if trimmed.is_empty() || trimmed.starts_with('#') {
            // stray comment: keep scanning, do not advance the resume point
            pending_bytes += line.len() as u64;
            continue;
        }
        if !line.ends_with('\n') {
            break; // torn final line from an interrupted writer
        }
        let fields = match split_line(trimmed) {
            Ok(f) => f,
            Err(_) => break,
        };
        pending.push(fields);
        pending_bytes += line.len() as u64;
        if pending.len() == group_len {
            let record = parse_lrecord(&pending[0], field)?;
            let mut hybrids = Vec::with_capacity(header.x_list.len());
            for h in &pending[1..] {
                if h[0] != pending[0][0] {
                    return Err(Error::Cache("hybrid row conductor mismatch".into()));
                }
                hybrids.push(parse_hybrid(h)?);
            }
            rows.push(SweepRow { record, hybrids });
            pending.clear();
            resume_offset += pending_bytes;
            pending_bytes = 0;
        }
    }
    Ok(CacheFile { header, rows, complete, fe_violations, resume_offset })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::CharTable;
    use crate::factor::FactorTable;
    use crate::hybrid::{p_x, z_quotient};
    use std::sync::Arc;

    fn sample_rows(mode: RecordMode) -> (CacheHeader, Vec<SweepRow>) {
        let field = Field::new(5).unwrap();
        let table = Arc::new(FactorTable::build(field, 2));
        let mut rows = Vec::new();
        for p in crate::factor::irreducible_polys(field, 3).take(5) {
            let cond = Conductor::new_unchecked(p);
            let chart = CharTable::build(cond, 2, table.clone());
            let record = LRecord::from_table(&chart, mode).unwrap();
            let px = p_x(&chart, 2);
            let hybrids = vec![HybridRecord {
                x: 2,
                p_x: px,
                z_quotient: z_quotient(&record.central, px),
                z_zeros: None,
            }];
            rows.push(SweepRow { record, hybrids });
        }
        let header = CacheHeader {
            version: CACHE_VERSION,
            q: 5,
            genus: 1,
            mode,
            x_list: vec![2],
            zeros_stride: 0,
            tol: 1e-6,
            bump: BumpShape::Standard,
        };
        (header, rows)
    }

    fn render(header: &CacheHeader, rows: &[SweepRow], complete: bool) -> String {
        let mut out = header.render();
        for r in rows {
            out.push_str(&render_row(r));
        }
        if complete {
            out.push_str(&completeness_marker(rows.len(), 0));
        }
        out
    }

    #[test]
    fn roundtrip_exact_fields() {
        for mode in [RecordMode::Full, RecordMode::Light] {
            let (header, rows) = sample_rows(mode);
            let text = render(&header, &rows, true);
            let parsed = read_cache_str(&text).unwrap();
            assert!(parsed.complete);
            assert_eq!(parsed.header, header);
            assert_eq!(parsed.rows.len(), rows.len());
            for (a, b) in rows.iter().zip(parsed.rows.iter()) {
                assert_eq!(a.record.conductor, b.record.conductor);
                assert_eq!(a.record.coeffs, b.record.coeffs);
                // exact fields round-trip bit-exactly
                assert_eq!(a.record.central, b.record.central);
                // shortest-float fields round-trip exactly too
                assert_eq!(a.hybrids[0].p_x, b.hybrids[0].p_x);
                assert_eq!(a.hybrids[0].z_quotient, b.hybrids[0].z_quotient);
                match (&a.record.zeros, &b.record.zeros) {
                    (Some(za), Some(zb)) => {
                        for (x, y) in za.angles.iter().zip(zb.angles.iter()) {
                            assert!((x - y).abs() <= 1e-11 * x.abs());
                        }
                    }
                    (None, None) => {}
                    _ => panic!("zeros presence must round-trip"),
                }
            }
        }
    }

    #[test]
    fn truncated_file_resumes_at_group_boundary() {
        let (header, rows) = sample_rows(RecordMode::Full);
        let text = render(&header, &rows, false);
        // cut in the middle of the fourth row group
        let after_three: usize = header.render().len()
            + rows[..3].iter().map(|r| render_row(r).len()).sum::<usize>();
        let torn = &text[..after_three + 17];
        let parsed = read_cache_str(torn).unwrap();
        assert!(!parsed.complete);
        assert_eq!(parsed.rows.len(), 3);
        assert_eq!(parsed.resume_offset as usize, after_three);
    }

    #[test]
    fn incomplete_without_marker() {
        let (header, rows) = sample_rows(RecordMode::Light);
        let text = render(&header, &rows, false);
        let parsed = read_cache_str(&text).unwrap();
        assert!(!parsed.complete);
        assert_eq!(parsed.rows.len(), rows.len());
    }

    #[test]
    fn header_mismatch_detected() {
        let (header, rows) = sample_rows(RecordMode::Light);
        let text = render(&header, &rows, true);
        let reparsed = read_cache_str(&text).unwrap();
        let mut other = reparsed.header.clone();
        other.genus = 2;
        assert_ne!(other, header);
    }
}
