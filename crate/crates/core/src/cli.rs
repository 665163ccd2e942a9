//! Command-line interface: enumerate | lfun | hybrid | sweep | moments |
//! twisted | predict | compare. Validation problems exit 2 with a one-line
//! reason, runtime failures exit 1.

use crate::characters::{CharTable, Conductor};
use crate::factor::{count_irreducible, irreducible_polys, FactorTable};
use crate::field::Field;
use crate::hybrid::{p_x, z_quotient, z_zeros, BumpShape, BumpWeight, HybridRecord};
use crate::lfun::{symmetry_violations, LRecord, RecordMode};
use crate::moments::{
    euler_moment, moment, orthogonality_audit, splitting_report, twisted_moment, z_moment,
    MomentReport, SplittingReport, PREDICTION_TRUNC,
};
use crate::poly::{monic_polys, Poly};
use crate::predictions::{
    a_k, predicted_euler_moment, predicted_l_over_p, predicted_moment, predicted_twisted,
    predicted_zx_moment, PredictionReport,
};
use crate::sweep::{load, print_estimate, run_to_file, warn_x_regime, SweepConfig, SweepData};
use crate::{Error, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::path::PathBuf;
use std::sync::Arc;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(
    name = "lchi",
    version,
    about = "Quadratic Dirichlet L-functions over F_q[T] with prime conductor: exact central values, hybrid Euler-Hadamard decomposition, family-moment experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Field size q (odd prime with q ≡ 1 mod 4)
    #[arg(long, global = true, default_value_t = 5)]
    q: u64,

    /// Genus g of the family (conductors have degree 2g+1)
    #[arg(long, global = true)]
    g: Option<usize>,

    /// Euler-product truncation points X (comma separated)
    #[arg(long = "X", global = true, value_delimiter = ',')]
    x: Option<Vec<u32>>,

    /// Moment powers k (comma separated)
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    k: Option<Vec<i64>>,

    /// Cache file path (default: $LCHI_CACHE_DIR/sweep_q{q}_g{g}.csv)
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    /// Worker threads (0 = all cores)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,

    /// Relative tolerance for zero-route evaluations
    #[arg(long, global = true, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List or count monic (optionally irreducible) polynomials of a degree
    Enumerate {
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        irreducible: bool,
        /// Print only the count
        #[arg(long)]
        count: bool,
        /// Stop after this many polynomials
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Compute one L-function record for a prime conductor
    Lfun {
        /// Conductor, e.g. "T^3+T+1" or "poly:q5:1,1,0,1"
        #[arg(long)]
        prime: String,
    },
    /// Hybrid decomposition of one conductor at each X
    Hybrid {
        #[arg(long)]
        prime: String,
        /// Bump shape for the zero route
        #[arg(long, default_value = "standard")]
        bump: String,
    },
    /// Sweep the family of conductors of degree 2g+1 into a cache
    Sweep {
        /// Force light records (central values only; default for g >= 4)
        #[arg(long, conflicts_with = "full")]
        light: bool,
        /// Force full records (coefficients, zeros; default for g <= 3)
        #[arg(long)]
        full: bool,
        /// Target number of conductors per X that get the zero-route value
        #[arg(long, default_value_t = 100)]
        zeros_sample: usize,
    },
    /// Family moments from a cache: plain k-th, and euler/z/splitting per X
    Moments {
        /// Also audit exact character sums for these monic polynomials
        #[arg(long, value_delimiter = ',')]
        orthogonality: Option<Vec<String>>,
    },
    /// Twisted first moments <L(1/2, chi_P) chi_P(l)> from a cache
    Twisted {
        /// Twist polynomials l (comma separated)
        #[arg(long, value_delimiter = ',', required = true)]
        l: Vec<String>,
    },
    /// Closed-form predictions (no sweep needed)
    Predict {
        /// Euler-product truncation degree
        #[arg(long, default_value_t = PREDICTION_TRUNC)]
        trunc: u32,
        /// Twist polynomials for twisted-moment predictions
        #[arg(long, value_delimiter = ',')]
        l: Option<Vec<String>>,
    },
    /// Join empirical moments and predictions from a cache
    Compare {
        #[arg(long, value_delimiter = ',')]
        l: Option<Vec<String>>,
    },
}

/// Entry point; returns the process exit status.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Field(_)
                | Error::Parse(_)
                | Error::Precondition(_)
                | Error::ZetaPole => 2,
                _ => 1,
            }
        }
    }
}

fn require_g(cli: &Cli) -> Result<usize> {
    cli.g.ok_or_else(|| Error::Precondition("--g is required here".into()))
}

fn x_list(cli: &Cli) -> Vec<u32> {
    cli.x.clone().unwrap_or_default()
}

fn k_list(cli: &Cli, default: &[i64]) -> Vec<i64> {
    cli.k.clone().unwrap_or_else(|| default.to_vec())
}

fn cache_path(cli: &Cli) -> Result<PathBuf> {
    if let Some(p) = &cli.cache {
        return Ok(p.clone());
    }
    let dir = std::env::var("LCHI_CACHE_DIR").unwrap_or_else(|_| "lchi-cache".into());
    let g = require_g(cli)?;
    Ok(PathBuf::from(dir).join(format!("sweep_q{}_g{}.csv", cli.q, g)))
}

fn parse_conductor(cli: &Cli, s: &str) -> Result<(Conductor, Field)> {
    let field = Field::new(cli.q)?;
    let poly = Poly::parse(s, field)?;
    Ok((Conductor::new(poly)?, field))
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Enumerate { degree, irreducible, count, limit } => {
            cmd_enumerate(cli, *degree, *irreducible, *count, *limit)
        }
        Command::Lfun { prime } => cmd_lfun(cli, prime),
        Command::Hybrid { prime, bump } => cmd_hybrid(cli, prime, bump),
        Command::Sweep { light, full, zeros_sample } => {
            cmd_sweep(cli, *light, *full, *zeros_sample)
        }
        Command::Moments { orthogonality } => cmd_moments(cli, orthogonality.as_deref()),
        Command::Twisted { l } => cmd_twisted(cli, l),
        Command::Predict { trunc, l } => cmd_predict(cli, *trunc, l.as_deref()),
        Command::Compare { l } => cmd_compare(cli, l.as_deref()),
    }
}

fn cmd_enumerate(cli: &Cli, degree: usize, irreducible: bool, count: bool, limit: Option<u64>) -> Result<()> {
    let field = Field::new(cli.q)?;
    if count {
        let n = if irreducible {
            if degree == 0 {
                return Err(Error::Precondition("irreducible enumeration needs degree >= 1".into()));
            }
            count_irreducible(field, degree)
        } else {
            crate::poly::monic_count(field, degree)
        };
        println!("{n}");
        return Ok(());
    }
    let max = limit.unwrap_or(u64::MAX);
    if irreducible {
        if degree == 0 {
            return Err(Error::Precondition("irreducible enumeration needs degree >= 1".into()));
        }
        for p in irreducible_polys(field, degree).take(max as usize) {
            println!("{p}");
        }
    } else {
        for p in monic_polys(field, degree).take(max as usize) {
            println!("{p}");
        }
    }
    Ok(())
}

fn lfun_record(cli: &Cli, prime: &str) -> Result<(LRecord, CharTable)> {
    let (conductor, field) = parse_conductor(cli, prime)?;
    let g = conductor.genus();
    let extra = x_list(cli).last().copied().unwrap_or(0) as usize;
    let table = Arc::new(FactorTable::build(field, (2 * g).max(extra).max(1)));
    let (rec, chart) = LRecord::compute(conductor, table, RecordMode::Full, extra)?;
    Ok((rec, chart))
}

fn cmd_lfun(cli: &Cli, prime: &str) -> Result<()> {
    let (rec, _) = lfun_record(cli, prime)?;
    let zeros = rec.zeros.as_ref().expect("full record");
    match cli.format {
        OutputFormat::Json => {
            let value = json!({
                "q": cli.q,
                "conductor": rec.conductor.poly().to_string(),
                "compact": rec.conductor.poly().to_compact(),
                "genus": rec.genus,
                "coeffs": rec.coeffs,
                "central_a": crate::quad::rational_to_string(rec.central.a()),
                "central_b": crate::quad::rational_to_string(rec.central.b()),
                "central": rec.central.to_string(),
                "central_value": rec.central.to_f64(),
                "angles": zeros.angles,
                "rh_defect": zeros.rh_defect,
                "fe_violations": symmetry_violations(cli.q, &rec.coeffs, rec.genus),
            });
            println!("{value}");
        }
        OutputFormat::Csv => {
            println!("conductor,coeffs,central_a,central_b,angles,rh_defect");
            println!("{}", crate::cache::render_lrecord(&rec));
        }
    }
    Ok(())
}

fn cmd_hybrid(cli: &Cli, prime: &str, bump: &str) -> Result<()> {
    let xs = x_list(cli);
    if xs.is_empty() {
        return Err(Error::Precondition("hybrid needs at least one --X".into()));
    }
    let shape: BumpShape = bump.parse()?;
    let (rec, chart) = lfun_record(cli, prime)?;
    let zeros = rec.zeros.as_ref().expect("full record");
    let mut rows = Vec::new();
    for &x in &xs {
        let px = p_x(&chart, x);
        let zq = z_quotient(&rec.central, px);
        let zz = if x >= 1 {
            let bw = BumpWeight::new(cli.q, x, shape)?;
            Some(z_zeros(&zeros.angles, cli.q, x, cli.tol, &bw)?)
        } else {
            None
        };
        rows.push(HybridRecord { x, p_x: px, z_quotient: zq, z_zeros: zz });
    }
    match cli.format {
        OutputFormat::Json => {
            for h in &rows {
                let value = json!({
                    "q": cli.q,
                    "conductor": rec.conductor.poly().to_string(),
                    "X": h.x,
                    "p_x": h.p_x,
                    "z_quotient": h.z_quotient,
                    "z_zeros": h.z_zeros,
                    "hybrid_defect": h.hybrid_defect(),
                });
                println!("{value}");
            }
        }
        OutputFormat::Csv => {
            println!("conductor,X,p_x,z_quotient,z_zeros,hybrid_defect");
            for h in &rows {
                println!("{}", crate::cache::render_hybrid(&rec.conductor, h));
            }
        }
    }
    Ok(())
}

fn cmd_sweep(cli: &Cli, light: bool, full: bool, zeros_sample: usize) -> Result<()> {
    let field = Field::new(cli.q)?;
    let g = require_g(cli)?;
    if g < 1 {
        return Err(Error::Precondition("sweep needs g >= 1".into()));
    }
    let mut config = SweepConfig::new(field, g, x_list(cli));
    if light {
        config.mode = RecordMode::Light;
    } else if full {
        config.mode = RecordMode::Full;
    }
    config.zeros_target = zeros_sample;
    config.tol = cli.tol;
    config.progress = true;
    let path = cache_path(cli)?;
    print_estimate(&config);
    let data = run_to_file(&config, &path)?;
    let summary = json!({
        "cache": path.to_string_lossy(),
        "rows": data.len(),
        "fe_violations": data.fe_violations,
        "max_rh_defect": data.max_rh_defect(),
    });
    match cli.format {
        OutputFormat::Json => println!("{summary}"),
        OutputFormat::Csv => {
            println!("cache,rows,fe_violations,max_rh_defect");
            println!(
                "\"{}\",{},{},{}",
                path.to_string_lossy(),
                data.len(),
                data.fe_violations,
                data.max_rh_defect().map(|d| format!("{d:e}")).unwrap_or_default()
            );
        }
    }
    Ok(())
}

fn load_cache(cli: &Cli) -> Result<SweepData> {
    let path = cache_path(cli)?;
    let data = load(&path)?;
    if data.header.q != cli.q {
        return Err(Error::Cache(format!(
            "cache {} is for q = {}, CLI asked q = {}",
            path.display(),
            data.header.q,
            cli.q
        )));
    }
    Ok(data)
}

fn moment_csv_header() -> &'static str {
    "kind,q,g,k,X,twist,empirical,empirical_a,empirical_b,prediction,ratio,sample_size,envelope,variance"
}

fn moment_csv_row(m: &MomentReport) -> String {
    fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
        v.as_ref().map(|x| x.to_string()).unwrap_or_default()
    }
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        m.kind,
        m.q,
        m.g,
        opt(&m.k),
        opt(&m.x),
        opt(&m.twist),
        m.empirical,
        opt(&m.empirical_a),
        opt(&m.empirical_b),
        m.prediction,
        m.ratio,
        m.sample_size,
        opt(&m.envelope),
        m.variance
    )
}

fn splitting_csv_header() -> &'static str {
    "kind,q,g,k,X,l_moment,p_moment,z_moment,splitting_ratio,kappa,kappa_lo,kappa_hi,l_over_p_prediction,rmt_prediction,sample_size"
}

fn splitting_csv_row(s: &SplittingReport) -> String {
    let (lo, hi) = s.kappa_ci.unwrap_or((f64::NAN, f64::NAN));
    format!(
        "splitting,{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        s.q,
        s.g,
        s.k,
        s.x,
        s.l_moment,
        s.p_moment,
        s.z_moment,
        s.splitting_ratio,
        s.kappa.map(|v| v.to_string()).unwrap_or_default(),
        lo,
        hi,
        s.l_over_p_prediction,
        s.rmt_prediction,
        s.sample_size
    )
}

fn emit_moments(
    cli: &Cli,
    reports: &[MomentReport],
    splits: &[SplittingReport],
    orth: &[crate::moments::OrthogonalityRow],
) -> Result<()> {
    match cli.format {
        OutputFormat::Json => {
            for m in reports {
                println!("{}", serde_json::to_string(m).expect("serializable"));
            }
            for s in splits {
                println!("{}", serde_json::to_string(s).expect("serializable"));
            }
            for o in orth {
                println!("{}", serde_json::to_string(o).expect("serializable"));
            }
        }
        OutputFormat::Csv => {
            if !reports.is_empty() {
                println!("{}", moment_csv_header());
                for m in reports {
                    println!("{}", moment_csv_row(m));
                }
            }
            if !splits.is_empty() {
                println!("{}", splitting_csv_header());
                for s in splits {
                    println!("{}", splitting_csv_row(s));
                }
            }
            if !orth.is_empty() {
                println!("kind,f,is_square,sum,sample_size,normalized,envelope");
                for o in orth {
                    println!(
                        "orthogonality,{},{},{},{},{},{}",
                        o.f, o.is_square, o.sum, o.sample_size, o.normalized, o.envelope
                    );
                }
            }
        }
    }
    Ok(())
}

fn cmd_moments(cli: &Cli, orthogonality: Option<&[String]>) -> Result<()> {
    let data = load_cache(cli)?;
    let field = data.field();
    let ks = k_list(cli, &[1, 2, 3]);
    let xs = x_list(cli);
    warn_x_regime(field, data.genus(), &xs);
    let mut reports = Vec::new();
    let mut splits = Vec::new();
    for &k in &ks {
        if k >= 0 {
            reports.push(moment(&data, k as u32)?);
        }
        for &x in &xs {
            reports.push(euler_moment(&data, k, x)?);
            if k >= 0 {
                reports.push(z_moment(&data, k as u32, x)?);
                splits.push(splitting_report(&data, k as u32, x, 1000)?);
            }
        }
    }
    let mut orth = Vec::new();
    if let Some(fs) = orthogonality {
        let polys: Result<Vec<Poly>> = fs.iter().map(|s| Poly::parse(s, field)).collect();
        orth = orthogonality_audit(&data, &polys?)?;
    }
    emit_moments(cli, &reports, &splits, &orth)
}

fn cmd_twisted(cli: &Cli, ls: &[String]) -> Result<()> {
    let data = load_cache(cli)?;
    let field = data.field();
    let mut reports = Vec::new();
    for s in ls {
        let l = Poly::parse(s, field)?;
        reports.push(twisted_moment(&data, &l)?);
    }
    emit_moments(cli, &reports, &[], &[])
}

fn emit_predictions(cli: &Cli, rows: &[PredictionReport]) {
    match cli.format {
        OutputFormat::Json => {
            for r in rows {
                println!("{}", serde_json::to_string(r).expect("serializable"));
            }
        }
        OutputFormat::Csv => {
            println!("kind,q,g,k,X,value,tail_bound");
            for r in rows {
                fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
                    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
                }
                println!(
                    "{},{},{},{},{},{},{}",
                    r.kind,
                    r.q,
                    opt(&r.g),
                    opt(&r.k),
                    opt(&r.x),
                    r.value,
                    opt(&r.tail_bound)
                );
            }
        }
    }
}

fn cmd_predict(cli: &Cli, trunc: u32, ls: Option<&[String]>) -> Result<()> {
    let field = Field::new(cli.q)?;
    let ks = k_list(cli, &[1]);
    let xs = x_list(cli);
    let mut rows = Vec::new();
    for &k in &ks {
        if let Some(g) = cli.g {
            if k >= 0 {
                rows.push(PredictionReport {
                    kind: "moment".into(),
                    q: cli.q,
                    g: Some(g),
                    k: Some(k as f64),
                    x: None,
                    value: if k == 0 { 1.0 } else { predicted_moment(field, k as u32, g, trunc)? },
                    tail_bound: None,
                });
            }
        }
        if k >= 0 {
            let ak = a_k(field, k as u32, trunc)?;
            rows.push(ak);
        }
        for &x in &xs {
            rows.push(predicted_euler_moment(field, k as f64, x, trunc));
            if let Some(g) = cli.g {
                if k >= 0 {
                    rows.push(PredictionReport {
                        kind: "zx_moment".into(),
                        q: cli.q,
                        g: Some(g),
                        k: Some(k as f64),
                        x: Some(x),
                        value: predicted_zx_moment(k as u32, g, x),
                        tail_bound: None,
                    });
                }
            }
        }
    }
    if let Some(g) = cli.g {
        for &x in &xs {
            rows.push(PredictionReport {
                kind: "l_over_p".into(),
                q: cli.q,
                g: Some(g),
                k: None,
                x: Some(x),
                value: predicted_l_over_p(g, x),
                tail_bound: None,
            });
        }
        if let Some(ls) = ls {
            for s in ls {
                let l = Poly::parse(s, field)?;
                rows.push(PredictionReport {
                    kind: "twisted".into(),
                    q: cli.q,
                    g: Some(g),
                    k: None,
                    x: None,
                    value: predicted_twisted(&l, g)?,
                    tail_bound: None,
                });
            }
        }
    }
    emit_predictions(cli, &rows);
    Ok(())
}

fn cmd_compare(cli: &Cli, ls: Option<&[String]>) -> Result<()> {
    let data = load_cache(cli)?;
    let field = data.field();
    let ks = k_list(cli, &[1, 2]);
    let xs = x_list(cli);
    warn_x_regime(field, data.genus(), &xs);
    let mut reports = Vec::new();
    let mut splits = Vec::new();
    for &k in &ks {
        if k >= 0 {
            reports.push(moment(&data, k as u32)?);
        }
        for &x in &xs {
            reports.push(euler_moment(&data, k, x)?);
            if k >= 0 {
                reports.push(z_moment(&data, k as u32, x)?);
                splits.push(splitting_report(&data, k as u32, x, 1000)?);
            }
        }
    }
    if let Some(ls) = ls {
        for s in ls {
            let l = Poly::parse(s, field)?;
            reports.push(twisted_moment(&data, &l)?);
        }
    }
    emit_moments(cli, &reports, &splits, &[])
}
