//! Command-line front end.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::catalog::{build_identity_json, build_sampled, verify, IdentityId, VerifyOptions};
use crate::contour::{ContourSpec, DEFAULT_MARGIN};
use crate::error::{Error, Result};
use crate::halfplane::{verify_chain_rule, verify_transition_element, HalfPlanePoint};
use crate::quadrature::{Method, QuadratureConfig};
use crate::report::{Status, VerificationReport};

pub const EXIT_USAGE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "mbverify", version, about = "Numerical checks of multidimensional Mellin-Barnes identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List identities with dimension, parameter schema and constraints.
    List {
        /// Print the listing as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Verify a single case.
    Verify(VerifyArgs),
    /// Verify seeded random draws.
    Sweep(SweepArgs),
    /// Merge cached runs into one summary table.
    Report {
        #[arg(long)]
        cache_dir: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Half-plane propagator checks.
    #[command(subcommand)]
    Halfplane(HalfplaneCommand),
}

#[derive(Args, Debug, Clone)]
struct QuadArgs {
    #[arg(long, value_parser = parse_method, default_value = "auto")]
    method: Method,
    /// Defaults to 1e-8, 1e-6 or 1e-3 for 1, 2 or more integration axes.
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    qmc_points: Option<u64>,
    /// Contour real parts, comma separated or a JSON array.
    #[arg(long, value_parser = parse_offsets)]
    offsets: Option<Offsets>,
    #[arg(long, default_value_t = DEFAULT_MARGIN)]
    margin: f64,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// JSON report destination; the summary then goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory of cached run files.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_parser = parse_identity)]
    identity: IdentityId,
    #[arg(long)]
    n: Option<usize>,
    /// Inline JSON object or path to a JSON file.
    #[arg(long, conflicts_with = "seed")]
    params: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_parser = parse_identity)]
    identity: IdentityId,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Subcommand, Debug)]
enum HalfplaneCommand {
    /// Chain rule for two propagators.
    ChainRule {
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long, value_parser = parse_complex, default_value = "[1.3,0.2]")]
        alpha: Complex64,
        #[arg(long, value_parser = parse_complex, default_value = "[1.1,-0.3]")]
        beta: Complex64,
        #[arg(long, value_parser = parse_complex, default_value = "[0.2,1.0]")]
        z: Complex64,
        #[arg(long, value_parser = parse_complex, default_value = "[-0.4,0.7]")]
        zeta: Complex64,
        #[arg(long, default_value_t = 1e-8)]
        rel_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transition element between power-law and plane-wave bases.
    Transition {
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        #[arg(long, default_value_t = 0.3)]
        nu: f64,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long, default_value_t = 1e-8)]
        rel_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Everything that determines the numbers in a run; hashed for cache names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub identity: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub source: ParamSource,
    pub method: Method,
    pub rel_tol: f64,
    pub qmc_points: u64,
    pub offsets: Option<Vec<f64>>,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamSource {
    Inline(Value),
    Seed(u64),
    Sweep { seed: u64, trials: u64 },
}

impl RunConfig {
    pub fn run_id(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(&Sha256::digest(text.as_bytes())[..8])
    }

    fn seed(&self) -> u64 {
        match self.source {
            ParamSource::Seed(s) | ParamSource::Sweep { seed: s, .. } => s,
            ParamSource::Inline(_) => 0,
        }
    }

    fn options(&self) -> VerifyOptions {
        let mut q = QuadratureConfig::default()
            .with_rel_tol(self.rel_tol)
            .with_method(self.method);
        q.qmc_points = self.qmc_points;
        q.seed = self.seed();
        VerifyOptions {
            quadrature: q,
            contour: self.offsets.clone().map(|o| ContourSpec::new(o, self.margin)),
            margin: self.margin,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CacheEntry {
    pub run_id: String,
    /// Nanoseconds since the Unix epoch.
    pub timestamp: u64,
    pub config: RunConfig,
    pub reports: Vec<VerificationReport>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepReport {
    pub identity: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub worst_rel_deviation: Option<f64>,
    pub entries: Vec<SweepEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepEntry {
    pub trial: u64,
    pub seed: u64,
    pub report: VerificationReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub identity: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub status: Status,
    pub cases: usize,
    pub worst_rel_deviation: Option<f64>,
    pub run_id: String,
}

fn parse_identity(s: &str) -> std::result::Result<IdentityId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Clone, Debug)]
struct Offsets(Vec<f64>);

fn parse_offsets(s: &str) -> std::result::Result<Offsets, String> {
    let t = s.trim();
    if t.starts_with('[') {
        return serde_json::from_str(t).map(Offsets).map_err(|e| e.to_string());
    }
    t.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("bad offset '{x}': {e}")))
        .collect::<std::result::Result<_, _>>()
        .map(Offsets)
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let v: Value = serde_json::from_str(s).map_err(|e| e.to_string())?;
    match &v {
        Value::Number(n) => Ok(Complex64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
        Value::Array(p) if p.len() == 2 => match (p[0].as_f64(), p[1].as_f64()) {
            (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
            _ => Err(format!("expected [re, im], got {s}")),
        },
        _ => Err(format!("expected a number or [re, im], got {s}")),
    }
}

/// Default tolerance by number of integration axes.
pub fn default_rel_tol(dim: usize) -> f64 {
    match dim {
        0 | 1 => 1e-8,
        2 => 1e-6,
        _ => 1e-3,
    }
}

/// Per-trial seed derived from the sweep seed.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    let mut z = seed
        .wrapping_add(trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn read_params(text: &str) -> Result<Value> {
    let t = text.trim();
    if t.starts_with('{') {
        Ok(serde_json::from_str(t)?)
    } else {
        Ok(serde_json::from_str(&std::fs::read_to_string(t)?)?)
    }
}

/// Parse `args` and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::List { json } => cmd_list(json),
        Command::Verify(a) => {
            let jobs = a.quad.jobs;
            with_jobs(jobs, || cmd_verify(a))
        }
        Command::Sweep(a) => {
            let jobs = a.quad.jobs;
            with_jobs(jobs, || cmd_sweep(a))
        }
        Command::Report { cache_dir, out } => cmd_report(&cache_dir, out.as_deref()),
        Command::Halfplane(h) => cmd_halfplane(h),
    }
}

fn with_jobs(jobs: Option<usize>, f: impl FnOnce() -> Result<i32> + Send) -> Result<i32> {
    match jobs {
        None => f(),
        Some(0) => Err(Error::BadConfig("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::BadConfig(e.to_string()))?
            .install(f),
    }
}

fn schema_formula(id: IdentityId) -> Vec<(String, String)> {
    let (lo, hi) = id.n_range();
    let at_lo = id.schema(lo).expect("n in range");
    if lo == hi {
        return at_lo.iter().map(|p| (p.name.to_string(), p.count.to_string())).collect();
    }
    let at_next = id.schema(lo + 1).expect("n in range");
    at_lo
        .iter()
        .zip(&at_next)
        .map(|(a, b)| {
            let slope = b.count as i64 - a.count as i64;
            let offset = a.count as i64 - slope * lo as i64;
            let count = match (slope, offset) {
                (0, c) => c.to_string(),
                (1, 0) => "N".to_string(),
                (k, 0) => format!("{k}N"),
                (1, c) if c > 0 => format!("N+{c}"),
                (1, c) => format!("N{c}"),
                (k, c) if c > 0 => format!("{k}N+{c}"),
                (k, c) => format!("{k}N{c}"),
            };
            (a.name.to_string(), count)
        })
        .collect()
}

pub fn listing() -> Value {
    Value::Array(
        IdentityId::ALL
            .iter()
            .map(|&id| {
                let (lo, hi) = id.n_range();
                let schema: BTreeMap<String, String> = schema_formula(id).into_iter().collect();
                json!({
                    "identity": id.as_str(),
                    "dimension": id.dimension_formula(),
                    "n_range": [lo, hi],
                    "schema": schema,
                    "constraints": id.constraint_text(),
                    "anchor": id.anchor(),
                })
            })
            .collect(),
    )
}

fn cmd_list(as_json: bool) -> Result<i32> {
    let mut out = std::io::stdout().lock();
    if as_json {
        writeln!(out, "{}", serde_json::to_string_pretty(&listing())?)?;
        return Ok(0);
    }
    for id in IdentityId::ALL {
        let (lo, hi) = id.n_range();
        let schema: Vec<String> = schema_formula(id)
            .into_iter()
            .map(|(name, count)| format!("{name}[{count}]"))
            .collect();
        writeln!(
            out,
            "{:<8} dim={:<4} N={lo}..{hi}  params: {}\n         constraints: {}\n         anchor: {}",
            id.as_str(),
            id.dimension_formula(),
            schema.join(", "),
            id.constraint_text(),
            id.anchor()
        )?;
    }
    Ok(0)
}

fn resolve_n(id: IdentityId, n: Option<usize>) -> usize {
    n.unwrap_or(id.n_range().0)
}

fn run_config(command: &str, id: IdentityId, n: usize, source: ParamSource, quad: &QuadArgs) -> RunConfig {
    let defaults = QuadratureConfig::default();
    RunConfig {
        command: command.to_string(),
        identity: id.as_str().to_string(),
        n,
        source,
        method: quad.method,
        rel_tol: quad.rel_tol.unwrap_or_else(|| default_rel_tol(id.dim(n))),
        qmc_points: quad.qmc_points.unwrap_or(defaults.qmc_points),
        offsets: quad.offsets.as_ref().map(|o| o.0.clone()),
        margin: quad.margin,
    }
}

/// Run one verify configuration.
pub fn run_verify(config: &RunConfig) -> Result<VerificationReport> {
    let id: IdentityId = config.identity.parse()?;
    let case = match &config.source {
        ParamSource::Inline(v) => build_identity_json(id, config.n, v)?,
        ParamSource::Seed(s) => build_sampled(id, config.n, *s)?,
        ParamSource::Sweep { .. } => {
            return Err(Error::BadConfig("sweep configuration passed to verify".into()))
        }
    };
    verify(&case, &config.options())
}

/// Run all trials of a sweep configuration; trials run on the current pool.
pub fn run_sweep(config: &RunConfig) -> Result<SweepReport> {
    let ParamSource::Sweep { seed, trials } = config.source else {
        return Err(Error::BadConfig("sweep needs a sweep parameter source".into()));
    };
    if trials == 0 {
        return Err(Error::BadConfig("--trials must be at least 1".into()));
    }
    let entries: Vec<SweepEntry> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let s = trial_seed(seed, trial);
            let single = RunConfig {
                source: ParamSource::Seed(s),
                ..config.clone()
            };
            run_verify(&single).map(|report| SweepEntry { trial, seed: s, report })
        })
        .collect::<Result<_>>()?;
    let count = |st: Status| entries.iter().filter(|e| e.report.status == st).count();
    let worst = entries
        .iter()
        .filter_map(|e| e.report.rel_deviation)
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))));
    Ok(SweepReport {
        identity: config.identity.clone(),
        n: config.n,
        trials,
        seed,
        pass: count(Status::Pass),
        fail: count(Status::Fail),
        inconclusive: count(Status::Inconclusive),
        worst_rel_deviation: worst,
        entries,
    })
}

fn overall(statuses: impl IntoIterator<Item = Status>) -> Status {
    let mut any_inconclusive = false;
    for s in statuses {
        match s {
            Status::Fail => return Status::Fail,
            Status::Inconclusive => any_inconclusive = true,
            Status::Pass => {}
        }
    }
    if any_inconclusive {
        Status::Inconclusive
    } else {
        Status::Pass
    }
}

fn zero_runtimes(v: &mut Value) {
    match v {
        Value::Object(m) => {
            for (k, x) in m.iter_mut() {
                if k == "runtime_s" {
                    *x = json!(0.0);
                } else {
                    zero_runtimes(x);
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(zero_runtimes),
        _ => {}
    }
}

/// JSON text of a report value with runtimes zeroed, for comparisons.
pub fn stable_json_text(text: &str) -> Result<String> {
    let mut v: Value = serde_json::from_str(text)?;
    zero_runtimes(&mut v);
    Ok(serde_json::to_string_pretty(&v)?)
}

fn emit(json_text: &str, summary: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, format!("{json_text}\n"))?;
            println!("{summary}");
        }
        None => {
            println!("{json_text}");
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn now_nanos() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0)
}

fn write_cache(dir: &Path, config: &RunConfig, reports: Vec<VerificationReport>) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let entry = CacheEntry {
        run_id: config.run_id(),
        timestamp: now_nanos(),
        config: config.clone(),
        reports,
    };
    let path = dir.join(format!("{}.json", entry.run_id));
    std::fs::write(&path, serde_json::to_string_pretty(&entry)?)?;
    Ok(path)
}

fn cmd_verify(a: VerifyArgs) -> Result<i32> {
    let n = resolve_n(a.identity, a.n);
    let source = match &a.params {
        Some(p) => ParamSource::Inline(read_params(p)?),
        None => ParamSource::Seed(a.seed.unwrap_or(0)),
    };
    let config = run_config("verify", a.identity, n, source, &a.quad);
    let report = run_verify(&config)?;
    if let Some(dir) = &a.quad.cache_dir {
        write_cache(dir, &config, vec![report.clone()])?;
    }
    emit(
        &serde_json::to_string_pretty(&report)?,
        &report.summary(),
        a.quad.out.as_deref(),
    )?;
    Ok(report.exit_code())
}

fn cmd_sweep(a: SweepArgs) -> Result<i32> {
    let n = resolve_n(a.identity, a.n);
    let source = ParamSource::Sweep {
        seed: a.seed,
        trials: a.trials,
    };
    let config = run_config("sweep", a.identity, n, source, &a.quad);
    let sweep = run_sweep(&config)?;
    if let Some(dir) = &a.quad.cache_dir {
        write_cache(dir, &config, sweep.entries.iter().map(|e| e.report.clone()).collect())?;
    }
    let status = overall(sweep.entries.iter().map(|e| e.report.status));
    let summary = format!(
        "{} N={} trials={} pass={} fail={} inconclusive={} worst_rel_deviation={}",
        sweep.identity,
        sweep.n,
        sweep.trials,
        sweep.pass,
        sweep.fail,
        sweep.inconclusive,
        sweep
            .worst_rel_deviation
            .map_or("n/a".to_string(), |d| format!("{d:.3e}"))
    );
    emit(&serde_json::to_string_pretty(&sweep)?, &summary, a.quad.out.as_deref())?;
    Ok(status.exit_code())
}

/// Merge cache files: one row per run id, the later timestamp winning.
pub fn merge_cache(dir: &Path) -> Result<(Vec<ReportRow>, Vec<String>)> {
    let mut paths: Vec<PathBuf> = match std::fs::read_dir(dir) {
        Ok(rd) => rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect(),
        Err(_) => Vec::new(),
    };
    paths.sort();
    let mut notes = Vec::new();
    let mut latest: BTreeMap<String, CacheEntry> = BTreeMap::new();
    for path in paths {
        let entry: CacheEntry = match std::fs::read_to_string(&path)
            .map_err(Error::from)
            .and_then(|t| serde_json::from_str(&t).map_err(Error::from))
        {
            Ok(e) => e,
            Err(e) => {
                notes.push(format!("skipped {}: {e}", path.display()));
                continue;
            }
        };
        match latest.get(&entry.run_id) {
            Some(prev) => {
                notes.push(format!("duplicate run {}: kept the later timestamp", entry.run_id));
                if entry.timestamp > prev.timestamp {
                    latest.insert(entry.run_id.clone(), entry);
                }
            }
            None => {
                latest.insert(entry.run_id.clone(), entry);
            }
        }
    }
    if latest.is_empty() {
        return Err(Error::EmptyCache(dir.display().to_string()));
    }
    let mut rows: Vec<ReportRow> = latest
        .into_values()
        .map(|e| ReportRow {
            identity: e.config.identity.clone(),
            n: e.config.n,
            status: overall(e.reports.iter().map(|r| r.status)),
            cases: e.reports.len(),
            worst_rel_deviation: e
                .reports
                .iter()
                .filter_map(|r| r.rel_deviation)
                .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d)))),
            run_id: e.run_id,
        })
        .collect();
    rows.sort_by(|a, b| (&a.identity, a.n, &a.run_id).cmp(&(&b.identity, b.n, &b.run_id)));
    Ok((rows, notes))
}

fn cmd_report(dir: &Path, out: Option<&Path>) -> Result<i32> {
    let (rows, notes) = merge_cache(dir)?;
    let mut table = format!("{:<10} {:>3} {:<13} {:>5} {:>12}  run", "identity", "N", "status", "cases", "worst_dev");
    for r in &rows {
        table.push_str(&format!(
            "\n{:<10} {:>3} {:<13} {:>5} {:>12}  {}",
            r.identity,
            r.n,
            r.status.as_str(),
            r.cases,
            r.worst_rel_deviation.map_or("n/a".to_string(), |d| format!("{d:.3e}")),
            r.run_id
        ));
    }
    for n in &notes {
        table.push_str(&format!("\nnote: {n}"));
    }
    println!("{table}");
    if let Some(path) = out {
        let doc = json!({ "rows": rows, "notes": notes });
        std::fs::write(path, serde_json::to_string_pretty(&doc)?)?;
    }
    Ok(0)
}

fn cmd_halfplane(h: HalfplaneCommand) -> Result<i32> {
    let (report, out) = match h {
        HalfplaneCommand::ChainRule {
            s,
            alpha,
            beta,
            z,
            zeta,
            rel_tol,
            out,
        } => {
            let cfg = QuadratureConfig::default().with_rel_tol(rel_tol);
            let z = HalfPlanePoint::from_complex(z)?;
            let zeta = HalfPlanePoint::from_complex(zeta)?;
            (verify_chain_rule(s, alpha, beta, z, zeta, &cfg)?, out)
        }
        HalfplaneCommand::Transition { s, nu, p, rel_tol, out } => {
            let cfg = QuadratureConfig::default().with_rel_tol(rel_tol);
            (verify_transition_element(s, nu, p, &cfg)?, out)
        }
    };
    emit(&serde_json::to_string_pretty(&report)?, &report.summary(), out.as_deref())?;
    Ok(report.exit_code())
}
