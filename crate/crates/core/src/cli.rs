//! Command-line front end.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use wghz_core::convert::{branch_law_fit, optimize, BranchLawReport, OptimizeOptions};
use wghz_core::pulses::Direction;
use wghz_core::robustness::{sweep, AxisGrid, Baseline, ErrorParam, SweepAxis};
use wghz_core::suite;
use wghz_core::symmetry::{ising_dynamical_dimension, sector_decomposition_dims, u_s3_dimension};

use crate::format::{num, Num};

/// Invalid invocation; reported with exit status 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct Usage(pub String);

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Usage(msg.into()).into())
}

#[derive(Parser, Debug)]
#[command(name = "wghz", version, about = "W <-> GHZ pulse-sequence simulator and optimizer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Run the built-in invariant suite.
    Verify,
    /// Multi-start optimization of the pulse parameters.
    Optimize,
    /// Infidelity over a grid of systematic errors.
    Sweep,
    /// Track the optimal branches over a grid of GHZ phases and fit the phase law.
    BranchLaw,
    /// Lie-algebra and sector dimensions.
    Liealg,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Optimize => "optimize",
            Command::Sweep => "sweep",
            Command::BranchLaw => "branch-law",
            Command::Liealg => "liealg",
        }
    }
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum OutFormat {
    Csv,
    Json,
}

#[derive(Args, Debug, Default)]
pub struct Flags {
    /// GHZ phase φ (radians unless --degrees).
    #[arg(long, global = true, allow_hyphen_values = true)]
    phi: Option<f64>,
    /// w2ghz or ghz2w.
    #[arg(long, global = true)]
    direction: Option<Direction>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Comma-separated sweep axes: xi, alpha1, phi1, alpha2, phi2, alpha_tied, phi_tied.
    #[arg(long, global = true)]
    axes: Option<String>,
    /// `min:max`, or one comma-separated range per axis.
    #[arg(long, global = true, allow_hyphen_values = true)]
    range: Option<String>,
    /// Grid points per axis (or comma-separated per axis); φ-grid size for branch-law.
    #[arg(long, global = true)]
    count: Option<String>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutFormat>,
    /// JSON job file; explicit flags take precedence over its fields.
    #[arg(long, global = true)]
    job: Option<PathBuf>,
    /// Interpret input angles in degrees.
    #[arg(long, global = true)]
    degrees: bool,
}

/// Job document accepted by `--job`; field names match the flags.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct JobConfig {
    command: Option<String>,
    phi: Option<f64>,
    direction: Option<Direction>,
    seed: Option<u64>,
    restarts: Option<usize>,
    axes: Option<StrOrList>,
    range: Option<StrOrList>,
    count: Option<CountSpec>,
    out: Option<PathBuf>,
    format: Option<OutFormat>,
    degrees: Option<bool>,
}

#[derive(Deserialize, Debug)]
#[serde(untagged)]
enum StrOrList {
    One(String),
    Many(Vec<String>),
}

impl StrOrList {
    fn joined(self) -> String {
        match self {
            StrOrList::One(s) => s,
            StrOrList::Many(v) => v.join(","),
        }
    }
}

#[derive(Deserialize, Debug)]
#[serde(untagged)]
enum CountSpec {
    One(usize),
    Many(Vec<usize>),
    Text(String),
}

impl CountSpec {
    fn joined(self) -> String {
        match self {
            CountSpec::One(n) => n.to_string(),
            CountSpec::Many(v) => v.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
            CountSpec::Text(s) => s,
        }
    }
}

/// Flags merged with the job file.
#[derive(Debug)]
struct Config {
    phi: Option<f64>,
    direction: Direction,
    seed: u64,
    restarts: usize,
    axes: Option<String>,
    range: Option<String>,
    count: Option<String>,
    out: Option<PathBuf>,
    format: Option<OutFormat>,
    degrees: bool,
}

fn load_config(command: Command, flags: Flags) -> Result<Config> {
    let job = match &flags.job {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading job file {}", path.display()))?;
            match serde_json::from_str::<JobConfig>(&text) {
                Ok(j) => j,
                Err(e) => return usage(format!("invalid job file {}: {e}", path.display())),
            }
        }
        None => JobConfig::default(),
    };
    if let Some(c) = &job.command {
        if c != command.name() {
            return usage(format!("job file is for `{c}`, but `{}` was requested", command.name()));
        }
    }
    Ok(Config {
        phi: flags.phi.or(job.phi),
        direction: flags.direction.or(job.direction).unwrap_or(Direction::WToGhz),
        seed: flags.seed.or(job.seed).unwrap_or(0),
        restarts: flags.restarts.or(job.restarts).unwrap_or(32),
        axes: flags.axes.or(job.axes.map(StrOrList::joined)),
        range: flags.range.or(job.range.map(StrOrList::joined)),
        count: flags.count.or(job.count.map(CountSpec::joined)),
        out: flags.out.or(job.out),
        format: flags.format.or(job.format),
        degrees: flags.degrees || job.degrees.unwrap_or(false),
    })
}

impl Config {
    fn angle(&self, x: f64) -> f64 {
        if self.degrees {
            x.to_radians()
        } else {
            x
        }
    }

    fn phi(&self) -> Result<f64> {
        let phi = self.angle(self.phi.unwrap_or(0.0));
        if !phi.is_finite() {
            return usage("--phi must be finite");
        }
        Ok(phi)
    }

    fn restarts(&self) -> Result<usize> {
        if self.restarts == 0 {
            return usage("--restarts must be at least 1");
        }
        Ok(self.restarts)
    }

    fn counts(&self, default: usize) -> Result<Vec<usize>> {
        let Some(text) = &self.count else {
            return Ok(vec![default]);
        };
        text.split(',')
            .map(|s| match s.trim().parse::<usize>() {
                Ok(n) => Ok(n),
                Err(_) => usage(format!("invalid --count value {s:?}")),
            })
            .collect()
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn cmd_verify() -> Result<ExitCode> {
    let checks = suite::run_all();
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        println!("{}", c.line());
    }
    println!("{} checks, {} failures", checks.len(), failed);
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[derive(Serialize)]
struct OptRow {
    xi: Num,
    alpha1: Num,
    phi1: Num,
    alpha2: Num,
    phi2: Num,
    fidelity: Num,
    branch: Option<u8>,
    converged: bool,
    restarts_used: usize,
}

#[derive(Serialize)]
struct OptDoc {
    phi: Num,
    direction: Direction,
    results: Vec<OptRow>,
}

fn cmd_optimize(cfg: &Config) -> Result<ExitCode> {
    let phi = cfg.phi()?;
    let opts = OptimizeOptions { restarts: cfg.restarts()?, seed: cfg.seed, ..Default::default() };
    let results = optimize(phi, cfg.direction, &opts)?;
    let rows: Vec<OptRow> = results
        .iter()
        .map(|r| OptRow {
            xi: Num(r.params.xi),
            alpha1: Num(r.params.alpha1),
            phi1: Num(r.params.phi1),
            alpha2: Num(r.params.alpha2),
            phi2: Num(r.params.phi2),
            fidelity: Num(r.fidelity),
            branch: r.branch,
            converged: r.converged,
            restarts_used: r.restarts_used,
        })
        .collect();
    let text = match cfg.format.unwrap_or(OutFormat::Json) {
        OutFormat::Json => to_json(&OptDoc { phi: Num(phi), direction: cfg.direction, results: rows }),
        OutFormat::Csv => {
            let mut s = String::from("xi,alpha1,phi1,alpha2,phi2,fidelity,branch,converged,restarts_used\n");
            for r in &rows {
                let branch = r.branch.map(|b| b.to_string()).unwrap_or_default();
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{}",
                    num(r.xi.0),
                    num(r.alpha1.0),
                    num(r.phi1.0),
                    num(r.alpha2.0),
                    num(r.phi2.0),
                    num(r.fidelity.0),
                    branch,
                    r.converged,
                    r.restarts_used
                )
                .expect("write to string");
            }
            s
        }
    };
    emit(cfg.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn sweep_grids(cfg: &Config) -> Result<Vec<AxisGrid>> {
    let Some(axes_text) = &cfg.axes else {
        return usage("sweep needs --axes");
    };
    let mut axes = Vec::new();
    for name in axes_text.split(',') {
        match name.trim().parse::<SweepAxis>() {
            Ok(a) => axes.push(a),
            Err(e) => return usage(e.to_string()),
        }
    }
    if axes.is_empty() || axes.len() > 3 {
        return usage(format!("sweep takes 1 to 3 axes, got {}", axes.len()));
    }
    let range_text = cfg.range.clone().unwrap_or_else(|| "-0.1:0.1".into());
    let mut ranges = Vec::new();
    for part in range_text.split(',') {
        let Some((lo, hi)) = part.split_once(':') else {
            return usage(format!("invalid --range {part:?}, expected min:max"));
        };
        match (lo.trim().parse::<f64>(), hi.trim().parse::<f64>()) {
            (Ok(lo), Ok(hi)) => ranges.push((lo, hi)),
            _ => return usage(format!("invalid --range {part:?}, expected min:max")),
        }
    }
    let counts = cfg.counts(201)?;
    let pick = |v: usize, k: usize, what: &str| -> Result<usize> {
        match v {
            1 => Ok(0),
            n if n == axes.len() => Ok(k),
            n => usage(format!("{n} {what} values given for {} axes", axes.len())),
        }
    };
    let mut grids = Vec::new();
    for (k, &axis) in axes.iter().enumerate() {
        let (mut lo, mut hi) = ranges[pick(ranges.len(), k, "--range")?];
        let count = counts[pick(counts.len(), k, "--count")?];
        let angular = matches!(
            axis,
            SweepAxis::PhiTied | SweepAxis::Single(ErrorParam::Phi1) | SweepAxis::Single(ErrorParam::Phi2)
        );
        if angular {
            lo = cfg.angle(lo);
            hi = cfg.angle(hi);
        }
        match AxisGrid::new(axis, lo, hi, count) {
            Ok(g) => grids.push(g),
            Err(e) => return usage(e.to_string()),
        }
    }
    Ok(grids)
}

fn cmd_sweep(cfg: &Config) -> Result<ExitCode> {
    let grids = sweep_grids(cfg)?;
    let baseline = Baseline { phi: cfg.phi()?, branch: 0 };
    let result = sweep(&grids, &baseline)?;
    let text = match cfg.format.unwrap_or(OutFormat::Csv) {
        OutFormat::Csv => {
            let mut s = String::new();
            for a in &result.axes {
                write!(s, "eps_{a},").expect("write to string");
            }
            s.push_str("infidelity\n");
            for row in &result.rows {
                for e in &row.eps {
                    s.push_str(&num(*e));
                    s.push(',');
                }
                s.push_str(&num(row.infidelity));
                s.push('\n');
            }
            s
        }
        OutFormat::Json => {
            #[derive(Serialize)]
            struct Row {
                eps: Vec<Num>,
                infidelity: Num,
            }
            #[derive(Serialize)]
            struct Doc {
                axes: Vec<String>,
                rows: Vec<Row>,
            }
            to_json(&Doc {
                axes: result.axes.iter().map(|a| a.name().to_string()).collect(),
                rows: result
                    .rows
                    .iter()
                    .map(|r| Row { eps: r.eps.iter().copied().map(Num).collect(), infidelity: Num(r.infidelity) })
                    .collect(),
            })
        }
    };
    emit(cfg.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct LineDoc {
    slope: Num,
    intercept: Num,
    max_residual: Num,
}

#[derive(Serialize)]
struct BranchDoc {
    branch: u8,
    points: usize,
    phi1: LineDoc,
    phi2: LineDoc,
}

#[derive(Serialize)]
struct FitDoc {
    direction: Direction,
    grid_size: usize,
    branches: Vec<BranchDoc>,
    max_residual: Num,
    min_fidelity: Num,
    skipped: Vec<(Num, u8)>,
}

fn fit_summary(report: &BranchLawReport, grid_size: usize) -> FitDoc {
    let line = |l: &wghz_core::convert::LineFit| LineDoc {
        slope: Num(l.slope),
        intercept: Num(l.intercept),
        max_residual: Num(l.max_residual),
    };
    FitDoc {
        direction: report.direction,
        grid_size,
        branches: report
            .branches
            .iter()
            .map(|b| BranchDoc { branch: b.branch, points: b.points, phi1: line(&b.phi1), phi2: line(&b.phi2) })
            .collect(),
        max_residual: Num(report.max_residual()),
        min_fidelity: Num(report.min_fidelity),
        skipped: report.skipped.iter().map(|&(p, m)| (Num(p), m)).collect(),
    }
}

fn cmd_branch_law(cfg: &Config) -> Result<ExitCode> {
    let counts = cfg.counts(100)?;
    let [n] = counts.as_slice() else {
        return usage("branch-law takes a single --count");
    };
    let n = *n;
    if n < 10 {
        return usage(format!("branch-law needs --count of at least 10, got {n}"));
    }
    let grid: Vec<f64> = (1..=n).map(|k| TAU * k as f64 / (n + 1) as f64).collect();
    let opts = OptimizeOptions { restarts: cfg.restarts()?, seed: cfg.seed, ..Default::default() };
    let report = branch_law_fit(&grid, cfg.direction, &opts)?;
    let summary = to_json(&fit_summary(&report, n));
    match cfg.format.unwrap_or(OutFormat::Csv) {
        OutFormat::Json => emit(cfg.out.as_deref(), &summary)?,
        OutFormat::Csv => {
            let mut s = String::from("phi,branch,phi1_opt,phi2_opt,fidelity\n");
            for p in &report.points {
                writeln!(s, "{},{},{},{},{}", num(p.phi), p.branch, num(p.phi1), num(p.phi2), num(p.fidelity))
                    .expect("write to string");
            }
            emit(cfg.out.as_deref(), &s)?;
            match &cfg.out {
                Some(path) => emit(Some(&path.with_extension("json")), &summary)?,
                None => eprint!("{summary}"),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct LieDoc {
    u_s3_dim: usize,
    dynamical_dim: usize,
    sector_dims: Vec<usize>,
}

fn cmd_liealg(cfg: &Config) -> Result<ExitCode> {
    let doc = LieDoc {
        u_s3_dim: u_s3_dimension(),
        dynamical_dim: ising_dynamical_dimension(10)?,
        sector_dims: sector_decomposition_dims(),
    };
    if cfg.format == Some(OutFormat::Csv) {
        bail!(Usage("liealg only writes JSON".into()));
    }
    emit(cfg.out.as_deref(), &to_json(&doc))?;
    Ok(ExitCode::SUCCESS)
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = load_config(cli.command, cli.flags)?;
    match cli.command {
        Command::Verify => cmd_verify(),
        Command::Optimize => cmd_optimize(&cfg),
        Command::Sweep => cmd_sweep(&cfg),
        Command::BranchLaw => cmd_branch_law(&cfg),
        Command::Liealg => cmd_liealg(&cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("wghz").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_parse_anywhere() {
        let cli = parse(&["sweep", "--axes", "phi1,phi2", "--range", "-0.1:0.1", "--count", "5"]);
        assert_eq!(cli.command, Command::Sweep);
        let cfg = load_config(cli.command, cli.flags).unwrap();
        let grids = sweep_grids(&cfg).unwrap();
        assert_eq!(grids.len(), 2);
        assert_eq!((grids[1].min, grids[1].max, grids[1].count), (-0.1, 0.1, 5));
    }

    #[test]
    fn bad_values_are_usage_errors() {
        assert!(Cli::try_parse_from(["wghz", "optimize", "--direction", "sideways"]).is_err());
        let cli = parse(&["sweep", "--axes", "bogus"]);
        let cfg = load_config(cli.command, cli.flags).unwrap();
        assert!(sweep_grids(&cfg).unwrap_err().is::<Usage>());
        let cli = parse(&["sweep", "--axes", "xi", "--range", "0.1:-0.1"]);
        let cfg = load_config(cli.command, cli.flags).unwrap();
        assert!(sweep_grids(&cfg).unwrap_err().is::<Usage>());
    }

    #[test]
    fn job_file_merges_under_flags() {
        let dir = tempfile::tempdir().unwrap();
        let job = dir.path().join("job.json");
        std::fs::write(&job, r#"{"command": "sweep", "axes": ["xi", "alpha_tied"], "count": 7, "seed": 4}"#).unwrap();
        let cli = parse(&["sweep", "--job", job.to_str().unwrap(), "--count", "3"]);
        let cfg = load_config(cli.command, cli.flags).unwrap();
        assert_eq!(cfg.seed, 4);
        let grids = sweep_grids(&cfg).unwrap();
        assert_eq!(grids[0].count, 3);
        assert_eq!(grids[1].axis, SweepAxis::AlphaTied);

        let cli = parse(&["optimize", "--job", job.to_str().unwrap()]);
        assert!(load_config(cli.command, cli.flags).unwrap_err().is::<Usage>());
    }

    #[test]
    fn degrees_convert_inputs() {
        let cli = parse(&["optimize", "--phi", "180", "--degrees"]);
        let cfg = load_config(cli.command, cli.flags).unwrap();
        assert!((cfg.phi().unwrap() - std::f64::consts::PI).abs() < 1e-15);
    }
}
