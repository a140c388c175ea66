//! Command-line front end.
//!
//! | exit | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | invalid flags or arguments |
//! | 3 | algorithmic failure (no anchor, singular system, build failure, …) |
//! | 4 | input is not a consistent Voronoi tessellation (`reconstruct` residual too large, `validate` violations) |
//! | 5 | I/O or parse error |

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bench::{
    self, csv_row, error_metrics, export_csv, export_detail_csv, fmt_sig, paired_difference,
    AnchorChoice, CampaignConfig, CsvOptions, FrontierChoice, Method, Policies,
};
use crate::error::Error;
use crate::forward::{build_voronoi, jitter_degenerate, sample_sites};
use crate::propagate::MergePolicy;
use crate::tessellation::{self, generators_to_json};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ALGORITHM: i32 = 3;
pub const EXIT_INCONSISTENT: i32 = 4;
pub const EXIT_IO: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "voronoi-inverse", version, about = "Recover Voronoi generators from a tessellation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample sites, build their tessellation, and write it with its generators.
    Generate(GenerateArgs),
    /// Recover the generators of a tessellation file.
    Reconstruct(ReconstructArgs),
    /// Run a Monte Carlo accuracy campaign and write a CSV summary.
    Bench(BenchArgs),
    /// Check a tessellation file for structural violations.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Keep cocircular or duplicate sites as sampled.
    #[arg(long)]
    pub no_jitter: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Anchor,
    Brute,
    Cprime,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Anchor => Method::Anchor,
            MethodArg::Brute => Method::Brute,
            MethodArg::Cprime => Method::CPrime,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FrontierArg {
    First,
    Random,
    Longest,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MergeArg {
    First,
    Weighted,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AnchorArg {
    Best,
    Random,
}

#[derive(Debug, Args)]
pub struct PolicyArgs {
    #[arg(long, value_enum)]
    pub frontier: Option<FrontierArg>,
    #[arg(long, value_enum)]
    pub merge: Option<MergeArg>,
    #[arg(long, value_enum)]
    pub anchor_policy: Option<AnchorArg>,
}

impl PolicyArgs {
    fn resolve(&self, mut base: Policies) -> Policies {
        if let Some(f) = self.frontier {
            base.frontier = match f {
                FrontierArg::First => FrontierChoice::First,
                FrontierArg::Random => FrontierChoice::Random,
                FrontierArg::Longest => FrontierChoice::Longest,
            };
        }
        if let Some(m) = self.merge {
            base.merge = match m {
                MergeArg::First => MergePolicy::FirstWins,
                MergeArg::Weighted => MergePolicy::RidgeLengthWeightedMean,
            };
        }
        if let Some(a) = self.anchor_policy {
            base.anchor = match a {
                AnchorArg::Best => AnchorChoice::Best,
                AnchorArg::Random => AnchorChoice::Random,
            };
        }
        base
    }
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Anchor)]
    pub method: MethodArg,
    #[command(flatten)]
    pub policies: PolicyArgs,
    /// Seed for the random anchor and frontier policies.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Include wall-clock timings in the report (makes it non-reproducible).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub ns: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub nsim: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Anchor)]
    pub method: MethodArg,
    /// Also run this method on the same seeds and report the paired difference.
    #[arg(long, value_enum)]
    pub compare: Option<MethodArg>,
    #[command(flatten)]
    pub policies: PolicyArgs,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Campaign master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long)]
    pub append: bool,
    /// Per-simulation detail CSV.
    #[arg(long)]
    pub detail: Option<PathBuf>,
    /// Fill the timing column instead of writing `NA`.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) => EXIT_USAGE,
        Error::Parse { .. } | Error::UnsupportedVersion { .. } | Error::Io { .. } => EXIT_IO,
        Error::Simulation { source, .. } => exit_code(source),
        _ => EXIT_ALGORITHM,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Reconstruct(a) => reconstruct(a),
        Command::Bench(a) => run_bench(a),
        Command::Validate(a) => validate(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

type CmdResult = Result<i32, Error>;

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn generate(a: &GenerateArgs) -> CmdResult {
    if a.n < 2 {
        return Err(Error::InvalidArgument(format!("--n must be at least 2, got {}", a.n)));
    }
    let mut sites = sample_sites(a.n, a.seed)?;
    if !a.no_jitter {
        sites = jitter_degenerate(&sites, sites.default_jitter());
    }
    let (t, gt) = build_voronoi(&sites)?;
    tessellation::save(&t, Some(&gt), &a.out)?;
    println!(
        "cells {} ridges {} vertices {}",
        t.num_cells(),
        t.ridges().len(),
        t.vertices().len()
    );
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct Report {
    method: &'static str,
    cells: usize,
    anchor: Option<usize>,
    residual_norm: Option<f64>,
    consistency_threshold: Option<f64>,
    consistent: bool,
    condition_estimate: Option<f64>,
    depth: usize,
    rmse: Option<f64>,
    max_rse: Option<f64>,
    assemble_solve_ms: Option<f64>,
    propagate_ms: Option<f64>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn reconstruct(a: &ReconstructArgs) -> CmdResult {
    let (t, gt) = tessellation::load(&a.input)?;
    let method = Method::from(a.method);
    let policies = a.policies.resolve(Policies {
        anchor: AnchorChoice::Best,
        frontier: FrontierChoice::First,
        ..Policies::default()
    });
    let rec = bench::reconstruct(&t, method, &policies, a.seed)?;
    let metrics = gt.as_ref().map(|g| error_metrics(&rec.generators, g));
    let threshold = rec.patch.as_ref().map(|p| p.consistency_threshold());

    let mut extra = vec![("method", format!("\"{}\"", method.name()))];
    if let Some(c) = rec.anchor {
        extra.push(("anchor", c.index().to_string()));
    }
    write_file(&a.out, &generators_to_json(&rec.generators, &extra))?;

    let report = Report {
        method: method.name(),
        cells: t.num_cells(),
        anchor: rec.anchor.map(|c| c.index()),
        residual_norm: finite(rec.residual_norm),
        consistency_threshold: threshold,
        consistent: rec.consistent,
        condition_estimate: rec.patch.as_ref().map(|p| p.condition_estimate),
        depth: rec.depth(),
        rmse: metrics.map(|m| m.0),
        max_rse: metrics.map(|m| m.1),
        assemble_solve_ms: a.timings.then(|| rec.assemble_solve_time.as_secs_f64() * 1e3),
        propagate_ms: a.timings.then(|| rec.propagate_time.as_secs_f64() * 1e3),
    };
    if let Some(path) = &a.report {
        let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
        write_file(path, &text)?;
    }
    match metrics {
        Some((rmse, max_rse)) => println!(
            "{} cells, depth {}, residual {}, rmse {}, max_rse {}",
            report.cells,
            report.depth,
            fmt_sig(rec.residual_norm, 6),
            fmt_sig(rmse, 6),
            fmt_sig(max_rse, 6)
        ),
        None => println!(
            "{} cells, depth {}, residual {}",
            report.cells,
            report.depth,
            fmt_sig(rec.residual_norm, 6)
        ),
    }
    if !rec.consistent {
        eprintln!(
            "inconsistent input: residual {} exceeds threshold {}; not a Voronoi tessellation?",
            fmt_sig(rec.residual_norm, 6),
            threshold.map_or("NA".into(), |x| fmt_sig(x, 6))
        );
        return Ok(EXIT_INCONSISTENT);
    }
    Ok(EXIT_OK)
}

fn run_bench(a: &BenchArgs) -> CmdResult {
    let policies = a.policies.resolve(Policies::default());
    let cfg = CampaignConfig {
        nsim: a.nsim,
        method: a.method.into(),
        policies,
        workers: a.workers,
        master_seed: a.seed,
    };
    let main = bench::run_campaign(&a.ns, &cfg)?;
    let other = match a.compare {
        Some(m) => Some(bench::run_campaign(&a.ns, &CampaignConfig { method: m.into(), ..cfg })?),
        None => None,
    };
    let mut all = main.clone();
    all.extend(other.iter().flatten().cloned());

    let opts = CsvOptions {
        append: a.append,
        timings: a.timings,
    };
    export_csv(&all, &a.csv, opts)?;
    if let Some(d) = &a.detail {
        export_detail_csv(&all, d, opts)?;
    }

    println!("{}", bench::CSV_HEADER);
    for s in &all {
        println!("{}", csv_row(s, a.timings));
    }
    if let Some(other) = &other {
        for (x, y) in main.iter().zip(other) {
            if let Some(d) = paired_difference(x, y) {
                println!(
                    "paired difference n={} {}-{}: {}",
                    x.n,
                    x.method.name(),
                    y.method.name(),
                    fmt_sig(d, 6)
                );
            }
        }
    }
    let mut code = EXIT_OK;
    for s in &all {
        if !s.failures.is_empty() {
            eprintln!(
                "n={} {}: {} of {} simulations failed (excluded)",
                s.n,
                s.method.name(),
                s.failures.len(),
                s.nsim
            );
            if s.rows.is_empty() {
                code = EXIT_ALGORITHM;
            }
        }
    }
    Ok(code)
}

fn validate(a: &ValidateArgs) -> CmdResult {
    let (t, _) = tessellation::load(&a.input)?;
    let violations = t.validate();
    for v in &violations {
        println!("{v}");
    }
    println!("{} violations", violations.len());
    Ok(if violations.is_empty() { EXIT_OK } else { EXIT_INCONSISTENT })
}
