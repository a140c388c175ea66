//! Monte Carlo accuracy campaigns.
//!
//! Each simulation samples `n` sites, builds their tessellation, reconstructs
//! the generators with one method, and measures
//!
//! * `rmse = sqrt(mean_i ‖ĝ_i − g_i‖²)` over all cells, and
//! * `max_rse = max_i ‖ĝ_i − g_i‖`.
//!
//! A campaign aggregates `log10(mean rmse)` and `log10(max max_rse)`.
//!
//! # Seeds
//!
//! Simulation `i` at size `n` of a campaign with master seed `m` uses
//! `sim_seed(m, n, i) = splitmix64(splitmix64(m ^ rotl(n, 32)) + i)`, so any
//! single simulation can be replayed without running the others. Within a
//! simulation, `derive_seed(seed, s)` feeds stream `s`: 0 sites, 1 anchor
//! choice, 2 frontier choice.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::anchor::{select_anchor, AnchorPolicy};
use crate::baselines::{brute_force_all, c_prime_all, DEFAULT_PERTURB_EPS};
use crate::error::{Error, Result};
use crate::forward::{build_voronoi, jitter_degenerate, sample_sites};
use crate::geom::Point2;
use crate::propagate::{reconstruct_all, FrontierPolicy, MergePolicy, PropagationTrace};
use crate::solver::{assemble_patch, solve_patch, PatchSolution};
use crate::tessellation::{CellId, GroundTruth, Tessellation};

pub const CSV_HEADER: &str =
    "n,nsim,method,log10_mean_rmse,log10_max_rse,mean_depth,mean_propagate_ms";
pub const DETAIL_HEADER: &str =
    "n,seed,method,rmse,max_rse,depth,propagate_ms,residual_norm";

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

pub fn sim_seed(master: u64, n: usize, index: usize) -> u64 {
    splitmix64(splitmix64(master ^ (n as u64).rotate_left(32)).wrapping_add(index as u64))
}

pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Anchor,
    Brute,
    CPrime,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Anchor => "anchor",
            Method::Brute => "brute",
            Method::CPrime => "cprime",
        }
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "anchor" => Ok(Method::Anchor),
            "brute" => Ok(Method::Brute),
            "cprime" => Ok(Method::CPrime),
            _ => Err(Error::InvalidArgument(format!("unknown method `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnchorChoice {
    Best,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrontierChoice {
    First,
    Random,
    Longest,
}

/// Policy kinds; seeds are filled in per simulation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Policies {
    pub anchor: AnchorChoice,
    pub frontier: FrontierChoice,
    pub merge: MergePolicy,
    /// Jitter cocircular/duplicate sites by `1e-9·window` before building.
    pub jitter: bool,
    pub perturb_eps: f64,
}

impl Default for Policies {
    /// Random anchor, random frontier, first-wins merge.
    fn default() -> Self {
        Policies {
            anchor: AnchorChoice::Random,
            frontier: FrontierChoice::Random,
            merge: MergePolicy::FirstWins,
            jitter: true,
            perturb_eps: DEFAULT_PERTURB_EPS,
        }
    }
}

impl Policies {
    pub fn anchor_policy(&self, seed: u64) -> AnchorPolicy {
        match self.anchor {
            AnchorChoice::Best => AnchorPolicy::BestScore,
            AnchorChoice::Random => AnchorPolicy::RandomEligible(derive_seed(seed, 1)),
        }
    }

    pub fn frontier_policy(&self, seed: u64) -> FrontierPolicy {
        match self.frontier {
            FrontierChoice::First => FrontierPolicy::FirstAvailable,
            FrontierChoice::Random => FrontierPolicy::Random(derive_seed(seed, 2)),
            FrontierChoice::Longest => FrontierPolicy::LongestRidge,
        }
    }
}

/// Output of one reconstruction of a whole tessellation.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub method: Method,
    /// Indexed by [`CellId`].
    pub generators: Vec<Point2>,
    pub anchor: Option<CellId>,
    pub patch: Option<PatchSolution>,
    pub trace: Option<PropagationTrace>,
    /// Largest patch residual (NaN when no linear solve is involved).
    pub residual_norm: f64,
    pub consistent: bool,
    pub assemble_solve_time: Duration,
    pub propagate_time: Duration,
}

impl Reconstruction {
    pub fn depth(&self) -> usize {
        self.trace.as_ref().map_or(0, |t| t.depth)
    }
}

pub fn reconstruct(
    t: &Tessellation,
    method: Method,
    policies: &Policies,
    seed: u64,
) -> Result<Reconstruction> {
    match method {
        Method::Anchor => {
            let start = Instant::now();
            let anchor = select_anchor(t, policies.anchor_policy(seed))?;
            let sys = assemble_patch(t, anchor)?;
            let patch = solve_patch(&sys)?;
            let solved = Instant::now();
            let (generators, trace) =
                reconstruct_all(t, &patch, policies.frontier_policy(seed), policies.merge)?;
            let done = Instant::now();
            Ok(Reconstruction {
                method,
                generators,
                anchor: Some(anchor),
                residual_norm: patch.residual_norm,
                consistent: patch.is_consistent(),
                patch: Some(patch),
                trace: Some(trace),
                assemble_solve_time: solved - start,
                propagate_time: done - solved,
            })
        }
        Method::Brute => {
            let start = Instant::now();
            let est = brute_force_all(t)?;
            let elapsed = start.elapsed();
            let residual_norm = est
                .iter()
                .filter(|e| e.solved)
                .map(|e| e.residual)
                .fold(0.0, f64::max);
            let scale = t.diameter().max(1.0);
            Ok(Reconstruction {
                method,
                generators: est.iter().map(|e| e.generator).collect(),
                anchor: None,
                patch: None,
                trace: None,
                residual_norm,
                consistent: residual_norm <= crate::solver::CONSISTENCY_REL_TOL * scale,
                assemble_solve_time: elapsed,
                propagate_time: Duration::ZERO,
            })
        }
        Method::CPrime => {
            let start = Instant::now();
            let generators = c_prime_all(t, policies.perturb_eps)?;
            Ok(Reconstruction {
                method,
                generators,
                anchor: None,
                patch: None,
                trace: None,
                residual_norm: f64::NAN,
                consistent: true,
                assemble_solve_time: start.elapsed(),
                propagate_time: Duration::ZERO,
            })
        }
    }
}

/// `(rmse, max_rse)` of `estimates` against the ground truth.
pub fn error_metrics(estimates: &[Point2], truth: &GroundTruth) -> (f64, f64) {
    let n = estimates.len().max(1) as f64;
    let mut sum_sq = 0.0;
    let mut max_e: f64 = 0.0;
    for (e, g) in estimates.iter().zip(&truth.generators) {
        let d = e.distance(*g);
        sum_sq += d * d;
        max_e = max_e.max(d);
    }
    ((sum_sq / n).sqrt(), max_e)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimResult {
    pub n: usize,
    pub seed: u64,
    pub method: Method,
    pub rmse: f64,
    pub max_rse: f64,
    pub depth: usize,
    pub build_time: Duration,
    pub assemble_solve_time: Duration,
    pub propagate_time: Duration,
    pub residual_norm: f64,
}

/// Builds the tessellation a simulation uses.
pub fn simulate_input(n: usize, seed: u64, jitter: bool) -> Result<(Tessellation, GroundTruth)> {
    let mut sites = sample_sites(n, derive_seed(seed, 0))?;
    if jitter {
        sites = jitter_degenerate(&sites, sites.default_jitter());
    }
    build_voronoi(&sites)
}

pub fn run_simulation(n: usize, seed: u64, method: Method, policies: &Policies) -> Result<SimResult> {
    if n < 10 {
        return Err(Error::InvalidArgument(format!(
            "simulations need n >= 10, got {n}"
        )));
    }
    let wrap = |e: Error| Error::Simulation {
        n,
        seed,
        source: Box::new(e),
    };
    let start = Instant::now();
    let (t, gt) = simulate_input(n, seed, policies.jitter).map_err(wrap)?;
    let build_time = start.elapsed();
    let rec = reconstruct(&t, method, policies, seed).map_err(wrap)?;
    let (rmse, max_rse) = error_metrics(&rec.generators, &gt);
    Ok(SimResult {
        n,
        seed,
        method,
        rmse,
        max_rse,
        depth: rec.depth(),
        build_time,
        assemble_solve_time: rec.assemble_solve_time,
        propagate_time: rec.propagate_time,
        residual_norm: rec.residual_norm,
    })
}

#[derive(Clone, Debug)]
pub struct CampaignSummary {
    pub n: usize,
    pub nsim: usize,
    pub method: Method,
    pub log10_mean_rmse: f64,
    pub log10_max_rse: f64,
    pub mean_depth: f64,
    pub mean_propagate_ms: f64,
    /// Successful simulations, in seed-index order.
    pub rows: Vec<SimResult>,
    /// `(seed, message)` of simulations that failed; excluded from aggregates.
    pub failures: Vec<(u64, String)>,
}

impl CampaignSummary {
    pub fn from_results(n: usize, nsim: usize, method: Method, results: Vec<(u64, Result<SimResult>)>) -> Self {
        let mut rows = Vec::new();
        let mut failures = Vec::new();
        for (seed, r) in results {
            match r {
                Ok(r) => rows.push(r),
                Err(e) => failures.push((seed, e.to_string())),
            }
        }
        let k = rows.len() as f64;
        let mean = |f: &dyn Fn(&SimResult) -> f64| {
            if rows.is_empty() {
                f64::NAN
            } else {
                rows.iter().map(f).sum::<f64>() / k
            }
        };
        let mean_rmse = mean(&|r| r.rmse);
        let max_rse = rows.iter().map(|r| r.max_rse).fold(f64::NAN, f64::max);
        CampaignSummary {
            n,
            nsim,
            method,
            log10_mean_rmse: mean_rmse.log10(),
            log10_max_rse: max_rse.log10(),
            mean_depth: mean(&|r| r.depth as f64),
            mean_propagate_ms: mean(&|r| r.propagate_time.as_secs_f64() * 1e3),
            rows,
            failures,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CampaignConfig {
    pub nsim: usize,
    pub method: Method,
    pub policies: Policies,
    pub workers: usize,
    pub master_seed: u64,
}

/// One summary per entry of `ns`. Results do not depend on `workers`.
pub fn run_campaign(ns: &[usize], cfg: &CampaignConfig) -> Result<Vec<CampaignSummary>> {
    if cfg.nsim == 0 {
        return Err(Error::InvalidArgument("nsim must be at least 1".into()));
    }
    if let Some(&n) = ns.iter().find(|&&n| n < 10) {
        return Err(Error::InvalidArgument(format!(
            "simulations need n >= 10, got {n}"
        )));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let jobs: Vec<(usize, u64)> = ns
        .iter()
        .flat_map(|&n| (0..cfg.nsim).map(move |i| (n, sim_seed(cfg.master_seed, n, i))))
        .collect();
    let mut results: Vec<(usize, u64, Result<SimResult>)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(n, seed)| (n, seed, run_simulation(n, seed, cfg.method, &cfg.policies)))
            .collect()
    });
    Ok(ns
        .iter()
        .map(|&n| {
            let mine: Vec<(u64, Result<SimResult>)> = results
                .iter_mut()
                .filter(|r| r.0 == n)
                .map(|r| {
                    let taken = std::mem::replace(&mut r.2, Err(Error::NoAnchor));
                    (r.1, taken)
                })
                .collect();
            CampaignSummary::from_results(n, cfg.nsim, cfg.method, mine)
        })
        .collect())
}

/// `log10(mean rmse)` of `a` minus that of `b` on the same `n`.
pub fn paired_difference(a: &CampaignSummary, b: &CampaignSummary) -> Option<f64> {
    (a.n == b.n).then(|| a.log10_mean_rmse - b.log10_mean_rmse)
}

/// `x` with `digits` significant digits, plain notation for moderate exponents.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..15).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // re-round can bump the exponent (9.999995 → 10.00000); trim trailing zeros
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        format!("{x:.*e}", digits - 1)
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CsvOptions {
    /// Append to an existing file; the header is written only if it is empty.
    pub append: bool,
    /// Fill the timing column; otherwise it reads `NA` so output is reproducible.
    pub timings: bool,
}

fn open_csv(path: &Path, header: &str, append: bool) -> Result<fs::File> {
    let has_content = append && fs::metadata(path).map(|m| m.len() > 0).unwrap_or(false);
    let mut f = OpenOptions::new()
        .create(true)
        .write(true)
        .append(append)
        .truncate(!append)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    if !has_content {
        writeln!(f, "{header}").map_err(|e| Error::io(path, e))?;
    }
    Ok(f)
}

pub fn csv_row(s: &CampaignSummary, timings: bool) -> String {
    let ms = if timings {
        fmt_sig(s.mean_propagate_ms, 6)
    } else {
        "NA".into()
    };
    format!(
        "{},{},{},{},{},{},{}",
        s.n,
        s.nsim,
        s.method.name(),
        fmt_sig(s.log10_mean_rmse, 6),
        fmt_sig(s.log10_max_rse, 6),
        fmt_sig(s.mean_depth, 6),
        ms
    )
}

pub fn export_csv(summaries: &[CampaignSummary], path: impl AsRef<Path>, opts: CsvOptions) -> Result<()> {
    let path = path.as_ref();
    let mut f = open_csv(path, CSV_HEADER, opts.append)?;
    for s in summaries {
        writeln!(f, "{}", csv_row(s, opts.timings)).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

/// Per-simulation rows: seed, errors, depth, timing, residual.
pub fn export_detail_csv(summaries: &[CampaignSummary], path: impl AsRef<Path>, opts: CsvOptions) -> Result<()> {
    let path = path.as_ref();
    let mut f = open_csv(path, DETAIL_HEADER, opts.append)?;
    for s in summaries {
        for r in &s.rows {
            let ms = if opts.timings {
                fmt_sig(r.propagate_time.as_secs_f64() * 1e3, 6)
            } else {
                "NA".into()
            };
            writeln!(
                f,
                "{},{:#018x},{},{},{},{},{},{}",
                r.n,
                r.seed,
                r.method.name(),
                fmt_sig(r.rmse, 6),
                fmt_sig(r.max_rse, 6),
                r.depth,
                ms,
                fmt_sig(r.residual_norm, 6)
            )
            .map_err(|e| Error::io(path, e))?;
        }
    }
    Ok(())
}

/// One parsed summary row; `mean_propagate_ms` is `None` for `NA`.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub n: usize,
    pub nsim: usize,
    pub method: Method,
    pub log10_mean_rmse: f64,
    pub log10_max_rse: f64,
    pub mean_depth: f64,
    pub mean_propagate_ms: Option<f64>,
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<CsvRow>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        _ => {
            return Err(Error::Parse {
                context: format!("{}:1", path.display()),
                message: "missing or unexpected header".into(),
            })
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.is_empty() || line == CSV_HEADER {
            continue;
        }
        let ctx = || format!("{}:{}", path.display(), i + 1);
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(Error::Parse {
                context: ctx(),
                message: format!("expected 7 fields, found {}", f.len()),
            });
        }
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|e| Error::Parse {
                context: ctx(),
                message: format!("`{s}`: {e}"),
            })
        };
        rows.push(CsvRow {
            n: num(f[0])? as usize,
            nsim: num(f[1])? as usize,
            method: f[2].parse()?,
            log10_mean_rmse: num(f[3])?,
            log10_max_rse: num(f[4])?,
            mean_depth: num(f[5])?,
            mean_propagate_ms: if f[6] == "NA" { None } else { Some(num(f[6])?) },
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_digits() {
        assert_eq!(fmt_sig(-12.345678, 6), "-12.3457");
        assert_eq!(fmt_sig(0.5, 6), "0.5");
        assert_eq!(fmt_sig(3.0, 6), "3");
        assert_eq!(fmt_sig(1.234567e-9, 6), "1.23457e-9");
        assert_eq!(fmt_sig(f64::NEG_INFINITY, 6), "-inf");
    }

    #[test]
    fn seeds_are_distinct_streams() {
        assert_ne!(sim_seed(1, 10, 0), sim_seed(1, 10, 1));
        assert_ne!(sim_seed(1, 10, 0), sim_seed(1, 50, 0));
        assert_ne!(derive_seed(5, 0), derive_seed(5, 1));
    }

    #[test]
    fn metrics_order() {
        let gt = GroundTruth {
            generators: vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)],
        };
        let est = [Point2::new(0.0, 3e-12), Point2::new(1.0, 4e-12)];
        let (rmse, max) = error_metrics(&est, &gt);
        assert!((rmse - (12.5f64).sqrt() * 1e-12).abs() < 1e-24);
        assert_eq!(max, 4e-12);
        assert!(rmse <= max);
    }
}
