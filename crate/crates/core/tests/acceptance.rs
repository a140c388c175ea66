//! The ten acceptance criteria, each checked at its stated tolerance.
//! Prints one `PASS`/`FAIL` line per criterion and exits non-zero if any fail.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use common::{diamond, median, p, DIAMOND_CENTER};
use voronoi_inverse::anchor::{select_anchor, AnchorPolicy};
use voronoi_inverse::bench::{
    derive_seed, error_metrics, reconstruct, run_campaign, sim_seed, simulate_input, AnchorChoice,
    CampaignConfig, FrontierChoice, Method, Policies,
};
use voronoi_inverse::geom::{RidgeLine, UnitVec2};
use voronoi_inverse::propagate::{reconstruct_all, FrontierPolicy, MergePolicy};
use voronoi_inverse::solver::{assemble_patch, solve_patch, MirrorEquation, PatchSystem};
use voronoi_inverse::tessellation::CellId;
use voronoi_inverse::Error;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Master seed shared by every criterion.
const MASTER: u64 = 0;

fn criterion_1() -> Outcome {
    let cfg = CampaignConfig {
        nsim: 100,
        method: Method::Anchor,
        policies: Policies::default(),
        workers: 4,
        master_seed: MASTER,
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [10, 100, 500, 1000] {
        let s = run_campaign(&[n], &cfg).unwrap().remove(0);
        let ok = s.log10_mean_rmse <= -10.0 && s.log10_max_rse <= -6.0 && !s.rows.is_empty();
        pass &= ok;
        parts.push(format!(
            "n={n}: log10 mean RMSE {:.2}, log10 max RSE {:.2}, {} failed draws",
            s.log10_mean_rmse,
            s.log10_max_rse,
            s.failures.len()
        ));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_2() -> Outcome {
    let policies = Policies::default();
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let seed = sim_seed(MASTER, 200, i);
        let (t, _) = simulate_input(200, seed, true).unwrap();
        let a = reconstruct(&t, Method::Anchor, &policies, seed).unwrap();
        let b = reconstruct(&t, Method::Brute, &policies, seed).unwrap();
        for (x, y) in a.generators.iter().zip(&b.generators) {
            worst = worst.max(x.distance(*y));
        }
    }
    outcome(worst < 1e-8, format!("max per-cell distance {worst:.3e} over 20 tessellations (n=200)"))
}

fn criterion_3() -> Outcome {
    let (t, _) = diamond();
    let sol = solve_patch(&assemble_patch(&t, DIAMOND_CENTER).unwrap()).unwrap();
    let expected = [p(1.0, 1.0), p(0.0, 0.0), p(2.0, 0.0), p(0.0, 2.0), p(2.0, 2.0)];
    let mut worst: f64 = 0.0;
    let mut matched = 0;
    for want in expected {
        // the patch lists the anchor first, neighbours in ridge order
        if let Some(d) = sol.generators.iter().map(|(_, g)| g.distance(want)).min_by(f64::total_cmp) {
            worst = worst.max(d);
            matched += 1;
        }
    }
    let anchor_ok = sol.anchor().1.distance(p(1.0, 1.0)) < 1e-10;
    outcome(
        sol.generators.len() == 5 && matched == 5 && worst < 1e-10 && anchor_ok,
        format!("{} generators from the patch alone, max error {worst:.3e}", sol.generators.len()),
    )
}

fn criterion_4() -> Outcome {
    let horizontal = |y: f64| RidgeLine::new(p(0.0, y), UnitVec2::new(1.0, 0.0).unwrap());
    let eq = |target, source, y| MirrorEquation { target, source, ridge: None, line: horizontal(y) };
    let sys = PatchSystem::from_equations(
        vec![CellId(0), CellId(1), CellId(2)],
        vec![eq(1, 0, 0.5), eq(2, 0, -0.5), eq(1, 2, 0.0)],
    );
    let singular = matches!(solve_patch(&sys), Err(Error::SingularSystem { .. }));

    let mut smallest = f64::INFINITY;
    let mut anchors = 0;
    let mut i = 0;
    while anchors < 100 {
        let seed = sim_seed(MASTER, 300, i);
        i += 1;
        let (t, _) = simulate_input(300, seed, true).unwrap();
        let Ok(a) = select_anchor(&t, AnchorPolicy::RandomEligible(derive_seed(seed, 1))) else {
            continue;
        };
        let sv = assemble_patch(&t, a).unwrap().singular_values();
        smallest = smallest.min(*sv.last().unwrap());
        anchors += 1;
    }
    outcome(
        singular && smallest > 1e-8,
        format!(
            "all-parallel system {}; smallest sigma_min over 100 random anchors {smallest:.3e}",
            if singular { "singular" } else { "NOT singular" }
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut ridges = 0;
    for seed in 0..50u64 {
        let n = 10 + (seed as usize * 97) % 491; // spread over 10..=500
        let (t, gt) = simulate_input(n, sim_seed(MASTER, n, seed as usize), true).unwrap();
        for r in t.ridges() {
            let (a, b) = (gt.get(r.cells.0), gt.get(r.cells.1));
            for v in r.vertices() {
                let x = t.vertex(v);
                let (da, db) = (x.distance(a), x.distance(b));
                worst = worst.max((da - db).abs() / da.max(db));
            }
            ridges += 1;
        }
    }
    outcome(worst <= 1e-10, format!("max relative violation {worst:.3e} over {ridges} ridges, 50 seeds"))
}

/// Fastest of several propagation runs on one tessellation.
fn propagate_time(n: usize, seed: u64) -> Duration {
    let (t, _) = simulate_input(n, seed, true).unwrap();
    let a = select_anchor(&t, AnchorPolicy::RandomEligible(derive_seed(seed, 1))).unwrap();
    let sol = solve_patch(&assemble_patch(&t, a).unwrap()).unwrap();
    (0..5)
        .map(|_| {
            let start = Instant::now();
            let out = reconstruct_all(&t, &sol, FrontierPolicy::Random(derive_seed(seed, 2)), MergePolicy::FirstWins);
            let dt = start.elapsed();
            assert!(out.is_ok());
            dt
        })
        .min()
        .unwrap()
}

fn criterion_6() -> Outcome {
    let ratios: Vec<f64> = (0..10)
        .map(|i| {
            let small = propagate_time(1000, sim_seed(MASTER, 1000, i)).as_secs_f64();
            let large = propagate_time(2000, sim_seed(MASTER, 2000, i)).as_secs_f64();
            large / small
        })
        .collect();
    let m = median(ratios);
    outcome(m <= 3.5, format!("median t(2000)/t(1000) = {m:.2} over 10 seeds"))
}

fn criterion_7() -> Outcome {
    let policies = Policies::default();
    let depth = |n: usize| {
        median(
            (0..20)
                .map(|i| {
                    let seed = sim_seed(MASTER, n, i);
                    let (t, _) = simulate_input(n, seed, true).unwrap();
                    reconstruct(&t, Method::Anchor, &policies, seed).unwrap().depth() as f64
                })
                .collect(),
        )
    };
    let (d500, d2000) = (depth(500), depth(2000));
    let ratio = d2000 / d500;
    outcome(
        (1.4..=3.2).contains(&ratio),
        format!("median depth {d2000} (n=2000) / {d500} (n=500) = {ratio:.2} over 20 seeds"),
    )
}

fn criterion_8() -> Outcome {
    // best-score anchor, longest-ridge frontier, ridge-length-weighted merge
    let anchor_policies = Policies {
        anchor: AnchorChoice::Best,
        frontier: FrontierChoice::Longest,
        merge: MergePolicy::RidgeLengthWeightedMean,
        ..Policies::default()
    };
    let (mut anchor_sum, mut cprime_sum, mut cprime_worst) = (0.0, 0.0, 0.0f64);
    for i in 0..20 {
        let seed = sim_seed(MASTER, 100, i);
        let (t, gt) = simulate_input(100, seed, true).unwrap();
        let a = reconstruct(&t, Method::Anchor, &anchor_policies, seed).unwrap();
        let c = reconstruct(&t, Method::CPrime, &Policies::default(), seed).unwrap();
        anchor_sum += error_metrics(&a.generators, &gt).0;
        let (rmse, max_rse) = error_metrics(&c.generators, &gt);
        cprime_sum += rmse;
        cprime_worst = cprime_worst.max(max_rse);
    }
    let (am, cm) = (anchor_sum / 20.0, cprime_sum / 20.0);
    outcome(
        cprime_worst < 1e-6 && am < cm,
        format!("C' max per-cell error {cprime_worst:.3e}; mean RMSE anchor {am:.3e} vs C' {cm:.3e}"),
    )
}

fn cli(args: &[&str]) -> Vec<u8> {
    let o = Command::new(env!("CARGO_BIN_EXE_voronoi-inverse"))
        .args(args)
        .output()
        .expect("binary runs");
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    o.stdout
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let read = |name: &str| std::fs::read(dir.path().join(name)).unwrap();
    let mut mismatches = Vec::new();

    let outs: Vec<_> = ["g1.json", "g2.json"]
        .iter()
        .map(|f| {
            let so = cli(&["generate", "--n", "500", "--seed", "17", "--out", &path(f)]);
            (so, read(f))
        })
        .collect();
    if outs[0] != outs[1] {
        mismatches.push("generate");
    }

    let outs: Vec<_> = [("r1.json", "p1.json"), ("r2.json", "p2.json")]
        .iter()
        .map(|(out, rep)| {
            let so = cli(&[
                "reconstruct", "--in", &path("g1.json"), "--out", &path(out), "--report", &path(rep),
                "--anchor-policy", "random", "--frontier", "random", "--seed", "5",
            ]);
            (so, read(out), read(rep))
        })
        .collect();
    if outs[0] != outs[1] {
        mismatches.push("reconstruct");
    }

    let outs: Vec<_> = [("1", "b1.csv", "d1.csv"), ("8", "b8.csv", "d8.csv"), ("8", "c8.csv", "e8.csv")]
        .iter()
        .map(|(w, csv, detail)| {
            let so = cli(&[
                "bench", "--ns", "10,100", "--nsim", "20", "--method", "anchor", "--compare", "cprime",
                "--workers", w, "--seed", "9", "--csv", &path(csv), "--detail", &path(detail),
            ]);
            (so, read(csv), read(detail))
        })
        .collect();
    if outs[0] != outs[1] || outs[1] != outs[2] {
        mismatches.push("bench");
    }

    outcome(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            "generate, reconstruct and bench (workers 1 and 8) byte-identical across runs".to_string()
        } else {
            format!("outputs differ for: {}", mismatches.join(", "))
        },
    )
}

fn criterion_10() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let seed = sim_seed(MASTER, 500, i);
        let (t, _) = simulate_input(500, seed, true).unwrap();
        let with = |merge| Policies { merge, ..Policies::default() };
        let a = reconstruct(&t, Method::Anchor, &with(MergePolicy::FirstWins), seed).unwrap();
        let b = reconstruct(&t, Method::Anchor, &with(MergePolicy::RidgeLengthWeightedMean), seed).unwrap();
        for (x, y) in a.generators.iter().zip(&b.generators) {
            worst = worst.max(x.distance(*y));
        }
    }
    outcome(worst < 1e-8, format!("max per-cell distance first vs weighted {worst:.3e} (n=500, 10 seeds)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("round-trip accuracy", criterion_1),
        ("oracle equivalence", criterion_2),
        ("fixture exactness", criterion_3),
        ("uniqueness/degeneracy", criterion_4),
        ("bisector property", criterion_5),
        ("linear-time propagation", criterion_6),
        ("depth scaling", criterion_7),
        ("C' sanity", criterion_8),
        ("determinism", criterion_9),
        ("path independence", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = match std::panic::catch_unwind(check) {
            Ok(o) => o,
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                outcome(false, format!("panicked: {msg}"))
            }
        };
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} criterion {} ({name}): {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
