//! Every frontier and merge policy recovers the same generators; they differ
//! only in the order of reflections and in how much work they do.

use voronoi_inverse::anchor::{select_anchor, AnchorPolicy};
use voronoi_inverse::bench::error_metrics;
use voronoi_inverse::forward::{build_voronoi, sample_sites};
use voronoi_inverse::propagate::{reconstruct_all, FrontierPolicy, MergePolicy};
use voronoi_inverse::solver::{assemble_patch, solve_patch};

fn main() -> voronoi_inverse::Result<()> {
    let (t, truth) = build_voronoi(&sample_sites(2000, 3)?)?;
    let anchor = select_anchor(&t, AnchorPolicy::BestScore)?;
    let sol = solve_patch(&assemble_patch(&t, anchor)?)?;

    println!("{:<14} {:<10} {:>6} {:>12} {:>12} {:>12}", "frontier", "merge", "depth", "reflections", "spread", "max error");
    for frontier in [FrontierPolicy::FirstAvailable, FrontierPolicy::Random(11), FrontierPolicy::LongestRidge] {
        for merge in [MergePolicy::FirstWins, MergePolicy::RidgeLengthWeightedMean] {
            let (g, trace) = reconstruct_all(&t, &sol, frontier, merge)?;
            let (_, max_err) = error_metrics(&g, &truth);
            let frontier_name = match frontier {
                FrontierPolicy::FirstAvailable => "first",
                FrontierPolicy::Random(_) => "random",
                FrontierPolicy::LongestRidge => "longest-ridge",
            };
            let merge_name = match merge {
                MergePolicy::FirstWins => "first",
                MergePolicy::RidgeLengthWeightedMean => "weighted",
            };
            println!(
                "{frontier_name:<14} {merge_name:<10} {:>6} {:>12} {:>12.2e} {:>12.2e}",
                trace.depth, trace.reflections, trace.max_candidate_spread, max_err
            );
        }
    }
    Ok(())
}
