//! The linear solve at the heart of the method, on a hand-made five-site
//! "diamond": one square cell around (1, 1) surrounded by four neighbours.
//! The anchor patch alone determines all five generators.

use voronoi_inverse::anchor::{score_cell, select_anchor, AnchorPolicy};
use voronoi_inverse::forward::{build_voronoi, SiteSample};
use voronoi_inverse::geom::Point2;
use voronoi_inverse::solver::{assemble_patch, solve_patch};

fn main() -> voronoi_inverse::Result<()> {
    let sites = [(1.0, 1.0), (0.0, 0.0), (2.0, 0.0), (0.0, 2.0), (2.0, 2.0)];
    let sites = SiteSample::from_points(sites.iter().map(|&(x, y)| Point2::new(x, y)).collect());
    let (t, _) = build_voronoi(&sites)?;

    let anchor = select_anchor(&t, AnchorPolicy::BestScore)?;
    let score = score_cell(&t, anchor);
    println!("anchor {anchor}: degree {}, composite score {:.3}", score.degree, score.composite);

    let sys = assemble_patch(&t, anchor)?;
    let sv = sys.singular_values();
    println!(
        "system: {} equations ({} from ring pairs), {} unknowns, sigma in [{:.3}, {:.3}]",
        sys.rows(),
        sys.ring_equations(),
        sv.len(),
        sv.last().unwrap(),
        sv[0]
    );

    let sol = solve_patch(&sys)?;
    for (cell, g) in &sol.generators {
        println!("  cell {cell}: ({:+.15}, {:+.15})", g.x, g.y);
    }
    println!("residual {:.3e}, condition {:.2}", sol.residual_norm, sol.condition_estimate);
    Ok(())
}
