//! Sample sites, build their Voronoi tessellation, forget the sites, and get
//! them back from the tessellation alone.
//!
//! ```text
//! cargo run --example generate_and_reconstruct -- 500 7
//! ```

use voronoi_inverse::bench::{error_metrics, reconstruct, Method, Policies};
use voronoi_inverse::forward::{build_voronoi, sample_sites};

fn main() -> voronoi_inverse::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(500, |s| s.parse().expect("n must be an integer"));
    let seed: u64 = args.next().map_or(7, |s| s.parse().expect("seed must be an integer"));

    let (t, truth) = build_voronoi(&sample_sites(n, seed)?)?;
    println!("{} cells, {} ridges, {} vertices", t.num_cells(), t.ridges().len(), t.vertices().len());

    let r = reconstruct(&t, Method::Anchor, &Policies::default(), seed)?;
    let (rmse, max_err) = error_metrics(&r.generators, &truth);
    println!("anchor cell      {}", r.anchor.expect("anchor method"));
    println!("BFS depth        {}", r.depth());
    println!("patch residual   {:.3e} (consistent: {})", r.residual_norm, r.consistent);
    println!("RMSE             {rmse:.3e}");
    println!("max cell error   {max_err:.3e}");
    Ok(())
}
