//! The anchor method next to the two reference methods: solving every
//! eligible cell as its own anchor, and the per-cell ray-intersection
//! estimator.

use std::time::Instant;

use voronoi_inverse::bench::{error_metrics, reconstruct, Method, Policies};
use voronoi_inverse::forward::{build_voronoi, sample_sites};

fn main() -> voronoi_inverse::Result<()> {
    let (t, truth) = build_voronoi(&sample_sites(400, 21)?)?;
    let policies = Policies::default();
    println!("{:<8} {:>12} {:>12} {:>10}", "method", "RMSE", "max error", "time");
    for method in [Method::Anchor, Method::Brute, Method::CPrime] {
        let start = Instant::now();
        let r = reconstruct(&t, method, &policies, 21)?;
        let elapsed = start.elapsed();
        let (rmse, max_err) = error_metrics(&r.generators, &truth);
        println!("{:<8} {rmse:>12.3e} {max_err:>12.3e} {:>8.1}ms", method.name(), elapsed.as_secs_f64() * 1e3);
    }
    Ok(())
}
