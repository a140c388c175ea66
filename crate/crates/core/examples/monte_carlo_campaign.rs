//! A small Monte Carlo campaign over several tessellation sizes, written to a
//! CSV file in the system temp directory.

use voronoi_inverse::bench::{export_csv, run_campaign, CampaignConfig, CsvOptions, Method, Policies};

fn main() -> voronoi_inverse::Result<()> {
    let cfg = CampaignConfig {
        nsim: 50,
        method: Method::Anchor,
        policies: Policies::default(),
        workers: 4,
        master_seed: 1,
    };
    let summaries = run_campaign(&[10, 50, 100, 500], &cfg)?;
    for s in &summaries {
        println!(
            "n={:<4} log10 mean RMSE {:>7.2}  log10 max error {:>7.2}  mean depth {:>5.1}  failures {}",
            s.n,
            s.log10_mean_rmse,
            s.log10_max_rse,
            s.mean_depth,
            s.failures.len()
        );
    }
    let path = std::env::temp_dir().join("voronoi_inverse_campaign.csv");
    export_csv(&summaries, &path, CsvOptions { append: false, timings: true })?;
    println!("wrote {}", path.display());
    Ok(())
}
