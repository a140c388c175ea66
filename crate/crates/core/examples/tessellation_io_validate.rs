//! Save a tessellation to JSON, load it back, and run the structural checks,
//! first on the clean file and then on a copy with one ridge made degenerate.

use voronoi_inverse::forward::{build_voronoi, sample_sites};
use voronoi_inverse::tessellation::{load, save, RidgeGeometry, Tessellation};

fn main() -> voronoi_inverse::Result<()> {
    let (t, truth) = build_voronoi(&sample_sites(100, 4)?)?;
    let path = std::env::temp_dir().join("voronoi_inverse_example.json");
    save(&t, Some(&truth), &path)?;
    let (loaded, gt) = load(&path)?;
    println!(
        "round trip: {} cells, ground truth {}, {} violations",
        loaded.num_cells(),
        if gt.is_some() { "present" } else { "absent" },
        loaded.validate().len()
    );

    // collapse the first finite ridge onto a single vertex
    let (vertices, mut ridges, cells) = loaded.into_parts();
    if let Some(r) = ridges.iter_mut().find(|r| r.is_finite()) {
        if let RidgeGeometry::Finite(a, _) = r.geometry {
            r.geometry = RidgeGeometry::Finite(a, a);
        }
    }
    let broken = Tessellation::from_parts(vertices, ridges, cells)?;
    for v in broken.validate() {
        println!("violation: {v}");
    }
    Ok(())
}
