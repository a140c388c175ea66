mod common;

use common::{diamond, forward, half_plane_cell, p, DIAMOND_CENTER};
use voronoi_inverse::forward::{build_voronoi, jitter_degenerate, sample_sites, SiteSample};
use voronoi_inverse::geom::Point2;
use voronoi_inverse::tessellation::{to_json_string, CellId, RidgeGeometry, Tessellation, VertexId};

/// Every ridge vertex is equidistant from the two generators it separates.
fn max_bisector_violation(t: &Tessellation, sites: &[Point2]) -> f64 {
    let mut worst: f64 = 0.0;
    for r in t.ridges() {
        let (a, b) = (sites[r.cells.0.index()], sites[r.cells.1.index()]);
        for v in r.vertices() {
            let x = t.vertex(v);
            let (da, db) = (x.distance(a), x.distance(b));
            worst = worst.max((da - db).abs() / da.max(db).max(1.0));
        }
        if let RidgeGeometry::Ray { vertex, dir } = r.geometry {
            // a point far along the ray is still on the bisector
            let x = t.vertex(vertex) + dir.as_vec() * 10.0;
            let (da, db) = (x.distance(a), x.distance(b));
            worst = worst.max((da - db).abs() / da.max(db).max(1.0));
        }
    }
    worst
}

#[test]
fn ridges_lie_on_bisectors() {
    for seed in 0..50u64 {
        let n = [10, 50, 100, 250, 500][seed as usize % 5];
        let (t, gt) = forward(n, seed);
        let worst = max_bisector_violation(&t, &gt.generators);
        assert!(worst <= 1e-10, "n={n} seed={seed}: relative violation {worst:e}");
    }
}

#[test]
fn no_generator_is_closer_to_a_vertex_than_its_owners() {
    // empty-circle property: each vertex is at least as far from every site
    // as from the generators of the cells around it
    for seed in 0..10u64 {
        let (t, gt) = forward(200, seed);
        for (vi, &x) in t.vertices().iter().enumerate() {
            let owner = t.ridge(t.vertex_ridges(VertexId(vi))[0]).cells.0;
            let r = x.distance(gt.get(owner));
            let nearest = gt.generators.iter().map(|g| x.distance(*g)).fold(f64::INFINITY, f64::min);
            assert!(nearest >= r - 1e-10 * r.max(1.0), "seed {seed} vertex {vi}");
        }
    }
}

#[test]
fn each_generator_lies_in_its_own_cell() {
    for seed in 0..20u64 {
        let (t, gt) = forward(150, seed);
        for c in t.cell_ids() {
            let g = gt.get(c);
            for nb in t.neighbors(c) {
                let line = t.ridge_line(nb.ridge).unwrap();
                let other = gt.get(nb.cell);
                // the ridge separates g from its neighbor's generator
                let (sg, so) = (line.signed_distance(g), line.signed_distance(other));
                assert!(sg * so < 0.0, "seed {seed}: cell {c} vs {}", nb.cell);
            }
        }
    }
}

#[test]
fn bounded_cells_match_half_plane_intersection() {
    for seed in 0..12u64 {
        let n = [20, 80, 200][seed as usize % 3];
        let (t, gt) = forward(n, seed);
        let sites = &gt.generators;
        // a clip box well beyond every vertex leaves bounded cells untouched
        let bb = t.bounding_box().unwrap();
        let margin = 1.0 + bb.diagonal();
        for c in t.cell_ids().filter(|&c| t.cell(c).bounded) {
            let mut oracle = half_plane_cell(sites, c.index(), margin);
            oracle.dedup_by(|a, b| a.distance(*b) < 1e-9);
            if oracle.len() > 1 && oracle[0].distance(*oracle.last().unwrap()) < 1e-9 {
                oracle.pop();
            }
            let corners: Vec<Point2> = t
                .cell_corners(c)
                .into_iter()
                .map(|v| t.vertex(v.unwrap()))
                .collect();
            assert_eq!(corners.len(), oracle.len(), "seed {seed} cell {c}");
            for q in &corners {
                let d = oracle.iter().map(|o| o.distance(*q)).fold(f64::INFINITY, f64::min);
                assert!(d < 1e-9 * (1.0 + q.max_abs()), "seed {seed} cell {c}: {d:e}");
            }
        }
    }
}

#[test]
fn forward_output_passes_validation() {
    for seed in 0..20u64 {
        let (t, _) = forward(300, seed);
        let v = t.validate();
        assert!(v.is_empty(), "seed {seed}: {v:?}");
        // generic position: every vertex joins exactly three ridges
        for vi in 0..t.vertices().len() {
            assert_eq!(t.vertex_ridges(VertexId(vi)).len(), 3);
        }
    }
}

#[test]
fn construction_is_deterministic() {
    let a = forward(400, 42);
    let b = forward(400, 42);
    assert_eq!(to_json_string(&a.0, Some(&a.1)), to_json_string(&b.0, Some(&b.1)));
    let c = forward(400, 43);
    assert_ne!(a.1, c.1);
}

#[test]
fn sites_fill_the_unit_intensity_window() {
    let s = sample_sites(900, 5).unwrap();
    assert_eq!(s.window, 30.0);
    assert!(s.points.iter().all(|q| q.x > 0.0 && q.x < 30.0 && q.y > 0.0 && q.y < 30.0));
    assert!(sample_sites(1, 0).is_err());
}

#[test]
fn diamond_fixture() {
    let (t, gt) = diamond();
    assert_eq!(t.num_cells(), 5);
    assert_eq!(gt.get(DIAMOND_CENTER), p(1.0, 1.0));
    let centre = t.cell(DIAMOND_CENTER);
    assert!(centre.bounded);
    assert_eq!(centre.ridges.len(), 4);
    let mut corners: Vec<(f64, f64)> = t
        .cell_corners(DIAMOND_CENTER)
        .into_iter()
        .map(|v| {
            let q = t.vertex(v.unwrap());
            (q.x, q.y)
        })
        .collect();
    corners.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let want = [(0.0, 1.0), (1.0, 0.0), (1.0, 2.0), (2.0, 1.0)];
    for (got, want) in corners.iter().zip(want) {
        assert!((got.0 - want.0).abs() < 1e-14 && (got.1 - want.1).abs() < 1e-14);
    }
    for c in (0..4).map(CellId) {
        assert!(!t.cell(c).bounded);
    }
    assert!(t.validate().is_empty());
}

#[test]
fn two_sites_share_one_bisector() {
    let s = SiteSample::from_points(vec![p(0.0, 0.0), p(2.0, 0.0)]);
    let (t, _) = build_voronoi(&s).unwrap();
    assert_eq!(t.num_cells(), 2);
    assert!(t.cells().iter().all(|c| !c.bounded));
    for r in t.ridges() {
        let line_x = t.vertex(r.vertices().next().unwrap()).x;
        assert!((line_x - 1.0).abs() < 1e-15);
    }
    // the midpoint vertex has only two ridges, which validation reports
    assert!(t.validate().iter().any(|m| m.contains("2 incident ridges")));
}

#[test]
fn collinear_sites_give_parallel_bisectors() {
    let s = SiteSample::from_points(vec![p(0.0, 0.0), p(1.0, 1.0), p(3.0, 3.0)]);
    let (t, _) = build_voronoi(&s).unwrap();
    assert_eq!(t.num_cells(), 3);
    for c in t.cell_ids() {
        assert!(!t.has_non_parallel_ridges(c), "cell {c}");
    }
}

#[test]
fn cocircular_input_is_jittered_into_general_position() {
    let pts = vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0), p(0.5, 3.0)];
    let s = SiteSample::from_points(pts.clone());
    let j = jitter_degenerate(&s, s.default_jitter());
    assert_ne!(j.points, pts);
    for (a, b) in j.points.iter().zip(&pts) {
        assert!(a.distance(*b) <= s.default_jitter() * (1.0 + 1e-12));
    }
    let (t, _) = build_voronoi(&j).unwrap();
    assert!(t.validate().is_empty(), "{:?}", t.validate());
}

#[test]
fn duplicate_sites_are_rejected_without_jitter() {
    let s = SiteSample::from_points(vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)]);
    assert!(build_voronoi(&s).is_err());
}
