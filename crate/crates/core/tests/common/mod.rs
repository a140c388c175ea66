#![allow(dead_code)]

use voronoi_inverse::forward::{build_voronoi, jitter_degenerate, sample_sites, SiteSample};
use voronoi_inverse::geom::Point2;
use voronoi_inverse::tessellation::{
    Cell, CellId, GroundTruth, Ridge, RidgeGeometry, RidgeId, Tessellation, VertexId,
};

pub fn p(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

/// Sites (0,0), (2,0), (0,2), (2,2), (1,1); cell 4 is the bounded diamond.
pub fn diamond() -> (Tessellation, GroundTruth) {
    let sites = SiteSample::from_points(vec![p(0.0, 0.0), p(2.0, 0.0), p(0.0, 2.0), p(2.0, 2.0), p(1.0, 1.0)]);
    build_voronoi(&sites).expect("diamond builds")
}

pub const DIAMOND_CENTER: CellId = CellId(4);

/// The same sample/jitter/build pipeline the benchmarks use.
pub fn forward(n: usize, seed: u64) -> (Tessellation, GroundTruth) {
    let s = sample_sites(n, seed).unwrap();
    let s = jitter_degenerate(&s, s.default_jitter());
    build_voronoi(&s).unwrap()
}

pub fn max_dist(a: &[Point2], b: &[Point2]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.distance(*y)).fold(0.0, f64::max)
}

/// Cell `i` as the intersection of the half-planes `|x − s_i| ≤ |x − s_j|`,
/// clipped to a box `margin` beyond the sites. Returns CCW polygon corners.
pub fn half_plane_cell(sites: &[Point2], i: usize, margin: f64) -> Vec<Point2> {
    let (mut lo, mut hi) = (sites[0], sites[0]);
    for s in sites {
        lo = p(lo.x.min(s.x), lo.y.min(s.y));
        hi = p(hi.x.max(s.x), hi.y.max(s.y));
    }
    let mut poly = vec![
        p(lo.x - margin, lo.y - margin),
        p(hi.x + margin, lo.y - margin),
        p(hi.x + margin, hi.y + margin),
        p(lo.x - margin, hi.y + margin),
    ];
    let si = sites[i];
    for (j, &sj) in sites.iter().enumerate() {
        if j == i || poly.is_empty() {
            continue;
        }
        let m = si.midpoint(sj);
        let nrm = sj - si;
        let side = |q: Point2| (q - m).dot(nrm);
        let mut out = Vec::with_capacity(poly.len() + 1);
        for k in 0..poly.len() {
            let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
            let (fa, fb) = (side(a), side(b));
            if fa <= 0.0 {
                out.push(a);
            }
            if (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0) {
                let t = fa / (fa - fb);
                out.push(a + (b - a) * t);
            }
        }
        poly = out;
    }
    poly
}

/// Merges the far endpoint of a ring ridge of `anchor` into the near one and
/// drops the ridge from its cells, producing a 4-valent vertex on the anchor.
/// Returns the modified tessellation and the dropped ridge.
pub fn merge_ring_ridge(t: &Tessellation, anchor: CellId) -> (Tessellation, RidgeId) {
    let pair = t
        .ring_pairs(anchor)
        .into_iter()
        .find(|rp| t.ridge(rp.ridge).is_finite())
        .expect("a finite ring ridge");
    let anchor_vertices: Vec<VertexId> = t
        .cell(anchor)
        .ridges
        .iter()
        .flat_map(|&r| t.ridge(r).vertices().collect::<Vec<_>>())
        .collect();
    let RidgeGeometry::Finite(a, b) = t.ridge(pair.ridge).geometry else {
        unreachable!()
    };
    let (near, far) = if anchor_vertices.contains(&a) { (a, b) } else { (b, a) };
    let (vertices, mut ridges, mut cells) = t.clone().into_parts();
    let swap = |v: VertexId| if v == far { near } else { v };
    for r in ridges.iter_mut() {
        r.geometry = match r.geometry {
            RidgeGeometry::Finite(x, y) => RidgeGeometry::Finite(swap(x), swap(y)),
            RidgeGeometry::Ray { vertex, dir } => RidgeGeometry::Ray { vertex: swap(vertex), dir },
        };
    }
    for c in cells.iter_mut() {
        c.ridges.retain(|&r| r != pair.ridge);
    }
    (Tessellation::from_parts(vertices, ridges, cells).unwrap(), pair.ridge)
}

/// Replaces one component of the parts of `t`.
pub fn rebuild(
    t: &Tessellation,
    f: impl FnOnce(&mut Vec<Point2>, &mut Vec<Ridge>, &mut Vec<Cell>),
) -> Tessellation {
    let (mut v, mut r, mut c) = t.clone().into_parts();
    f(&mut v, &mut r, &mut c);
    Tessellation::from_parts(v, r, c).unwrap()
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 0 {
        0.5 * (v[m - 1] + v[m])
    } else {
        v[m]
    }
}
