//! Ground truth: sample sites, build their Voronoi tessellation.
//!
//! The diagram is the dual of a Delaunay triangulation: circumcenters become
//! Voronoi vertices, interior Delaunay edges become finite ridges, and hull
//! edges become rays pointing away from the hull.

mod delaunay;

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::{Point2, UnitVec2, DEGENERACY_REL_TOL};
use crate::tessellation::{
    BoundingBox, Cell, CellId, GroundTruth, Ridge, RidgeGeometry, RidgeId, Tessellation, VertexId,
};

use delaunay::{triangulate, Outcome, Triangulation, GHOST};

/// Sites drawn in the square `[0, window]²`.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteSample {
    pub points: Vec<Point2>,
    pub window: f64,
    pub seed: u64,
}

impl SiteSample {
    /// Wraps hand-picked sites; `window` is the side of their bounding square.
    pub fn from_points(points: Vec<Point2>) -> Self {
        let window = BoundingBox::of(points.iter().copied())
            .map_or(0.0, |b| (b.max.x.max(b.max.y)).max(0.0));
        SiteSample {
            points,
            window,
            seed: 0,
        }
    }

    /// Default jitter radius, `1e-9 · window`.
    pub fn default_jitter(&self) -> f64 {
        1e-9 * self.window
    }
}

/// `n` i.i.d. uniform points in the open square `(0, √n)²`: a unit-intensity
/// Poisson process conditioned on exactly `n` points.
pub fn sample_sites(n: usize, seed: u64) -> Result<SiteSample> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 sites, got {n}")));
    }
    let window = (n as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coord = || loop {
        let v: f64 = rng.gen::<f64>() * window;
        if v > 0.0 {
            return v;
        }
    };
    let points = (0..n).map(|_| Point2::new(coord(), coord())).collect();
    Ok(SiteSample {
        points,
        window,
        seed,
    })
}

fn site_tol(points: &[Point2]) -> f64 {
    DEGENERACY_REL_TOL * BoundingBox::of(points.iter().copied()).map_or(0.0, |b| b.diagonal())
}

/// Indices of sites taking part in a duplicate or ≥4-cocircular configuration.
fn degenerate_sites(points: &[Point2]) -> HashSet<usize> {
    let mut bad = HashSet::new();
    let Outcome::Triangulated(tr) = triangulate(points) else {
        return bad;
    };
    let tol = site_tol(points);
    for &(a, b) in &tr.duplicates {
        bad.insert(a);
        bad.insert(b);
    }
    for t in 0..tr.tris.len() {
        if !tr.alive[t] || tr.is_ghost(t) {
            continue;
        }
        let cc = tr.circumcenter(t);
        for i in 0..3 {
            let (u, w) = (tr.tris[t][(i + 1) % 3], tr.tris[t][(i + 2) % 3]);
            if u > w {
                continue; // each edge once
            }
            if points[u].distance(points[w]) <= tol {
                bad.insert(u);
                bad.insert(w);
            }
            let nb = tr.adj[t][i];
            if !tr.is_ghost(nb) && tr.circumcenter(nb).distance(cc) <= tol {
                bad.extend(tr.tris[t]);
                bad.extend(tr.tris[nb]);
            }
        }
    }
    bad
}

/// Moves only sites in duplicate or cocircular configurations, each by at most
/// `epsilon`, until none remain (or a round limit is hit). Returns the input
/// unchanged when nothing is degenerate or `epsilon == 0`.
pub fn jitter_degenerate(sites: &SiteSample, epsilon: f64) -> SiteSample {
    let mut out = sites.clone();
    if !(epsilon > 0.0) {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sites.seed ^ 0x4A17_7E2D_DE6E_4E7A);
    for _round in 0..16 {
        let mut bad: Vec<usize> = degenerate_sites(&out.points).into_iter().collect();
        if bad.is_empty() {
            break;
        }
        bad.sort_unstable();
        for i in bad {
            let theta = rng.gen::<f64>() * std::f64::consts::TAU;
            let r = epsilon * (0.5 + 0.5 * rng.gen::<f64>());
            let mut d = Point2::new(r * theta.cos(), r * theta.sin());
            let p = out.points[i];
            if out.window > 0.0 {
                // stay inside the window
                if !(0.0..=out.window).contains(&(p.x + d.x)) {
                    d.x = -d.x;
                }
                if !(0.0..=out.window).contains(&(p.y + d.y)) {
                    d.y = -d.y;
                }
            }
            out.points[i] = p + d;
        }
    }
    out
}

/// Exact Voronoi tessellation of the sites; cell `i` belongs to site `i`.
pub fn build_voronoi(sites: &SiteSample) -> Result<(Tessellation, GroundTruth)> {
    let points = &sites.points;
    if points.len() < 2 {
        return Err(Error::InvalidArgument("need at least 2 sites".into()));
    }
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::InvalidArgument(format!("site {i} is not finite")));
    }
    let tess = match triangulate(points) {
        Outcome::Collinear => build_collinear(points)?,
        Outcome::Triangulated(tr) => {
            if let Some(&(a, b)) = tr.duplicates.first() {
                return Err(Error::Construction(format!("sites {a} and {b} coincide")));
            }
            dualize(&tr)?
        }
    };
    let tol = site_tol(points);
    for (i, r) in tess.ridges().iter().enumerate() {
        if let RidgeGeometry::Finite(a, b) = r.geometry {
            if tess.vertex(a).distance(tess.vertex(b)) <= tol {
                return Err(Error::Construction(format!(
                    "cocircular sites around ridge {i} (cells {} and {})",
                    r.cells.0, r.cells.1
                )));
            }
        }
    }
    Ok((
        tess,
        GroundTruth {
            generators: points.clone(),
        },
    ))
}

fn dualize(tr: &Triangulation) -> Result<Tessellation> {
    let n = tr.points.len();
    let incident = tr.incident();
    let mut vertex_of_tri: HashMap<usize, VertexId> = HashMap::new();
    let mut vertices: Vec<Point2> = Vec::new();
    let mut ridge_of_edge: HashMap<(usize, usize), RidgeId> = HashMap::new();
    let mut ridges: Vec<Ridge> = Vec::new();
    let mut cells: Vec<Cell> = Vec::with_capacity(n);

    let mut vertex = |t: usize| {
        *vertex_of_tri.entry(t).or_insert_with(|| {
            vertices.push(tr.circumcenter(t));
            VertexId(vertices.len() - 1)
        })
    };

    for s in 0..n {
        let start = incident[s].ok_or_else(|| Error::Construction(format!("site {s} missing")))?;
        let mut fan = tr.fan(s, start);
        let m = fan.len();
        let bounded = !fan.iter().any(|&t| tr.is_ghost(t));
        if !bounded {
            // begin at the ghost that is followed by a real triangle
            let k = (0..m)
                .find(|&i| tr.is_ghost(fan[i]) && !tr.is_ghost(fan[(i + 1) % m]))
                .unwrap();
            fan.rotate_left(k);
        }
        let steps = if bounded { m } else { m - 1 };
        let mut cell_ridges = Vec::with_capacity(steps);
        for i in 0..steps {
            let (t1, t2) = (fan[i], fan[(i + 1) % m]);
            let pos = tr.tris[t1].iter().position(|&x| x == s).unwrap();
            let other = tr.tris[t1][(pos + 2) % 3];
            debug_assert_ne!(other, GHOST);
            let key = (s.min(other), s.max(other));
            if let Some(&r) = ridge_of_edge.get(&key) {
                cell_ridges.push(r);
                continue;
            }
            let geometry = match (tr.is_ghost(t1), tr.is_ghost(t2)) {
                (false, false) => RidgeGeometry::Finite(vertex(t1), vertex(t2)),
                (true, false) => {
                    // hull edge other → s, outside on its left
                    let dir = UnitVec2::normalize((tr.points[s] - tr.points[other]).perp())?;
                    RidgeGeometry::Ray {
                        vertex: vertex(t2),
                        dir,
                    }
                }
                (false, true) => {
                    // hull edge s → other
                    let dir = UnitVec2::normalize((tr.points[other] - tr.points[s]).perp())?;
                    RidgeGeometry::Ray {
                        vertex: vertex(t1),
                        dir,
                    }
                }
                (true, true) => unreachable!("two ghosts never share a real edge"),
            };
            let r = RidgeId(ridges.len());
            ridges.push(Ridge {
                cells: (CellId(s), CellId(other)),
                geometry,
            });
            ridge_of_edge.insert(key, r);
            cell_ridges.push(r);
        }
        cells.push(Cell {
            ridges: cell_ridges,
            bounded,
        });
    }
    Tessellation::from_parts(vertices, ridges, cells)
}

/// All sites on one line: parallel bisector lines, each stored as two opposite
/// rays from the midpoint of the two sites (a vertex of degree 2).
fn build_collinear(points: &[Point2]) -> Result<Tessellation> {
    let p0 = points[0];
    let far = points
        .iter()
        .copied()
        .max_by(|a, b| a.distance(p0).total_cmp(&b.distance(p0)))
        .unwrap();
    let d = UnitVec2::normalize(far - p0)
        .map_err(|_| Error::Construction("all sites coincide".into()))?;
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        d.as_vec()
            .dot(points[a] - p0)
            .total_cmp(&d.as_vec().dot(points[b] - p0))
    });
    let up = d.perp();
    let mut vertices = Vec::new();
    let mut ridges = Vec::new();
    // per cell: (ridges towards next site, ridges towards previous site)
    let mut parts: Vec<(Vec<RidgeId>, Vec<RidgeId>)> = vec![Default::default(); points.len()];
    for w in order.windows(2) {
        let (a, b) = (w[0], w[1]);
        if points[a] == points[b] {
            return Err(Error::Construction(format!("sites {a} and {b} coincide")));
        }
        let v = VertexId(vertices.len());
        vertices.push(points[a].midpoint(points[b]));
        let down_r = RidgeId(ridges.len());
        ridges.push(Ridge {
            cells: (CellId(a), CellId(b)),
            geometry: RidgeGeometry::Ray { vertex: v, dir: -up },
        });
        let up_r = RidgeId(ridges.len());
        ridges.push(Ridge {
            cells: (CellId(a), CellId(b)),
            geometry: RidgeGeometry::Ray { vertex: v, dir: up },
        });
        parts[a].0 = vec![down_r, up_r];
        parts[b].1 = vec![up_r, down_r];
    }
    let cells = parts
        .into_iter()
        .map(|(next, prev)| Cell {
            ridges: next.into_iter().chain(prev).collect(),
            bounded: false,
        })
        .collect();
    Tessellation::from_parts(vertices, ridges, cells)
}
