//! Reference reconstructions for benchmarking.
//!
//! * Brute force: every anchor-eligible cell solves its own patch system and
//!   keeps only its own generator.
//! * C′ (angle rotation): at each corner `A` of a cell, the outer ridge that
//!   ends at `A` is extended into the cell. The generator lies on the isogonal
//!   line of that extension, i.e. the ray from `A` that makes the same angle
//!   with the far side that the extension makes with the near side. Rays from
//!   different corners are intersected pairwise and the intersections are
//!   averaged with inverse-sensitivity weights.
//!
//! Cells neither method can handle directly (hull cells for brute force, cells
//! with fewer than two usable corners for C′) are filled by reflection from an
//! estimated neighbor, so error metrics cover the full cell set.

use crate::anchor::eligible_cells;
use crate::error::{Error, Result};
use crate::geom::{intersect_lines, Point2, RidgeLine, UnitVec2, PARALLEL_TOL};
use crate::propagate::reflect_into;
use crate::solver::{assemble_patch, solve_patch};
use crate::tessellation::{CellId, Tessellation};

pub const DEFAULT_PERTURB_EPS: f64 = 1e-7;
/// Weight cap, as a multiple of the mean inverse sensitivity.
pub const WEIGHT_CAP_FACTOR: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BruteEstimate {
    pub cell: CellId,
    pub generator: Point2,
    /// Residual of the patch solve this estimate descends from.
    pub residual: f64,
    /// Solved as its own anchor (rather than filled by reflection).
    pub solved: bool,
}

/// Multi-source breadth-first fill: each missing cell is reflected from its
/// lowest-id known neighbor of the previous layer. Returns the source of each
/// filled cell.
fn fill_by_reflection(
    t: &Tessellation,
    estimates: &mut [Option<Point2>],
) -> Result<Vec<Option<CellId>>> {
    let n = t.num_cells();
    let mut source = vec![None; n];
    loop {
        let mut layer: Vec<(CellId, CellId, crate::tessellation::RidgeId)> = Vec::new();
        for c in t.cell_ids() {
            if estimates[c.index()].is_some() {
                continue;
            }
            let best = t
                .neighbors(c)
                .into_iter()
                .filter(|nb| estimates[nb.cell.index()].is_some())
                .min_by_key(|nb| nb.cell);
            if let Some(nb) = best {
                layer.push((c, nb.cell, nb.ridge));
            }
        }
        if layer.is_empty() {
            break;
        }
        let mut filled = Vec::with_capacity(layer.len());
        for &(c, src, r) in &layer {
            filled.push((c, reflect_into(estimates[src.index()].unwrap(), r, t)?));
            source[c.index()] = Some(src);
        }
        for (c, g) in filled {
            estimates[c.index()] = Some(g);
        }
    }
    let missing: Vec<CellId> = (0..n)
        .filter(|&i| estimates[i].is_none())
        .map(CellId)
        .collect();
    if !missing.is_empty() {
        return Err(Error::UnreachableCells { cells: missing });
    }
    Ok(source)
}

/// Every eligible cell as its own anchor; the rest by one reflection each.
pub fn brute_force_all(t: &Tessellation) -> Result<Vec<BruteEstimate>> {
    let n = t.num_cells();
    let mut estimates: Vec<Option<Point2>> = vec![None; n];
    let mut residuals = vec![f64::NAN; n];
    for c in eligible_cells(t) {
        let Ok(sol) = assemble_patch(t, c).and_then(|s| solve_patch(&s)) else {
            continue;
        };
        estimates[c.index()] = Some(sol.anchor().1);
        residuals[c.index()] = sol.residual_norm;
    }
    if estimates.iter().all(Option::is_none) {
        return Err(Error::NoAnchor);
    }
    let solved: Vec<bool> = estimates.iter().map(Option::is_some).collect();
    let sources = fill_by_reflection(t, &mut estimates)?;
    // a filled cell inherits the residual of the solve it descends from
    for c in 0..n {
        if !solved[c] {
            let mut s = sources[c].unwrap();
            while !solved[s.index()] {
                s = sources[s.index()].unwrap();
            }
            residuals[c] = residuals[s.index()];
        }
    }
    Ok((0..n)
        .map(|i| BruteEstimate {
            cell: CellId(i),
            generator: estimates[i].unwrap(),
            residual: residuals[i],
            solved: solved[i],
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CPrimeEstimate {
    pub cell: CellId,
    pub ray_pairs_used: usize,
    pub raw_intersections: Vec<Point2>,
    /// Nonnegative, summing to one.
    pub weights: Vec<f64>,
    /// Sensitivity of each intersection to a slope perturbation.
    pub deltas: Vec<f64>,
    pub perturb_eps: f64,
    pub estimate: Point2,
}

/// One generator-bearing ray per corner of `c` where three ridges meet.
pub fn generator_rays(t: &Tessellation, c: CellId) -> Vec<RidgeLine> {
    let cell = t.cell(c);
    let k = cell.ridges.len();
    let mut rays = Vec::new();
    for (i, corner) in t.cell_corners(c).into_iter().enumerate() {
        let Some(a) = corner else { continue };
        let (r1, r2) = (cell.ridges[i], cell.ridges[(i + 1) % k]);
        let outer: Vec<_> = t
            .vertex_ridges(a)
            .iter()
            .copied()
            .filter(|&r| r != r1 && r != r2)
            .collect();
        if outer.len() != 1 {
            continue;
        }
        let dir = |r| t.ridge_dir_from(r, a).and_then(|d| UnitVec2::normalize(d).ok());
        let (Some(s1), Some(s2), Some(o)) = (dir(r1), dir(r2), dir(outer[0])) else {
            continue;
        };
        let Ok(bisector) = UnitVec2::normalize(s1.as_vec() + s2.as_vec()) else {
            continue;
        };
        // extension of the outer ridge into the cell, mirrored across the
        // corner's angle bisector
        let z = (-o).as_vec();
        let b = bisector.as_vec();
        let g = b * (2.0 * b.dot(z)) - z;
        if let Ok(gd) = UnitVec2::normalize(g) {
            rays.push(RidgeLine::new(t.vertex(a), gd));
        }
    }
    rays
}

fn intersection_sensitivity(l1: &RidgeLine, l2: &RidgeLine, x0: Point2, eps: f64) -> f64 {
    if eps == 0.0 {
        return 0.0;
    }
    let mut delta: f64 = 0.0;
    for s in [eps, -eps] {
        let p1 = RidgeLine::new(l1.anchor, l1.dir.rotated(s));
        let p2 = RidgeLine::new(l2.anchor, l2.dir.rotated(s));
        for x in [intersect_lines(&p1, l2), intersect_lines(l1, &p2)] {
            match x {
                Ok(x) => delta = delta.max(x.distance(x0)),
                Err(_) => return f64::INFINITY,
            }
        }
    }
    delta
}

/// Inverse-sensitivity weights `w_i ∝ 1/δ_i`, capped at `WEIGHT_CAP_FACTOR`
/// times the mean; `δ_i = 0` takes the cap and all-zero deltas give uniform weights.
pub fn c_prime_weights(deltas: &[f64]) -> Vec<f64> {
    let inv: Vec<f64> = deltas
        .iter()
        .filter(|&&d| d > 0.0 && d.is_finite())
        .map(|d| 1.0 / d)
        .collect();
    if inv.is_empty() {
        if deltas.iter().all(|&d| d == 0.0) {
            return vec![1.0 / deltas.len() as f64; deltas.len()];
        }
    }
    let cap = if inv.is_empty() {
        1.0
    } else {
        WEIGHT_CAP_FACTOR * inv.iter().sum::<f64>() / inv.len() as f64
    };
    let raw: Vec<f64> = deltas
        .iter()
        .map(|&d| {
            if d == 0.0 {
                cap
            } else if d.is_finite() {
                (1.0 / d).min(cap)
            } else {
                0.0
            }
        })
        .collect();
    let total: f64 = raw.iter().sum();
    if total > 0.0 {
        raw.into_iter().map(|w| w / total).collect()
    } else {
        vec![1.0 / deltas.len() as f64; deltas.len()]
    }
}

pub fn c_prime_cell(t: &Tessellation, c: CellId, perturb_eps: f64) -> Result<CPrimeEstimate> {
    let rays = generator_rays(t, c);
    let mut raw_intersections = Vec::new();
    let mut deltas = Vec::new();
    for (i, a) in rays.iter().enumerate() {
        for b in &rays[i + 1..] {
            if a.dir.cross(b.dir).abs() <= PARALLEL_TOL {
                continue;
            }
            let x = intersect_lines(a, b)?;
            deltas.push(intersection_sensitivity(a, b, x, perturb_eps));
            raw_intersections.push(x);
        }
    }
    if raw_intersections.is_empty() {
        return Err(Error::Underdetermined { cell: c });
    }
    let weights = c_prime_weights(&deltas);
    let estimate = raw_intersections
        .iter()
        .zip(&weights)
        .fold(Point2::ORIGIN, |acc, (&x, &w)| acc + x * w);
    Ok(CPrimeEstimate {
        cell: c,
        ray_pairs_used: raw_intersections.len(),
        raw_intersections,
        weights,
        deltas,
        perturb_eps,
        estimate,
    })
}

/// C′ for every cell it applies to; the rest filled by reflection.
pub fn c_prime_all(t: &Tessellation, perturb_eps: f64) -> Result<Vec<Point2>> {
    let mut estimates: Vec<Option<Point2>> = t
        .cell_ids()
        .map(|c| c_prime_cell(t, c, perturb_eps).ok().map(|e| e.estimate))
        .collect();
    if estimates.iter().all(Option::is_none) {
        return Err(Error::Underdetermined { cell: CellId(0) });
    }
    fill_by_reflection(t, &mut estimates)?;
    Ok(estimates.into_iter().map(Option::unwrap).collect())
}
