//! Breadth-first reflection of known generators into the rest of the diagram.
//!
//! Layer 0 is the solved patch. Layer `d + 1` holds every unresolved cell that
//! borders a cell of layer `≤ d`; its candidates are exactly those neighbors,
//! never a cell resolved within the same layer. The number of layers is the
//! depth `D(n)`, and every generator is at most `D(n)` reflections away from
//! the patch solve.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::{reflect_point, Point2};
use crate::solver::PatchSolution;
use crate::tessellation::{CellId, RidgeId, Tessellation};

/// Which single candidate to reflect when several resolved neighbors exist.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrontierPolicy {
    /// The neighbor resolved earliest.
    FirstAvailable,
    /// A uniform choice, reproducible from the seed.
    Random(u64),
    /// The neighbor across the longest shared ridge.
    LongestRidge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MergePolicy {
    /// Use the frontier policy's candidate alone.
    FirstWins,
    /// Average every candidate weighted by shared-ridge length.
    RidgeLengthWeightedMean,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Step {
    pub cell: CellId,
    pub source: CellId,
    pub ridge: RidgeId,
    pub layer: usize,
    /// Resolved neighbors available when the cell was reached.
    pub candidates: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PropagationTrace {
    pub order: Vec<Step>,
    /// Number of layers beyond the patch.
    pub depth: usize,
    /// Calls to [`reflect_into`].
    pub reflections: usize,
    /// Largest pairwise distance between candidate reflections of one cell
    /// (only measured under the weighted merge, which computes them all).
    pub max_candidate_spread: f64,
}

impl PropagationTrace {
    pub fn max_candidates(&self) -> usize {
        self.order.iter().map(|s| s.candidates).max().unwrap_or(0)
    }

    pub fn mean_candidates(&self) -> f64 {
        if self.order.is_empty() {
            return 0.0;
        }
        self.order.iter().map(|s| s.candidates as f64).sum::<f64>() / self.order.len() as f64
    }

    /// Cells that had more than one resolved neighbor.
    pub fn multi_candidate_cells(&self) -> usize {
        self.order.iter().filter(|s| s.candidates > 1).count()
    }
}

/// Mirror image of `g_source` across the line of `ridge`.
pub fn reflect_into(g_source: Point2, ridge: RidgeId, t: &Tessellation) -> Result<Point2> {
    let line = t.ridge_line(ridge)?;
    Ok(reflect_point(g_source, &line))
}

/// Reflects outward from the patch until every cell has a generator.
/// The result is indexed by [`CellId`].
pub fn reconstruct_all(
    t: &Tessellation,
    patch: &PatchSolution,
    frontier: FrontierPolicy,
    merge: MergePolicy,
) -> Result<(Vec<Point2>, PropagationTrace)> {
    let n = t.num_cells();
    let mut generators: Vec<Option<Point2>> = vec![None; n];
    // resolution rank; candidates must have rank < first rank of the current layer
    let mut rank: Vec<usize> = vec![usize::MAX; n];
    let mut next_rank = 0;
    let mut current: Vec<CellId> = Vec::new();
    for &(c, g) in &patch.generators {
        if generators[c.index()].is_none() {
            generators[c.index()] = Some(g);
            rank[c.index()] = next_rank;
            next_rank += 1;
            current.push(c);
        }
    }

    let mut rng = match frontier {
        FrontierPolicy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut trace = PropagationTrace::default();
    let mut queued = vec![false; n];
    let mut layer = 0;
    let mut candidates: Vec<(CellId, RidgeId, usize)> = Vec::new();

    while !current.is_empty() {
        let barrier = next_rank;
        let mut next: Vec<CellId> = Vec::new();
        for &c in &current {
            for nb in t.neighbors(c) {
                let i = nb.cell.index();
                if generators[i].is_none() && !queued[i] {
                    queued[i] = true;
                    next.push(nb.cell);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        layer += 1;
        for &c in &next {
            candidates.clear();
            for nb in t.neighbors(c) {
                let r = rank[nb.cell.index()];
                if r < barrier {
                    candidates.push((nb.cell, nb.ridge, r));
                }
            }
            debug_assert!(!candidates.is_empty());
            let (g, source, ridge) = match merge {
                MergePolicy::FirstWins => {
                    let pick = match frontier {
                        FrontierPolicy::FirstAvailable => {
                            *candidates.iter().min_by_key(|x| x.2).unwrap()
                        }
                        FrontierPolicy::Random(_) => {
                            let rng = rng.as_mut().unwrap();
                            candidates[rng.gen_range(0..candidates.len())]
                        }
                        FrontierPolicy::LongestRidge => *candidates
                            .iter()
                            .max_by(|a, b| t.ridge_length(a.1).total_cmp(&t.ridge_length(b.1)))
                            .unwrap(),
                    };
                    let src = generators[pick.0.index()].unwrap();
                    trace.reflections += 1;
                    (reflect_into(src, pick.1, t)?, pick.0, pick.1)
                }
                MergePolicy::RidgeLengthWeightedMean => {
                    let mut estimates = Vec::with_capacity(candidates.len());
                    for &(src, r, _) in &candidates {
                        let g = reflect_into(generators[src.index()].unwrap(), r, t)?;
                        trace.reflections += 1;
                        estimates.push((g, t.ridge_length(r), src, r));
                    }
                    for (i, a) in estimates.iter().enumerate() {
                        for b in &estimates[i + 1..] {
                            trace.max_candidate_spread =
                                trace.max_candidate_spread.max(a.0.distance(b.0));
                        }
                    }
                    let total: f64 = estimates.iter().map(|e| e.1).sum();
                    let mean = if total > 0.0 {
                        estimates
                            .iter()
                            .fold(Point2::ORIGIN, |acc, e| acc + e.0 * (e.1 / total))
                    } else {
                        let w = 1.0 / estimates.len() as f64;
                        estimates.iter().fold(Point2::ORIGIN, |acc, e| acc + e.0 * w)
                    };
                    let top = estimates
                        .iter()
                        .max_by(|a, b| a.1.total_cmp(&b.1))
                        .unwrap();
                    (mean, top.2, top.3)
                }
            };
            generators[c.index()] = Some(g);
            rank[c.index()] = next_rank;
            next_rank += 1;
            trace.order.push(Step {
                cell: c,
                source,
                ridge,
                layer,
                candidates: candidates.len(),
            });
        }
        current = next;
    }
    trace.depth = layer;

    let missing: Vec<CellId> = (0..n).filter(|&i| generators[i].is_none()).map(CellId).collect();
    if !missing.is_empty() {
        return Err(Error::UnreachableCells { cells: missing });
    }
    Ok((generators.into_iter().map(Option::unwrap).collect(), trace))
}
