//! Choosing the anchor cell for the patch solve.
//!
//! Hard requirements (eligibility): the cell is bounded, none of its ridges is
//! a ray, at least two of its ridges are non-parallel, and at least one pair
//! of consecutive neighbors shares a ridge. The soft criteria are folded into
//! a composite score
//!
//! ```text
//! 0.4·min_edge_ratio + 0.3·(1 − centrality) + 0.2·degree_band + 0.1·angle_spread
//! ```
//!
//! where `degree_band` is 1 for degree 4..=7 and 0.5 otherwise, and
//! `angle_spread` is the smallest `|sin|` between two ridge directions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geom::{Point2, UnitVec2};
use crate::tessellation::{BoundingBox, CellId, Tessellation};

pub const W_EDGE_RATIO: f64 = 0.4;
pub const W_CENTRALITY: f64 = 0.3;
pub const W_DEGREE: f64 = 0.2;
pub const W_ANGLE: f64 = 0.1;

#[derive(Clone, Debug, PartialEq)]
pub struct AnchorScore {
    pub cell: CellId,
    pub eligible: bool,
    /// Why the cell is not eligible, if it is not.
    pub rejection: Option<&'static str>,
    pub degree: usize,
    /// Shortest ridge over longest ridge.
    pub min_edge_ratio: f64,
    /// `1 − min |sin|` over ridge-direction pairs.
    pub max_pairwise_parallelism: f64,
    /// Centroid distance to the [`ScoreFrame`] center over its half diagonal, in `[0, 1]`.
    pub centrality: f64,
    pub composite: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnchorPolicy {
    BestScore,
    RandomEligible(u64),
}

pub fn degree_band(degree: usize) -> f64 {
    if (4..=7).contains(&degree) {
        1.0
    } else {
        0.5
    }
}

pub fn composite_score(min_edge_ratio: f64, centrality: f64, degree: usize, angle_spread: f64) -> f64 {
    W_EDGE_RATIO * min_edge_ratio
        + W_CENTRALITY * (1.0 - centrality)
        + W_DEGREE * degree_band(degree)
        + W_ANGLE * angle_spread
}

/// A cell is on the outer hull when it is unbounded or borders a ray.
pub fn is_hull_cell(t: &Tessellation, c: CellId) -> bool {
    let cell = t.cell(c);
    !cell.bounded || cell.ridges.iter().any(|&r| !t.ridge(r).is_finite())
}

/// Reference frame for centrality: the bounding box of the interior cells'
/// centroids. Voronoi vertices are a poor choice since hull circumcenters can
/// lie arbitrarily far outside the site window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreFrame {
    pub center: Point2,
    pub half_diagonal: f64,
}

impl ScoreFrame {
    pub fn new(t: &Tessellation) -> Option<Self> {
        let interior = t.cell_ids().filter(|&c| !is_hull_cell(t, c));
        let bb = BoundingBox::of(interior.filter_map(|c| t.cell_centroid(c)))?;
        (bb.diagonal() > 0.0).then(|| ScoreFrame {
            center: bb.center(),
            half_diagonal: 0.5 * bb.diagonal(),
        })
    }
}

/// Why `c` cannot anchor a patch, or `None` if it can.
pub fn rejection_reason(t: &Tessellation, c: CellId) -> Option<&'static str> {
    let cell = t.cell(c);
    if !cell.bounded {
        Some("unbounded cell")
    } else if is_hull_cell(t, c) {
        Some("cell borders a ray")
    } else if cell.ridges.iter().any(|&r| t.ridge(r).other(c).is_none()) {
        Some("missing neighbor")
    } else if !t.has_non_parallel_ridges(c) {
        Some("all ridges parallel")
    } else if t.ring_pairs(c).is_empty() {
        Some("no ring pair")
    } else {
        None
    }
}

pub fn score_cell(t: &Tessellation, c: CellId) -> AnchorScore {
    score_in_frame(t, c, ScoreFrame::new(t).as_ref())
}

/// Scores of every cell, in id order.
pub fn score_cells(t: &Tessellation) -> Vec<AnchorScore> {
    let frame = ScoreFrame::new(t);
    t.cell_ids().map(|c| score_in_frame(t, c, frame.as_ref())).collect()
}

fn score_in_frame(t: &Tessellation, c: CellId, frame: Option<&ScoreFrame>) -> AnchorScore {
    let cell = t.cell(c);
    let degree = cell.ridges.len();

    let lengths: Vec<f64> = cell.ridges.iter().map(|&r| t.ridge_length(r)).collect();
    let longest = lengths.iter().copied().fold(0.0, f64::max);
    let shortest = lengths.iter().copied().fold(f64::INFINITY, f64::min);
    let min_edge_ratio = if longest > 0.0 { shortest / longest } else { 0.0 };

    let dirs: Vec<UnitVec2> = cell
        .ridges
        .iter()
        .filter_map(|&r| t.ridge_line(r).ok().map(|l| l.dir))
        .collect();
    let mut min_sin = f64::INFINITY;
    for (i, a) in dirs.iter().enumerate() {
        for b in &dirs[i + 1..] {
            min_sin = min_sin.min(a.cross(*b).abs());
        }
    }
    let angle_spread = if min_sin.is_finite() { min_sin.min(1.0) } else { 0.0 };

    let centrality = match (t.cell_centroid(c), frame) {
        (Some(p), Some(f)) => (p.distance(f.center) / f.half_diagonal).clamp(0.0, 1.0),
        _ => 1.0,
    };

    let rejection = rejection_reason(t, c);
    AnchorScore {
        cell: c,
        eligible: rejection.is_none(),
        rejection,
        degree,
        min_edge_ratio,
        max_pairwise_parallelism: 1.0 - angle_spread,
        centrality,
        composite: composite_score(min_edge_ratio, centrality, degree, angle_spread),
    }
}

pub fn eligible_cells(t: &Tessellation) -> Vec<CellId> {
    t.cell_ids().filter(|&c| rejection_reason(t, c).is_none()).collect()
}

pub fn select_anchor(t: &Tessellation, policy: AnchorPolicy) -> Result<CellId> {
    match policy {
        AnchorPolicy::BestScore => {
            let mut best: Option<AnchorScore> = None;
            for s in score_cells(t) {
                if s.eligible && best.as_ref().map_or(true, |b| s.composite > b.composite) {
                    best = Some(s);
                }
            }
            best.map(|s| s.cell).ok_or(Error::NoAnchor)
        }
        AnchorPolicy::RandomEligible(seed) => {
            let cells = eligible_cells(t);
            if cells.is_empty() {
                return Err(Error::NoAnchor);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(cells[rng.gen_range(0..cells.len())])
        }
    }
}
