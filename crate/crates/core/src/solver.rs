//! The anchor-patch system `M·z = b`.
//!
//! Unknowns are `z = [g_0, g_1, …, g_k]`: the anchor's generator followed by
//! its `k` neighbors' in counter-clockwise order. Each ridge separating two
//! patch cells gives a mirror equality
//!
//! ```text
//! g_target − R·g_source = (I − R)·c,     R = 2·u·uᵀ − I
//! ```
//!
//! where `u` is the unit direction of the ridge itself and `c` the midpoint of
//! its vertices (the vertex, for a ray). Both are read off the tessellation;
//! neither depends on the unknown generators. Anchor–neighbor ridges give `k`
//! equations and ring ridges between consecutive neighbors up to `k` more, so
//! in generic position `M` is `4k × 2(k+1)`.

use nalgebra::{DMatrix, DVector};

use crate::anchor::rejection_reason;
use crate::error::{Error, Result};
use crate::geom::{mirror_offset, reflector_from_dir, Point2, RidgeLine};
use crate::tessellation::{CellId, RidgeId, Tessellation};

/// Smallest-singular-value cutoff relative to `‖M‖₂`.
pub const RANK_REL_TOL: f64 = 1e-8;
/// Residual cutoff relative to `max(1, ‖b‖)` above which the input cannot be
/// a Voronoi tessellation.
pub const CONSISTENCY_REL_TOL: f64 = 1e-6;

/// `g[target] − R·g[source] = (I − R)·c` for the reflection across `line`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MirrorEquation {
    pub target: usize,
    pub source: usize,
    pub ridge: Option<RidgeId>,
    pub line: RidgeLine,
}

#[derive(Clone, Debug)]
pub struct PatchSystem {
    pub k: usize,
    /// Column block `i` holds the generator of `column_map[i]`; block 0 is the anchor.
    pub column_map: Vec<CellId>,
    pub equations: Vec<MirrorEquation>,
    pub m: DMatrix<f64>,
    pub b: DVector<f64>,
}

#[derive(Clone, Debug)]
pub struct PatchSolution {
    pub generators: Vec<(CellId, Point2)>,
    /// `‖M·z − b‖₂` at the returned `z`.
    pub residual_norm: f64,
    /// `σ_max / σ_min` of `M`.
    pub condition_estimate: f64,
    pub b_norm: f64,
}

impl PatchSolution {
    pub fn consistency_threshold(&self) -> f64 {
        CONSISTENCY_REL_TOL * self.b_norm.max(1.0)
    }

    /// False when the residual is too large for any generator set to explain.
    pub fn is_consistent(&self) -> bool {
        self.residual_norm <= self.consistency_threshold()
    }

    pub fn anchor(&self) -> (CellId, Point2) {
        self.generators[0]
    }
}

impl PatchSystem {
    pub fn from_equations(column_map: Vec<CellId>, equations: Vec<MirrorEquation>) -> Self {
        let cols = 2 * column_map.len();
        let rows = 2 * equations.len();
        let mut m = DMatrix::zeros(rows, cols);
        let mut b = DVector::zeros(rows);
        for (e, eq) in equations.iter().enumerate() {
            let r = reflector_from_dir(eq.line.dir);
            let rhs = mirror_offset(&eq.line);
            let (row, t, s) = (2 * e, 2 * eq.target, 2 * eq.source);
            m[(row, t)] = 1.0;
            m[(row + 1, t + 1)] = 1.0;
            let rr = r.rows();
            for i in 0..2 {
                for j in 0..2 {
                    m[(row + i, s + j)] -= rr[i][j];
                }
            }
            b[row] = rhs.x;
            b[row + 1] = rhs.y;
        }
        PatchSystem {
            k: column_map.len().saturating_sub(1),
            column_map,
            equations,
            m,
            b,
        }
    }

    pub fn anchor(&self) -> CellId {
        self.column_map[0]
    }

    pub fn rows(&self) -> usize {
        self.m.nrows()
    }

    /// Number of ring (neighbor–neighbor) equations.
    pub fn ring_equations(&self) -> usize {
        self.equations.iter().filter(|e| e.source != 0).count()
    }

    /// Singular values, largest first.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self.m.clone().singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Stacks the generators in column order.
    pub fn stack(&self, generators: impl Fn(CellId) -> Point2) -> DVector<f64> {
        let mut z = DVector::zeros(self.m.ncols());
        for (i, &c) in self.column_map.iter().enumerate() {
            let p = generators(c);
            z[2 * i] = p.x;
            z[2 * i + 1] = p.y;
        }
        z
    }

    pub fn residual(&self, z: &DVector<f64>) -> f64 {
        (&self.m * z - &self.b).norm()
    }
}

/// Builds the patch system around `anchor`, which must be anchor-eligible.
pub fn assemble_patch(t: &Tessellation, anchor: CellId) -> Result<PatchSystem> {
    if let Some(reason) = rejection_reason(t, anchor) {
        return Err(Error::IneligibleAnchor {
            cell: anchor,
            reason: reason.to_string(),
        });
    }
    let nbrs = t.neighbors(anchor);
    let mut column_map = Vec::with_capacity(nbrs.len() + 1);
    column_map.push(anchor);
    column_map.extend(nbrs.iter().map(|n| n.cell));
    let block = |c: CellId| column_map.iter().position(|&x| x == c);

    let mut equations = Vec::with_capacity(2 * nbrs.len());
    for (j, n) in nbrs.iter().enumerate() {
        equations.push(MirrorEquation {
            target: j + 1,
            source: 0,
            ridge: Some(n.ridge),
            line: t.ridge_line(n.ridge)?,
        });
    }
    for pair in t.ring_pairs(anchor) {
        if let (Some(x), Some(y)) = (block(pair.first), block(pair.second)) {
            equations.push(MirrorEquation {
                target: x,
                source: y,
                ridge: Some(pair.ridge),
                line: pair.line,
            });
        }
    }
    Ok(PatchSystem::from_equations(column_map, equations))
}

/// Least-squares solution by Householder QR, after an SVD rank check.
pub fn solve_patch(sys: &PatchSystem) -> Result<PatchSolution> {
    let n = sys.m.ncols();
    if n == 0 || sys.m.nrows() < n {
        return Err(Error::SingularSystem {
            sigma_min: 0.0,
            null_direction: (0.0, 0.0),
        });
    }
    let svd = sys.m.clone().svd(false, true);
    let sv = &svd.singular_values;
    let (imin, sigma_min) = sv
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let sigma_max = sv.iter().copied().fold(0.0, f64::max);
    if !(sigma_min > RANK_REL_TOL * sigma_max) {
        let v_t = svd.v_t.as_ref().expect("requested V");
        let row = v_t.row(imin);
        // report the null direction of the block that moves most
        let best = (0..n / 2)
            .max_by(|&a, &b| {
                let na = row[2 * a].hypot(row[2 * a + 1]);
                let nb = row[2 * b].hypot(row[2 * b + 1]);
                na.total_cmp(&nb)
            })
            .unwrap();
        let (dx, dy) = (row[2 * best], row[2 * best + 1]);
        let len = dx.hypot(dy).max(f64::MIN_POSITIVE);
        let (dx, dy) = if dx < 0.0 || (dx == 0.0 && dy < 0.0) {
            (-dx / len, -dy / len)
        } else {
            (dx / len, dy / len)
        };
        return Err(Error::SingularSystem {
            sigma_min,
            null_direction: (dx, dy),
        });
    }

    let qr = sys.m.clone().qr();
    let qtb = qr.q().transpose() * &sys.b;
    let z = qr
        .r()
        .solve_upper_triangular(&qtb)
        .ok_or(Error::SingularSystem {
            sigma_min,
            null_direction: (0.0, 0.0),
        })?;

    let generators = sys
        .column_map
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, Point2::new(z[2 * i], z[2 * i + 1])))
        .collect();
    Ok(PatchSolution {
        generators,
        residual_norm: sys.residual(&z),
        condition_estimate: sigma_max / sigma_min,
        b_norm: sys.b.norm(),
    })
}
