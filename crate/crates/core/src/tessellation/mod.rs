//! The Voronoi tessellation the reconstructor consumes: vertices, ridges, and
//! cells with counter-clockwise ridge order.
//!
//! Unbounded ridges are rays (a vertex plus an outward direction). They are
//! never clipped to a box, since box edges are not perpendicular bisectors.

mod io;

use std::collections::HashMap;
use std::fmt;

pub use io::{from_json_str, generators_to_json, load, save, to_json_string, FORMAT_VERSION};

use crate::error::{Error, Result};
use crate::geom::{
    line_from_two_points_with_tol, Point2, RidgeLine, UnitVec2, DEGENERACY_REL_TOL,
    PARALLEL_TOL,
};

macro_rules! index_type {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub usize);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt(f)
            }
        }
    };
}

index_type!(
    /// Index of a cell; equals the index of its generator in [`GroundTruth`].
    CellId
);
index_type!(RidgeId);
index_type!(VertexId);

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RidgeGeometry {
    Finite(VertexId, VertexId),
    Ray { vertex: VertexId, dir: UnitVec2 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ridge {
    pub cells: (CellId, CellId),
    pub geometry: RidgeGeometry,
}

impl Ridge {
    pub fn is_finite(&self) -> bool {
        matches!(self.geometry, RidgeGeometry::Finite(..))
    }

    /// The cell on the other side from `c`, if `c` owns this ridge.
    pub fn other(&self, c: CellId) -> Option<CellId> {
        if self.cells.0 == c {
            Some(self.cells.1)
        } else if self.cells.1 == c {
            Some(self.cells.0)
        } else {
            None
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        let (a, b) = match self.geometry {
            RidgeGeometry::Finite(a, b) => (a, Some(b)),
            RidgeGeometry::Ray { vertex, .. } => (vertex, None),
        };
        std::iter::once(a).chain(b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    /// Counter-clockwise. For an unbounded cell the two rays come first and last.
    pub ridges: Vec<RidgeId>,
    pub bounded: bool,
}

/// The true generators, indexed by [`CellId`]. Only used to measure error.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GroundTruth {
    pub generators: Vec<Point2>,
}

/// Ordered neighbor of a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Neighbor {
    pub cell: CellId,
    pub ridge: RidgeId,
}

/// Consecutive anchor neighbors that share a ridge of their own.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RingPair {
    pub first: CellId,
    pub second: CellId,
    pub ridge: RidgeId,
    pub line: RidgeLine,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundingBox {
    pub min: Point2,
    pub max: Point2,
}

impl BoundingBox {
    pub fn of(points: impl IntoIterator<Item = Point2>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut bb = BoundingBox {
            min: first,
            max: first,
        };
        for p in it {
            bb.min.x = bb.min.x.min(p.x);
            bb.min.y = bb.min.y.min(p.y);
            bb.max.x = bb.max.x.max(p.x);
            bb.max.y = bb.max.y.max(p.y);
        }
        Some(bb)
    }

    pub fn diagonal(&self) -> f64 {
        self.max.distance(self.min)
    }

    pub fn center(&self) -> Point2 {
        self.min.midpoint(self.max)
    }

    /// Distance travelled from `p` (inside the box) along `dir` before leaving it.
    pub fn exit_distance(&self, p: Point2, dir: UnitVec2) -> f64 {
        let axis = |pos: f64, d: f64, lo: f64, hi: f64| {
            if d > 0.0 {
                (hi - pos) / d
            } else if d < 0.0 {
                (lo - pos) / d
            } else {
                f64::INFINITY
            }
        };
        let t = axis(p.x, dir.x(), self.min.x, self.max.x)
            .min(axis(p.y, dir.y(), self.min.y, self.max.y));
        t.max(0.0)
    }
}

/// A planar Voronoi tessellation. Immutable once built.
#[derive(Clone, Debug)]
pub struct Tessellation {
    vertices: Vec<Point2>,
    ridges: Vec<Ridge>,
    cells: Vec<Cell>,
    // derived
    pair_ridge: HashMap<(CellId, CellId), RidgeId>,
    vertex_ridges: Vec<Vec<RidgeId>>,
    bbox: Option<BoundingBox>,
}

impl PartialEq for Tessellation {
    fn eq(&self, o: &Self) -> bool {
        self.vertices == o.vertices && self.ridges == o.ridges && self.cells == o.cells
    }
}

fn pair_key(a: CellId, b: CellId) -> (CellId, CellId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Tessellation {
    /// Assembles a tessellation. Only index ranges and finiteness are checked
    /// here; use [`Tessellation::validate`] for the structural invariants.
    pub fn from_parts(vertices: Vec<Point2>, ridges: Vec<Ridge>, cells: Vec<Cell>) -> Result<Self> {
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument(format!("vertex {i} is not finite")));
        }
        let nv = vertices.len();
        let nc = cells.len();
        let mut vertex_ridges = vec![Vec::new(); nv];
        let mut pair_ridge = HashMap::with_capacity(ridges.len());
        for (i, r) in ridges.iter().enumerate() {
            let rid = RidgeId(i);
            if r.cells.0.index() >= nc || r.cells.1.index() >= nc {
                return Err(Error::BadRidge { ridge: rid });
            }
            for v in r.vertices() {
                if v.index() >= nv {
                    return Err(Error::BadRidge { ridge: rid });
                }
                vertex_ridges[v.index()].push(rid);
            }
            pair_ridge.entry(pair_key(r.cells.0, r.cells.1)).or_insert(rid);
        }
        for (ci, c) in cells.iter().enumerate() {
            if let Some(r) = c.ridges.iter().find(|r| r.index() >= ridges.len()) {
                return Err(Error::InvalidArgument(format!(
                    "cell {ci} references ridge {r} out of range"
                )));
            }
        }
        let bbox = BoundingBox::of(vertices.iter().copied());
        Ok(Tessellation {
            vertices,
            ridges,
            cells,
            pair_ridge,
            vertex_ridges,
            bbox,
        })
    }

    pub fn into_parts(self) -> (Vec<Point2>, Vec<Ridge>, Vec<Cell>) {
        (self.vertices, self.ridges, self.cells)
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn ridges(&self) -> &[Ridge] {
        &self.ridges
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell(&self, c: CellId) -> &Cell {
        &self.cells[c.index()]
    }

    pub fn ridge(&self, r: RidgeId) -> &Ridge {
        &self.ridges[r.index()]
    }

    pub fn vertex(&self, v: VertexId) -> Point2 {
        self.vertices[v.index()]
    }

    pub fn cell_ids(&self) -> impl Iterator<Item = CellId> {
        (0..self.cells.len()).map(CellId)
    }

    /// Ridges incident to a vertex.
    pub fn vertex_ridges(&self, v: VertexId) -> &[RidgeId] {
        &self.vertex_ridges[v.index()]
    }

    /// Some ridge shared by `a` and `b`.
    pub fn ridge_between(&self, a: CellId, b: CellId) -> Option<RidgeId> {
        self.pair_ridge.get(&pair_key(a, b)).copied()
    }

    pub fn bounding_box(&self) -> Option<BoundingBox> {
        self.bbox
    }

    /// Bounding-box diagonal of the vertices.
    pub fn diameter(&self) -> f64 {
        self.bbox.map_or(0.0, |b| b.diagonal())
    }

    /// Absolute length below which a finite ridge is degenerate.
    pub fn degeneracy_tol(&self) -> f64 {
        DEGENERACY_REL_TOL * self.diameter()
    }

    /// The line carrying ridge `r`. Finite ridges are anchored at the midpoint
    /// of their vertices, rays at their vertex.
    pub fn ridge_line(&self, r: RidgeId) -> Result<RidgeLine> {
        match self.ridge(r).geometry {
            RidgeGeometry::Finite(a, b) => {
                let (pa, pb) = (self.vertex(a), self.vertex(b));
                let line = line_from_two_points_with_tol(pa, pb, self.degeneracy_tol())?;
                Ok(RidgeLine::new(pa.midpoint(pb), line.dir))
            }
            RidgeGeometry::Ray { vertex, dir } => Ok(RidgeLine::new(self.vertex(vertex), dir)),
        }
    }

    /// Length of a finite ridge; a ray counts only up to the vertex bounding box.
    pub fn ridge_length(&self, r: RidgeId) -> f64 {
        match self.ridge(r).geometry {
            RidgeGeometry::Finite(a, b) => self.vertex(a).distance(self.vertex(b)),
            RidgeGeometry::Ray { vertex, dir } => self
                .bbox
                .map_or(0.0, |bb| bb.exit_distance(self.vertex(vertex), dir)),
        }
    }

    /// Direction of ridge `r` pointing away from vertex `v` (which must be on it).
    pub fn ridge_dir_from(&self, r: RidgeId, v: VertexId) -> Option<Point2> {
        match self.ridge(r).geometry {
            RidgeGeometry::Finite(a, b) if a == v => Some(self.vertex(b) - self.vertex(a)),
            RidgeGeometry::Finite(a, b) if b == v => Some(self.vertex(a) - self.vertex(b)),
            RidgeGeometry::Ray { vertex, dir } if vertex == v => Some(dir.as_vec()),
            _ => None,
        }
    }

    /// Neighbors of `c` in counter-clockwise ridge order.
    pub fn neighbors(&self, c: CellId) -> Vec<Neighbor> {
        self.cell(c)
            .ridges
            .iter()
            .filter_map(|&r| {
                self.ridge(r)
                    .other(c)
                    .map(|cell| Neighbor { cell, ridge: r })
            })
            .collect()
    }

    /// Vertex shared by two ridges, if any.
    pub fn shared_vertex(&self, r1: RidgeId, r2: RidgeId) -> Option<VertexId> {
        let b: Vec<VertexId> = self.ridge(r2).vertices().collect();
        self.ridge(r1).vertices().find(|v| b.contains(v))
    }

    /// Cell polygon corners: the vertex shared by each consecutive ridge pair,
    /// cyclically for bounded cells.
    pub fn cell_corners(&self, c: CellId) -> Vec<Option<VertexId>> {
        let cell = self.cell(c);
        let k = cell.ridges.len();
        let pairs = if cell.bounded { k } else { k.saturating_sub(1) };
        (0..pairs)
            .map(|i| self.shared_vertex(cell.ridges[i], cell.ridges[(i + 1) % k]))
            .collect()
    }

    /// Consecutive (cyclic) neighbor pairs of `anchor` that share a ridge, with
    /// that ridge's line. Pairs without a shared ridge are omitted.
    pub fn ring_pairs(&self, anchor: CellId) -> Vec<RingPair> {
        let nbrs = self.neighbors(anchor);
        let k = nbrs.len();
        let count = match k {
            0 | 1 => 0,
            2 => 1,
            _ => k,
        };
        (0..count)
            .filter_map(|i| {
                let (x, y) = (nbrs[i].cell, nbrs[(i + 1) % k].cell);
                if x == y || x == anchor || y == anchor {
                    return None;
                }
                let ridge = self.ridge_between(x, y)?;
                let line = self.ridge_line(ridge).ok()?;
                Some(RingPair {
                    first: x,
                    second: y,
                    ridge,
                    line,
                })
            })
            .collect()
    }

    /// Mean of a cell's polygon corners (finite corners only for unbounded cells).
    pub fn cell_centroid(&self, c: CellId) -> Option<Point2> {
        let pts: Vec<Point2> = self
            .cell_corners(c)
            .into_iter()
            .flatten()
            .map(|v| self.vertex(v))
            .collect();
        if pts.is_empty() {
            return None;
        }
        let sum = pts.iter().fold(Point2::ORIGIN, |acc, &p| acc + p);
        Some(sum / pts.len() as f64)
    }

    /// Every structural invariant that does not hold, one message per offence.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let tol = self.degeneracy_tol();

        for (i, r) in self.ridges.iter().enumerate() {
            let rid = RidgeId(i);
            if r.cells.0 == r.cells.1 {
                out.push(format!("ridge {i} separates cell {} from itself", r.cells.0));
            }
            for c in [r.cells.0, r.cells.1] {
                if !self.cell(c).ridges.contains(&rid) {
                    out.push(format!("asymmetric adjacency at ridge {i}"));
                    break;
                }
            }
            match r.geometry {
                RidgeGeometry::Finite(a, b) => {
                    if a == b || self.vertex(a).distance(self.vertex(b)) <= tol {
                        out.push(format!("degenerate ridge {i}"));
                    }
                }
                RidgeGeometry::Ray { dir, .. } => {
                    if (dir.as_vec().norm() - 1.0).abs() > 1e-12 {
                        out.push(format!("ray ridge {i} has non-unit direction"));
                    }
                }
            }
        }

        for (ci, cell) in self.cells.iter().enumerate() {
            let c = CellId(ci);
            for &r in &cell.ridges {
                if self.ridge(r).other(c).is_none() {
                    out.push(format!("cell {ci} lists ridge {r} which does not border it"));
                }
            }
            if cell.bounded {
                self.check_bounded_cell(c, &mut out);
            } else {
                let k = cell.ridges.len();
                let rays: Vec<usize> = (0..k)
                    .filter(|&i| !self.ridge(cell.ridges[i]).is_finite())
                    .collect();
                if rays.len() != 2 || rays[0] != 0 || rays[1] != k - 1 {
                    out.push(format!(
                        "unbounded cell {ci} must have exactly two rays, first and last"
                    ));
                }
            }
        }

        for (vi, rs) in self.vertex_ridges.iter().enumerate() {
            match rs.len() {
                0 => out.push(format!("orphan vertex {vi}")),
                3 => {}
                d => out.push(format!(
                    "vertex {vi} has {d} incident ridges (generic position expects 3)"
                )),
            }
        }
        out
    }

    fn check_bounded_cell(&self, c: CellId, out: &mut Vec<String>) {
        let cell = self.cell(c);
        if cell.ridges.len() < 3 {
            out.push(format!("bounded cell {c} has fewer than 3 ridges"));
            return;
        }
        if cell.ridges.iter().any(|&r| !self.ridge(r).is_finite()) {
            out.push(format!("bounded cell {c} has a ray ridge"));
            return;
        }
        let corners = self.cell_corners(c);
        if corners.iter().any(Option::is_none) {
            out.push(format!("bounded cell {c} is not a closed polygon"));
            return;
        }
        // each ridge must join its two neighbouring corners
        let k = corners.len();
        for i in 0..k {
            let prev = corners[(i + k - 1) % k].unwrap();
            let next = corners[i].unwrap();
            let r = self.ridge(cell.ridges[i]);
            let vs: Vec<VertexId> = r.vertices().collect();
            if prev == next || !vs.contains(&prev) || !vs.contains(&next) {
                out.push(format!("bounded cell {c} is not a closed polygon"));
                return;
            }
        }
        let pts: Vec<Point2> = corners.iter().map(|v| self.vertex(v.unwrap())).collect();
        let (mut pos, mut neg) = (0, 0);
        for i in 0..k {
            let e1 = pts[(i + 1) % k] - pts[i];
            let e2 = pts[(i + 2) % k] - pts[(i + 1) % k];
            let x = e1.cross(e2);
            if x > 0.0 {
                pos += 1;
            } else if x < 0.0 {
                neg += 1;
            }
        }
        if pos > 0 && neg > 0 {
            out.push(format!("bounded cell {c} is not convex"));
        } else if neg > 0 {
            out.push(format!("bounded cell {c} is ordered clockwise"));
        }
    }

    /// True if some pair of this cell's ridges is non-parallel.
    pub fn has_non_parallel_ridges(&self, c: CellId) -> bool {
        let dirs: Vec<UnitVec2> = self
            .cell(c)
            .ridges
            .iter()
            .filter_map(|&r| self.ridge_line(r).ok().map(|l| l.dir))
            .collect();
        dirs.iter()
            .enumerate()
            .any(|(i, a)| dirs[i + 1..].iter().any(|b| a.cross(*b).abs() > PARALLEL_TOL))
    }

    /// Rotate by `angle` about the origin, then translate by `shift`.
    pub fn rigid_transform(&self, angle: f64, shift: Point2) -> Tessellation {
        let vertices = self
            .vertices
            .iter()
            .map(|p| p.rotated(angle) + shift)
            .collect();
        let ridges = self
            .ridges
            .iter()
            .map(|r| Ridge {
                cells: r.cells,
                geometry: match r.geometry {
                    RidgeGeometry::Ray { vertex, dir } => RidgeGeometry::Ray {
                        vertex,
                        dir: dir.rotated(angle),
                    },
                    g => g,
                },
            })
            .collect();
        Tessellation::from_parts(vertices, ridges, self.cells.clone())
            .expect("rigid transform preserves indices")
    }
}

impl GroundTruth {
    pub fn get(&self, c: CellId) -> Point2 {
        self.generators[c.index()]
    }

    pub fn rigid_transform(&self, angle: f64, shift: Point2) -> GroundTruth {
        GroundTruth {
            generators: self
                .generators
                .iter()
                .map(|p| p.rotated(angle) + shift)
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_cell() -> Tessellation {
        // a unit square cell 0 surrounded by four outer cells, no rays; enough
        // structure to exercise polygon checks
        let vertices = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        let ridges = (0..4)
            .map(|i| Ridge {
                cells: (CellId(0), CellId(i + 1)),
                geometry: RidgeGeometry::Finite(VertexId(i), VertexId((i + 1) % 4)),
            })
            .collect();
        let mut cells = vec![Cell {
            ridges: (0..4).map(RidgeId).collect(),
            bounded: true,
        }];
        for i in 0..4 {
            cells.push(Cell {
                ridges: vec![RidgeId(i)],
                bounded: false,
            });
        }
        Tessellation::from_parts(vertices, ridges, cells).unwrap()
    }

    #[test]
    fn square_cell_polygon_is_convex_ccw() {
        let t = square_cell();
        let v = t.validate();
        assert!(!v.iter().any(|m| m.contains("cell 0 ")), "{v:?}");
        assert_eq!(t.neighbors(CellId(0)).len(), 4);
        assert_eq!(t.cell_centroid(CellId(0)), Some(Point2::new(0.5, 0.5)));
    }

    #[test]
    fn reversed_cell_reported_clockwise() {
        let (v, r, mut c) = square_cell().into_parts();
        c[0].ridges.reverse();
        let t = Tessellation::from_parts(v, r, c).unwrap();
        assert!(t
            .validate()
            .contains(&"bounded cell 0 is ordered clockwise".to_string()));
    }

    #[test]
    fn out_of_range_indices_rejected() {
        let (v, mut r, c) = square_cell().into_parts();
        r[0].cells.1 = CellId(99);
        assert!(matches!(
            Tessellation::from_parts(v, r, c),
            Err(Error::BadRidge { ridge: RidgeId(0) })
        ));
    }

    #[test]
    fn ray_length_clipped_to_box() {
        let bb = BoundingBox {
            min: Point2::new(0.0, 0.0),
            max: Point2::new(2.0, 4.0),
        };
        let d = UnitVec2::new(0.0, 1.0).unwrap();
        assert_eq!(bb.exit_distance(Point2::new(1.0, 1.0), d), 3.0);
        assert_eq!(bb.exit_distance(Point2::new(1.0, 4.0), d), 0.0);
    }
}
