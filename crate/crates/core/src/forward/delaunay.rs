//! Incremental (Bowyer–Watson) Delaunay triangulation.
//!
//! The convex hull is closed off with "ghost" triangles that share a single
//! vertex at infinity, so points outside the current hull need no super
//! triangle. Orientation and in-circle tests use adaptive exact predicates.

use robust::{incircle, orient2d, Coord};

use crate::geom::Point2;

/// The vertex at infinity.
pub(crate) const GHOST: usize = usize::MAX;
const NONE: usize = usize::MAX;

#[inline]
fn coord(p: Point2) -> Coord<f64> {
    Coord { x: p.x, y: p.y }
}

pub(crate) fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    orient2d(coord(a), coord(b), coord(c))
}

pub(crate) enum Outcome {
    Triangulated(Triangulation),
    /// All input points lie on one line; no triangle exists.
    Collinear,
}

pub(crate) struct Triangulation {
    pub points: Vec<Point2>,
    /// Vertices in counter-clockwise order; a ghost triangle holds [`GHOST`].
    pub tris: Vec<[usize; 3]>,
    /// `adj[t][i]` is the triangle across the edge opposite `tris[t][i]`.
    pub adj: Vec<[usize; 3]>,
    pub alive: Vec<bool>,
    /// `(skipped, existing)` pairs of exactly coincident input points.
    pub duplicates: Vec<(usize, usize)>,
    free: Vec<usize>,
    stamp: Vec<u32>,
    epoch: u32,
    rng: u64,
    last: usize,
}

impl Triangulation {
    #[inline]
    pub fn is_ghost(&self, t: usize) -> bool {
        self.tris[t].contains(&GHOST)
    }

    #[inline]
    fn pt(&self, v: usize) -> Point2 {
        self.points[v]
    }

    fn next_rand(&mut self) -> usize {
        // xorshift64
        let mut x = self.rng;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.rng = x;
        x as usize
    }

    fn alloc(&mut self, tri: [usize; 3]) -> usize {
        if let Some(t) = self.free.pop() {
            self.tris[t] = tri;
            self.adj[t] = [NONE; 3];
            self.alive[t] = true;
            self.stamp[t] = 0;
            t
        } else {
            self.tris.push(tri);
            self.adj.push([NONE; 3]);
            self.alive.push(true);
            self.stamp.push(0);
            self.tris.len() - 1
        }
    }

    /// Does the circumdisk of `t` (an open half-plane for ghosts) contain `p`?
    fn in_conflict(&self, t: usize, p: Point2) -> bool {
        let v = self.tris[t];
        if let Some(g) = v.iter().position(|&x| x == GHOST) {
            let a = self.pt(v[(g + 1) % 3]);
            let b = self.pt(v[(g + 2) % 3]);
            let o = orient(a, b, p);
            if o > 0.0 {
                return true;
            }
            // on the hull line: conflicts only strictly inside the segment
            o == 0.0 && (p - a).dot(b - a) > 0.0 && (p - b).dot(a - b) > 0.0
        } else {
            let (a, b, c) = (self.pt(v[0]), self.pt(v[1]), self.pt(v[2]));
            incircle(coord(a), coord(b), coord(c), coord(p)) > 0.0
        }
    }

    /// Walks from the last created triangle towards `p`. Returns a triangle in
    /// conflict with `p`, or `Err(vertex)` if `p` coincides with a vertex.
    fn locate(&mut self, p: Point2) -> Result<usize, usize> {
        let mut t = self.last;
        if self.is_ghost(t) {
            let g = self.tris[t].iter().position(|&x| x == GHOST).unwrap();
            t = self.adj[t][g];
        }
        let max_steps = 4 * self.tris.len() + 16;
        for _ in 0..max_steps {
            if self.is_ghost(t) {
                return Ok(t);
            }
            let v = self.tris[t];
            let off = self.next_rand() % 3;
            let mut moved = false;
            for k in 0..3 {
                let i = (off + k) % 3;
                let a = self.pt(v[(i + 1) % 3]);
                let b = self.pt(v[(i + 2) % 3]);
                if orient(a, b, p) < 0.0 {
                    t = self.adj[t][i];
                    moved = true;
                    break;
                }
            }
            if !moved {
                if let Some(&d) = v.iter().find(|&&x| self.pt(x) == p) {
                    return Err(d);
                }
                return Ok(t);
            }
        }
        // walk failed to converge; fall back to a scan
        for t in 0..self.tris.len() {
            if self.alive[t] && self.in_conflict(t, p) {
                if !self.is_ghost(t) {
                    if let Some(&d) = self.tris[t].iter().find(|&&x| self.pt(x) == p) {
                        return Err(d);
                    }
                }
                return Ok(t);
            }
        }
        unreachable!("every point conflicts with some triangle")
    }

    fn insert(&mut self, pi: usize) -> Result<(), usize> {
        let p = self.pt(pi);
        let t0 = self.locate(p)?;
        self.epoch += 1;
        let epoch = self.epoch;

        let mut cavity = vec![t0];
        self.stamp[t0] = epoch;
        let mut stack = vec![t0];
        // (u, w, outside triangle, cavity triangle)
        let mut boundary: Vec<(usize, usize, usize, usize)> = Vec::new();
        while let Some(t) = stack.pop() {
            for i in 0..3 {
                let nb = self.adj[t][i];
                if self.stamp[nb] == epoch {
                    continue;
                }
                if self.in_conflict(nb, p) {
                    self.stamp[nb] = epoch;
                    cavity.push(nb);
                    stack.push(nb);
                } else {
                    let v = self.tris[t];
                    boundary.push((v[(i + 1) % 3], v[(i + 2) % 3], nb, t));
                }
            }
        }

        for &t in &cavity {
            self.alive[t] = false;
        }
        let mut created: Vec<(usize, usize, usize)> = Vec::with_capacity(boundary.len());
        for &(u, w, nb, old) in &boundary {
            let nt = self.alloc([u, w, pi]);
            self.adj[nt][2] = nb;
            let slot = self.adj[nb].iter().position(|&x| x == old).unwrap();
            self.adj[nb][slot] = nt;
            created.push((u, w, nt));
        }
        for &(u, w, nt) in &created {
            // edge (w, p) is shared with the new triangle starting at w,
            // edge (p, u) with the new triangle ending at u
            let across_w = created.iter().find(|c| c.0 == w).unwrap().2;
            let across_u = created.iter().find(|c| c.1 == u).unwrap().2;
            self.adj[nt][0] = across_w;
            self.adj[nt][1] = across_u;
        }
        self.free.extend(cavity);
        self.last = created
            .iter()
            .map(|c| c.2)
            .find(|&t| !self.is_ghost(t))
            .unwrap_or(created[0].2);
        Ok(())
    }

    /// Live triangles around vertex `s` in counter-clockwise order, starting at `start`.
    pub fn fan(&self, s: usize, start: usize) -> Vec<usize> {
        let mut out = vec![start];
        let mut t = start;
        loop {
            let i = self.tris[t].iter().position(|&x| x == s).unwrap();
            t = self.adj[t][(i + 1) % 3];
            if t == start {
                break;
            }
            out.push(t);
            debug_assert!(out.len() <= self.tris.len());
        }
        out
    }

    /// One live triangle incident to each point (`None` for skipped duplicates).
    pub fn incident(&self) -> Vec<Option<usize>> {
        let mut inc = vec![None; self.points.len()];
        for t in 0..self.tris.len() {
            if !self.alive[t] {
                continue;
            }
            for &v in &self.tris[t] {
                if v != GHOST && inc[v].is_none() {
                    inc[v] = Some(t);
                }
            }
        }
        inc
    }

    /// Circumcenter of a real triangle, computed relative to its first vertex.
    pub fn circumcenter(&self, t: usize) -> Point2 {
        let [a, b, c] = self.tris[t];
        circumcenter(self.pt(a), self.pt(b), self.pt(c))
    }
}

pub(crate) fn circumcenter(a: Point2, b: Point2, c: Point2) -> Point2 {
    let b = b - a;
    let c = c - a;
    let d = 2.0 * b.cross(c);
    let (bb, cc) = (b.norm_sq(), c.norm_sq());
    let ux = (c.y * bb - b.y * cc) / d;
    let uy = (b.x * cc - c.x * bb) / d;
    a + Point2::new(ux, uy)
}

/// Position of `(x, y)` along a Hilbert curve on a `2^16 × 2^16` grid.
fn hilbert_index(mut x: u32, mut y: u32) -> u64 {
    const N: u32 = 1 << 16;
    let mut d: u64 = 0;
    let mut s = N / 2;
    while s > 0 {
        let rx = u32::from(x & s > 0);
        let ry = u32::from(y & s > 0);
        d += u64::from(s) * u64::from(s) * u64::from((3 * rx) ^ ry);
        if ry == 0 {
            if rx == 1 {
                x = N - 1 - x;
                y = N - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        s /= 2;
    }
    d
}

fn spatial_order(points: &[Point2]) -> Vec<usize> {
    let bb = crate::tessellation::BoundingBox::of(points.iter().copied()).unwrap();
    let span = (bb.max.x - bb.min.x).max(bb.max.y - bb.min.y).max(f64::MIN_POSITIVE);
    let scale = f64::from((1u32 << 16) - 1) / span;
    let mut keyed: Vec<(u64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let gx = ((p.x - bb.min.x) * scale) as u32;
            let gy = ((p.y - bb.min.y) * scale) as u32;
            (hilbert_index(gx, gy), i)
        })
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, i)| i).collect()
}

/// Delaunay triangulation of `points`. Exact duplicates are skipped and reported.
pub(crate) fn triangulate(points: &[Point2]) -> Outcome {
    if points.len() < 3 {
        return Outcome::Collinear;
    }
    let order = spatial_order(points);
    let a = order[0];
    let Some(b) = order.iter().copied().find(|&i| points[i] != points[a]) else {
        return Outcome::Collinear;
    };
    let Some(c) = order
        .iter()
        .copied()
        .find(|&i| orient(points[a], points[b], points[i]) != 0.0)
    else {
        return Outcome::Collinear;
    };
    let (b, c) = if orient(points[a], points[b], points[c]) > 0.0 {
        (b, c)
    } else {
        (c, b)
    };

    let mut tr = Triangulation {
        points: points.to_vec(),
        tris: Vec::with_capacity(2 * points.len() + 8),
        adj: Vec::with_capacity(2 * points.len() + 8),
        alive: Vec::new(),
        duplicates: Vec::new(),
        free: Vec::new(),
        stamp: Vec::new(),
        epoch: 0,
        rng: 0x9E37_79B9_7F4A_7C15,
        last: 0,
    };
    let t0 = tr.alloc([a, b, c]);
    let g_ab = tr.alloc([b, a, GHOST]);
    let g_bc = tr.alloc([c, b, GHOST]);
    let g_ca = tr.alloc([a, c, GHOST]);
    tr.adj[t0] = [g_bc, g_ca, g_ab];
    tr.adj[g_ab] = [g_ca, g_bc, t0];
    tr.adj[g_bc] = [g_ab, g_ca, t0];
    tr.adj[g_ca] = [g_bc, g_ab, t0];
    tr.last = t0;

    for &i in &order {
        if i == a || i == b || i == c {
            continue;
        }
        if let Err(existing) = tr.insert(i) {
            tr.duplicates.push((i, existing));
        }
    }
    Outcome::Triangulated(tr)
}
