//! Planar primitives: points, unit directions, lines, and reflections across them.
//!
//! Everything here is plain `f64` arithmetic. The two thresholds below are the
//! only tolerances used for degeneracy decisions anywhere in the crate.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ridges shorter than this fraction of the diagram diameter are degenerate.
pub const DEGENERACY_REL_TOL: f64 = 1e-12;

/// Two unit directions are parallel when `|cross| <` this value.
pub const PARALLEL_TOL: f64 = 1e-10;

const UNIT_TOL: f64 = 1e-12;

/// A point (or displacement) in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    /// Like [`Point2::new`] but rejects NaN and infinite coordinates.
    pub fn checked(x: f64, y: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() {
            Ok(Point2 { x, y })
        } else {
            Err(Error::InvalidArgument(format!(
                "non-finite coordinate ({x}, {y})"
            )))
        }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn distance(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    #[inline]
    pub fn midpoint(self, o: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + o.x), 0.5 * (self.y + o.y))
    }

    /// Rotated a quarter turn counter-clockwise.
    #[inline]
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    pub fn rotated(self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs())
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Point2 {
    #[inline]
    fn add_assign(&mut self, o: Point2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Div<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn div(self, s: f64) -> Point2 {
        Point2::new(self.x / s, self.y / s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    #[inline]
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// A direction of unit length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitVec2 {
    x: f64,
    y: f64,
}

impl UnitVec2 {
    /// Accepts `(x, y)` only if it is already unit length (within 1e-12).
    pub fn new(x: f64, y: f64) -> Result<Self> {
        let n2 = x * x + y * y;
        if !n2.is_finite() || (n2 - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidArgument(format!(
                "direction ({x}, {y}) is not unit length"
            )));
        }
        Ok(UnitVec2 { x, y })
    }

    /// Normalizes `v`; fails for a zero or non-finite vector.
    pub fn normalize(v: Point2) -> Result<Self> {
        let n = v.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "cannot normalize vector {v}"
            )));
        }
        Ok(UnitVec2 {
            x: v.x / n,
            y: v.y / n,
        })
    }

    /// Angle in radians, measured counter-clockwise from +x.
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        UnitVec2 { x: c, y: s }
    }

    #[inline]
    pub fn x(self) -> f64 {
        self.x
    }

    #[inline]
    pub fn y(self) -> f64 {
        self.y
    }

    #[inline]
    pub fn as_vec(self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    #[inline]
    pub fn perp(self) -> UnitVec2 {
        UnitVec2 {
            x: -self.y,
            y: self.x,
        }
    }

    pub fn rotated(self, angle: f64) -> UnitVec2 {
        let v = self.as_vec().rotated(angle);
        // rotation preserves length up to rounding; renormalize anyway
        let n = v.norm();
        UnitVec2 {
            x: v.x / n,
            y: v.y / n,
        }
    }

    #[inline]
    pub fn cross(self, o: UnitVec2) -> f64 {
        self.as_vec().cross(o.as_vec())
    }

    #[inline]
    pub fn dot(self, o: UnitVec2) -> f64 {
        self.as_vec().dot(o.as_vec())
    }

    /// `|sin|` of the angle between the two directions is below [`PARALLEL_TOL`].
    pub fn is_parallel_to(self, o: UnitVec2) -> bool {
        self.cross(o).abs() < PARALLEL_TOL
    }
}

impl Neg for UnitVec2 {
    type Output = UnitVec2;
    fn neg(self) -> UnitVec2 {
        UnitVec2 {
            x: -self.x,
            y: -self.y,
        }
    }
}

/// The 2×2 symmetric orthogonal matrix `2·u·uᵀ − I` reflecting across a line
/// through the origin with direction `u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reflector2 {
    pub m00: f64,
    pub m01: f64,
    pub m10: f64,
    pub m11: f64,
}

impl Reflector2 {
    #[inline]
    pub fn apply(&self, p: Point2) -> Point2 {
        Point2::new(
            self.m00 * p.x + self.m01 * p.y,
            self.m10 * p.x + self.m11 * p.y,
        )
    }

    pub fn det(&self) -> f64 {
        self.m00 * self.m11 - self.m01 * self.m10
    }

    pub fn compose(&self, o: &Reflector2) -> [[f64; 2]; 2] {
        [
            [
                self.m00 * o.m00 + self.m01 * o.m10,
                self.m00 * o.m01 + self.m01 * o.m11,
            ],
            [
                self.m10 * o.m00 + self.m11 * o.m10,
                self.m10 * o.m01 + self.m11 * o.m11,
            ],
        ]
    }

    /// `(I − R)·c`, the constant term of a mirror equality.
    #[inline]
    pub fn complement_apply(&self, c: Point2) -> Point2 {
        c - self.apply(c)
    }

    pub fn rows(&self) -> [[f64; 2]; 2] {
        [[self.m00, self.m01], [self.m10, self.m11]]
    }
}

/// Builds `2·dir·dirᵀ − I`.
pub fn reflector_from_dir(dir: UnitVec2) -> Reflector2 {
    let (ux, uy) = (dir.x, dir.y);
    let off = 2.0 * ux * uy;
    Reflector2 {
        m00: 2.0 * ux * ux - 1.0,
        m01: off,
        m10: off,
        m11: 2.0 * uy * uy - 1.0,
    }
}

/// An infinite line through `anchor` with direction `dir`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RidgeLine {
    pub anchor: Point2,
    pub dir: UnitVec2,
}

impl RidgeLine {
    pub fn new(anchor: Point2, dir: UnitVec2) -> Self {
        RidgeLine { anchor, dir }
    }

    /// Signed distance; positive on the left of `dir`.
    pub fn signed_distance(&self, p: Point2) -> f64 {
        self.dir.as_vec().cross(p - self.anchor)
    }

    pub fn distance(&self, p: Point2) -> f64 {
        self.signed_distance(p).abs()
    }

    pub fn reflector(&self) -> Reflector2 {
        reflector_from_dir(self.dir)
    }

    pub fn reflect(&self, p: Point2) -> Point2 {
        reflect_point(p, self)
    }

    /// `(normal, offset)` with `normal·x = offset` on the line, the normal's sign
    /// fixed so that its first nonzero component is positive.
    pub fn canonical(&self) -> (Point2, f64) {
        let mut n = self.dir.perp().as_vec();
        if n.x < 0.0 || (n.x == 0.0 && n.y < 0.0) {
            n = -n;
        }
        (n, n.dot(self.anchor))
    }

    /// Same line (as a point set) within `tol`.
    pub fn same_line(&self, other: &RidgeLine, tol: f64) -> bool {
        self.dir.is_parallel_to(other.dir) && self.distance(other.anchor) <= tol
    }

    pub fn translated(&self, t: Point2) -> RidgeLine {
        RidgeLine {
            anchor: self.anchor + t,
            dir: self.dir,
        }
    }
}

/// Mirror image of `p` across `line`:
/// `p' = 2·a + 2·(vᵀ(p − a) / vᵀv)·v − p` with `a` on the line and `v` its direction.
pub fn reflect_point(p: Point2, line: &RidgeLine) -> Point2 {
    // Evaluated as p − 2·(n·(p − a))/(n·n)·n with the signed distance and the
    // correction for the direction's rounded unit length carried in
    // double-double, so the result is close to correctly rounded even when
    // |p − a| is much larger than |p|. The textbook form 2a + 2proj − p
    // cancels badly in that case.
    let n = line.dir.perp().as_vec();
    let (dx, ex) = two_diff(p.x, line.anchor.x);
    let (dy, ey) = two_diff(p.y, line.anchor.y);
    let (s1, e1) = two_prod(n.x, dx);
    let (s2, e2) = two_prod(n.y, dy);
    let (s, e3) = two_sum(s1, s2);
    let (dist, dist_lo) = fast_two_sum(s, e1 + e2 + e3 + n.x.mul_add(ex, n.y * ey));

    // n·n = 1 + delta with |delta| of a few ulps; 1/(n·n) ≈ 1 − delta
    let (xx, exx) = two_prod(n.x, n.x);
    let (yy, eyy) = two_prod(n.y, n.y);
    let (q, eq) = two_sum(xx, yy);
    let delta = (q - 1.0) + (eq + exx + eyy);

    let h = -2.0 * dist;
    let h_lo = -2.0 * dist_lo + 2.0 * dist * delta;
    let coord = |pc: f64, nc: f64| {
        let (m, em) = two_prod(h, nc);
        let (t, et) = two_sum(pc, m);
        t + (et + em + h_lo * nc)
    };
    Point2::new(coord(p.x, n.x), coord(p.y, n.y))
}

/// `a + b = s + e` exactly.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// As [`two_sum`] when `|a| ≥ |b|`.
fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_diff(a: f64, b: f64) -> (f64, f64) {
    two_sum(a, -b)
}

/// `a·b = p + e` exactly.
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// `(I − R)·anchor` for the reflector `R` of `line`, i.e. `2·(n·a)·n`.
pub fn mirror_offset(line: &RidgeLine) -> Point2 {
    let n = line.dir.perp().as_vec();
    n * (2.0 * n.dot(line.anchor))
}

/// Line through `a` and `b`, anchored at `a`. Fails when the points are closer
/// than `1e-12·max(1, |a|∞, |b|∞)`.
pub fn line_from_two_points(a: Point2, b: Point2) -> Result<RidgeLine> {
    let scale = 1f64.max(a.max_abs()).max(b.max_abs());
    line_from_two_points_with_tol(a, b, DEGENERACY_REL_TOL * scale)
}

/// As [`line_from_two_points`] with an explicit absolute length threshold.
pub fn line_from_two_points_with_tol(a: Point2, b: Point2, tol: f64) -> Result<RidgeLine> {
    let d = b - a;
    let len = d.norm();
    if !(len > tol) {
        return Err(Error::DegenerateRidge {
            distance: len,
            threshold: tol,
        });
    }
    Ok(RidgeLine {
        anchor: a,
        dir: UnitVec2 {
            x: d.x / len,
            y: d.y / len,
        },
    })
}

/// The unique common point of two non-parallel lines.
pub fn intersect_lines(l1: &RidgeLine, l2: &RidgeLine) -> Result<Point2> {
    let d1 = l1.dir.as_vec();
    let d2 = l2.dir.as_vec();
    let s = d1.cross(d2);
    if s.abs() < PARALLEL_TOL {
        return Err(Error::NoIntersection { sine: s.abs() });
    }
    let t = (l2.anchor - l1.anchor).cross(d2) / s;
    Ok(l1.anchor + d1 * t)
}
