//! JSON tessellation files.
//!
//! ```text
//! { "version": 1,
//!   "vertices": [[x, y], ...],
//!   "ridges": [{"cells": [i, j], "finite": [v0, v1]} | {"cells": [i, j], "ray": {"v": v0, "dir": [dx, dy]}}, ...],
//!   "cells": [{"ridges": [...], "bounded": true}, ...],
//!   "generators": [[x, y], ...] }      // optional
//! ```
//!
//! Reals are written with 17 significant digits so a save/load cycle is bit-exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use super::{Cell, CellId, GroundTruth, Ridge, RidgeGeometry, RidgeId, Tessellation, VertexId};
use crate::error::{Error, Result};
use crate::geom::{Point2, UnitVec2};

pub const FORMAT_VERSION: u64 = 1;

/// `{:.16e}`: 17 significant digits, always round-trips.
pub(crate) fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_pair(out: &mut String, p: Point2) {
    let _ = write!(out, "[{}, {}]", fmt_real(p.x), fmt_real(p.y));
}

fn write_list<T>(out: &mut String, key: &str, items: &[T], mut item: impl FnMut(&mut String, &T)) {
    let _ = write!(out, "  \"{key}\": [");
    for (i, it) in items.iter().enumerate() {
        out.push_str(if i == 0 { "\n    " } else { ",\n    " });
        item(out, it);
    }
    out.push_str(if items.is_empty() { "]" } else { "\n  ]" });
}

/// A standalone generators document; `extra` entries are raw JSON values
/// written ahead of the list.
pub fn generators_to_json(points: &[Point2], extra: &[(&str, String)]) -> String {
    let mut out = format!("{{\n  \"version\": {FORMAT_VERSION},\n");
    for (k, v) in extra {
        let _ = writeln!(out, "  \"{k}\": {v},");
    }
    write_list(&mut out, "generators", points, |o, p| fmt_pair(o, *p));
    out.push_str("\n}\n");
    out
}

pub fn to_json_string(t: &Tessellation, gt: Option<&GroundTruth>) -> String {
    let mut out = format!("{{\n  \"version\": {FORMAT_VERSION},\n");
    write_list(&mut out, "vertices", t.vertices(), |o, p| fmt_pair(o, *p));
    out.push_str(",\n");
    write_list(&mut out, "ridges", t.ridges(), |o, r| {
        let _ = write!(o, "{{\"cells\": [{}, {}], ", r.cells.0, r.cells.1);
        match r.geometry {
            RidgeGeometry::Finite(a, b) => {
                let _ = write!(o, "\"finite\": [{a}, {b}]}}");
            }
            RidgeGeometry::Ray { vertex, dir } => {
                let _ = write!(o, "\"ray\": {{\"v\": {vertex}, \"dir\": ");
                fmt_pair(o, dir.as_vec());
                o.push_str("}}");
            }
        }
    });
    out.push_str(",\n");
    write_list(&mut out, "cells", t.cells(), |o, c| {
        o.push_str("{\"ridges\": [");
        for (i, r) in c.ridges.iter().enumerate() {
            if i > 0 {
                o.push_str(", ");
            }
            let _ = write!(o, "{r}");
        }
        let _ = write!(o, "], \"bounded\": {}}}", c.bounded);
    });
    if let Some(gt) = gt {
        out.push_str(",\n");
        write_list(&mut out, "generators", &gt.generators, |o, p| fmt_pair(o, *p));
    }
    out.push_str("\n}\n");
    out
}

#[derive(Deserialize)]
struct VersionProbe {
    version: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRay {
    v: usize,
    dir: [f64; 2],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRidge {
    cells: [usize; 2],
    finite: Option<[usize; 2]>,
    ray: Option<RawRay>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCell {
    ridges: Vec<usize>,
    bounded: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    #[allow(dead_code)]
    version: u64,
    vertices: Vec<[f64; 2]>,
    ridges: Vec<RawRidge>,
    cells: Vec<RawCell>,
    generators: Option<Vec<[f64; 2]>>,
}

fn parse_err(context: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        context: context.into(),
        message: message.into(),
    }
}

fn point(context: &str, [x, y]: [f64; 2]) -> Result<Point2> {
    Point2::checked(x, y).map_err(|e| parse_err(context, e.to_string()))
}

pub fn from_json_str(text: &str) -> Result<(Tessellation, Option<GroundTruth>)> {
    let probe: VersionProbe =
        serde_json::from_str(text).map_err(|e| parse_err("document", e.to_string()))?;
    match probe.version {
        Some(FORMAT_VERSION) => {}
        Some(found) => {
            return Err(Error::UnsupportedVersion {
                found,
                expected: FORMAT_VERSION,
            })
        }
        None => return Err(parse_err("version", "missing field `version`")),
    }
    let raw: RawFile =
        serde_json::from_str(text).map_err(|e| parse_err("document", e.to_string()))?;

    let vertices = raw
        .vertices
        .iter()
        .enumerate()
        .map(|(i, &p)| point(&format!("vertices[{i}]"), p))
        .collect::<Result<Vec<_>>>()?;

    let mut ridges = Vec::with_capacity(raw.ridges.len());
    for (i, r) in raw.ridges.into_iter().enumerate() {
        let ctx = format!("ridges[{i}]");
        let nv = vertices.len();
        let check_v = |v: usize| {
            if v < nv {
                Ok(VertexId(v))
            } else {
                Err(parse_err(&ctx, format!("vertex index {v} out of range")))
            }
        };
        let geometry = match (r.finite, r.ray) {
            (Some([a, b]), None) => RidgeGeometry::Finite(check_v(a)?, check_v(b)?),
            (None, Some(ray)) => {
                let d = point(&ctx, ray.dir)?;
                let dir = UnitVec2::new(d.x, d.y)
                    .or_else(|_| UnitVec2::normalize(d))
                    .map_err(|e| parse_err(&ctx, e.to_string()))?;
                RidgeGeometry::Ray {
                    vertex: check_v(ray.v)?,
                    dir,
                }
            }
            _ => {
                return Err(parse_err(
                    ctx,
                    "exactly one of `finite` or `ray` is required",
                ))
            }
        };
        for c in r.cells {
            if c >= raw.cells.len() {
                return Err(parse_err(&ctx, format!("cell index {c} out of range")));
            }
        }
        ridges.push(Ridge {
            cells: (CellId(r.cells[0]), CellId(r.cells[1])),
            geometry,
        });
    }

    let mut cells = Vec::with_capacity(raw.cells.len());
    for (i, c) in raw.cells.into_iter().enumerate() {
        if let Some(&r) = c.ridges.iter().find(|&&r| r >= ridges.len()) {
            return Err(parse_err(
                format!("cells[{i}].ridges"),
                format!("ridge index {r} out of range"),
            ));
        }
        cells.push(Cell {
            ridges: c.ridges.into_iter().map(RidgeId).collect(),
            bounded: c.bounded,
        });
    }

    let gt = match raw.generators {
        Some(g) => {
            if g.len() != cells.len() {
                return Err(parse_err(
                    "generators",
                    format!("{} generators for {} cells", g.len(), cells.len()),
                ));
            }
            let generators = g
                .into_iter()
                .enumerate()
                .map(|(i, p)| point(&format!("generators[{i}]"), p))
                .collect::<Result<Vec<_>>>()?;
            Some(GroundTruth { generators })
        }
        None => None,
    };

    let t = Tessellation::from_parts(vertices, ridges, cells)?;
    Ok((t, gt))
}

pub fn save(t: &Tessellation, gt: Option<&GroundTruth>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_json_string(t, gt)).map_err(|e| Error::io(path, e))
}

pub fn load(path: impl AsRef<Path>) -> Result<(Tessellation, Option<GroundTruth>)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    from_json_str(&text)
}
