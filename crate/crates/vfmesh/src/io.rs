//! Geometry loaders: whitespace segment text, OBJ polylines and faces, and
//! ASCII or binary STL.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use vfmesh_core::{GeometrySoup, Segment2, Triangle3, Vec2, Vec3};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryFormat {
    /// Pick by extension; `.obj` files with faces load as triangles.
    #[default]
    Auto,
    SegText,
    ObjLines,
    ObjTris,
    Stl,
}

impl FromStr for GeometryFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(Self::Auto),
            "seg-text" | "seg" => Ok(Self::SegText),
            "obj-lines" => Ok(Self::ObjLines),
            "obj-tris" => Ok(Self::ObjTris),
            "stl" => Ok(Self::Stl),
            _ => Err(format!("unknown geometry format '{s}'")),
        }
    }
}

/// A parsed soup and what was thrown away on the way.
#[derive(Clone, Debug)]
pub struct LoadedGeometry {
    pub soup: GeometrySoup,
    pub format: GeometryFormat,
    pub name: String,
    /// Degenerate elements dropped.
    pub dropped: usize,
}

pub fn load_geometry(path: &Path, format: GeometryFormat) -> Result<LoadedGeometry> {
    let bytes = std::fs::read(path).map_err(|source| Error::Read { path: path.to_path_buf(), source })?;
    let format = match format {
        GeometryFormat::Auto => detect_format(path, &bytes),
        f => f,
    };
    let soup = match format {
        GeometryFormat::Stl => parse_stl(&bytes, path)?,
        _ => {
            let text = std::str::from_utf8(&bytes).map_err(|_| parse_err(path, 0, "file is not UTF-8"))?;
            match format {
                GeometryFormat::SegText => parse_seg_text(text, path)?,
                GeometryFormat::ObjLines => parse_obj(text, path, false)?,
                _ => parse_obj(text, path, true)?,
            }
        }
    };
    let name = path.file_stem().map_or_else(|| "geometry".into(), |s| s.to_string_lossy().into_owned());
    Ok(LoadedGeometry { dropped: soup.dropped(), soup, format, name })
}

fn detect_format(path: &Path, bytes: &[u8]) -> GeometryFormat {
    let ext = path.extension().map(|e| e.to_string_lossy().to_ascii_lowercase());
    match ext.as_deref() {
        Some("stl") => GeometryFormat::Stl,
        Some("obj") => {
            let text = String::from_utf8_lossy(bytes);
            if text.lines().any(|l| l.trim_start().starts_with("f ")) {
                GeometryFormat::ObjTris
            } else {
                GeometryFormat::ObjLines
            }
        }
        _ => GeometryFormat::SegText,
    }
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), line, msg: msg.into() }
}

fn soup_err(path: &Path) -> impl FnOnce(vfmesh_core::SoupError) -> Error + '_ {
    move |source| Error::Geometry { path: PathBuf::from(path), source }
}

fn floats(line: &str, n: usize, path: &Path, lineno: usize) -> Result<Vec<f64>> {
    let v = line
        .split_whitespace()
        .map(f64::from_str)
        .collect::<std::result::Result<Vec<f64>, _>>()
        .map_err(|e| parse_err(path, lineno, e.to_string()))?;
    if v.len() != n {
        return Err(parse_err(path, lineno, format!("expected {n} numbers, found {}", v.len())));
    }
    Ok(v)
}

/// One segment `x1 y1 x2 y2` per line; `#` starts a comment.
pub fn parse_seg_text(text: &str, path: &Path) -> Result<GeometrySoup> {
    let mut segs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let v = floats(line, 4, path, i + 1)?;
        segs.push(Segment2::new(Vec2::new(v[0], v[1]), Vec2::new(v[2], v[3])));
    }
    GeometrySoup::from_segments(segs).map_err(soup_err(path))
}

/// OBJ vertex reference: 1-based, negative counts back from the end, and
/// anything after the first `/` is ignored.
fn obj_index(tok: &str, count: usize, path: &Path, lineno: usize) -> Result<usize> {
    let head = tok.split('/').next().unwrap_or("");
    let i: i64 = head.parse().map_err(|_| parse_err(path, lineno, format!("bad vertex reference '{tok}'")))?;
    let idx = if i > 0 { i - 1 } else { count as i64 + i };
    if i == 0 || idx < 0 || idx as usize >= count {
        return Err(parse_err(path, lineno, format!("vertex reference {i} out of range")));
    }
    Ok(idx as usize)
}

/// `v` and `l` records give 2D polylines (z ignored); `v` and `f` records
/// give triangles, with polygons fan-triangulated.
pub fn parse_obj(text: &str, path: &Path, triangles: bool) -> Result<GeometrySoup> {
    let mut verts: Vec<Vec3> = Vec::new();
    let mut segs = Vec::new();
    let mut tris = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("v") => {
                let c: Vec<f64> = toks
                    .take(3)
                    .map(f64::from_str)
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| parse_err(path, lineno, e.to_string()))?;
                if c.len() < 2 {
                    return Err(parse_err(path, lineno, "vertex needs at least two coordinates"));
                }
                verts.push(Vec3::new(c[0], c[1], c.get(2).copied().unwrap_or(0.0)));
            }
            Some("l") => {
                let idx = toks.map(|t| obj_index(t, verts.len(), path, lineno)).collect::<Result<Vec<_>>>()?;
                for w in idx.windows(2) {
                    segs.push(Segment2::new(verts[w[0]].xy(), verts[w[1]].xy()));
                }
            }
            Some("f") => {
                let idx = toks.map(|t| obj_index(t, verts.len(), path, lineno)).collect::<Result<Vec<_>>>()?;
                if idx.len() < 3 {
                    return Err(parse_err(path, lineno, "face needs at least three vertices"));
                }
                for k in 1..idx.len() - 1 {
                    tris.push(Triangle3::new(verts[idx[0]], verts[idx[k]], verts[idx[k + 1]]));
                }
            }
            _ => {}
        }
    }
    if !segs.is_empty() && !tris.is_empty() {
        return Err(Error::MixedDimensions { path: path.to_path_buf() });
    }
    if triangles || !tris.is_empty() {
        GeometrySoup::from_triangles(tris).map_err(soup_err(path))
    } else {
        GeometrySoup::from_segments(segs).map_err(soup_err(path))
    }
}

/// Binary when the size matches the triangle count in the header,
/// ASCII otherwise.
pub fn parse_stl(bytes: &[u8], path: &Path) -> Result<GeometrySoup> {
    if bytes.len() >= 84 {
        let n = u32::from_le_bytes([bytes[80], bytes[81], bytes[82], bytes[83]]) as usize;
        if 84 + 50 * n == bytes.len() {
            return parse_stl_binary(bytes, n, path);
        }
    }
    let text = std::str::from_utf8(bytes).map_err(|_| parse_err(path, 0, "neither binary nor ASCII STL"))?;
    let mut pts = Vec::new();
    let mut tris = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix("vertex") {
            let v = floats(rest, 3, path, i + 1)?;
            pts.push(Vec3::new(v[0], v[1], v[2]));
        } else if line.starts_with("endfacet") {
            if pts.len() != 3 {
                return Err(parse_err(path, i + 1, format!("facet has {} vertices", pts.len())));
            }
            tris.push(Triangle3::new(pts[0], pts[1], pts[2]));
            pts.clear();
        }
    }
    GeometrySoup::from_triangles(tris).map_err(soup_err(path))
}

fn parse_stl_binary(bytes: &[u8], n: usize, path: &Path) -> Result<GeometrySoup> {
    let f = |o: usize| f32::from_le_bytes([bytes[o], bytes[o + 1], bytes[o + 2], bytes[o + 3]]) as f64;
    let tris = (0..n)
        .map(|t| {
            // Skip the 12-byte normal.
            let base = 84 + 50 * t + 12;
            let v = |k: usize| Vec3::new(f(base + 12 * k), f(base + 12 * k + 4), f(base + 12 * k + 8));
            Triangle3::new(v(0), v(1), v(2))
        })
        .collect();
    GeometrySoup::from_triangles(tris).map_err(soup_err(path))
}
