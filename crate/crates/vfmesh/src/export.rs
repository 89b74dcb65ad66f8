//! Text exporters. Every writer returns a `String` so that output is
//! byte-identical across runs and easy to compare against golden files.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use vfmesh_core::mesher::{CubicalMesh, Pinch, PinchKind, RepairReport, Resolution, REFINE};
use vfmesh_core::persistence::{BettiCurve, PersistenceDiagram, PersistencePair};
use vfmesh_core::theory::{LevelResult, RegimeReport, WedgeReport};
use vfmesh_core::{Dim, SiteKind, VolumeFractionField};

use crate::error::{Error, Result};

/// Rounds away floating-point noise (to 12 decimals) so `1 - 0.8` prints
/// as `0.2`. Infinite values print as `inf`.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

pub fn fmt_num(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{}", round12(x))
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Write { path: dir.to_path_buf(), source })?;
    }
    std::fs::write(path, contents).map_err(|source| Error::Write { path: path.to_path_buf(), source })
}

/// One row per site: `kind,i,j[,k],axis,value`, where `i,j,k` index the
/// site's lowest vertex and `axis` is the edge direction or face normal.
pub fn field_csv(field: &VolumeFractionField) -> String {
    let dim = field.grid().dim();
    let mut out = String::from(if dim == Dim::Two { "kind,i,j,axis,value\n" } else { "kind,i,j,k,axis,value\n" });
    for (site, v) in field.iter() {
        let (kind, axis) = match site.kind(dim) {
            SiteKind::Vertex => ("vertex", String::new()),
            SiteKind::Edge { axis } => ("edge", axis.to_string()),
            SiteKind::Face { normal } => ("face", normal.to_string()),
            SiteKind::Cell => ("cell", String::new()),
        };
        let c = site.0;
        let _ = match dim {
            Dim::Two => writeln!(out, "{kind},{},{},{axis},{}", c[0] / 2, c[1] / 2, fmt_num(v)),
            Dim::Three => writeln!(out, "{kind},{},{},{},{axis},{}", c[0] / 2, c[1] / 2, c[2] / 2, fmt_num(v)),
        };
    }
    out
}

/// Pairs with positive persistence, as `dim,birth,death` in filtration
/// values `1 - vf`.
pub fn diagram_csv(d: &PersistenceDiagram) -> String {
    let mut out = String::from("dim,birth,death\n");
    for p in d.nonzero_pairs() {
        let _ = writeln!(out, "{},{},{}", p.dim, fmt_num(p.birth()), fmt_num(p.death()));
    }
    out
}

pub fn betti_csv(curve: &BettiCurve) -> String {
    let three = curve.dim == Dim::Three;
    let mut out = String::from(if three { "vf,B0,B1,B2\n" } else { "vf,B0,B1\n" });
    for (vf, b) in &curve.points {
        let _ = if three {
            writeln!(out, "{},{},{},{}", fmt_num(*vf), b[0], b[1], b[2])
        } else {
            writeln!(out, "{},{},{}", fmt_num(*vf), b[0], b[1])
        };
    }
    out
}

/// Birth-death scatter on `[0, 1]^2`; essential classes sit on a dashed
/// line above the square. Dimension 0 uses circles, 1 squares, 2 diamonds.
pub fn diagram_svg(d: &PersistenceDiagram, size: u32) -> String {
    let s = size as f64;
    let m = 0.1 * s;
    let w = s - 2.0 * m;
    let x = |v: f64| m + w * v.clamp(0.0, 1.0);
    let y = |v: f64| if v.is_finite() { s - m - w * v.clamp(0.0, 1.0) } else { 0.5 * m };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<path d="M{} {} H{} V{} M{} {} L{} {}" stroke="black" fill="none"/>"#,
        m,
        m,
        m,
        s - m,
        m,
        s - m,
        s - m,
        m
    );
    let _ = writeln!(out, r#"<path d="M{} {} H{}" stroke="gray" stroke-dasharray="4 3"/>"#, m, 0.5 * m, s - m);
    let r = (0.012 * s).max(2.0);
    for p in d.nonzero_pairs() {
        let (cx, cy) = (round12(x(p.birth())), round12(y(p.death())));
        let _ = match p.dim {
            0 => writeln!(out, r#"<circle class="dim0" cx="{cx}" cy="{cy}" r="{r}" fill="steelblue"/>"#),
            1 => writeln!(
                out,
                r#"<rect class="dim1" x="{}" y="{}" width="{}" height="{}" fill="darkorange"/>"#,
                round12(cx - r),
                round12(cy - r),
                2.0 * r,
                2.0 * r
            ),
            _ => writeln!(
                out,
                r#"<path class="dim2" d="M{} {} L{} {} L{} {} L{} {} Z" fill="seagreen"/>"#,
                cx,
                round12(cy - r),
                round12(cx + r),
                cy,
                cx,
                round12(cy + r),
                round12(cx - r),
                cy
            ),
        };
    }
    out.push_str("</svg>\n");
    out
}

/// Mesh elements as explicit polygons or hexahedra with shared vertices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeshGeometry {
    pub dim: usize,
    pub vertices: Vec<[f64; 3]>,
    /// Quads: every element in 2D, boundary faces of the hexahedra in 3D.
    pub faces: Vec<[usize; 4]>,
    /// Quads in 2D, hexahedra (VTK node order) in 3D.
    pub cells: Vec<Vec<usize>>,
    pub provenance: Vec<u8>,
    pub hanging: Vec<bool>,
}

const QUAD: [[usize; 3]; 4] = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]];
const HEX: [[usize; 3]; 8] = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]];
/// Outward faces of a hexahedron, as indices into `HEX`.
const HEX_FACES: [[usize; 4]; 6] = [[0, 4, 7, 3], [1, 2, 6, 5], [0, 1, 5, 4], [3, 7, 6, 2], [0, 3, 2, 1], [4, 5, 6, 7]];

pub fn mesh_geometry(mesh: &CubicalMesh) -> MeshGeometry {
    let grid = mesh.grid();
    let d = mesh.dim().n();
    let mut index: HashMap<[usize; 3], usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut vertex = |q: [usize; 3]| {
        *index.entry(q).or_insert_with(|| {
            let a = q.map(|v| 2.0 * v as f64 / REFINE as f64);
            let p = grid.to_world(grid.lattice_local(a));
            vertices.push([round12(p.x), round12(p.y), round12(p.z)]);
            vertices.len() - 1
        })
    };
    let mut cells = Vec::new();
    let mut provenance = Vec::new();
    let mut hanging = Vec::new();
    for e in mesh.elements() {
        let corners: &[[usize; 3]] = if d == 2 { &QUAD } else { &HEX };
        let ids = corners
            .iter()
            .map(|o| {
                let mut q = e.lo;
                for a in 0..d {
                    q[a] += o[a] * e.size;
                }
                vertex(q)
            })
            .collect::<Vec<_>>();
        cells.push(ids);
        provenance.push(e.provenance.code());
        hanging.push(e.hanging);
    }
    let faces = if d == 2 {
        cells.iter().map(|c| [c[0], c[1], c[2], c[3]]).collect()
    } else {
        let mut seen: HashMap<[usize; 4], usize> = HashMap::new();
        let all: Vec<[usize; 4]> = cells.iter().flat_map(|c| HEX_FACES.iter().map(move |f| f.map(|k| c[k]))).collect();
        for f in &all {
            let mut key = *f;
            key.sort_unstable();
            *seen.entry(key).or_default() += 1;
        }
        all.into_iter()
            .filter(|f| {
                let mut key = *f;
                key.sort_unstable();
                seen[&key] == 1
            })
            .collect()
    };
    MeshGeometry { dim: d, vertices, faces, cells, provenance, hanging }
}

pub fn mesh_obj(g: &MeshGeometry) -> String {
    let mut out = String::new();
    for v in &g.vertices {
        let _ = writeln!(out, "v {} {} {}", fmt_num(v[0]), fmt_num(v[1]), fmt_num(v[2]));
    }
    for f in &g.faces {
        let _ = writeln!(out, "f {} {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1);
    }
    out
}

/// Legacy ASCII VTK unstructured grid with provenance and hanging-node
/// flags as cell data.
pub fn mesh_vtk(g: &MeshGeometry, title: &str) -> String {
    let mut out = String::from("# vtk DataFile Version 3.0\n");
    let _ = writeln!(out, "{title}\nASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(out, "POINTS {} double", g.vertices.len());
    for v in &g.vertices {
        let _ = writeln!(out, "{} {} {}", fmt_num(v[0]), fmt_num(v[1]), fmt_num(v[2]));
    }
    let per = if g.dim == 2 { 4 } else { 8 };
    let _ = writeln!(out, "CELLS {} {}", g.cells.len(), g.cells.len() * (per + 1));
    for c in &g.cells {
        let ids: Vec<String> = c.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(out, "{per} {}", ids.join(" "));
    }
    let _ = writeln!(out, "CELL_TYPES {}", g.cells.len());
    let code = if g.dim == 2 { 9 } else { 12 };
    for _ in &g.cells {
        let _ = writeln!(out, "{code}");
    }
    let _ = writeln!(out, "CELL_DATA {}", g.cells.len());
    out.push_str("SCALARS provenance int 1\nLOOKUP_TABLE default\n");
    for p in &g.provenance {
        let _ = writeln!(out, "{p}");
    }
    out.push_str("SCALARS hanging int 1\nLOOKUP_TABLE default\n");
    for h in &g.hanging {
        let _ = writeln!(out, "{}", *h as u8);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PinchJson {
    pub location: Vec<f64>,
    pub site: [usize; 3],
    pub kind: &'static str,
    pub axis: Option<usize>,
    pub case: u8,
    pub resolution: Option<&'static str>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RepairJson {
    pub threshold: f64,
    pub antialias: bool,
    pub pinches: Vec<PinchJson>,
    pub chains: usize,
    pub conflicting_chains: usize,
    pub changed_by_policy: usize,
    pub components_before: Vec<usize>,
    pub components_after: Vec<usize>,
    pub bridges: usize,
    pub bridge_edges: usize,
    pub islands_removed: usize,
    pub residual_pinches: usize,
    pub elements: usize,
    pub template_elements: usize,
    pub hanging_elements: usize,
    pub warnings: Vec<String>,
}

fn resolution_str(r: Resolution) -> &'static str {
    match r {
        Resolution::Connect => "connect",
        Resolution::Separate => "separate",
    }
}

fn pinch_json(mesh: &CubicalMesh, p: &Pinch) -> PinchJson {
    let d = mesh.dim().n();
    let c = mesh.grid().site_center(p.site).to_array();
    let (kind, axis) = match p.kind {
        PinchKind::Vertex => ("vertex", None),
        PinchKind::Edge { axis } => ("edge", Some(axis)),
    };
    PinchJson {
        location: c[..d].iter().map(|v| round12(*v)).collect(),
        site: p.site.0,
        kind,
        axis,
        case: p.case_id,
        resolution: p.resolution.map(resolution_str),
    }
}

pub fn repair_json(mesh: &CubicalMesh, geometry: &MeshGeometry, r: &RepairReport) -> RepairJson {
    RepairJson {
        threshold: r.threshold,
        antialias: r.antialias,
        pinches: r.pinches.iter().map(|p| pinch_json(mesh, p)).collect(),
        chains: r.conflicts.chains,
        conflicting_chains: r.conflicts.conflicting_chains,
        changed_by_policy: r.conflicts.changed,
        components_before: r.components_before.clone(),
        components_after: r.components_after.clone(),
        bridges: r.join.bridges,
        bridge_edges: r.join.bridge_edges,
        islands_removed: r.islands_removed,
        residual_pinches: r.residual_pinches,
        elements: geometry.cells.len(),
        template_elements: geometry.provenance.iter().filter(|&&p| p != 0).count(),
        hanging_elements: geometry.hanging.iter().filter(|&&h| h).count(),
        warnings: r.warnings.clone(),
    }
}

/// Per-sample rows; requires a sweep run with `keep_samples`.
pub fn sweep_csv(report: &RegimeReport) -> String {
    let mut out = String::from("L_over_ell,theta,offset_x,offset_y,antialiased,components,classification\n");
    for s in &report.samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_num(s.l_over_ell),
            fmt_num(s.theta),
            fmt_num(s.offset[0]),
            fmt_num(s.offset[1]),
            s.antialiased,
            s.components,
            if s.closed { "closed" } else { "open" }
        );
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BandEdges {
    pub ambiguous: Option<[f64; 2]>,
    pub last_closed: Option<f64>,
    pub first_open: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BandRowJson {
    pub l_over_ell: f64,
    pub plain: &'static str,
    pub antialiased: &'static str,
    pub plain_closed: usize,
    pub plain_open: usize,
    pub aa_closed: usize,
    pub aa_open: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BandSummary {
    pub ell: f64,
    pub step: f64,
    pub gaps: usize,
    pub thetas: usize,
    pub offsets: usize,
    pub plain: BandEdges,
    pub antialiased: BandEdges,
    pub rows: Vec<BandRowJson>,
}

pub fn band_summary(report: &RegimeReport) -> BandSummary {
    let edges = |aa: bool| BandEdges {
        ambiguous: report.ambiguous_band(aa).map(|(a, b)| [round12(a), round12(b)]),
        last_closed: report.last_closed(aa).map(round12),
        first_open: report.first_open(aa).map(round12),
    };
    let c = &report.config;
    BandSummary {
        ell: c.ell,
        step: c.step(),
        gaps: c.l_count,
        thetas: c.theta_count,
        offsets: c.offsets_per_axis * c.offsets_per_axis,
        plain: edges(false),
        antialiased: edges(true),
        rows: report
            .rows
            .iter()
            .map(|r| BandRowJson {
                l_over_ell: round12(r.l_over_ell),
                plain: r.plain.as_str(),
                antialiased: r.antialiased.as_str(),
                plain_closed: r.plain_closed,
                plain_open: r.plain_open,
                aa_closed: r.aa_closed,
                aa_open: r.aa_open,
            })
            .collect(),
    }
}

pub fn levels_csv(levels: &[LevelResult]) -> String {
    let mut out = String::from("level,cell_size,B0,corner_vf\n");
    for l in levels {
        let _ = writeln!(out, "{},{},{},{}", l.level, fmt_num(l.cell_size), l.b0, fmt_num(l.corner_vf));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IslandJson {
    pub cells: usize,
    pub min_distance: f64,
    pub max_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WedgeJson {
    pub alpha_deg: f64,
    pub cell_size: f64,
    pub band: [f64; 2],
    pub islands: Vec<IslandJson>,
    pub islands_in_band: bool,
    pub components_pre: usize,
    pub components_post: usize,
    pub bridges: usize,
    pub islands_removed: usize,
}

pub fn wedge_json(w: &WedgeReport) -> WedgeJson {
    WedgeJson {
        alpha_deg: round12(w.alpha.to_degrees()),
        cell_size: w.cell_size,
        band: [round12(w.band.0), round12(w.band.1)],
        islands: w
            .islands
            .iter()
            .map(|i| IslandJson {
                cells: i.cells,
                min_distance: round12(i.min_distance),
                max_distance: round12(i.max_distance),
            })
            .collect(),
        islands_in_band: w.islands_in_band,
        components_pre: w.components_pre,
        components_post: w.components_post,
        bridges: w.repair.join.bridges,
        islands_removed: w.repair.islands_removed,
    }
}

/// A diagram row as served over HTTP; `death` is `null` for essential
/// classes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairJson {
    pub dim: usize,
    pub birth: f64,
    pub death: Option<f64>,
}

pub fn pair_json(p: &PersistencePair) -> PairJson {
    PairJson { dim: p.dim, birth: round12(p.birth()), death: p.death().is_finite().then(|| round12(p.death())) }
}
