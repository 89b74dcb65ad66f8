//! Batch commands. The server calls the same functions, so its answers
//! match the files written here.

use std::path::PathBuf;

use vfmesh_core::mesher::{mesh_field, CubicalMesh, RepairOptions, RepairReport};
use vfmesh_core::persistence::{compute_persistence, PersistenceDiagram};
use vfmesh_core::theory::{nonconvergence_case, wedge_case_with};
use vfmesh_core::{Grid, VolumeFractionField};

use crate::config::{MeshFormat, RunConfig};
use crate::error::Result;
use crate::export::{self, MeshGeometry};
use crate::io::{load_geometry, LoadedGeometry};
use crate::par;

/// Geometry, grid and field for a configuration.
pub struct Prepared {
    pub geometry: LoadedGeometry,
    pub grid: Grid,
    pub field: VolumeFractionField,
}

pub fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    cfg.validate()?;
    let geometry = load_geometry(cfg.geometry_path()?, cfg.format)?;
    let dim = geometry.soup.dim();
    let grid = Grid::build(&geometry.soup, &cfg.grid_spec(dim))?;
    let field = par::compute_field(&geometry.soup, &grid, cfg.samples_for(dim))?;
    Ok(Prepared { geometry, grid, field })
}

/// What a command did, for the terminal.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub lines: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    fn note(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    fn write(&mut self, path: PathBuf, contents: &str) -> Result<()> {
        export::write_file(&path, contents)?;
        self.files.push(path);
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut s = self.lines.join("\n");
        for f in &self.files {
            s.push_str(&format!("\nwrote {}", f.display()));
        }
        s
    }
}

fn describe(p: &Prepared, out: &mut Outcome) {
    let g = &p.grid;
    out.note(format!(
        "{}: {} elements ({} degenerate dropped), grid {:?} cells of {}, s = {}",
        p.geometry.name,
        p.geometry.soup.len(),
        p.geometry.dropped,
        &g.extents()[..g.dim().n()],
        g.cell_size(),
        p.field.samples_per_axis()
    ));
    if p.field.boundary_samples() > 0 {
        out.note(format!("warning: {} samples lie on the geometry", p.field.boundary_samples()));
    }
}

pub fn cmd_sample(cfg: &RunConfig) -> Result<Outcome> {
    let p = prepare(cfg)?;
    let mut out = Outcome::default();
    describe(&p, &mut out);
    out.write(cfg.out_dir.join("field.csv"), &export::field_csv(&p.field))?;
    Ok(out)
}

pub fn cmd_persist(cfg: &RunConfig) -> Result<Outcome> {
    let p = prepare(cfg)?;
    let d = compute_persistence(&p.field);
    let mut out = Outcome::default();
    describe(&p, &mut out);
    let b = d.betti_at(cfg.threshold);
    out.note(format!(
        "{} pairs; Betti numbers at vf {}: {:?}",
        d.nonzero_pairs().count(),
        cfg.threshold,
        betti_slice(&d, b)
    ));
    out.write(cfg.out_dir.join("diagram.csv"), &export::diagram_csv(&d))?;
    out.write(cfg.out_dir.join("diagram.svg"), &export::diagram_svg(&d, cfg.svg_size))?;
    out.write(cfg.out_dir.join("betti.csv"), &export::betti_csv(&d.betti_curve()))?;
    Ok(out)
}

fn betti_slice(d: &PersistenceDiagram, b: [usize; 3]) -> Vec<usize> {
    b[..d.dim().n()].to_vec()
}

/// A repaired mesh and its explicit geometry.
pub struct MeshOutput {
    pub mesh: CubicalMesh,
    pub report: RepairReport,
    pub geometry: MeshGeometry,
}

pub fn mesh_at(field: &VolumeFractionField, t: f64, opts: &RepairOptions) -> Result<MeshOutput> {
    let (mesh, report) = mesh_field(field, t, opts)?;
    let geometry = export::mesh_geometry(&mesh);
    Ok(MeshOutput { mesh, report, geometry })
}

pub fn cmd_mesh(cfg: &RunConfig) -> Result<Outcome> {
    let p = prepare(cfg)?;
    let m = mesh_at(&p.field, cfg.threshold, &cfg.repair_options())?;
    let mut out = Outcome::default();
    describe(&p, &mut out);
    let r = &m.report;
    out.note(format!(
        "threshold {}: {} pinches, components {} -> {}, {} elements",
        cfg.threshold,
        r.pinches.len(),
        r.components_before.len(),
        r.components_after.len(),
        m.geometry.cells.len()
    ));
    for w in &r.warnings {
        out.note(format!("warning: {w}"));
    }
    match cfg.mesh_format {
        MeshFormat::Obj => out.write(cfg.out_dir.join("mesh.obj"), &export::mesh_obj(&m.geometry))?,
        MeshFormat::Vtk => {
            let title = format!("{} threshold {}", p.geometry.name, cfg.threshold);
            out.write(cfg.out_dir.join("mesh.vtk"), &export::mesh_vtk(&m.geometry, &title))?
        }
    }
    let json = serde_json::to_string_pretty(&export::repair_json(&m.mesh, &m.geometry, r))?;
    out.write(cfg.out_dir.join("repair.json"), &(json + "\n"))?;
    Ok(out)
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Outcome> {
    let sc = cfg.sweep_config();
    let report = par::sweep_gap(&sc)?;
    let summary = export::band_summary(&report);
    let mut out = Outcome::default();
    for (name, e) in [("plain", &summary.plain), ("antialiased", &summary.antialiased)] {
        out.note(format!(
            "{name}: last closed {:?}, first open {:?}, ambiguous {:?}",
            e.last_closed, e.first_open, e.ambiguous
        ));
    }
    if sc.keep_samples {
        out.write(cfg.out_dir.join("sweep.csv"), &export::sweep_csv(&report))?;
    }
    out.write(cfg.out_dir.join("bands.json"), &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    Ok(out)
}

pub fn cmd_counterexample(cfg: &RunConfig) -> Result<Outcome> {
    let c = &cfg.counterexample;
    let levels = nonconvergence_case(c.corner_x, c.levels, c.samples)?;
    let mut out = Outcome::default();
    let b0: Vec<usize> = levels.iter().map(|l| l.b0).collect();
    out.note(format!("corner {}: B0 by level {:?}", c.corner_x, b0));
    out.write(cfg.out_dir.join("counterexample.csv"), &export::levels_csv(&levels))?;
    Ok(out)
}

pub fn cmd_wedge(cfg: &RunConfig) -> Result<Outcome> {
    let w = &cfg.wedge;
    let rep = wedge_case_with(w.alpha_deg.to_radians(), w.cell_size, w.samples, w.min_cells, &cfg.wedge_setup())?;
    let mut out = Outcome::default();
    out.note(format!(
        "alpha {} deg: {} islands (in band: {}), components {} -> {}",
        w.alpha_deg,
        rep.islands.len(),
        rep.islands_in_band,
        rep.components_pre,
        rep.components_post
    ));
    let json = serde_json::to_string_pretty(&export::wedge_json(&rep))?;
    out.write(cfg.out_dir.join("wedge.json"), &(json + "\n"))?;
    Ok(out)
}
