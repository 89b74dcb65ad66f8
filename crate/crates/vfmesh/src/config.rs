//! Run configuration: one TOML file, overridable from the command line.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use vfmesh_core::mesher::{ConflictPolicy, RepairOptions};
use vfmesh_core::theory::{FractionSource, SweepConfig, WedgeSetup};
use vfmesh_core::{Dim, GridSpec, Mat3, Vec3};

use crate::error::{Error, Result};
use crate::io::GeometryFormat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    #[default]
    Separate,
    Connect,
    Majority,
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "separate" => Ok(Self::Separate),
            "connect" => Ok(Self::Connect),
            "majority" => Ok(Self::Majority),
            _ => Err(format!("unknown conflict policy '{s}'")),
        }
    }
}

impl From<Policy> for ConflictPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Separate => ConflictPolicy::Separate,
            Policy::Connect => ConflictPolicy::Connect,
            Policy::Majority => ConflictPolicy::Majority,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeshFormat {
    #[default]
    Obj,
    Vtk,
}

impl FromStr for MeshFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "obj" => Ok(Self::Obj),
            "vtk" | "vtk-legacy" => Ok(Self::Vtk),
            _ => Err(format!("unknown mesh format '{s}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepSource {
    #[default]
    Exact,
    Sampled,
}

impl FromStr for SweepSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(Self::Exact),
            "sampled" => Ok(Self::Sampled),
            _ => Err(format!("unknown fraction source '{s}'")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub l_min: f64,
    pub l_max: f64,
    pub l_count: usize,
    pub theta_count: usize,
    pub offsets_per_axis: usize,
    pub window: usize,
    pub source: SweepSource,
    /// Samples per axis for the sampled source.
    pub samples: usize,
    /// Write one CSV row per sample.
    pub per_sample: bool,
}

impl Default for SweepSection {
    fn default() -> Self {
        let c = SweepConfig::default();
        Self {
            l_min: c.l_min,
            l_max: c.l_max,
            l_count: c.l_count,
            theta_count: c.theta_count,
            offsets_per_axis: c.offsets_per_axis,
            window: c.window,
            source: SweepSource::Exact,
            samples: 16,
            per_sample: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CounterexampleSection {
    pub corner_x: f64,
    pub levels: usize,
    pub samples: usize,
}

impl Default for CounterexampleSection {
    fn default() -> Self {
        Self { corner_x: 2.0 / 3.0, levels: 6, samples: 32 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WedgeSection {
    pub alpha_deg: f64,
    pub cell_size: f64,
    pub samples: usize,
    pub min_cells: usize,
    pub apex: [f64; 2],
    pub bisector_deg: f64,
    pub legs: f64,
}

impl Default for WedgeSection {
    fn default() -> Self {
        let w = WedgeSetup::default();
        Self {
            alpha_deg: 5.0,
            cell_size: 1.0,
            samples: 8,
            min_cells: 3,
            apex: w.apex,
            bisector_deg: w.bisector.to_degrees(),
            legs: w.legs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServeSection {
    pub host: String,
    pub port: u16,
    pub static_dir: Option<PathBuf>,
}

impl Default for ServeSection {
    fn default() -> Self {
        Self { host: "127.0.0.1".into(), port: 8080, static_dir: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: Option<PathBuf>,
    pub format: GeometryFormat,
    pub cell_size: f64,
    /// Grid rotation in degrees, about `rotation_axis` (z for 2D input).
    pub rotation_deg: f64,
    pub rotation_axis: [f64; 3],
    pub offset: [f64; 3],
    pub padding: usize,
    /// Samples per cell axis; 4 in 2D and 2 in 3D when unset.
    pub samples: Option<usize>,
    pub threshold: f64,
    pub min_cells: usize,
    pub policy: Policy,
    pub antialias: bool,
    pub join: bool,
    pub out_dir: PathBuf,
    pub mesh_format: MeshFormat,
    pub svg_size: u32,
    pub max_cells: usize,
    pub sweep: SweepSection,
    pub counterexample: CounterexampleSection,
    pub wedge: WedgeSection,
    pub serve: ServeSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        let g = GridSpec::default();
        Self {
            geometry: None,
            format: GeometryFormat::Auto,
            cell_size: g.cell_size,
            rotation_deg: 0.0,
            rotation_axis: [0.0, 0.0, 1.0],
            offset: [0.0; 3],
            padding: g.padding,
            samples: None,
            threshold: 0.5,
            min_cells: 1,
            policy: Policy::Separate,
            antialias: true,
            join: true,
            out_dir: PathBuf::from("out"),
            mesh_format: MeshFormat::Obj,
            svg_size: 480,
            max_cells: g.max_cells,
            sweep: SweepSection::default(),
            counterexample: CounterexampleSection::default(),
            wedge: WedgeSection::default(),
            serve: ServeSection::default(),
        }
    }
}

impl RunConfig {
    /// Parses a TOML file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Read { path: path.into(), source })?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(g) = cfg.geometry.as_mut() {
            rebase(g);
        }
        rebase(&mut cfg.out_dir);
        if let Some(d) = cfg.serve.static_dir.as_mut() {
            rebase(d);
        }
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if !(self.cell_size.is_finite() && self.cell_size > 0.0) {
            return bad("cell_size must be positive");
        }
        if let Some(s) = self.samples {
            if s < 2 || s % 2 == 1 {
                return bad("samples must be even and at least 2");
            }
        }
        if !(self.threshold.is_finite() && self.threshold >= 0.0) {
            return bad("threshold must be finite and non-negative");
        }
        if !self.rotation_deg.is_finite() || !self.offset.iter().all(|v| v.is_finite()) {
            return bad("rotation and offset must be finite");
        }
        if self.rotation_deg != 0.0 && self.rotation_axis.iter().all(|v| *v == 0.0) {
            return bad("rotation_axis must be nonzero");
        }
        if self.svg_size < 16 {
            return bad("svg_size must be at least 16");
        }
        Ok(())
    }

    pub fn geometry_path(&self) -> Result<&Path> {
        self.geometry.as_deref().ok_or_else(|| Error::Config("no geometry file given".into()))
    }

    pub fn samples_for(&self, dim: Dim) -> usize {
        self.samples.unwrap_or(match dim {
            Dim::Two => 4,
            Dim::Three => 2,
        })
    }

    pub fn grid_spec(&self, dim: Dim) -> GridSpec {
        let angle = self.rotation_deg.to_radians();
        let rotation = if angle == 0.0 {
            Mat3::IDENTITY
        } else if dim == Dim::Two {
            Mat3::rotation_z(angle)
        } else {
            Mat3::axis_angle(Vec3::from_array(self.rotation_axis), angle)
        };
        GridSpec {
            cell_size: self.cell_size,
            rotation,
            offset: self.offset,
            padding: self.padding,
            max_cells: self.max_cells,
        }
    }

    pub fn repair_options(&self) -> RepairOptions {
        RepairOptions {
            antialias: self.antialias,
            policy: self.policy.into(),
            join: self.join,
            min_cells: self.min_cells,
        }
    }

    pub fn sweep_config(&self) -> SweepConfig {
        let s = &self.sweep;
        SweepConfig {
            ell: 1.0,
            l_min: s.l_min,
            l_max: s.l_max,
            l_count: s.l_count,
            theta_count: s.theta_count,
            offsets_per_axis: s.offsets_per_axis,
            window: s.window,
            source: match s.source {
                SweepSource::Exact => FractionSource::Exact,
                SweepSource::Sampled => FractionSource::Sampled { s: s.samples },
            },
            keep_samples: s.per_sample,
        }
    }

    pub fn wedge_setup(&self) -> WedgeSetup {
        let w = &self.wedge;
        WedgeSetup { apex: w.apex, bisector: w.bisector_deg.to_radians(), legs: w.legs }
    }
}
