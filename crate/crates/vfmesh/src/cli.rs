//! Command-line interface. Flags override the configuration file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{self, Outcome};
use crate::config::{MeshFormat, Policy, RunConfig, SweepSource};
use crate::error::Result;
use crate::io::GeometryFormat;
use crate::server;

#[derive(Debug, Parser)]
#[command(name = "vfmesh", version, about = "Topology-aware cubical meshing of dirty geometry")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// Geometry file (seg-text, OBJ or STL).
    #[arg(long, global = true)]
    pub geometry: Option<PathBuf>,
    #[arg(long, global = true)]
    pub format: Option<GeometryFormat>,
    #[arg(long, global = true)]
    pub cell_size: Option<f64>,
    /// Grid rotation in degrees.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub rotation: Option<f64>,
    /// Grid offset, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub offset: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub padding: Option<usize>,
    /// Samples per cell axis (even).
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Volume-fraction threshold.
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    #[arg(long, global = true)]
    pub min_cells: Option<usize>,
    #[arg(long, global = true)]
    pub policy: Option<Policy>,
    #[arg(long, global = true)]
    pub antialias: Option<bool>,
    #[arg(long, global = true)]
    pub join: Option<bool>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the volume-fraction field as CSV.
    Sample,
    /// Write the persistence diagram, its plot and the Betti curve.
    Persist {
        #[arg(long)]
        svg_size: Option<u32>,
    },
    /// Extract and repair the mesh at the threshold.
    Mesh {
        #[arg(long)]
        mesh_format: Option<MeshFormat>,
    },
    /// Sweep gap width, grid angle and offset between two half-spaces.
    Sweep {
        #[arg(long)]
        l_count: Option<usize>,
        #[arg(long)]
        theta_count: Option<usize>,
        #[arg(long)]
        offsets_per_axis: Option<usize>,
        #[arg(long)]
        source: Option<SweepSource>,
        /// Samples per axis for the sampled source.
        #[arg(long)]
        sweep_samples: Option<usize>,
    },
    /// Refine the corner example and report component counts per level.
    Counterexample {
        #[arg(long)]
        corner_x: Option<f64>,
        #[arg(long)]
        levels: Option<usize>,
    },
    /// Mesh a sharp wedge and report islands near the apex.
    Wedge {
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Serve the diagram, Betti numbers and meshes over HTTP.
    Serve {
        #[arg(long)]
        port: Option<u16>,
        #[arg(long)]
        host: Option<String>,
        #[arg(long)]
        static_dir: Option<PathBuf>,
    },
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

impl CommonArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if self.geometry.is_some() {
            cfg.geometry = self.geometry.clone();
        }
        set(&mut cfg.format, self.format);
        set(&mut cfg.cell_size, self.cell_size);
        set(&mut cfg.rotation_deg, self.rotation);
        if let Some(o) = &self.offset {
            for (a, v) in o.iter().take(3).enumerate() {
                cfg.offset[a] = *v;
            }
        }
        set(&mut cfg.padding, self.padding);
        if self.samples.is_some() {
            cfg.samples = self.samples;
        }
        set(&mut cfg.threshold, self.threshold);
        set(&mut cfg.min_cells, self.min_cells);
        set(&mut cfg.policy, self.policy);
        set(&mut cfg.antialias, self.antialias);
        set(&mut cfg.join, self.join);
        set(&mut cfg.out_dir, self.out.clone());
    }
}

impl Cli {
    /// The file configuration with every given flag applied on top.
    pub fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        self.common.apply(&mut cfg);
        match &self.command {
            Command::Persist { svg_size } => set(&mut cfg.svg_size, *svg_size),
            Command::Mesh { mesh_format } => set(&mut cfg.mesh_format, *mesh_format),
            Command::Sweep { l_count, theta_count, offsets_per_axis, source, sweep_samples } => {
                set(&mut cfg.sweep.l_count, *l_count);
                set(&mut cfg.sweep.theta_count, *theta_count);
                set(&mut cfg.sweep.offsets_per_axis, *offsets_per_axis);
                set(&mut cfg.sweep.source, *source);
                set(&mut cfg.sweep.samples, *sweep_samples);
            }
            Command::Counterexample { corner_x, levels } => {
                set(&mut cfg.counterexample.corner_x, *corner_x);
                set(&mut cfg.counterexample.levels, *levels);
                set(&mut cfg.counterexample.samples, self.common.samples);
            }
            Command::Wedge { alpha } => {
                set(&mut cfg.wedge.alpha_deg, *alpha);
                set(&mut cfg.wedge.cell_size, self.common.cell_size);
                set(&mut cfg.wedge.samples, self.common.samples);
                set(&mut cfg.wedge.min_cells, self.common.min_cells);
            }
            Command::Serve { port, host, static_dir } => {
                set(&mut cfg.serve.port, *port);
                set(&mut cfg.serve.host, host.clone());
                if static_dir.is_some() {
                    cfg.serve.static_dir = static_dir.clone();
                }
            }
            Command::Sample => {}
        }
        Ok(cfg)
    }

    pub fn run(&self) -> Result<Outcome> {
        let cfg = self.config()?;
        match self.command {
            Command::Sample => commands::cmd_sample(&cfg),
            Command::Persist { .. } => commands::cmd_persist(&cfg),
            Command::Mesh { .. } => commands::cmd_mesh(&cfg),
            Command::Sweep { .. } => commands::cmd_sweep(&cfg),
            Command::Counterexample { .. } => commands::cmd_counterexample(&cfg),
            Command::Wedge { .. } => commands::cmd_wedge(&cfg),
            Command::Serve { .. } => server::cmd_serve(&cfg).map(|_| Outcome::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "geometry = \"shape.seg\"\ncell_size = 0.5\nthreshold = 0.7\n").unwrap();
        let cli = Cli::parse_from([
            "vfmesh",
            "--config",
            path.to_str().unwrap(),
            "mesh",
            "--threshold",
            "0.3",
            "--rotation",
            "-30",
            "--offset",
            "0.1,-0.2",
        ]);
        let cfg = cli.config().unwrap();
        assert_eq!(cfg.threshold, 0.3);
        assert_eq!(cfg.cell_size, 0.5);
        assert_eq!(cfg.rotation_deg, -30.0);
        assert_eq!(cfg.offset, [0.1, -0.2, 0.0]);
        assert_eq!(cfg.geometry.unwrap(), dir.path().join("shape.seg"));
    }

    #[test]
    fn subcommand_flags() {
        let cli = Cli::parse_from(["vfmesh", "sweep", "--l-count", "8", "--source", "sampled"]);
        let cfg = cli.config().unwrap();
        assert_eq!(cfg.sweep.l_count, 8);
        assert_eq!(cfg.sweep.source, SweepSource::Sampled);
        assert!(Cli::try_parse_from(["vfmesh", "mesh", "--policy", "sideways"]).is_err());
    }
}
