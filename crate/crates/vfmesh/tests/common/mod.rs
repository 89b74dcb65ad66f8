#![allow(dead_code)]

use std::path::{Path, PathBuf};

use vfmesh::config::RunConfig;

pub fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

/// Compares against `tests/golden/<name>`; `VFMESH_BLESS=1` rewrites it.
pub fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("VFMESH_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert!(expected == actual, "output differs from {}", path.display());
}

pub fn config(geometry: &str, cell_size: f64, out: &Path) -> RunConfig {
    RunConfig { geometry: Some(data(geometry)), cell_size, out_dir: out.to_path_buf(), ..RunConfig::default() }
}
