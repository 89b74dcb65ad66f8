use std::path::PathBuf;

use vfmesh_core::field::FieldError;
use vfmesh_core::mesher::MeshError;
use vfmesh_core::theory::TheoryError;
use vfmesh_core::{GridError, SoupError};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("{path}: mixes segments and faces")]
    MixedDimensions { path: PathBuf },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Geometry { path: PathBuf, source: SoupError },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error("server: {0}")]
    Server(std::io::Error),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 2 for bad input, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Read { .. }
            | Error::Parse { .. }
            | Error::MixedDimensions { .. }
            | Error::Config(_)
            | Error::Geometry { .. }
            | Error::Grid(_)
            | Error::Field(_)
            | Error::Mesh(MeshError::InvalidThreshold(_)) => 2,
            Error::Theory(TheoryError::InvalidParameter(_) | TheoryError::AngleOutOfDomain(_)) => 2,
            Error::Theory(TheoryError::RegimeViolation(_)) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
