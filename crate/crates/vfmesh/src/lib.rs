//! File formats, parallel evaluation, the `vfmesh` command line and its
//! HTTP server, on top of `vfmesh-core`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod export;
pub mod io;
pub mod par;
pub mod server;

pub use error::{Error, Result};
