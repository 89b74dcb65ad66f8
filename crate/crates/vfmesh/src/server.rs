//! Read-only HTTP API over a precomputed field and diagram.

use std::path::Path;
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;
use vfmesh_core::mesher::RepairOptions;
use vfmesh_core::persistence::{compute_persistence, PersistenceDiagram};
use vfmesh_core::VolumeFractionField;

use crate::commands::{mesh_at, prepare};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::export::{self, MeshGeometry, PairJson, RepairJson};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Meta {
    pub geometry: String,
    pub dim: usize,
    pub extents: Vec<usize>,
    pub cell_size: f64,
    pub samples: usize,
    pub origin: [f64; 3],
    pub rotation_deg: f64,
    pub threshold: f64,
    pub antialias: bool,
}

/// Everything a request may read. Never mutated after startup.
pub struct AppState {
    pub meta: Meta,
    pub field: VolumeFractionField,
    pub diagram: PersistenceDiagram,
    pub opts: RepairOptions,
}

impl AppState {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        let p = prepare(cfg)?;
        let diagram = compute_persistence(&p.field);
        let g = &p.grid;
        let meta = Meta {
            geometry: p.geometry.name.clone(),
            dim: g.dim().n(),
            extents: g.extents()[..g.dim().n()].to_vec(),
            cell_size: g.cell_size(),
            samples: p.field.samples_per_axis(),
            origin: g.origin().to_array(),
            rotation_deg: cfg.rotation_deg,
            threshold: cfg.threshold,
            antialias: cfg.antialias,
        };
        Ok(Self { meta, field: p.field, diagram, opts: cfg.repair_options() })
    }
}

#[derive(Serialize)]
struct ErrorBody {
    error: String,
}

fn bad_request(msg: impl Into<String>) -> Response {
    (StatusCode::BAD_REQUEST, Json(ErrorBody { error: msg.into() })).into_response()
}

#[derive(Deserialize)]
pub struct VfQuery {
    vf: Option<String>,
    antialias: Option<String>,
}

fn parse_vf(q: &VfQuery) -> std::result::Result<f64, String> {
    let raw = q.vf.as_deref().ok_or("missing vf")?;
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        _ => Err(format!("invalid vf '{raw}'")),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagramBody {
    pub pairs: Vec<PairJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BettiBody {
    pub vf: f64,
    pub b0: usize,
    pub b1: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b2: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeshBody {
    pub vf: f64,
    pub antialias: bool,
    pub components: usize,
    #[serde(flatten)]
    pub geometry: MeshGeometry,
    pub repair: RepairJson,
}

pub fn diagram_body(d: &PersistenceDiagram) -> DiagramBody {
    DiagramBody { pairs: d.nonzero_pairs().map(export::pair_json).collect() }
}

pub fn betti_body(d: &PersistenceDiagram, vf: f64) -> BettiBody {
    let b = d.betti_at(vf);
    let three = d.dim().n() == 3;
    BettiBody { vf, b0: b[0], b1: b[1], b2: three.then_some(b[2]) }
}

pub fn mesh_body(state: &AppState, vf: f64, antialias: bool) -> Result<MeshBody> {
    let opts = RepairOptions { antialias, ..state.opts };
    let m = mesh_at(&state.field, vf, &opts)?;
    let repair = export::repair_json(&m.mesh, &m.geometry, &m.report);
    Ok(MeshBody { vf, antialias, components: m.report.components_after.len(), geometry: m.geometry, repair })
}

async fn get_meta(State(s): State<Arc<AppState>>) -> Json<Meta> {
    Json(s.meta.clone())
}

async fn get_diagram(State(s): State<Arc<AppState>>) -> Json<DiagramBody> {
    Json(diagram_body(&s.diagram))
}

async fn get_betti(State(s): State<Arc<AppState>>, Query(q): Query<VfQuery>) -> Response {
    match parse_vf(&q) {
        Ok(vf) => Json(betti_body(&s.diagram, vf)).into_response(),
        Err(m) => bad_request(m),
    }
}

async fn get_mesh(State(s): State<Arc<AppState>>, Query(q): Query<VfQuery>) -> Response {
    let vf = match parse_vf(&q) {
        Ok(v) => v,
        Err(m) => return bad_request(m),
    };
    let antialias = match q.antialias.as_deref() {
        None => s.meta.antialias,
        Some("true" | "1") => true,
        Some("false" | "0") => false,
        Some(other) => return bad_request(format!("invalid antialias '{other}'")),
    };
    let result = tokio::task::spawn_blocking(move || mesh_body(&s, vf, antialias)).await;
    match result {
        Ok(Ok(body)) => Json(body).into_response(),
        Ok(Err(e)) => (StatusCode::INTERNAL_SERVER_ERROR, Json(ErrorBody { error: e.to_string() })).into_response(),
        Err(e) => (StatusCode::INTERNAL_SERVER_ERROR, Json(ErrorBody { error: e.to_string() })).into_response(),
    }
}

pub fn router(state: Arc<AppState>, static_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/meta", get(get_meta))
        .route("/diagram", get(get_diagram))
        .route("/betti", get(get_betti))
        .route("/mesh", get(get_mesh))
        .with_state(state);
    let app = match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.layer(CorsLayer::permissive())
}

/// Precomputes the state, binds and serves until the process is stopped.
pub fn cmd_serve(cfg: &RunConfig) -> Result<()> {
    let state = Arc::new(AppState::new(cfg)?);
    let rt = tokio::runtime::Runtime::new().map_err(Error::Server)?;
    rt.block_on(async {
        let addr = format!("{}:{}", cfg.serve.host, cfg.serve.port);
        let listener = tokio::net::TcpListener::bind(&addr).await.map_err(Error::Server)?;
        eprintln!("serving {} on http://{addr}", state.meta.geometry);
        axum::serve(listener, router(state, cfg.serve.static_dir.as_deref())).await.map_err(Error::Server)
    })
}
