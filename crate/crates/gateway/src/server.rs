//! HTTP service over immutable snapshots. Every what-if creates a new
//! snapshot; nothing is edited in place.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use reqarg_core::af::{ArgumentId, Semantics};
use reqarg_core::attack::AttackEdge;
use reqarg_core::graph::{AttackGraph, GraphError};
use reqarg_core::kaos::KaosGraph;
use reqarg_core::log::Argument;
use reqarg_core::metrics::run_stats;
use reqarg_core::quality::{QualityAxis, Weights};
use reqarg_core::resolve::{
    trace_card, trace_cards, what_if_inject, what_if_reconfigure, what_if_remove_attack, OverrideJournal,
    PreferredStrategy, Resolution, ResolutionConfig, ResolveError,
};
use reqarg_core::verify::VerificationReport;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::export::GraphExport;
use crate::run::RunOutput;

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub id: String,
    pub parent: Option<String>,
    pub graph: AttackGraph,
    pub resolution: Resolution,
    pub journal: OverrideJournal,
    pub kaos: Option<KaosGraph>,
    pub verification: Option<VerificationReport>,
}

#[derive(Debug, Default)]
pub struct SnapshotStore {
    snapshots: RwLock<BTreeMap<u64, Arc<Snapshot>>>,
    next: AtomicU64,
}

fn parse_id(id: &str) -> Option<u64> {
    id.strip_prefix('s')?.parse().ok()
}

impl SnapshotStore {
    /// Assigns the next id and inserts atomically.
    pub fn insert(&self, make: impl FnOnce(String) -> Snapshot) -> Arc<Snapshot> {
        let n = self.next.fetch_add(1, Ordering::SeqCst) + 1;
        let snap = Arc::new(make(format!("s{n}")));
        self.snapshots.write().expect("store lock").insert(n, snap.clone());
        snap
    }

    pub fn get(&self, id: &str) -> Option<Arc<Snapshot>> {
        let n = parse_id(id)?;
        self.snapshots.read().expect("store lock").get(&n).cloned()
    }

    pub fn list(&self) -> Vec<Arc<Snapshot>> {
        self.snapshots.read().expect("store lock").values().cloned().collect()
    }
}

pub struct AppState {
    pub store: SnapshotStore,
    pub axes: Vec<QualityAxis>,
}

impl AppState {
    pub fn new(axes: Vec<QualityAxis>) -> Self {
        Self {
            store: SnapshotStore::default(),
            axes,
        }
    }

    /// Seeds the store with a completed pipeline run as `s1`.
    pub fn from_run(run: &RunOutput) -> Self {
        let state = Self::new(run.config.axes());
        state.store.insert(|id| Snapshot {
            id,
            parent: None,
            graph: run.graph.clone(),
            resolution: run.resolution.clone(),
            journal: run.journal.clone(),
            kaos: Some(run.integration.model.clone()),
            verification: Some(run.verification.clone()),
        });
        state
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    fn unknown_snapshot(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "unknown_snapshot", format!("no snapshot `{id}`"))
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }
}

impl From<ResolveError> for ApiError {
    fn from(e: ResolveError) -> Self {
        let (status, code) = match &e {
            ResolveError::Graph(GraphError::UnknownEdge(..)) => (StatusCode::NOT_FOUND, "unknown_edge"),
            ResolveError::Graph(GraphError::DanglingEdge(..)) | ResolveError::UnknownArgument(_) => {
                (StatusCode::NOT_FOUND, "unknown_argument")
            }
            ResolveError::Graph(GraphError::DuplicateArgument(_)) => (StatusCode::CONFLICT, "duplicate_argument"),
            ResolveError::Graph(GraphError::DuplicateEdge(..)) => (StatusCode::CONFLICT, "duplicate_edge"),
            ResolveError::NotAccepted(_) | ResolveError::NotInExtension(_) => {
                (StatusCode::NOT_FOUND, "not_accepted")
            }
            ResolveError::MissingWeight(_) => (StatusCode::UNPROCESSABLE_ENTITY, "missing_weight"),
            _ => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        Self::new(status, code, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": { "code": self.code, "message": self.message } });
        (self.status, Json(body)).into_response()
    }
}

type Shared = Arc<AppState>;
type ApiResult<T> = Result<Json<T>, ApiError>;

fn body<T: for<'de> Deserialize<'de>>(bytes: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::bad_request(e.to_string()))
}

fn lookup(state: &AppState, id: &str) -> Result<Arc<Snapshot>, ApiError> {
    state.store.get(id).ok_or_else(|| ApiError::unknown_snapshot(id))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SnapshotSummary {
    pub snapshot: String,
    pub parent: Option<String>,
    pub arguments: usize,
    pub attacks: usize,
    pub semantics: Semantics,
    pub selected_extension: Vec<ArgumentId>,
    pub journal_length: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SnapshotBody {
    pub snapshot: String,
    pub parent: Option<String>,
    #[serde(flatten)]
    pub export: GraphExport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Delta {
    pub entered: Vec<ArgumentId>,
    pub left: Vec<ArgumentId>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MutationBody {
    pub snapshot: String,
    pub parent: String,
    pub delta: Delta,
    pub selected_extension: Vec<ArgumentId>,
    pub grounded_extension: Vec<ArgumentId>,
}

fn summary(s: &Snapshot) -> SnapshotSummary {
    SnapshotSummary {
        snapshot: s.id.clone(),
        parent: s.parent.clone(),
        arguments: s.graph.arguments.len(),
        attacks: s.graph.attacks.len(),
        semantics: s.resolution.config.semantics,
        selected_extension: s.resolution.extension.sorted_members(),
        journal_length: s.journal.len(),
    }
}

fn snapshot_body(s: &Snapshot) -> SnapshotBody {
    SnapshotBody {
        snapshot: s.id.clone(),
        parent: s.parent.clone(),
        export: GraphExport::new(&s.graph, &s.resolution, &s.journal),
    }
}

/// Stores a derived snapshot and reports what changed in the selected set.
fn derive(state: &AppState, parent: &Snapshot, graph: AttackGraph, resolution: Resolution, journal: OverrideJournal) -> MutationBody {
    let before = &parent.resolution.extension.members;
    let after = resolution.extension.members.clone();
    let delta = Delta {
        entered: after.difference(before).cloned().collect(),
        left: before.difference(&after).cloned().collect(),
    };
    let snap = state.store.insert(|id| Snapshot {
        id,
        parent: Some(parent.id.clone()),
        graph,
        resolution,
        journal,
        kaos: None,
        verification: None,
    });
    MutationBody {
        snapshot: snap.id.clone(),
        parent: parent.id.clone(),
        delta,
        selected_extension: snap.resolution.extension.sorted_members(),
        grounded_extension: snap.resolution.grounded.iter().cloned().collect(),
    }
}

async fn list(State(state): State<Shared>) -> Json<Vec<SnapshotSummary>> {
    Json(state.store.list().iter().map(|s| summary(s)).collect())
}

async fn fetch(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult<SnapshotBody> {
    let snap = lookup(&state, &id)?;
    Ok(Json(snapshot_body(&snap)))
}

#[derive(Debug, Deserialize)]
struct RemoveEdge {
    attacker: ArgumentId,
    target: ArgumentId,
}

async fn remove_edge(State(state): State<Shared>, Path(id): Path<String>, bytes: Bytes) -> ApiResult<MutationBody> {
    let snap = lookup(&state, &id)?;
    let req: RemoveEdge = body(&bytes)?;
    let mut journal = snap.journal.clone();
    let (graph, res) =
        what_if_remove_attack(&snap.graph, &req.attacker, &req.target, &snap.resolution.config, &mut journal)?;
    Ok(Json(derive(&state, &snap, graph, res, journal)))
}

#[derive(Debug, Deserialize)]
struct Inject {
    argument: Argument,
    #[serde(default)]
    edges: Vec<AttackEdge>,
}

async fn inject(State(state): State<Shared>, Path(id): Path<String>, bytes: Bytes) -> ApiResult<MutationBody> {
    let snap = lookup(&state, &id)?;
    let req: Inject = body(&bytes)?;
    let mut journal = snap.journal.clone();
    let (graph, res) = what_if_inject(&snap.graph, req.argument, req.edges, &snap.resolution.config, &mut journal)?;
    Ok(Json(derive(&state, &snap, graph, res, journal)))
}

#[derive(Debug, Deserialize)]
struct Solve {
    semantics: Option<Semantics>,
    preferred_strategy: Option<PreferredStrategy>,
    weights: Option<BTreeMap<QualityAxis, f64>>,
}

async fn solve(State(state): State<Shared>, Path(id): Path<String>, bytes: Bytes) -> ApiResult<MutationBody> {
    let snap = lookup(&state, &id)?;
    let req: Solve = body(&bytes)?;
    let mut config: ResolutionConfig = snap.resolution.config.clone();
    if let Some(s) = req.semantics {
        config.semantics = s;
    }
    if let Some(p) = req.preferred_strategy {
        config.preferred_strategy = p;
    }
    if let Some(w) = req.weights {
        config.weights = Weights::new(w)
            .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_weights", e.to_string()))?;
    }
    let mut journal = snap.journal.clone();
    let res = what_if_reconfigure(&snap.graph, &config, &mut journal)?;
    Ok(Json(derive(&state, &snap, snap.graph.clone(), res, journal)))
}

async fn cards(State(state): State<Shared>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let snap = lookup(&state, &id)?;
    let cards = trace_cards(&snap.resolution, &snap.graph)?;
    Ok(Json(cards).into_response())
}

async fn card(State(state): State<Shared>, Path((id, arg)): Path<(String, String)>) -> Result<Response, ApiError> {
    let snap = lookup(&state, &id)?;
    let arg: ArgumentId = arg.as_str().into();
    if !snap.graph.contains(&arg) {
        return Err(ApiError::new(StatusCode::NOT_FOUND, "unknown_argument", format!("no argument `{arg}`")));
    }
    let card = trace_card(&snap.resolution, &snap.graph, &arg)?;
    Ok(Json(card).into_response())
}

async fn metrics(State(state): State<Shared>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let snap = lookup(&state, &id)?;
    let fw = snap.graph.framework().map_err(|e| ApiError::from(ResolveError::from(e)))?;
    let stats = fw.graph_stats(Some(&snap.graph.labels()));
    let rs = run_stats(&snap.resolution, &snap.graph, &stats, snap.kaos.as_ref(), &state.axes);
    Ok(Json(json!({ "snapshot": snap.id, "run_stats": rs, "graph_stats": stats })).into_response())
}

async fn verification(State(state): State<Shared>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let snap = lookup(&state, &id)?;
    match &snap.verification {
        Some(v) => Ok(Json(v).into_response()),
        None => Err(ApiError::new(
            StatusCode::NOT_FOUND,
            "not_computed",
            "verification runs only for pipeline snapshots",
        )),
    }
}

async fn health() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok" }))
}

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/snapshots", get(list))
        .route("/snapshots/{id}", get(fetch))
        .route("/snapshots/{id}/remove-edge", post(remove_edge))
        .route("/snapshots/{id}/inject", post(inject))
        .route("/snapshots/{id}/solve", post(solve))
        .route("/snapshots/{id}/trace-cards", get(cards))
        .route("/snapshots/{id}/trace-cards/{arg}", get(card))
        .route("/snapshots/{id}/metrics", get(metrics))
        .route("/snapshots/{id}/verification", get(verification))
        .with_state(state)
}

pub async fn serve(state: AppState, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(Arc::new(state))).await
}
