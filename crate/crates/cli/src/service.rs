//! Single-document JSON-over-HTTP service.
//!
//! Writers serialize through one lock and publish a fresh immutable
//! snapshot; readers clone the current snapshot and work without holding
//! the lock, so no read observes a half-applied mutation.

use std::net::SocketAddr;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use splinelab_core::curve::CurveData;
use splinelab_core::iges::write_iges;
use splinelab_core::model::{curve_from_data, model_from_value, surface_from_data};
use splinelab_core::surface::SurfaceData;
use splinelab_core::{
    check_continuity, check_spiral, curvature_comb, curvature_comb_auto, make_cubic_spiral,
    ContinuityTolerances, ControlPoint, GeomError, IsolineDirection, ModelDocument, ModelError,
    Point, RationalCurve, SpiralSpec,
};

use crate::svg::{render_svg, CombLayer, SvgOptions};

pub const REVISION_HEADER: &str = "x-model-revision";
const MAX_SAMPLES: usize = 100_000;

#[derive(Debug)]
struct Snapshot {
    doc: Arc<ModelDocument>,
    revision: u64,
}

/// Shared handle to the model store.
#[derive(Debug, Clone)]
pub struct AppState {
    store: Arc<RwLock<Snapshot>>,
}

impl AppState {
    pub fn new(doc: ModelDocument) -> Self {
        AppState {
            store: Arc::new(RwLock::new(Snapshot {
                doc: Arc::new(doc),
                revision: 0,
            })),
        }
    }

    /// Current document and revision.
    pub fn snapshot(&self) -> (Arc<ModelDocument>, u64) {
        let s = self.store.read().unwrap_or_else(|e| e.into_inner());
        (Arc::clone(&s.doc), s.revision)
    }

    /// Applies `f` to a copy of the document; on success the copy becomes
    /// current and the revision advances by one.
    fn mutate<T>(&self, f: impl FnOnce(&mut ModelDocument) -> Result<T, ApiError>) -> Result<(T, u64), ApiError> {
        let mut s = self.store.write().unwrap_or_else(|e| e.into_inner());
        let mut doc = (*s.doc).clone();
        let out = f(&mut doc)?;
        s.doc = Arc::new(doc);
        s.revision += 1;
        Ok((out, s.revision))
    }
}

/// Structured error body: `{code, message, path}`.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
    path: Option<String>,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
            path: None,
        }
    }

    fn at(mut self, path: impl Into<String>) -> Self {
        self.path = Some(path.into());
        self
    }

    fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    fn not_found(kind: &str, name: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "not_found", format!("no {kind} named {name:?}"))
    }

    fn invalid(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "validation", message)
    }
}

impl From<GeomError> for ApiError {
    fn from(e: GeomError) -> Self {
        let code = match e {
            GeomError::Domain { .. } | GeomError::InvalidArgument(_) | GeomError::UnsupportedOrder(_) => {
                "invalid_argument"
            }
            GeomError::SingularParameter { .. }
            | GeomError::SingularEndpoint { .. }
            | GeomError::InfiniteRadius { .. }
            | GeomError::SingularSurfacePoint { .. } => "singular",
            GeomError::Form(_) | GeomError::Precondition(_) => "precondition",
        };
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, code, e.to_string())
    }
}

impl From<ModelError> for ApiError {
    fn from(e: ModelError) -> Self {
        match &e {
            ModelError::Parse(m) => ApiError::bad_request(m.clone()),
            ModelError::Version { .. } => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "unsupported_version", e.to_string())
                    .at("schemaVersion")
            }
            ModelError::Validation { path, .. } => {
                let path = path.clone();
                ApiError::invalid(e.to_string()).at(path)
            }
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "code": self.code, "message": self.message, "path": self.path });
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// JSON body parsing with structured 400s instead of axum's plain-text rejections.
fn parse_body<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed request body: {e}")))
}

fn parse_query<T: DeserializeOwned>(query: Result<Query<T>, axum::extract::rejection::QueryRejection>) -> ApiResult<T> {
    query
        .map(|Query(q)| q)
        .map_err(|e| ApiError::bad_request(format!("bad query string: {}", e.body_text())))
}

fn with_revision(mut r: Response, revision: u64) -> Response {
    r.headers_mut()
        .insert(REVISION_HEADER, HeaderValue::from(revision));
    r
}

fn curve<'a>(doc: &'a ModelDocument, name: &str) -> ApiResult<&'a RationalCurve> {
    doc.curve(name).ok_or_else(|| ApiError::not_found("curve", name))
}

fn count(n: Option<usize>, default: usize, min: usize, what: &str) -> ApiResult<usize> {
    let n = n.unwrap_or(default);
    if n < min || n > MAX_SAMPLES {
        return Err(ApiError::invalid(format!("{what} must lie in [{min}, {MAX_SAMPLES}], got {n}")).at(what));
    }
    Ok(n)
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/model", get(get_model).put(put_model))
        .route("/curves", post(post_curve))
        .route("/surfaces", post(post_surface))
        .route("/curves/{name}/control/{index}", patch(patch_control))
        .route("/curves/{name}/samples", get(curve_samples))
        .route("/curves/{name}/comb", get(curve_comb))
        .route("/curves/{name}/spiral-report", get(spiral_report))
        .route("/continuity", get(continuity))
        .route("/surfaces/{name}/mesh", get(surface_mesh))
        .route("/surfaces/{name}/isolines", get(surface_isolines))
        .route("/spiral/solve", post(solve_spiral))
        .route("/export/iges", get(export_iges))
        .route("/render", get(render))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint") })
        .with_state(state)
}

/// Serves until ctrl-c.
pub async fn serve(bind: SocketAddr, doc: ModelDocument) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(bind).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(AppState::new(doc)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

async fn health(State(state): State<AppState>) -> Json<Value> {
    let (doc, revision) = state.snapshot();
    Json(json!({
        "status": "ok",
        "revision": revision,
        "curves": doc.curves().len(),
        "surfaces": doc.surfaces().len(),
        "version": env!("CARGO_PKG_VERSION"),
    }))
}

async fn get_model(State(state): State<AppState>) -> Response {
    let (doc, revision) = state.snapshot();
    with_revision(Json(&*doc).into_response(), revision)
}

async fn put_model(State(state): State<AppState>, body: Bytes) -> ApiResult<Json<Value>> {
    let value: Value = parse_body(&body)?;
    let doc = model_from_value(value)?;
    let ((), revision) = state.mutate(|d| {
        *d = doc;
        Ok(())
    })?;
    Ok(Json(json!({ "revision": revision })))
}

#[derive(Deserialize)]
struct NamedCurveBody {
    name: String,
    #[serde(flatten)]
    data: CurveData,
}

#[derive(Deserialize)]
struct NamedSurfaceBody {
    name: String,
    #[serde(flatten)]
    data: SurfaceData,
}

fn name_conflict(e: ModelError) -> ApiError {
    match e {
        ModelError::Validation { message, .. } => {
            ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "validation", message).at("name")
        }
        other => other.into(),
    }
}

async fn post_curve(State(state): State<AppState>, body: Bytes) -> ApiResult<Response> {
    let b: NamedCurveBody = parse_body(&body)?;
    let c = curve_from_data(b.data, "$")?;
    let name = b.name;
    let (_, revision) = state.mutate(|d| d.add_curve(name.clone(), c).map_err(name_conflict))?;
    Ok((StatusCode::CREATED, Json(json!({ "revision": revision, "name": name }))).into_response())
}

async fn post_surface(State(state): State<AppState>, body: Bytes) -> ApiResult<Response> {
    let b: NamedSurfaceBody = parse_body(&body)?;
    let s = surface_from_data(b.data, "$")?;
    let name = b.name;
    let (_, revision) = state.mutate(|d| d.add_surface(name.clone(), s).map_err(name_conflict))?;
    Ok((StatusCode::CREATED, Json(json!({ "revision": revision, "name": name }))).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ControlPatch {
    x: Option<f64>,
    y: Option<f64>,
    z: Option<f64>,
    w: Option<f64>,
}

async fn patch_control(
    State(state): State<AppState>,
    Path((name, index)): Path<(String, usize)>,
    body: Bytes,
) -> ApiResult<Json<Value>> {
    let p: ControlPatch = parse_body(&body)?;
    let (control, revision) = state.mutate(|d| {
        let c = curve(d, &name)?;
        let mut control = c.control().to_vec();
        let Some(cp) = control.get_mut(index) else {
            return Err(ApiError::new(
                StatusCode::NOT_FOUND,
                "not_found",
                format!("curve {name:?} has {} control points, no index {index}", c.control().len()),
            )
            .at(format!("control[{index}]")));
        };
        let old = *cp;
        *cp = ControlPoint::new(
            Point::new(
                p.x.unwrap_or(old.position.x),
                p.y.unwrap_or(old.position.y),
                p.z.unwrap_or(old.position.z),
            ),
            p.w.unwrap_or(old.weight),
        );
        let moved = *cp;
        if !moved.position.is_finite() {
            return Err(ApiError::invalid("coordinates must be finite").at(format!("control[{index}]")));
        }
        if !(moved.weight > 0.0 && moved.weight.is_finite()) {
            return Err(ApiError::invalid(format!("weight {} must be positive and finite", moved.weight))
                .at(format!("control[{index}].w")));
        }
        let updated = c.with_control(control)?;
        d.replace_curve(&name, updated);
        Ok(moved)
    })?;
    Ok(Json(json!({ "revision": revision, "name": name, "index": index, "control": control })))
}

#[derive(Deserialize)]
struct SamplesQuery {
    n: Option<usize>,
}

#[derive(Serialize)]
struct Sample {
    t: f64,
    point: Point,
}

async fn curve_samples(
    State(state): State<AppState>,
    Path(name): Path<String>,
    q: Result<Query<SamplesQuery>, axum::extract::rejection::QueryRejection>,
) -> ApiResult<Json<Value>> {
    let q = parse_query(q)?;
    let n = count(q.n, 64, 2, "n")?;
    let (doc, revision) = state.snapshot();
    let c = curve(&doc, &name)?;
    let samples = c
        .uniform_parameters(n)
        .into_iter()
        .map(|t| Ok(Sample { t, point: c.eval(t)? }))
        .collect::<ApiResult<Vec<_>>>()?;
    Ok(Json(json!({ "revision": revision, "name": name, "samples": samples })))
}

#[derive(Deserialize)]
struct CombQuery {
    n: Option<usize>,
    scale: Option<f64>,
}

async fn curve_comb(
    State(state): State<AppState>,
    Path(name): Path<String>,
    q: Result<Query<CombQuery>, axum::extract::rejection::QueryRejection>,
) -> ApiResult<Json<Value>> {
    let q = parse_query(q)?;
    let n = count(q.n, splinelab_core::interrogate::DEFAULT_COMB_SAMPLES, 2, "n")?;
    let (doc, revision) = state.snapshot();
    let c = curve(&doc, &name)?;
    let comb = match q.scale {
        Some(s) => curvature_comb(c, n, s),
        None => curvature_comb_auto(c, n),
    }?;
    Ok(Json(json!({ "revision": revision, "name": name, "comb": comb })))
}

#[derive(Deserialize)]
struct SpiralQuery {
    n: Option<usize>,
    tol: Option<f64>,
}

async fn spiral_report(
    State(state): State<AppState>,
    Path(name): Path<String>,
    q: Result<Query<SpiralQuery>, axum::extract::rejection::QueryRejection>,
) -> ApiResult<Json<Value>> {
    let q = parse_query(q)?;
    let n = count(q.n, 1000, splinelab_core::interrogate::MIN_SPIRAL_SAMPLES, "n")?;
    let (doc, revision) = state.snapshot();
    let c = curve(&doc, &name)?;
    let report = check_spiral(c, n, q.tol.unwrap_or(1e-9))?;
    Ok(Json(json!({ "revision": revision, "name": name, "report": report })))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct ContinuityQuery {
    a: String,
    b: String,
    tol_position: Option<f64>,
    tol_angle: Option<f64>,
    tol_curvature: Option<f64>,
}

async fn continuity(
    State(state): State<AppState>,
    q: Result<Query<ContinuityQuery>, axum::extract::rejection::QueryRejection>,
) -> ApiResult<Json<Value>> {
    let q = parse_query(q)?;
    let d = ContinuityTolerances::default();
    let tol = ContinuityTolerances {
        position: q.tol_position.unwrap_or(d.position),
        tangent_angle: q.tol_angle.unwrap_or(d.tangent_angle),
        curvature: q.tol_curvature.unwrap_or(d.curvature),
    };
    let (doc, revision) = state.snapshot();
    let report = check_continuity(curve(&doc, &q.a)?, curve(&doc, &q.b)?, &tol)?;
    Ok(Json(json!({ "revision": revision, "a": q.a, "b": q.b, "report": report })))
}

#[derive(Deserialize)]
struct MeshQuery {
    nu: Option<usize>,
    nv: Option<usize>,
    normals: Option<bool>,
}

async fn surface_mesh(
    State(state): State<AppState>,
    Path(name): Path<String>,
    q: Result<Query<MeshQuery>, axum::extract::rejection::QueryRejection>,
) -> ApiResult<Json<Value>> {
    let q = parse_query(q)?;
    let nu = count(q.nu, 16, 2, "nu")?;
    let nv = count(q.nv, 16, 2, "nv")?;
    if nu * nv > MAX_SAMPLES {
        return Err(ApiError::invalid(format!("mesh of {nu}x{nv} exceeds {MAX_SAMPLES} vertices")).at("nu"));
    }
    let (doc, revision) = state.snapshot();
    let s = doc.surface(&name).ok_or_else(|| ApiError::not_found("surface", &name))?;
    let mesh = s.sample_mesh(nu, nv, q.normals.unwrap_or(true))?;
    Ok(Json(json!({ "revision": revision, "name": name, "mesh": mesh })))
}

#[derive(Deserialize)]
struct IsolineQuery {
    dir: String,
    values: String,
}

async fn surface_isolines(
    State(state): State<AppState>,
    Path(name): Path<String>,
    q: Result<Query<IsolineQuery>, axum::extract::rejection::QueryRejection>,
) -> ApiResult<Json<Value>> {
    let q = parse_query(q)?;
    let dir = match q.dir.as_str() {
        "u" => IsolineDirection::UFixed,
        "v" => IsolineDirection::VFixed,
        other => return Err(ApiError::bad_request(format!("dir must be \"u\" or \"v\", got {other:?}")).at("dir")),
    };
    let values = q
        .values
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| ApiError::bad_request(format!("bad values list: {e}")).at("values"))?;
    let (doc, revision) = state.snapshot();
    let s = doc.surface(&name).ok_or_else(|| ApiError::not_found("surface", &name))?;
    let lines = s.isolines(dir, &values).map_err(|e| ApiError::from(e).at("values"))?;
    let body: Vec<Value> = lines
        .into_iter()
        .map(|iso| {
            json!({
                "direction": iso.direction,
                "value": iso.value,
                "curve": iso.curve,
            })
        })
        .collect();
    Ok(Json(json!({ "revision": revision, "name": name, "isolines": body })))
}

#[derive(Deserialize)]
struct SolveBody {
    #[serde(default)]
    name: Option<String>,
    #[serde(flatten)]
    spec: SpiralSpec,
}

async fn solve_spiral(State(state): State<AppState>, body: Bytes) -> ApiResult<Response> {
    let b: SolveBody = parse_body(&body)?;
    let curve = make_cubic_spiral(&b.spec).map_err(|e| ApiError::from(e).at("spec"))?;
    let report = check_spiral(&curve, 1000, 1e-9)?;
    let stored = curve.clone();
    let (name, revision) = state.mutate(|d| {
        let name = match b.name {
            Some(n) => n,
            None => d.unused_curve_name("spiral"),
        };
        d.add_curve(name.clone(), stored).map_err(name_conflict)?;
        Ok(name)
    })?;
    Ok((
        StatusCode::CREATED,
        Json(json!({ "revision": revision, "name": name, "curve": curve, "report": report })),
    )
        .into_response())
}

async fn export_iges(State(state): State<AppState>) -> Json<Value> {
    let (doc, revision) = state.snapshot();
    Json(json!({ "revision": revision, "format": "IGES 5.3", "iges": write_iges(&doc) }))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct RenderQuery {
    polygon: Option<bool>,
    comb: Option<bool>,
    comb_samples: Option<usize>,
    comb_scale: Option<f64>,
    end_circles: Option<bool>,
    width: Option<f64>,
}

async fn render(
    State(state): State<AppState>,
    q: Result<Query<RenderQuery>, axum::extract::rejection::QueryRejection>,
) -> ApiResult<Response> {
    let q = parse_query(q)?;
    let width = q.width.unwrap_or(800.0);
    if !(width > 0.0 && width.is_finite() && width <= 1e5) {
        return Err(ApiError::invalid(format!("width must lie in (0, 1e5], got {width}")).at("width"));
    }
    if let Some(s) = q.comb_scale {
        if !(s > 0.0 && s.is_finite()) {
            return Err(ApiError::invalid(format!("combScale must be positive, got {s}")).at("combScale"));
        }
    }
    let polygon = q.polygon.unwrap_or(true);
    let opts = SvgOptions {
        width,
        control_polygon: polygon,
        control_points: polygon,
        comb: if q.comb.unwrap_or(false) {
            Some(CombLayer {
                samples: count(q.comb_samples, splinelab_core::interrogate::DEFAULT_COMB_SAMPLES, 2, "combSamples")?,
                scale: q.comb_scale,
                curves: Vec::new(),
            })
        } else {
            None
        },
        end_circles: q.end_circles.unwrap_or(false),
        ..SvgOptions::default()
    };
    let (doc, revision) = state.snapshot();
    let scene = render_svg(&doc, &opts);
    let mut r = ([(header::CONTENT_TYPE, "image/svg+xml")], scene.text).into_response();
    if !scene.warnings.is_empty() {
        if let Ok(v) = HeaderValue::from_str(&scene.warnings.join("; ")) {
            r.headers_mut().insert("x-render-warnings", v);
        }
    }
    Ok(with_revision(r, revision))
}
