use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{HeaderMap, HeaderValue, StatusCode, header};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use oac_core::rdf::{self, Iri, NamespaceTable, RdfFormat};
use oac_core::segments::Rect;
use oac_core::store::{PutOutcome, SearchQuery, StoreError};
use oac_core::temporal::{Memento, TemporalError};
use oac_core::time::Timestamp;

use crate::harvest::{HarvestError, harvest_feed};
use crate::negotiate::{NegotiationError, format_http_datetime, negotiate, parse_http_datetime};
use crate::pointer::resolve_pointers;
use crate::projection::project;
use crate::state::{AppState, IngestError, MementoContent};

pub struct ApiError {
    status: StatusCode,
    body: serde_json::Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl std::fmt::Display) -> Self {
        ApiError {
            status,
            body: json!({ "error": message.to_string() }),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<NegotiationError> for ApiError {
    fn from(e: NegotiationError) -> Self {
        match e {
            NegotiationError::NotAcceptable => ApiError::new(StatusCode::NOT_ACCEPTABLE, e),
            NegotiationError::MalformedDatetime(_) => ApiError::new(StatusCode::BAD_REQUEST, e),
        }
    }
}

impl From<IngestError> for ApiError {
    fn from(e: IngestError) -> Self {
        match &e {
            IngestError::Invalid(violations) | IngestError::Store(StoreError::ValidationFailed { violations, .. }) => {
                ApiError {
                    status: StatusCode::UNPROCESSABLE_ENTITY,
                    body: json!({ "error": e.to_string(), "violations": violations }),
                }
            }
            IngestError::Model(_) | IngestError::Store(StoreError::GraphMismatch { .. }) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e)
            }
            IngestError::Temporal(TemporalError::DuplicateDatetime { .. }) => ApiError::new(StatusCode::CONFLICT, e),
            IngestError::Temporal(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e),
            IngestError::Store(_) | IngestError::Io(_) => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e),
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn header_str(headers: &HeaderMap, name: impl header::AsHeaderName) -> Option<&str> {
    headers.get(name).and_then(|v| v.to_str().ok())
}

pub fn router(state: Arc<AppState>) -> Router {
    let mut router = Router::new()
        .route("/annotations", post(post_annotation))
        .route("/annotations/{id}", get(get_annotation))
        .route("/search", get(search))
        .route("/harvest", post(harvest))
        .route("/timegate/{*original}", get(timegate))
        .route("/mementos", post(post_memento))
        .route("/mementos/{id}", get(get_memento));
    if let Some(dir) = &state.ui_dir {
        router = router.nest_service("/ui", tower_http::services::ServeDir::new(dir));
    }
    router.with_state(state)
}

fn rdf_response(graph: &rdf::Graph, format: RdfFormat) -> (HeaderValue, String) {
    let text = match format {
        RdfFormat::NTriples => rdf::serialize(graph, format),
        RdfFormat::Turtle => rdf::serialize_turtle_with(graph, &NamespaceTable::default()),
    };
    (HeaderValue::from_static(format.media_type()), text)
}

fn timegate_links(state: &AppState, resources: impl Iterator<Item = Iri>) -> Option<HeaderValue> {
    let registry = state.registry();
    let mut seen = std::collections::BTreeSet::new();
    let links: Vec<String> = resources
        .filter(|r| registry.is_registered(r) && seen.insert(r.clone()))
        .map(|r| format!("<{}>; rel=\"timegate\"; anchor=\"{}\"", state.timegate_uri(&r), r))
        .collect();
    if links.is_empty() {
        None
    } else {
        HeaderValue::from_str(&links.join(", ")).ok()
    }
}

async fn get_annotation(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    headers: HeaderMap,
) -> ApiResult<Response> {
    let (id, json_view) = match id.strip_suffix(".json") {
        Some(stem) => (stem.to_string(), true),
        None => (id, false),
    };
    let not_found = || ApiError::new(StatusCode::NOT_FOUND, format!("no annotation {id}"));
    let uri = state.annotation_uri(&id).ok_or_else(not_found)?;
    let record = state.store.get(&uri).map_err(|_| not_found())?;
    let a = &record.annotation;

    let mut response = if json_view {
        let replies = state
            .store
            .search(&SearchQuery::target(uri.clone()))
            .unwrap_or_default();
        let regions = resolve_pointers(&state.http, a).await;
        Json(project(a, &replies, &regions)).into_response()
    } else {
        let n = negotiate(header_str(&headers, header::ACCEPT), None)?;
        let (content_type, text) = rdf_response(&record.raw_graph, n.format);
        let mut r = text.into_response();
        r.headers_mut().insert(header::CONTENT_TYPE, content_type);
        r.headers_mut().insert(header::VARY, HeaderValue::from_static("accept"));
        r
    };
    let resources = a
        .targets
        .iter()
        .map(|t| t.resource().clone())
        .chain(std::iter::once(a.body.id().clone()));
    if let Some(link) = timegate_links(&state, resources) {
        response.headers_mut().insert(header::LINK, link);
    }
    Ok(response)
}

async fn post_annotation(State(state): State<Arc<AppState>>, headers: HeaderMap, body: Bytes) -> ApiResult<Response> {
    let format = header_str(&headers, header::CONTENT_TYPE)
        .and_then(RdfFormat::from_media_type)
        .ok_or_else(|| {
            ApiError::new(
                StatusCode::UNSUPPORTED_MEDIA_TYPE,
                "Content-Type must be text/turtle or application/n-triples",
            )
        })?;
    let n = negotiate(header_str(&headers, header::ACCEPT), None)?;
    let text = std::str::from_utf8(&body).map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, "body is not UTF-8"))?;
    let graph = rdf::parse(text, format).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e))?;
    let uris = state.vocabulary().annotation_uris(&graph);
    let uri = match uris.as_slice() {
        [one] => one.clone(),
        [] => {
            return Err(ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "document contains no annotation",
            ));
        }
        _ => {
            return Err(ApiError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                "document contains more than one annotation",
            ));
        }
    };
    let state_ref = state.clone();
    let (a, outcome) = tokio::task::spawn_blocking(move || state_ref.ingest(&graph, &uri, true, None))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e))??;
    let record = state
        .store
        .get(&a.uri)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e))?;
    let (content_type, text) = rdf_response(&record.raw_graph, n.format);
    let status = if outcome == PutOutcome::Inserted {
        StatusCode::CREATED
    } else {
        StatusCode::OK
    };
    let mut r = (status, text).into_response();
    r.headers_mut().insert(header::CONTENT_TYPE, content_type);
    if let Ok(location) = HeaderValue::from_str(a.uri.as_str()) {
        r.headers_mut().insert(header::LOCATION, location);
    }
    Ok(r)
}

/// Query-string form of a search: every value is raw text.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
pub struct SearchParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub to: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<String>,
}

impl SearchParams {
    /// Dates are RFC 3339 instants or bare dates covering the whole day;
    /// `region` is `x,y,w,h`. Empty values are ignored.
    pub fn to_query(&self) -> Result<SearchQuery, String> {
        let nonempty = |s: &Option<String>| s.clone().filter(|s| !s.is_empty());
        Ok(SearchQuery {
            target_uri: nonempty(&self.target)
                .map(Iri::parse)
                .transpose()
                .map_err(|e| e.to_string())?,
            created_from: nonempty(&self.from).map(|v| parse_bound(&v, false)).transpose()?,
            created_to: nonempty(&self.to).map(|v| parse_bound(&v, true)).transpose()?,
            text: nonempty(&self.q),
            region: nonempty(&self.region).map(|v| parse_region(&v)).transpose()?,
        })
    }
}

fn parse_bound(value: &str, end_of_day: bool) -> Result<Timestamp, String> {
    if let Ok(t) = value.parse::<Timestamp>() {
        return Ok(t);
    }
    let time = if end_of_day { "23:59:59" } else { "00:00:00" };
    format!("{value}T{time}Z")
        .parse()
        .map_err(|_| format!("invalid date {value:?}"))
}

fn parse_region(value: &str) -> Result<Rect, String> {
    let bad = || format!("region must be x,y,w,h, got {value:?}");
    let n: Vec<f64> = value
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    match n.as_slice() {
        [x, y, w, h] if n.iter().all(|v| v.is_finite()) && *w >= 0.0 && *h >= 0.0 => Ok(Rect::new(*x, *y, *w, *h)),
        _ => Err(bad()),
    }
}

async fn search(State(state): State<Arc<AppState>>, Query(p): Query<SearchParams>) -> ApiResult<Json<Vec<Iri>>> {
    let q = p.to_query().map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e))?;
    state
        .store
        .search(&q)
        .map(Json)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e))
}

#[derive(Debug, Deserialize)]
struct HarvestRequest {
    feed: String,
}

async fn harvest(State(state): State<Arc<AppState>>, Json(req): Json<HarvestRequest>) -> ApiResult<Response> {
    let feed = Iri::parse(req.feed).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e))?;
    match harvest_feed(&state, &feed).await {
        Ok(report) => Ok(Json(report).into_response()),
        Err(e @ HarvestError::FeedUnreachable { .. }) => Err(ApiError::new(StatusCode::BAD_GATEWAY, e)),
    }
}

async fn timegate(
    State(state): State<Arc<AppState>>,
    Path(original): Path<String>,
    headers: HeaderMap,
) -> ApiResult<Response> {
    let original = Iri::parse(original).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e))?;
    let at = header_str(&headers, "accept-datetime")
        .map(parse_http_datetime)
        .transpose()?;
    let registry = state.registry();
    let chosen = match at {
        Some(at) => registry.select(&original, at).ok(),
        None => registry.latest(&original),
    }
    .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no mementos of <{original}>")))?;
    let link = format!(
        "<{original}>; rel=\"original\", <{}>; rel=\"memento\"; datetime=\"{}\"",
        chosen.memento_uri,
        format_http_datetime(chosen.datetime)
    );
    let mut r = StatusCode::FOUND.into_response();
    let h = r.headers_mut();
    h.insert(
        header::LOCATION,
        HeaderValue::from_str(chosen.memento_uri.as_str()).unwrap(),
    );
    h.insert(header::VARY, HeaderValue::from_static("accept-datetime"));
    h.insert(header::LINK, HeaderValue::from_str(&link).unwrap());
    Ok(r)
}

#[derive(Debug, Deserialize)]
struct MementoRequest {
    original: String,
    /// RFC 3339 or HTTP-date.
    datetime: String,
    memento: Option<String>,
    content: Option<String>,
    content_type: Option<String>,
}

async fn post_memento(State(state): State<Arc<AppState>>, Json(req): Json<MementoRequest>) -> ApiResult<Response> {
    let bad = |e: &dyn std::fmt::Display| ApiError::new(StatusCode::BAD_REQUEST, e);
    let original = Iri::parse(req.original).map_err(|e| bad(&e))?;
    let datetime = match req.datetime.parse::<Timestamp>() {
        Ok(t) => t,
        Err(_) => parse_http_datetime(&req.datetime)?,
    };
    let memento_uri = match req.memento {
        Some(m) => Iri::parse(m).map_err(|e| bad(&e))?,
        None => state.minted_memento_uri(&original, datetime),
    };
    let m = Memento::new(original, memento_uri, datetime)
        .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e))?;
    let content = req.content.map(|content| MementoContent {
        content_type: req.content_type.unwrap_or_else(|| "text/plain; charset=utf-8".into()),
        content,
    });
    state.register_memento(m.clone(), content)?;
    let mut r = (StatusCode::CREATED, Json(&m)).into_response();
    if let Ok(location) = HeaderValue::from_str(m.memento_uri.as_str()) {
        r.headers_mut().insert(header::LOCATION, location);
    }
    Ok(r)
}

async fn get_memento(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let not_found = || ApiError::new(StatusCode::NOT_FOUND, format!("no memento {id}"));
    let uri = Iri::parse(format!("{}/mementos/{id}", state.base_url())).map_err(|_| not_found())?;
    let m = state
        .registry()
        .find_by_memento_uri(&uri)
        .cloned()
        .ok_or_else(not_found)?;
    let content = state.memento_content(&uri).unwrap_or(MementoContent {
        content_type: "text/plain; charset=utf-8".into(),
        content: String::new(),
    });
    let mut r = content.content.into_response();
    let h = r.headers_mut();
    h.insert(
        header::CONTENT_TYPE,
        HeaderValue::from_str(&content.content_type).unwrap_or(HeaderValue::from_static("application/octet-stream")),
    );
    h.insert(
        "memento-datetime",
        HeaderValue::from_str(&format_http_datetime(m.datetime)).unwrap(),
    );
    let link = format!(
        "<{}>; rel=\"original\", <{}>; rel=\"timegate\"",
        m.original,
        state.timegate_uri(&m.original)
    );
    h.insert(header::LINK, HeaderValue::from_str(&link).unwrap());
    Ok(r)
}
