#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Arc;

use axum::Router;
use axum::extract::{Path, State};
use axum::http::{StatusCode, header};
use axum::response::IntoResponse;
use axum::routing::get;
use parking_lot::RwLock;

use oac_core::model::Vocabulary;
use oac_service::{AppState, Config, router};

pub struct Running {
    pub base: String,
    pub state: Arc<AppState>,
}

async fn bind() -> (tokio::net::TcpListener, String) {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    (listener, base)
}

fn spawn_router(listener: tokio::net::TcpListener, app: Router) {
    tokio::spawn(async move {
        axum::serve(listener, app).await.unwrap();
    });
}

/// The service with in-memory state on an ephemeral port.
pub async fn start() -> Running {
    let (listener, base) = bind().await;
    let state = Arc::new(AppState::in_memory(&base, Vocabulary::default()));
    spawn_router(listener, router(state.clone()));
    Running { base, state }
}

/// The service backed by `config.data_dir`.
pub async fn start_with(mut config: Config) -> Running {
    let (listener, base) = bind().await;
    config.base_url = Some(base.clone());
    let state = Arc::new(AppState::open(&config).unwrap());
    spawn_router(listener, router(state.clone()));
    Running { base, state }
}

pub type Pages = Arc<RwLock<HashMap<String, (String, String)>>>;

/// Serves `pages` (path → content type, body); anything else is 404.
pub struct FixtureServer {
    pub base: String,
    pub pages: Pages,
}

impl FixtureServer {
    pub async fn start() -> Self {
        async fn page(State(pages): State<Pages>, Path(path): Path<String>) -> axum::response::Response {
            match pages.read().get(&path) {
                Some((ct, body)) => ([(header::CONTENT_TYPE, ct.clone())], body.clone()).into_response(),
                None => StatusCode::NOT_FOUND.into_response(),
            }
        }
        let (listener, base) = bind().await;
        let pages: Pages = Default::default();
        spawn_router(
            listener,
            Router::new().route("/{*path}", get(page)).with_state(pages.clone()),
        );
        FixtureServer { base, pages }
    }

    pub fn put(&self, path: &str, content_type: &str, body: impl Into<String>) -> String {
        self.pages
            .write()
            .insert(path.to_string(), (content_type.to_string(), body.into()));
        format!("{}/{path}", self.base)
    }
}

pub fn client() -> reqwest::Client {
    reqwest::Client::builder()
        .redirect(reqwest::redirect::Policy::none())
        .build()
        .unwrap()
}

pub const TTL: &str = "text/turtle";
pub const NT: &str = "application/n-triples";

/// A client-side annotation: URN ids for the annotation and its inline body.
pub fn draft(n: u32, target: &str, text: &str) -> String {
    format!(
        r#"@prefix oac: <http://www.openannotation.org/ns/> .
@prefix cnt: <http://www.w3.org/2008/content#> .
@prefix dcterms: <http://purl.org/dc/terms/> .
<urn:uuid:00000000-0000-4000-8000-{n:012}> a oac:Annotation ;
    oac:hasBody <urn:uuid:00000000-0000-4000-9000-{n:012}> ;
    oac:hasTarget <{target}> ;
    dcterms:created "2010-04-0{}T10:00:00Z"^^<http://www.w3.org/2001/XMLSchema#dateTime> .
<urn:uuid:00000000-0000-4000-9000-{n:012}> a oac:Body, cnt:ContentAsText ;
    cnt:chars "{text}" ;
    cnt:characterEncoding "utf-8" .
<{target}> a oac:Target .
"#,
        1 + n % 9
    )
}

/// A published annotation document with an HTTP URI.
pub fn published(uri: &str, target: &str, text: &str) -> String {
    format!(
        r#"@prefix oac: <http://www.openannotation.org/ns/> .
@prefix cnt: <http://www.w3.org/2008/content#> .
<{uri}> a oac:Annotation ;
    oac:hasBody <{uri}/body> ;
    oac:hasTarget <{target}> .
<{uri}/body> a oac:Body, cnt:ContentAsText ;
    cnt:chars "{text}" .
"#
    )
}
