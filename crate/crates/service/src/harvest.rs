//! Publish/discover ingestion: a feed is a plain list of annotation document
//! URIs, one per line, with `#` comments.

use serde::Serialize;

use oac_core::rdf::{self, Iri, RdfFormat};
use oac_core::store::PutOutcome;

use crate::state::AppState;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HarvestFailure {
    pub entry: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HarvestReport {
    pub feed: Iri,
    /// Entries that added or changed at least one annotation.
    pub ingested: usize,
    /// Entries whose annotations were already stored unchanged.
    pub skipped: usize,
    pub failures: Vec<HarvestFailure>,
}

#[derive(Debug, thiserror::Error)]
pub enum HarvestError {
    #[error("feed <{feed}> is unreachable: {reason}")]
    FeedUnreachable { feed: String, reason: String },
}

const ACCEPT: &str = "text/turtle, application/n-triples;q=0.9";

struct Fetched {
    body: String,
    content_type: Option<String>,
}

async fn fetch(client: &reqwest::Client, uri: &Iri, accept: &str) -> Result<Fetched, String> {
    let response = client
        .get(uri.as_str())
        .header(reqwest::header::ACCEPT, accept)
        .send()
        .await
        .map_err(|e| e.to_string())?;
    let status = response.status();
    if !status.is_success() {
        return Err(format!("HTTP {status}"));
    }
    let content_type = response
        .headers()
        .get(reqwest::header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .map(str::to_string);
    let body = response.text().await.map_err(|e| e.to_string())?;
    Ok(Fetched { body, content_type })
}

/// Entries of a feed document, or the offending line.
pub fn parse_feed(text: &str) -> Vec<Result<Iri, HarvestFailure>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let failure = |error: String| HarvestFailure {
                entry: l.to_string(),
                error,
            };
            let iri = Iri::parse(l).map_err(|e| failure(e.to_string()))?;
            if !iri.is_dereferenceable() {
                return Err(failure("entry is not an http(s) URI".into()));
            }
            Ok(iri)
        })
        .collect()
}

fn document_format(entry: &Iri, content_type: Option<&str>) -> RdfFormat {
    content_type
        .and_then(RdfFormat::from_media_type)
        .or_else(|| RdfFormat::from_extension(entry.as_str()))
        .unwrap_or(RdfFormat::Turtle)
}

async fn harvest_entry(state: &AppState, feed: &Iri, entry: &Iri) -> Result<bool, String> {
    let doc = fetch(&state.http, entry, ACCEPT).await?;
    let format = document_format(entry, doc.content_type.as_deref());
    let graph = rdf::parse(&doc.body, format).map_err(|e| format!("{format} parse error: {e}"))?;
    let uris = state.vocabulary().annotation_uris(&graph);
    if uris.is_empty() {
        return Err("document contains no annotation".into());
    }
    let mut changed = false;
    for uri in uris {
        let (_, outcome) = state
            .ingest(&graph, &uri, false, Some(feed.clone()))
            .map_err(|e| e.to_string())?;
        changed |= outcome != PutOutcome::Unchanged;
    }
    Ok(changed)
}

/// Fetches the feed and ingests every entry. Entry failures are collected,
/// never fatal. Harvests of one feed run one at a time.
pub async fn harvest_feed(state: &AppState, feed: &Iri) -> Result<HarvestReport, HarvestError> {
    let lock = state.feed_lock(feed);
    let _guard = lock.lock().await;
    let text = fetch(&state.http, feed, "text/plain, */*;q=0.5")
        .await
        .map_err(|reason| HarvestError::FeedUnreachable {
            feed: feed.to_string(),
            reason,
        })?
        .body;
    let mut report = HarvestReport {
        feed: feed.clone(),
        ingested: 0,
        skipped: 0,
        failures: Vec::new(),
    };
    for entry in parse_feed(&text) {
        let entry = match entry {
            Ok(e) => e,
            Err(f) => {
                report.failures.push(f);
                continue;
            }
        };
        match harvest_entry(state, feed, &entry).await {
            Ok(true) => report.ingested += 1,
            Ok(false) => report.skipped += 1,
            Err(error) => {
                tracing::warn!(%entry, %error, "harvest entry failed");
                report.failures.push(HarvestFailure {
                    entry: entry.to_string(),
                    error,
                })
            }
        }
    }
    Ok(report)
}
