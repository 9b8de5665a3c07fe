//! Regions by reference: a target URI whose fragment carries `ptr=<uri>`
//! names a separately published SVG constraint document.

use std::collections::BTreeMap;

use oac_core::model::Annotation;
use oac_core::rdf::Iri;
use oac_core::segments::{ParsedFragment, SvgShape, parse_media_fragment, parse_svg_constraint};

pub type Regions = BTreeMap<Iri, Result<SvgShape, String>>;

/// The media fragment of `uri`, if it has one that parses.
pub fn fragment_of(uri: &Iri) -> Option<ParsedFragment> {
    let (_, fragment) = uri.as_str().split_once('#')?;
    parse_media_fragment(fragment).ok().filter(|p| !p.fragment.is_empty())
}

/// Every distinct `ptr` value among the targets of `a`.
pub fn pointers(a: &Annotation) -> Vec<Iri> {
    let mut out: Vec<Iri> = a
        .targets
        .iter()
        .flat_map(|t| [t.id(), t.resource()])
        .filter_map(|uri| fragment_of(uri)?.fragment.ptr)
        .collect();
    out.sort();
    out.dedup();
    out
}

pub async fn fetch_constraint(client: &reqwest::Client, ptr: &Iri) -> Result<SvgShape, String> {
    let response = client
        .get(ptr.as_str())
        .header(
            reqwest::header::ACCEPT,
            "image/svg+xml, application/xml;q=0.9, */*;q=0.1",
        )
        .send()
        .await
        .map_err(|e| e.to_string())?;
    let status = response.status();
    if !status.is_success() {
        return Err(format!("HTTP {status}"));
    }
    let text = response.text().await.map_err(|e| e.to_string())?;
    parse_svg_constraint(&text).map_err(|e| e.to_string())
}

pub async fn resolve_pointers(client: &reqwest::Client, a: &Annotation) -> Regions {
    let mut out = Regions::new();
    for ptr in pointers(a) {
        let shape = fetch_constraint(client, &ptr).await;
        out.insert(ptr, shape);
    }
    out
}
