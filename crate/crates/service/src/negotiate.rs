//! Content negotiation in the format and datetime dimensions.

use std::time::SystemTime;

use oac_core::rdf::RdfFormat;
use oac_core::time::Timestamp;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NegotiationError {
    #[error("none of the acceptable media types is available (offered: text/turtle, application/n-triples)")]
    NotAcceptable,
    #[error("malformed Accept-Datetime {0:?}")]
    MalformedDatetime(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NegotiationResult {
    pub format: RdfFormat,
    pub datetime: Option<Timestamp>,
}

impl NegotiationResult {
    pub fn media_type(&self) -> &'static str {
        self.format.media_type()
    }
}

/// Offered formats, most preferred first.
const OFFERS: [RdfFormat; 2] = [RdfFormat::Turtle, RdfFormat::NTriples];

struct Range<'a> {
    kind: &'a str,
    subtype: &'a str,
    q: f64,
}

fn parse_ranges(header: &str) -> Vec<Range<'_>> {
    header
        .split(',')
        .filter_map(|item| {
            let mut parts = item.split(';').map(str::trim);
            let (kind, subtype) = parts.next()?.split_once('/')?;
            let mut q = 1.0;
            for p in parts {
                if let Some((k, v)) = p.split_once('=')
                    && k.trim().eq_ignore_ascii_case("q")
                {
                    q = v
                        .trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|q| (0.0..=1.0).contains(q))
                        .unwrap_or(0.0);
                }
            }
            Some(Range {
                kind: kind.trim(),
                subtype: subtype.trim(),
                q,
            })
        })
        .collect()
}

/// Quality of `media_type` under the most specific matching range.
fn quality(ranges: &[Range<'_>], media_type: &str) -> f64 {
    let (kind, subtype) = media_type.split_once('/').unwrap();
    let mut best: Option<(u8, f64)> = None;
    for r in ranges {
        let specificity = if r.kind.eq_ignore_ascii_case(kind) && r.subtype.eq_ignore_ascii_case(subtype) {
            2
        } else if r.kind.eq_ignore_ascii_case(kind) && r.subtype == "*" {
            1
        } else if r.kind == "*" && r.subtype == "*" {
            0
        } else {
            continue;
        };
        if best.is_none_or(|(s, _)| specificity > s) {
            best = Some((specificity, r.q));
        }
    }
    best.map_or(0.0, |(_, q)| q)
}

/// Picks the RDF format by q-value (ties and a missing header go to Turtle)
/// and parses `Accept-Datetime` as an HTTP-date.
pub fn negotiate(accept: Option<&str>, accept_datetime: Option<&str>) -> Result<NegotiationResult, NegotiationError> {
    let format = match accept.map(str::trim).filter(|a| !a.is_empty()) {
        None => RdfFormat::Turtle,
        Some(header) => {
            let ranges = parse_ranges(header);
            let mut chosen = None;
            let mut best = 0.0;
            for f in OFFERS {
                let q = quality(&ranges, f.media_type());
                if q > best {
                    best = q;
                    chosen = Some(f);
                }
            }
            chosen.ok_or(NegotiationError::NotAcceptable)?
        }
    };
    let datetime = accept_datetime.map(parse_http_datetime).transpose()?;
    Ok(NegotiationResult { format, datetime })
}

pub fn parse_http_datetime(value: &str) -> Result<Timestamp, NegotiationError> {
    let malformed = || NegotiationError::MalformedDatetime(value.to_string());
    let t = httpdate::parse_http_date(value.trim()).map_err(|_| malformed())?;
    let secs = match t.duration_since(SystemTime::UNIX_EPOCH) {
        Ok(d) => d.as_secs() as i64,
        Err(e) => -(e.duration().as_secs() as i64),
    };
    Timestamp::from_unix(secs).ok_or_else(malformed)
}

/// IMF-fixdate, the preferred HTTP-date form.
pub fn format_http_datetime(t: Timestamp) -> String {
    t.as_datetime().format("%a, %d %b %Y %H:%M:%S GMT").to_string()
}
