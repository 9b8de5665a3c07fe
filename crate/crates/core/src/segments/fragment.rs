use std::collections::HashSet;

use percent_encoding::{AsciiSet, NON_ALPHANUMERIC, percent_decode_str, utf8_percent_encode};
use serde::{Deserialize, Serialize};

use super::SegmentError;
use crate::rdf::Iri;

/// Everything except RFC 3986 unreserved characters.
const VALUE: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'.').remove(b'_').remove(b'~');

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemporalDimension {
    pub start: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub end: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpatialUnit {
    Pixel,
    Percent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialDimension {
    pub unit: SpatialUnit,
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

/// Parsed media fragment dimensions. `ptr` points at a resource describing
/// the region by reference.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MediaFragment {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temporal: Option<TemporalDimension>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spatial: Option<SpatialDimension>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub track: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ptr: Option<Iri>,
}

impl MediaFragment {
    pub fn is_empty(&self) -> bool {
        *self == MediaFragment::default()
    }

    pub fn check(&self) -> Result<(), SegmentError> {
        if let Some(t) = &self.temporal {
            validate_temporal(t)?;
        }
        if let Some(s) = &self.spatial {
            validate_spatial(s)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParsedFragment {
    pub fragment: MediaFragment,
    /// Keys that were not recognised and were skipped.
    pub warnings: Vec<String>,
}

fn malformed(key: &str, reason: impl Into<String>) -> SegmentError {
    SegmentError::MalformedDimension {
        key: key.to_string(),
        reason: reason.into(),
    }
}

fn number(key: &str, text: &str) -> Result<f64, SegmentError> {
    let digits = text.chars().filter(|c| c.is_ascii_digit()).count();
    let dots = text.chars().filter(|&c| c == '.').count();
    if digits == 0 || dots > 1 || digits + dots != text.len() {
        return Err(malformed(key, format!("{text:?} is not a non-negative number")));
    }
    text.parse::<f64>()
        .map_err(|_| malformed(key, format!("{text:?} is not a number")))
}

fn decode(key: &str, value: &str) -> Result<String, SegmentError> {
    percent_decode_str(value)
        .decode_utf8()
        .map(|s| s.into_owned())
        .map_err(|_| malformed(key, "value is not valid UTF-8 after percent-decoding"))
}

fn parse_temporal(value: &str) -> Result<TemporalDimension, SegmentError> {
    let value = value.strip_prefix("npt:").unwrap_or(value);
    let (start, end) = match value.split_once(',') {
        Some((s, e)) => (s, Some(e)),
        None => (value, None),
    };
    let start = if start.is_empty() { 0.0 } else { number("t", start)? };
    let end = end.map(|e| number("t", e)).transpose()?;
    if end.is_none() && value.is_empty() {
        return Err(malformed("t", "empty value"));
    }
    let dim = TemporalDimension { start, end };
    validate_temporal(&dim)?;
    Ok(dim)
}

fn validate_temporal(dim: &TemporalDimension) -> Result<(), SegmentError> {
    if !(dim.start.is_finite() && dim.start >= 0.0) {
        return Err(malformed("t", "start must be a non-negative number"));
    }
    if let Some(end) = dim.end
        && !(end.is_finite() && end > dim.start)
    {
        return Err(malformed("t", "end must be greater than start"));
    }
    Ok(())
}

fn parse_spatial(value: &str) -> Result<SpatialDimension, SegmentError> {
    let (unit, coords) = if let Some(rest) = value.strip_prefix("pixel:") {
        (SpatialUnit::Pixel, rest)
    } else if let Some(rest) = value.strip_prefix("percent:") {
        (SpatialUnit::Percent, rest)
    } else {
        (SpatialUnit::Pixel, value)
    };
    let parts: Vec<&str> = coords.split(',').collect();
    if parts.len() != 4 {
        return Err(malformed("xywh", format!("expected 4 values, got {}", parts.len())));
    }
    let n: Vec<f64> = parts.iter().map(|p| number("xywh", p)).collect::<Result<_, _>>()?;
    let dim = SpatialDimension {
        unit,
        x: n[0],
        y: n[1],
        w: n[2],
        h: n[3],
    };
    validate_spatial(&dim)?;
    Ok(dim)
}

fn validate_spatial(dim: &SpatialDimension) -> Result<(), SegmentError> {
    let values = [dim.x, dim.y, dim.w, dim.h];
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(malformed("xywh", "values must be non-negative numbers"));
    }
    if dim.unit == SpatialUnit::Percent && values.iter().any(|v| *v > 100.0) {
        return Err(malformed("xywh", "percent values must not exceed 100"));
    }
    Ok(())
}

/// Parse the part of a URI after `#`. A leading `#` is tolerated.
pub fn parse_media_fragment(fragment: &str) -> Result<ParsedFragment, SegmentError> {
    let fragment = fragment.strip_prefix('#').unwrap_or(fragment);
    let mut out = MediaFragment::default();
    let mut warnings = Vec::new();
    let mut seen = HashSet::new();
    for pair in fragment.split('&').filter(|p| !p.is_empty()) {
        let Some((key, value)) = pair.split_once('=') else {
            warnings.push(format!("ignored `{pair}`: no value"));
            continue;
        };
        let known = matches!(key, "t" | "xywh" | "track" | "id" | "ptr");
        if !known {
            warnings.push(format!("ignored unknown key `{key}`"));
            continue;
        }
        if !seen.insert(key) {
            return Err(SegmentError::DuplicateKey(key.to_string()));
        }
        match key {
            "t" => out.temporal = Some(parse_temporal(value)?),
            "xywh" => out.spatial = Some(parse_spatial(value)?),
            "track" => out.track = Some(decode(key, value)?),
            "id" => out.id = Some(decode(key, value)?),
            "ptr" => {
                let decoded = decode(key, value)?;
                out.ptr = Some(Iri::parse(decoded).map_err(|e| malformed("ptr", e.to_string()))?);
            }
            _ => unreachable!("filtered above"),
        }
    }
    Ok(ParsedFragment {
        fragment: out,
        warnings,
    })
}

/// Keys are written in the fixed order t, xywh, track, id, ptr. Pixel
/// regions omit the unit prefix. Dimensions are assumed to satisfy the
/// parser's invariants; use [`MediaFragment::check`] first when unsure.
pub fn serialize_media_fragment(f: &MediaFragment) -> String {
    let mut parts = Vec::new();
    if let Some(t) = &f.temporal {
        parts.push(match t.end {
            Some(end) => format!("t={},{}", t.start, end),
            None => format!("t={}", t.start),
        });
    }
    if let Some(s) = &f.spatial {
        let prefix = match s.unit {
            SpatialUnit::Pixel => "",
            SpatialUnit::Percent => "percent:",
        };
        parts.push(format!("xywh={prefix}{},{},{},{}", s.x, s.y, s.w, s.h));
    }
    if let Some(track) = &f.track {
        parts.push(format!("track={}", utf8_percent_encode(track, VALUE)));
    }
    if let Some(id) = &f.id {
        parts.push(format!("id={}", utf8_percent_encode(id, VALUE)));
    }
    if let Some(ptr) = &f.ptr {
        parts.push(format!("ptr={}", utf8_percent_encode(ptr.as_str(), VALUE)));
    }
    parts.join("&")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xywh_pixels_by_default() {
        let parsed = parse_media_fragment("xywh=10,20,30,40").unwrap();
        assert_eq!(
            parsed.fragment.spatial,
            Some(SpatialDimension {
                unit: SpatialUnit::Pixel,
                x: 10.0,
                y: 20.0,
                w: 30.0,
                h: 40.0
            })
        );
        assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn temporal_range() {
        let parsed = parse_media_fragment("t=10,20").unwrap();
        assert_eq!(
            parsed.fragment.temporal,
            Some(TemporalDimension {
                start: 10.0,
                end: Some(20.0)
            })
        );
        let parsed = parse_media_fragment("t=npt:,7.5").unwrap();
        assert_eq!(parsed.fragment.temporal.unwrap().start, 0.0);
    }

    #[test]
    fn ptr_is_percent_decoded() {
        let parsed = parse_media_fragment("ptr=http%3A%2F%2Fsrv%2Fconstraints%2F7").unwrap();
        assert_eq!(parsed.fragment.ptr.unwrap().as_str(), "http://srv/constraints/7");
    }

    #[test]
    fn ptr_must_be_absolute() {
        let err = parse_media_fragment("ptr=constraints%2F7").unwrap_err();
        assert!(matches!(err, SegmentError::MalformedDimension { ref key, .. } if key == "ptr"));
    }

    #[test]
    fn unknown_keys_warn() {
        let parsed = parse_media_fragment("xywh=1,2,3,4&foo=bar&lonely").unwrap();
        assert_eq!(parsed.warnings.len(), 2);
        assert!(parsed.fragment.spatial.is_some());
    }

    #[test]
    fn duplicate_key() {
        assert_eq!(
            parse_media_fragment("t=1&t=2").unwrap_err(),
            SegmentError::DuplicateKey("t".into())
        );
    }

    #[test]
    fn malformed_dimensions_name_the_key() {
        for (input, key) in [
            ("t=20,10", "t"),
            ("t=abc", "t"),
            ("t=", "t"),
            ("xywh=1,2,3", "xywh"),
            ("xywh=percent:10,10,150,10", "xywh"),
            ("xywh=-1,2,3,4", "xywh"),
        ] {
            match parse_media_fragment(input) {
                Err(SegmentError::MalformedDimension { key: k, .. }) => assert_eq!(k, key, "{input}"),
                other => panic!("{input}: {other:?}"),
            }
        }
    }

    #[test]
    fn serialize_order_and_forms() {
        let f = MediaFragment {
            temporal: Some(TemporalDimension { start: 1.5, end: None }),
            spatial: Some(SpatialDimension {
                unit: SpatialUnit::Percent,
                x: 1.0,
                y: 2.0,
                w: 3.0,
                h: 4.0,
            }),
            track: Some("audio one".into()),
            id: Some("chapter&1".into()),
            ptr: Some(Iri::parse("http://srv/c/7").unwrap()),
        };
        let s = serialize_media_fragment(&f);
        assert_eq!(
            s,
            "t=1.5&xywh=percent:1,2,3,4&track=audio%20one&id=chapter%261&ptr=http%3A%2F%2Fsrv%2Fc%2F7"
        );
        assert_eq!(parse_media_fragment(&s).unwrap().fragment, f);
    }

    #[test]
    fn spatial_only_and_empty() {
        let f = parse_media_fragment("xywh=pixel:10,20,30,40").unwrap().fragment;
        assert_eq!(serialize_media_fragment(&f), "xywh=10,20,30,40");
        assert_eq!(serialize_media_fragment(&MediaFragment::default()), "");
        assert!(parse_media_fragment("").unwrap().fragment.is_empty());
    }
}
