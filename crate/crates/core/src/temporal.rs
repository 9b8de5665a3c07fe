//! Memento registries and temporal resolution of annotations.
//!
//! Selection policy: the memento whose datetime is closest to the requested
//! instant wins; on a tie the earlier memento wins.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use crate::model::{Annotation, ModelError, TemporalClass, classify_temporal};
use crate::rdf::Iri;
use crate::time::Timestamp;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TemporalError {
    #[error("memento <{0}> cannot be its own original")]
    SelfReference(String),
    #[error("<{original}> already has a memento at {datetime}")]
    DuplicateDatetime { original: String, datetime: Timestamp },
    #[error("no mementos registered for <{0}>")]
    UnknownOriginal(String),
    #[error("line {line}: {reason}")]
    Snapshot { line: usize, reason: String },
}

/// An archived version of `original` as it was at `datetime`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Memento {
    pub original: Iri,
    pub memento_uri: Iri,
    pub datetime: Timestamp,
}

impl Memento {
    pub fn new(original: Iri, memento_uri: Iri, datetime: Timestamp) -> Result<Self, TemporalError> {
        if original == memento_uri {
            return Err(TemporalError::SelfReference(memento_uri.to_string()));
        }
        Ok(Memento {
            original,
            memento_uri,
            datetime,
        })
    }
}

/// Original resource → mementos in strictly increasing datetime order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TimeGateRegistry {
    versions: BTreeMap<Iri, Vec<Memento>>,
}

impl TimeGateRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, m: Memento) -> Result<(), TemporalError> {
        let list = self.versions.entry(m.original.clone()).or_default();
        match list.binary_search_by(|x| x.datetime.cmp(&m.datetime)) {
            Ok(_) => Err(TemporalError::DuplicateDatetime {
                original: m.original.to_string(),
                datetime: m.datetime,
            }),
            Err(pos) => {
                list.insert(pos, m);
                Ok(())
            }
        }
    }

    /// Value-returning form of [`TimeGateRegistry::register`].
    pub fn with_memento(mut self, m: Memento) -> Result<Self, TemporalError> {
        self.register(m)?;
        Ok(self)
    }

    pub fn mementos(&self, original: &Iri) -> Option<&[Memento]> {
        self.versions.get(original).map(Vec::as_slice)
    }

    pub fn is_registered(&self, original: &Iri) -> bool {
        self.versions.contains_key(original)
    }

    pub fn originals(&self) -> impl Iterator<Item = &Iri> {
        self.versions.keys()
    }

    pub fn find_by_memento_uri(&self, memento_uri: &Iri) -> Option<&Memento> {
        self.versions.values().flatten().find(|m| &m.memento_uri == memento_uri)
    }

    pub fn len(&self) -> usize {
        self.versions.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.versions.is_empty()
    }

    /// Closest memento to `at`; ties go to the earlier one.
    pub fn select(&self, original: &Iri, at: Timestamp) -> Result<&Memento, TemporalError> {
        let list = self
            .versions
            .get(original)
            .filter(|l| !l.is_empty())
            .ok_or_else(|| TemporalError::UnknownOriginal(original.to_string()))?;
        let after = list.partition_point(|m| m.datetime < at);
        let candidate = match (after.checked_sub(1).map(|i| &list[i]), list.get(after)) {
            (Some(before), Some(next)) => {
                if next.datetime.distance(&at) < before.datetime.distance(&at) {
                    next
                } else {
                    before
                }
            }
            (Some(before), None) => before,
            (None, Some(next)) => next,
            (None, None) => unreachable!("list is non-empty"),
        };
        Ok(candidate)
    }

    pub fn latest(&self, original: &Iri) -> Option<&Memento> {
        self.versions.get(original).and_then(|l| l.last())
    }

    /// One `original mementoUri datetime` line per memento, sorted.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for m in self.versions.values().flatten() {
            let _ = writeln!(out, "{} {} {}", m.original, m.memento_uri, m.datetime);
        }
        out
    }

    /// Reads the [`TimeGateRegistry::export`] format. Blank lines and `#`
    /// comments are skipped.
    pub fn import(text: &str) -> Result<Self, TemporalError> {
        let mut registry = TimeGateRegistry::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: String| TemporalError::Snapshot { line: n + 1, reason };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [original, memento, datetime] = fields.as_slice() else {
                return Err(err(format!("expected 3 fields, found {}", fields.len())));
            };
            let original = Iri::parse(*original).map_err(|e| err(e.to_string()))?;
            let memento = Iri::parse(*memento).map_err(|e| err(e.to_string()))?;
            let datetime: Timestamp = datetime
                .parse()
                .map_err(|e: crate::time::TimestampError| err(e.to_string()))?;
            registry
                .register(Memento::new(original, memento, datetime)?)
                .map_err(|e| err(e.to_string()))?;
        }
        Ok(registry)
    }
}

/// Free-function form of [`TimeGateRegistry::select`].
pub fn select_memento<'r>(
    r: &'r TimeGateRegistry,
    original: &Iri,
    at: Timestamp,
) -> Result<&'r Memento, TemporalError> {
    r.select(original, at)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ResolutionNote {
    /// A datetime applied but the registry holds no versions of the resource.
    NotArchived,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Resolution {
    pub original: Iri,
    pub requested: Option<Timestamp>,
    /// The original itself, or a registered memento URI.
    pub chosen: Iri,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub memento_datetime: Option<Timestamp>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<ResolutionNote>,
}

impl Resolution {
    fn identity(original: &Iri, requested: Option<Timestamp>, note: Option<ResolutionNote>) -> Self {
        Resolution {
            original: original.clone(),
            requested,
            chosen: original.clone(),
            memento_datetime: None,
            note,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.chosen == self.original
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolvedAnnotation {
    pub annotation_uri: Iri,
    pub class: &'static str,
    pub body: Resolution,
    pub targets: Vec<Resolution>,
}

fn resolve_at(r: &TimeGateRegistry, original: &Iri, at: Option<Timestamp>) -> Resolution {
    let Some(at) = at else {
        return Resolution::identity(original, None, None);
    };
    match r.select(original, at) {
        Ok(m) => Resolution {
            original: original.clone(),
            requested: Some(at),
            chosen: m.memento_uri.clone(),
            memento_datetime: Some(m.datetime),
            note: None,
        },
        Err(_) => Resolution::identity(original, Some(at), Some(ResolutionNote::NotArchived)),
    }
}

/// Reconstructs which version of the body and each target the annotation
/// refers to. Targets resolve through the resource they are about (the
/// constrained resource for constrained targets).
///
/// In a varied-time annotation, resources without their own time constraint
/// fall back to the annotation's creation time, or stay as they are when no
/// creation time is recorded.
pub fn resolve_annotation(a: &Annotation, r: &TimeGateRegistry) -> Result<ResolvedAnnotation, ModelError> {
    let class = classify_temporal(a)?;
    let (body_at, target_at): (Option<Timestamp>, Vec<Option<Timestamp>>) = match &class {
        TemporalClass::Timeless => (None, vec![None; a.targets.len()]),
        TemporalClass::Uniform { when } => (Some(*when), vec![Some(*when); a.targets.len()]),
        TemporalClass::Varied {
            body_when,
            target_whens,
        } => (
            body_when.or(a.created),
            target_whens.iter().map(|w| w.or(a.created)).collect(),
        ),
    };
    Ok(ResolvedAnnotation {
        annotation_uri: a.uri.clone(),
        class: class.name(),
        body: resolve_at(r, a.body.id(), body_at),
        targets: a
            .targets
            .iter()
            .zip(target_at)
            .map(|(t, at)| resolve_at(r, t.resource(), at))
            .collect(),
    })
}
