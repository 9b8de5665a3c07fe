use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::model::{Annotation, SegmentConstraint, TargetKind};
use crate::rdf::Iri;
use crate::segments::{Rect, bounding_box, parse_svg_constraint};
use crate::time::Timestamp;

use super::StoreError;

/// Conjunctive search criteria. At least one must be present, and `region`
/// needs `target_uri`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchQuery {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_uri: Option<Iri>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_from: Option<Timestamp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created_to: Option<Timestamp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<Rect>,
}

impl SearchQuery {
    pub fn target(uri: Iri) -> Self {
        SearchQuery {
            target_uri: Some(uri),
            ..Default::default()
        }
    }

    pub fn text(text: impl Into<String>) -> Self {
        SearchQuery {
            text: Some(text.into()),
            ..Default::default()
        }
    }

    pub fn check(&self) -> Result<(), StoreError> {
        let SearchQuery {
            target_uri,
            created_from,
            created_to,
            text,
            region,
        } = self;
        if target_uri.is_none() && created_from.is_none() && created_to.is_none() && text.is_none() && region.is_none()
        {
            return Err(StoreError::EmptyQuery);
        }
        if region.is_some() && target_uri.is_none() {
            return Err(StoreError::RegionWithoutTarget);
        }
        Ok(())
    }
}

/// The searchable projection of one annotation. Persisted one JSON object
/// per line in `index/entries.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct IndexEntry {
    pub uri: Iri,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created: Option<Timestamp>,
    /// Every resource a target points at, direct or constrained.
    pub targets: BTreeSet<Iri>,
    /// Lowercased inline body text.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    /// Constrained resource and the bounding box of its SVG region.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub regions: Vec<(Iri, Rect)>,
}

impl IndexEntry {
    pub fn of(a: &Annotation) -> Self {
        let mut regions = Vec::new();
        for t in &a.targets {
            if let TargetKind::Constrained {
                constrains,
                constraint: SegmentConstraint::Svg(svg),
                ..
            } = &t.kind
                && let Ok(shape) = parse_svg_constraint(&svg.source)
            {
                regions.push((constrains.clone(), bounding_box(&shape)));
            }
        }
        IndexEntry {
            uri: a.uri.clone(),
            created: a.created,
            targets: a.targets.iter().map(|t| t.resource().clone()).collect(),
            text: a.body.chars().map(str::to_lowercase),
            regions,
        }
    }

    fn matches(&self, q: &SearchQuery, needle: Option<&str>) -> bool {
        if let Some(t) = &q.target_uri
            && !self.targets.contains(t)
        {
            return false;
        }
        if q.created_from.is_some() || q.created_to.is_some() {
            let Some(created) = self.created else {
                return false;
            };
            if q.created_from.is_some_and(|from| created < from) || q.created_to.is_some_and(|to| created > to) {
                return false;
            }
        }
        if let Some(needle) = needle
            && !self.text.as_deref().is_some_and(|h| h.contains(needle))
        {
            return false;
        }
        if let (Some(region), Some(target)) = (&q.region, &q.target_uri)
            && !self
                .regions
                .iter()
                .any(|(r, bbox)| r == target && bbox.intersects(region))
        {
            return false;
        }
        true
    }

    fn sort_key(&self) -> (Option<Timestamp>, &Iri) {
        (self.created, &self.uri)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct Index {
    entries: BTreeMap<Iri, IndexEntry>,
    by_target: BTreeMap<Iri, BTreeSet<Iri>>,
}

impl Index {
    pub fn insert(&mut self, entry: IndexEntry) {
        self.remove(&entry.uri.clone());
        for t in &entry.targets {
            self.by_target.entry(t.clone()).or_default().insert(entry.uri.clone());
        }
        self.entries.insert(entry.uri.clone(), entry);
    }

    pub fn remove(&mut self, uri: &Iri) {
        let Some(old) = self.entries.remove(uri) else {
            return;
        };
        for t in &old.targets {
            if let Some(set) = self.by_target.get_mut(t) {
                set.remove(uri);
                if set.is_empty() {
                    self.by_target.remove(t);
                }
            }
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = &IndexEntry> {
        self.entries.values()
    }

    pub fn get(&self, uri: &Iri) -> Option<&IndexEntry> {
        self.entries.get(uri)
    }

    pub fn search(&self, q: &SearchQuery) -> Vec<Iri> {
        let needle = q.text.as_deref().map(str::to_lowercase);
        let candidates: Box<dyn Iterator<Item = &IndexEntry>> = match &q.target_uri {
            Some(t) => Box::new(
                self.by_target
                    .get(t)
                    .into_iter()
                    .flatten()
                    .filter_map(|u| self.entries.get(u)),
            ),
            None => Box::new(self.entries.values()),
        };
        let mut hits: Vec<&IndexEntry> = candidates.filter(|e| e.matches(q, needle.as_deref())).collect();
        hits.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        hits.into_iter().map(|e| e.uri.clone()).collect()
    }

    /// Annotations that target `uri`, ordered by creation time then URI.
    pub fn replies(&self, uri: &Iri) -> Vec<&IndexEntry> {
        let mut out: Vec<&IndexEntry> = self
            .by_target
            .get(uri)
            .into_iter()
            .flatten()
            .filter_map(|u| self.entries.get(u))
            .collect();
        out.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        out
    }
}
