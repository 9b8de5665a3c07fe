use std::collections::BTreeMap;

use super::{Annotation, BodyKind, ModelError, SegmentConstraint, TargetKind};
use crate::rdf::Iri;

/// Server-asserted bindings from client-minted URNs to HTTP URIs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EquivalenceMap {
    bindings: BTreeMap<Iri, Iri>,
}

impl EquivalenceMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns a new map with the binding added. Re-registering an identical
    /// binding is allowed.
    pub fn register(&self, urn: Iri, http: Iri) -> Result<EquivalenceMap, ModelError> {
        if !urn.is_urn() {
            return Err(ModelError::NotAUrn(urn.to_string()));
        }
        if !http.is_dereferenceable() {
            return Err(ModelError::NotDereferenceable(http.to_string()));
        }
        if let Some(existing) = self.bindings.get(&urn)
            && *existing != http
        {
            return Err(ModelError::ConflictingBinding {
                urn: urn.to_string(),
                existing: existing.to_string(),
            });
        }
        let mut next = self.clone();
        next.bindings.insert(urn, http);
        Ok(next)
    }

    pub fn get(&self, urn: &Iri) -> Option<&Iri> {
        self.bindings.get(urn)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Iri, &Iri)> {
        self.bindings.iter()
    }
}

/// Replaces every bound URN used as a node identifier (annotation, body,
/// target, constrained resource, constraint) with its HTTP URI, and records
/// the binding so the emitted graph carries `owl:sameAs`. Unbound URNs pass
/// through unchanged. Idempotent.
pub fn resolve_references(a: &Annotation, m: &EquivalenceMap) -> Annotation {
    let mut out = a.clone();
    let mut applied = Vec::new();
    let mut swap = |iri: &mut Iri| {
        if let Some(http) = m.get(iri) {
            applied.push((iri.clone(), http.clone()));
            *iri = http.clone();
        }
    };
    swap(&mut out.uri);
    match &mut out.body.kind {
        BodyKind::External { uri } => swap(uri),
        BodyKind::Inline { id, .. } => swap(id),
    }
    if let Some(tc) = &mut out.body.time_constraint {
        swap(&mut tc.id);
    }
    for t in &mut out.targets {
        match &mut t.kind {
            TargetKind::Direct { uri } => swap(uri),
            TargetKind::Constrained {
                id,
                constrains,
                constraint,
            } => {
                swap(id);
                swap(constrains);
                match constraint {
                    SegmentConstraint::Svg(c) => swap(&mut c.id),
                    SegmentConstraint::Generic(c) => swap(&mut c.id),
                }
            }
        }
        if let Some(tc) = &mut t.time_constraint {
            swap(&mut tc.id);
        }
    }
    out.equivalences.extend(applied);
    out.normalize();
    out
}
