//! The annotation model: one body about one or more targets, optional
//! segment and time constraints, provenance, and semantic tags.

mod codec;
mod equivalence;
mod tags;
mod validate;
mod vocab;

use std::collections::{BTreeMap, BTreeSet};

use crate::rdf::{Iri, Term};
use crate::time::Timestamp;

pub use codec::{annotation_from_graph, annotation_to_graph, annotation_uris, validate_graph};
pub use equivalence::{EquivalenceMap, resolve_references};
pub use tags::{GraphResolver, NoopResolver, ResolverError, TagAttachment, TagResolver, attach_semantic_tag};
pub use validate::{TemporalClass, Violation, ViolationCode, classify_temporal, validate};
pub use vocab::{Vocabulary, VocabularyError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("<{0}> is not typed as an annotation")]
    NotAnAnnotation(String),
    #[error("annotation <{0}> has no body")]
    MissingBody(String),
    #[error("annotation <{0}> has more than one body")]
    MultipleBodies(String),
    #[error("annotation <{0}> has no targets")]
    NoTargets(String),
    #[error("malformed constraint on <{node}>: {reason}")]
    MalformedConstraint { node: String, reason: String },
    #[error("malformed node <{node}>: {reason}")]
    MalformedNode { node: String, reason: String },
    #[error("annotation <{0}> mixes an annotation-level time with time constraints")]
    AmbiguousTemporalClass(String),
    #[error("annotation <{uri}> is invalid: {}", violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid { uri: String, violations: Vec<Violation> },
    #[error("<{0}> is not a URN")]
    NotAUrn(String),
    #[error("<{0}> is not dereferenceable (http or https)")]
    NotDereferenceable(String),
    #[error("<{urn}> is already bound to <{existing}>")]
    ConflictingBinding { urn: String, existing: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeConstraint {
    pub id: Iri,
    pub when: Timestamp,
}

/// An SVG region; `source` is the verbatim single-element snippet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SvgConstraint {
    pub id: Iri,
    pub source: String,
}

/// Any other constraint class, carried as its type plus one value per
/// predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericConstraint {
    pub id: Iri,
    pub class: Iri,
    pub properties: BTreeMap<Iri, Term>,
}

/// The segment-describing constraint of a constrained target. Time
/// constraints attach separately (see [`Target::time_constraint`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SegmentConstraint {
    Svg(SvgConstraint),
    Generic(GenericConstraint),
}

impl SegmentConstraint {
    pub fn id(&self) -> &Iri {
        match self {
            SegmentConstraint::Svg(c) => &c.id,
            SegmentConstraint::Generic(c) => &c.id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BodyKind {
    External { uri: Iri },
    Inline { id: Iri, chars: String, encoding: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Body {
    pub kind: BodyKind,
    pub time_constraint: Option<TimeConstraint>,
}

impl Body {
    pub fn external(uri: Iri) -> Self {
        Body {
            kind: BodyKind::External { uri },
            time_constraint: None,
        }
    }

    /// Inline text body, `utf-8` encoded.
    pub fn inline(id: Iri, chars: impl Into<String>) -> Self {
        Body {
            kind: BodyKind::Inline {
                id,
                chars: chars.into(),
                encoding: "utf-8".to_string(),
            },
            time_constraint: None,
        }
    }

    pub fn with_time_constraint(mut self, tc: TimeConstraint) -> Self {
        self.time_constraint = Some(tc);
        self
    }

    /// The node naming the body in the graph.
    pub fn id(&self) -> &Iri {
        match &self.kind {
            BodyKind::External { uri } => uri,
            BodyKind::Inline { id, .. } => id,
        }
    }

    pub fn chars(&self) -> Option<&str> {
        match &self.kind {
            BodyKind::Inline { chars, .. } => Some(chars),
            BodyKind::External { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetKind {
    Direct {
        uri: Iri,
    },
    Constrained {
        id: Iri,
        constrains: Iri,
        constraint: SegmentConstraint,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Target {
    pub kind: TargetKind,
    pub time_constraint: Option<TimeConstraint>,
}

impl Target {
    pub fn direct(uri: Iri) -> Self {
        Target {
            kind: TargetKind::Direct { uri },
            time_constraint: None,
        }
    }

    pub fn constrained(id: Iri, constrains: Iri, constraint: SegmentConstraint) -> Self {
        Target {
            kind: TargetKind::Constrained {
                id,
                constrains,
                constraint,
            },
            time_constraint: None,
        }
    }

    pub fn with_time_constraint(mut self, tc: TimeConstraint) -> Self {
        self.time_constraint = Some(tc);
        self
    }

    /// The node linked by `hasTarget`.
    pub fn id(&self) -> &Iri {
        match &self.kind {
            TargetKind::Direct { uri } => uri,
            TargetKind::Constrained { id, .. } => id,
        }
    }

    /// The whole resource the target is about: the direct URI, or the
    /// constrained resource.
    pub fn resource(&self) -> &Iri {
        match &self.kind {
            TargetKind::Direct { uri } => uri,
            TargetKind::Constrained { constrains, .. } => constrains,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
pub struct Label {
    pub text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lang: Option<String>,
}

/// A linked resource loosely attached to the body, with cached labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticTag {
    pub resource: Iri,
    pub labels: Vec<Label>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    pub uri: Iri,
    pub body: Body,
    /// Kept sorted by [`Target::id`]; see [`Annotation::normalize`].
    pub targets: Vec<Target>,
    pub creator: Option<String>,
    pub created: Option<Timestamp>,
    /// Annotation-level `when`, marking a uniform-time annotation.
    pub when: Option<Timestamp>,
    pub semantic_tags: Vec<SemanticTag>,
    /// URN → HTTP URI bindings this document asserts with `owl:sameAs`.
    pub equivalences: BTreeMap<Iri, Iri>,
    /// Statements about the annotation node the model does not interpret.
    pub extra: BTreeSet<(Iri, Term)>,
}

impl Annotation {
    pub fn new(uri: Iri, body: Body, targets: Vec<Target>) -> Self {
        let mut a = Annotation {
            uri,
            body,
            targets,
            creator: None,
            created: None,
            when: None,
            semantic_tags: Vec::new(),
            equivalences: BTreeMap::new(),
            extra: BTreeSet::new(),
        };
        a.normalize();
        a
    }

    /// Puts targets, tags and labels in canonical order. Graphs are
    /// unordered, so this is the order `annotation_from_graph` returns.
    pub fn normalize(&mut self) {
        self.targets.sort_by(|a, b| a.id().cmp(b.id()));
        self.semantic_tags.sort_by(|a, b| a.resource.cmp(&b.resource));
        for tag in &mut self.semantic_tags {
            tag.labels.sort();
            tag.labels.dedup();
        }
    }

    pub fn time_constraints(&self) -> impl Iterator<Item = &TimeConstraint> {
        self.body
            .time_constraint
            .iter()
            .chain(self.targets.iter().filter_map(|t| t.time_constraint.as_ref()))
    }
}
