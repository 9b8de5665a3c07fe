use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::{Annotation, BodyKind, ModelError, SegmentConstraint, TargetKind};
use crate::segments::parse_svg_constraint;
use crate::time::Timestamp;

/// Stable violation codes. The string forms are part of the CLI and HTTP
/// output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ViolationCode {
    NotAnAnnotation,
    MissingBody,
    MultipleBodies,
    NoTargets,
    DuplicateTarget,
    EmptyInlineBody,
    MissingEncoding,
    InvalidSvgConstraint,
    MalformedConstraint,
    MalformedNode,
    AmbiguousTemporalClass,
}

impl ViolationCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ViolationCode::NotAnAnnotation => "NotAnAnnotation",
            ViolationCode::MissingBody => "MissingBody",
            ViolationCode::MultipleBodies => "MultipleBodies",
            ViolationCode::NoTargets => "NoTargets",
            ViolationCode::DuplicateTarget => "DuplicateTarget",
            ViolationCode::EmptyInlineBody => "EmptyInlineBody",
            ViolationCode::MissingEncoding => "MissingEncoding",
            ViolationCode::InvalidSvgConstraint => "InvalidSvgConstraint",
            ViolationCode::MalformedConstraint => "MalformedConstraint",
            ViolationCode::MalformedNode => "MalformedNode",
            ViolationCode::AmbiguousTemporalClass => "AmbiguousTemporalClass",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub code: ViolationCode,
    /// The offending node.
    pub node: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <{}>", self.code, self.node)
    }
}

pub fn validate(a: &Annotation) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |code, node: &dyn fmt::Display| {
        out.push(Violation {
            code,
            node: node.to_string(),
        })
    };
    if a.targets.is_empty() {
        push(ViolationCode::NoTargets, &a.uri);
    }
    if let BodyKind::Inline { id, chars, encoding } = &a.body.kind {
        if chars.is_empty() {
            push(ViolationCode::EmptyInlineBody, id);
        }
        if encoding.trim().is_empty() {
            push(ViolationCode::MissingEncoding, id);
        }
    }
    let mut seen = BTreeSet::new();
    for t in &a.targets {
        if !seen.insert(t.id()) {
            push(ViolationCode::DuplicateTarget, t.id());
        }
        if let TargetKind::Constrained {
            constraint: SegmentConstraint::Svg(c),
            ..
        } = &t.kind
            && parse_svg_constraint(&c.source).is_err()
        {
            push(ViolationCode::InvalidSvgConstraint, &c.id);
        }
    }
    if a.when.is_some() && a.time_constraints().next().is_some() {
        push(ViolationCode::AmbiguousTemporalClass, &a.uri);
    }
    out
}

/// The three temporal readings of an annotation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "class")]
pub enum TemporalClass {
    /// Applies whatever the current representations are.
    Timeless,
    /// Every resource considered at one instant.
    Uniform { when: Timestamp },
    /// Body and targets considered at their own instants.
    Varied {
        body_when: Option<Timestamp>,
        target_whens: Vec<Option<Timestamp>>,
    },
}

impl TemporalClass {
    pub fn name(&self) -> &'static str {
        match self {
            TemporalClass::Timeless => "Timeless",
            TemporalClass::Uniform { .. } => "Uniform",
            TemporalClass::Varied { .. } => "Varied",
        }
    }
}

pub fn classify_temporal(a: &Annotation) -> Result<TemporalClass, ModelError> {
    let constrained = a.time_constraints().next().is_some();
    match (a.when, constrained) {
        (Some(_), true) => Err(ModelError::AmbiguousTemporalClass(a.uri.to_string())),
        (Some(when), false) => Ok(TemporalClass::Uniform { when }),
        (None, true) => Ok(TemporalClass::Varied {
            body_when: a.body.time_constraint.as_ref().map(|tc| tc.when),
            target_whens: a
                .targets
                .iter()
                .map(|t| t.time_constraint.as_ref().map(|tc| tc.when))
                .collect(),
        }),
        (None, false) => Ok(TemporalClass::Timeless),
    }
}
