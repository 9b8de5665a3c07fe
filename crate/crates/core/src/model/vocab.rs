//! The wire vocabulary: every OAC class and property IRI the codec emits or
//! reads lives here, so the names can be re-pointed from one place.

use std::sync::OnceLock;

use serde::Deserialize;

use crate::rdf::Iri;
use crate::rdf::ns::{self, iri};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    pub annotation: Iri,
    pub body: Iri,
    pub target: Iri,
    pub constraint_target: Iri,
    pub constraint: Iri,
    pub svg_constraint: Iri,
    pub time_constraint: Iri,
    pub has_body: Iri,
    pub has_target: Iri,
    pub constrains: Iri,
    pub constrained_by: Iri,
    pub when: Iri,

    pub rdf_type: Iri,
    pub content_as_text: Iri,
    pub chars: Iri,
    pub character_encoding: Iri,
    pub creator: Iri,
    pub created: Iri,
    pub references: Iri,
    pub label: Iri,
    pub same_as: Iri,
}

/// Overrides read from a TOML table; keys are the local names
/// (`hasBody = "http://..."`). Missing keys keep the defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Overrides {
    #[serde(rename = "Annotation")]
    annotation: Option<Iri>,
    #[serde(rename = "Body")]
    body: Option<Iri>,
    #[serde(rename = "Target")]
    target: Option<Iri>,
    #[serde(rename = "ConstraintTarget")]
    constraint_target: Option<Iri>,
    #[serde(rename = "Constraint")]
    constraint: Option<Iri>,
    #[serde(rename = "SvgConstraint")]
    svg_constraint: Option<Iri>,
    #[serde(rename = "TimeConstraint")]
    time_constraint: Option<Iri>,
    #[serde(rename = "hasBody")]
    has_body: Option<Iri>,
    #[serde(rename = "hasTarget")]
    has_target: Option<Iri>,
    constrains: Option<Iri>,
    #[serde(rename = "constrainedBy")]
    constrained_by: Option<Iri>,
    when: Option<Iri>,
}

#[derive(Debug, thiserror::Error)]
#[error("invalid vocabulary table: {0}")]
pub struct VocabularyError(String);

impl Default for Vocabulary {
    fn default() -> Self {
        let oac = |local: &str| iri(&format!("{}{local}", ns::OAC));
        Vocabulary {
            annotation: oac("Annotation"),
            body: oac("Body"),
            target: oac("Target"),
            constraint_target: oac("ConstraintTarget"),
            constraint: oac("Constraint"),
            svg_constraint: oac("SvgConstraint"),
            time_constraint: oac("TimeConstraint"),
            has_body: oac("hasBody"),
            has_target: oac("hasTarget"),
            constrains: oac("constrains"),
            constrained_by: oac("constrainedBy"),
            when: oac("when"),
            rdf_type: iri(ns::RDF_TYPE),
            content_as_text: iri(&format!("{}ContentAsText", ns::CNT)),
            chars: iri(&format!("{}chars", ns::CNT)),
            character_encoding: iri(&format!("{}characterEncoding", ns::CNT)),
            creator: iri(&format!("{}creator", ns::DCTERMS)),
            created: iri(&format!("{}created", ns::DCTERMS)),
            references: iri(&format!("{}references", ns::DCTERMS)),
            label: iri(&format!("{}label", ns::RDFS)),
            same_as: iri(&format!("{}sameAs", ns::OWL)),
        }
    }
}

impl Vocabulary {
    /// The shared default table.
    pub fn oac() -> &'static Vocabulary {
        static DEFAULT: OnceLock<Vocabulary> = OnceLock::new();
        DEFAULT.get_or_init(Vocabulary::default)
    }

    pub fn from_toml(text: &str) -> Result<Self, VocabularyError> {
        let o: Overrides = toml::from_str(text).map_err(|e| VocabularyError(e.to_string()))?;
        let mut v = Vocabulary::default();
        let set = |slot: &mut Iri, value: Option<Iri>| {
            if let Some(value) = value {
                *slot = value;
            }
        };
        set(&mut v.annotation, o.annotation);
        set(&mut v.body, o.body);
        set(&mut v.target, o.target);
        set(&mut v.constraint_target, o.constraint_target);
        set(&mut v.constraint, o.constraint);
        set(&mut v.svg_constraint, o.svg_constraint);
        set(&mut v.time_constraint, o.time_constraint);
        set(&mut v.has_body, o.has_body);
        set(&mut v.has_target, o.has_target);
        set(&mut v.constrains, o.constrains);
        set(&mut v.constrained_by, o.constrained_by);
        set(&mut v.when, o.when);
        Ok(v)
    }
}
