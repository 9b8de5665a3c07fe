//! Minimal RDF: terms, triples, set-semantics graphs, and deterministic
//! N-Triples / Turtle-subset text formats.

mod graph;
pub mod ns;
mod parser;
mod term;
mod writer;

use std::fmt;
use std::str::FromStr;

pub use graph::Graph;
pub use ns::NamespaceTable;
pub use term::{BlankNode, Iri, Literal, Subject, Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RdfError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: unknown prefix `{prefix}:`")]
    UnknownPrefix { prefix: String, line: usize, column: usize },
    #[error("{line}:{column}: relative IRI <{iri}> (all IRIs must be absolute)")]
    RelativeIriAt { iri: String, line: usize, column: usize },
    #[error("relative IRI <{0}> (all IRIs must be absolute)")]
    RelativeIri(String),
    #[error("invalid IRI <{iri}>: {reason}")]
    InvalidIri { iri: String, reason: String },
    #[error("invalid blank node label {0:?}")]
    InvalidBlankNode(String),
    #[error("invalid language tag {0:?}")]
    InvalidLanguageTag(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RdfFormat {
    NTriples,
    Turtle,
}

impl RdfFormat {
    pub fn media_type(self) -> &'static str {
        match self {
            RdfFormat::NTriples => "application/n-triples",
            RdfFormat::Turtle => "text/turtle",
        }
    }

    pub fn from_media_type(media_type: &str) -> Option<Self> {
        let essence = media_type.split(';').next()?.trim().to_ascii_lowercase();
        match essence.as_str() {
            "application/n-triples" => Some(RdfFormat::NTriples),
            "text/turtle" | "application/x-turtle" => Some(RdfFormat::Turtle),
            _ => None,
        }
    }

    /// Guess from a file name extension (`.nt`, `.ttl`).
    pub fn from_extension(path: &str) -> Option<Self> {
        let ext = path.rsplit_once('.')?.1.to_ascii_lowercase();
        match ext.as_str() {
            "nt" => Some(RdfFormat::NTriples),
            "ttl" => Some(RdfFormat::Turtle),
            _ => None,
        }
    }
}

impl fmt::Display for RdfFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RdfFormat::NTriples => "ntriples",
            RdfFormat::Turtle => "turtle",
        })
    }
}

impl FromStr for RdfFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ntriples" | "nt" | "n-triples" => Ok(RdfFormat::NTriples),
            "turtle" | "ttl" => Ok(RdfFormat::Turtle),
            other => Err(format!("unknown RDF format {other:?} (expected ntriples or turtle)")),
        }
    }
}

pub fn parse(text: &str, format: RdfFormat) -> Result<Graph, RdfError> {
    parser::Parser::new(text, format).parse()
}

/// Serialize a graph. N-Triples output is canonical: blank nodes are
/// relabelled `_:bN` and lines are sorted bytewise.
pub fn serialize(graph: &Graph, format: RdfFormat) -> String {
    match format {
        RdfFormat::NTriples => writer::write_ntriples(graph),
        RdfFormat::Turtle => writer::write_turtle(graph, &NamespaceTable::default()),
    }
}

/// Turtle with a caller-supplied prefix table.
pub fn serialize_turtle_with(graph: &Graph, namespaces: &NamespaceTable) -> String {
    writer::write_turtle(graph, namespaces)
}
