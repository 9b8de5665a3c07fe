//! Namespace IRIs and the prefix table.

use std::collections::BTreeMap;

use super::{Iri, RdfError};

pub const OAC: &str = "http://www.openannotation.org/ns/";
pub const CNT: &str = "http://www.w3.org/2008/content#";
pub const DCTERMS: &str = "http://purl.org/dc/terms/";
pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const OWL: &str = "http://www.w3.org/2002/07/owl#";

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const XSD_DATETIME: &str = "http://www.w3.org/2001/XMLSchema#dateTime";
pub const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
pub const XSD_DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
pub const XSD_DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
pub const XSD_BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";

/// Prefix → namespace IRI.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamespaceTable {
    prefixes: BTreeMap<String, Iri>,
}

impl Default for NamespaceTable {
    fn default() -> Self {
        let mut table = NamespaceTable::empty();
        for (prefix, ns) in [
            ("oac", OAC),
            ("cnt", CNT),
            ("dcterms", DCTERMS),
            ("rdf", RDF),
            ("rdfs", RDFS),
            ("xsd", XSD),
            ("owl", OWL),
        ] {
            table
                .prefixes
                .insert(prefix.to_string(), Iri::parse(ns).expect("static namespace"));
        }
        table
    }
}

impl NamespaceTable {
    pub fn empty() -> Self {
        NamespaceTable {
            prefixes: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, prefix: impl Into<String>, namespace: Iri) {
        self.prefixes.insert(prefix.into(), namespace);
    }

    pub fn get(&self, prefix: &str) -> Option<&Iri> {
        self.prefixes.get(prefix)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Iri)> {
        self.prefixes.iter().map(|(p, i)| (p.as_str(), i))
    }

    pub fn expand(&self, prefix: &str, local: &str) -> Option<Result<Iri, RdfError>> {
        self.prefixes
            .get(prefix)
            .map(|ns| Iri::parse(format!("{}{}", ns.as_str(), local)))
    }

    /// Longest namespace that leaves a local part safe to write unquoted.
    pub fn compact<'a>(&'a self, iri: &'a Iri) -> Option<(&'a str, &'a str)> {
        self.prefixes
            .iter()
            .filter_map(|(prefix, ns)| {
                let local = iri.as_str().strip_prefix(ns.as_str())?;
                is_safe_local(local).then_some((prefix.as_str(), local, ns.as_str().len()))
            })
            .max_by_key(|&(_, _, len)| len)
            .map(|(p, l, _)| (p, l))
    }
}

pub(crate) fn is_safe_local(local: &str) -> bool {
    let mut chars = local.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        }
        Some(_) => false,
    }
}

pub(crate) fn iri(s: &str) -> Iri {
    Iri::parse(s).expect("static IRI")
}
