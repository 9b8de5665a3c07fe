//! Semantic tags: links from the body to Linked Data resources, with the
//! resource's labels cached at attachment time.

use super::{Annotation, Label, SemanticTag};
use crate::rdf::ns;
use crate::rdf::{Graph, Iri, Subject};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("could not resolve <{resource}>: {reason}")]
pub struct ResolverError {
    pub resource: Iri,
    pub reason: String,
}

/// Looks up display labels for a tagged resource. Implementations may do
/// I/O and must be callable from concurrent request handlers.
pub trait TagResolver: Send + Sync {
    fn resolve(&self, resource: &Iri) -> Result<Vec<Label>, ResolverError>;
}

/// Resolves nothing.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoopResolver;

impl TagResolver for NoopResolver {
    fn resolve(&self, _resource: &Iri) -> Result<Vec<Label>, ResolverError> {
        Ok(Vec::new())
    }
}

/// Reads `rdfs:label` values from a local graph (a fixture file or a cache
/// of previously dereferenced documents).
#[derive(Debug, Clone, Default)]
pub struct GraphResolver {
    graph: Graph,
}

impl GraphResolver {
    pub fn new(graph: Graph) -> Self {
        GraphResolver { graph }
    }
}

impl TagResolver for GraphResolver {
    fn resolve(&self, resource: &Iri) -> Result<Vec<Label>, ResolverError> {
        let subject = Subject::Iri(resource.clone());
        let label = ns::iri(&format!("{}label", ns::RDFS));
        if self.graph.with_subject(&subject).next().is_none() {
            return Err(ResolverError {
                resource: resource.clone(),
                reason: "no description available".into(),
            });
        }
        Ok(self
            .graph
            .objects(&subject, &label)
            .filter_map(|o| o.as_literal())
            .map(|l| Label {
                text: l.lexical().to_string(),
                lang: l.lang().map(str::to_string),
            })
            .collect())
    }
}

#[derive(Debug, Clone)]
pub struct TagAttachment {
    pub annotation: Annotation,
    /// Set when the resolver failed; the tag is still attached, without
    /// labels.
    pub error: Option<ResolverError>,
}

pub fn attach_semantic_tag(a: &Annotation, resource: Iri, resolver: &dyn TagResolver) -> TagAttachment {
    if a.semantic_tags.iter().any(|t| t.resource == resource) {
        return TagAttachment {
            annotation: a.clone(),
            error: None,
        };
    }
    let (labels, error) = match resolver.resolve(&resource) {
        Ok(labels) => (labels, None),
        Err(e) => (Vec::new(), Some(e)),
    };
    let mut annotation = a.clone();
    annotation.semantic_tags.push(SemanticTag { resource, labels });
    annotation.normalize();
    TagAttachment { annotation, error }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Body, Target, annotation_from_graph, annotation_to_graph};
    use crate::rdf::{RdfFormat, parse};

    fn iri(s: &str) -> Iri {
        Iri::parse(s).unwrap()
    }

    fn map_note() -> Annotation {
        Annotation::new(
            iri("http://srv/annotations/1"),
            Body::inline(iri("urn:uuid:b"), "Wien on the 1700s map"),
            vec![Target::direct(iri("http://maps.example.org/tiles/ImageProperties.xml"))],
        )
    }

    fn fixture_resolver() -> GraphResolver {
        let doc = r#"<http://sws.geonames.org/2761369/> <http://www.w3.org/2000/01/rdf-schema#label> "Wien"@de .
<http://sws.geonames.org/2761369/> <http://www.w3.org/2000/01/rdf-schema#label> "Vienna"@en .
"#;
        GraphResolver::new(parse(doc, RdfFormat::NTriples).unwrap())
    }

    #[test]
    fn fixture_labels_cached() {
        let geo = iri("http://sws.geonames.org/2761369/");
        let out = attach_semantic_tag(&map_note(), geo.clone(), &fixture_resolver());
        assert!(out.error.is_none());
        let tag = &out.annotation.semantic_tags[0];
        assert_eq!(tag.resource, geo);
        assert_eq!(tag.labels.len(), 2);
        assert!(tag.labels.contains(&Label {
            text: "Wien".into(),
            lang: Some("de".into())
        }));
        let g = annotation_to_graph(&out.annotation);
        assert_eq!(annotation_from_graph(&g, &out.annotation.uri).unwrap(), out.annotation);
    }

    #[test]
    fn noop_resolver_gives_no_labels() {
        let out = attach_semantic_tag(&map_note(), iri("http://dbpedia.org/resource/Vienna"), &NoopResolver);
        assert_eq!(out.annotation.semantic_tags.len(), 1);
        assert!(out.annotation.semantic_tags[0].labels.is_empty());
    }

    #[test]
    fn duplicate_attach_is_noop() {
        let geo = iri("http://sws.geonames.org/2761369/");
        let once = attach_semantic_tag(&map_note(), geo.clone(), &fixture_resolver()).annotation;
        let twice = attach_semantic_tag(&once, geo, &NoopResolver).annotation;
        assert_eq!(once, twice);
    }

    #[test]
    fn resolver_failure_still_attaches() {
        let unknown = iri("http://dbpedia.org/resource/Nowhere");
        let out = attach_semantic_tag(&map_note(), unknown.clone(), &fixture_resolver());
        assert_eq!(out.error.as_ref().unwrap().resource, unknown);
        assert_eq!(out.annotation.semantic_tags.len(), 1);
        assert!(out.annotation.semantic_tags[0].labels.is_empty());
    }
}
