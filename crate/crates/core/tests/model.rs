use oac_core::model::{
    Annotation, Body, EquivalenceMap, GraphResolver, Target, ViolationCode, Vocabulary, annotation_from_graph,
    annotation_to_graph, annotation_uris, attach_semantic_tag, classify_temporal, resolve_references, validate,
    validate_graph,
};
use oac_core::rdf::{self, BlankNode, Graph, Iri, Literal, RdfFormat, Subject, Term, Triple};
use oac_core::testing::AnnotationGen;
use proptest::prelude::*;
use rand::SeedableRng;
use rand::rngs::StdRng;

fn iri(s: &str) -> Iri {
    Iri::parse(s).unwrap()
}

#[test]
fn generated_annotations_round_trip_through_graphs_and_text() {
    let generator = AnnotationGen::default();
    let mut rng = StdRng::seed_from_u64(42);
    for i in 0..600 {
        let a = generator.generate(&mut rng, i);
        assert!(validate(&a).is_empty(), "{:?}", validate(&a));
        let g = annotation_to_graph(&a);
        assert_eq!(annotation_from_graph(&g, &a.uri).unwrap(), a);
        assert!(validate_graph(&g, &a.uri).is_empty());
        assert_eq!(annotation_uris(&g), vec![a.uri.clone()]);
        for format in [RdfFormat::NTriples, RdfFormat::Turtle] {
            let text = rdf::serialize(&g, format);
            let back = rdf::parse(&text, format).unwrap();
            assert_eq!(back, g, "{format} text:\n{text}");
            assert_eq!(annotation_from_graph(&back, &a.uri).unwrap(), a);
        }
    }
}

#[test]
fn every_temporal_class_is_generated() {
    let generator = AnnotationGen::default();
    let mut rng = StdRng::seed_from_u64(1);
    let mut seen = std::collections::BTreeSet::new();
    for i in 0..200 {
        seen.insert(classify_temporal(&generator.generate(&mut rng, i)).unwrap().name());
    }
    assert_eq!(seen.len(), 3);
}

fn doc(body: &str, targets: &str) -> Graph {
    let text = format!(
        "@prefix oac: <http://www.openannotation.org/ns/> .\n\
         <http://srv/a> a oac:Annotation {body} {targets} .\n"
    );
    rdf::parse(&text, RdfFormat::Turtle).unwrap()
}

#[test]
fn cardinality_violations() {
    let uri = iri("http://srv/a");
    let codes = |g: &Graph| validate_graph(g, &uri).into_iter().map(|v| v.code).collect::<Vec<_>>();
    assert_eq!(
        codes(&doc("", "; oac:hasTarget <http://t/>")),
        vec![ViolationCode::MissingBody]
    );
    assert_eq!(
        codes(&doc(
            "; oac:hasBody <http://b1/>, <http://b2/>",
            "; oac:hasTarget <http://t/>"
        )),
        vec![ViolationCode::MultipleBodies]
    );
    assert_eq!(
        codes(&doc("; oac:hasBody <http://b/>", "")),
        vec![ViolationCode::NoTargets]
    );
    assert!(
        codes(&doc(
            "; oac:hasBody <http://b/>",
            "; oac:hasTarget <http://t/>, <http://u/>"
        ))
        .is_empty()
    );
}

#[test]
fn resolving_references_is_idempotent_and_round_trips() {
    let generator = AnnotationGen::default();
    let mut rng = StdRng::seed_from_u64(77);
    for i in 0..200 {
        let a = generator.generate(&mut rng, i);
        let mut map = EquivalenceMap::new();
        let mut n = 0;
        for id in std::iter::once(a.body.id()).chain(a.targets.iter().map(|t| t.id())) {
            if id.is_urn() && map.get(id).is_none() {
                n += 1;
                map = map
                    .register(id.clone(), iri(&format!("http://srv/nodes/{i}-{n}")))
                    .unwrap();
            }
        }
        let resolved = resolve_references(&a, &map);
        assert_eq!(resolve_references(&resolved, &map), resolved);
        assert!(!resolved.targets.iter().any(|t| map.get(t.id()).is_some()));
        assert!(map.get(resolved.body.id()).is_none());
        let g = annotation_to_graph(&resolved);
        assert_eq!(annotation_from_graph(&g, &resolved.uri).unwrap(), resolved);
    }
}

#[test]
fn threads_are_representable() {
    let reply = Annotation::new(
        iri("http://srv/annotations/2"),
        Body::inline(iri("http://srv/bodies/2"), "I disagree"),
        vec![Target::direct(iri("http://srv/annotations/1"))],
    );
    let g = annotation_to_graph(&reply);
    assert_eq!(annotation_from_graph(&g, &reply.uri).unwrap(), reply);
}

#[test]
fn tags_cache_labels_from_resolver() {
    let labels = rdf::parse(
        "<http://dbpedia.org/resource/Vienna> <http://www.w3.org/2000/01/rdf-schema#label> \"Vienna\"@en, \"Wien\"@de .",
        RdfFormat::Turtle,
    )
    .unwrap();
    let a = Annotation::new(
        iri("http://srv/annotations/9"),
        Body::inline(iri("http://srv/bodies/9"), "old map"),
        vec![Target::direct(iri("http://maps/1.xml"))],
    );
    let tagged = attach_semantic_tag(
        &a,
        iri("http://dbpedia.org/resource/Vienna"),
        &GraphResolver::new(labels),
    );
    assert!(tagged.error.is_none());
    assert_eq!(tagged.annotation.semantic_tags[0].labels.len(), 2);
    let g = annotation_to_graph(&tagged.annotation);
    assert_eq!(annotation_from_graph(&g, &a.uri).unwrap(), tagged.annotation);
}

#[test]
fn vocabulary_table_override_changes_wire_names() {
    let vocab = Vocabulary::from_toml("hasBody = \"http://www.w3.org/ns/oa#hasBody\"\n").unwrap();
    let a = Annotation::new(
        iri("http://srv/annotations/1"),
        Body::external(iri("http://b/")),
        vec![Target::direct(iri("http://t/"))],
    );
    let g = vocab.to_graph(&a);
    let text = rdf::serialize(&g, RdfFormat::NTriples);
    assert!(text.contains("<http://www.w3.org/ns/oa#hasBody>"));
    assert_eq!(vocab.from_graph(&g, &a.uri).unwrap(), a);
    assert!(annotation_from_graph(&g, &a.uri).is_err());
}

fn term_iri() -> impl Strategy<Value = Iri> {
    prop_oneof![
        "[a-z]{1,6}".prop_map(|s| iri(&format!("http://example.org/{s}"))),
        "[a-z0-9]{1,6}".prop_map(|s| iri(&format!("urn:uuid:{s}"))),
        "[a-zA-Zé日]{1,4}".prop_map(|s| iri(&format!("http://example.org/ns#{s}"))),
    ]
}

fn literal() -> impl Strategy<Value = Literal> {
    prop_oneof![
        any::<String>().prop_map(Literal::plain),
        (any::<String>(), prop::sample::select(vec!["en", "de", "fr-ca"]))
            .prop_map(|(s, l)| Literal::lang_tagged(s, l).unwrap()),
        (any::<String>(), term_iri()).prop_map(|(s, dt)| Literal::typed(s, dt)),
    ]
}

fn subject() -> impl Strategy<Value = Subject> {
    prop_oneof![
        3 => term_iri().prop_map(Subject::Iri),
        1 => (0u8..4).prop_map(|n| Subject::Blank(BlankNode::new(format!("b{n}")).unwrap())),
    ]
}

fn object() -> impl Strategy<Value = Term> {
    prop_oneof![
        term_iri().prop_map(Term::Iri),
        literal().prop_map(Term::Literal),
        (0u8..4).prop_map(|n| Term::Blank(BlankNode::new(format!("b{n}")).unwrap())),
    ]
}

fn graph() -> impl Strategy<Value = Graph> {
    prop::collection::vec((subject(), term_iri(), object()), 0..12)
        .prop_map(|ts| ts.into_iter().map(|(s, p, o)| Triple::new(s, p, o)).collect())
}

proptest! {
    #[test]
    fn ntriples_round_trip(g in graph()) {
        let text = rdf::serialize(&g, RdfFormat::NTriples);
        let back = rdf::parse(&text, RdfFormat::NTriples).unwrap();
        prop_assert!(back.is_isomorphic(&g));
        prop_assert_eq!(rdf::serialize(&back, RdfFormat::NTriples), text);
    }

    #[test]
    fn turtle_round_trip(g in graph()) {
        let text = rdf::serialize(&g, RdfFormat::Turtle);
        let back = rdf::parse(&text, RdfFormat::Turtle).unwrap();
        prop_assert!(back.is_isomorphic(&g), "{}", text);
    }

    #[test]
    fn canonical_form_ignores_blank_labels(g in graph(), salt in "[a-z]{1,3}") {
        let relabelled = g.map_blank_nodes(|b| BlankNode::new(format!("{salt}{}", b.label())).unwrap());
        prop_assert_eq!(rdf::serialize(&relabelled, RdfFormat::NTriples), rdf::serialize(&g, RdfFormat::NTriples));
    }
}
