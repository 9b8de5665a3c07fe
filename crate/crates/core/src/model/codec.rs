//! Mapping between [`Annotation`] values and RDF graphs.

use std::collections::{BTreeMap, BTreeSet};

use super::validate::{Violation, ViolationCode, validate};
use super::*;
use crate::rdf::{Graph, Literal, Subject, Term};

pub fn annotation_to_graph(a: &Annotation) -> Graph {
    Vocabulary::oac().to_graph(a)
}

pub fn annotation_from_graph(g: &Graph, uri: &Iri) -> Result<Annotation, ModelError> {
    Vocabulary::oac().from_graph(g, uri)
}

/// Every subject typed as an annotation, sorted.
pub fn annotation_uris(g: &Graph) -> Vec<Iri> {
    Vocabulary::oac().annotation_uris(g)
}

/// Cardinality checks on the raw graph, followed by [`validate`] on the
/// decoded annotation when decoding succeeds.
pub fn validate_graph(g: &Graph, uri: &Iri) -> Vec<Violation> {
    Vocabulary::oac().validate_graph(g, uri)
}

fn node(iri: &Iri) -> Subject {
    Subject::Iri(iri.clone())
}

impl Vocabulary {
    pub fn annotation_uris(&self, g: &Graph) -> Vec<Iri> {
        let class = Term::Iri(self.annotation.clone());
        let set: BTreeSet<Iri> = g
            .subjects(&self.rdf_type, &class)
            .filter_map(|s| match s {
                Subject::Iri(i) => Some(i.clone()),
                Subject::Blank(_) => None,
            })
            .collect();
        set.into_iter().collect()
    }

    pub fn to_graph(&self, a: &Annotation) -> Graph {
        let mut g = Graph::new();
        let ty = &self.rdf_type;
        let anno = node(&a.uri);
        g.add(anno.clone(), ty.clone(), self.annotation.clone());

        let body = a.body.id();
        g.add(anno.clone(), self.has_body.clone(), body.clone());
        g.add(node(body), ty.clone(), self.body.clone());
        if let BodyKind::Inline { id, chars, encoding } = &a.body.kind {
            g.add(node(id), ty.clone(), self.content_as_text.clone());
            g.add(node(id), self.chars.clone(), Literal::plain(chars.as_str()));
            g.add(
                node(id),
                self.character_encoding.clone(),
                Literal::plain(encoding.as_str()),
            );
        }
        if let Some(tc) = &a.body.time_constraint {
            self.emit_time_constraint(&mut g, body, tc);
        }

        for target in &a.targets {
            g.add(anno.clone(), self.has_target.clone(), target.id().clone());
            match &target.kind {
                TargetKind::Direct { uri } => {
                    g.add(node(uri), ty.clone(), self.target.clone());
                }
                TargetKind::Constrained {
                    id,
                    constrains,
                    constraint,
                } => {
                    g.add(node(id), ty.clone(), self.constraint_target.clone());
                    g.add(node(id), self.constrains.clone(), constrains.clone());
                    g.add(node(id), self.constrained_by.clone(), constraint.id().clone());
                    match constraint {
                        SegmentConstraint::Svg(c) => {
                            g.add(node(&c.id), ty.clone(), self.svg_constraint.clone());
                            g.add(node(&c.id), self.chars.clone(), Literal::plain(c.source.as_str()));
                        }
                        SegmentConstraint::Generic(c) => {
                            g.add(node(&c.id), ty.clone(), c.class.clone());
                            for (p, o) in &c.properties {
                                g.add(node(&c.id), p.clone(), o.clone());
                            }
                        }
                    }
                }
            }
            if let Some(tc) = &target.time_constraint {
                self.emit_time_constraint(&mut g, target.id(), tc);
            }
        }

        if let Some(creator) = &a.creator {
            g.add(anno.clone(), self.creator.clone(), Literal::plain(creator.as_str()));
        }
        if let Some(created) = a.created {
            g.add(anno.clone(), self.created.clone(), Literal::datetime(created));
        }
        if let Some(when) = a.when {
            g.add(anno.clone(), self.when.clone(), Literal::datetime(when));
        }
        for tag in &a.semantic_tags {
            g.add(node(body), self.references.clone(), tag.resource.clone());
            for label in &tag.labels {
                let lit = match &label.lang {
                    Some(lang) => Literal::lang_tagged(label.text.as_str(), lang.as_str())
                        .unwrap_or_else(|_| Literal::plain(label.text.as_str())),
                    None => Literal::plain(label.text.as_str()),
                };
                g.add(node(&tag.resource), self.label.clone(), lit);
            }
        }
        for (urn, http) in &a.equivalences {
            g.add(node(urn), self.same_as.clone(), http.clone());
        }
        for (p, o) in &a.extra {
            g.add(anno.clone(), p.clone(), o.clone());
        }
        g
    }

    fn emit_time_constraint(&self, g: &mut Graph, on: &Iri, tc: &TimeConstraint) {
        g.add(node(on), self.constrained_by.clone(), tc.id.clone());
        g.add(node(&tc.id), self.rdf_type.clone(), self.time_constraint.clone());
        g.add(node(&tc.id), self.when.clone(), Literal::datetime(tc.when));
    }

    pub fn from_graph(&self, g: &Graph, uri: &Iri) -> Result<Annotation, ModelError> {
        let anno = node(uri);
        let is_annotation = g
            .objects(&anno, &self.rdf_type)
            .any(|o| o.as_iri() == Some(&self.annotation));
        if !is_annotation {
            return Err(ModelError::NotAnAnnotation(uri.to_string()));
        }

        let bodies: Vec<&Term> = g.objects(&anno, &self.has_body).collect();
        let body_node = match bodies.as_slice() {
            [] => return Err(ModelError::MissingBody(uri.to_string())),
            [one] => iri_node(one, uri, "body")?,
            _ => return Err(ModelError::MultipleBodies(uri.to_string())),
        };
        let body = self.read_body(g, &body_node)?;

        let target_nodes: Vec<&Term> = g.objects(&anno, &self.has_target).collect();
        if target_nodes.is_empty() {
            return Err(ModelError::NoTargets(uri.to_string()));
        }
        let mut targets = Vec::with_capacity(target_nodes.len());
        for t in target_nodes {
            let t = iri_node(t, uri, "target")?;
            targets.push(self.read_target(g, &t)?);
        }

        let creator = single(g, &anno, &self.creator, "creator")?
            .and_then(|t| t.as_literal())
            .map(|l| l.lexical().to_string());
        let created = datetime(g, &anno, &self.created, "created")?;
        let when = datetime(g, &anno, &self.when, "when")?;

        let mut semantic_tags = Vec::new();
        for r in g.objects(&node(&body_node), &self.references) {
            let Some(resource) = r.as_iri() else { continue };
            let labels = g
                .objects(&node(resource), &self.label)
                .filter_map(|o| o.as_literal())
                .map(|l| Label {
                    text: l.lexical().to_string(),
                    lang: l.lang().map(str::to_string),
                })
                .collect();
            semantic_tags.push(SemanticTag {
                resource: resource.clone(),
                labels,
            });
        }

        let mut a = Annotation {
            uri: uri.clone(),
            body,
            targets,
            creator,
            created,
            when,
            semantic_tags,
            equivalences: BTreeMap::new(),
            extra: BTreeSet::new(),
        };

        let ids = node_ids(&a);
        for t in g.iter().filter(|t| t.predicate == self.same_as) {
            if let (Subject::Iri(urn), Term::Iri(http)) = (&t.subject, &t.object)
                && urn.is_urn()
                && ids.contains(http)
            {
                a.equivalences.insert(urn.clone(), http.clone());
            }
        }

        for t in g.with_subject(&anno) {
            let p = &t.predicate;
            let known = *p == self.has_body
                || *p == self.has_target
                || (*p == self.rdf_type && t.object.as_iri() == Some(&self.annotation))
                || (*p == self.creator && t.object.as_literal().is_some())
                || *p == self.created
                || *p == self.when;
            if !known {
                a.extra.insert((p.clone(), t.object.clone()));
            }
        }

        a.normalize();
        Ok(a)
    }

    fn read_body(&self, g: &Graph, id: &Iri) -> Result<Body, ModelError> {
        let subject = node(id);
        let chars: Vec<&Term> = g.objects(&subject, &self.chars).collect();
        let kind = match chars.as_slice() {
            [] => BodyKind::External { uri: id.clone() },
            [one] => {
                let chars = literal_text(one, id, "cnt:chars")?;
                let encoding = match single(g, &subject, &self.character_encoding, "characterEncoding")? {
                    Some(t) => literal_text(t, id, "cnt:characterEncoding")?,
                    None => "utf-8".to_string(),
                };
                BodyKind::Inline {
                    id: id.clone(),
                    chars,
                    encoding,
                }
            }
            _ => {
                return Err(ModelError::MalformedNode {
                    node: id.to_string(),
                    reason: "body has more than one cnt:chars".into(),
                });
            }
        };
        let (time, segments) = self.read_constraint_links(g, id)?;
        if !segments.is_empty() {
            return Err(ModelError::MalformedConstraint {
                node: id.to_string(),
                reason: "bodies accept only time constraints".into(),
            });
        }
        Ok(Body {
            kind,
            time_constraint: time,
        })
    }

    fn read_target(&self, g: &Graph, id: &Iri) -> Result<Target, ModelError> {
        let subject = node(id);
        let (time, mut segments) = self.read_constraint_links(g, id)?;
        let constrains: Vec<&Term> = g.objects(&subject, &self.constrains).collect();
        let typed_ct = g
            .objects(&subject, &self.rdf_type)
            .any(|o| o.as_iri() == Some(&self.constraint_target));
        let kind = if typed_ct || !constrains.is_empty() {
            let constrains = match constrains.as_slice() {
                [one] => iri_node(one, id, "constrains")?,
                _ => {
                    return Err(ModelError::MalformedConstraint {
                        node: id.to_string(),
                        reason: format!("expected exactly one constrained resource, found {}", constrains.len()),
                    });
                }
            };
            if segments.len() != 1 {
                return Err(ModelError::MalformedConstraint {
                    node: id.to_string(),
                    reason: format!("expected exactly one constraint, found {}", segments.len()),
                });
            }
            TargetKind::Constrained {
                id: id.clone(),
                constrains,
                constraint: segments.remove(0),
            }
        } else {
            if !segments.is_empty() {
                return Err(ModelError::MalformedConstraint {
                    node: id.to_string(),
                    reason: "constraint on a target that constrains no resource".into(),
                });
            }
            TargetKind::Direct { uri: id.clone() }
        };
        Ok(Target {
            kind,
            time_constraint: time,
        })
    }

    /// Splits `constrainedBy` links into at most one time constraint and
    /// any number of segment constraints.
    fn read_constraint_links(
        &self,
        g: &Graph,
        id: &Iri,
    ) -> Result<(Option<TimeConstraint>, Vec<SegmentConstraint>), ModelError> {
        let mut time = None;
        let mut segments = Vec::new();
        for c in g.objects(&node(id), &self.constrained_by) {
            let c = match c {
                Term::Iri(i) => i,
                _ => {
                    return Err(ModelError::MalformedConstraint {
                        node: id.to_string(),
                        reason: "constraint must be named by an IRI".into(),
                    });
                }
            };
            let subject = node(c);
            let types: Vec<&Iri> = g.objects(&subject, &self.rdf_type).filter_map(|t| t.as_iri()).collect();
            let malformed = |reason: String| ModelError::MalformedConstraint {
                node: c.to_string(),
                reason,
            };
            if types.contains(&&self.time_constraint) {
                if time.is_some() {
                    return Err(ModelError::MalformedConstraint {
                        node: id.to_string(),
                        reason: "more than one time constraint".into(),
                    });
                }
                let when = datetime(g, &subject, &self.when, "when")
                    .map_err(|e| malformed(e.to_string()))?
                    .ok_or_else(|| malformed("time constraint without a datetime".into()))?;
                time = Some(TimeConstraint { id: c.clone(), when });
            } else if types.contains(&&self.svg_constraint) {
                let source = match single(g, &subject, &self.chars, "chars").map_err(|e| malformed(e.to_string()))? {
                    Some(Term::Literal(l)) => l.lexical().to_string(),
                    _ => return Err(malformed("SVG constraint without cnt:chars source".into())),
                };
                segments.push(SegmentConstraint::Svg(SvgConstraint { id: c.clone(), source }));
            } else {
                let class = match types.as_slice() {
                    [one] => (*one).clone(),
                    [] => return Err(malformed("constraint has no type".into())),
                    _ => return Err(malformed("constraint has several types".into())),
                };
                let mut properties = BTreeMap::new();
                for t in g.with_subject(&subject).filter(|t| t.predicate != self.rdf_type) {
                    if properties.insert(t.predicate.clone(), t.object.clone()).is_some() {
                        return Err(malformed(format!("repeated property <{}>", t.predicate)));
                    }
                }
                segments.push(SegmentConstraint::Generic(GenericConstraint {
                    id: c.clone(),
                    class,
                    properties,
                }));
            }
        }
        Ok((time, segments))
    }

    pub fn validate_graph(&self, g: &Graph, uri: &Iri) -> Vec<Violation> {
        let anno = node(uri);
        let mut out = Vec::new();
        let violation = |code, node: &Iri| Violation {
            code,
            node: node.to_string(),
        };
        if !g
            .objects(&anno, &self.rdf_type)
            .any(|o| o.as_iri() == Some(&self.annotation))
        {
            out.push(violation(ViolationCode::NotAnAnnotation, uri));
        }
        match g.objects(&anno, &self.has_body).count() {
            0 => out.push(violation(ViolationCode::MissingBody, uri)),
            1 => {}
            _ => out.push(violation(ViolationCode::MultipleBodies, uri)),
        }
        if g.objects(&anno, &self.has_target).next().is_none() {
            out.push(violation(ViolationCode::NoTargets, uri));
        }
        if !out.is_empty() {
            return out;
        }
        match self.from_graph(g, uri) {
            Ok(a) => validate(&a),
            Err(ModelError::MalformedConstraint { node, .. }) => vec![Violation {
                code: ViolationCode::MalformedConstraint,
                node,
            }],
            Err(ModelError::MalformedNode { node, .. }) => vec![Violation {
                code: ViolationCode::MalformedNode,
                node,
            }],
            Err(other) => vec![Violation {
                code: ViolationCode::MalformedNode,
                node: other.to_string(),
            }],
        }
    }
}

fn iri_node(term: &Term, owner: &Iri, role: &str) -> Result<Iri, ModelError> {
    term.as_iri().cloned().ok_or_else(|| ModelError::MalformedNode {
        node: owner.to_string(),
        reason: format!("{role} must be named by an IRI"),
    })
}

fn literal_text(term: &Term, owner: &Iri, role: &str) -> Result<String, ModelError> {
    term.as_literal()
        .map(|l| l.lexical().to_string())
        .ok_or_else(|| ModelError::MalformedNode {
            node: owner.to_string(),
            reason: format!("{role} must be a literal"),
        })
}

fn single<'g>(g: &'g Graph, subject: &Subject, predicate: &Iri, role: &str) -> Result<Option<&'g Term>, ModelError> {
    let mut it = g.objects(subject, predicate);
    let first = it.next();
    if it.next().is_some() {
        return Err(ModelError::MalformedNode {
            node: subject_str(subject),
            reason: format!("more than one {role}"),
        });
    }
    Ok(first)
}

fn datetime(g: &Graph, subject: &Subject, predicate: &Iri, role: &str) -> Result<Option<Timestamp>, ModelError> {
    match single(g, subject, predicate, role)? {
        None => Ok(None),
        Some(term) => term
            .as_literal()
            .and_then(|l| l.as_datetime().or_else(|| l.lexical().parse().ok()))
            .map(Some)
            .ok_or_else(|| ModelError::MalformedNode {
                node: subject_str(subject),
                reason: format!("{role} is not a datetime"),
            }),
    }
}

fn subject_str(s: &Subject) -> String {
    match s {
        Subject::Iri(i) => i.to_string(),
        Subject::Blank(b) => format!("_:{}", b.label()),
    }
}

/// Every IRI the annotation uses as a node identifier.
pub(super) fn node_ids(a: &Annotation) -> BTreeSet<Iri> {
    let mut ids = BTreeSet::new();
    ids.insert(a.uri.clone());
    ids.insert(a.body.id().clone());
    for tc in a.time_constraints() {
        ids.insert(tc.id.clone());
    }
    for t in &a.targets {
        ids.insert(t.id().clone());
        if let TargetKind::Constrained {
            constrains, constraint, ..
        } = &t.kind
        {
            ids.insert(constrains.clone());
            ids.insert(constraint.id().clone());
        }
    }
    ids
}
