use std::collections::{BTreeMap, BTreeSet};

use super::{BlankNode, Iri, Subject, Term, Triple};

/// A set of triples. Inserting a duplicate leaves the graph unchanged.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    triples: BTreeSet<Triple>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false when the triple was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        self.triples.insert(triple)
    }

    pub fn add(&mut self, subject: impl Into<Subject>, predicate: Iri, object: impl Into<Term>) -> bool {
        self.insert(Triple::new(subject, predicate, object))
    }

    pub fn extend(&mut self, other: &Graph) {
        self.triples.extend(other.triples.iter().cloned());
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn with_subject<'a>(&'a self, subject: &Subject) -> impl Iterator<Item = &'a Triple> {
        self.triples.iter().filter(move |t| &t.subject == subject)
    }

    pub fn objects<'a>(&'a self, subject: &Subject, predicate: &Iri) -> impl Iterator<Item = &'a Term> {
        self.triples
            .iter()
            .filter(move |t| &t.subject == subject && &t.predicate == predicate)
            .map(|t| &t.object)
    }

    pub fn subjects<'a>(&'a self, predicate: &Iri, object: &Term) -> impl Iterator<Item = &'a Subject> {
        self.triples
            .iter()
            .filter(move |t| &t.predicate == predicate && &t.object == object)
            .map(|t| &t.subject)
    }

    pub fn blank_nodes(&self) -> BTreeSet<BlankNode> {
        let mut out = BTreeSet::new();
        for t in &self.triples {
            if let Subject::Blank(b) = &t.subject {
                out.insert(b.clone());
            }
            if let Term::Blank(b) = &t.object {
                out.insert(b.clone());
            }
        }
        out
    }

    /// True when some bijection between blank nodes maps `self` onto `other`.
    pub fn is_isomorphic(&self, other: &Graph) -> bool {
        if self.len() != other.len() {
            return false;
        }
        let ground = |g: &Graph| -> BTreeSet<Triple> {
            g.iter()
                .filter(|t| !matches!(t.subject, Subject::Blank(_)) && !matches!(t.object, Term::Blank(_)))
                .cloned()
                .collect()
        };
        if ground(self) != ground(other) {
            return false;
        }
        let ours: Vec<BlankNode> = self.blank_nodes().into_iter().collect();
        let theirs: Vec<BlankNode> = other.blank_nodes().into_iter().collect();
        if ours.len() != theirs.len() {
            return false;
        }
        let sig_ours: BTreeMap<&BlankNode, (usize, usize)> = ours.iter().map(|b| (b, degree(self, b))).collect();
        let sig_theirs: BTreeMap<&BlankNode, (usize, usize)> = theirs.iter().map(|b| (b, degree(other, b))).collect();
        let mut mapping = BTreeMap::new();
        let mut used = BTreeSet::new();
        search(
            self,
            other,
            &ours,
            &theirs,
            &sig_ours,
            &sig_theirs,
            &mut mapping,
            &mut used,
        )
    }

    /// Rename blank nodes through `f`.
    pub fn map_blank_nodes(&self, mut f: impl FnMut(&BlankNode) -> BlankNode) -> Graph {
        let mut out = Graph::new();
        for t in &self.triples {
            let subject = match &t.subject {
                Subject::Blank(b) => Subject::Blank(f(b)),
                s => s.clone(),
            };
            let object = match &t.object {
                Term::Blank(b) => Term::Blank(f(b)),
                o => o.clone(),
            };
            out.insert(Triple {
                subject,
                predicate: t.predicate.clone(),
                object,
            });
        }
        out
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        Graph {
            triples: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a Graph {
    type Item = &'a Triple;
    type IntoIter = std::collections::btree_set::Iter<'a, Triple>;

    fn into_iter(self) -> Self::IntoIter {
        self.triples.iter()
    }
}

fn degree(g: &Graph, b: &BlankNode) -> (usize, usize) {
    let as_subject = g
        .iter()
        .filter(|t| matches!(&t.subject, Subject::Blank(x) if x == b))
        .count();
    let as_object = g
        .iter()
        .filter(|t| matches!(&t.object, Term::Blank(x) if x == b))
        .count();
    (as_subject, as_object)
}

#[allow(clippy::too_many_arguments)]
fn search(
    left: &Graph,
    right: &Graph,
    ours: &[BlankNode],
    theirs: &[BlankNode],
    sig_ours: &BTreeMap<&BlankNode, (usize, usize)>,
    sig_theirs: &BTreeMap<&BlankNode, (usize, usize)>,
    mapping: &mut BTreeMap<BlankNode, BlankNode>,
    used: &mut BTreeSet<BlankNode>,
) -> bool {
    let Some(next) = ours.iter().find(|b| !mapping.contains_key(*b)) else {
        let mapped = left.map_blank_nodes(|b| mapping[b].clone());
        return &mapped == right;
    };
    for candidate in theirs {
        if used.contains(candidate) || sig_ours[next] != sig_theirs[candidate] {
            continue;
        }
        mapping.insert(next.clone(), candidate.clone());
        used.insert(candidate.clone());
        if search(left, right, ours, theirs, sig_ours, sig_theirs, mapping, used) {
            return true;
        }
        mapping.remove(next);
        used.remove(candidate);
    }
    false
}
