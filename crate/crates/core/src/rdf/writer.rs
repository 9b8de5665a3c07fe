use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use super::ns::{self, NamespaceTable};
use super::{BlankNode, Graph, Iri, Literal, Subject, Term, Triple};

pub(super) fn write_ntriples(graph: &Graph) -> String {
    let canonical = canonical_blank_labels(graph);
    let mut lines: Vec<String> = canonical.iter().map(ntriples_line).collect();
    lines.sort();
    let mut out = String::new();
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Relabels blank nodes `b0, b1, ...` in order of first appearance when the
/// triples are sorted with blank labels masked out.
pub(super) fn canonical_blank_labels(graph: &Graph) -> Graph {
    let mut keyed: Vec<(String, String, &Triple)> =
        graph.iter().map(|t| (masked_line(t), ntriples_line(t), t)).collect();
    keyed.sort();
    let mut labels: HashMap<BlankNode, BlankNode> = HashMap::new();
    for (_, _, t) in &keyed {
        for b in [subject_blank(&t.subject), object_blank(&t.object)]
            .into_iter()
            .flatten()
        {
            let next = labels.len();
            labels
                .entry(b.clone())
                .or_insert_with(|| BlankNode::new(format!("b{next}")).expect("generated label"));
        }
    }
    graph.map_blank_nodes(|b| labels[b].clone())
}

fn subject_blank(s: &Subject) -> Option<&BlankNode> {
    match s {
        Subject::Blank(b) => Some(b),
        Subject::Iri(_) => None,
    }
}

fn object_blank(o: &Term) -> Option<&BlankNode> {
    match o {
        Term::Blank(b) => Some(b),
        _ => None,
    }
}

fn masked_line(t: &Triple) -> String {
    let subject = match &t.subject {
        Subject::Blank(_) => "_:".to_string(),
        Subject::Iri(i) => iri_ref(i),
    };
    let object = match &t.object {
        Term::Blank(_) => "_:".to_string(),
        other => term_nt(other),
    };
    format!("{subject} {} {object} .", iri_ref(&t.predicate))
}

fn ntriples_line(t: &Triple) -> String {
    let subject = match &t.subject {
        Subject::Blank(b) => format!("_:{}", b.label()),
        Subject::Iri(i) => iri_ref(i),
    };
    format!("{subject} {} {} .", iri_ref(&t.predicate), term_nt(&t.object))
}

fn iri_ref(iri: &Iri) -> String {
    let mut out = String::with_capacity(iri.as_str().len() + 2);
    out.push('<');
    for c in iri.as_str().chars() {
        push_ascii(&mut out, c);
    }
    out.push('>');
    out
}

fn push_ascii(out: &mut String, c: char) {
    if c.is_ascii() {
        out.push(c);
    } else if (c as u32) <= 0xFFFF {
        let _ = write!(out, "\\u{:04X}", c as u32);
    } else {
        let _ = write!(out, "\\U{:08X}", c as u32);
    }
}

fn quoted(lexical: &str, ascii_only: bool) -> String {
    let mut out = String::with_capacity(lexical.len() + 2);
    out.push('"');
    for c in lexical.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c if ascii_only => push_ascii(&mut out, c),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn literal_nt(lit: &Literal) -> String {
    let mut out = quoted(lit.lexical(), true);
    if let Some(lang) = lit.lang() {
        out.push('@');
        out.push_str(lang);
    } else if let Some(dt) = lit.datatype() {
        out.push_str("^^");
        out.push_str(&iri_ref(dt));
    }
    out
}

fn term_nt(term: &Term) -> String {
    match term {
        Term::Iri(i) => iri_ref(i),
        Term::Blank(b) => format!("_:{}", b.label()),
        Term::Literal(l) => literal_nt(l),
    }
}

pub(super) fn write_turtle(graph: &Graph, namespaces: &NamespaceTable) -> String {
    let graph = canonical_blank_labels(graph);
    let mut used: BTreeMap<String, Iri> = BTreeMap::new();
    let mut note = |iri: &Iri| {
        if let Some((prefix, _)) = namespaces.compact(iri)
            && let Some(ns_iri) = namespaces.get(prefix)
        {
            used.insert(prefix.to_string(), ns_iri.clone());
        }
    };
    for t in graph.iter() {
        if let Subject::Iri(i) = &t.subject {
            note(i);
        }
        if t.predicate.as_str() != ns::RDF_TYPE {
            note(&t.predicate);
        }
        match &t.object {
            Term::Iri(i) => note(i),
            Term::Literal(l) => {
                if let Some(dt) = l.datatype() {
                    note(dt)
                }
            }
            Term::Blank(_) => {}
        }
    }

    let mut out = String::new();
    for (prefix, iri) in &used {
        let _ = writeln!(out, "@prefix {prefix}: {} .", iri_ref(iri));
    }

    // rdf:type first within each subject block, then by predicate
    let mut by_subject: BTreeMap<&Subject, BTreeMap<(bool, &Iri), Vec<&Term>>> = BTreeMap::new();
    for t in graph.iter() {
        by_subject
            .entry(&t.subject)
            .or_default()
            .entry((t.predicate.as_str() != ns::RDF_TYPE, &t.predicate))
            .or_default()
            .push(&t.object);
    }
    for (subject, predicates) in by_subject {
        if !out.is_empty() {
            out.push('\n');
        }
        let subject = match subject {
            Subject::Iri(i) => name(i, namespaces),
            Subject::Blank(b) => format!("_:{}", b.label()),
        };
        out.push_str(&subject);
        let count = predicates.len();
        for (n, ((_, predicate), objects)) in predicates.into_iter().enumerate() {
            let predicate = if predicate.as_str() == ns::RDF_TYPE {
                "a".to_string()
            } else {
                name(predicate, namespaces)
            };
            out.push_str(if n == 0 { " " } else { "    " });
            out.push_str(&predicate);
            out.push(' ');
            let objects: Vec<String> = objects.into_iter().map(|o| term_ttl(o, namespaces)).collect();
            out.push_str(&objects.join(", "));
            out.push_str(if n + 1 == count { " .\n" } else { " ;\n" });
        }
    }
    out
}

fn name(iri: &Iri, namespaces: &NamespaceTable) -> String {
    match namespaces.compact(iri) {
        Some((prefix, local)) => format!("{prefix}:{local}"),
        None => iri_ref(iri),
    }
}

fn term_ttl(term: &Term, namespaces: &NamespaceTable) -> String {
    match term {
        Term::Iri(i) => name(i, namespaces),
        Term::Blank(b) => format!("_:{}", b.label()),
        Term::Literal(l) => {
            let mut out = quoted(l.lexical(), false);
            if let Some(lang) = l.lang() {
                out.push('@');
                out.push_str(lang);
            } else if let Some(dt) = l.datatype() {
                out.push_str("^^");
                out.push_str(&name(dt, namespaces));
            }
            out
        }
    }
}
