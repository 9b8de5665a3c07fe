//! Shared recursive-descent parser for N-Triples and the Turtle subset
//! (`@prefix`/`PREFIX`, prefixed names, `a`, `;` and `,` abbreviations,
//! numeric and boolean shorthands). Collections, blank node property lists,
//! `@base` and quoted triples are rejected.

use std::collections::HashMap;

use super::ns::{self, NamespaceTable};
use super::{BlankNode, Graph, Iri, Literal, RdfError, RdfFormat, Subject, Term, Triple};

pub(super) struct Parser<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    column: usize,
    format: RdfFormat,
    prefixes: NamespaceTable,
    blanks: HashMap<String, BlankNode>,
}

impl<'a> Parser<'a> {
    pub(super) fn new(src: &'a str, format: RdfFormat) -> Self {
        Parser {
            src,
            pos: 0,
            line: 1,
            column: 1,
            format,
            prefixes: NamespaceTable::empty(),
            blanks: HashMap::new(),
        }
    }

    pub(super) fn parse(mut self) -> Result<Graph, RdfError> {
        let mut graph = Graph::new();
        loop {
            self.skip_ws();
            if self.at_end() {
                return Ok(graph);
            }
            if self.is_turtle() && self.try_directive()? {
                continue;
            }
            self.statement(&mut graph)?;
        }
    }

    fn is_turtle(&self) -> bool {
        self.format == RdfFormat::Turtle
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), RdfError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(match self.peek() {
                Some(found) => format!("expected `{c}`, found `{found}`"),
                None => format!("expected `{c}`, found end of input"),
            }))
        }
    }

    fn error(&self, message: impl Into<String>) -> RdfError {
        RdfError::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn starts_with_keyword(&self, kw: &str) -> bool {
        let rest = self.rest();
        rest.len() >= kw.len()
            && rest[..kw.len()].eq_ignore_ascii_case(kw)
            && rest[kw.len()..]
                .chars()
                .next()
                .is_none_or(|c| c.is_whitespace() || c == '<')
    }

    fn try_directive(&mut self) -> Result<bool, RdfError> {
        if self.rest().starts_with("@prefix") {
            for _ in 0.."@prefix".len() {
                self.bump();
            }
            self.prefix_body()?;
            self.skip_ws();
            self.expect('.')?;
            Ok(true)
        } else if self.starts_with_keyword("PREFIX") {
            for _ in 0.."PREFIX".len() {
                self.bump();
            }
            self.prefix_body()?;
            Ok(true)
        } else if self.rest().starts_with("@base") || self.starts_with_keyword("BASE") {
            Err(self.error("@base is not supported: all IRIs must be absolute"))
        } else {
            Ok(false)
        }
    }

    fn prefix_body(&mut self) -> Result<(), RdfError> {
        self.skip_ws();
        let prefix = self.prefix_name()?;
        self.expect(':')?;
        self.skip_ws();
        let namespace = self.iri_ref()?;
        self.prefixes.insert(prefix, namespace);
        Ok(())
    }

    fn prefix_name(&mut self) -> Result<String, RdfError> {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' || c == '-' || (c == '.' && !out.is_empty()) {
                out.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if out.ends_with('.') {
            return Err(self.error("prefix name may not end with `.`"));
        }
        Ok(out)
    }

    fn statement(&mut self, graph: &mut Graph) -> Result<(), RdfError> {
        let subject = self.subject()?;
        if self.is_turtle() {
            loop {
                self.skip_ws();
                let predicate = self.predicate()?;
                loop {
                    self.skip_ws();
                    let object = self.object()?;
                    graph.insert(Triple {
                        subject: subject.clone(),
                        predicate: predicate.clone(),
                        object,
                    });
                    self.skip_ws();
                    if !self.eat(',') {
                        break;
                    }
                }
                self.skip_ws();
                if !self.eat(';') {
                    break;
                }
                // trailing and repeated semicolons are allowed
                loop {
                    self.skip_ws();
                    if !self.eat(';') {
                        break;
                    }
                }
                self.skip_ws();
                if self.peek() == Some('.') {
                    break;
                }
            }
        } else {
            self.skip_inline_ws();
            let predicate = self.predicate()?;
            self.skip_inline_ws();
            let object = self.object()?;
            graph.insert(Triple {
                subject,
                predicate,
                object,
            });
            self.skip_inline_ws();
        }
        self.skip_ws_for_terminator();
        self.expect('.')
    }

    fn skip_inline_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.bump();
        }
    }

    fn skip_ws_for_terminator(&mut self) {
        if self.is_turtle() {
            self.skip_ws();
        } else {
            self.skip_inline_ws();
        }
    }

    fn subject(&mut self) -> Result<Subject, RdfError> {
        match self.peek() {
            Some('<') => Ok(Subject::Iri(self.iri_ref()?)),
            Some('_') => Ok(Subject::Blank(self.blank_node()?)),
            Some('[') | Some('(') => Err(self.error("collections and blank node property lists are not supported")),
            Some(_) if self.is_turtle() => Ok(Subject::Iri(self.prefixed_name()?)),
            Some(c) => Err(self.error(format!("unexpected `{c}` in subject position"))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn predicate(&mut self) -> Result<Iri, RdfError> {
        match self.peek() {
            Some('<') => self.iri_ref(),
            Some('a')
                if self.is_turtle()
                    && self.rest()[1..].starts_with(|c: char| c.is_whitespace() || c == '<' || c == '"') =>
            {
                self.bump();
                Ok(ns::iri(ns::RDF_TYPE))
            }
            Some(_) if self.is_turtle() => self.prefixed_name(),
            Some(c) => Err(self.error(format!("unexpected `{c}` in predicate position"))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn object(&mut self) -> Result<Term, RdfError> {
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri_ref()?)),
            Some('_') if self.rest().starts_with("_:") => Ok(Term::Blank(self.blank_node()?)),
            Some('"') => self.literal(),
            Some('\'') if self.is_turtle() => self.literal(),
            Some('[') | Some('(') => Err(self.error("collections and blank node property lists are not supported")),
            Some(c) if self.is_turtle() && (c.is_ascii_digit() || c == '+' || c == '-' || c == '.') => self.numeric(),
            Some(_) if self.is_turtle() && self.boolean_ahead() => {
                let value = if self.rest().starts_with("true") {
                    "true"
                } else {
                    "false"
                };
                for _ in 0..value.len() {
                    self.bump();
                }
                Ok(Term::Literal(Literal::typed(value, ns::iri(ns::XSD_BOOLEAN))))
            }
            Some(_) if self.is_turtle() => Ok(Term::Iri(self.prefixed_name()?)),
            Some(c) => Err(self.error(format!("unexpected `{c}` in object position"))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn boolean_ahead(&self) -> bool {
        ["true", "false"].iter().any(|kw| {
            self.rest().starts_with(kw)
                && self.rest()[kw.len()..]
                    .chars()
                    .next()
                    .is_none_or(|c| !(c.is_alphanumeric() || c == '_' || c == ':' || c == '-'))
        })
    }

    fn iri_ref(&mut self) -> Result<Iri, RdfError> {
        let (line, column) = (self.line, self.column);
        self.expect('<')?;
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error("unterminated IRI")),
                Some('>') => break,
                Some('\\') => out.push(self.unicode_escape()?),
                Some(c) if c.is_whitespace() => return Err(self.error("whitespace inside IRI")),
                Some(c) => out.push(c),
            }
        }
        Iri::parse(out).map_err(|e| match e {
            RdfError::RelativeIri(iri) => RdfError::RelativeIriAt { iri, line, column },
            RdfError::InvalidIri { reason, .. } => RdfError::Syntax {
                line,
                column,
                message: reason,
            },
            other => other,
        })
    }

    fn unicode_escape(&mut self) -> Result<char, RdfError> {
        let width = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.error("invalid escape (expected \\u or \\U)")),
        };
        let mut hex = String::with_capacity(width);
        for _ in 0..width {
            match self.bump() {
                Some(c) if c.is_ascii_hexdigit() => hex.push(c),
                _ => return Err(self.error("invalid hex digit in unicode escape")),
            }
        }
        u32::from_str_radix(&hex, 16)
            .ok()
            .and_then(char::from_u32)
            .ok_or_else(|| self.error(format!("invalid code point U+{hex}")))
    }

    fn blank_node(&mut self) -> Result<BlankNode, RdfError> {
        self.expect('_')?;
        self.expect(':')?;
        let mut label = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' || c == '-' || c == '.' {
                label.push(c);
                self.bump();
            } else {
                break;
            }
        }
        // a trailing dot terminates the statement
        while label.ends_with('.') {
            label.pop();
            self.pos -= 1;
            self.column -= 1;
        }
        if label.is_empty() {
            return Err(self.error("empty blank node label"));
        }
        if let Some(existing) = self.blanks.get(&label) {
            return Ok(existing.clone());
        }
        let node = BlankNode::new(label.clone())
            .unwrap_or_else(|_| BlankNode::new(format!("x{}", hex::encode(label.as_bytes()))).expect("hex label"));
        self.blanks.insert(label, node.clone());
        Ok(node)
    }

    fn prefixed_name(&mut self) -> Result<Iri, RdfError> {
        let (line, column) = (self.line, self.column);
        let prefix = self.prefix_name()?;
        if !self.eat(':') {
            return Err(RdfError::Syntax {
                line,
                column,
                message: match self.peek() {
                    Some(c) if prefix.is_empty() => format!("unexpected `{c}`"),
                    _ => format!("expected prefixed name, found `{prefix}`"),
                },
            });
        }
        let mut local = String::new();
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '%') {
                local.push(c);
                self.bump();
            } else if c == '\\' {
                self.bump();
                match self.bump() {
                    Some(e) if "_~.-!$&'()*+,;=/?#@%".contains(e) => local.push(e),
                    _ => return Err(self.error("invalid local name escape")),
                }
            } else {
                break;
            }
        }
        while local.ends_with('.') {
            local.pop();
            self.pos -= 1;
            self.column -= 1;
        }
        match self.prefixes.expand(&prefix, &local) {
            None => Err(RdfError::UnknownPrefix { prefix, line, column }),
            Some(Ok(iri)) => Ok(iri),
            Some(Err(e)) => Err(RdfError::Syntax {
                line,
                column,
                message: e.to_string(),
            }),
        }
    }

    fn literal(&mut self) -> Result<Term, RdfError> {
        let quote = self.peek().expect("caller checked quote");
        let long = self.is_turtle() && self.rest().starts_with(&quote.to_string().repeat(3));
        let mut lexical = String::new();
        if long {
            for _ in 0..3 {
                self.bump();
            }
            let close = quote.to_string().repeat(3);
            loop {
                if self.rest().starts_with(&close) {
                    for _ in 0..3 {
                        self.bump();
                    }
                    break;
                }
                match self.bump() {
                    None => return Err(self.error("unterminated long string")),
                    Some('\\') => lexical.push(self.string_escape()?),
                    Some(c) => lexical.push(c),
                }
            }
        } else {
            self.bump();
            loop {
                match self.bump() {
                    None | Some('\n') | Some('\r') => return Err(self.error("unterminated string")),
                    Some('\\') => lexical.push(self.string_escape()?),
                    Some(c) if c == quote => break,
                    Some(c) => lexical.push(c),
                }
            }
        }
        if self.eat('@') {
            let mut tag = String::new();
            while let Some(c) = self.peek() {
                if c.is_ascii_alphanumeric() || c == '-' {
                    tag.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
            let lit = Literal::lang_tagged(lexical, tag).map_err(|e| self.error(e.to_string()))?;
            return Ok(Term::Literal(lit));
        }
        if self.rest().starts_with("^^") {
            self.bump();
            self.bump();
            let datatype = if self.peek() == Some('<') || !self.is_turtle() {
                self.iri_ref()?
            } else {
                self.prefixed_name()?
            };
            return Ok(Term::Literal(Literal::typed(lexical, datatype)));
        }
        Ok(Term::Literal(Literal::plain(lexical)))
    }

    fn string_escape(&mut self) -> Result<char, RdfError> {
        match self.peek() {
            Some('u') | Some('U') => self.unicode_escape(),
            Some(c) => {
                self.bump();
                match c {
                    't' => Ok('\t'),
                    'b' => Ok('\u{8}'),
                    'n' => Ok('\n'),
                    'r' => Ok('\r'),
                    'f' => Ok('\u{c}'),
                    '"' => Ok('"'),
                    '\'' => Ok('\''),
                    '\\' => Ok('\\'),
                    other => Err(self.error(format!("invalid string escape `\\{other}`"))),
                }
            }
            None => Err(self.error("unterminated escape")),
        }
    }

    fn numeric(&mut self) -> Result<Term, RdfError> {
        let mut text = String::new();
        if let Some(c @ ('+' | '-')) = self.peek() {
            text.push(c);
            self.bump();
        }
        let mut seen_dot = false;
        let mut seen_exp = false;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                text.push(c);
                self.bump();
            } else if c == '.' && !seen_dot && !seen_exp && self.rest()[1..].starts_with(|d: char| d.is_ascii_digit()) {
                seen_dot = true;
                text.push(c);
                self.bump();
            } else if (c == 'e' || c == 'E') && !seen_exp {
                seen_exp = true;
                text.push(c);
                self.bump();
                if let Some(s @ ('+' | '-')) = self.peek() {
                    text.push(s);
                    self.bump();
                }
            } else {
                break;
            }
        }
        if !text.chars().any(|c| c.is_ascii_digit()) {
            return Err(self.error("malformed numeric literal"));
        }
        let datatype = if seen_exp {
            ns::XSD_DOUBLE
        } else if seen_dot {
            ns::XSD_DECIMAL
        } else {
            ns::XSD_INTEGER
        };
        Ok(Term::Literal(Literal::typed(text, ns::iri(datatype))))
    }
}

#[cfg(test)]
mod tests {
    use super::super::{RdfFormat, parse};
    use super::*;

    #[test]
    fn single_ntriple() {
        let g = parse("<urn:a> <urn:p> \"x\" .", RdfFormat::NTriples).unwrap();
        assert_eq!(g.len(), 1);
        let t = g.iter().next().unwrap();
        assert_eq!(t.object, Term::Literal(Literal::plain("x")));
    }

    #[test]
    fn turtle_prefix_and_a() {
        let g = parse(
            "@prefix oac: <http://www.openannotation.org/ns/> . <urn:a> a oac:Annotation .",
            RdfFormat::Turtle,
        )
        .unwrap();
        assert_eq!(g.len(), 1);
        let t = g.iter().next().unwrap();
        assert_eq!(t.predicate.as_str(), ns::RDF_TYPE);
        assert_eq!(
            t.object,
            Term::Iri(Iri::parse("http://www.openannotation.org/ns/Annotation").unwrap())
        );
    }

    #[test]
    fn duplicate_statements_collapse() {
        let doc = "<urn:a> <urn:p> \"x\" .\n<urn:a> <urn:p> \"x\" .\n";
        assert_eq!(parse(doc, RdfFormat::NTriples).unwrap().len(), 1);
        assert_eq!(parse(doc, RdfFormat::Turtle).unwrap().len(), 1);
    }

    #[test]
    fn abbreviations() {
        let doc = r#"PREFIX ex: <http://ex.org/>
ex:s ex:p ex:o1 , ex:o2 ;
     ex:q "v"@en , 42 , 1.5 , true ;
     a ex:C ;
.
"#;
        let g = parse(doc, RdfFormat::Turtle).unwrap();
        assert_eq!(g.len(), 7);
    }

    #[test]
    fn unknown_prefix_reports_position() {
        let err = parse("<urn:a> <urn:p> foo:bar .", RdfFormat::Turtle).unwrap_err();
        assert_eq!(
            err,
            RdfError::UnknownPrefix {
                prefix: "foo".into(),
                line: 1,
                column: 17
            }
        );
    }

    #[test]
    fn relative_iri_rejected() {
        let err = parse("<a> <urn:p> <urn:o> .", RdfFormat::NTriples).unwrap_err();
        assert!(matches!(err, RdfError::RelativeIriAt { line: 1, column: 1, .. }));
    }

    #[test]
    fn syntax_error_has_line_and_column() {
        let err = parse("<urn:a> <urn:p> <urn:o> .\n<urn:a> <urn:p> .", RdfFormat::NTriples).unwrap_err();
        match err {
            RdfError::Syntax { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ntriples_rejects_turtle_sugar() {
        assert!(parse("<urn:a> a <urn:C> .", RdfFormat::NTriples).is_err());
        assert!(parse("<urn:a> <urn:p> 1 .", RdfFormat::NTriples).is_err());
    }

    #[test]
    fn collections_rejected() {
        assert!(parse("<urn:a> <urn:p> ( <urn:b> ) .", RdfFormat::Turtle).is_err());
        assert!(parse("<urn:a> <urn:p> [ <urn:q> <urn:b> ] .", RdfFormat::Turtle).is_err());
    }

    #[test]
    fn escapes() {
        let g = parse(
            r#"<urn:a> <urn:p> "tab\there é \U0001F600 \"q\"" ."#,
            RdfFormat::NTriples,
        )
        .unwrap();
        let lit = g.iter().next().unwrap().object.as_literal().unwrap().clone();
        assert_eq!(lit.lexical(), "tab\there é 😀 \"q\"");
    }

    #[test]
    fn blank_labels_preserved_per_document() {
        let g = parse("_:b1 <urn:p> _:b2 .\n_:b2 <urn:p> _:b1 .", RdfFormat::NTriples).unwrap();
        assert_eq!(g.blank_nodes().len(), 2);
        let g = parse("_:a.b <urn:p> \"x\" .", RdfFormat::Turtle).unwrap();
        assert_eq!(g.blank_nodes().len(), 1);
    }

    #[test]
    fn long_strings() {
        let g = parse("<urn:a> <urn:p> \"\"\"line1\nline \"2\" end\"\"\" .", RdfFormat::Turtle).unwrap();
        let lit = g.iter().next().unwrap().object.as_literal().unwrap().clone();
        assert_eq!(lit.lexical(), "line1\nline \"2\" end");
    }

    #[test]
    fn datetime_literal() {
        let g = parse(
            "<urn:a> <urn:p> \"2010-01-01T00:00:00Z\"^^<http://www.w3.org/2001/XMLSchema#dateTime> .",
            RdfFormat::NTriples,
        )
        .unwrap();
        let lit = g.iter().next().unwrap().object.as_literal().unwrap().clone();
        assert_eq!(lit.as_datetime().unwrap().to_string(), "2010-01-01T00:00:00Z");
    }
}
