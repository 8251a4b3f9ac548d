//! A small RDF data model with a Turtle-subset reader and writer.
//!
//! Graphs are plain triple sets with two orderings kept in sync: one sorted by
//! subject/predicate/object and one by predicate/object/subject. That covers
//! every lookup the rest of the crate needs.

mod iso;
mod turtle;
mod writer;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::ns;

pub use iso::isomorphic;
pub use turtle::{parse_turtle, TurtleError};
pub use writer::serialize_turtle;

/// An RDF literal. Plain literals carry `xsd:string`, language-tagged ones
/// carry `rdf:langString`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    lexical: String,
    datatype: String,
    language: Option<String>,
}

impl Literal {
    pub fn string(lexical: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), datatype: ns::xsd::STRING.to_owned(), language: None }
    }

    pub fn typed(lexical: impl Into<String>, datatype: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), datatype: datatype.into(), language: None }
    }

    pub fn lang(lexical: impl Into<String>, language: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: ns::rdf::LANG_STRING.to_owned(),
            language: Some(language.into().to_ascii_lowercase()),
        }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &str {
        &self.datatype
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(String),
    BlankNode(String),
    Literal(Literal),
}

impl Term {
    pub fn iri(iri: impl Into<String>) -> Self {
        let iri = iri.into();
        debug_assert!(is_absolute_iri(&iri), "relative IRI {iri}");
        Term::Iri(iri)
    }

    pub fn blank(label: impl Into<String>) -> Self {
        Term::BlankNode(label.into())
    }

    pub fn literal(lit: Literal) -> Self {
        Term::Literal(lit)
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            _ => None,
        }
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::BlankNode(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }
}

impl fmt::Display for Term {
    /// N-Triples form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(i) => write!(f, "<{i}>"),
            Term::BlankNode(b) => write!(f, "_:{b}"),
            Term::Literal(l) => {
                write!(f, "\"{}\"", writer::escape_string(&l.lexical))?;
                if let Some(lang) = &l.language {
                    write!(f, "@{lang}")
                } else if l.datatype != ns::xsd::STRING {
                    write!(f, "^^<{}>", l.datatype)
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// True when `iri` starts with a scheme followed by `:`.
pub fn is_absolute_iri(iri: &str) -> bool {
    let Some(colon) = iri.find(':') else { return false };
    let scheme = &iri[..colon];
    let mut chars = scheme.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl Triple {
    /// Panics (in debug builds) if `predicate` is not an IRI or `subject` is a literal.
    pub fn new(subject: Term, predicate: Term, object: Term) -> Self {
        debug_assert!(!subject.is_literal(), "literal subject");
        debug_assert!(predicate.as_iri().is_some(), "non-IRI predicate");
        Triple { subject, predicate, object }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// A set of triples plus the prefix map it was read with (or should be
/// written with).
#[derive(Clone, Debug, Default)]
pub struct Graph {
    spo: BTreeSet<Triple>,
    pos: BTreeSet<(Term, Term, Term)>,
    prefixes: BTreeMap<String, String>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.spo == other.spo
    }
}

impl Eq for Graph {}

// Smallest possible term, used as a range lower bound.
fn min_term() -> Term {
    Term::Iri(String::new())
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false when the triple was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        if self.spo.contains(&triple) {
            return false;
        }
        self.pos.insert((triple.predicate.clone(), triple.object.clone(), triple.subject.clone()));
        self.spo.insert(triple)
    }

    pub fn add(&mut self, subject: Term, predicate: &str, object: Term) -> bool {
        self.insert(Triple::new(subject, Term::iri(predicate), object))
    }

    pub fn add_prefix(&mut self, label: impl Into<String>, namespace: impl Into<String>) {
        self.prefixes.insert(label.into(), namespace.into());
    }

    pub fn prefixes(&self) -> &BTreeMap<String, String> {
        &self.prefixes
    }

    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.spo.contains(triple)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> {
        self.spo.iter()
    }

    /// Adds every triple and prefix of `other`.
    pub fn extend(&mut self, other: &Graph) {
        for t in other.iter() {
            self.insert(t.clone());
        }
        for (k, v) in &other.prefixes {
            self.prefixes.entry(k.clone()).or_insert_with(|| v.clone());
        }
    }

    pub fn with_subject<'a>(&'a self, subject: &'a Term) -> impl Iterator<Item = &'a Triple> + 'a {
        let lo = Triple { subject: subject.clone(), predicate: min_term(), object: min_term() };
        self.spo.range(lo..).take_while(move |t| &t.subject == subject)
    }

    pub fn with_subject_predicate<'a>(
        &'a self,
        subject: &'a Term,
        predicate: &'a Term,
    ) -> impl Iterator<Item = &'a Triple> + 'a {
        let lo = Triple { subject: subject.clone(), predicate: predicate.clone(), object: min_term() };
        self.spo
            .range(lo..)
            .take_while(move |t| &t.subject == subject && &t.predicate == predicate)
    }

    pub fn with_predicate_object<'a>(
        &'a self,
        predicate: &'a Term,
        object: &'a Term,
    ) -> impl Iterator<Item = Triple> + 'a {
        let lo = (predicate.clone(), object.clone(), min_term());
        self.pos
            .range(lo..)
            .take_while(move |(p, o, _)| p == predicate && o == object)
            .map(|(p, o, s)| Triple { subject: s.clone(), predicate: p.clone(), object: o.clone() })
    }

    pub fn with_predicate<'a>(&'a self, predicate: &'a Term) -> impl Iterator<Item = Triple> + 'a {
        let lo = (predicate.clone(), min_term(), min_term());
        self.pos
            .range(lo..)
            .take_while(move |(p, _, _)| p == predicate)
            .map(|(p, o, s)| Triple { subject: s.clone(), predicate: p.clone(), object: o.clone() })
    }

    /// Objects of `(subject, predicate, ?)` in term order.
    pub fn objects(&self, subject: &Term, predicate: &Term) -> Vec<Term> {
        self.with_subject_predicate(subject, predicate).map(|t| t.object.clone()).collect()
    }

    /// Subjects of `(?, predicate, object)` in term order.
    pub fn subjects(&self, predicate: &Term, object: &Term) -> Vec<Term> {
        self.with_predicate_object(predicate, object).map(|t| t.subject).collect()
    }

    /// Number of triples that use `object` in object position.
    pub fn references(&self, object: &Term) -> usize {
        self.pos.iter().filter(|(_, o, _)| o == object).count()
    }
}

/// Objects of `(subject, predicate, ?)` in deterministic term order.
pub fn objects(graph: &Graph, subject: &Term, predicate: &Term) -> Vec<Term> {
    graph.objects(subject, predicate)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ListError {
    #[error("list node {node} has no rdf:first")]
    MissingFirst { node: Term },
    #[error("list node {node} has no rdf:rest")]
    MissingRest { node: Term },
    #[error("list node {node} branches: {count} values for {predicate}")]
    Branching { node: Term, predicate: String, count: usize },
    #[error("list node {node} is revisited; the list is cyclic")]
    Cycle { node: Term },
}

/// Reads the members of the RDF collection starting at `head`.
pub fn read_list(graph: &Graph, head: &Term) -> Result<Vec<Term>, ListError> {
    let first = Term::iri(ns::rdf::FIRST);
    let rest = Term::iri(ns::rdf::REST);
    let nil = Term::iri(ns::rdf::NIL);
    let mut members = Vec::new();
    let mut seen = BTreeSet::new();
    let mut node = head.clone();
    while node != nil {
        if !seen.insert(node.clone()) {
            return Err(ListError::Cycle { node });
        }
        let firsts = graph.objects(&node, &first);
        let rests = graph.objects(&node, &rest);
        match firsts.len() {
            0 => return Err(ListError::MissingFirst { node }),
            1 => {}
            n => {
                return Err(ListError::Branching { node, predicate: "rdf:first".into(), count: n })
            }
        }
        match rests.len() {
            0 => return Err(ListError::MissingRest { node }),
            1 => {}
            n => return Err(ListError::Branching { node, predicate: "rdf:rest".into(), count: n }),
        }
        members.push(firsts.into_iter().next().unwrap());
        node = rests.into_iter().next().unwrap();
    }
    Ok(members)
}

/// Writes `members` as an RDF collection, minting blank nodes `{prefix}0..`,
/// and returns the head (`rdf:nil` for an empty list).
pub fn write_list(graph: &mut Graph, members: &[Term], mut mint: impl FnMut() -> Term) -> Term {
    let nodes: Vec<Term> = members.iter().map(|_| mint()).collect();
    for (i, member) in members.iter().enumerate() {
        graph.add(nodes[i].clone(), ns::rdf::FIRST, member.clone());
        let next = nodes.get(i + 1).cloned().unwrap_or_else(|| Term::iri(ns::rdf::NIL));
        graph.add(nodes[i].clone(), ns::rdf::REST, next);
    }
    nodes.into_iter().next().unwrap_or_else(|| Term::iri(ns::rdf::NIL))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(local: &str) -> Term {
        Term::iri(format!("http://schema.org/{local}"))
    }

    fn two_element_list() -> (Graph, Term) {
        let mut g = Graph::new();
        let (a, b) = (Term::blank("l0"), Term::blank("l1"));
        g.add(a.clone(), ns::rdf::FIRST, s("Place"));
        g.add(a.clone(), ns::rdf::REST, b.clone());
        g.add(b.clone(), ns::rdf::FIRST, s("Text"));
        g.add(b, ns::rdf::REST, Term::iri(ns::rdf::NIL));
        (g, a)
    }

    #[test]
    fn duplicate_insert_is_a_no_op() {
        let mut g = Graph::new();
        assert!(g.add(s("Hotel"), ns::rdf::TYPE, s("LodgingBusiness")));
        assert!(!g.add(s("Hotel"), ns::rdf::TYPE, s("LodgingBusiness")));
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn lookups_return_exact_matches() {
        let mut g = Graph::new();
        g.add(s("Hotel"), ns::rdf::TYPE, s("A"));
        g.add(s("Hotel"), ns::rdf::TYPE, s("B"));
        g.add(s("Hotel"), ns::rdfs::SUB_CLASS_OF, s("A"));
        g.add(s("Motel"), ns::rdf::TYPE, s("A"));
        let ty = Term::iri(ns::rdf::TYPE);
        assert_eq!(g.with_subject(&s("Hotel")).count(), 3);
        assert_eq!(g.objects(&s("Hotel"), &ty), vec![s("A"), s("B")]);
        assert_eq!(g.subjects(&ty, &s("A")), vec![s("Hotel"), s("Motel")]);
        assert!(g.objects(&s("Nothing"), &ty).is_empty());
    }

    #[test]
    fn objects_on_empty_graph() {
        let g = Graph::new();
        assert!(objects(&g, &s("Hotel"), &Term::iri(ns::rdf::TYPE)).is_empty());
    }

    #[test]
    fn objects_on_list_head_yields_first_element() {
        let (g, head) = two_element_list();
        assert_eq!(objects(&g, &head, &Term::iri(ns::rdf::FIRST)), vec![s("Place")]);
    }

    #[test]
    fn read_list_cases() {
        let g = Graph::new();
        assert_eq!(read_list(&g, &Term::iri(ns::rdf::NIL)).unwrap(), vec![]);

        let (g, head) = two_element_list();
        assert_eq!(read_list(&g, &head).unwrap(), vec![s("Place"), s("Text")]);

        let mut bad = g.clone();
        bad.add(head.clone(), ns::rdf::REST, Term::blank("other"));
        assert!(matches!(read_list(&bad, &head), Err(ListError::Branching { .. })));

        let mut missing = Graph::new();
        missing.add(Term::blank("x"), ns::rdf::REST, Term::iri(ns::rdf::NIL));
        assert!(matches!(
            read_list(&missing, &Term::blank("x")),
            Err(ListError::MissingFirst { .. })
        ));

        let mut cyclic = Graph::new();
        cyclic.add(Term::blank("x"), ns::rdf::FIRST, s("A"));
        cyclic.add(Term::blank("x"), ns::rdf::REST, Term::blank("x"));
        assert!(matches!(read_list(&cyclic, &Term::blank("x")), Err(ListError::Cycle { .. })));
    }

    #[test]
    fn write_then_read_list() {
        let mut g = Graph::new();
        let mut n = 0;
        let members = vec![s("A"), s("B"), s("C")];
        let head = write_list(&mut g, &members, || {
            n += 1;
            Term::blank(format!("w{n}"))
        });
        assert_eq!(g.len(), 6);
        assert_eq!(read_list(&g, &head).unwrap(), members);
    }

    #[test]
    fn absolute_iris() {
        assert!(is_absolute_iri("http://schema.org/"));
        assert!(is_absolute_iri("urn:x"));
        assert!(is_absolute_iri("hhttp://www.w3.org/2001/XMLSchema#"));
        assert!(!is_absolute_iri("Hotel"));
        assert!(!is_absolute_iri("/a:b"));
        assert!(!is_absolute_iri("1x:y"));
    }
}
