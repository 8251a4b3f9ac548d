//! Deterministic Turtle writer.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::{Graph, Literal, Term, Triple};
use crate::ns;

const INDENT: &str = "    ";

pub(crate) fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

fn is_safe_local(local: &str) -> bool {
    let ok = |c: char| c.is_ascii_alphanumeric() || c == '_' || c == '-';
    let mut chars = local.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_alphanumeric() || c == '_' => {
            local.chars().all(|c| ok(c) || c == '.') && !local.ends_with('.')
        }
        _ => false,
    }
}

fn is_integer(lex: &str) -> bool {
    let digits = lex.strip_prefix(['+', '-']).unwrap_or(lex);
    !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit())
}

struct Writer<'a> {
    graph: &'a Graph,
    // namespace -> label, longest namespace wins when several match
    prefixes: Vec<(&'a str, &'a str)>,
    inline: BTreeSet<Term>,
    lists: BTreeMap<Term, Vec<Term>>,
}

impl<'a> Writer<'a> {
    fn iri(&self, iri: &str) -> String {
        for (label, ns) in &self.prefixes {
            if let Some(local) = iri.strip_prefix(ns) {
                if is_safe_local(local) {
                    return format!("{label}:{local}");
                }
            }
        }
        format!("<{iri}>")
    }

    fn literal(&self, lit: &Literal) -> String {
        let body = escape_string(lit.lexical());
        if let Some(lang) = lit.language() {
            format!("\"{body}\"@{lang}")
        } else if lit.datatype() == ns::xsd::STRING {
            format!("\"{body}\"")
        } else if lit.datatype() == ns::xsd::INTEGER && is_integer(lit.lexical()) {
            lit.lexical().to_owned()
        } else {
            format!("\"{body}\"^^{}", self.iri(lit.datatype()))
        }
    }

    fn term(&self, term: &Term, depth: usize) -> String {
        match term {
            Term::Iri(i) => self.iri(i),
            Term::Literal(l) => self.literal(l),
            Term::BlankNode(label) => {
                if let Some(members) = self.lists.get(term) {
                    let items: Vec<String> = members.iter().map(|m| self.term(m, depth)).collect();
                    format!("( {} )", items.join(" "))
                } else if self.inline.contains(term) {
                    let body = self.predicate_objects(term, depth + 1);
                    if body.is_empty() {
                        "[]".to_owned()
                    } else {
                        let pad = INDENT.repeat(depth);
                        format!("[\n{body}\n{pad}]")
                    }
                } else {
                    format!("_:{label}")
                }
            }
        }
    }

    /// `p o , o ;` lines for `subject`, each indented to `depth`.
    fn predicate_objects(&self, subject: &Term, depth: usize) -> String {
        let mut by_pred: BTreeMap<(bool, &Term), Vec<&Term>> = BTreeMap::new();
        let rdf_type = Term::Iri(ns::rdf::TYPE.to_owned());
        for t in self.graph.with_subject(subject) {
            // rdf:type sorts first
            by_pred.entry((t.predicate != rdf_type, &t.predicate)).or_default().push(&t.object);
        }
        let pad = INDENT.repeat(depth);
        let mut lines = Vec::new();
        for ((not_type, pred), objects) in by_pred {
            let p = if !not_type { "a".to_owned() } else { self.term(pred, depth) };
            let objs: Vec<String> = objects.iter().map(|o| self.term(o, depth)).collect();
            lines.push(format!("{pad}{p} {}", objs.join(" , ")));
        }
        lines.join(" ;\n")
    }

    fn subject_block(&self, subject: &Term) -> String {
        let head = match subject {
            Term::Iri(i) => self.iri(i),
            Term::BlankNode(b) => format!("_:{b}"),
            Term::Literal(_) => unreachable!("literal subject"),
        };
        let body = self.predicate_objects(subject, 1);
        // first predicate goes on the subject line
        let body = body.strip_prefix(INDENT).unwrap_or(&body);
        format!("{head} {body} .\n")
    }
}

/// Blank nodes referenced exactly once can be written inline, unless they
/// sit on a cycle of such nodes (no named root reaches them).
fn plan_blank_nodes(graph: &Graph) -> (BTreeSet<Term>, Vec<Term>) {
    let mut refs: BTreeMap<&Term, usize> = BTreeMap::new();
    let mut blanks: BTreeSet<&Term> = BTreeSet::new();
    for t in graph.iter() {
        if t.subject.is_blank() {
            blanks.insert(&t.subject);
        }
        if t.object.is_blank() {
            blanks.insert(&t.object);
            *refs.entry(&t.object).or_default() += 1;
        }
    }
    let once = |b: &Term| refs.get(b).copied() == Some(1);

    let mut roots: Vec<Term> = Vec::new();
    let mut inline = BTreeSet::new();
    let mut visited: BTreeSet<Term> = BTreeSet::new();
    let mut stack: Vec<Term> = Vec::new();

    let mut named: BTreeSet<&Term> = graph.iter().map(|t| &t.subject).filter(|s| !s.is_blank()).collect();
    for b in &blanks {
        if !once(b) {
            named.insert(b);
        }
    }
    let walk = |start: Term, stack: &mut Vec<Term>, visited: &mut BTreeSet<Term>, inline: &mut BTreeSet<Term>| {
        stack.push(start);
        while let Some(node) = stack.pop() {
            if !visited.insert(node.clone()) {
                continue;
            }
            for t in graph.with_subject(&node) {
                if t.object.is_blank() && once(&t.object) && !visited.contains(&t.object) {
                    inline.insert(t.object.clone());
                    stack.push(t.object.clone());
                }
            }
        }
    };
    for r in named {
        roots.push(r.clone());
        walk(r.clone(), &mut stack, &mut visited, &mut inline);
    }
    // blank cycles nobody reaches: label one member and continue from it
    for b in &blanks {
        if !visited.contains(*b) {
            let b = (*b).clone();
            inline.remove(&b);
            roots.push(b.clone());
            walk(b, &mut stack, &mut visited, &mut inline);
        }
    }
    (inline, roots)
}

/// Inline blank nodes that form well-formed `rdf:first`/`rdf:rest` chains
/// (and carry nothing else) are written as collections.
fn plan_lists(graph: &Graph, inline: &BTreeSet<Term>) -> BTreeMap<Term, Vec<Term>> {
    let first = Term::Iri(ns::rdf::FIRST.to_owned());
    let rest = Term::Iri(ns::rdf::REST.to_owned());
    let nil = Term::Iri(ns::rdf::NIL.to_owned());
    let is_cell = |node: &Term| -> Option<(Term, Term)> {
        let triples: Vec<&Triple> = graph.with_subject(node).collect();
        if triples.len() != 2 {
            return None;
        }
        let f = triples.iter().find(|t| t.predicate == first)?;
        let r = triples.iter().find(|t| t.predicate == rest)?;
        Some((f.object.clone(), r.object.clone()))
    };
    let mut lists = BTreeMap::new();
    let mut interior = BTreeSet::new();
    for node in inline {
        if interior.contains(node) {
            continue;
        }
        let mut members = Vec::new();
        let mut chain = Vec::new();
        let mut cur = node.clone();
        let ok = loop {
            if cur == nil {
                break true;
            }
            if !inline.contains(&cur) || chain.contains(&cur) {
                break false;
            }
            let Some((f, r)) = is_cell(&cur) else { break false };
            members.push(f);
            chain.push(cur);
            cur = r;
        };
        if ok && !members.is_empty() {
            interior.extend(chain.into_iter().skip(1));
            lists.insert(node.clone(), members);
        }
    }
    // a node can be recognised as a head before we learn it is interior
    for i in &interior {
        lists.remove(i);
    }
    lists
}

/// Writes `graph` as Turtle. Output is a pure function of the triple set and
/// prefix map: prefixes sorted by label, subjects by term order, `rdf:type`
/// first and remaining predicates sorted.
pub fn serialize_turtle(graph: &Graph) -> String {
    let mut prefixes: Vec<(&str, &str)> =
        graph.prefixes().iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
    prefixes.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(b.0)));

    let (inline, roots) = plan_blank_nodes(graph);
    let lists = plan_lists(graph, &inline);
    let w = Writer { graph, prefixes, inline, lists };

    let mut out = String::new();
    for (label, ns) in graph.prefixes() {
        let _ = writeln!(out, "@prefix {label}: <{ns}> .");
    }
    let mut blocks: Vec<String> = Vec::new();
    let mut roots = roots;
    roots.sort();
    roots.dedup();
    for r in &roots {
        if graph.with_subject(r).next().is_some() {
            blocks.push(w.subject_block(r));
        }
    }
    if !blocks.is_empty() {
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(&blocks.join("\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{isomorphic, parse_turtle};

    fn s(local: &str) -> Term {
        Term::iri(format!("http://schema.org/{local}"))
    }

    #[test]
    fn empty_graph() {
        assert_eq!(serialize_turtle(&Graph::new()), "");
        let mut g = Graph::new();
        g.add_prefix("s", ns::SCHEMA);
        assert_eq!(serialize_turtle(&g), "@prefix s: <http://schema.org/> .\n");
    }

    #[test]
    fn one_triple_golden() {
        let mut g = Graph::new();
        g.add_prefix("s", ns::SCHEMA);
        g.add(s("Hotel"), ns::rdf::TYPE, s("Hotel"));
        assert_eq!(serialize_turtle(&g), "@prefix s: <http://schema.org/> .\n\ns:Hotel a s:Hotel .\n");
    }

    #[test]
    fn nested_blank_nodes_and_lists_are_inlined() {
        let text = "@prefix s: <http://schema.org/> .\n\
                    s:x s:p [ s:q s:A , s:B ; s:r ( s:C [ s:q s:D ] ) ] ; s:n \"t\" , 3 .";
        let g = parse_turtle(text).unwrap();
        let out = serialize_turtle(&g);
        assert_eq!(
            out,
            "@prefix s: <http://schema.org/> .\n\n\
             s:x s:n 3 , \"t\" ;\n    \
             s:p [\n        \
             s:q s:A , s:B ;\n        \
             s:r ( s:C [\n            s:q s:D\n        ] )\n    \
             ] .\n"
        );
        assert!(isomorphic(&g, &parse_turtle(&out).unwrap()));
    }

    #[test]
    fn shared_and_cyclic_blank_nodes_fall_back_to_labels() {
        let mut g = Graph::new();
        g.add_prefix("s", ns::SCHEMA);
        g.add(s("a"), "http://schema.org/p", Term::blank("shared"));
        g.add(s("b"), "http://schema.org/p", Term::blank("shared"));
        g.add(Term::blank("shared"), "http://schema.org/q", s("c"));
        g.add(Term::blank("c1"), "http://schema.org/p", Term::blank("c2"));
        g.add(Term::blank("c2"), "http://schema.org/p", Term::blank("c1"));
        let out = serialize_turtle(&g);
        assert!(out.contains("_:shared s:q s:c ."), "{out}");
        assert!(out.contains("_:c1 s:p [\n"), "{out}");
        let back = parse_turtle(&out).unwrap();
        assert_eq!(back.len(), g.len());
    }

    #[test]
    fn literal_forms() {
        let mut g = Graph::new();
        g.add_prefix("xsd", ns::XSD);
        let x = Term::iri("http://ex.org/x");
        g.add(x.clone(), "http://ex.org/a", Term::Literal(Literal::lang("hi", "en")));
        g.add(x.clone(), "http://ex.org/b", Term::Literal(Literal::typed("2019-01-01", ns::xsd::DATE)));
        g.add(x.clone(), "http://ex.org/c", Term::Literal(Literal::typed("x1", ns::xsd::INTEGER)));
        g.add(x, "http://ex.org/d", Term::Literal(Literal::string("q\"\n")));
        let out = serialize_turtle(&g);
        assert!(out.contains("\"hi\"@en"));
        assert!(out.contains("\"2019-01-01\"^^xsd:date"));
        assert!(out.contains("\"x1\"^^xsd:integer"));
        assert!(out.contains("\"q\\\"\\n\""));
        assert_eq!(parse_turtle(&out).unwrap(), g);
    }

    #[test]
    fn unsafe_locals_use_full_iris() {
        let mut g = Graph::new();
        g.add_prefix("ex", "http://ex.org/");
        g.add(Term::iri("http://ex.org/a/b"), "http://ex.org/p", Term::iri("http://ex.org/c."));
        let out = serialize_turtle(&g);
        assert!(out.contains("<http://ex.org/a/b> ex:p <http://ex.org/c.> ."), "{out}");
    }
}
