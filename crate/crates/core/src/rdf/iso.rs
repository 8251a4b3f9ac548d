//! Graph isomorphism for tree-shaped blank-node structures.
//!
//! Each blank node is replaced by a canonical string built from its outgoing
//! triples, recursively. Two graphs are isomorphic when the multisets of
//! top-level canonical triples agree. Blank nodes on cycles keep their labels,
//! so graphs with blank cycles only compare equal when the labels match.

use std::collections::{BTreeMap, BTreeSet};

use super::{Graph, Term};

struct Canon<'a> {
    graph: &'a Graph,
    memo: BTreeMap<Term, String>,
    active: BTreeSet<Term>,
}

impl<'a> Canon<'a> {
    fn term(&mut self, t: &Term) -> String {
        match t {
            Term::BlankNode(_) => self.blank(t),
            other => other.to_string(),
        }
    }

    fn blank(&mut self, b: &Term) -> String {
        if let Some(c) = self.memo.get(b) {
            return c.clone();
        }
        if !self.active.insert(b.clone()) {
            return b.to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        let triples: Vec<_> = self.graph.with_subject(b).cloned().collect();
        for t in &triples {
            let o = self.term(&t.object);
            parts.push(format!("{} {}", t.predicate, o));
        }
        parts.sort();
        self.active.remove(b);
        let c = format!("[{}]", parts.join(" ; "));
        self.memo.insert(b.clone(), c.clone());
        c
    }
}

fn canonical(graph: &Graph) -> Vec<String> {
    let referenced: BTreeSet<&Term> = graph.iter().map(|t| &t.object).filter(|o| o.is_blank()).collect();
    let mut canon = Canon { graph, memo: BTreeMap::new(), active: BTreeSet::new() };
    let mut out = Vec::new();
    let mut blank_roots: BTreeSet<&Term> = BTreeSet::new();
    for t in graph.iter() {
        if t.subject.is_blank() {
            // blank subjects are folded into whoever references them
            if !referenced.contains(&t.subject) {
                blank_roots.insert(&t.subject);
            }
        } else {
            let o = canon.term(&t.object);
            out.push(format!("{} {} {o}", t.subject, t.predicate));
        }
    }
    for b in blank_roots {
        out.push(canon.blank(b));
    }
    out.sort();
    out
}

/// True when `a` and `b` are equal up to blank-node relabeling (for
/// tree-shaped blank-node structures). Prefix maps are ignored.
pub fn isomorphic(a: &Graph, b: &Graph) -> bool {
    a.len() == b.len() && canonical(a) == canonical(b)
}
