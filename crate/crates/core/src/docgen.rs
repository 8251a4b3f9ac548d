//! Documentation for patterns: one page per pattern node listing mandatory
//! and recommended properties with their ranges. Restricted ranges link to
//! the nested page; everything else links to the vocabulary's own page.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::engine::{flat_sets, Pattern, PatternKind, PatternMetadata, PatternNode, RangeSpec, RangeType};
use crate::ns;
use crate::operator::serialize_operator;
use crate::rdf::Graph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Link {
    pub label: String,
    pub target: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DocRow {
    pub property: String,
    pub required: bool,
    /// Plain-text range, e.g. `HotelRoom + Product`.
    pub range: String,
    pub links: Vec<Link>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DocPage {
    pub title: String,
    pub anchor: String,
    pub description: String,
    pub rows: Vec<DocRow>,
    pub nested_pages: Vec<DocPage>,
}

impl DocPage {
    /// This page and every nested page, depth first.
    pub fn all(&self) -> Vec<&DocPage> {
        let mut out = vec![self];
        for n in &self.nested_pages {
            out.extend(n.all());
        }
        out
    }
}

/// Anchor for a dotted node name: `Hotel.location` becomes `hotel-location`.
pub fn anchor(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '-' })
        .collect()
}

fn term_link(iri: &str) -> String {
    match iri.strip_prefix(ns::SCHEMA) {
        Some(local) => format!("https://schema.org/{local}"),
        None => iri.to_owned(),
    }
}

fn type_link(iri: &str) -> Link {
    Link { label: ns::local_name(iri).to_owned(), target: term_link(iri) }
}

fn range_links(pattern: &Pattern, r: &RangeSpec) -> (String, Vec<Link>) {
    match r {
        RangeSpec::Simple { range } => {
            let iri = match range {
                RangeType::Class { iri } => iri,
                RangeType::Datatype { schema, .. } => schema,
            };
            let l = type_link(iri);
            (l.label.clone(), vec![l])
        }
        RangeSpec::Conjunction { members, .. } => {
            let links: Vec<Link> = members.iter().map(|m| type_link(m)).collect();
            let label = links.iter().map(|l| l.label.as_str()).collect::<Vec<_>>().join(" + ");
            (label, links)
        }
        RangeSpec::Restricted { class, node } => {
            let name = pattern.node(node).map(|n| n.name.as_str()).unwrap_or(node);
            let label = ns::local_name(class).to_owned();
            (label.clone(), vec![Link { label, target: format!("#{}", anchor(name)) }])
        }
        RangeSpec::Alternatives { branches } => {
            let mut labels = Vec::new();
            let mut links = Vec::new();
            for b in branches {
                let (l, ls) = range_links(pattern, b);
                labels.push(l);
                links.extend(ls);
            }
            (labels.join(" or "), links)
        }
    }
}

fn page(pattern: &Pattern, node: &PatternNode) -> DocPage {
    let description = if node.id == pattern.root().id {
        format!("{} for {}.", pattern.kind, ns::local_name(&pattern.target))
    } else {
        format!("{} restricted to the properties below.", ns::local_name(&node.base_type))
    };
    let mut rows = Vec::new();
    let mut nested_pages = Vec::new();
    for lp in &node.properties {
        let (range, links) = match &lp.range {
            Some(r) => range_links(pattern, r),
            None => (String::new(), Vec::new()),
        };
        rows.push(DocRow { property: lp.path.clone(), required: lp.required, range, links });
        if let Some(r) = &lp.range {
            for id in r.nodes() {
                if let Some(child) = pattern.node(id) {
                    nested_pages.push(page(pattern, child));
                }
            }
        }
    }
    DocPage { title: node.name.clone(), anchor: anchor(&node.name), description, rows, nested_pages }
}

pub fn doc_pages(pattern: &Pattern) -> DocPage {
    page(pattern, pattern.root())
}

fn table(out: &mut String, rows: &[&DocRow]) {
    out.push_str("| Property | Range |\n| --- | --- |\n");
    for r in rows {
        let cell = if r.links.is_empty() {
            "_none admitted_".to_owned()
        } else if r.links.len() == 1 {
            format!("[{}]({})", r.range, r.links[0].target)
        } else {
            let parts: Vec<String> = r.links.iter().map(|l| format!("[{}]({})", l.label, l.target)).collect();
            let sep = if r.range.contains(" or ") { " or " } else { " + " };
            parts.join(sep)
        };
        let _ = writeln!(out, "| [{}]({}) | {cell} |", ns::local_name(&r.property), term_link(&r.property));
    }
}

fn write_page(out: &mut String, p: &DocPage, depth: usize) {
    let h = "#".repeat(depth);
    let _ = writeln!(out, "<a id=\"{}\"></a>\n\n{h} {}\n\n{}\n", p.anchor, p.title, p.description);
    for (heading, required) in [("Mandatory", true), ("Recommended", false)] {
        let rows: Vec<&DocRow> = p.rows.iter().filter(|r| r.required == required).collect();
        if rows.is_empty() {
            continue;
        }
        let _ = writeln!(out, "{h}# {heading}\n");
        table(out, &rows);
        out.push('\n');
    }
    for n in &p.nested_pages {
        write_page(out, n, 2);
    }
}

/// Markdown page for the pattern. Output depends only on the pattern.
pub fn render_markdown(pattern: &Pattern) -> String {
    let mut out = String::new();
    write_page(&mut out, &doc_pages(pattern), 1);
    while out.ends_with("\n\n") {
        out.pop();
    }
    out
}

#[derive(Serialize)]
struct JsonLocalProperty<'a> {
    #[serde(rename = "type")]
    owner: &'a str,
    property: &'a str,
}

#[derive(Serialize)]
struct JsonLocalRange<'a> {
    #[serde(rename = "type")]
    owner: &'a str,
    property: &'a str,
    range: &'a RangeSpec,
    flat: BTreeSet<String>,
}

#[derive(Serialize)]
struct JsonPattern<'a> {
    kind: PatternKind,
    target: &'a str,
    types: BTreeSet<String>,
    properties: BTreeSet<String>,
    local_properties: Vec<JsonLocalProperty<'a>>,
    local_ranges: Vec<JsonLocalRange<'a>>,
    root: &'a PatternNode,
    nested: &'a [PatternNode],
    metadata: &'a PatternMetadata,
}

/// JSON rendering. Fields appear in this order: `kind`, `target`, `types`,
/// `properties`, `local_properties`, `local_ranges`, `root`, `nested`,
/// `metadata`. Sets are sorted.
pub fn render_json(pattern: &Pattern) -> String {
    let f = flat_sets(pattern);
    let doc = JsonPattern {
        kind: pattern.kind,
        target: &pattern.target,
        types: f.types,
        properties: f.properties,
        local_properties: pattern
            .local_properties
            .iter()
            .map(|(t, p)| JsonLocalProperty { owner: t, property: p })
            .collect(),
        local_ranges: pattern
            .local_ranges
            .iter()
            .map(|((t, p), r)| JsonLocalRange { owner: t, property: p, range: r, flat: r.flat_types() })
            .collect(),
        root: pattern.root(),
        nested: &pattern.nodes[1..],
        metadata: &pattern.metadata,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("pattern serializes");
    s.push('\n');
    s
}

/// The operator behind the pattern as a SHACL shape graph.
pub fn render_shacl(pattern: &Pattern) -> Graph {
    serialize_operator(&pattern.operator)
}

/// Base file name for rendered output.
pub fn file_stem(pattern: &Pattern) -> String {
    ns::local_name(&pattern.target).to_owned()
}
