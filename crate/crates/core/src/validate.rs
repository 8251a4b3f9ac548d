//! Checking instance data against a pattern.
//!
//! Every node typed with the pattern's target (or a subtype) is a focus
//! node. Required properties need a value, values must fit the local
//! range, and properties the pattern does not list are reported. Nested
//! restrictions are checked recursively on the value nodes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::datatypes::lexical_ok;
use crate::engine::{Pattern, RangeSpec, RangeType};
use crate::ns;
use crate::rdf::{Graph, Literal, Term};
use crate::vocab::Universe;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Severity {
    Info,
    Warning,
    Violation,
}

impl Severity {
    pub fn iri(self) -> &'static str {
        match self {
            Severity::Info => ns::sh::INFO,
            Severity::Warning => ns::sh::WARNING,
            Severity::Violation => ns::sh::VIOLATION,
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Info => "info",
            Severity::Warning => "warning",
            Severity::Violation => "violation",
        })
    }
}

impl std::str::FromStr for Severity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "info" => Ok(Severity::Info),
            "warning" => Ok(Severity::Warning),
            "violation" => Ok(Severity::Violation),
            _ => Err(format!("unknown severity {s:?}; expected warning or violation")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ResultKind {
    MissingRequired,
    WrongValueType,
    DisallowedProperty,
    NoDisjunctBranch,
    NestedFailure,
}

impl fmt::Display for ResultKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationResult {
    #[serde(serialize_with = "term_string")]
    pub focus: Term,
    pub path: Option<String>,
    #[serde(serialize_with = "opt_term_string")]
    pub value: Option<Term>,
    pub kind: ResultKind,
    pub severity: Severity,
    /// SHACL constraint component the result corresponds to.
    pub component: &'static str,
    pub message: String,
    pub nested: Vec<ValidationResult>,
}

fn term_string<S: serde::Serializer>(t: &Term, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&t.to_string())
}

fn opt_term_string<S: serde::Serializer>(t: &Option<Term>, s: S) -> Result<S::Ok, S::Error> {
    match t {
        Some(t) => s.serialize_some(&t.to_string()),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub conforms: bool,
    #[serde(skip)]
    pub targets: Vec<Term>,
    pub results: Vec<ValidationResult>,
}

impl ValidationReport {
    /// Top-level results of the given severity.
    pub fn count(&self, severity: Severity) -> usize {
        self.results.iter().filter(|r| r.severity == severity).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    /// Severity of properties the pattern does not list.
    pub closedness: Severity,
}

impl Default for Options {
    fn default() -> Self {
        Options { closedness: Severity::Warning }
    }
}

/// Nodes typed with the pattern target or one of its subtypes, in term order.
pub fn select_targets(data: &Graph, pattern: &Pattern, u: &Universe) -> Vec<Term> {
    let rdf_type = Term::iri(ns::rdf::TYPE);
    let mut out = BTreeSet::new();
    for tr in data.with_predicate(&rdf_type) {
        let Some(t) = tr.object.as_iri() else { continue };
        if u.type_def(t).is_some() && u.is_subtype_of(t, &pattern.target).unwrap_or(false) {
            out.insert(tr.subject.clone());
        }
    }
    out.into_iter().collect()
}

pub fn validate(data: &Graph, pattern: &Pattern, u: &Universe) -> ValidationReport {
    validate_with(data, pattern, u, &Options::default())
}

pub fn validate_with(data: &Graph, pattern: &Pattern, u: &Universe, options: &Options) -> ValidationReport {
    let targets = select_targets(data, pattern, u);
    let mut v = Validator { data, pattern, u, options, memo: BTreeMap::new(), active: BTreeSet::new() };
    let mut results = Vec::new();
    for t in &targets {
        results.extend(v.node(t, &pattern.root().id));
    }
    let conforms = !results.iter().any(|r| r.severity == Severity::Violation);
    ValidationReport { conforms, targets, results }
}

struct Validator<'a, 'u> {
    data: &'a Graph,
    pattern: &'a Pattern,
    u: &'a Universe<'u>,
    options: &'a Options,
    memo: BTreeMap<(Term, String), Vec<ValidationResult>>,
    active: BTreeSet<(Term, String)>,
}

fn result(
    focus: &Term,
    path: Option<&str>,
    value: Option<&Term>,
    kind: ResultKind,
    severity: Severity,
    component: &'static str,
    message: String,
) -> ValidationResult {
    ValidationResult {
        focus: focus.clone(),
        path: path.map(str::to_owned),
        value: value.cloned(),
        kind,
        severity,
        component,
        message,
        nested: Vec::new(),
    }
}

fn short(iri: &str) -> &str {
    ns::local_name(iri)
}

impl Validator<'_, '_> {
    fn node(&mut self, focus: &Term, node_id: &str) -> Vec<ValidationResult> {
        let key = (focus.clone(), node_id.to_owned());
        if let Some(r) = self.memo.get(&key) {
            return r.clone();
        }
        // a cycle in the data: the node is already being checked further up
        if !self.active.insert(key.clone()) {
            return Vec::new();
        }
        let node = self.pattern.node(node_id).expect("pattern node exists");
        let mut out = Vec::new();
        let mut allowed: BTreeSet<&str> = BTreeSet::from([ns::rdf::TYPE]);
        for lp in &node.properties {
            allowed.insert(&lp.path);
            let values = self.data.objects(focus, &Term::iri(&lp.path));
            if lp.required && values.is_empty() {
                out.push(result(
                    focus,
                    Some(&lp.path),
                    None,
                    ResultKind::MissingRequired,
                    Severity::Violation,
                    ns::sh::MIN_COUNT_COMPONENT,
                    format!("{} requires a value for {}", node.name, short(&lp.path)),
                ));
            }
            for v in &values {
                match &lp.range {
                    Some(range) => out.extend(self.value(focus, &lp.path, v, range)),
                    // nothing the constraint names fits the property's range
                    None => out.push(result(
                        focus,
                        Some(&lp.path),
                        Some(v),
                        ResultKind::WrongValueType,
                        Severity::Violation,
                        ns::sh::CLASS_COMPONENT,
                        format!("{} admits no value type in this pattern", short(&lp.path)),
                    )),
                }
            }
        }
        let mut seen = BTreeSet::new();
        for tr in self.data.with_subject(focus) {
            let Some(p) = tr.predicate.as_iri() else { continue };
            if !allowed.contains(p) && seen.insert(p.to_owned()) {
                out.push(result(
                    focus,
                    Some(p),
                    None,
                    ResultKind::DisallowedProperty,
                    self.options.closedness,
                    ns::sh::CLOSED_COMPONENT,
                    format!("{} is not a property of {}", short(p), node.name),
                ));
            }
        }
        self.active.remove(&key);
        self.memo.insert(key, out.clone());
        out
    }

    fn has_type(&self, value: &Term, class: &str) -> bool {
        self.data
            .objects(value, &Term::iri(ns::rdf::TYPE))
            .iter()
            .filter_map(Term::as_iri)
            .any(|t| t == class || (self.u.type_def(t).is_some() && self.u.is_subtype_of(t, class).unwrap_or(false)))
    }

    /// `None` when the value fits; otherwise the single result explaining why.
    fn value(&mut self, focus: &Term, path: &str, value: &Term, range: &RangeSpec) -> Option<ValidationResult> {
        match range {
            RangeSpec::Simple { range: RangeType::Class { iri } } => self.classes(focus, path, value, std::slice::from_ref(iri)),
            RangeSpec::Simple { range: RangeType::Datatype { xsd, .. } } => {
                let ok = match value.as_literal() {
                    Some(l) => literal_fits(l, xsd),
                    None => false,
                };
                (!ok).then(|| {
                    result(
                        focus,
                        Some(path),
                        Some(value),
                        ResultKind::WrongValueType,
                        Severity::Violation,
                        ns::sh::DATATYPE_COMPONENT,
                        format!("{} value {value} is not a valid {}", short(path), short(xsd)),
                    )
                })
            }
            RangeSpec::Conjunction { members, .. } => self.classes(focus, path, value, members),
            RangeSpec::Restricted { class, node } => {
                if let Some(r) = self.classes(focus, path, value, std::slice::from_ref(class)) {
                    return Some(r);
                }
                let nested = self.node(value, node);
                let severity = nested.iter().map(|r| r.severity).max()?;
                let name = self.pattern.node(node).map(|n| n.name.clone()).unwrap_or_default();
                let mut r = result(
                    focus,
                    Some(path),
                    Some(value),
                    ResultKind::NestedFailure,
                    severity,
                    ns::sh::NODE_COMPONENT,
                    format!("{} value {value} does not conform to {name}", short(path)),
                );
                r.nested = nested;
                Some(r)
            }
            RangeSpec::Alternatives { branches } => {
                let mut failures = Vec::new();
                for b in branches {
                    failures.push(self.value(focus, path, value, b)?);
                }
                // a branch that only produced warnings still counts as passing
                if let Some(soft) = failures.iter().find(|r| r.severity < Severity::Violation) {
                    return Some(soft.clone());
                }
                let mut r = result(
                    focus,
                    Some(path),
                    Some(value),
                    ResultKind::NoDisjunctBranch,
                    Severity::Violation,
                    ns::sh::OR_COMPONENT,
                    format!("{} value {value} matches none of {} alternatives", short(path), branches.len()),
                );
                r.nested = failures;
                Some(r)
            }
        }
    }

    fn classes(&self, focus: &Term, path: &str, value: &Term, classes: &[String]) -> Option<ValidationResult> {
        let missing: Vec<&str> = if value.is_literal() {
            classes.iter().map(String::as_str).collect()
        } else {
            classes.iter().filter(|c| !self.has_type(value, c)).map(String::as_str).collect()
        };
        if missing.is_empty() {
            return None;
        }
        let names: Vec<&str> = missing.iter().map(|m| short(m)).collect();
        Some(result(
            focus,
            Some(path),
            Some(value),
            ResultKind::WrongValueType,
            Severity::Violation,
            ns::sh::CLASS_COMPONENT,
            format!("{} value {value} is not typed {}", short(path), names.join(" and ")),
        ))
    }
}

fn literal_fits(l: &Literal, xsd: &str) -> bool {
    l.datatype() == xsd && lexical_ok(xsd, l.lexical())
}

/// The report in the SHACL validation-report vocabulary. Results of nested
/// checks hang off their parent through `sh:detail`.
pub fn report_to_graph(report: &ValidationReport) -> Graph {
    let mut g = Graph::new();
    g.add_prefix("sh", ns::SH);
    g.add_prefix("s", ns::SCHEMA);
    g.add_prefix("xsd", ns::XSD);
    let mut next = 0usize;
    let mut mint = move || {
        next += 1;
        Term::blank(format!("r{}", next - 1))
    };
    let root = mint();
    g.add(root.clone(), ns::rdf::TYPE, Term::iri(ns::sh::VALIDATION_REPORT));
    g.add(
        root.clone(),
        ns::sh::CONFORMS,
        Term::literal(Literal::typed(report.conforms.to_string(), ns::xsd::BOOLEAN)),
    );
    fn write(g: &mut Graph, r: &ValidationResult, mint: &mut dyn FnMut() -> Term) -> Term {
        let node = mint();
        g.add(node.clone(), ns::rdf::TYPE, Term::iri(ns::sh::VALIDATION_RESULT));
        g.add(node.clone(), ns::sh::FOCUS_NODE, r.focus.clone());
        if let Some(p) = &r.path {
            g.add(node.clone(), ns::sh::RESULT_PATH, Term::iri(p));
        }
        if let Some(v) = &r.value {
            g.add(node.clone(), ns::sh::VALUE, v.clone());
        }
        g.add(node.clone(), ns::sh::RESULT_SEVERITY, Term::iri(r.severity.iri()));
        g.add(node.clone(), ns::sh::RESULT_MESSAGE, Term::literal(Literal::string(&r.message)));
        g.add(node.clone(), ns::sh::SOURCE_CONSTRAINT_COMPONENT, Term::iri(r.component));
        for n in &r.nested {
            let d = write(g, n, mint);
            g.add(node.clone(), ns::sh::DETAIL, d);
        }
        node
    }
    for r in &report.results {
        let n = write(&mut g, r, &mut mint);
        g.add(root.clone(), ns::sh::RESULT, n);
    }
    g
}

/// Line-oriented summary: counts first, then one line per result with
/// nested results indented below their parent.
pub fn summary(report: &ValidationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "targets: {}", report.targets.len());
    let _ = writeln!(out, "conforms: {}", report.conforms);
    let _ = writeln!(out, "violations: {}", report.count(Severity::Violation));
    let _ = writeln!(out, "warnings: {}", report.count(Severity::Warning));
    fn line(out: &mut String, r: &ValidationResult, depth: usize) {
        let _ = writeln!(
            out,
            "{}{} {} {} {}: {}",
            "  ".repeat(depth),
            r.severity,
            r.kind,
            r.focus,
            r.path.as_deref().unwrap_or("-"),
            r.message
        );
        for n in &r.nested {
            line(out, n, depth + 1);
        }
    }
    for r in &report.results {
        line(&mut out, r, 0);
    }
    out
}
