use std::fmt;

use serde::Serialize;

use super::{find_roots, parse_operator, ConstraintExpr, Operator, OperatorKind, Production, PropertyShape, ValueType};
use crate::rdf::Graph;
use crate::vocab::Universe;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "info",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    /// The offending IRI (or shape location when there is none).
    pub node: String,
    /// Shape ids and paths leading to the problem.
    pub at: String,
    pub production: Production,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}] {}: {}", self.severity, self.production, self.at, self.message)
    }
}

fn is_external(u: &Universe, iri: &str) -> bool {
    !u.base().in_namespace(iri)
}

/// An external class may stand in for a declared schema.org range member
/// of `path` when it is one of that member's subtypes.
fn replaces_range_member(u: &Universe, class: &str, path: &str) -> bool {
    let Some(p) = u.base().property(path) else { return false };
    p.range.iter().any(|r| u.check_downward_compatibility(class, r))
}

fn walk_value_types<'a>(shapes: &'a [PropertyShape], f: &mut dyn FnMut(&'a str, &'a ValueType)) {
    fn expr<'a>(path: &'a str, c: &'a ConstraintExpr, f: &mut dyn FnMut(&'a str, &'a ValueType)) {
        match c {
            ConstraintExpr::Conjunction(m) => m.iter().for_each(|v| f(path, v)),
            ConstraintExpr::Restriction(v, n) => {
                f(path, v);
                walk_value_types(&n.shapes, f);
            }
            ConstraintExpr::Disjunction(b) => b.iter().for_each(|x| expr(path, x, f)),
        }
    }
    for s in shapes {
        expr(&s.path, &s.constraint, f);
    }
}

/// EDS when the operator adds a type, property or range member from an
/// external vocabulary; RDS when it only narrows (nested restrictions or
/// downward-compatible replacements); SDS otherwise.
pub fn classify_kind(op: &Operator, u: &Universe) -> OperatorKind {
    let mut eds = is_external(u, &op.target_type) || op.paths().iter().any(|p| is_external(u, p));
    let mut rds = op.shapes.iter().any(|s| s.constraint.has_restriction());
    walk_value_types(&op.shapes, &mut |path, v| {
        if let ValueType::Class(c) = v {
            if is_external(u, c) {
                if replaces_range_member(u, c, path) {
                    rds = true;
                } else {
                    eds = true;
                }
            }
        }
    });
    if eds {
        OperatorKind::Eds
    } else if rds {
        OperatorKind::Rds
    } else {
        OperatorKind::Sds
    }
}

/// Classifies the operator and checks it against the grammar of that kind.
pub fn check_well_formed(op: &Operator, u: &Universe) -> Vec<Diagnostic> {
    check_as(op, u, classify_kind(op, u))
}

struct Checker<'a, 'u> {
    u: &'a Universe<'u>,
    kind: OperatorKind,
    out: Vec<Diagnostic>,
}

impl Checker<'_, '_> {
    fn push(&mut self, severity: Severity, production: Production, node: &str, at: &str, message: String) {
        self.out.push(Diagnostic { severity, node: node.to_owned(), at: at.to_owned(), production, message });
    }

    fn error(&mut self, production: Production, node: &str, at: &str, message: String) {
        self.push(Severity::Error, production, node, at, message);
    }

    fn shapes(&mut self, owner: &str, shapes: &[PropertyShape], at: &str) {
        let u = self.u;
        for s in shapes {
            let sat = format!("{at} > {}", s.path);
            let external = is_external(u, &s.path);
            match u.property(&s.path) {
                None => {
                    let production =
                        if external && self.kind == OperatorKind::Eds { Production::ExtProperty } else { Production::SDOProperty };
                    self.error(production, &s.path, &sat, format!("{} is not a property of the vocabulary", s.path));
                }
                Some(_) if external && self.kind != OperatorKind::Eds => {
                    self.error(
                        Production::SDOProperty,
                        &s.path,
                        &sat,
                        format!("external property {} is only allowed in EDS operators", s.path),
                    );
                }
                Some(_) => {
                    if u.type_def(owner).is_some() && !u.domain_contains(&s.path, owner).unwrap_or(false) {
                        self.push(
                            Severity::Warning,
                            if external { Production::ExtProperty } else { Production::SDOProperty },
                            &s.path,
                            &sat,
                            format!("{owner} is not in the domain of {}", s.path),
                        );
                    }
                }
            }
            self.constraint(&s.path, &s.constraint, &sat);
        }
    }

    fn constraint(&mut self, path: &str, c: &ConstraintExpr, at: &str) {
        match c {
            ConstraintExpr::Conjunction(members) => {
                for m in members {
                    self.value_type(path, m, at);
                }
                self.conjunction_range(path, members, at);
                self.redundancy(members, at);
            }
            ConstraintExpr::Restriction(v, node) => {
                if self.kind == OperatorKind::Sds {
                    self.error(
                        Production::RangeConstraint,
                        v.iri(),
                        at,
                        "nested node constraints are only allowed in RDS and EDS operators".into(),
                    );
                }
                self.value_type(path, v, at);
                self.conjunction_range(path, std::slice::from_ref(v), at);
                let owner = v.iri().to_owned();
                let nat = match &node.id {
                    Some(id) => format!("{at} > {id}"),
                    None => at.to_owned(),
                };
                self.shapes(&owner, &node.shapes, &nat);
            }
            ConstraintExpr::Disjunction(branches) => {
                for b in branches {
                    self.constraint(path, b, at);
                }
            }
        }
    }

    fn value_type(&mut self, path: &str, v: &ValueType, at: &str) {
        let u = self.u;
        match v {
            ValueType::Class(c) => {
                let external = is_external(u, c);
                let Some(def) = u.type_def(c) else {
                    let production =
                        if external { Production::ExtClassConstraint } else { Production::SimpleClassConstraint };
                    self.error(production, c, at, format!("{c} is not a type of the vocabulary"));
                    return;
                };
                if def.kind == crate::vocab::TypeKind::Datatype {
                    self.error(
                        Production::SimpleClassConstraint,
                        c,
                        at,
                        format!("{c} is a datatype; sh:class needs a regular type"),
                    );
                    return;
                }
                if !external {
                    return;
                }
                match self.kind {
                    OperatorKind::Sds => self.error(
                        Production::ExtClassConstraint,
                        c,
                        at,
                        format!("external class {c} is not allowed in SDS operators"),
                    ),
                    OperatorKind::Rds if !replaces_range_member(u, c, path) => self.error(
                        Production::ExtClassConstraint,
                        c,
                        at,
                        format!("{c} is not downward compatible with any range member of {path}"),
                    ),
                    _ => {}
                }
            }
            ValueType::Datatype(x) => {
                if u.datatypes().schema_candidates(x).is_empty() {
                    self.error(
                        Production::DatatypeConstraint,
                        x,
                        at,
                        format!("{x} is not mapped to a schema.org datatype"),
                    );
                }
            }
        }
    }

    /// Warns when no member of a range constraint fits the declared range.
    fn conjunction_range(&mut self, path: &str, members: &[ValueType], at: &str) {
        let u = self.u;
        if u.property(path).is_none() {
            return;
        }
        let fits = |v: &ValueType| match v {
            ValueType::Class(c) => {
                u.type_def(c).is_none()
                    || u.range_contains(path, c).unwrap_or(false)
                    || (is_external(u, c) && self.kind == OperatorKind::Eds)
            }
            ValueType::Datatype(x) => {
                let candidates = u.datatypes().schema_candidates(x);
                candidates.is_empty()
                    || candidates.iter().any(|d| u.type_def(d).is_none() || u.range_contains(path, d).unwrap_or(false))
            }
        };
        if !members.iter().any(fits) {
            let names: Vec<&str> = members.iter().map(ValueType::iri).collect();
            let production = match members.first() {
                Some(ValueType::Datatype(_)) => Production::DatatypeConstraint,
                _ => Production::SimpleClassConstraint,
            };
            self.push(
                Severity::Warning,
                production,
                names.first().copied().unwrap_or(path),
                at,
                format!("{} not in the declared range of {path}", names.join(" + ")),
            );
        }
    }

    fn redundancy(&mut self, members: &[ValueType], at: &str) {
        let u = self.u;
        let classes: Vec<&str> = members.iter().filter_map(ValueType::as_class).collect();
        for a in &classes {
            for b in &classes {
                if a != b && u.is_subtype_of(a, b).unwrap_or(false) {
                    self.push(
                        Severity::Info,
                        Production::ValueTypeConstraint,
                        b,
                        at,
                        format!("{b} is implied by its subtype {a} in the conjunction"),
                    );
                }
            }
        }
    }
}

/// Checks the operator against the grammar of `kind`, whatever kind it
/// would be classified as.
pub fn check_as(op: &Operator, u: &Universe, kind: OperatorKind) -> Vec<Diagnostic> {
    let mut c = Checker { u, kind, out: Vec::new() };
    let at = op.id.clone().unwrap_or_else(|| "[]".to_owned());
    let target = &op.target_type;
    let external = is_external(u, target);
    match u.type_def(target) {
        None => c.error(
            if external && kind == OperatorKind::Eds { Production::ExtTargetType } else { Production::SDOTargetType },
            target,
            &at,
            format!("{target} is not a type of the vocabulary"),
        ),
        Some(def) if def.kind == crate::vocab::TypeKind::Datatype => c.error(
            Production::SDOTargetType,
            target,
            &at,
            format!("{target} is a datatype; the target must be a regular type"),
        ),
        Some(_) if external && kind != OperatorKind::Eds => c.error(
            Production::SDOTargetType,
            target,
            &at,
            format!("external target {target} is only allowed in EDS operators"),
        ),
        Some(_) => {}
    }
    c.shapes(target, &op.shapes, &at);
    c.out
}

/// Result of checking every operator in a shape graph.
#[derive(Clone, Debug, Default)]
pub struct DocumentCheck {
    pub operators: Vec<(Operator, OperatorKind)>,
    pub diagnostics: Vec<Diagnostic>,
}

impl DocumentCheck {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.severity == Severity::Error)
    }
}

/// Parses and checks every root node shape. Parse failures become error
/// diagnostics.
pub fn check_document(graph: &Graph, u: &Universe) -> DocumentCheck {
    let mut out = DocumentCheck::default();
    let roots = find_roots(graph);
    if roots.is_empty() {
        out.diagnostics.push(Diagnostic {
            severity: Severity::Error,
            node: String::new(),
            at: String::new(),
            production: Production::NodeShape,
            message: "document declares no sh:NodeShape".into(),
        });
    }
    for r in roots {
        match parse_operator(graph, &r) {
            Ok(op) => {
                let kind = classify_kind(&op, u);
                out.diagnostics.extend(check_as(&op, u, kind));
                out.operators.push((op, kind));
            }
            Err(e) => out.diagnostics.push(Diagnostic {
                severity: Severity::Error,
                node: e.at().rsplit(" > ").next().unwrap_or_default().to_owned(),
                at: e.at().to_owned(),
                production: e.production(),
                message: e.to_string(),
            }),
        }
    }
    out
}
