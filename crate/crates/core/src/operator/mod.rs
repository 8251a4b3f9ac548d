//! Domain-specification operators: SHACL node shapes restricted to a small
//! subset of SHACL-Core, read into an AST that follows the operator grammar.
//!
//! ```text
//! Operator        := NodeShape targetClass PropertyShape+
//! PropertyShape   := path [minCount 1] Constraint
//! Constraint      := ValueType+            (conjunction)
//!                  | ValueType NodeShape   (restriction)
//!                  | or(Branch Branch+)    (disjunction)
//! ```

mod check;
mod parse;
mod serialize;

use std::fmt;

use serde::Serialize;

pub use check::{
    check_as, check_document, check_well_formed, classify_kind, Diagnostic, DocumentCheck, Severity,
};
pub use parse::{find_roots, parse_document, parse_operator, OperatorError};
pub use serialize::serialize_operator;

/// Names of grammar productions, cited by diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Production {
    SDS,
    RDS,
    EDS,
    NodeShape,
    SDOTargetType,
    ExtTargetType,
    SDSPropertyShape,
    RDSPropertyShape,
    EDSPropertyShape,
    SDOProperty,
    ExtProperty,
    ValueTypeConstraint,
    SimpleClassConstraint,
    ExtClassConstraint,
    DatatypeConstraint,
    CardinalityConstraint,
    MinCount,
    SimpleDisjunctiveConstraint,
    DisjunctiveConstraint,
    RangeConstraint,
    NodeConstraint,
}

impl fmt::Display for Production {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum OperatorKind {
    #[serde(rename = "SDS")]
    Sds,
    #[serde(rename = "RDS")]
    Rds,
    #[serde(rename = "EDS")]
    Eds,
}

impl OperatorKind {
    pub fn production(self) -> Production {
        match self {
            OperatorKind::Sds => Production::SDS,
            OperatorKind::Rds => Production::RDS,
            OperatorKind::Eds => Production::EDS,
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorKind::Sds => "SDS",
            OperatorKind::Rds => "RDS",
            OperatorKind::Eds => "EDS",
        })
    }
}

impl std::str::FromStr for OperatorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "SDS" => Ok(OperatorKind::Sds),
            "RDS" => Ok(OperatorKind::Rds),
            "EDS" => Ok(OperatorKind::Eds),
            _ => Err(format!("unknown operator kind {s:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValueType {
    /// `sh:class`
    Class(String),
    /// `sh:datatype`, an XSD datatype IRI
    Datatype(String),
}

impl ValueType {
    pub fn iri(&self) -> &str {
        match self {
            ValueType::Class(i) | ValueType::Datatype(i) => i,
        }
    }

    pub fn as_class(&self) -> Option<&str> {
        match self {
            ValueType::Class(i) => Some(i),
            ValueType::Datatype(_) => None,
        }
    }
}

/// Anonymous (or IRI-named) node shape hanging off a restriction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeConstraint {
    /// `None` for blank nodes.
    pub id: Option<String>,
    pub shapes: Vec<PropertyShape>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintExpr {
    /// Sorted and free of duplicates. Several classes form a multi-typed
    /// range; at most one datatype and never mixed with classes.
    Conjunction(Vec<ValueType>),
    Restriction(ValueType, NodeConstraint),
    /// At least two pairwise distinct branches, none of them a disjunction.
    Disjunction(Vec<ConstraintExpr>),
}

impl ConstraintExpr {
    pub fn conjunction(mut members: Vec<ValueType>) -> Self {
        members.sort();
        members.dedup();
        ConstraintExpr::Conjunction(members)
    }

    /// Every value type mentioned, including inside nested node shapes.
    pub fn value_types(&self) -> Vec<&ValueType> {
        let mut out = Vec::new();
        self.collect_value_types(&mut out);
        out
    }

    fn collect_value_types<'a>(&'a self, out: &mut Vec<&'a ValueType>) {
        match self {
            ConstraintExpr::Conjunction(m) => out.extend(m.iter()),
            ConstraintExpr::Restriction(v, node) => {
                out.push(v);
                for s in &node.shapes {
                    s.constraint.collect_value_types(out);
                }
            }
            ConstraintExpr::Disjunction(branches) => {
                for b in branches {
                    b.collect_value_types(out);
                }
            }
        }
    }

    pub fn has_restriction(&self) -> bool {
        match self {
            ConstraintExpr::Conjunction(_) => false,
            ConstraintExpr::Restriction(..) => true,
            ConstraintExpr::Disjunction(b) => b.iter().any(ConstraintExpr::has_restriction),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PropertyShape {
    pub path: String,
    /// `sh:minCount 1`
    pub required: bool,
    pub constraint: ConstraintExpr,
}

impl PropertyShape {
    pub fn new(path: impl Into<String>, required: bool, constraint: ConstraintExpr) -> Self {
        PropertyShape { path: path.into(), required, constraint }
    }
}

/// Property shapes are kept sorted by path: a shape graph carries no order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Operator {
    /// `None` when the node shape is a blank node.
    pub id: Option<String>,
    pub target_type: String,
    pub shapes: Vec<PropertyShape>,
}

impl Operator {
    pub fn new(id: Option<String>, target_type: impl Into<String>, mut shapes: Vec<PropertyShape>) -> Self {
        canonicalize(&mut shapes);
        Operator { id, target_type: target_type.into(), shapes }
    }

    /// Every path, nested ones included.
    pub fn paths(&self) -> Vec<&str> {
        fn walk<'a>(shapes: &'a [PropertyShape], out: &mut Vec<&'a str>) {
            for s in shapes {
                out.push(&s.path);
                visit_nodes(&s.constraint, &mut |n| walk(&n.shapes, out));
            }
        }
        let mut out = Vec::new();
        walk(&self.shapes, &mut out);
        out
    }

    /// Every class named anywhere in the operator.
    pub fn classes(&self) -> Vec<&str> {
        self.shapes
            .iter()
            .flat_map(|s| s.constraint.value_types())
            .filter_map(ValueType::as_class)
            .collect()
    }
}

pub(crate) fn visit_nodes<'a>(c: &'a ConstraintExpr, f: &mut dyn FnMut(&'a NodeConstraint)) {
    match c {
        ConstraintExpr::Conjunction(_) => {}
        ConstraintExpr::Restriction(_, n) => f(n),
        ConstraintExpr::Disjunction(b) => {
            for x in b {
                visit_nodes(x, f);
            }
        }
    }
}

pub(crate) fn canonicalize(shapes: &mut [PropertyShape]) {
    shapes.sort_by(|a, b| a.path.cmp(&b.path).then_with(|| a.cmp(b)));
}
