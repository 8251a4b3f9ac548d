use std::collections::BTreeSet;

use super::{canonicalize, ConstraintExpr, NodeConstraint, Operator, Production, PropertyShape, ValueType};
use crate::ns;
use crate::rdf::{read_list, Graph, ListError, Term};

/// Why a shape graph is not an operator. `at` locates the problem as the
/// chain of shape ids and paths leading to it.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OperatorError {
    #[error("{at}: not declared as sh:NodeShape")]
    NotANodeShape { at: String },
    #[error("{at}: missing sh:targetClass")]
    MissingTarget { at: String },
    #[error("{at}: {count} sh:targetClass values, exactly one allowed")]
    MultipleTargets { at: String, count: usize },
    #[error("{at}: sh:targetClass must be an IRI, found {found}")]
    InvalidTarget { at: String, found: String },
    #[error("{at}: node shape has no sh:property")]
    NoPropertyShapes { at: String },
    #[error("{at}: sh:property must point at a shape node, found {found}")]
    InvalidShapeRef { at: String, found: String },
    #[error("{at}: property shape has no sh:path")]
    MissingPath { at: String },
    #[error("{at}: property shape has {count} sh:path values")]
    MultiplePaths { at: String, count: usize },
    #[error("{at}: sh:path must be a property IRI, found {found}")]
    InvalidPath { at: String, found: String },
    #[error("{at}: sh:minCount takes only the integer 1, found {value}")]
    BadMinCount { at: String, value: String },
    #[error("{at}: sh:minCount given more than once")]
    RepeatedMinCount { at: String },
    #[error("{at}: unsupported SHACL parameter {parameter}")]
    Unsupported { at: String, parameter: String },
    #[error("{at}: no sh:class, sh:datatype or sh:or")]
    MissingValueType { at: String },
    #[error("{at}: sh:class and sh:datatype cannot be combined in one conjunction")]
    MixedClassAndDatatype { at: String },
    #[error("{at}: {count} sh:datatype values; a value has a single datatype")]
    MultipleDatatypes { at: String, count: usize },
    #[error("{at}: {parameter} must be an IRI, found {found}")]
    NotAnIri { at: String, parameter: String, found: String },
    #[error("{at}: sh:node needs exactly one sh:class alongside it, found {count}")]
    RestrictionClassCount { at: String, count: usize },
    #[error("{at}: sh:node cannot restrict a datatype-valued property")]
    NodeOnDatatype { at: String },
    #[error("{at}: {count} sh:node values, at most one allowed")]
    MultipleNodes { at: String, count: usize },
    #[error("{at}: sh:or cannot be combined with other value constraints")]
    OrMixed { at: String },
    #[error("{at}: sh:or needs at least two branches, found {count}")]
    OrTooFew { at: String, count: usize },
    #[error("{at}: sh:or branches cannot contain sh:or")]
    NestedOr { at: String },
    #[error("{at}: sh:or branches must be pairwise distinct")]
    DuplicateBranch { at: String },
    #[error("{at}: malformed sh:or list: {source}")]
    MalformedList { at: String, source: Box<ListError> },
    #[error("{at}: shape {node} is used more than once")]
    SharedShape { at: String, node: String },
    #[error("{at}: nested node shapes form a cycle")]
    ShapeCycle { at: String },
    #[error("{at}: path {path} is constrained by more than one property shape")]
    DuplicatePath { at: String, path: String },
}

impl OperatorError {
    pub fn at(&self) -> &str {
        use OperatorError::*;
        match self {
            NotANodeShape { at }
            | MissingTarget { at }
            | MultipleTargets { at, .. }
            | InvalidTarget { at, .. }
            | NoPropertyShapes { at }
            | InvalidShapeRef { at, .. }
            | MissingPath { at }
            | MultiplePaths { at, .. }
            | InvalidPath { at, .. }
            | BadMinCount { at, .. }
            | RepeatedMinCount { at }
            | Unsupported { at, .. }
            | MissingValueType { at }
            | MixedClassAndDatatype { at }
            | MultipleDatatypes { at, .. }
            | NotAnIri { at, .. }
            | RestrictionClassCount { at, .. }
            | NodeOnDatatype { at }
            | MultipleNodes { at, .. }
            | OrMixed { at }
            | OrTooFew { at, .. }
            | NestedOr { at }
            | DuplicateBranch { at }
            | MalformedList { at, .. }
            | SharedShape { at, .. }
            | ShapeCycle { at }
            | DuplicatePath { at, .. } => at,
        }
    }

    /// The grammar production the document fails to match.
    pub fn production(&self) -> Production {
        use OperatorError::*;
        match self {
            NotANodeShape { .. } | NoPropertyShapes { .. } | InvalidShapeRef { .. } => Production::NodeShape,
            MissingTarget { .. } | MultipleTargets { .. } | InvalidTarget { .. } => Production::SDOTargetType,
            MissingPath { .. } | MultiplePaths { .. } | InvalidPath { .. } => Production::SDOProperty,
            BadMinCount { .. } => Production::MinCount,
            RepeatedMinCount { .. } => Production::CardinalityConstraint,
            Unsupported { .. } | DuplicatePath { .. } => Production::SDSPropertyShape,
            MissingValueType { .. }
            | MixedClassAndDatatype { .. }
            | MultipleDatatypes { .. }
            | NotAnIri { .. } => Production::ValueTypeConstraint,
            RestrictionClassCount { .. } | NodeOnDatatype { .. } => Production::RangeConstraint,
            MultipleNodes { .. } | SharedShape { .. } | ShapeCycle { .. } => Production::NodeConstraint,
            OrMixed { .. } => Production::DisjunctiveConstraint,
            OrTooFew { .. } | NestedOr { .. } | DuplicateBranch { .. } | MalformedList { .. } => {
                Production::SimpleDisjunctiveConstraint
            }
        }
    }
}

fn t(iri: &str) -> Term {
    Term::Iri(iri.to_owned())
}

fn label(term: &Term) -> String {
    match term {
        Term::Iri(i) => i.clone(),
        Term::BlankNode(_) => "[]".to_owned(),
        Term::Literal(_) => term.to_string(),
    }
}

fn is_sh(iri: &str) -> bool {
    iri.starts_with(ns::SH)
}

struct Parser<'g> {
    graph: &'g Graph,
    used: BTreeSet<Term>,
    active: Vec<Term>,
}

/// Node shapes that are not the value of some `sh:node`, in term order.
pub fn find_roots(graph: &Graph) -> Vec<Term> {
    let node_shape = t(ns::sh::NODE_SHAPE);
    let sh_node = t(ns::sh::NODE);
    graph
        .subjects(&t(ns::rdf::TYPE), &node_shape)
        .into_iter()
        .filter(|s| graph.subjects(&sh_node, s).is_empty())
        .collect()
}

/// Parses every root node shape of a document.
pub fn parse_document(graph: &Graph) -> Result<Vec<Operator>, OperatorError> {
    find_roots(graph).iter().map(|r| parse_operator(graph, r)).collect()
}

pub fn parse_operator(graph: &Graph, root: &Term) -> Result<Operator, OperatorError> {
    let mut p = Parser { graph, used: BTreeSet::new(), active: vec![root.clone()] };
    let at = label(root);
    if !graph.objects(root, &t(ns::rdf::TYPE)).contains(&t(ns::sh::NODE_SHAPE)) {
        return Err(OperatorError::NotANodeShape { at });
    }
    p.check_parameters(root, &at, &[ns::sh::TARGET_CLASS, ns::sh::PROPERTY])?;
    let targets = graph.objects(root, &t(ns::sh::TARGET_CLASS));
    let target = match targets.as_slice() {
        [] => return Err(OperatorError::MissingTarget { at }),
        [Term::Iri(i)] => i.clone(),
        [other] => return Err(OperatorError::InvalidTarget { at, found: other.to_string() }),
        many => return Err(OperatorError::MultipleTargets { at, count: many.len() }),
    };
    let shapes = p.property_shapes(root, &at)?;
    Ok(Operator {
        id: root.as_iri().map(str::to_owned),
        target_type: target,
        shapes,
    })
}

impl<'g> Parser<'g> {
    fn check_parameters(&self, node: &Term, at: &str, allowed: &[&str]) -> Result<(), OperatorError> {
        for tr in self.graph.with_subject(node) {
            let Some(p) = tr.predicate.as_iri() else { continue };
            if is_sh(p) && !allowed.contains(&p) {
                return Err(OperatorError::Unsupported { at: at.to_owned(), parameter: p.to_owned() });
            }
        }
        Ok(())
    }

    fn claim(&mut self, node: &Term, at: &str) -> Result<(), OperatorError> {
        if self.active.contains(node) {
            return Err(OperatorError::ShapeCycle { at: at.to_owned() });
        }
        if !self.used.insert(node.clone()) {
            return Err(OperatorError::SharedShape { at: at.to_owned(), node: label(node) });
        }
        Ok(())
    }

    fn property_shapes(&mut self, node: &Term, at: &str) -> Result<Vec<PropertyShape>, OperatorError> {
        let refs = self.graph.objects(node, &t(ns::sh::PROPERTY));
        if refs.is_empty() {
            return Err(OperatorError::NoPropertyShapes { at: at.to_owned() });
        }
        let mut shapes = Vec::with_capacity(refs.len());
        let mut paths = BTreeSet::new();
        for r in refs {
            if r.is_literal() {
                return Err(OperatorError::InvalidShapeRef { at: at.to_owned(), found: r.to_string() });
            }
            self.claim(&r, at)?;
            let shape = self.property_shape(&r, at)?;
            if !paths.insert(shape.path.clone()) {
                return Err(OperatorError::DuplicatePath { at: at.to_owned(), path: shape.path });
            }
            shapes.push(shape);
        }
        canonicalize(&mut shapes);
        Ok(shapes)
    }

    fn property_shape(&mut self, node: &Term, parent: &str) -> Result<PropertyShape, OperatorError> {
        let g = self.graph;
        let paths = g.objects(node, &t(ns::sh::PATH));
        let path = match paths.as_slice() {
            [] => return Err(OperatorError::MissingPath { at: parent.to_owned() }),
            [Term::Iri(i)] => i.clone(),
            [other] => return Err(OperatorError::InvalidPath { at: parent.to_owned(), found: other.to_string() }),
            many => return Err(OperatorError::MultiplePaths { at: parent.to_owned(), count: many.len() }),
        };
        let at = format!("{parent} > {path}");
        self.check_parameters(
            node,
            &at,
            &[ns::sh::PATH, ns::sh::MIN_COUNT, ns::sh::CLASS, ns::sh::DATATYPE, ns::sh::NODE, ns::sh::OR],
        )?;
        let counts = g.objects(node, &t(ns::sh::MIN_COUNT));
        let required = match counts.as_slice() {
            [] => false,
            [Term::Literal(l)] if l.lexical() == "1" && l.datatype() == ns::xsd::INTEGER => true,
            [other] => {
                let value = other.as_literal().map(|l| l.lexical().to_owned()).unwrap_or_else(|| other.to_string());
                return Err(OperatorError::BadMinCount { at, value });
            }
            _ => return Err(OperatorError::RepeatedMinCount { at }),
        };
        let constraint = self.constraint(node, &at, true)?;
        Ok(PropertyShape { path, required, constraint })
    }

    fn iris(&self, node: &Term, param: &str, at: &str) -> Result<Vec<String>, OperatorError> {
        self.graph
            .objects(node, &t(param))
            .into_iter()
            .map(|o| match o {
                Term::Iri(i) => Ok(i),
                other => Err(OperatorError::NotAnIri {
                    at: at.to_owned(),
                    parameter: param.to_owned(),
                    found: other.to_string(),
                }),
            })
            .collect()
    }

    fn constraint(&mut self, node: &Term, at: &str, allow_or: bool) -> Result<ConstraintExpr, OperatorError> {
        let g = self.graph;
        let ors = g.objects(node, &t(ns::sh::OR));
        let classes = self.iris(node, ns::sh::CLASS, at)?;
        let datatypes = self.iris(node, ns::sh::DATATYPE, at)?;
        let nodes = g.objects(node, &t(ns::sh::NODE));

        if !ors.is_empty() {
            if !allow_or {
                return Err(OperatorError::NestedOr { at: at.to_owned() });
            }
            if ors.len() > 1 || !classes.is_empty() || !datatypes.is_empty() || !nodes.is_empty() {
                return Err(OperatorError::OrMixed { at: at.to_owned() });
            }
            let members = read_list(g, &ors[0])
                .map_err(|source| OperatorError::MalformedList { at: at.to_owned(), source: Box::new(source) })?;
            if members.len() < 2 {
                return Err(OperatorError::OrTooFew { at: at.to_owned(), count: members.len() });
            }
            let mut branches = Vec::with_capacity(members.len());
            for (i, m) in members.iter().enumerate() {
                let bat = format!("{at} > or[{i}]");
                if m.is_literal() {
                    return Err(OperatorError::InvalidShapeRef { at: bat, found: m.to_string() });
                }
                self.claim(m, &bat)?;
                self.check_parameters(m, &bat, &[ns::sh::CLASS, ns::sh::DATATYPE, ns::sh::NODE, ns::sh::OR])?;
                let b = self.constraint(m, &bat, false)?;
                if branches.contains(&b) {
                    return Err(OperatorError::DuplicateBranch { at: at.to_owned() });
                }
                branches.push(b);
            }
            return Ok(ConstraintExpr::Disjunction(branches));
        }

        if nodes.len() > 1 {
            return Err(OperatorError::MultipleNodes { at: at.to_owned(), count: nodes.len() });
        }
        if !classes.is_empty() && !datatypes.is_empty() {
            return Err(OperatorError::MixedClassAndDatatype { at: at.to_owned() });
        }
        if datatypes.len() > 1 {
            return Err(OperatorError::MultipleDatatypes { at: at.to_owned(), count: datatypes.len() });
        }
        if let Some(nested) = nodes.first() {
            if !datatypes.is_empty() {
                return Err(OperatorError::NodeOnDatatype { at: at.to_owned() });
            }
            if classes.len() != 1 {
                return Err(OperatorError::RestrictionClassCount { at: at.to_owned(), count: classes.len() });
            }
            let class = classes.into_iter().next().unwrap();
            let node = self.nested(nested, at)?;
            return Ok(ConstraintExpr::Restriction(ValueType::Class(class), node));
        }
        if classes.is_empty() && datatypes.is_empty() {
            return Err(OperatorError::MissingValueType { at: at.to_owned() });
        }
        let members = classes
            .into_iter()
            .map(ValueType::Class)
            .chain(datatypes.into_iter().map(ValueType::Datatype))
            .collect();
        Ok(ConstraintExpr::conjunction(members))
    }

    fn nested(&mut self, node: &Term, at: &str) -> Result<NodeConstraint, OperatorError> {
        if node.is_literal() {
            return Err(OperatorError::InvalidShapeRef { at: at.to_owned(), found: node.to_string() });
        }
        self.claim(node, at)?;
        let nat = match node {
            Term::Iri(i) => format!("{at} > {i}"),
            _ => at.to_owned(),
        };
        self.check_parameters(node, &nat, &[ns::sh::PROPERTY])?;
        self.active.push(node.clone());
        let shapes = self.property_shapes(node, &nat)?;
        self.active.pop();
        Ok(NodeConstraint { id: node.as_iri().map(str::to_owned), shapes })
    }
}
