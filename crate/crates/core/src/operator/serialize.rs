use super::{ConstraintExpr, NodeConstraint, Operator, PropertyShape, ValueType};
use crate::ns;
use crate::rdf::{write_list, Graph, Literal, Term};

struct Writer {
    graph: Graph,
    next: usize,
}

impl Writer {
    fn mint(&mut self) -> Term {
        let b = Term::blank(format!("b{}", self.next));
        self.next += 1;
        b
    }

    fn shapes(&mut self, owner: &Term, shapes: &[PropertyShape]) {
        for s in shapes {
            let node = self.mint();
            self.graph.add(owner.clone(), ns::sh::PROPERTY, node.clone());
            self.graph.add(node.clone(), ns::rdf::TYPE, Term::iri(ns::sh::PROPERTY_SHAPE));
            self.graph.add(node.clone(), ns::sh::PATH, Term::iri(&s.path));
            if s.required {
                self.graph.add(node.clone(), ns::sh::MIN_COUNT, Term::literal(Literal::typed("1", ns::xsd::INTEGER)));
            }
            self.constraint(&node, &s.constraint);
        }
    }

    fn value_type(&mut self, owner: &Term, v: &ValueType) {
        match v {
            ValueType::Class(c) => self.graph.add(owner.clone(), ns::sh::CLASS, Term::iri(c)),
            ValueType::Datatype(d) => self.graph.add(owner.clone(), ns::sh::DATATYPE, Term::iri(d)),
        };
    }

    fn node(&mut self, n: &NodeConstraint) -> Term {
        let id = match &n.id {
            Some(i) => Term::iri(i),
            None => self.mint(),
        };
        self.graph.add(id.clone(), ns::rdf::TYPE, Term::iri(ns::sh::NODE_SHAPE));
        self.shapes(&id, &n.shapes);
        id
    }

    fn constraint(&mut self, owner: &Term, c: &ConstraintExpr) {
        match c {
            ConstraintExpr::Conjunction(members) => {
                for m in members {
                    self.value_type(owner, m);
                }
            }
            ConstraintExpr::Restriction(v, n) => {
                self.value_type(owner, v);
                let id = self.node(n);
                self.graph.add(owner.clone(), ns::sh::NODE, id);
            }
            ConstraintExpr::Disjunction(branches) => {
                let nodes: Vec<Term> = branches
                    .iter()
                    .map(|b| {
                        let node = self.mint();
                        self.constraint(&node, b);
                        node
                    })
                    .collect();
                let mut counter = self.next;
                let head = write_list(&mut self.graph, &nodes, || {
                    counter += 1;
                    Term::blank(format!("b{}", counter - 1))
                });
                self.next = counter;
                self.graph.add(owner.clone(), ns::sh::OR, head);
            }
        }
    }
}

/// The SHACL graph of an operator. Shapes are typed explicitly, so the
/// smallest operator yields six triples.
pub fn serialize_operator(op: &Operator) -> Graph {
    let mut w = Writer { graph: Graph::new(), next: 0 };
    for (label, iri) in [("sh", ns::SH), ("s", ns::SCHEMA), ("xsd", ns::XSD)] {
        w.graph.add_prefix(label, iri);
    }
    let root = match &op.id {
        Some(i) => Term::iri(i),
        None => w.mint(),
    };
    w.graph.add(root.clone(), ns::rdf::TYPE, Term::iri(ns::sh::NODE_SHAPE));
    w.graph.add(root.clone(), ns::sh::TARGET_CLASS, Term::iri(&op.target_type));
    w.shapes(&root, &op.shapes);
    w.graph
}
