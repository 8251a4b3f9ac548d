//! Seeded generators for toy vocabularies, operators and instance data.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use domspec::ns;
use domspec::operator::{ConstraintExpr, NodeConstraint, Operator, PropertyShape, ValueType};
use domspec::rdf::{parse_turtle, Graph, Literal, Term};
use domspec::vocab::{load_external, load_vocabulary, ExternalVocabulary, Vocabulary};

pub const S: &str = "http://schema.org/";
pub const X: &str = "http://example.org/x/";
pub const DATA: &str = "http://example.org/data/";

/// (schema.org datatype, xsd datatype, a valid lexical form, an invalid one)
pub const DATATYPES: [(&str, &str, &str, &str); 4] = [
    ("Text", ns::xsd::STRING, "some text", "some text"),
    ("Number", ns::xsd::DOUBLE, "2.5", "many"),
    ("Boolean", ns::xsd::BOOLEAN, "true", "yes"),
    ("DateTime", ns::xsd::DATE_TIME, "2019-05-01T14:00:00", "afternoon"),
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn s(local: &str) -> String {
    format!("{S}{local}")
}

pub struct Toy {
    pub text: String,
    pub vocab: Vocabulary,
    /// Regular types, Thing first.
    pub regular: Vec<String>,
    pub properties: Vec<String>,
}

impl Toy {
    pub fn type_count(&self) -> usize {
        self.vocab.types().len()
    }
}

/// A vocabulary of at most 30 types and 40 properties: Thing, DataType and
/// four datatypes plus a random DAG of regular types.
pub fn toy_vocab(rng: &mut impl Rng) -> Toy {
    let n_types = rng.gen_range(2..=24);
    let n_props = rng.gen_range(1..=40);
    let mut text = String::from(
        "@prefix s: <http://schema.org/> .\n\
         @prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .\n\
         @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n\
         s:Thing a rdfs:Class .\n\
         s:DataType a rdfs:Class .\n",
    );
    for (name, ..) in DATATYPES {
        text.push_str(&format!("s:{name} a rdfs:Class , s:DataType .\n"));
    }
    let mut regular = vec!["Thing".to_owned()];
    for i in 0..n_types {
        let name = format!("T{i}");
        let mut parents = vec![regular.choose(rng).unwrap().clone()];
        if rng.gen_bool(0.2) {
            let other = regular.choose(rng).unwrap().clone();
            if !parents.contains(&other) {
                parents.push(other);
            }
        }
        let sup: Vec<String> = parents.iter().map(|p| format!("s:{p}")).collect();
        text.push_str(&format!("s:{name} a rdfs:Class ; rdfs:subClassOf {} .\n", sup.join(" , ")));
        regular.push(name);
    }
    let datatypes: Vec<&str> = DATATYPES.iter().map(|d| d.0).collect();
    let mut properties = Vec::new();
    for i in 0..n_props {
        let name = format!("p{i}");
        let dom: Vec<String> =
            (0..rng.gen_range(1..=2)).map(|_| format!("s:{}", regular.choose(rng).unwrap())).collect();
        let ran: Vec<String> = (0..rng.gen_range(1..=2))
            .map(|_| {
                if rng.gen_bool(0.4) {
                    format!("s:{}", datatypes.choose(rng).unwrap())
                } else {
                    format!("s:{}", regular.choose(rng).unwrap())
                }
            })
            .collect();
        text.push_str(&format!(
            "s:{name} a rdf:Property ; s:domainIncludes {} ; s:rangeIncludes {} .\n",
            dom.join(" , "),
            ran.join(" , ")
        ));
        properties.push(s(&name));
    }
    let vocab = load_vocabulary(&parse_turtle(&text).unwrap(), S).unwrap();
    Toy { text, vocab, regular: regular.iter().map(|t| s(t)).collect(), properties }
}

fn class(rng: &mut impl Rng, toy: &Toy) -> ValueType {
    ValueType::Class(toy.regular.choose(rng).unwrap().clone())
}

fn datatype(rng: &mut impl Rng) -> ValueType {
    ValueType::Datatype(DATATYPES.choose(rng).unwrap().1.to_owned())
}

fn simple(rng: &mut impl Rng, toy: &Toy) -> ConstraintExpr {
    if rng.gen_bool(0.4) {
        ConstraintExpr::conjunction(vec![datatype(rng)])
    } else {
        let n = rng.gen_range(1..=2);
        ConstraintExpr::conjunction((0..n).map(|_| class(rng, toy)).collect())
    }
}

pub fn constraint(rng: &mut impl Rng, toy: &Toy) -> ConstraintExpr {
    if rng.gen_bool(0.3) {
        let mut branches: Vec<ConstraintExpr> = Vec::new();
        for _ in 0..rng.gen_range(2..=3) {
            let b = simple(rng, toy);
            if !branches.contains(&b) {
                branches.push(b);
            }
        }
        if branches.len() >= 2 {
            return ConstraintExpr::Disjunction(branches);
        }
        return branches.pop().unwrap();
    }
    simple(rng, toy)
}

/// A well-formed SDS operator over `toy`. Most paths are in the target's
/// domain; a few are not.
pub fn sds_operator(rng: &mut impl Rng, toy: &Toy) -> Operator {
    let target = toy.regular.choose(rng).unwrap().clone();
    let in_domain: Vec<&String> =
        toy.properties.iter().filter(|p| toy.vocab.domain_contains(p, &target).unwrap()).collect();
    let mut paths: Vec<String> = Vec::new();
    for _ in 0..rng.gen_range(1..=5) {
        let p = if !in_domain.is_empty() && rng.gen_bool(0.8) {
            (*in_domain.choose(rng).unwrap()).clone()
        } else {
            toy.properties.choose(rng).unwrap().clone()
        };
        if !paths.contains(&p) {
            paths.push(p);
        }
    }
    let shapes = paths.into_iter().map(|p| PropertyShape::new(p, rng.gen_bool(0.5), constraint(rng, toy))).collect();
    Operator::new(None, target, shapes)
}

fn nested_shapes(rng: &mut impl Rng, toy: &Toy, depth: usize) -> Vec<PropertyShape> {
    let mut paths: Vec<String> = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let p = toy.properties.choose(rng).unwrap().clone();
        if !paths.contains(&p) {
            paths.push(p);
        }
    }
    paths.into_iter().map(|p| PropertyShape::new(p, rng.gen_bool(0.5), any_constraint(rng, toy, depth))).collect()
}

fn restriction(rng: &mut impl Rng, toy: &Toy, depth: usize) -> ConstraintExpr {
    let mut shapes = nested_shapes(rng, toy, depth + 1);
    sort_shapes(&mut shapes);
    ConstraintExpr::Restriction(class(rng, toy), NodeConstraint { id: None, shapes })
}

fn sort_shapes(shapes: &mut [PropertyShape]) {
    shapes.sort_by(|a, b| a.path.cmp(&b.path).then_with(|| a.cmp(b)));
}

fn any_constraint(rng: &mut impl Rng, toy: &Toy, depth: usize) -> ConstraintExpr {
    let deep = depth < 2;
    if deep && rng.gen_bool(0.25) {
        return restriction(rng, toy, depth);
    }
    if rng.gen_bool(0.25) {
        let mut branches: Vec<ConstraintExpr> = Vec::new();
        for _ in 0..rng.gen_range(2..=3) {
            let b = if deep && rng.gen_bool(0.3) { restriction(rng, toy, depth) } else { simple(rng, toy) };
            if !branches.contains(&b) {
                branches.push(b);
            }
        }
        if branches.len() >= 2 {
            return ConstraintExpr::Disjunction(branches);
        }
        return branches.pop().unwrap();
    }
    simple(rng, toy)
}

/// An operator over `toy` using the whole grammar: nested node shapes up to
/// two levels deep and restrictions inside disjunctions. Not necessarily
/// well-formed against the vocabulary; meant for syntax round trips.
pub fn any_operator(rng: &mut impl Rng, toy: &Toy) -> Operator {
    let target = toy.regular.choose(rng).unwrap().clone();
    Operator::new(None, target, nested_shapes(rng, toy, 0))
}

/// A small external vocabulary aligned to random base types, with one new
/// property on a random base type.
pub fn toy_extension(rng: &mut impl Rng, toy: &Toy) -> ExternalVocabulary {
    let mut text = String::from(
        "@prefix s: <http://schema.org/> .\n\
         @prefix x: <http://example.org/x/> .\n\
         @prefix rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#> .\n\
         @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n",
    );
    for i in 0..rng.gen_range(1..=4) {
        let sup = toy.regular.choose(rng).unwrap();
        text.push_str(&format!("x:X{i} a rdfs:Class ; rdfs:subClassOf <{sup}> .\n"));
    }
    let dom = toy.regular.choose(rng).unwrap();
    text.push_str(&format!("x:xp a rdf:Property ; s:domainIncludes <{dom}> ; s:rangeIncludes s:Text .\n"));
    load_external(&parse_turtle(&text).unwrap(), X, &toy.vocab).unwrap()
}

pub fn focus() -> Term {
    Term::iri(format!("{DATA}f"))
}

/// A value for `c`: typed nodes for classes, literals for datatypes. With
/// `valid` false the value may miss a conjunct or carry a bad lexical form.
pub fn value_for(rng: &mut impl Rng, g: &mut Graph, toy: &Toy, c: &ConstraintExpr, n: &mut usize) -> Term {
    let branch = match c {
        ConstraintExpr::Disjunction(b) => b.choose(rng).unwrap(),
        other => other,
    };
    let members = match branch {
        ConstraintExpr::Conjunction(m) => m.clone(),
        _ => vec![],
    };
    match members.first() {
        Some(ValueType::Datatype(x)) => {
            let (_, _, good, bad) = DATATYPES.iter().find(|d| d.1 == x).unwrap();
            let lexical = if rng.gen_bool(0.8) { good } else { bad };
            Term::literal(Literal::typed(*lexical, x.clone()))
        }
        _ => {
            *n += 1;
            let node = Term::iri(format!("{DATA}v{n}"));
            for m in &members {
                if rng.gen_bool(0.85) {
                    g.add(node.clone(), ns::rdf::TYPE, Term::iri(m.iri()));
                }
            }
            if rng.gen_bool(0.2) {
                g.add(node.clone(), ns::rdf::TYPE, Term::iri(toy.regular.choose(rng).unwrap().clone()));
            }
            node
        }
    }
}

/// Instance data for the root of `op`: a focus typed with the target and a
/// random subset of the operator's properties, plus the odd stray property.
pub fn instance(rng: &mut impl Rng, toy: &Toy, op: &Operator) -> Graph {
    let mut g = Graph::new();
    let f = focus();
    g.add(f.clone(), ns::rdf::TYPE, Term::iri(op.target_type.clone()));
    let mut n = 0;
    for s in &op.shapes {
        if rng.gen_bool(0.7) {
            let v = value_for(rng, &mut g, toy, &s.constraint, &mut n);
            g.add(f.clone(), &s.path, v);
        }
    }
    if rng.gen_bool(0.5) {
        let stray = toy.properties.choose(rng).unwrap().clone();
        g.add(f.clone(), &stray, Term::literal(Literal::string("stray")));
    }
    g
}
