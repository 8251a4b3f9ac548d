//! The schema.org vocabulary as a pair of finite sets: types (with their
//! subtype hierarchy and regular/datatype classification) and properties
//! (with domain and range sets). External vocabularies have the same shape
//! and may hang their types below schema.org types.
//!
//! Domain and range membership is closed under subtyping: a type is in the
//! domain of a property when some declared domain member is one of its
//! supertypes.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::datatypes::DatatypeMap;
use crate::ns;
use crate::rdf::{Graph, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum TypeKind {
    Regular,
    Datatype,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeDef {
    pub uri: String,
    pub direct_subtypes: BTreeSet<String>,
    pub direct_supertypes: BTreeSet<String>,
    pub kind: TypeKind,
    /// Reachable from neither Thing nor DataType; treated as Regular.
    pub orphan: bool,
    /// Never declared, only referenced from a domain, range or subclass link.
    pub opaque: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyDef {
    pub uri: String,
    pub domain: BTreeSet<String>,
    pub range: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VocabError {
    #[error("{0} is declared both as a class and as a property")]
    ClassAndProperty(String),
    #[error("subclass cycle through {}", .0.join(" -> "))]
    SubclassCycle(Vec<String>),
    #[error("{0} is reachable from both Thing and DataType")]
    AmbiguousKind(String),
    #[error("{0} is not declared in the vocabulary")]
    Undeclared(String),
    #[error("external namespace {0} must differ from the base namespace")]
    SameNamespace(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VocabWarning {
    /// A domain/range/subclass link points at an IRI nobody declares.
    UndeclaredTarget { subject: String, link: &'static str, target: String },
    Orphan(String),
    /// A declared domain member that is a datatype.
    DatatypeInDomain { property: String, target: String },
}

impl std::fmt::Display for VocabWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VocabWarning::UndeclaredTarget { subject, link, target } => {
                write!(f, "{subject} {link} {target}: target is not declared, kept as an opaque type")
            }
            VocabWarning::Orphan(t) => write!(f, "{t} is reachable from neither Thing nor DataType"),
            VocabWarning::DatatypeInDomain { property, target } => {
                write!(f, "{property} lists datatype {target} in its domain")
            }
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Vocabulary {
    namespace: String,
    types: BTreeMap<String, TypeDef>,
    properties: BTreeMap<String, PropertyDef>,
    warnings: Vec<VocabWarning>,
}

/// Counts reported by `vocab-info`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Census {
    pub regular_types: usize,
    pub datatypes: usize,
    pub properties: usize,
    pub orphans: Vec<String>,
    pub opaque: Vec<String>,
}

impl Vocabulary {
    pub fn namespace(&self) -> &str {
        &self.namespace
    }

    pub fn types(&self) -> &BTreeMap<String, TypeDef> {
        &self.types
    }

    pub fn properties(&self) -> &BTreeMap<String, PropertyDef> {
        &self.properties
    }

    pub fn warnings(&self) -> &[VocabWarning] {
        &self.warnings
    }

    pub fn type_def(&self, iri: &str) -> Option<&TypeDef> {
        self.types.get(iri)
    }

    pub fn property(&self, iri: &str) -> Option<&PropertyDef> {
        self.properties.get(iri)
    }

    pub fn in_namespace(&self, iri: &str) -> bool {
        iri.starts_with(&self.namespace)
    }

    /// Reflexive, transitive subtyping.
    pub fn is_subtype_of(&self, t1: &str, t2: &str) -> Result<bool, VocabError> {
        Universe::new(self, &[]).is_subtype_of(t1, t2)
    }

    pub fn subtype_closure(&self, t: &str) -> Result<BTreeSet<String>, VocabError> {
        Universe::new(self, &[]).subtype_closure(t)
    }

    pub fn domain_contains(&self, p: &str, t: &str) -> Result<bool, VocabError> {
        Universe::new(self, &[]).domain_contains(p, t)
    }

    pub fn range_contains(&self, p: &str, t: &str) -> Result<bool, VocabError> {
        Universe::new(self, &[]).range_contains(p, t)
    }

    /// Regular types exclude orphans and opaque placeholders, which are
    /// listed separately.
    pub fn census(&self) -> Census {
        let mut c = Census {
            regular_types: 0,
            datatypes: 0,
            properties: self.properties.len(),
            orphans: Vec::new(),
            opaque: Vec::new(),
        };
        for t in self.types.values() {
            if t.opaque {
                c.opaque.push(t.uri.clone());
            } else if t.orphan {
                c.orphans.push(t.uri.clone());
            } else if t.kind == TypeKind::Datatype {
                c.datatypes += 1;
            } else {
                c.regular_types += 1;
            }
        }
        c
    }
}

/// A vocabulary outside the schema.org namespace. Its types may be placed
/// under schema.org types (`alignments`), and it may widen the domain or
/// range of schema.org properties.
#[derive(Clone, Debug, Default)]
pub struct ExternalVocabulary {
    vocab: Vocabulary,
    alignments: BTreeSet<(String, String)>,
    domain_additions: BTreeMap<String, BTreeSet<String>>,
    range_additions: BTreeMap<String, BTreeSet<String>>,
}

impl ExternalVocabulary {
    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn namespace(&self) -> &str {
        self.vocab.namespace()
    }

    /// `(external type, base supertype)` pairs from subclass links that
    /// cross into the base namespace.
    pub fn alignments(&self) -> &BTreeSet<(String, String)> {
        &self.alignments
    }

    pub fn domain_additions(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.domain_additions
    }

    pub fn range_additions(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.range_additions
    }
}

fn iri_term(s: &str) -> Term {
    Term::Iri(s.to_owned())
}

fn declared(graph: &Graph, class: &str, namespace: &str) -> BTreeSet<String> {
    graph
        .subjects(&iri_term(ns::rdf::TYPE), &iri_term(class))
        .into_iter()
        .filter_map(|t| t.as_iri().map(str::to_owned))
        .filter(|i| i.starts_with(namespace))
        .collect()
}

fn iri_objects(graph: &Graph, subject: &str, predicates: &[&str]) -> BTreeSet<String> {
    let s = iri_term(subject);
    predicates
        .iter()
        .flat_map(|p| graph.objects(&s, &iri_term(p)))
        .filter_map(|o| o.as_iri().map(str::to_owned))
        .collect()
}

struct Loaded {
    vocab: Vocabulary,
    alignments: BTreeSet<(String, String)>,
    domain_additions: BTreeMap<String, BTreeSet<String>>,
    range_additions: BTreeMap<String, BTreeSet<String>>,
}

fn load(graph: &Graph, namespace: &str, base: Option<&Vocabulary>) -> Result<Loaded, VocabError> {
    let schema_ns = base.map(|b| b.namespace.as_str()).unwrap_or(namespace);
    let thing = format!("{schema_ns}Thing");
    let data_type = format!("{schema_ns}DataType");

    let classes = declared(graph, ns::rdfs::CLASS, namespace);
    let props = declared(graph, ns::rdf::PROPERTY, namespace);
    if let Some(clash) = classes.intersection(&props).next() {
        return Err(VocabError::ClassAndProperty(clash.clone()));
    }
    let in_base = |iri: &str| base.is_some_and(|b| b.types.contains_key(iri));

    let mut warnings = Vec::new();
    let mut types: BTreeMap<String, TypeDef> = BTreeMap::new();
    let mut opaque: BTreeSet<String> = BTreeSet::new();
    let mut alignments = BTreeSet::new();

    for c in &classes {
        let mut sups = BTreeSet::new();
        for o in iri_objects(graph, c, &[ns::rdfs::SUB_CLASS_OF]) {
            if classes.contains(&o) {
                sups.insert(o);
            } else if in_base(&o) {
                alignments.insert((c.clone(), o.clone()));
                sups.insert(o);
            } else if o.starts_with(namespace) || o.starts_with(schema_ns) {
                warnings.push(VocabWarning::UndeclaredTarget {
                    subject: c.clone(),
                    link: "rdfs:subClassOf",
                    target: o.clone(),
                });
                opaque.insert(o.clone());
                sups.insert(o);
            }
            // links into other namespaces (rdfs:Class, owl:Thing, ...) are ignored
        }
        // datatypes in the release files are instances of DataType
        let types_of = iri_objects(graph, c, &[ns::rdf::TYPE]);
        if types_of.contains(&data_type) && *c != data_type {
            sups.insert(data_type.clone());
        }
        types.insert(
            c.clone(),
            TypeDef {
                uri: c.clone(),
                direct_subtypes: BTreeSet::new(),
                direct_supertypes: sups,
                kind: TypeKind::Regular,
                orphan: false,
                opaque: false,
            },
        );
    }

    let known_type = |iri: &str, types: &BTreeMap<String, TypeDef>| types.contains_key(iri) || in_base(iri);
    let mut properties = BTreeMap::new();
    let mut domain_additions: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut range_additions: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let dom_preds = [&*format!("{schema_ns}domainIncludes"), ns::rdfs::DOMAIN];
    let rng_preds = [&*format!("{schema_ns}rangeIncludes"), ns::rdfs::RANGE];

    for p in &props {
        let domain = iri_objects(graph, p, &dom_preds);
        let range = iri_objects(graph, p, &rng_preds);
        for (link, set) in [("domainIncludes", &domain), ("rangeIncludes", &range)] {
            for target in set {
                if !known_type(target, &types) {
                    warnings.push(VocabWarning::UndeclaredTarget {
                        subject: p.clone(),
                        link,
                        target: target.clone(),
                    });
                    opaque.insert(target.clone());
                }
            }
        }
        properties.insert(p.clone(), PropertyDef { uri: p.clone(), domain, range });
    }

    // an external vocabulary may widen schema.org properties
    if let Some(b) = base {
        for bp in b.properties.keys() {
            let d: BTreeSet<String> =
                iri_objects(graph, bp, &dom_preds).into_iter().filter(|t| known_type(t, &types)).collect();
            let r: BTreeSet<String> =
                iri_objects(graph, bp, &rng_preds).into_iter().filter(|t| known_type(t, &types)).collect();
            let d: BTreeSet<String> = d.into_iter().filter(|t| !b.properties[bp].domain.contains(t)).collect();
            let r: BTreeSet<String> = r.into_iter().filter(|t| !b.properties[bp].range.contains(t)).collect();
            if !d.is_empty() {
                domain_additions.insert(bp.clone(), d);
            }
            if !r.is_empty() {
                range_additions.insert(bp.clone(), r);
            }
        }
    }

    for o in opaque {
        types.entry(o.clone()).or_insert(TypeDef {
            uri: o,
            direct_subtypes: BTreeSet::new(),
            direct_supertypes: BTreeSet::new(),
            kind: TypeKind::Regular,
            orphan: false,
            opaque: true,
        });
    }

    check_acyclic(&types)?;

    // subtype links within this vocabulary
    let links: Vec<(String, String)> = types
        .values()
        .flat_map(|t| t.direct_supertypes.iter().map(move |s| (s.clone(), t.uri.clone())))
        .collect();
    for (sup, sub) in links {
        if let Some(def) = types.get_mut(&sup) {
            def.direct_subtypes.insert(sub);
        }
    }

    // classification
    let mut roots_of: BTreeMap<String, (bool, bool)> = BTreeMap::new();
    let uris: Vec<String> = types.keys().cloned().collect();
    for u in &uris {
        let (to_thing, to_dt) = reach_roots(u, &types, base, &thing, &data_type, &mut roots_of);
        let def = types.get_mut(u).unwrap();
        if def.opaque {
            continue;
        }
        match (to_thing, to_dt) {
            (true, true) => return Err(VocabError::AmbiguousKind(u.clone())),
            (false, true) => def.kind = TypeKind::Datatype,
            (true, false) => def.kind = TypeKind::Regular,
            (false, false) => {
                def.orphan = true;
                warnings.push(VocabWarning::Orphan(u.clone()));
            }
        }
    }

    for p in properties.values() {
        for d in &p.domain {
            let is_dt = types.get(d).map(|t| t.kind) == Some(TypeKind::Datatype)
                || base.and_then(|b| b.types.get(d)).map(|t| t.kind) == Some(TypeKind::Datatype);
            if is_dt {
                warnings.push(VocabWarning::DatatypeInDomain { property: p.uri.clone(), target: d.clone() });
            }
        }
    }

    Ok(Loaded {
        vocab: Vocabulary { namespace: namespace.to_owned(), types, properties, warnings },
        alignments,
        domain_additions,
        range_additions,
    })
}

fn reach_roots(
    start: &str,
    types: &BTreeMap<String, TypeDef>,
    base: Option<&Vocabulary>,
    thing: &str,
    data_type: &str,
    memo: &mut BTreeMap<String, (bool, bool)>,
) -> (bool, bool) {
    if let Some(r) = memo.get(start) {
        return *r;
    }
    let mut result = (start == thing, start == data_type);
    if let Some(def) = types.get(start) {
        for s in &def.direct_supertypes {
            let (a, b) = reach_roots(s, types, base, thing, data_type, memo);
            result = (result.0 || a, result.1 || b);
        }
    } else if let Some(def) = base.and_then(|b| b.types.get(start)) {
        if !def.orphan && !def.opaque {
            match def.kind {
                TypeKind::Regular => result.0 = true,
                TypeKind::Datatype => result.1 = true,
            }
        }
    }
    memo.insert(start.to_owned(), result);
    result
}

fn check_acyclic(types: &BTreeMap<String, TypeDef>) -> Result<(), VocabError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Active,
        Done,
    }
    let mut marks: BTreeMap<&str, Mark> = BTreeMap::new();
    for start in types.keys() {
        if marks.contains_key(start.as_str()) {
            continue;
        }
        // iterative DFS keeping the current path
        let mut path: Vec<&str> = vec![start];
        let mut iters: Vec<std::collections::btree_set::Iter<String>> =
            vec![types[start].direct_supertypes.iter()];
        marks.insert(start, Mark::Active);
        while let Some(it) = iters.last_mut() {
            match it.next() {
                Some(next) => {
                    let Some(def) = types.get(next) else { continue };
                    match marks.get(next.as_str()) {
                        Some(Mark::Active) => {
                            let pos = path.iter().position(|p| *p == next).unwrap();
                            let mut cycle: Vec<String> = path[pos..].iter().map(|s| s.to_string()).collect();
                            cycle.push(next.clone());
                            return Err(VocabError::SubclassCycle(cycle));
                        }
                        Some(Mark::Done) => {}
                        None => {
                            marks.insert(next, Mark::Active);
                            path.push(next);
                            iters.push(def.direct_supertypes.iter());
                        }
                    }
                }
                None => {
                    let done = path.pop().unwrap();
                    marks.insert(done, Mark::Done);
                    iters.pop();
                }
            }
        }
    }
    Ok(())
}

/// Loads every class and property declared in `namespace`.
pub fn load_vocabulary(graph: &Graph, namespace: &str) -> Result<Vocabulary, VocabError> {
    Ok(load(graph, namespace, None)?.vocab)
}

/// Loads an external vocabulary whose types may extend `base`. Kinds are
/// computed over the combined hierarchy.
pub fn load_external(graph: &Graph, namespace: &str, base: &Vocabulary) -> Result<ExternalVocabulary, VocabError> {
    if namespace == base.namespace() {
        return Err(VocabError::SameNamespace(namespace.to_owned()));
    }
    let loaded = load(graph, namespace, Some(base))?;
    Ok(ExternalVocabulary {
        vocab: loaded.vocab,
        alignments: loaded.alignments,
        domain_additions: loaded.domain_additions,
        range_additions: loaded.range_additions,
    })
}

/// Guesses the namespace of a vocabulary file: the most common namespace
/// among declared classes and properties, ignoring `exclude`.
pub fn infer_namespace(graph: &Graph, exclude: &str) -> Option<String> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for class in [ns::rdfs::CLASS, ns::rdf::PROPERTY] {
        for s in graph.subjects(&iri_term(ns::rdf::TYPE), &iri_term(class)) {
            let Some(iri) = s.as_iri() else { continue };
            let local = ns::local_name(iri);
            let namespace = &iri[..iri.len() - local.len()];
            if !namespace.is_empty() && namespace != exclude {
                *counts.entry(namespace.to_owned()).or_default() += 1;
            }
        }
    }
    counts.into_iter().max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0))).map(|(k, _)| k)
}

/// schema.org together with zero or more external vocabularies.
#[derive(Clone, Debug)]
pub struct Universe<'a> {
    base: &'a Vocabulary,
    exts: &'a [ExternalVocabulary],
    // supertype -> subtypes declared by external vocabularies
    ext_subtypes: BTreeMap<&'a str, BTreeSet<&'a str>>,
    datatypes: &'a DatatypeMap,
}

impl<'a> Universe<'a> {
    pub fn new(base: &'a Vocabulary, exts: &'a [ExternalVocabulary]) -> Self {
        let mut ext_subtypes: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for e in exts {
            for t in e.vocab.types.values() {
                for s in &t.direct_supertypes {
                    ext_subtypes.entry(s.as_str()).or_default().insert(t.uri.as_str());
                }
            }
        }
        Universe { base, exts, ext_subtypes, datatypes: DatatypeMap::bundled_ref() }
    }

    /// Replaces the schema.org to XSD datatype table.
    pub fn with_datatypes(mut self, datatypes: &'a DatatypeMap) -> Self {
        self.datatypes = datatypes;
        self
    }

    pub fn datatypes(&self) -> &'a DatatypeMap {
        self.datatypes
    }

    pub fn base(&self) -> &'a Vocabulary {
        self.base
    }

    pub fn externals(&self) -> &'a [ExternalVocabulary] {
        self.exts
    }

    /// A universe over the base vocabulary alone.
    pub fn base_only(&self) -> Universe<'a> {
        Universe::new(self.base, &[]).with_datatypes(self.datatypes)
    }

    pub fn type_def(&self, iri: &str) -> Option<&'a TypeDef> {
        self.base.types.get(iri).or_else(|| self.exts.iter().find_map(|e| e.vocab.types.get(iri)))
    }

    pub fn property(&self, iri: &str) -> Option<&'a PropertyDef> {
        self.base.properties.get(iri).or_else(|| self.exts.iter().find_map(|e| e.vocab.properties.get(iri)))
    }

    pub fn is_base_type(&self, iri: &str) -> bool {
        self.base.types.contains_key(iri)
    }

    pub fn is_base_property(&self, iri: &str) -> bool {
        self.base.properties.contains_key(iri)
    }

    pub fn is_external_type(&self, iri: &str) -> bool {
        !self.is_base_type(iri) && self.type_def(iri).is_some()
    }

    pub fn is_external_property(&self, iri: &str) -> bool {
        !self.is_base_property(iri) && self.property(iri).is_some()
    }

    pub fn is_regular(&self, iri: &str) -> bool {
        self.type_def(iri).is_some_and(|t| t.kind == TypeKind::Regular)
    }

    pub fn is_datatype(&self, iri: &str) -> bool {
        self.type_def(iri).is_some_and(|t| t.kind == TypeKind::Datatype)
    }

    fn require_type(&self, iri: &str) -> Result<&'a TypeDef, VocabError> {
        self.type_def(iri).ok_or_else(|| VocabError::Undeclared(iri.to_owned()))
    }

    fn require_property(&self, iri: &str) -> Result<&'a PropertyDef, VocabError> {
        self.property(iri).ok_or_else(|| VocabError::Undeclared(iri.to_owned()))
    }

    pub fn is_subtype_of(&self, t1: &str, t2: &str) -> Result<bool, VocabError> {
        self.require_type(t1)?;
        self.require_type(t2)?;
        if t1 == t2 {
            return Ok(true);
        }
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([t1]);
        while let Some(t) = queue.pop_front() {
            if t == t2 {
                return Ok(true);
            }
            if !seen.insert(t) {
                continue;
            }
            if let Some(def) = self.type_def(t) {
                queue.extend(def.direct_supertypes.iter().map(String::as_str));
            }
        }
        Ok(false)
    }

    /// `t` and all of its transitive subtypes.
    pub fn subtype_closure(&self, t: &str) -> Result<BTreeSet<String>, VocabError> {
        self.require_type(t)?;
        let mut out = BTreeSet::new();
        let mut stack = vec![t.to_owned()];
        while let Some(cur) = stack.pop() {
            if !out.insert(cur.clone()) {
                continue;
            }
            if let Some(def) = self.type_def(&cur) {
                stack.extend(def.direct_subtypes.iter().cloned());
            }
            if let Some(subs) = self.ext_subtypes.get(cur.as_str()) {
                stack.extend(subs.iter().map(|s| s.to_string()));
            }
        }
        Ok(out)
    }

    /// Declared domain of `p`, including additions from external vocabularies.
    pub fn domain_of(&self, p: &str) -> Result<BTreeSet<String>, VocabError> {
        let mut d = self.require_property(p)?.domain.clone();
        for e in self.exts {
            if let Some(extra) = e.domain_additions.get(p) {
                d.extend(extra.iter().cloned());
            }
        }
        Ok(d)
    }

    pub fn range_of(&self, p: &str) -> Result<BTreeSet<String>, VocabError> {
        let mut r = self.require_property(p)?.range.clone();
        for e in self.exts {
            if let Some(extra) = e.range_additions.get(p) {
                r.extend(extra.iter().cloned());
            }
        }
        Ok(r)
    }

    /// Some declared domain member of `p` is a supertype of `t`.
    pub fn domain_contains(&self, p: &str, t: &str) -> Result<bool, VocabError> {
        self.require_type(t)?;
        for d in self.domain_of(p)? {
            if self.type_def(&d).is_some() && self.is_subtype_of(t, &d)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Some declared range member of `p` is a supertype of `t`.
    pub fn range_contains(&self, p: &str, t: &str) -> Result<bool, VocabError> {
        self.require_type(t)?;
        for r in self.range_of(p)? {
            if self.type_def(&r).is_some() && self.is_subtype_of(t, &r)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Whether `ext_type` may replace `replaced` in a range: it must be one
    /// of its subtypes in the combined hierarchy. For a type aligned to
    /// several schema.org types this holds as soon as one alignment does.
    pub fn check_downward_compatibility(&self, ext_type: &str, replaced: &str) -> bool {
        self.is_subtype_of(ext_type, replaced).unwrap_or(false)
    }

    /// Schema.org supertypes an external type is aligned to, directly.
    pub fn aligned_supertypes(&self, ext_type: &str) -> BTreeSet<String> {
        self.exts
            .iter()
            .flat_map(|e| e.alignments.iter())
            .filter(|(t, _)| t == ext_type)
            .map(|(_, s)| s.clone())
            .collect()
    }

    /// All types of the universe, base first.
    pub fn all_types(&self) -> impl Iterator<Item = &'a TypeDef> + 'a {
        let exts = self.exts;
        self.base.types.values().chain(exts.iter().flat_map(|e| e.vocab.types.values()))
    }
}
