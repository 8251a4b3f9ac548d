//! Applying an operator to the vocabulary. The result is a pattern: the
//! included types and properties, the local properties `(type, property)`
//! and the local ranges attached to them, plus the operator-shaped tree of
//! nested restrictions.
//!
//! Nested node shapes become pattern-local types. Their id is the
//! restricting class when that class is external and not used elsewhere in
//! the pattern, and a dotted name such as `Hotel.location` otherwise.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::ns;
use crate::operator::{
    check_well_formed, classify_kind, ConstraintExpr, Diagnostic, Operator, OperatorKind, PropertyShape, Severity,
    ValueType,
};
use crate::vocab::{Universe, Vocabulary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PatternKind {
    SDSP,
    RDSP,
    EDSP,
}

impl From<OperatorKind> for PatternKind {
    fn from(k: OperatorKind) -> Self {
        match k {
            OperatorKind::Sds => PatternKind::SDSP,
            OperatorKind::Rds => PatternKind::RDSP,
            OperatorKind::Eds => PatternKind::EDSP,
        }
    }
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RangeType {
    Class { iri: String },
    /// A schema.org datatype together with the XSD datatype carried by
    /// instance literals.
    Datatype { schema: String, xsd: String },
}

impl RangeType {
    /// The schema.org (or external) type this range stands for.
    pub fn type_iri(&self) -> &str {
        match self {
            RangeType::Class { iri } => iri,
            RangeType::Datatype { schema, .. } => schema,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum RangeSpec {
    Simple { range: RangeType },
    /// Multi-typed values. Members are classes, none a subtype of another.
    /// `alias` is an external type declared a subtype of exactly these.
    Conjunction { members: Vec<String>, alias: Option<String> },
    /// Values of `class` further constrained by the pattern node `node`.
    Restricted { class: String, node: String },
    Alternatives { branches: Vec<RangeSpec> },
}

impl RangeSpec {
    /// The range collapsed to type IRIs, as used by the flat sets.
    pub fn flat_types(&self) -> BTreeSet<String> {
        match self {
            RangeSpec::Simple { range } => BTreeSet::from([range.type_iri().to_owned()]),
            RangeSpec::Conjunction { alias: Some(a), .. } => BTreeSet::from([a.clone()]),
            RangeSpec::Conjunction { members, alias: None } => members.iter().cloned().collect(),
            RangeSpec::Restricted { class, .. } => BTreeSet::from([class.clone()]),
            RangeSpec::Alternatives { branches } => branches.iter().flat_map(RangeSpec::flat_types).collect(),
        }
    }

    /// Ids of pattern nodes referenced from this range.
    pub fn nodes(&self) -> Vec<&str> {
        match self {
            RangeSpec::Restricted { node, .. } => vec![node],
            RangeSpec::Alternatives { branches } => branches.iter().flat_map(RangeSpec::nodes).collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalProperty {
    pub path: String,
    pub required: bool,
    /// `None` when no type of the constraint fits the property's range.
    pub range: Option<RangeSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternNode {
    pub id: String,
    /// Dotted name, `Hotel` for the root and `Hotel.location` below it.
    pub name: String,
    /// The type whose domain the node's properties are checked against.
    pub base_type: String,
    pub properties: Vec<LocalProperty>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DroppedShape {
    pub node: String,
    pub path: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PatternMetadata {
    /// Local ranges whose types all come from external vocabularies.
    pub external_ranges: Vec<(String, String)>,
    /// Property shapes or ranges the vocabulary does not admit.
    pub dropped: Vec<DroppedShape>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub kind: PatternKind,
    pub target: String,
    pub included_types: BTreeSet<String>,
    pub included_properties: BTreeSet<String>,
    pub local_properties: BTreeSet<(String, String)>,
    pub local_ranges: BTreeMap<(String, String), RangeSpec>,
    /// Root first, then nested nodes in depth-first order.
    pub nodes: Vec<PatternNode>,
    pub operator: Operator,
    pub metadata: PatternMetadata,
}

impl Pattern {
    pub fn root(&self) -> &PatternNode {
        &self.nodes[0]
    }

    pub fn node(&self, id: &str) -> Option<&PatternNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// The vocabulary type behind a node id.
    pub fn owner_type(&self, id: &str) -> Option<&str> {
        self.node(id).map(|n| n.base_type.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ApplyError {
    #[error("operator is not well-formed:\n{}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))]
    IllFormed(Vec<Diagnostic>),
}

struct Builder<'a, 'u> {
    u: &'a Universe<'u>,
    kind: OperatorKind,
    nodes: Vec<PatternNode>,
    ids: BTreeSet<String>,
    named: BTreeSet<String>,
    local_properties: BTreeSet<(String, String)>,
    local_ranges: BTreeMap<(String, String), RangeSpec>,
    metadata: PatternMetadata,
}

/// Picks the schema.org reading of an XSD datatype for `path`: the first
/// mapped datatype (in table order) inside the property's range, else the
/// first mapped one.
pub fn datatype_reading(u: &Universe, xsd: &str, path: &str) -> Option<String> {
    let candidates = u.datatypes().schema_candidates(xsd);
    candidates
        .iter()
        .find(|c| u.type_def(c).is_some() && u.range_contains(path, c).unwrap_or(false))
        .or(candidates.first())
        .map(|c| c.to_string())
}

impl Builder<'_, '_> {
    fn fits(&self, path: &str, t: &str) -> bool {
        let u = self.u;
        u.range_contains(path, t).unwrap_or(false)
            || (self.kind == OperatorKind::Eds && u.is_external_type(t))
    }

    fn unique_id(&mut self, preferred: &str, fallback: &str) -> String {
        let mut id = if self.ids.contains(preferred) { fallback.to_owned() } else { preferred.to_owned() };
        let mut i = 2;
        while self.ids.contains(&id) {
            id = format!("{fallback}-{i}");
            i += 1;
        }
        self.ids.insert(id.clone());
        id
    }

    fn node(&mut self, id: String, name: String, base_type: String, shapes: &[PropertyShape]) {
        let slot = self.nodes.len();
        self.nodes.push(PatternNode { id: id.clone(), name: name.clone(), base_type: base_type.clone(), properties: vec![] });
        let mut properties = Vec::new();
        for s in shapes {
            if !self.u.domain_contains(&s.path, &base_type).unwrap_or(false) {
                self.metadata.dropped.push(DroppedShape {
                    node: id.clone(),
                    path: s.path.clone(),
                    reason: format!("{base_type} is not in the domain of {}", s.path),
                });
                self.name_all(&s.constraint, &s.path);
                continue;
            }
            let range = self.range(&s.constraint, &s.path, &name);
            let key = (id.clone(), s.path.clone());
            self.local_properties.insert(key.clone());
            match &range {
                Some(r) => {
                    if r.flat_types().iter().all(|t| self.u.is_external_type(t)) {
                        self.metadata.external_ranges.push(key.clone());
                    }
                    self.local_ranges.insert(key, r.clone());
                }
                None => self.metadata.dropped.push(DroppedShape {
                    node: id.clone(),
                    path: s.path.clone(),
                    reason: format!("no type of the constraint is in the range of {}", s.path),
                }),
            }
            properties.push(LocalProperty { path: s.path.clone(), required: s.required, range });
        }
        self.nodes[slot].properties = properties;
    }

    // types mentioned by a dropped shape still count as included
    fn name_all(&mut self, c: &ConstraintExpr, path: &str) {
        for v in c.value_types() {
            match v {
                ValueType::Class(c) => {
                    self.named.insert(c.clone());
                }
                ValueType::Datatype(x) => self.named.extend(datatype_reading(self.u, x, path)),
            }
        }
    }

    fn range(&mut self, c: &ConstraintExpr, path: &str, parent: &str) -> Option<RangeSpec> {
        match c {
            ConstraintExpr::Conjunction(members) => {
                if let [ValueType::Datatype(x)] = members.as_slice() {
                    let schema = datatype_reading(self.u, x, path)?;
                    self.named.insert(schema.clone());
                    if !self.fits(path, &schema) {
                        return None;
                    }
                    return Some(RangeSpec::Simple { range: RangeType::Datatype { schema, xsd: x.clone() } });
                }
                let classes: Vec<&str> = members.iter().filter_map(ValueType::as_class).collect();
                self.named.extend(classes.iter().map(|c| c.to_string()));
                // a member implied by a more specific one collapses
                let kept: Vec<String> = classes
                    .iter()
                    .filter(|a| !classes.iter().any(|b| a != &b && self.u.is_subtype_of(b, a).unwrap_or(false)))
                    .map(|a| a.to_string())
                    .collect();
                if !kept.iter().any(|m| self.fits(path, m)) {
                    return None;
                }
                match kept.as_slice() {
                    [one] => Some(RangeSpec::Simple { range: RangeType::Class { iri: one.clone() } }),
                    _ => {
                        let alias = self.alias(&kept);
                        Some(RangeSpec::Conjunction { members: kept, alias })
                    }
                }
            }
            ConstraintExpr::Restriction(v, node) => {
                let class = v.iri().to_owned();
                self.named.insert(class.clone());
                if !self.fits(path, &class) {
                    return None;
                }
                let name = format!("{parent}.{}", ns::local_name(path));
                let preferred = if self.u.is_external_type(&class) { class.clone() } else { name.clone() };
                let id = self.unique_id(&preferred, &name);
                self.node(id.clone(), name, class.clone(), &node.shapes);
                Some(RangeSpec::Restricted { class, node: id })
            }
            ConstraintExpr::Disjunction(branches) => {
                let mut kept: Vec<RangeSpec> = Vec::new();
                for b in branches {
                    if let Some(r) = self.range(b, path, parent) {
                        if !kept.contains(&r) {
                            kept.push(r);
                        }
                    }
                }
                match kept.len() {
                    0 => None,
                    1 => kept.pop(),
                    _ => Some(RangeSpec::Alternatives { branches: kept }),
                }
            }
        }
    }

    fn alias(&self, members: &[String]) -> Option<String> {
        let want: BTreeSet<String> = members.iter().cloned().collect();
        self.u
            .externals()
            .iter()
            .flat_map(|e| e.vocabulary().types().keys())
            .filter(|t| self.u.aligned_supertypes(t) == want)
            .min()
            .cloned()
    }
}

/// Applies a well-formed operator. SDS operators are applied to the base
/// vocabulary alone; RDS and EDS operators see the external vocabularies.
pub fn apply(op: &Operator, u: &Universe) -> Result<Pattern, ApplyError> {
    let errors: Vec<Diagnostic> =
        check_well_formed(op, u).into_iter().filter(|d| d.severity == Severity::Error).collect();
    if !errors.is_empty() {
        return Err(ApplyError::IllFormed(errors));
    }
    let kind = classify_kind(op, u);
    let scoped = if kind == OperatorKind::Sds { u.base_only() } else { u.clone() };
    let mut b = Builder {
        u: &scoped,
        kind,
        nodes: Vec::new(),
        ids: BTreeSet::new(),
        named: BTreeSet::from([op.target_type.clone()]),
        local_properties: BTreeSet::new(),
        local_ranges: BTreeMap::new(),
        metadata: PatternMetadata::default(),
    };
    let root_name = ns::local_name(&op.target_type).to_owned();
    b.ids.insert(op.target_type.clone());
    b.node(op.target_type.clone(), root_name, op.target_type.clone(), &op.shapes);

    let mut included_types = BTreeSet::new();
    for t in &b.named {
        if let Ok(c) = scoped.subtype_closure(t) {
            included_types.extend(c);
        }
    }
    let included_properties = op.paths().into_iter().map(str::to_owned).collect();
    Ok(Pattern {
        kind: kind.into(),
        target: op.target_type.clone(),
        included_types,
        included_properties,
        local_properties: b.local_properties,
        local_ranges: b.local_ranges,
        nodes: b.nodes,
        operator: op.clone(),
        metadata: b.metadata,
    })
}

pub type LocalRangeEntry = ((String, String), String);

/// The four sets of a pattern with ranges collapsed to type IRIs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FlatSets {
    pub types: BTreeSet<String>,
    pub properties: BTreeSet<String>,
    pub local_properties: BTreeSet<(String, String)>,
    pub local_ranges: BTreeSet<LocalRangeEntry>,
}

impl FlatSets {
    /// Whether every set of `self` contains the corresponding set of `other`.
    pub fn is_superset(&self, other: &FlatSets) -> bool {
        self.types.is_superset(&other.types)
            && self.properties.is_superset(&other.properties)
            && self.local_properties.is_superset(&other.local_properties)
            && self.local_ranges.is_superset(&other.local_ranges)
    }
}

pub fn flat_sets(pattern: &Pattern) -> FlatSets {
    let local_ranges = pattern
        .local_ranges
        .iter()
        .flat_map(|(k, r)| r.flat_types().into_iter().map(move |t| (k.clone(), t)))
        .collect();
    FlatSets {
        types: pattern.included_types.clone(),
        properties: pattern.included_properties.clone(),
        local_properties: pattern.local_properties.clone(),
        local_ranges,
    }
}

/// Recomputes the sets of an SDS operator's root shape by exhaustive
/// comprehension over the vocabulary: `T∩` by scanning every type, `Tp`
/// over `T∩ × P∩` and `Tr` over `Tp × T∩`. Independent of [`apply`]; meant
/// for desk-scale vocabularies.
pub fn brute_force_oracle(op: &Operator, vocab: &Vocabulary) -> (BTreeSet<String>, BTreeSet<(String, String)>, BTreeSet<LocalRangeEntry>) {
    let u = Universe::new(vocab, &[]);
    let map = u.datatypes();
    let by_path: BTreeMap<&str, &PropertyShape> = op.shapes.iter().map(|s| (s.path.as_str(), s)).collect();

    // schema.org readings of XSD datatypes, by scanning the types
    let reading = |x: &str, p: &str| -> Option<String> {
        let mapped: Vec<&String> = map
            .entries()
            .iter()
            .filter(|(_, xx)| xx == x)
            .map(|(s, _)| s)
            .filter(|s| vocab.types().contains_key(*s))
            .collect();
        mapped
            .iter()
            .find(|s| vocab.range_contains(p, s).unwrap_or(false))
            .or(mapped.first())
            .map(|s| s.to_string())
    };

    let mut named: BTreeSet<String> = BTreeSet::from([op.target_type.clone()]);
    for s in &op.shapes {
        for v in s.constraint.value_types() {
            match v {
                ValueType::Class(c) => {
                    named.insert(c.clone());
                }
                ValueType::Datatype(x) => {
                    named.extend(reading(x, &s.path));
                }
            }
        }
    }
    let t_cap: BTreeSet<String> = vocab
        .types()
        .keys()
        .filter(|t| named.iter().any(|n| vocab.type_def(n).is_some() && vocab.is_subtype_of(t, n).unwrap_or(false)))
        .cloned()
        .collect();
    let p_cap: BTreeSet<&String> = vocab.properties().keys().filter(|p| by_path.contains_key(p.as_str())).collect();

    let mut tp = BTreeSet::new();
    for t in &t_cap {
        for p in &p_cap {
            if *t == op.target_type && vocab.domain_contains(p, t).unwrap_or(false) {
                tp.insert((t.clone(), p.to_string()));
            }
        }
    }

    // the types a branch names, after dropping members implied by others
    let branch_types = |c: &ConstraintExpr, p: &str| -> Vec<Vec<String>> {
        let branches: Vec<&ConstraintExpr> = match c {
            ConstraintExpr::Disjunction(b) => b.iter().collect(),
            other => vec![other],
        };
        branches
            .into_iter()
            .map(|b| {
                let names: Vec<String> = b
                    .value_types()
                    .into_iter()
                    .filter_map(|v| match v {
                        ValueType::Class(c) => Some(c.clone()),
                        ValueType::Datatype(x) => reading(x, p),
                    })
                    .collect();
                names
                    .iter()
                    .filter(|a| !names.iter().any(|b| a != &b && vocab.is_subtype_of(b, a).unwrap_or(false)))
                    .cloned()
                    .collect()
            })
            .collect()
    };

    let mut tr = BTreeSet::new();
    for (t, p) in &tp {
        let shape = by_path[p.as_str()];
        let branches = branch_types(&shape.constraint, p);
        for r in &t_cap {
            let admitted = branches.iter().any(|b| {
                b.contains(r) && b.iter().any(|m| vocab.range_contains(p, m).unwrap_or(false))
            });
            if admitted {
                tr.insert(((t.clone(), p.clone()), r.clone()));
            }
        }
    }
    (t_cap, tp, tr)
}
