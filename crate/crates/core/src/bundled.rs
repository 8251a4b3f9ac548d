//! Vocabulary files shipped with the crate.

use crate::ns;
use crate::operator::{parse_document, Operator};
use crate::rdf::parse_turtle;
use crate::vocab::{load_external, load_vocabulary, ExternalVocabulary, Vocabulary};

/// schema.org core, release 3.5.
pub const SCHEMAORG_3_5: &str = include_str!("../data/schemaorg-3.5.ttl");

/// A small excerpt of release 3.5 around lodging businesses, used by the
/// guide and quick tests.
pub const SCHEMAORG_DESK: &str = include_str!("../data/schemaorg-desk.ttl");

/// A toy external vocabulary in `http://example.org/n/`.
pub const N_EXTENSION: &str = include_str!("../data/n-extension.ttl");

pub const N_NAMESPACE: &str = "http://example.org/n/";

pub fn schemaorg() -> Vocabulary {
    load_vocabulary(&parse_turtle(SCHEMAORG_3_5).expect("bundled release parses"), ns::SCHEMA)
        .expect("bundled release loads")
}

pub fn desk() -> Vocabulary {
    load_vocabulary(&parse_turtle(SCHEMAORG_DESK).expect("desk excerpt parses"), ns::SCHEMA)
        .expect("desk excerpt loads")
}

pub fn n_extension(base: &Vocabulary) -> ExternalVocabulary {
    load_external(&parse_turtle(N_EXTENSION).expect("extension parses"), N_NAMESPACE, base)
        .expect("extension loads")
}

/// The Hotel operator: five local properties, a multi-typed range and a
/// two-level nested restriction through `n:Location`.
pub const HOTEL_RDS: &str = include_str!("../data/hotel-rds.ttl");

/// `HOTEL_RDS` plus `n:totalNumberOfBeds`.
pub const HOTEL_EDS: &str = include_str!("../data/hotel-eds.ttl");

/// The Hotel operator flattened to declared schema.org ranges.
pub const HOTEL_SDS: &str = include_str!("../data/hotel-sds.ttl");

/// Parses a document holding exactly one operator.
pub fn operator(text: &str) -> Operator {
    let graph = parse_turtle(text).expect("operator document parses");
    let mut ops = parse_document(&graph).expect("operator document is an operator");
    assert_eq!(ops.len(), 1, "expected a single operator");
    ops.remove(0)
}
