//! Mapping between schema.org datatypes and the XSD datatypes used inside
//! operators and instance data, plus lexical checks for XSD literals.

use std::collections::BTreeSet;

use crate::ns;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DatatypeMapError {
    #[error("line {line}: expected `<schema local name>\\t<xsd iri>`")]
    Malformed { line: usize },
    #[error("line {line}: {iri} is not an absolute IRI")]
    NotAnIri { line: usize, iri: String },
    #[error("line {line}: {name} is mapped twice")]
    Duplicate { line: usize, name: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatatypeMap {
    // (schema.org iri, xsd iri) in file order
    entries: Vec<(String, String)>,
}

pub const BUNDLED_TABLE: &str = include_str!("../data/xsd-datatypes.tsv");

impl Default for DatatypeMap {
    fn default() -> Self {
        Self::bundled()
    }
}

impl DatatypeMap {
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_TABLE, ns::SCHEMA).expect("bundled datatype table is valid")
    }

    pub fn bundled_ref() -> &'static DatatypeMap {
        static MAP: std::sync::OnceLock<DatatypeMap> = std::sync::OnceLock::new();
        MAP.get_or_init(DatatypeMap::bundled)
    }

    /// Parses a table of `LocalName<TAB>xsd-iri` lines. Local names are
    /// resolved against `schema_ns`.
    pub fn parse(text: &str, schema_ns: &str) -> Result<Self, DatatypeMapError> {
        let mut entries: Vec<(String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut cols = trimmed.split('\t').map(str::trim).filter(|c| !c.is_empty());
            let (Some(name), Some(xsd), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(DatatypeMapError::Malformed { line });
            };
            if !crate::rdf::is_absolute_iri(xsd) {
                return Err(DatatypeMapError::NotAnIri { line, iri: xsd.to_owned() });
            }
            let schema = format!("{schema_ns}{name}");
            if entries.iter().any(|(s, _)| *s == schema) {
                return Err(DatatypeMapError::Duplicate { line, name: name.to_owned() });
            }
            entries.push((schema, xsd.to_owned()));
        }
        Ok(DatatypeMap { entries })
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn to_xsd(&self, schema_iri: &str) -> Option<&str> {
        self.entries.iter().find(|(s, _)| s == schema_iri).map(|(_, x)| x.as_str())
    }

    /// Default schema.org reading of an XSD datatype.
    pub fn to_schema(&self, xsd_iri: &str) -> Option<&str> {
        self.entries.iter().find(|(_, x)| x == xsd_iri).map(|(s, _)| s.as_str())
    }

    /// Every schema.org datatype that maps to `xsd_iri`, in table order.
    pub fn schema_candidates(&self, xsd_iri: &str) -> Vec<&str> {
        self.entries.iter().filter(|(_, x)| x == xsd_iri).map(|(s, _)| s.as_str()).collect()
    }

    pub fn xsd_datatypes(&self) -> BTreeSet<&str> {
        self.entries.iter().map(|(_, x)| x.as_str()).collect()
    }
}

/// Whether `lexical` is a valid lexical form of `datatype`. Datatypes this
/// module does not know about accept any lexical form.
pub fn lexical_ok(datatype: &str, lexical: &str) -> bool {
    use chrono::{DateTime, NaiveDate, NaiveDateTime, NaiveTime};
    let tz_stripped = |s: &str| -> String {
        // drop a trailing Z or +hh:mm / -hh:mm zone for naive parsing
        if let Some(rest) = s.strip_suffix('Z') {
            return rest.to_owned();
        }
        if s.len() > 6 {
            let (head, tail) = s.split_at(s.len() - 6);
            let b = tail.as_bytes();
            if (b[0] == b'+' || b[0] == b'-') && b[3] == b':' && tail[1..3].parse::<u8>().is_ok() {
                return head.to_owned();
            }
        }
        s.to_owned()
    };
    match datatype {
        ns::xsd::STRING => true,
        ns::xsd::INTEGER => {
            let s = lexical.strip_prefix(['+', '-']).unwrap_or(lexical);
            !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
        }
        ns::xsd::DECIMAL => {
            let s = lexical.strip_prefix(['+', '-']).unwrap_or(lexical);
            let mut parts = s.splitn(2, '.');
            let int = parts.next().unwrap_or("");
            let frac = parts.next().unwrap_or("");
            (!int.is_empty() || !frac.is_empty())
                && int.bytes().all(|b| b.is_ascii_digit())
                && frac.bytes().all(|b| b.is_ascii_digit())
        }
        ns::xsd::DOUBLE | ns::xsd::FLOAT => {
            matches!(lexical, "INF" | "-INF" | "+INF" | "NaN")
                || (lexical.parse::<f64>().is_ok() && !lexical.eq_ignore_ascii_case("inf") && !lexical.contains("inity"))
        }
        ns::xsd::BOOLEAN => matches!(lexical, "true" | "false" | "1" | "0"),
        ns::xsd::DATE => NaiveDate::parse_from_str(&tz_stripped(lexical), "%Y-%m-%d").is_ok(),
        ns::xsd::TIME => NaiveTime::parse_from_str(&tz_stripped(lexical), "%H:%M:%S%.f").is_ok(),
        ns::xsd::DATE_TIME => {
            DateTime::parse_from_rfc3339(lexical).is_ok()
                || NaiveDateTime::parse_from_str(&tz_stripped(lexical), "%Y-%m-%dT%H:%M:%S%.f").is_ok()
        }
        ns::xsd::ANY_URI => !lexical.chars().any(char::is_whitespace),
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table() {
        let m = DatatypeMap::bundled();
        assert_eq!(m.entries().len(), 9);
        assert_eq!(m.to_xsd("http://schema.org/Text"), Some(ns::xsd::STRING));
        assert_eq!(m.to_xsd("http://schema.org/DateTime"), Some(ns::xsd::DATE_TIME));
        assert_eq!(m.to_schema(ns::xsd::DOUBLE), Some("http://schema.org/Number"));
        assert_eq!(
            m.schema_candidates(ns::xsd::DOUBLE),
            vec!["http://schema.org/Number", "http://schema.org/Float"]
        );
        assert_eq!(m.to_xsd("http://schema.org/Hotel"), None);
    }

    #[test]
    fn amended_table() {
        let m = DatatypeMap::parse("# c\nText\thttp://www.w3.org/2001/XMLSchema#normalizedString\n", ns::SCHEMA)
            .unwrap();
        assert_eq!(m.to_schema("http://www.w3.org/2001/XMLSchema#normalizedString"), Some("http://schema.org/Text"));
        assert_eq!(DatatypeMap::parse("Text", ns::SCHEMA), Err(DatatypeMapError::Malformed { line: 1 }));
        assert!(matches!(
            DatatypeMap::parse("Text\tx:y\nText\tx:z", ns::SCHEMA),
            Err(DatatypeMapError::Duplicate { line: 2, .. })
        ));
        assert!(matches!(DatatypeMap::parse("Text\tnope", ns::SCHEMA), Err(DatatypeMapError::NotAnIri { .. })));
    }

    #[test]
    fn lexical_forms() {
        assert!(lexical_ok(ns::xsd::DATE_TIME, "2019-05-01T14:00:00"));
        assert!(lexical_ok(ns::xsd::DATE_TIME, "2019-05-01T14:00:00Z"));
        assert!(lexical_ok(ns::xsd::DATE_TIME, "2019-05-01T14:00:00.5+02:00"));
        assert!(!lexical_ok(ns::xsd::DATE_TIME, "2019-05-01"));
        assert!(!lexical_ok(ns::xsd::DATE_TIME, "afternoon"));
        assert!(lexical_ok(ns::xsd::DATE, "2019-02-28"));
        assert!(!lexical_ok(ns::xsd::DATE, "2019-02-30"));
        assert!(lexical_ok(ns::xsd::TIME, "14:00:00"));
        assert!(lexical_ok(ns::xsd::INTEGER, "-12"));
        assert!(!lexical_ok(ns::xsd::INTEGER, "1.5"));
        assert!(lexical_ok(ns::xsd::DOUBLE, "1.5e3"));
        assert!(lexical_ok(ns::xsd::DOUBLE, "INF"));
        assert!(!lexical_ok(ns::xsd::DOUBLE, "infinity"));
        assert!(!lexical_ok(ns::xsd::DOUBLE, "many"));
        assert!(lexical_ok(ns::xsd::BOOLEAN, "true"));
        assert!(!lexical_ok(ns::xsd::BOOLEAN, "yes"));
        assert!(!lexical_ok(ns::xsd::ANY_URI, "not a uri"));
        assert!(lexical_ok(ns::xsd::STRING, "anything"));
    }
}
