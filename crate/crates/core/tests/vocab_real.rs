use domspec::bundled;
use domspec::vocab::{TypeKind, Universe};

const S: &str = "http://schema.org/";

fn s(local: &str) -> String {
    format!("{S}{local}")
}

#[test]
fn release_census() {
    let v = bundled::schemaorg();
    let c = v.census();
    assert_eq!(c.regular_types, 614);
    assert_eq!(c.datatypes, 10);
    assert_eq!(c.properties, 905);
    assert!(c.orphans.is_empty(), "{:?}", c.orphans);
    // references into the pending/extension layers, which the core file
    // does not declare
    assert_eq!(c.opaque.len(), 20, "{:?}", c.opaque);
    assert!(c.opaque.contains(&s("TouristDestination")));
}

#[test]
fn release_hierarchy() {
    let v = bundled::schemaorg();
    assert!(v.is_subtype_of(&s("Hotel"), &s("Thing")).unwrap());
    assert!(v.is_subtype_of(&s("Hotel"), &s("Place")).unwrap());
    assert!(v.is_subtype_of(&s("Hotel"), &s("Organization")).unwrap());
    assert!(!v.is_subtype_of(&s("Resort"), &s("Hotel")).unwrap());
    assert_eq!(v.type_def(&s("Integer")).unwrap().kind, TypeKind::Datatype);
    let dt = v.subtype_closure(&s("DataType")).unwrap();
    for d in ["Text", "URL", "Number", "Integer", "Float", "Boolean", "Date", "DateTime", "Time"] {
        assert!(dt.contains(&s(d)), "{d}");
    }
    assert!(v.domain_contains(&s("name"), &s("Hotel")).unwrap());
    assert!(v.domain_contains(&s("checkinTime"), &s("Hotel")).unwrap());
    assert!(v.range_contains(&s("location"), &s("PostalAddress")).unwrap());
    assert!(!v.range_contains(&s("checkinTime"), &s("Text")).unwrap());
}

#[test]
fn desk_excerpt_is_consistent_with_release() {
    let full = bundled::schemaorg();
    let desk = bundled::desk();
    let c = desk.census();
    assert!(c.orphans.is_empty() && c.opaque.is_empty());
    for (t, def) in desk.types() {
        let real = full.type_def(t).unwrap();
        assert_eq!(real.kind, def.kind, "{t}");
        for sup in &def.direct_supertypes {
            assert!(full.is_subtype_of(t, sup).unwrap());
        }
    }
    for (p, def) in desk.properties() {
        let real = full.property(p).unwrap();
        assert!(def.domain.is_subset(&real.domain), "{p}");
        assert!(def.range.is_subset(&real.range), "{p}");
    }
}

#[test]
fn extension_alignments() {
    let v = bundled::schemaorg();
    let exts = [bundled::n_extension(&v)];
    let u = Universe::new(&v, &exts);
    let n = |l: &str| format!("{}{l}", bundled::N_NAMESPACE);
    assert!(u.is_subtype_of(&n("HotelRoomProduct"), &s("Room")).unwrap());
    assert!(u.is_subtype_of(&n("HotelRoomProduct"), &s("Product")).unwrap());
    assert!(u.is_subtype_of(&n("Location"), &s("Place")).unwrap());
    assert!(u.range_contains(&s("location"), &n("Location")).unwrap());
    assert!(u.domain_contains(&n("totalNumberOfBeds"), &s("Hotel")).unwrap());
    assert!(u.subtype_closure(&s("Place")).unwrap().contains(&n("Location")));
    assert_eq!(
        u.aligned_supertypes(&n("HotelRoomProduct")),
        [s("HotelRoom"), s("Product")].into_iter().collect()
    );
}
