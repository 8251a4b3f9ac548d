//! One PASS/FAIL line per acceptance criterion. Runs without the test
//! harness so the lines always show up in `cargo test` output.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use domspec::bundled;
use domspec::engine::{apply, brute_force_oracle, flat_sets, FlatSets, LocalRangeEntry, PatternKind};
use domspec::operator::{
    check_document, classify_kind, parse_document, serialize_operator, ConstraintExpr, Operator, OperatorKind,
    PropertyShape, Severity as DiagSeverity, ValueType,
};
use domspec::rdf::{isomorphic, parse_turtle, serialize_turtle};
use domspec::validate::validate;
use domspec::vocab::{Universe, Vocabulary};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn core(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core").join(rel)
}

fn read(rel: &str) -> String {
    fs::read_to_string(core(rel)).unwrap()
}

fn header<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines().find_map(|l| l.strip_prefix(&format!("# {key}:"))).map(str::trim)
}

fn within(elapsed: Duration, limit: u64) -> Outcome {
    if elapsed > Duration::from_secs(limit) {
        Err(format!("took {:.2}s, limit {limit}s", elapsed.as_secs_f64()))
    } else {
        Ok(format!("{:.2}s", elapsed.as_secs_f64()))
    }
}

// Listings are compared after expanding prefixes and folding case, so
// `checkInTime` and `checkinTime` are the same name.
fn norm(iri: &str) -> String {
    iri.replace("http://schema.org/", "s:").replace("http://example.org/n/", "n:").to_lowercase()
}

fn norm_pairs(set: &BTreeSet<(String, String)>) -> BTreeSet<(String, String)> {
    set.iter().map(|(a, b)| (norm(a), norm(b))).collect()
}

fn norm_ranges<'a>(set: impl IntoIterator<Item = &'a LocalRangeEntry>) -> BTreeSet<(String, String, String)> {
    set.into_iter().map(|((a, b), c)| (norm(a), norm(b), norm(c))).collect()
}

fn listing(items: &[(&str, &str, &str)]) -> BTreeSet<(String, String, String)> {
    items.iter().map(|(a, b, c)| (a.to_lowercase(), b.to_lowercase(), c.to_lowercase())).collect()
}

fn hotel_universe() -> (Vocabulary, Vec<domspec::vocab::ExternalVocabulary>) {
    let v = bundled::schemaorg();
    let exts = vec![bundled::n_extension(&v)];
    (v, exts)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (v, exts) = hotel_universe();
    let u = Universe::new(&v, &exts);
    let sets = |text: &str| -> Result<(PatternKind, FlatSets), String> {
        let p = apply(&bundled::operator(text), &u).map_err(|e| e.to_string())?;
        Ok((p.kind, flat_sets(&p)))
    };

    let (kind, sds) = sets(bundled::HOTEL_SDS)?;
    ensure!(kind == PatternKind::SDSP, "SDS fixture gave {kind}");
    let want_tp: BTreeSet<(String, String)> =
        ["checkinTime", "checkoutTime", "containsPlace", "location", "name"]
            .iter()
            .map(|p| ("s:hotel".to_owned(), format!("s:{p}").to_lowercase()))
            .collect();
    ensure!(norm_pairs(&sds.local_properties) == want_tp, "SDSP Tp differs: {:?}", sds.local_properties);
    let want_tr = listing(&[
        ("s:Hotel", "s:checkInTime", "s:DateTime"),
        ("s:Hotel", "s:checkOutTime", "s:DateTime"),
        ("s:Hotel", "s:containsPlace", "s:Place"),
        ("s:Hotel", "s:location", "s:PostalAddress"),
        ("s:Hotel", "s:name", "s:Text"),
    ]);
    ensure!(norm_ranges(&sds.local_ranges) == want_tr, "SDSP Tr differs: {:?}", sds.local_ranges);

    // the listings leave out ranges owned by other types for brevity
    let shown = |f: &FlatSets| {
        norm_ranges(f.local_ranges.iter().filter(|((o, _), _)| {
            o == "http://schema.org/Hotel" || o == "http://example.org/n/Location"
        }))
    };
    let (kind, rds) = sets(bundled::HOTEL_RDS)?;
    ensure!(kind == PatternKind::RDSP, "RDS fixture gave {kind}");
    let mut want = listing(&[
        ("n:Location", "s:address", "s:PostalAddress"),
        ("s:Hotel", "s:checkInTime", "s:DateTime"),
        ("s:Hotel", "s:checkOutTime", "s:DateTime"),
        ("s:Hotel", "s:containsPlace", "n:HotelRoomProduct"),
        ("s:Hotel", "s:location", "n:Location"),
        ("s:Hotel", "s:name", "s:Text"),
    ]);
    ensure!(shown(&rds) == want, "RDSP listing differs: {:?}", shown(&rds));

    let (kind, eds) = sets(bundled::HOTEL_EDS)?;
    ensure!(kind == PatternKind::EDSP, "EDS fixture gave {kind}");
    want.extend(listing(&[("s:Hotel", "n:totalNumberOfBeds", "s:Number")]));
    ensure!(shown(&eds) == want, "EDSP listing differs: {:?}", shown(&eds));
    within(start.elapsed(), 5)
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_domspec"))
        .args(["vocab-info", "--vocab"])
        .arg(core("data/schemaorg-3.5.ttl"))
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "vocab-info exited with {:?}", out.status.code());
    let text = String::from_utf8_lossy(&out.stdout);
    let field = |name: &str| -> Result<f64, String> {
        text.lines()
            .find_map(|l| l.trim_start().strip_prefix(&format!("{name}: ")))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| format!("no `{name}` line in output"))
    };
    let regular = field("regular")?;
    let types = field("types")?;
    let props = field("properties")?;
    ensure!(text.contains("counting: "), "counting convention not printed");
    for (label, got, want) in [("regular types", regular, 614.0), ("types", types, 614.0), ("properties", props, 905.0)] {
        let off = (got - want).abs() / want > 0.05;
        ensure!(!off, "{label}: {got} vs {want}");
    }
    let timing = within(start.elapsed(), 10)?;
    Ok(format!("{regular} regular / {types} types / {props} properties, {timing}"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    for seed in 0..100u64 {
        let mut r = common::rng(seed);
        let toy = common::toy_vocab(&mut r);
        ensure!(toy.type_count() <= 30 && toy.properties.len() <= 40, "seed {seed}: toy too large");
        let op = common::sds_operator(&mut r, &toy);
        let u = Universe::new(&toy.vocab, &[]);
        ensure!(classify_kind(&op, &u) == OperatorKind::Sds, "seed {seed}: not SDS");
        let p = apply(&op, &u).map_err(|e| format!("seed {seed}: {e}"))?;
        let f = flat_sets(&p);
        let (t, tp, tr) = brute_force_oracle(&op, &toy.vocab);
        ensure!(f.types == t && f.local_properties == tp && f.local_ranges == tr, "seed {seed}: engine and oracle differ");
    }
    Ok(format!("100 seeds, {}", within(start.elapsed(), 30)?))
}

fn corpus(kind: &str) -> Vec<(String, String)> {
    let mut files: Vec<PathBuf> = fs::read_dir(core(&format!("tests/fixtures/grammar/{kind}")))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|f| (f.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&f).unwrap()))
        .collect()
}

fn criterion_4() -> Outcome {
    let (v, exts) = hotel_universe();
    let u = Universe::new(&v, &exts);
    let (valid, invalid) = (corpus("valid"), corpus("invalid"));
    ensure!(valid.len() == 6 && invalid.len() == 6, "corpus has {} valid, {} invalid", valid.len(), invalid.len());
    let mut kinds = BTreeSet::new();
    for (name, text) in &valid {
        let check = check_document(&parse_turtle(text).map_err(|e| e.to_string())?, &u);
        ensure!(check.diagnostics.is_empty(), "{name}: {:?}", check.diagnostics);
        let want: OperatorKind = header(text, "expect").unwrap().parse()?;
        ensure!(check.operators.len() == 1 && check.operators[0].1 == want, "{name}: kind differs");
        let or = check.operators[0].0.shapes.iter().any(|s| matches!(s.constraint, ConstraintExpr::Disjunction(_)));
        kinds.insert((want, or));
    }
    ensure!(kinds.len() == 6, "valid corpus misses a kind/disjunction combination");
    for (name, text) in &invalid {
        let check = check_document(&parse_turtle(text).map_err(|e| e.to_string())?, &u);
        let want = header(text, "expect").unwrap();
        ensure!(
            check.diagnostics.iter().any(|d| d.severity == DiagSeverity::Error && d.production.to_string() == want),
            "{name}: no error citing {want}: {:?}",
            check.diagnostics
        );
    }
    Ok("6 accepted, 6 rejected".into())
}

fn criterion_5() -> Outcome {
    let (v, exts) = hotel_universe();
    let start = Instant::now();
    let u = Universe::new(&v, &exts);
    let pattern = apply(&bundled::operator(&read("tests/fixtures/hotel-image.ttl")), &u).map_err(|e| e.to_string())?;
    let mut files: Vec<PathBuf> =
        fs::read_dir(core("tests/fixtures/instances")).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    ensure!(files.len() >= 8, "only {} instances", files.len());
    for f in &files {
        let text = fs::read_to_string(f).unwrap();
        let report = validate(&parse_turtle(&text).map_err(|e| e.to_string())?, &pattern, &u);
        let kinds: Vec<String> = report.results.iter().map(|r| r.kind.to_string()).collect();
        let name = f.file_name().unwrap().to_string_lossy();
        ensure!(kinds.join(" ") == header(&text, "kinds").unwrap_or(""), "{name}: kinds {kinds:?}");
        ensure!(report.conforms.to_string() == header(&text, "conforms").unwrap_or(""), "{name}: conforms flag");
    }
    Ok(format!("{} instances, {}", files.len(), within(start.elapsed(), 2)?))
}

fn round_trip(op: &Operator) -> Result<(), String> {
    let text = serialize_turtle(&serialize_operator(op));
    ensure!(text == serialize_turtle(&serialize_operator(op)), "serializer output not stable");
    let back = parse_document(&parse_turtle(&text).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure!(back.len() == 1 && back[0] == *op, "reparsed operator differs");
    ensure!(serialize_turtle(&serialize_operator(&back[0])) == text, "second serialization differs");
    Ok(())
}

fn criterion_6() -> Outcome {
    let mut fixtures: Vec<String> = vec![
        bundled::HOTEL_SDS.into(),
        bundled::HOTEL_RDS.into(),
        bundled::HOTEL_EDS.into(),
        read("tests/fixtures/hotel-image.ttl"),
    ];
    fixtures.extend(corpus("valid").into_iter().map(|(_, t)| t));
    for (i, text) in fixtures.iter().enumerate() {
        let g = parse_turtle(text).map_err(|e| e.to_string())?;
        let ops = parse_document(&g).map_err(|e| e.to_string())?;
        // the bundled operators type every shape, as the serializer does
        if i < 3 {
            ensure!(isomorphic(&g, &serialize_operator(&ops[0])), "bundled fixture {i} does not round-trip as a graph");
        }
        round_trip(&ops[0])?;
    }
    for seed in 0..100u64 {
        let mut r = common::rng(1000 + seed);
        let toy = common::toy_vocab(&mut r);
        round_trip(&common::any_operator(&mut r, &toy)).map_err(|e| format!("seed {seed}: {e}"))?;
    }
    Ok(format!("{} fixtures, 100 random operators", fixtures.len()))
}

fn criterion_7() -> Outcome {
    let (v, exts) = hotel_universe();
    let u = Universe::new(&v, &exts);
    let mut pairs: Vec<(Operator, Operator)> =
        vec![(bundled::operator(bundled::HOTEL_RDS), bundled::operator(bundled::HOTEL_EDS))];
    // every RDS fixture, extended with one external property
    for (_, text) in corpus("valid") {
        if header(&text, "expect") != Some("RDS") {
            continue;
        }
        let rds = bundled::operator(&text);
        let mut shapes = rds.shapes.clone();
        shapes.push(PropertyShape::new(
            "http://example.org/n/totalNumberOfBeds",
            false,
            ConstraintExpr::conjunction(vec![ValueType::Datatype("http://www.w3.org/2001/XMLSchema#double".into())]),
        ));
        let eds = Operator::new(None, rds.target_type.clone(), shapes);
        pairs.push((rds, eds));
    }
    for (i, (rds, eds)) in pairs.iter().enumerate() {
        ensure!(classify_kind(rds, &u) == OperatorKind::Rds, "pair {i}: first is not RDS");
        ensure!(classify_kind(eds, &u) == OperatorKind::Eds, "pair {i}: second is not EDS");
        let small = flat_sets(&apply(rds, &u).map_err(|e| e.to_string())?);
        let big = flat_sets(&apply(eds, &u).map_err(|e| e.to_string())?);
        ensure!(big.is_superset(&small), "pair {i}: EDSP sets are not supersets");
    }
    Ok(format!("{} pairs", pairs.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("Hotel pattern reconstruction", criterion_1),
        ("vocabulary census", criterion_2),
        ("oracle equivalence", criterion_3),
        ("grammar conformance corpus", criterion_4),
        ("validator truth table", criterion_5),
        ("round-trip stability", criterion_6),
        ("EDS monotonicity", criterion_7),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {} {name} ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
