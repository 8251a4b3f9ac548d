use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn core(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core").join(rel)
}

fn release() -> PathBuf {
    core("data/schemaorg-3.5.ttl")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_domspec")).args(args).output().unwrap()
}

fn hotel_args<'a>(cmd: &'a str, extra: &[&'a str]) -> Vec<String> {
    let mut v = vec![
        cmd.to_owned(),
        "--vocab".into(),
        release().display().to_string(),
        "--ext".into(),
        core("data/n-extension.ttl").display().to_string(),
    ];
    v.extend(extra.iter().map(|s| s.to_string()));
    v
}

fn run_s(args: &[String]) -> Output {
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    run(&refs)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> String {
    path.display().to_string()
}

#[test]
fn vocab_info_counts_the_desk_excerpt() {
    let path = core("data/schemaorg-desk.ttl");
    let text = fs::read_to_string(&path).unwrap();
    // count declaration lines directly
    let classes = text.lines().filter(|l| l.starts_with("schema:") && l.contains(" a rdfs:Class")).count();
    // datatypes: DataType, its members, then subclasses of those to a fixed point
    let mut blocks: Vec<(String, String)> = Vec::new();
    for l in text.lines() {
        if let Some(rest) = l.strip_prefix("schema:") {
            blocks.push((rest.split(' ').next().unwrap().to_owned(), l.to_owned()));
        } else if let Some(last) = blocks.last_mut() {
            last.1.push_str(l);
        }
    }
    let mut dts: std::collections::BTreeSet<String> = ["DataType".to_owned()].into();
    loop {
        let before = dts.len();
        for (name, body) in &blocks {
            if dts.iter().any(|d| body.contains(&format!("schema:{d} ")) || body.contains(&format!("schema:{d} ."))) && name != "DataType" && body.contains(" a rdfs:Class") {
                dts.insert(name.clone());
            }
        }
        if dts.len() == before {
            break;
        }
    }
    let datatypes = dts.len();
    let props = text.lines().filter(|l| l.starts_with("schema:") && l.contains(" a rdf:Property")).count();

    let o = run(&["vocab-info", "--vocab", &p(&path)]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains(&format!("types: {classes}\n")), "{out}");
    assert!(out.contains(&format!("  regular: {}\n", classes - datatypes)), "{out}");
    assert!(out.contains(&format!("  datatypes: {datatypes}\n")), "{out}");
    assert!(out.contains(&format!("properties: {props}\n")), "{out}");
    assert!(out.contains("counting: "));
}

#[test]
fn vocab_info_missing_file() {
    let o = run(&["vocab-info", "--vocab", "/nonexistent/schema.ttl"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot read"));
    assert_eq!(run(&["vocab-info"]).status.code(), Some(2));
}

#[test]
fn check_exit_codes() {
    let ok = run_s(&hotel_args("check", &[&p(&core("data/hotel-rds.ttl"))]));
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).contains("RDS operator on http://schema.org/Hotel"));

    let bad = run_s(&hotel_args("check", &[&p(&core("tests/fixtures/grammar/invalid/min-count-two.ttl"))]));
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("error[MinCount]"), "{}", stdout(&bad));

    let missing = run_s(&hotel_args("check", &["/nonexistent/op.ttl"]));
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn apply_writes_three_files_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let args = hotel_args("apply", &["--out", &p(&out), &p(&core("data/hotel-rds.ttl"))]);
    let first = run_s(&args);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    assert!(stdout(&first).contains("RDSP on http://schema.org/Hotel"));
    let mut names: Vec<String> =
        fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["Hotel.json", "Hotel.md", "Hotel.ttl"]);
    let read = |n: &str| fs::read(out.join(n)).unwrap();
    let before: Vec<Vec<u8>> = names.iter().map(|n| read(n)).collect();
    assert_eq!(run_s(&args).status.code(), Some(0));
    let after: Vec<Vec<u8>> = names.iter().map(|n| read(n)).collect();
    assert_eq!(before, after);
}

#[test]
fn apply_ill_formed_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run_s(&hotel_args(
        "apply",
        &["--out", &p(&out), &p(&core("tests/fixtures/grammar/invalid/unknown-path.ttl"))],
    ));
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn docgen_and_formats() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_s(&hotel_args("docgen", &["--out", &p(dir.path()), &p(&core("data/hotel-eds.ttl"))]));
    assert_eq!(o.status.code(), Some(0));
    let md = fs::read_to_string(dir.path().join("Hotel.md")).unwrap();
    assert!(md.contains("[totalNumberOfBeds](http://example.org/n/totalNumberOfBeds)"), "{md}");
    assert!(!dir.path().join("Hotel.json").exists());

    let o = run_s(&hotel_args(
        "apply",
        &["--out", &p(dir.path()), "--format", "json", &p(&core("data/hotel-sds.ttl"))],
    ));
    assert_eq!(o.status.code(), Some(0));
    let json = fs::read_to_string(dir.path().join("Hotel.json")).unwrap();
    assert!(json.contains("\"kind\": \"SDSP\""));
}

fn instance(name: &str) -> String {
    let dir = core("tests/fixtures/instances");
    let entry = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|f| f.file_name().unwrap().to_str().unwrap().starts_with(name))
        .unwrap();
    p(&entry)
}

#[test]
fn validate_exit_codes_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r/report.ttl");
    let op = p(&core("data/hotel-rds.ttl"));

    let ok = run_s(&hotel_args("validate", &["--report", &p(&report), &op, &instance("01")]));
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(fs::read_to_string(&report).unwrap().contains("sh:conforms \"true\""));

    let missing = run_s(&hotel_args("validate", &[&op, &instance("02")]));
    assert_eq!(missing.status.code(), Some(1));
    let lines: Vec<String> = stdout(&missing).lines().filter(|l| l.starts_with("violation ")).map(String::from).collect();
    assert_eq!(lines.len(), 1, "{lines:?}");
    assert!(lines[0].contains("http://schema.org/name"));

    let empty = dir.path().join("empty.ttl");
    fs::write(&empty, "<http://example.org/a> <http://example.org/b> \"c\" .\n").unwrap();
    let none = run_s(&hotel_args("validate", &[&op, &p(&empty)]));
    assert_eq!(none.status.code(), Some(0));
    assert!(stdout(&none).contains("targets: 0"));

    let broken = dir.path().join("broken.ttl");
    fs::write(&broken, "<a> <b> .").unwrap();
    assert_eq!(run_s(&hotel_args("validate", &[&op, &p(&broken)])).status.code(), Some(2));
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("domspec.toml");
    fs::write(
        &cfg,
        format!(
            "vocab = {:?}\next = [{:?}]\nclosedness = \"warning\"\n",
            p(&release()),
            p(&core("data/n-extension.ttl"))
        ),
    )
    .unwrap();
    let op = p(&core("data/hotel-rds.ttl"));
    let extra = instance("08");
    let soft = run(&["validate", "--config", &p(&cfg), &op, &extra]);
    assert_eq!(soft.status.code(), Some(0), "{}", stdout(&soft));
    let hard = run(&["validate", "--config", &p(&cfg), "--closedness", "violation", &op, &extra]);
    assert_eq!(hard.status.code(), Some(1));

    fs::write(&cfg, "vocab = \"x.ttl\"\nunknown = 1\n").unwrap();
    assert_eq!(run(&["vocab-info", "--config", &p(&cfg)]).status.code(), Some(2));
}

#[test]
fn inputs_are_not_modified() {
    let inputs = [release(), core("data/n-extension.ttl"), core("data/hotel-rds.ttl"), PathBuf::from(instance("02"))];
    let before: Vec<Vec<u8>> = inputs.iter().map(|f| fs::read(f).unwrap()).collect();
    let dir = tempfile::tempdir().unwrap();
    let op = p(&inputs[2]);
    for cmd in ["check", "apply", "docgen"] {
        run_s(&hotel_args(cmd, &["--out", &p(dir.path()), &op]));
    }
    run_s(&hotel_args("validate", &["--out", &p(dir.path()), &op, &p(&inputs[3])]));
    let after: Vec<Vec<u8>> = inputs.iter().map(|f| fs::read(f).unwrap()).collect();
    assert_eq!(before, after);
}
