use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use domspec::datatypes::DatatypeMap;
use domspec::docgen::{file_stem, render_json, render_markdown, render_shacl};
use domspec::engine::{apply, flat_sets, Pattern};
use domspec::ns;
use domspec::operator::{check_document, DocumentCheck};
use domspec::rdf::{parse_turtle, serialize_turtle, Graph};
use domspec::validate::{report_to_graph, summary, validate_with, Options, Severity};
use domspec::vocab::{infer_namespace, load_external, load_vocabulary, ExternalVocabulary, Vocabulary, Universe};

// stdout may be a closed pipe; output is best effort
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

macro_rules! say_raw {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout().lock(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(name = "domspec", version, about = "Apply and validate domain specifications over schema.org")]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Flags {
    /// Base vocabulary (Turtle)
    #[arg(long, global = true)]
    vocab: Option<PathBuf>,
    /// External vocabulary (Turtle); its namespace is inferred
    #[arg(long, global = true)]
    ext: Vec<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format, repeatable
    #[arg(long, global = true, value_enum)]
    format: Vec<Format>,
    /// Severity of properties a pattern does not list
    #[arg(long, global = true, value_enum)]
    closedness: Option<Closedness>,
    /// Where to write the validation report
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// TOML file with defaults for the flags above
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Namespace of the base vocabulary
    #[arg(long, global = true)]
    namespace: Option<String>,
    /// Replacement schema.org to XSD datatype table
    #[arg(long, global = true)]
    datatypes: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Count the types and properties of the base vocabulary
    VocabInfo,
    /// Check operator documents against the grammar and the vocabulary
    Check { operator: PathBuf },
    /// Apply an operator and write the resulting pattern
    Apply { operator: PathBuf },
    /// Validate instance data against the pattern of an operator
    Validate { operator: PathBuf, data: PathBuf },
    /// Write documentation pages for the pattern of an operator
    Docgen { operator: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Md,
    Json,
    Ttl,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Md => "md",
            Format::Json => "json",
            Format::Ttl => "ttl",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Closedness {
    Warning,
    Violation,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    vocab: Option<PathBuf>,
    #[serde(default)]
    ext: Vec<PathBuf>,
    out: Option<PathBuf>,
    #[serde(default)]
    format: Vec<Format>,
    closedness: Option<Closedness>,
    report: Option<PathBuf>,
    namespace: Option<String>,
    datatypes: Option<PathBuf>,
}

/// Flags merged over the config file.
struct Config {
    vocab: PathBuf,
    ext: Vec<PathBuf>,
    out: PathBuf,
    formats: Vec<Format>,
    closedness: Severity,
    report: Option<PathBuf>,
    namespace: String,
    datatypes: Option<PathBuf>,
}

impl Config {
    fn resolve(flags: Flags) -> Result<Config> {
        let file = match &flags.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
                let mut c: FileConfig =
                    toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
                // relative paths in the file are relative to the file
                let dir = path.parent().unwrap_or(Path::new(""));
                let fix = |p: &mut PathBuf| {
                    if p.is_relative() {
                        *p = dir.join(&*p);
                    }
                };
                c.vocab.iter_mut().for_each(fix);
                c.ext.iter_mut().for_each(fix);
                c.out.iter_mut().for_each(fix);
                c.report.iter_mut().for_each(fix);
                c.datatypes.iter_mut().for_each(fix);
                c
            }
            None => FileConfig::default(),
        };
        let Some(vocab) = flags.vocab.or(file.vocab) else {
            bail!("no vocabulary given; pass --vocab PATH or set `vocab` in the config file");
        };
        let mut formats = if flags.format.is_empty() { file.format } else { flags.format };
        formats.sort();
        formats.dedup();
        let closedness = match flags.closedness.or(file.closedness).unwrap_or(Closedness::Warning) {
            Closedness::Warning => Severity::Warning,
            Closedness::Violation => Severity::Violation,
        };
        Ok(Config {
            vocab,
            ext: if flags.ext.is_empty() { file.ext } else { flags.ext },
            out: flags.out.or(file.out).unwrap_or_else(|| PathBuf::from(".")),
            formats,
            closedness,
            report: flags.report.or(file.report),
            namespace: flags.namespace.or(file.namespace).unwrap_or_else(|| ns::SCHEMA.to_owned()),
            datatypes: flags.datatypes.or(file.datatypes),
        })
    }
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_turtle(&text).with_context(|| format!("cannot parse {}", path.display()))
}

struct Loaded {
    base: Vocabulary,
    exts: Vec<ExternalVocabulary>,
    datatypes: DatatypeMap,
}

impl Loaded {
    fn new(c: &Config) -> Result<Loaded> {
        let base = load_vocabulary(&read_graph(&c.vocab)?, &c.namespace)
            .with_context(|| format!("cannot load {}", c.vocab.display()))?;
        let mut exts = Vec::new();
        for path in &c.ext {
            let g = read_graph(path)?;
            let Some(namespace) = infer_namespace(&g, base.namespace()) else {
                bail!("{} declares no classes or properties outside {}", path.display(), base.namespace());
            };
            exts.push(load_external(&g, &namespace, &base).with_context(|| format!("cannot load {}", path.display()))?);
        }
        let datatypes = match &c.datatypes {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
                DatatypeMap::parse(&text, base.namespace()).with_context(|| format!("invalid table {}", path.display()))?
            }
            None => DatatypeMap::bundled(),
        };
        Ok(Loaded { base, exts, datatypes })
    }

    fn universe(&self) -> Universe<'_> {
        Universe::new(&self.base, &self.exts).with_datatypes(&self.datatypes)
    }
}

fn print_diagnostics(check: &DocumentCheck) {
    for d in &check.diagnostics {
        say!("{d}");
    }
}

fn vocab_info(c: &Config) -> Result<u8> {
    let loaded = Loaded::new(c)?;
    let v = &loaded.base;
    let census = v.census();
    say!("vocabulary: {}", c.vocab.display());
    say!("namespace: {}", v.namespace());
    say!(
        "counting: classes and properties declared in the namespace of this file only; \
         types reachable from neither Thing nor DataType are orphans and referenced but \
         undeclared types are opaque, both listed separately and not counted"
    );
    say!("types: {}", census.regular_types + census.datatypes);
    say!("  regular: {}", census.regular_types);
    say!("  datatypes: {}", census.datatypes);
    say!("properties: {}", census.properties);
    say!("orphans: {}", census.orphans.len());
    for o in &census.orphans {
        say!("  {o}");
    }
    say!("opaque: {}", census.opaque.len());
    for o in &census.opaque {
        say!("  {o}");
    }
    say!("warnings: {}", v.warnings().len());
    for e in &loaded.exts {
        let ec = e.vocabulary().census();
        say!(
            "external {}: {} types, {} properties, {} alignments",
            e.namespace(),
            ec.regular_types + ec.datatypes + ec.opaque.len() + ec.orphans.len(),
            ec.properties,
            e.alignments().len()
        );
    }
    Ok(0)
}

fn check(c: &Config, operator: &Path) -> Result<u8> {
    let loaded = Loaded::new(c)?;
    let graph = read_graph(operator)?;
    let result = check_document(&graph, &loaded.universe());
    print_diagnostics(&result);
    for (op, kind) in &result.operators {
        say!("{kind} operator on {}", op.target_type);
    }
    Ok(if result.has_errors() { 1 } else { 0 })
}

fn patterns(loaded: &Loaded, operator: &Path) -> Result<Result<(Graph, Vec<Pattern>), DocumentCheck>> {
    let graph = read_graph(operator)?;
    let u = loaded.universe();
    let result = check_document(&graph, &u);
    if result.has_errors() {
        return Ok(Err(result));
    }
    print_diagnostics(&result);
    let pats = result
        .operators
        .iter()
        .map(|(op, _)| apply(op, &u).expect("checked operator applies"))
        .collect();
    Ok(Ok((graph, pats)))
}

fn render(c: &Config, doc: &Graph, pats: &[Pattern], formats: &[Format]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(&c.out).with_context(|| format!("cannot create {}", c.out.display()))?;
    let mut stems = BTreeSet::new();
    let mut written = Vec::new();
    for p in pats {
        let mut stem = file_stem(p);
        let mut i = 2;
        while !stems.insert(stem.clone()) {
            stem = format!("{}-{i}", file_stem(p));
            i += 1;
        }
        for f in formats {
            let text = match f {
                Format::Md => render_markdown(p),
                Format::Json => render_json(p),
                Format::Ttl => {
                    let mut g = render_shacl(p);
                    for (label, namespace) in doc.prefixes() {
                        if !g.prefixes().contains_key(label) {
                            g.add_prefix(label.clone(), namespace.clone());
                        }
                    }
                    serialize_turtle(&g)
                }
            };
            let path = c.out.join(format!("{stem}.{}", f.extension()));
            fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
            written.push(path);
        }
    }
    Ok(written)
}

fn flat_summary(p: &Pattern) -> String {
    let f = flat_sets(p);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} on {}: {} types, {} properties, {} local properties, {} local ranges",
        p.kind,
        p.target,
        f.types.len(),
        f.properties.len(),
        f.local_properties.len(),
        f.local_ranges.len()
    );
    for ((owner, prop), range) in &f.local_ranges {
        let owner = p.owner_type(owner).unwrap_or(owner);
        let _ = writeln!(out, "  ({owner}, {prop}) -> {range}");
    }
    for d in &p.metadata.dropped {
        let _ = writeln!(out, "  dropped {} at {}: {}", d.path, d.node, d.reason);
    }
    out
}

fn apply_cmd(c: &Config, operator: &Path, default: &[Format], show_sets: bool) -> Result<u8> {
    let loaded = Loaded::new(c)?;
    let (doc, pats) = match patterns(&loaded, operator)? {
        Ok(x) => x,
        Err(check) => {
            print_diagnostics(&check);
            return Ok(1);
        }
    };
    let formats = if c.formats.is_empty() { default } else { &c.formats };
    for p in &pats {
        if show_sets {
            say_raw!("{}", flat_summary(p));
        }
    }
    for path in render(c, &doc, &pats, formats)? {
        say!("wrote {}", path.display());
    }
    Ok(0)
}

fn validate_cmd(c: &Config, operator: &Path, data: &Path) -> Result<u8> {
    let loaded = Loaded::new(c)?;
    let (_, pats) = match patterns(&loaded, operator)? {
        Ok(x) => x,
        Err(check) => {
            print_diagnostics(&check);
            bail!("{} is not a well-formed operator document", operator.display());
        }
    };
    let [pattern] = pats.as_slice() else {
        bail!("{} must declare exactly one root node shape, found {}", operator.display(), pats.len());
    };
    let data = read_graph(data)?;
    let options = Options { closedness: c.closedness };
    let report = validate_with(&data, pattern, &loaded.universe(), &options);
    say_raw!("{}", summary(&report));
    if let Some(path) = c.report.clone().or_else(|| (c.out != Path::new(".")).then(|| c.out.join("report.ttl"))) {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        }
        fs::write(&path, serialize_turtle(&report_to_graph(&report)))
            .with_context(|| format!("cannot write {}", path.display()))?;
        say!("report: {}", path.display());
    }
    Ok(if report.conforms { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8> {
    let c = Config::resolve(cli.flags)?;
    match &cli.command {
        Command::VocabInfo => vocab_info(&c),
        Command::Check { operator } => check(&c, operator),
        Command::Apply { operator } => apply_cmd(&c, operator, &[Format::Md, Format::Json, Format::Ttl], true),
        Command::Docgen { operator } => apply_cmd(&c, operator, &[Format::Md], false),
        Command::Validate { operator, data } => validate_cmd(&c, operator, data),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
