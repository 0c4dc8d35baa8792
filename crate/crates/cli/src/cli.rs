use std::fs;
use std::io::{self, Read, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use contribkit::analytics::{compare, stats, StatsOptions, DEFAULT_MIN_COMMON};
use contribkit::diagnostics::{has_errors, Diagnostic};
use contribkit::export::{export_with_base, Format, DEFAULT_BASE_IRI};
use contribkit::model::{AnnotationDocument, TaskLabel, UnitKind};
use contribkit::store::{ContributionGraph, Filter};
use contribkit::triplify::flatten_with;
use contribkit::validate::{check, Profile};
use contribkit::Error;

/// When set, names the store directory regardless of `--store`.
pub const STORE_ENV: &str = "CONTRIBKIT_STORE";

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "contribkit", version, about = "Validate, triplify, store and compare contribution annotations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check annotation files and print their diagnostics.
    Validate(ValidateArgs),
    /// Flatten annotation files into triples.
    Triplify(TriplifyArgs),
    /// Add annotation files to a store, replacing papers already there.
    Ingest(IngestArgs),
    /// Corpus statistics over a store.
    Stats(StatsArgs),
    /// Tabulate the properties papers share under one unit.
    Compare(CompareArgs),
    /// Export stored triples.
    Export(ExportArgs),
    /// Serve the HTTP API over a store snapshot.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct StoreArgs {
    /// Store directory.
    #[arg(long, default_value = "contribkit-store")]
    pub store: PathBuf,
}

impl StoreArgs {
    pub fn dir(&self) -> PathBuf {
        match std::env::var_os(STORE_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.store.clone(),
        }
    }
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Annotation files; "-" reads standard input.
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    /// Fail on warnings too.
    #[arg(long)]
    pub strict: bool,
    /// Do not require the mandatory units.
    #[arg(long)]
    pub fragment: bool,
}

#[derive(Debug, Args)]
pub struct TriplifyArgs {
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    /// ntriples, csv or jsonl.
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    pub format: Format,
    /// Directory receiving one `<stem>.<ext>` file per input; standard
    /// output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub fragment: bool,
    #[arg(long, default_value = DEFAULT_BASE_IRI)]
    pub base_iri: String,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub store: StoreArgs,
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    /// Task label to record for every ingested paper.
    #[arg(long, value_parser = parse_task)]
    pub task: Option<TaskLabel>,
    #[arg(long)]
    pub fragment: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Markdown,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub store: StoreArgs,
    /// Only papers with this task label.
    #[arg(long, value_parser = parse_task)]
    pub task: Option<TaskLabel>,
    /// Keep predicates seen more than this many times.
    #[arg(long, default_value_t = 0)]
    pub min_count: usize,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub exclude_root: bool,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub exclude_evidence: bool,
    /// Print only the predicate frequency table.
    #[arg(long)]
    pub predicates: bool,
    #[arg(long, value_enum, default_value_t = Output::Markdown)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub store: StoreArgs,
    #[arg(long, value_parser = parse_unit)]
    pub unit: UnitKind,
    /// Comma-separated paper ids; every stored paper when absent.
    #[arg(long, value_delimiter = ',')]
    pub ids: Vec<String>,
    #[arg(long, value_parser = parse_task)]
    pub task: Option<TaskLabel>,
    #[arg(long, default_value_t = DEFAULT_MIN_COMMON)]
    pub min_common: usize,
    #[arg(long, value_enum, default_value_t = Output::Markdown)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub store: StoreArgs,
    #[arg(long, default_value = "ntriples", value_parser = parse_format)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub paper: Option<String>,
    #[arg(long, value_parser = parse_unit)]
    pub unit: Option<UnitKind>,
    #[arg(long)]
    pub predicate: Option<String>,
    #[arg(long)]
    pub subject: Option<String>,
    #[arg(long, value_parser = parse_task)]
    pub task: Option<TaskLabel>,
    #[arg(long, default_value = DEFAULT_BASE_IRI)]
    pub base_iri: String,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub store: StoreArgs,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_unit(s: &str) -> Result<UnitKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_task(s: &str) -> Result<TaskLabel, String> {
    match TaskLabel::from_label(s) {
        TaskLabel::Other if !s.eq_ignore_ascii_case("other") => {
            Err(format!("unknown task {s:?} (expected MT, NER, QA, RC, TC or other)"))
        }
        task => Ok(task),
    }
}

fn profile(fragment: bool) -> Profile {
    if fragment {
        Profile::Fragment
    } else {
        Profile::Complete
    }
}

/// Exit status for a library error.
pub fn exit_code(error: &Error) -> u8 {
    match error {
        Error::InvalidDocument(_)
        | Error::UnknownPaper(_)
        | Error::InconsistentPaths(_)
        | Error::MissingPaperId => EXIT_INVALID,
        _ => EXIT_USAGE,
    }
}

/// Runs one command, writing results to `out` and complaints to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let result = match cli.command {
        Command::Validate(args) => Ok(validate(&args, out, err)),
        Command::Triplify(args) => triplify(&args, out, err),
        Command::Ingest(args) => ingest(&args, out, err),
        Command::Stats(args) => stats_cmd(&args, out),
        Command::Compare(args) => compare_cmd(&args, out),
        Command::Export(args) => export_cmd(&args, out),
        Command::Serve(args) => serve(&args, err),
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, message)) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

pub struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(exit_code(&e), e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn read_input(path: &Path) -> io::Result<String> {
    if path == Path::new("-") {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        fs::read_to_string(path)
    }
}

fn print_diagnostics(out: &mut dyn Write, file: &Path, diagnostics: &[Diagnostic]) -> io::Result<()> {
    for d in diagnostics {
        writeln!(out, "{}\t{}\t{}\t{}\t{}", d.severity, d.code, file.display(), d.path, d.message)?;
    }
    Ok(())
}

enum Loaded {
    Ready(AnnotationDocument),
    Failed(u8),
}

/// Reads and checks one input, reporting problems to `err`.
fn load_document(path: &Path, profile: Profile, err: &mut dyn Write) -> io::Result<Loaded> {
    let text = match read_input(path) {
        Ok(text) => text,
        Err(e) => {
            writeln!(err, "error: {}: {e}", path.display())?;
            return Ok(Loaded::Failed(EXIT_USAGE));
        }
    };
    let (doc, diagnostics) = check(&text, profile);
    match doc {
        None => {
            print_diagnostics(err, path, &diagnostics)?;
            Ok(Loaded::Failed(EXIT_USAGE))
        }
        Some(_) if has_errors(&diagnostics) => {
            writeln!(err, "INVALID_DOCUMENT\t{}", path.display())?;
            print_diagnostics(err, path, &diagnostics)?;
            Ok(Loaded::Failed(EXIT_INVALID))
        }
        Some(doc) => Ok(Loaded::Ready(doc)),
    }
}

fn validate(args: &ValidateArgs, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let mut code = EXIT_OK;
    for path in &args.paths {
        let text = match read_input(path) {
            Ok(text) => text,
            Err(e) => {
                let _ = writeln!(err, "error: {}: {e}", path.display());
                code = code.max(EXIT_USAGE);
                continue;
            }
        };
        let (doc, diagnostics) = check(&text, profile(args.fragment));
        let _ = print_diagnostics(out, path, &diagnostics);
        if doc.is_none() {
            code = code.max(EXIT_USAGE);
        } else if has_errors(&diagnostics) || (args.strict && !diagnostics.is_empty()) {
            code = code.max(EXIT_INVALID);
        }
    }
    code
}

fn triplify(args: &TriplifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
    }
    let mut code = EXIT_OK;
    for path in &args.paths {
        let doc = match load_document(path, profile(args.fragment), err)? {
            Loaded::Ready(doc) => doc,
            Loaded::Failed(c) => {
                code = code.max(c);
                continue;
            }
        };
        let triples = flatten_with(&doc, profile(args.fragment))?;
        let bytes = export_with_base(&triples, args.format, &args.base_iri)?;
        match &args.out {
            Some(dir) => {
                let stem = path.file_stem().map_or("stdin".into(), |s| s.to_string_lossy());
                fs::write(dir.join(format!("{stem}.{}", args.format.extension())), bytes)?;
            }
            None => out.write_all(&bytes)?,
        }
    }
    Ok(code)
}

fn ingest(args: &IngestArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let dir = args.store.dir();
    let mut graph = ContributionGraph::load(&dir)?;
    let mut code = EXIT_OK;
    let mut changed = false;
    for path in &args.paths {
        let mut doc = match load_document(path, profile(args.fragment), err)? {
            Loaded::Ready(doc) => doc,
            Loaded::Failed(c) => {
                code = code.max(c);
                continue;
            }
        };
        if let Some(task) = args.task {
            doc.paper.task_label = task;
        }
        match graph.ingest_with(&doc, profile(args.fragment)) {
            Ok(report) => {
                changed = true;
                let verb = if report.replaced { "replaced" } else { "added" };
                writeln!(out, "{verb}\t{}\t{} triples", report.paper_id, report.triples)?;
            }
            Err(e) => {
                writeln!(err, "error: {}: {e}", path.display())?;
                code = code.max(exit_code(&e));
            }
        }
    }
    if changed {
        graph.save(&dir)?;
    }
    Ok(code)
}

fn open_store(store: &StoreArgs, task: Option<TaskLabel>) -> Result<ContributionGraph, Failure> {
    let graph = ContributionGraph::load(store.dir())?;
    Ok(match task {
        Some(task) => graph.subgraph(|p| p.task_label == task),
        None => graph,
    })
}

fn json_line(value: &impl serde::Serialize) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Failure(EXIT_USAGE, e.to_string()))
}

fn stats_cmd(args: &StatsArgs, out: &mut dyn Write) -> Outcome {
    let graph = open_store(&args.store, args.task)?;
    let options = StatsOptions {
        min_count: args.min_count,
        exclude_root: args.exclude_root,
        exclude_evidence: args.exclude_evidence,
    };
    let report = stats(&graph, options);
    let bytes = match (args.output, args.predicates) {
        (Output::Json, false) => json_line(&report)?.into_bytes(),
        (Output::Json, true) => json_line(&report.predicate_frequencies)?.into_bytes(),
        (Output::Csv, false) => report.to_csv()?,
        (Output::Csv, true) => report.frequencies_csv()?,
        (Output::Markdown, false) => report.to_markdown().into_bytes(),
        (Output::Markdown, true) => report.frequencies_markdown().into_bytes(),
    };
    out.write_all(&bytes)?;
    Ok(EXIT_OK)
}

fn compare_cmd(args: &CompareArgs, out: &mut dyn Write) -> Outcome {
    let graph = open_store(&args.store, args.task)?;
    let ids: Vec<String> = if args.ids.is_empty() {
        graph.papers().map(|p| p.paper_id.clone()).collect()
    } else {
        args.ids.iter().map(|s| s.trim().to_string()).collect()
    };
    let table = compare(&graph, args.unit, &ids, args.min_common)?;
    let bytes = match args.output {
        Output::Json => json_line(&table)?.into_bytes(),
        Output::Csv => table.to_csv()?,
        Output::Markdown => table.to_markdown().into_bytes(),
    };
    out.write_all(&bytes)?;
    Ok(EXIT_OK)
}

fn export_cmd(args: &ExportArgs, out: &mut dyn Write) -> Outcome {
    let graph = open_store(&args.store, args.task)?;
    if let Some(paper) = &args.paper {
        if graph.paper(paper).is_none() {
            return Err(Error::UnknownPaper(paper.clone()).into());
        }
    }
    let filter = Filter {
        paper_id: args.paper.clone(),
        unit: args.unit,
        predicate: args.predicate.clone(),
        subject: args.subject.clone(),
    };
    let triples: Vec<_> = graph.query(&filter).into_iter().cloned().collect();
    let bytes = export_with_base(&triples, args.format, &args.base_iri)?;
    match &args.out {
        Some(path) => fs::write(path, bytes)?,
        None => out.write_all(&bytes)?,
    }
    Ok(EXIT_OK)
}

fn serve(args: &ServeArgs, err: &mut dyn Write) -> Outcome {
    let graph = ContributionGraph::load(args.store.dir())?;
    let addr = SocketAddr::new(args.host, args.port);
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr).await?;
        writeln!(err, "listening on http://{}", listener.local_addr()?)?;
        crate::server::serve(listener, graph).await
    })?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Command {
        Cli::try_parse_from(std::iter::once("contribkit").chain(args.iter().copied()))
            .unwrap()
            .command
    }

    #[test]
    fn boolean_toggles_take_values() {
        let Command::Stats(args) = parse(&["stats", "--exclude-root", "false", "--min-count", "15"]) else {
            panic!("not stats");
        };
        assert!(!args.exclude_root);
        assert!(args.exclude_evidence);
        assert_eq!(args.min_count, 15);
        let Command::Stats(args) = parse(&["stats", "--exclude-evidence=false"]) else {
            panic!("not stats");
        };
        assert!(args.exclude_root);
        assert!(!args.exclude_evidence);
    }

    #[test]
    fn units_and_ids() {
        let Command::Compare(args) = parse(&["compare", "--unit", "experimental results", "--ids", "a,b"]) else {
            panic!("not compare");
        };
        assert_eq!(args.unit, UnitKind::Results);
        assert_eq!(args.ids, ["a", "b"]);
        assert_eq!(args.min_common, DEFAULT_MIN_COMMON);
        assert!(Cli::try_parse_from(["contribkit", "compare", "--unit", "Acknowledgements"]).is_err());
    }

    #[test]
    fn task_labels() {
        assert_eq!(parse_task("ner"), Ok(TaskLabel::NamedEntityRecognition));
        assert_eq!(parse_task("relation classification"), Ok(TaskLabel::RelationClassification));
        assert_eq!(parse_task("other"), Ok(TaskLabel::Other));
        assert!(parse_task("summarization").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::UnknownPaper("x".into())), EXIT_INVALID);
        assert_eq!(exit_code(&Error::UnsupportedFormat("xml".into())), EXIT_USAGE);
        assert_eq!(exit_code(&Error::CorruptStore("x".into())), EXIT_USAGE);
    }
}
