//! The `sdsr` command line. [`dispatch`] does all the work and returns what
//! to print, so the binary is a thin wrapper and tests can drive it
//! in-process.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bench::{self, lint_questions, render_csv, render_score_table, render_table, run_benchmark, Question};
use crate::config::Config;
use crate::corpus::{
    build_doc_summary, resolve_coload, section_document, CrossReference, Ruleset, SectionRole, SectionRule,
    StructuredDocument,
};
use crate::distractor::{expand_round, RoundConfig};
use crate::guidance::{build_condition_in, build_summary_with, strip_summary, Condition, SummaryConfig};
use crate::library::{validate_library_with, KnowledgeLibrary, LibraryFormat, ValidationOptions};
use crate::prefix::{budget_report, extract_registry, scan_registry_with};
use crate::report::{Code, Finding, ValidationReport};
use crate::response::{format_selections, parse_response, SelectionSet};
use crate::retrieval::{
    apply_complements, route_tier1, select_tier2, FileSummary, LexicalBackend, RemoteBackend, RetrievalError,
    RouterBackend, RoutingRequest, Task,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BACKEND: i32 = 3;

const EXIT_CODES_HELP: &str = "Exit codes:
  0  success, no ERROR findings
  1  ERROR findings, or input that could not be read or parsed
  2  usage error
  3  backend or transport failure";

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CommandOutcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    Json,
    #[default]
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum BackendKind {
    #[default]
    Lexical,
    Remote,
}

#[derive(Debug, Parser)]
#[command(name = "sdsr", version, about = "Summary-first knowledge libraries and routing benchmarks", after_help = EXIT_CODES_HELP)]
struct Cli {
    /// Output shape on stdout.
    #[arg(long, value_enum, global = true, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a library file against the schema rules.
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
        /// Treat warnings as errors.
        #[arg(long)]
        strict: bool,
    },
    /// Build the summary block and write the library with it in front.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        hint_max: Option<usize>,
        /// JSON object of role name to category names.
        #[arg(long)]
        roles: Option<PathBuf>,
    },
    /// Remove the summary block.
    Strip {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the library artifact and system prompt for one condition.
    Condition {
        #[arg(long = "version")]
        condition: Condition,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Inject one round of distractors.
    Expand {
        #[arg(long)]
        round: u32,
        #[arg(long)]
        specs: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tier 1: pick files from a directory by their summaries.
    Route {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(long)]
        k_max: Option<usize>,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        block_size: Option<usize>,
        #[command(flatten)]
        backend: BackendArg,
    },
    /// Tier 2: pick skills from loaded libraries.
    Select {
        /// Library file; repeat to load several.
        #[arg(long = "lib", required = true)]
        libs: Vec<PathBuf>,
        #[command(flatten)]
        input: TaskInput,
        /// Replace secondaries with annotated complements.
        #[arg(long)]
        complements: bool,
        #[command(flatten)]
        backend: BackendArg,
    },
    /// Run conditions against a question set and score them.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "A,B,C,D")]
        conditions: Vec<Condition>,
        #[arg(long)]
        lib: PathBuf,
        #[arg(long)]
        questions: PathBuf,
        /// Directory for per-condition transcripts.
        #[arg(long)]
        transcripts: Option<PathBuf>,
        /// Also write the results as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        backend: BackendArg,
    },
    /// Score selections against an answer key.
    Score {
        /// JSON selection list or raw `Q#:` response text.
        #[arg(long)]
        selections: PathBuf,
        #[arg(long)]
        key: PathBuf,
    },
    /// Split a document into sections and write it with a summary.
    Structure {
        #[arg(long)]
        rules: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        doc_id: Option<String>,
        /// JSON object of section role to digest text.
        #[arg(long)]
        digests: Option<PathBuf>,
        /// JSON list of cross-references.
        #[arg(long)]
        refs: Option<PathBuf>,
    },
    /// Sections of a structured document to load for a query.
    Coload {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        query: String,
    },
}

#[derive(Debug, Args)]
struct BackendArg {
    #[arg(long, value_enum, default_value_t = BackendKind::Lexical)]
    backend: BackendKind,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct TaskInput {
    /// JSON question list.
    #[arg(long)]
    questions: Option<PathBuf>,
    /// A single free-text query, answered as question 1.
    #[arg(long)]
    query: Option<String>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Input(String),
    Backend(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Input(_) => EXIT_FINDINGS,
            CliError::Backend(_) => EXIT_BACKEND,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Backend(m) => m,
        }
    }
}

impl From<RetrievalError> for CliError {
    fn from(e: RetrievalError) -> Self {
        match e {
            RetrievalError::Backend(_) => CliError::Backend(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

/// What a command produced: a structured payload, its human rendering, and
/// findings that go to stderr.
struct Output {
    payload: Value,
    table: String,
    report: ValidationReport,
    /// Findings are already the payload, so don't repeat them on stderr.
    report_is_payload: bool,
}

impl Output {
    fn new(payload: impl Serialize, table: impl Into<String>) -> Self {
        Self {
            payload: serde_json::to_value(payload).expect("payload serializes"),
            table: table.into(),
            report: ValidationReport::default(),
            report_is_payload: false,
        }
    }

    fn with_report(mut self, report: ValidationReport) -> Self {
        self.report = report;
        self
    }
}

struct Ctx {
    config: Config,
    format: LibraryFormat,
}

impl Ctx {
    fn read(&self, path: &Path) -> Result<String, CliError> {
        fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
    }

    fn write(&self, path: &Path, text: &str) -> Result<(), CliError> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(|e| CliError::Input(format!("cannot create {}: {e}", parent.display())))?;
        }
        fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
    }

    fn json<T: serde::de::DeserializeOwned>(&self, path: &Path) -> Result<T, CliError> {
        serde_json::from_str(&self.read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    fn library(&self, path: &Path) -> Result<KnowledgeLibrary, CliError> {
        self.format.parse(&self.read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    fn backend(&self, kind: BackendKind) -> Result<Box<dyn RouterBackend>, CliError> {
        match kind {
            BackendKind::Lexical => Ok(Box::new(LexicalBackend { format: self.format.clone() })),
            BackendKind::Remote => {
                let cfg = self
                    .config
                    .remote
                    .clone()
                    .ok_or_else(|| CliError::Usage("--backend remote needs a [remote] section in --config".into()))?;
                let backend = RemoteBackend::new(cfg).map_err(|e| CliError::Backend(e.to_string()))?;
                Ok(Box::new(backend.with_format(self.format.clone())))
            }
        }
    }

    /// Writes `text` to `out` when given; otherwise it becomes the payload.
    fn emit_artifact(&self, out: Option<&Path>, text: String, lib: &KnowledgeLibrary) -> Result<Output, CliError> {
        match out {
            Some(path) => {
                self.write(path, &text)?;
                let info = json!({
                    "out": path.display().to_string(),
                    "categories": lib.categories.len(),
                    "skills": lib.total_skills(),
                    "has_summary": lib.summary.is_some(),
                });
                let table = format!(
                    "wrote {} ({} categories, {} skills)\n",
                    path.display(),
                    lib.categories.len(),
                    lib.total_skills()
                );
                Ok(Output::new(info, table))
            }
            None => {
                let value: Value = serde_json::from_str(&text).expect("own output is JSON");
                Ok(Output::new(value, text))
            }
        }
    }
}

/// Runs `sdsr` with `argv` (including the program name).
pub fn dispatch<I, T>(argv: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let json_requested = argv.windows(2).any(|w| w[0] == "--format" && w[1] == "json")
        || argv.iter().any(|a| a == "--format=json");
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    CommandOutcome { exit_code: EXIT_OK, stdout: text, stderr: String::new() }
                }
                _ => failure(&CliError::Usage(text), json_requested),
            };
        }
    };
    let format = cli.format;
    match run(cli) {
        Ok(out) => {
            let exit_code = if out.report.has_errors() { EXIT_FINDINGS } else { EXIT_OK };
            let mut stdout = match format {
                OutputFormat::Json => serde_json::to_string_pretty(&out.payload).expect("payload serializes"),
                OutputFormat::Table => out.table,
            };
            if !stdout.ends_with('\n') {
                stdout.push('\n');
            }
            let stderr = if out.report_is_payload || out.report.is_empty() { String::new() } else { out.report.to_string() };
            CommandOutcome { exit_code, stdout, stderr }
        }
        Err(e) => failure(&e, format == OutputFormat::Json),
    }
}

fn failure(e: &CliError, json_out: bool) -> CommandOutcome {
    let stdout = if json_out {
        let kind = match e {
            CliError::Usage(_) => "usage",
            CliError::Input(_) => "input",
            CliError::Backend(_) => "backend",
        };
        format!("{}\n", serde_json::to_string_pretty(&json!({ "error": kind, "message": e.message().trim_end() })).unwrap())
    } else {
        String::new()
    };
    let mut stderr = e.message().to_string();
    if !matches!(e, CliError::Usage(_)) {
        stderr = format!("error: {stderr}");
    }
    if !stderr.ends_with('\n') {
        stderr.push('\n');
    }
    CommandOutcome { exit_code: e.exit_code(), stdout, stderr }
}

fn run(cli: Cli) -> Result<Output, CliError> {
    let config = match &cli.config {
        Some(path) => Config::load(path).map_err(|e| CliError::Usage(e.to_string()))?,
        None => Config::default(),
    };
    let ctx = Ctx { format: config.format(), config };
    match cli.command {
        Command::Validate { input, strict } => cmd_validate(&ctx, &input, strict),
        Command::Summarize { input, out, hint_max, roles } => {
            cmd_summarize(&ctx, &input, out.as_deref(), hint_max, roles.as_deref())
        }
        Command::Strip { input, out } => {
            let lib = strip_summary(&ctx.library(&input)?);
            ctx.emit_artifact(out.as_deref(), ctx.format.to_string(&lib), &lib)
        }
        Command::Condition { condition, input, out_dir } => cmd_condition(&ctx, condition, &input, &out_dir),
        Command::Expand { round, specs, input, out } => cmd_expand(&ctx, round, &specs, &input, out.as_deref()),
        Command::Route { dir, query, k_max, threshold, block_size, backend } => {
            cmd_route(&ctx, &dir, query, k_max, threshold, block_size, backend.backend)
        }
        Command::Select { libs, input, complements, backend } => cmd_select(&ctx, &libs, input, complements, backend.backend),
        Command::Bench { conditions, lib, questions, transcripts, csv, backend } => {
            cmd_bench(&ctx, &conditions, &lib, &questions, transcripts.as_deref(), csv.as_deref(), backend.backend)
        }
        Command::Score { selections, key } => cmd_score(&ctx, &selections, &key),
        Command::Structure { rules, input, out, doc_id, digests, refs } => {
            cmd_structure(&ctx, &rules, &input, out.as_deref(), doc_id, digests.as_deref(), refs.as_deref())
        }
        Command::Coload { input, query } => {
            let doc: StructuredDocument = ctx.json(&input)?;
            let ids = resolve_coload(&query, &doc.summary, &doc.document);
            let table = ids.iter().map(|i| format!("{i}\n")).collect::<String>();
            Ok(Output::new(json!({ "doc_id": doc.document.doc_id, "sections": ids }), table))
        }
    }
}

fn cmd_validate(ctx: &Ctx, input: &Path, strict: bool) -> Result<Output, CliError> {
    let lib = ctx.library(input)?;
    let opts = ValidationOptions { strict, hint_max: ctx.config.summary.hint_max, ..Default::default() };
    let report = validate_library_with(&lib, &opts);
    let mut out = Output::new(&report, report.to_string()).with_report(report);
    out.report_is_payload = true;
    Ok(out)
}

fn cmd_summarize(
    ctx: &Ctx,
    input: &Path,
    out: Option<&Path>,
    hint_max: Option<usize>,
    roles: Option<&Path>,
) -> Result<Output, CliError> {
    let lib = ctx.library(input)?;
    let mut cfg: SummaryConfig = ctx.config.summary.clone();
    if let Some(h) = hint_max {
        cfg.hint_max = h;
    }
    if let Some(path) = roles {
        cfg.routing_roles = ctx.json(path)?;
    }
    let summarized = build_summary_with(&lib, &cfg).map_err(input_err)?;
    let opts = ValidationOptions { hint_max: cfg.hint_max, ..Default::default() };
    let report = validate_library_with(&summarized, &opts);
    Ok(ctx.emit_artifact(out, ctx.format.to_string(&summarized), &summarized)?.with_report(report))
}

fn cmd_condition(ctx: &Ctx, condition: Condition, input: &Path, out_dir: &Path) -> Result<Output, CliError> {
    let lib = ctx.library(input)?;
    let built = build_condition_in(&lib, condition, &ctx.config.prompts, &ctx.config.summary, &ctx.format)
        .map_err(input_err)?;
    let artifact = out_dir.join(format!("library_{condition}.json"));
    let prompt = out_dir.join(format!("prompt_{condition}.txt"));
    ctx.write(&artifact, &built.library_artifact)?;
    ctx.write(&prompt, &built.system_prompt)?;
    let payload = json!({
        "condition": condition,
        "artifact": artifact.display().to_string(),
        "prompt": prompt.display().to_string(),
        "has_summary": condition.has_summary(),
        "extended_prompt": condition.uses_extended_prompt(),
    });
    let table = format!("condition {condition}\nartifact  {}\nprompt    {}\n", artifact.display(), prompt.display());
    Ok(Output::new(payload, table))
}

fn cmd_expand(ctx: &Ctx, round: u32, specs: &Path, input: &Path, out: Option<&Path>) -> Result<Output, CliError> {
    let cfg: RoundConfig = ctx.json(specs)?;
    if cfg.round_id != round {
        return Err(CliError::Usage(format!("--round {round} does not match round_id {} in {}", cfg.round_id, specs.display())));
    }
    let lib = ctx.library(input)?;
    let outcome = expand_round(&lib, &cfg).map_err(input_err)?;
    Ok(ctx.emit_artifact(out, ctx.format.to_string(&outcome.library), &outcome.library)?.with_report(outcome.report))
}

#[allow(clippy::too_many_arguments)]
fn cmd_route(
    ctx: &Ctx,
    dir: &Path,
    query: String,
    k_max: Option<usize>,
    threshold: Option<f64>,
    block_size: Option<usize>,
    kind: BackendKind,
) -> Result<Output, CliError> {
    let routing = &ctx.config.routing;
    let mut opts = routing.prefix_options();
    if let Some(b) = block_size {
        if b == 0 {
            return Err(CliError::Usage("--block-size must be positive".into()));
        }
        opts.block_size = b;
    }
    let registry = scan_registry_with(dir, &routing.extension).map_err(input_err)?;
    let mut report = ValidationReport::default();
    let mut summaries = Vec::new();
    for (file_id, result) in extract_registry(&registry, opts) {
        match result {
            Ok(r) => {
                if r.summary_not_first {
                    report.push(Finding::warning(Code::SummaryNotFirst, format!("`{file_id}`: summary is not the first key")));
                }
                summaries.push(FileSummary::new(file_id, r.summary));
            }
            Err(e) => report.push(Finding::warning(Code::SummaryNotFirst, format!("`{file_id}` skipped: {e}"))),
        }
    }
    let estimates: Vec<(String, usize)> = summaries.iter().map(|s| (s.file_id.clone(), s.token_estimate())).collect();
    report.extend(budget_report(&estimates, routing.summary_budget));
    let mut req = RoutingRequest::new(query, summaries);
    req.k_max = k_max.unwrap_or(routing.k_max);
    req.threshold = threshold.unwrap_or(routing.threshold);
    if req.k_max == 0 {
        return Err(CliError::Usage("--k-max must be at least 1".into()));
    }
    let backend = ctx.backend(kind)?;
    let result = route_tier1(&req, backend.as_ref())?;
    Ok(Output::new(&result, result.to_string()).with_report(report))
}

fn cmd_select(
    ctx: &Ctx,
    libs: &[PathBuf],
    input: TaskInput,
    complements: bool,
    kind: BackendKind,
) -> Result<Output, CliError> {
    let loaded = libs.iter().map(|p| ctx.library(p)).collect::<Result<Vec<_>, _>>()?;
    let tasks: Vec<Task> = match (input.questions, input.query) {
        (Some(path), _) => bench::tasks(&ctx.json::<Vec<Question>>(&path)?),
        (None, Some(q)) => vec![Task::new(1, q)],
        (None, None) => unreachable!("clap requires one of --questions and --query"),
    };
    let backend = ctx.backend(kind)?;
    let outcome = select_tier2(&tasks, &loaded, backend.as_ref())?;
    let mut selections = outcome.selections.clone();
    if complements {
        let merged = KnowledgeLibrary::new(loaded.iter().flat_map(|l| l.categories.iter().cloned()).collect());
        selections = apply_complements(&selections, &merged)?;
    }
    let payload = json!({
        "selections": selections,
        "backend_selections": outcome.selections,
        "stripped": outcome.stripped,
    });
    Ok(Output::new(payload, format_selections(&selections)).with_report(outcome.report))
}

fn cmd_bench(
    ctx: &Ctx,
    conditions: &[Condition],
    lib: &Path,
    questions: &Path,
    transcripts: Option<&Path>,
    csv: Option<&Path>,
    kind: BackendKind,
) -> Result<Output, CliError> {
    let library = ctx.library(lib)?;
    let questions: Vec<Question> = ctx.json(questions)?;
    let report = lint_questions(&questions);
    let built = conditions
        .iter()
        .map(|&c| build_condition_in(&library, c, &ctx.config.prompts, &ctx.config.summary, &ctx.format))
        .collect::<Result<Vec<_>, _>>()
        .map_err(input_err)?;
    let backend = ctx.backend(kind)?;
    let runs = run_benchmark(&built, &questions, backend.as_ref()).map_err(input_err)?;
    if let Some(dir) = transcripts {
        bench::write_transcripts(dir, &runs).map_err(input_err)?;
    }
    if let Some(path) = csv {
        ctx.write(path, &render_csv(&runs))?;
    }
    let payload: Vec<Value> = runs
        .iter()
        .map(|r| json!({ "condition": r.condition, "backend": r.backend, "report": r.report, "error": r.error }))
        .collect();
    let out = Output::new(payload, render_table(&runs)).with_report(report);
    if runs.iter().all(|r| r.failed()) {
        let msg = runs.iter().filter_map(|r| r.error.as_deref()).next().unwrap_or("every condition failed");
        return Err(CliError::Backend(msg.to_string()));
    }
    Ok(out)
}

fn cmd_score(ctx: &Ctx, selections: &Path, key: &Path) -> Result<Output, CliError> {
    let key: Vec<Question> = ctx.json(key)?;
    let text = ctx.read(selections)?;
    let mut report = ValidationReport::default();
    let set: SelectionSet = match serde_json::from_str(&text) {
        Ok(set) => set,
        Err(_) => {
            let max_id = key.iter().map(|q| q.id as usize).max().unwrap_or(0);
            let parsed = parse_response(&text, max_id);
            for issue in &parsed.issues {
                report.push(Finding::warning(Code::InvalidSelection, issue.to_string()));
            }
            parsed.selections
        }
    };
    let scored = bench::score_responses(&set, &key).map_err(input_err)?;
    Ok(Output::new(&scored, render_score_table(&scored)).with_report(report))
}

fn cmd_structure(
    ctx: &Ctx,
    rules: &Path,
    input: &Path,
    out: Option<&Path>,
    doc_id: Option<String>,
    digests: Option<&Path>,
    refs: Option<&Path>,
) -> Result<Output, CliError> {
    let rules: Vec<SectionRule> = ctx.json(rules)?;
    let ruleset = Ruleset::new(&rules).map_err(input_err)?;
    let text = ctx.read(input)?;
    let doc_id = doc_id.unwrap_or_else(|| {
        input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "document".into())
    });
    let doc = section_document(&doc_id, &text, &ruleset).map_err(input_err)?;
    let digests: BTreeMap<SectionRole, String> = match digests {
        Some(p) => ctx.json(p)?,
        None => BTreeMap::new(),
    };
    let refs: Vec<CrossReference> = match refs {
        Some(p) => ctx.json(p)?,
        None => Vec::new(),
    };
    let (summary, report) = build_doc_summary(&doc, &digests, &refs, ctx.config.corpus.token_budget).map_err(input_err)?;
    let structured = StructuredDocument { summary, document: doc };
    let body = serde_json::to_string_pretty(&structured).expect("document serializes") + "\n";
    let table: String = structured
        .document
        .sections
        .iter()
        .map(|s| format!("{:<14} {:<10} {}..{}\n", s.section_id, s.role, s.char_span.0, s.char_span.1))
        .collect();
    match out {
        Some(path) => {
            ctx.write(path, &body)?;
            let payload = json!({ "out": path.display().to_string(), "sections": structured.document.sections.len(), "token_estimate": structured.summary.token_estimate });
            Ok(Output::new(payload, format!("{table}wrote {}\n", path.display())).with_report(report))
        }
        None => Ok(Output::new(&structured, body).with_report(report)),
    }
}
