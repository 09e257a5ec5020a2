//! Two-tier retrieval: summary-prefix routing over a file registry, then
//! skill selection over the loaded libraries.

mod lexical;
mod remote;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::library::{Category, KnowledgeLibrary, SummaryBlock};
use crate::prefix::estimate_tokens;
use crate::report::{Code, Finding, ValidationReport};
use crate::response::{QuestionSelection, Selection, SelectionSet};

pub use lexical::{lexical_score, summary_score, LexicalBackend, LexicalEntry, LexicalTarget, TokenProfile};
pub use remote::{RemoteBackend, RemoteConfig, API_KEY_ENV};

pub const DEFAULT_K_MAX: usize = 3;
pub const DEFAULT_THRESHOLD: f64 = 0.05;

#[derive(Debug, thiserror::Error)]
pub enum BackendError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("request timed out")]
    Timeout,
    #[error("endpoint returned status {status}: {body}")]
    Status { status: u16, body: String },
    #[error("unusable response: {0}")]
    BadResponse(String),
    #[error("library artifact could not be read: {0}")]
    Artifact(String),
}

#[derive(Debug, thiserror::Error)]
pub enum RetrievalError {
    #[error("no file summaries to route over")]
    NoFiles,
    #[error("k_max must be at least 1")]
    ZeroK,
    #[error("no libraries loaded")]
    EmptyLoadSet,
    #[error("every selection named a category or skill absent from the loaded libraries")]
    AllSelectionsInvalid,
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
    #[error("category `{category}` names missing complement `{complement}`")]
    DanglingComplement { category: String, complement: String },
    #[error(transparent)]
    Backend(#[from] BackendError),
}

/// A file's extracted summary, as seen by the Tier-1 router.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileSummary {
    pub file_id: String,
    pub summary: SummaryBlock,
}

impl FileSummary {
    pub fn new(file_id: impl Into<String>, summary: SummaryBlock) -> Self {
        Self { file_id: file_id.into(), summary }
    }

    pub fn token_estimate(&self) -> usize {
        estimate_tokens(&self.summary.to_compact_json())
    }
}

#[derive(Debug, Clone)]
pub struct RoutingRequest {
    pub query: String,
    pub summaries: Vec<FileSummary>,
    pub k_max: usize,
    pub threshold: f64,
}

impl RoutingRequest {
    pub fn new(query: impl Into<String>, summaries: Vec<FileSummary>) -> Self {
        Self { query: query.into(), summaries, k_max: DEFAULT_K_MAX, threshold: DEFAULT_THRESHOLD }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredFile {
    pub file_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingResult {
    pub selected: Vec<ScoredFile>,
    pub expanded_scope: bool,
    pub trace: Vec<String>,
    /// Tokens placed in front of the router: every summary plus the query.
    pub tier1_tokens: usize,
}

/// One question or task put to the selector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Task {
    pub id: u32,
    pub text: String,
}

impl Task {
    pub fn new(id: u32, text: impl Into<String>) -> Self {
        Self { id, text: text.into() }
    }
}

/// A complete single-turn exchange: system prompt, library artifact and the
/// task list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conversation {
    pub system_prompt: String,
    pub artifact: String,
    pub tasks: Vec<Task>,
}

pub const RESPONSE_FORMAT_LINE: &str = "Answer with one line per question: `Q<number>: category_name | skill_name`, optionally followed by `; category_name | skill_name` for a second selection.";

impl Conversation {
    /// The user turn: library artifact, then the numbered questions, then the
    /// answer format.
    pub fn user_message(&self) -> String {
        let mut out = String::with_capacity(self.artifact.len() + 64 * self.tasks.len());
        out.push_str(&self.artifact);
        if !self.artifact.ends_with('\n') {
            out.push('\n');
        }
        out.push_str("\nQuestions:\n");
        for t in &self.tasks {
            out.push_str(&format!("Q{:02}: {}\n", t.id, t.text));
        }
        out.push('\n');
        out.push_str(RESPONSE_FORMAT_LINE);
        out.push('\n');
        out
    }
}

/// The two decisions a router makes. Implementations that are not
/// reproducible given identical inputs must say so via `deterministic`.
pub trait RouterBackend: Sync {
    fn name(&self) -> &str;

    fn deterministic(&self) -> bool;

    /// Scores for some or all of `summaries`. Files left out count as 0.
    fn route(&self, query: &str, summaries: &[FileSummary]) -> Result<Vec<ScoredFile>, BackendError>;

    /// Picks up to two selections per task from the loaded libraries.
    fn select(&self, tasks: &[Task], loaded: &[KnowledgeLibrary]) -> Result<SelectionSet, BackendError>;

    /// Answers a full conversation with raw response text.
    fn respond(&self, conversation: &Conversation) -> Result<String, BackendError>;
}

fn rank(scored: &mut [ScoredFile]) {
    scored.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.file_id.cmp(&b.file_id)));
}

/// Tier 1: keep the best `k_max` files that reach the threshold, or the best
/// `k_max` overall when none do.
pub fn route_tier1(req: &RoutingRequest, backend: &dyn RouterBackend) -> Result<RoutingResult, RetrievalError> {
    if req.summaries.is_empty() {
        return Err(RetrievalError::NoFiles);
    }
    if req.k_max == 0 {
        return Err(RetrievalError::ZeroK);
    }
    let returned = backend.route(&req.query, &req.summaries)?;
    let mut scored: Vec<ScoredFile> = req
        .summaries
        .iter()
        .map(|s| {
            let score = returned
                .iter()
                .filter(|r| r.file_id == s.file_id)
                .map(|r| if r.score.is_nan() { 0.0 } else { r.score })
                .fold(0.0, f64::max);
            ScoredFile { file_id: s.file_id.clone(), score }
        })
        .collect();
    rank(&mut scored);

    let tier1_tokens =
        req.summaries.iter().map(FileSummary::token_estimate).sum::<usize>() + estimate_tokens(&req.query);
    let mut trace = Vec::new();
    let passing: Vec<ScoredFile> =
        scored.iter().filter(|f| f.score >= req.threshold).take(req.k_max).cloned().collect();
    trace.push(format!(
        "pass 1: {} of {} files at or above threshold {}",
        scored.iter().filter(|f| f.score >= req.threshold).count(),
        scored.len(),
        req.threshold
    ));
    if !passing.is_empty() {
        return Ok(RoutingResult { selected: passing, expanded_scope: false, trace, tier1_tokens });
    }
    let selected: Vec<ScoredFile> = scored.into_iter().take(req.k_max).collect();
    trace.push(format!("pass 2: expanded scope, returning top {} regardless of threshold", selected.len()));
    Ok(RoutingResult { selected, expanded_scope: true, trace, tier1_tokens })
}

/// A selection removed by the hallucination guard.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrippedSelection {
    pub question_id: u32,
    pub selection: Selection,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Tier2Outcome {
    pub selections: SelectionSet,
    pub stripped: Vec<StrippedSelection>,
    pub report: ValidationReport,
}

fn exists(loaded: &[KnowledgeLibrary], sel: &Selection) -> bool {
    loaded.iter().any(|l| l.has_skill(&sel.category, &sel.skill))
}

/// Drops every selection that names a (category, skill) pair absent from
/// `loaded`. A surviving secondary is promoted when the primary is dropped.
pub fn guard_selections(raw: &SelectionSet, loaded: &[KnowledgeLibrary]) -> Tier2Outcome {
    let mut out = Tier2Outcome::default();
    for qs in raw.iter() {
        let mut kept = Vec::with_capacity(2);
        for sel in std::iter::once(&qs.primary).chain(qs.secondary.as_ref()) {
            if exists(loaded, sel) {
                kept.push(sel.clone());
            } else {
                out.report.push(Finding::warning(
                    Code::InvalidSelection,
                    format!("Q{:02}: `{} | {}` is not in the loaded libraries", qs.question_id, sel.category, sel.skill),
                ));
                out.stripped.push(StrippedSelection { question_id: qs.question_id, selection: sel.clone() });
            }
        }
        let mut kept = kept.into_iter();
        if let Some(primary) = kept.next() {
            out.selections.insert(QuestionSelection { question_id: qs.question_id, primary, secondary: kept.next() });
        }
    }
    out
}

/// Tier 2: ask the backend for selections and pass them through the
/// hallucination guard.
pub fn select_tier2(
    tasks: &[Task],
    loaded: &[KnowledgeLibrary],
    backend: &dyn RouterBackend,
) -> Result<Tier2Outcome, RetrievalError> {
    if loaded.is_empty() {
        return Err(RetrievalError::EmptyLoadSet);
    }
    let raw = backend.select(tasks, loaded)?;
    let outcome = guard_selections(&raw, loaded);
    if !raw.is_empty() && outcome.selections.is_empty() {
        return Err(RetrievalError::AllSelectionsInvalid);
    }
    Ok(outcome)
}

/// The complement annotation of `primary_category`, checked against `lib`.
pub fn resolve_complement(lib: &KnowledgeLibrary, primary_category: &str) -> Result<Option<String>, RetrievalError> {
    let cat = lib.category(primary_category).ok_or_else(|| RetrievalError::UnknownCategory(primary_category.to_string()))?;
    match &cat.complement {
        None => Ok(None),
        Some(c) if lib.contains(c) => Ok(Some(c.clone())),
        Some(c) => Err(RetrievalError::DanglingComplement { category: cat.name.clone(), complement: c.clone() }),
    }
}

/// Replaces each secondary with the primary category's complement where one
/// is annotated. The complement's first skill stands in as the skill. The
/// input set is left untouched so both variants can be scored.
pub fn apply_complements(set: &SelectionSet, lib: &KnowledgeLibrary) -> Result<SelectionSet, RetrievalError> {
    let mut out = SelectionSet::new();
    for qs in set.iter() {
        let mut next = qs.clone();
        if lib.contains(&qs.primary.category) {
            if let Some(c) = resolve_complement(lib, &qs.primary.category)? {
                let skill = lib.category(&c).and_then(|cat| cat.skills.first()).map(|s| s.name.clone()).unwrap_or_default();
                next.secondary = Some(Selection::new(c, skill));
            }
        }
        out.insert(next);
    }
    Ok(out)
}

/// The category other than `exclude` that best matches `query` by
/// [`lexical_score`], earliest name first on ties. `None` when nothing shares
/// a token with the query.
pub fn nearest_other_category<'a>(lib: &'a KnowledgeLibrary, query: &str, exclude: &str) -> Option<&'a Category> {
    let q = crate::text::content_token_set(query);
    lib.categories
        .iter()
        .filter(|c| c.name != exclude)
        .map(|c| (TokenProfile::of(c).score(&q), c))
        .filter(|(s, _)| *s > 0.0)
        .reduce(|a, b| match b.0.total_cmp(&a.0) {
            std::cmp::Ordering::Greater => b,
            std::cmp::Ordering::Equal if b.1.name < a.1.name => b,
            _ => a,
        })
        .map(|(_, c)| c)
}

/// Replaces each secondary with the category most similar to the task text,
/// other than the primary. This is the no-annotation baseline for
/// [`apply_complements`].
pub fn similarity_secondaries(set: &SelectionSet, tasks: &[Task], lib: &KnowledgeLibrary) -> SelectionSet {
    set.iter()
        .map(|qs| {
            let mut next = qs.clone();
            next.secondary = tasks
                .iter()
                .find(|t| t.id == qs.question_id)
                .and_then(|t| nearest_other_category(lib, &t.text, &qs.primary.category))
                .map(|c| Selection::new(c.name.clone(), c.skills.first().map(|s| s.name.clone()).unwrap_or_default()));
            next
        })
        .collect()
}

impl fmt::Display for RoutingResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.selected {
            writeln!(f, "{:<40} {:.4}", s.file_id, s.score)?;
        }
        writeln!(f, "expanded_scope: {}", self.expanded_scope)?;
        writeln!(f, "tier1_tokens: {}", self.tier1_tokens)?;
        for t in &self.trace {
            writeln!(f, "# {t}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guidance::build_summary;

    fn lib(cats: &[(&str, &str, &[&str])]) -> KnowledgeLibrary {
        let l = KnowledgeLibrary::new(
            cats.iter()
                .map(|(n, d, skills)| {
                    let mut c = Category::new(*n, *d);
                    for s in *skills {
                        c = c.with_skill(*s, format!("{s} work"));
                    }
                    c
                })
                .collect(),
        );
        build_summary(&l, 100).unwrap()
    }

    fn file(id: &str, l: &KnowledgeLibrary) -> FileSummary {
        FileSummary::new(id, l.summary.clone().unwrap())
    }

    #[test]
    fn routes_to_the_only_overlapping_file() {
        let f1 = lib(&[("Alpha_Ledger", "bookkeeping entries", &["Post"])]);
        let f2 = lib(&[("Lunar_Tides", "ocean tide tables", &["Chart"])]);
        let f3 = lib(&[("Glass_Blowing", "furnace craft", &["Shape"])]);
        let req = RoutingRequest::new("predict the ocean tide", vec![file("file1", &f1), file("file2", &f2), file("file3", &f3)]);
        let r = route_tier1(&req, &LexicalBackend::new()).unwrap();
        assert_eq!(r.selected.len(), 1);
        assert_eq!(r.selected[0].file_id, "file2");
        assert!(!r.expanded_scope);
        assert_eq!(r.trace.len(), 1);
    }

    #[test]
    fn zero_overlap_expands_scope() {
        let f1 = lib(&[("Alpha_Ledger", "bookkeeping entries", &["Post"])]);
        let req = RoutingRequest::new("volcanic basalt", vec![file("only", &f1)]);
        let r = route_tier1(&req, &LexicalBackend::new()).unwrap();
        assert_eq!(r.selected[0].file_id, "only");
        assert!(r.expanded_scope);
        assert_eq!(r.trace.len(), 2);
    }

    #[test]
    fn empty_registry() {
        let req = RoutingRequest::new("q", vec![]);
        assert!(matches!(route_tier1(&req, &LexicalBackend::new()), Err(RetrievalError::NoFiles)));
    }

    struct Liar;
    impl RouterBackend for Liar {
        fn name(&self) -> &str {
            "liar"
        }
        fn deterministic(&self) -> bool {
            true
        }
        fn route(&self, _: &str, _: &[FileSummary]) -> Result<Vec<ScoredFile>, BackendError> {
            Ok(vec![])
        }
        fn select(&self, tasks: &[Task], _: &[KnowledgeLibrary]) -> Result<SelectionSet, BackendError> {
            Ok(tasks
                .iter()
                .map(|t| QuestionSelection {
                    question_id: t.id,
                    primary: Selection::new("Imaginary", "Nothing"),
                    secondary: if t.id == 1 { Some(Selection::new("Alpha_Ledger", "Post")) } else { None },
                })
                .collect())
        }
        fn respond(&self, _: &Conversation) -> Result<String, BackendError> {
            Ok(String::new())
        }
    }

    #[test]
    fn hallucinated_selection_is_stripped() {
        let l = lib(&[("Alpha_Ledger", "bookkeeping", &["Post"])]);
        let out = select_tier2(&[Task::new(1, "x"), Task::new(2, "y")], std::slice::from_ref(&l), &Liar).unwrap();
        assert_eq!(out.selections.len(), 1);
        let q1 = out.selections.get(1).unwrap();
        assert_eq!(q1.primary, Selection::new("Alpha_Ledger", "Post"));
        assert_eq!(q1.secondary, None);
        assert_eq!(out.stripped.len(), 2);
        assert!(out.report.has_code(Code::InvalidSelection));
    }

    #[test]
    fn all_invalid_is_an_error() {
        let l = lib(&[("Alpha_Ledger", "bookkeeping", &["Post"])]);
        let r = select_tier2(&[Task::new(2, "y")], std::slice::from_ref(&l), &Liar);
        assert!(matches!(r, Err(RetrievalError::AllSelectionsInvalid)));
        assert!(matches!(select_tier2(&[], &[], &Liar), Err(RetrievalError::EmptyLoadSet)));
    }

    #[test]
    fn complements() {
        let mut l = lib(&[("A", "a", &["x"]), ("B", "b", &["y", "z"]), ("C", "c", &["w"])]);
        l.categories[0].complement = Some("B".into());
        assert_eq!(resolve_complement(&l, "A").unwrap(), Some("B".to_string()));
        assert_eq!(resolve_complement(&l, "C").unwrap(), None);
        assert!(matches!(resolve_complement(&l, "Q"), Err(RetrievalError::UnknownCategory(_))));
        l.categories[2].complement = Some("Gone".into());
        assert!(matches!(resolve_complement(&l, "C"), Err(RetrievalError::DanglingComplement { .. })));

        let set: SelectionSet =
            [QuestionSelection { question_id: 1, primary: Selection::new("A", "x"), secondary: None }].into_iter().collect();
        let with = apply_complements(&set, &l).unwrap();
        assert_eq!(with.get(1).unwrap().secondary, Some(Selection::new("B", "y")));
        assert_eq!(set.get(1).unwrap().secondary, None);
    }

    #[test]
    fn user_message_layout() {
        let c = Conversation { system_prompt: "s".into(), artifact: "{}".into(), tasks: vec![Task::new(3, "Do it")] };
        let m = c.user_message();
        assert!(m.starts_with("{}\n\nQuestions:\nQ03: Do it\n"));
        assert!(m.ends_with(&format!("{RESPONSE_FORMAT_LINE}\n")));
    }
}
