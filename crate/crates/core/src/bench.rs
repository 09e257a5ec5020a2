//! Question sets, scoring, and multi-condition benchmark runs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::guidance::{Condition, GuidanceCondition};
use crate::report::{Code, Finding, ValidationReport};
use crate::response::{ParseIssue, SelectionSet};
use crate::retrieval::{Conversation, RouterBackend, Task};
use crate::text::names_match;

pub use crate::response::{format_selections, parse_response};

pub const PRIMARY_POINTS: f64 = 1.0;
pub const SECONDARY_BONUS: f64 = 0.5;
/// Shortest target-name fragment the keyword lint looks for.
pub const LINT_MIN_TOKEN: usize = 4;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("answer key is empty")]
    EmptyKey,
    #[error("no conditions to run")]
    NoConditions,
    #[error("could not write transcript {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub id: u32,
    pub text: String,
    pub primary_target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub secondary_target: Option<String>,
}

impl Question {
    pub fn task(&self) -> Task {
        Task::new(self.id, self.text.clone())
    }
}

pub fn tasks(questions: &[Question]) -> Vec<Task> {
    questions.iter().map(Question::task).collect()
}

/// Fragments of a category name the question text must not contain.
pub fn name_fragments(name: &str) -> Vec<String> {
    name.split(|c: char| c == '_' || c == '&' || c.is_whitespace())
        .filter(|t| t.chars().count() >= LINT_MIN_TOKEN)
        .map(str::to_lowercase)
        .collect()
}

/// Flags questions whose text gives away part of the primary target's name.
pub fn lint_questions(questions: &[Question]) -> ValidationReport {
    let mut report = ValidationReport::default();
    for q in questions {
        let text = q.text.to_lowercase();
        for frag in name_fragments(&q.primary_target) {
            if text.contains(&frag) {
                report.push(Finding::warning(
                    Code::KeywordLeak,
                    format!("Q{:02} contains `{frag}` from its target `{}`", q.id, q.primary_target),
                ));
            }
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionScore {
    pub id: u32,
    pub primary_hit: bool,
    pub secondary_hit: bool,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub per_question: Vec<QuestionScore>,
    pub primary_hits: usize,
    pub secondary_hits: usize,
    pub n_questions: usize,
    pub n_with_secondary: usize,
    #[serde(rename = "PA")]
    pub pa: f64,
    /// Zero when no question has a secondary target.
    #[serde(rename = "SHR")]
    pub shr: f64,
    pub total: f64,
    pub max_total: f64,
}

/// The best achievable total for `key`.
pub fn max_total(key: &[Question]) -> f64 {
    let n_sec = key.iter().filter(|q| q.secondary_target.is_some()).count();
    key.len() as f64 * PRIMARY_POINTS + n_sec as f64 * SECONDARY_BONUS
}

/// Scores selections against the key at category level. Skill names are
/// ignored, and a secondary only counts when the primary is right.
pub fn score_responses(sel: &SelectionSet, key: &[Question]) -> Result<ScoreReport, BenchError> {
    if key.is_empty() {
        return Err(BenchError::EmptyKey);
    }
    let mut per_question = Vec::with_capacity(key.len());
    for q in key {
        let chosen = sel.get(q.id);
        let primary_hit = chosen.is_some_and(|c| names_match(&c.primary.category, &q.primary_target));
        let secondary_hit = primary_hit
            && match (&q.secondary_target, chosen) {
                (Some(target), Some(c)) => {
                    names_match(&c.primary.category, target)
                        || c.secondary.as_ref().is_some_and(|s| names_match(&s.category, target))
                }
                _ => false,
            };
        let score = match (primary_hit, secondary_hit) {
            (true, true) => PRIMARY_POINTS + SECONDARY_BONUS,
            (true, false) => PRIMARY_POINTS,
            _ => 0.0,
        };
        per_question.push(QuestionScore { id: q.id, primary_hit, secondary_hit, score });
    }
    let n_questions = key.len();
    let n_with_secondary = key.iter().filter(|q| q.secondary_target.is_some()).count();
    let primary_hits = per_question.iter().filter(|s| s.primary_hit).count();
    let secondary_hits = per_question.iter().filter(|s| s.secondary_hit).count();
    Ok(ScoreReport {
        total: per_question.iter().map(|s| s.score).sum(),
        per_question,
        primary_hits,
        secondary_hits,
        n_questions,
        n_with_secondary,
        pa: primary_hits as f64 / n_questions as f64,
        shr: if n_with_secondary == 0 { 0.0 } else { secondary_hits as f64 / n_with_secondary as f64 },
        max_total: max_total(key),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub system_prompt: String,
    pub user_message: String,
    pub response: Option<String>,
    pub parse_issues: Vec<ParseIssue>,
}

/// One condition's run. Exactly one of `report` and `error` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionRun {
    pub condition: Condition,
    pub backend: String,
    pub report: Option<ScoreReport>,
    pub error: Option<String>,
    pub transcript: Transcript,
}

impl ConditionRun {
    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

fn run_condition(cond: &GuidanceCondition, questions: &[Question], backend: &dyn RouterBackend) -> ConditionRun {
    let conversation = Conversation {
        system_prompt: cond.system_prompt.clone(),
        artifact: cond.library_artifact.clone(),
        tasks: tasks(questions),
    };
    let mut transcript = Transcript {
        system_prompt: conversation.system_prompt.clone(),
        user_message: conversation.user_message(),
        response: None,
        parse_issues: Vec::new(),
    };
    let max_id = questions.iter().map(|q| q.id as usize).max().unwrap_or(0);
    let (report, error) = match backend.respond(&conversation) {
        Ok(text) => {
            let parsed = parse_response(&text, max_id);
            transcript.response = Some(text);
            transcript.parse_issues = parsed.issues;
            match score_responses(&parsed.selections, questions) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            }
        }
        Err(e) => (None, Some(e.to_string())),
    };
    ConditionRun { condition: cond.condition, backend: backend.name().to_string(), report, error, transcript }
}

/// Puts every question to the backend once per condition, each in a fresh
/// single-message conversation, and scores the replies. A failing condition
/// is recorded and the sweep continues. Deterministic backends run
/// conditions in parallel; others run them one at a time.
pub fn run_benchmark(
    conditions: &[GuidanceCondition],
    questions: &[Question],
    backend: &dyn RouterBackend,
) -> Result<Vec<ConditionRun>, BenchError> {
    if conditions.is_empty() {
        return Err(BenchError::NoConditions);
    }
    if questions.is_empty() {
        return Err(BenchError::EmptyKey);
    }
    Ok(if backend.deterministic() {
        conditions.par_iter().map(|c| run_condition(c, questions, backend)).collect()
    } else {
        conditions.iter().map(|c| run_condition(c, questions, backend)).collect()
    })
}

/// Writes `transcript_<condition>.json` per run into `dir`.
pub fn write_transcripts(dir: &Path, runs: &[ConditionRun]) -> Result<Vec<PathBuf>, BenchError> {
    std::fs::create_dir_all(dir).map_err(|source| BenchError::Io { path: dir.to_path_buf(), source })?;
    runs.iter()
        .map(|run| {
            let path = dir.join(format!("transcript_{}.json", run.condition));
            let body = serde_json::to_string_pretty(run).expect("run serializes");
            std::fs::write(&path, body + "\n").map_err(|source| BenchError::Io { path: path.clone(), source })?;
            Ok(path)
        })
        .collect()
}

const CSV_HEADER: &str = "condition,status,primary_hits,n_questions,PA,secondary_hits,n_with_secondary,SHR,total,max_total";

pub fn render_csv(runs: &[ConditionRun]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for run in runs {
        match &run.report {
            Some(r) => writeln!(
                out,
                "{},ok,{},{},{:.4},{},{},{:.4},{:.1},{:.1}",
                run.condition, r.primary_hits, r.n_questions, r.pa, r.secondary_hits, r.n_with_secondary, r.shr, r.total, r.max_total
            ),
            None => writeln!(out, "{},failed,,,,,,,,", run.condition),
        }
        .expect("writing to a String");
    }
    out
}

pub fn render_table(runs: &[ConditionRun]) -> String {
    let mut out = format!("{:<9} {:<7} {:>8} {:>8} {:>13}\n", "condition", "status", "primary", "second", "total");
    for run in runs {
        match &run.report {
            Some(r) => writeln!(
                out,
                "{:<9} {:<7} {:>8} {:>8} {:>13}",
                run.condition,
                "ok",
                format!("{}/{}", r.primary_hits, r.n_questions),
                format!("{}/{}", r.secondary_hits, r.n_with_secondary),
                format!("{:.1}/{:.1}", r.total, r.max_total)
            ),
            None => writeln!(
                out,
                "{:<9} {:<7} {}",
                run.condition,
                "failed",
                run.error.as_deref().unwrap_or_default()
            ),
        }
        .expect("writing to a String");
    }
    out
}

/// Per-question breakdown followed by the totals.
pub fn render_score_table(report: &ScoreReport) -> String {
    let mut out = format!("{:<4} {:>7} {:>9} {:>5}\n", "Q", "primary", "secondary", "score");
    for q in &report.per_question {
        let mark = |b: bool| if b { "hit" } else { "-" };
        writeln!(out, "Q{:02}  {:>7} {:>9} {:>5.1}", q.id, mark(q.primary_hit), mark(q.secondary_hit), q.score)
            .expect("writing to a String");
    }
    writeln!(
        out,
        "PA {}/{} ({:.1}%)  SHR {}/{} ({:.1}%)  total {:.1}/{:.1}",
        report.primary_hits,
        report.n_questions,
        report.pa * 100.0,
        report.secondary_hits,
        report.n_with_secondary,
        report.shr * 100.0,
        report.total,
        report.max_total
    )
    .expect("writing to a String");
    out
}
