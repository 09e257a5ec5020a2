//! Selection sets and the one-line-per-question response grammar:
//!
//! ```text
//! Q01: Cognitive_Architecture_&_Routing | Intent_Router
//! Q03: Category_A | skill_x ; Category_B | skill_y
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub category: String,
    pub skill: String,
}

impl Selection {
    pub fn new(category: impl Into<String>, skill: impl Into<String>) -> Self {
        Self { category: category.into(), skill: skill.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionSelection {
    pub question_id: u32,
    pub primary: Selection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub secondary: Option<Selection>,
}

/// At most one entry per question, ordered by question id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<QuestionSelection>", into = "Vec<QuestionSelection>")]
pub struct SelectionSet {
    entries: Vec<QuestionSelection>,
}

impl SelectionSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts or replaces the entry for `sel.question_id`.
    pub fn insert(&mut self, sel: QuestionSelection) {
        match self.entries.binary_search_by_key(&sel.question_id, |e| e.question_id) {
            Ok(i) => self.entries[i] = sel,
            Err(i) => self.entries.insert(i, sel),
        }
    }

    pub fn get(&self, question_id: u32) -> Option<&QuestionSelection> {
        self.entries
            .binary_search_by_key(&question_id, |e| e.question_id)
            .ok()
            .map(|i| &self.entries[i])
    }

    pub fn entries(&self) -> &[QuestionSelection] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &QuestionSelection> {
        self.entries.iter()
    }
}

impl From<Vec<QuestionSelection>> for SelectionSet {
    fn from(v: Vec<QuestionSelection>) -> Self {
        v.into_iter().collect()
    }
}

impl From<SelectionSet> for Vec<QuestionSelection> {
    fn from(s: SelectionSet) -> Self {
        s.entries
    }
}

impl FromIterator<QuestionSelection> for SelectionSet {
    fn from_iter<I: IntoIterator<Item = QuestionSelection>>(iter: I) -> Self {
        let mut set = SelectionSet::new();
        for sel in iter {
            set.insert(sel);
        }
        set
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParseIssue {
    UnknownQuestion { line: usize, id: u32 },
    MalformedLine { line: usize, text: String },
    DuplicateQuestion { line: usize, id: u32 },
}

impl fmt::Display for ParseIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseIssue::UnknownQuestion { line, id } => write!(f, "line {line}: unknown question Q{id:02}"),
            ParseIssue::MalformedLine { line, text } => write!(f, "line {line}: malformed answer `{text}`"),
            ParseIssue::DuplicateQuestion { line, id } => write!(f, "line {line}: second answer for Q{id:02} ignored"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedResponse {
    pub selections: SelectionSet,
    pub issues: Vec<ParseIssue>,
}

fn answer_line() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[\s*\->#]*Q\s*(\d+)\**\s*[:.)]\s*(.*?)\s*$").expect("valid regex"))
}

fn looks_like_answer(line: &str) -> bool {
    let t = line.trim_start_matches(|c: char| c.is_whitespace() || "*->#".contains(c));
    let mut chars = t.chars();
    chars.next() == Some('Q') && chars.next().is_some_and(|c| c.is_ascii_digit() || c == ' ')
}

fn parse_selection(part: &str) -> Option<Selection> {
    let (category, skill) = part.split_once('|')?;
    let (category, skill) = (category.trim(), skill.trim());
    if category.is_empty() || skill.is_empty() || skill.contains('|') {
        return None;
    }
    Some(Selection::new(category, skill))
}

/// Parses a model response against `question_count` questions numbered
/// `1..=question_count`.
///
/// Blank lines and prose lines are skipped. Lines that start like an answer
/// but do not follow the grammar are reported and skipped; parsing always
/// continues. The first answer for a question wins.
pub fn parse_response(text: &str, question_count: usize) -> ParsedResponse {
    let mut out = ParsedResponse::default();
    let mut seen = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let Some(caps) = answer_line().captures(raw) else {
            if looks_like_answer(raw) {
                out.issues.push(ParseIssue::MalformedLine { line, text: raw.trim().to_string() });
            }
            continue;
        };
        let Ok(id) = caps[1].parse::<u32>() else {
            out.issues.push(ParseIssue::MalformedLine { line, text: raw.trim().to_string() });
            continue;
        };
        if id == 0 || id as usize > question_count {
            out.issues.push(ParseIssue::UnknownQuestion { line, id });
            continue;
        }
        let parts: Vec<&str> = caps[2].split(';').collect();
        let parsed: Option<Vec<Selection>> = if parts.len() > 2 {
            None
        } else {
            parts.iter().map(|p| parse_selection(p)).collect()
        };
        let Some(mut sels) = parsed else {
            out.issues.push(ParseIssue::MalformedLine { line, text: raw.trim().to_string() });
            continue;
        };
        if seen.insert(id, line).is_some() {
            out.issues.push(ParseIssue::DuplicateQuestion { line, id });
            continue;
        }
        let secondary = if sels.len() == 2 { sels.pop() } else { None };
        let primary = sels.pop().expect("split yields at least one part");
        out.selections.insert(QuestionSelection { question_id: id, primary, secondary });
    }
    out
}

/// Renders selections in the response grammar, one line per question.
pub fn format_selections(set: &SelectionSet) -> String {
    let mut out = String::new();
    for e in set.iter() {
        out.push_str(&format!("Q{:02}: {} | {}", e.question_id, e.primary.category, e.primary.skill));
        if let Some(s) = &e.secondary {
            out.push_str(&format!(" ; {} | {}", s.category, s.skill));
        }
        out.push('\n');
    }
    out
}
