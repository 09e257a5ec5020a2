//! Deterministic token-overlap scoring: the desk-scale stand-in for a model
//! router.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::library::{Category, CategoryIndexEntry, KnowledgeLibrary, LibraryFormat};
use crate::response::{format_selections, QuestionSelection, Selection, SelectionSet};
use crate::text::content_token_set;

use super::{BackendError, Conversation, FileSummary, RouterBackend, ScoredFile, Task};

/// Something with a name and a body of text that a query can be scored
/// against.
pub trait LexicalTarget {
    fn lexical_name(&self) -> &str;
    fn lexical_text(&self) -> &str;
}

impl LexicalTarget for CategoryIndexEntry {
    fn lexical_name(&self) -> &str {
        &self.name
    }
    fn lexical_text(&self) -> &str {
        &self.routing_hint
    }
}

impl LexicalTarget for Category {
    fn lexical_name(&self) -> &str {
        &self.name
    }
    fn lexical_text(&self) -> &str {
        &self.description
    }
}

/// A borrowed name/text pair.
#[derive(Debug, Clone, Copy)]
pub struct LexicalEntry<'a> {
    pub name: &'a str,
    pub text: &'a str,
}

impl LexicalTarget for LexicalEntry<'_> {
    fn lexical_name(&self) -> &str {
        self.name
    }
    fn lexical_text(&self) -> &str {
        self.text
    }
}

/// Pre-tokenized form of a [`LexicalTarget`].
#[derive(Debug, Clone, Default)]
pub struct TokenProfile {
    name: BTreeSet<String>,
    text: BTreeSet<String>,
}

impl TokenProfile {
    pub fn of(target: &impl LexicalTarget) -> Self {
        Self {
            name: content_token_set(target.lexical_name()),
            text: content_token_set(target.lexical_text()),
        }
    }

    fn weight(&self, token: &str) -> f64 {
        if self.name.contains(token) {
            2.0
        } else {
            1.0
        }
    }

    /// Weighted Jaccard of `query` tokens against this profile, where a
    /// token counts twice if it occurs in the name.
    pub fn score(&self, query: &BTreeSet<String>) -> f64 {
        let mut shared = 0.0;
        let mut union = 0.0;
        for t in self.name.union(&self.text) {
            let w = self.weight(t);
            union += w;
            if query.contains(t) {
                shared += w;
            }
        }
        for t in query {
            if !self.name.contains(t) && !self.text.contains(t) {
                union += 1.0;
            }
        }
        if union == 0.0 {
            0.0
        } else {
            shared / union
        }
    }
}

/// Weighted token overlap of `query` with `target`, in `[0, 1]`.
pub fn lexical_score(query: &str, target: &impl LexicalTarget) -> f64 {
    TokenProfile::of(target).score(&content_token_set(query))
}

/// File score: the best score of any index entry in the file's summary.
pub fn summary_score(query_tokens: &BTreeSet<String>, summary: &crate::library::SummaryBlock) -> f64 {
    summary
        .category_index
        .iter()
        .map(|e| TokenProfile::of(e).score(query_tokens))
        .fold(0.0, f64::max)
}

struct SkillCandidate<'a> {
    category: &'a str,
    skill: &'a str,
    profile: TokenProfile,
}

fn candidates(loaded: &[KnowledgeLibrary]) -> Vec<SkillCandidate<'_>> {
    let mut out = Vec::new();
    for lib in loaded {
        for cat in &lib.categories {
            for skill in &cat.skills {
                let name = format!("{} {}", cat.name, skill.name);
                let text = format!("{} {}", cat.description, skill.description);
                out.push(SkillCandidate {
                    category: &cat.name,
                    skill: &skill.name,
                    profile: TokenProfile::of(&LexicalEntry { name: &name, text: &text }),
                });
            }
        }
    }
    out
}

/// Higher score first, then lexicographic (category, skill).
fn better(a: (f64, &str, &str), b: (f64, &str, &str)) -> bool {
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => (a.1, a.2) < (b.1, b.2),
    }
}

/// Scores every file summary and every loaded skill by token overlap.
///
/// `select` picks the best-scoring (category, skill) pair as the primary
/// selection and the best pair from any other category, if it shares at
/// least one token with the task, as the secondary.
#[derive(Debug, Clone, Default)]
pub struct LexicalBackend {
    pub format: LibraryFormat,
}

impl LexicalBackend {
    pub fn new() -> Self {
        Self::default()
    }

    fn select_one(&self, task: &Task, pool: &[SkillCandidate<'_>]) -> Option<QuestionSelection> {
        let q = content_token_set(&task.text);
        let scored: Vec<(f64, &str, &str)> = pool.iter().map(|c| (c.profile.score(&q), c.category, c.skill)).collect();
        let best = scored.iter().copied().reduce(|a, b| if better(b, a) { b } else { a })?;
        let secondary = scored
            .iter()
            .copied()
            .filter(|c| c.1 != best.1 && c.0 > 0.0)
            .reduce(|a, b| if better(b, a) { b } else { a });
        Some(QuestionSelection {
            question_id: task.id,
            primary: Selection::new(best.1, best.2),
            secondary: secondary.map(|s| Selection::new(s.1, s.2)),
        })
    }
}

impl RouterBackend for LexicalBackend {
    fn name(&self) -> &str {
        "lexical"
    }

    fn deterministic(&self) -> bool {
        true
    }

    fn route(&self, query: &str, summaries: &[FileSummary]) -> Result<Vec<ScoredFile>, BackendError> {
        let q = content_token_set(query);
        Ok(summaries
            .par_iter()
            .map(|s| ScoredFile { file_id: s.file_id.clone(), score: summary_score(&q, &s.summary) })
            .collect())
    }

    fn select(&self, tasks: &[Task], loaded: &[KnowledgeLibrary]) -> Result<SelectionSet, BackendError> {
        let pool = candidates(loaded);
        Ok(tasks.iter().filter_map(|t| self.select_one(t, &pool)).collect())
    }

    fn respond(&self, conversation: &Conversation) -> Result<String, BackendError> {
        let lib = self
            .format
            .parse(&conversation.artifact)
            .map_err(|e| BackendError::Artifact(e.to_string()))?;
        let set = self.select(&conversation.tasks, std::slice::from_ref(&lib))?;
        Ok(format_selections(&set))
    }
}
