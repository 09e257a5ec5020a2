//! Distractor generation and round expansion.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::guidance::{refresh_summary, DEFAULT_HINT_MAX};
use crate::library::{surface_similarity, AbstractionLevel, Category, DistractorTier, KnowledgeLibrary, Skill};
use crate::report::{Code, Finding, ValidationReport};

pub const DEFAULT_THETA: f64 = 0.2;

fn default_theta() -> f64 {
    DEFAULT_THETA
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DistractorError {
    #[error("distractor `{name}` targets unknown category `{target}`")]
    UnknownTarget { name: String, target: String },
    #[error("high-tier distractor `{0}` has no target")]
    MissingTarget(String),
    #[error("low-tier distractor `{0}` must not name a target")]
    UnexpectedTarget(String),
    #[error("category name `{0}` is already taken")]
    NameCollision(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistractorSpec {
    pub tier: DistractorTier,
    pub name: String,
    pub description: String,
    #[serde(default)]
    pub skills: Vec<Skill>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abstraction_level: Option<AbstractionLevel>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RoundConfig {
    pub round_id: u32,
    #[serde(default)]
    pub distractors: Vec<DistractorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_categories: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_skills: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub categories: Vec<Category>,
    pub report: ValidationReport,
}

/// Turns specs into categories tagged with their tier.
///
/// For high-tier specs the surface similarity to the target is reported as
/// INFO when it reaches `theta` and as a WARNING when it does not.
pub fn generate_distractors(specs: &[DistractorSpec], real: &KnowledgeLibrary) -> Result<Generated, DistractorError> {
    let mut report = ValidationReport::new();
    let mut categories = Vec::with_capacity(specs.len());
    for spec in specs {
        let category = Category {
            name: spec.name.clone(),
            description: spec.description.clone(),
            skills: spec.skills.clone(),
            abstraction_level: spec.abstraction_level,
            complement: None,
            distractor_tier: Some(spec.tier),
        };
        match (spec.tier, &spec.target) {
            (DistractorTier::High, None) => return Err(DistractorError::MissingTarget(spec.name.clone())),
            (DistractorTier::Low, Some(_)) => return Err(DistractorError::UnexpectedTarget(spec.name.clone())),
            (DistractorTier::High, Some(target)) => {
                let target_cat = real.category(target).ok_or_else(|| DistractorError::UnknownTarget {
                    name: spec.name.clone(),
                    target: target.clone(),
                })?;
                if !(2..=3).contains(&spec.skills.len()) {
                    report.push(Finding::warning(
                        Code::DistractorSkillCount,
                        format!("high-tier distractor `{}` has {} skills, expected 2-3", spec.name, spec.skills.len()),
                    ));
                }
                let sim = surface_similarity(&category, target_cat);
                if sim >= spec.theta {
                    report.push(Finding::info(
                        Code::InterferenceConfirmed,
                        format!("`{}` vs `{target}`: similarity {sim:.3} >= {:.3}", spec.name, spec.theta),
                    ));
                } else {
                    report.push(Finding::warning(
                        Code::SimilarityBelowTheta,
                        format!("`{}` vs `{target}`: similarity {sim:.3} < {:.3}", spec.name, spec.theta),
                    ));
                }
            }
            (DistractorTier::Low, None) => {}
        }
        categories.push(category);
    }
    Ok(Generated { categories, report })
}

/// Whether slot `i` of `total` receives one of `count` evenly spaced items.
///
/// Slot `i` is taken exactly when `floor((i + 1) * count / total)` steps past
/// `floor(i * count / total)`, which spreads the items Bresenham-style.
fn is_spread_slot(i: usize, count: usize, total: usize) -> bool {
    (i + 1) * count / total > i * count / total
}

/// Interleaves `distractors` among the categories of `real` with even
/// spacing. Relative order within each group is kept; an existing summary is
/// rebuilt for the new category list.
pub fn inject_interleaved(real: &KnowledgeLibrary, distractors: &[Category]) -> Result<KnowledgeLibrary, DistractorError> {
    let mut names: HashSet<&str> = real.categories.iter().map(|c| c.name.trim()).collect();
    for d in distractors {
        if !names.insert(d.name.trim()) {
            return Err(DistractorError::NameCollision(d.name.clone()));
        }
    }
    if distractors.is_empty() {
        return Ok(real.clone());
    }
    let total = real.categories.len() + distractors.len();
    let mut reals = real.categories.iter();
    let mut extra = distractors.iter();
    let mut categories = Vec::with_capacity(total);
    for i in 0..total {
        let next = if is_spread_slot(i, distractors.len(), total) { extra.next() } else { reals.next() };
        categories.push(next.expect("slot counts match group sizes").clone());
    }
    let mut out = KnowledgeLibrary { categories, ..real.clone() };
    refresh_summary(&mut out, DEFAULT_HINT_MAX);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutcome {
    pub library: KnowledgeLibrary,
    pub report: ValidationReport,
}

/// Generates and injects one round of distractors, reporting the resulting
/// totals and any disagreement with the totals the config expects.
pub fn expand_round(base: &KnowledgeLibrary, cfg: &RoundConfig) -> Result<RoundOutcome, DistractorError> {
    let generated = generate_distractors(&cfg.distractors, base)?;
    let library = inject_interleaved(base, &generated.categories)?;
    let mut report = generated.report;
    let (cats, skills) = (library.categories.len(), library.total_skills());
    report.push(Finding::info(
        Code::Totals,
        format!("round {}: {cats} categories, {skills} skills", cfg.round_id),
    ));
    if let Some(expected) = cfg.expected_categories.filter(|&e| e != cats) {
        report.push(Finding::warning(
            Code::ExpectedTotalMismatch,
            format!("round {} expects {expected} categories, expansion yields {cats}", cfg.round_id),
        ));
    }
    if let Some(expected) = cfg.expected_skills.filter(|&e| e != skills) {
        report.push(Finding::warning(
            Code::ExpectedTotalMismatch,
            format!("round {} expects {expected} skills, expansion yields {skills}", cfg.round_id),
        ));
    }
    Ok(RoundOutcome { library, report })
}
