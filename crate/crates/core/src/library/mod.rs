//! The knowledge-library data model.
//!
//! A [`KnowledgeLibrary`] is an ordered list of [`Category`] values, each
//! holding a description and an ordered list of [`Skill`] entries. A library
//! may carry a leading [`SummaryBlock`]: the navigational index that is
//! serialized as the first key of the library file so that a reader meets it
//! before any category body.

mod format;
mod similarity;
mod validate;

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::text::names_match;

pub use format::{FormatError, LibraryFormat, DEFAULT_BODY_KEY, SUMMARY_KEY};
pub use similarity::surface_similarity;
pub use validate::{validate_library, validate_library_with, ValidationOptions, DENSITY_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skill {
    #[serde(rename = "skill_name")]
    pub name: String,
    #[serde(default)]
    pub description: String,
}

impl Skill {
    pub fn new(name: impl Into<String>, description: impl Into<String>) -> Self {
        Self { name: name.into(), description: description.into() }
    }
}

/// Qualitative abstraction level of a category. Used in prompt templates,
/// never in scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AbstractionLevel {
    Pipeline,
    Governance,
    Framework,
    System,
    Engine,
    Mechanism,
    Component,
    Detection,
    Intelligence,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistractorTier {
    High,
    Low,
}

impl fmt::Display for DistractorTier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            DistractorTier::High => "high",
            DistractorTier::Low => "low",
        })
    }
}

impl FromStr for DistractorTier {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "high" => Ok(DistractorTier::High),
            "low" => Ok(DistractorTier::Low),
            other => Err(format!("unknown distractor tier `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Category {
    pub name: String,
    pub description: String,
    pub skills: Vec<Skill>,
    pub abstraction_level: Option<AbstractionLevel>,
    /// Name of the category the library designer pairs with this one.
    pub complement: Option<String>,
    /// Set only on injected distractor categories.
    pub distractor_tier: Option<DistractorTier>,
}

impl Category {
    pub fn new(name: impl Into<String>, description: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            description: description.into(),
            skills: Vec::new(),
            abstraction_level: None,
            complement: None,
            distractor_tier: None,
        }
    }

    pub fn with_skill(mut self, name: impl Into<String>, description: impl Into<String>) -> Self {
        self.skills.push(Skill::new(name, description));
        self
    }

    pub fn with_complement(mut self, complement: impl Into<String>) -> Self {
        self.complement = Some(complement.into());
        self
    }

    pub fn is_distractor(&self) -> bool {
        self.distractor_tier.is_some()
    }

    pub fn skill(&self, name: &str) -> Option<&Skill> {
        self.skills.iter().find(|s| names_match(&s.name, name))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryIndexEntry {
    pub name: String,
    pub skill_count: usize,
    pub routing_hint: String,
}

/// Navigational metadata placed at the primacy position of a library file.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SummaryBlock {
    pub category_index: Vec<CategoryIndexEntry>,
    #[serde(rename = "_llm_instructions", default)]
    pub llm_instructions: String,
    #[serde(default)]
    pub routing_roles: IndexMap<String, Vec<String>>,
}

impl SummaryBlock {
    /// Compact single-line JSON; the text whose size Tier-1 routing pays for.
    pub fn to_compact_json(&self) -> String {
        serde_json::to_string(self).expect("summary block serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct KnowledgeLibrary {
    pub summary: Option<SummaryBlock>,
    pub categories: Vec<Category>,
    /// Any further top-level keys of the file, kept in file order.
    pub provenance: IndexMap<String, serde_json::Value>,
}

impl KnowledgeLibrary {
    pub fn new(categories: Vec<Category>) -> Self {
        Self { summary: None, categories, provenance: IndexMap::new() }
    }

    pub fn category(&self, name: &str) -> Option<&Category> {
        self.categories.iter().find(|c| names_match(&c.name, name))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.category(name).is_some()
    }

    pub fn total_skills(&self) -> usize {
        self.categories.iter().map(|c| c.skills.len()).sum()
    }

    pub fn real_categories(&self) -> impl Iterator<Item = &Category> {
        self.categories.iter().filter(|c| !c.is_distractor())
    }

    pub fn has_skill(&self, category: &str, skill: &str) -> bool {
        self.category(category).is_some_and(|c| c.skill(skill).is_some())
    }
}
