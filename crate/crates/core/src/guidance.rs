//! Summary construction and the four guidance conditions.
//!
//! | condition | library artifact      | system prompt     |
//! |-----------|-----------------------|-------------------|
//! | A         | bare                  | minimal           |
//! | B         | with `_summary` first | minimal           |
//! | C         | bare                  | extended          |
//! | D         | with `_summary` first | extended          |

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::library::{CategoryIndexEntry, KnowledgeLibrary, LibraryFormat, SummaryBlock};
use crate::text::truncate_scalars;

pub const DEFAULT_HINT_MAX: usize = 100;

pub const DEFAULT_LLM_INSTRUCTIONS: &str = "Navigate in two stages. Stage 1: read category_index \
and pick the one or two categories whose routing_hint best fits the task. Stage 2: open only those \
categories and choose skills from their skill lists. Use routing_roles when no category clearly fits.";

pub const MINIMAL_PROMPT: &str = "You are a professional Prompt Engineer.
I will provide you with a skills.json library and 20 task requirements.
For each task, select the most relevant skills from the library.
For each skill you select, list ONLY the category_name and skill_name.
Do NOT explain your reasoning yet — just list the selections for all
20 tasks first.
Ensure that every skill you reference actually exists in the library.";

pub const PRIORITY_RULE: &str = "Priority rule: when a broad pipeline/orchestration/governance \
category and a narrow mechanism/component category both seem relevant, prefer the broader one.";

/// Placeholders understood by [`PromptConfig::extended_template`].
pub const MINIMAL_PLACEHOLDER: &str = "{minimal_prompt}";
pub const RULE_PLACEHOLDER: &str = "{priority_rule}";
pub const HIGH_PRIORITY_PLACEHOLDER: &str = "{high_priority}";

pub const EXTENDED_TEMPLATE: &str = "{minimal_prompt}

Before reading the library:
- Scan the category_description fields to understand each category's scope.
- {priority_rule}
- Key high-priority categories:
{high_priority}";

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GuidanceError {
    #[error("library has no categories")]
    EmptyLibrary,
    #[error("hint_max must be at least 1")]
    ZeroHintMax,
    #[error("extended template lacks the {HIGH_PRIORITY_PLACEHOLDER} placeholder")]
    MissingPlaceholder,
    #[error("high-priority entry `{0}` names itself as its confusion")]
    SelfConfusion(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    A,
    B,
    C,
    D,
}

impl Condition {
    pub const ALL: [Condition; 4] = [Condition::A, Condition::B, Condition::C, Condition::D];

    pub fn has_summary(self) -> bool {
        matches!(self, Condition::B | Condition::D)
    }

    pub fn uses_extended_prompt(self) -> bool {
        matches!(self, Condition::C | Condition::D)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Condition::A => "A",
            Condition::B => "B",
            Condition::C => "C",
            Condition::D => "D",
        })
    }
}

impl FromStr for Condition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Condition::A),
            "B" => Ok(Condition::B),
            "C" => Ok(Condition::C),
            "D" => Ok(Condition::D),
            other => Err(format!("unknown condition `{other}` (expected A, B, C or D)")),
        }
    }
}

/// A target category the extended prompt names explicitly, with the
/// distractor it tends to lose to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HighPriorityEntry {
    pub target: String,
    pub confused_with: String,
    pub confusion_type: String,
}

impl HighPriorityEntry {
    pub fn new(target: &str, confused_with: &str, confusion_type: &str) -> Self {
        Self { target: target.into(), confused_with: confused_with.into(), confusion_type: confusion_type.into() }
    }

    fn prompt_line(&self) -> String {
        format!("  - {} (prefer over {}: {})", self.target, self.confused_with, self.confusion_type)
    }
}

/// The seven most confusable targets and their distractors.
pub fn default_high_priority() -> Vec<HighPriorityEntry> {
    vec![
        HighPriorityEntry::new("Axiomatic_Logic_&_Audit_Systems", "Recursive_Self_Audit_Engine", "hub vs. satellite"),
        HighPriorityEntry::new(
            "Distributed_Cognition_&_Context_Orchestration",
            "Agent_Handoff_Protocol_Design",
            "governance vs. mechanics",
        ),
        HighPriorityEntry::new(
            "Adversarial_Systems_Thinking",
            "Competitive_Intelligence_Synthesis",
            "framework vs. intelligence",
        ),
        HighPriorityEntry::new(
            "Academic_Research_Synthesis_Pipeline",
            "Code_To_Methodology_Translator",
            "pipeline vs. component",
        ),
        HighPriorityEntry::new(
            "Revenue_Generation_&_Commercial_Logic",
            "Conversion_Funnel_Architecture",
            "system vs. mechanism",
        ),
        HighPriorityEntry::new(
            "Cross_Cultural_Localization_Intelligence",
            "Cultural_Signal_Detection",
            "system vs. detection",
        ),
        HighPriorityEntry::new(
            "Interactive_Narrative_&_Fiction_Engine",
            "Branch_Narrative_Architect",
            "engine vs. component",
        ),
    ]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PromptConfig {
    pub minimal_template: String,
    pub extended_template: String,
    pub high_priority: Vec<HighPriorityEntry>,
    pub priority_rule: String,
}

impl Default for PromptConfig {
    fn default() -> Self {
        Self {
            minimal_template: MINIMAL_PROMPT.to_string(),
            extended_template: EXTENDED_TEMPLATE.to_string(),
            high_priority: default_high_priority(),
            priority_rule: PRIORITY_RULE.to_string(),
        }
    }
}

impl PromptConfig {
    pub fn validate(&self) -> Result<(), GuidanceError> {
        if !self.extended_template.contains(HIGH_PRIORITY_PLACEHOLDER) {
            return Err(GuidanceError::MissingPlaceholder);
        }
        if let Some(e) = self.high_priority.iter().find(|e| e.target.trim() == e.confused_with.trim()) {
            return Err(GuidanceError::SelfConfusion(e.target.clone()));
        }
        Ok(())
    }

    pub fn minimal_prompt(&self) -> String {
        self.minimal_template.clone()
    }

    /// The extended template with every placeholder filled in.
    pub fn extended_prompt(&self) -> String {
        let lines: Vec<String> = self.high_priority.iter().map(HighPriorityEntry::prompt_line).collect();
        self.extended_template
            .replace(MINIMAL_PLACEHOLDER, &self.minimal_template)
            .replace(RULE_PLACEHOLDER, &self.priority_rule)
            .replace(HIGH_PRIORITY_PLACEHOLDER, &lines.join("\n"))
    }

    pub fn prompt_for(&self, condition: Condition) -> String {
        if condition.uses_extended_prompt() {
            self.extended_prompt()
        } else {
            self.minimal_prompt()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SummaryConfig {
    pub hint_max: usize,
    pub llm_instructions: String,
    pub routing_roles: IndexMap<String, Vec<String>>,
}

impl Default for SummaryConfig {
    fn default() -> Self {
        Self {
            hint_max: DEFAULT_HINT_MAX,
            llm_instructions: DEFAULT_LLM_INSTRUCTIONS.to_string(),
            routing_roles: IndexMap::new(),
        }
    }
}

/// The first `hint_max` scalar values of `description`, right-trimmed.
pub fn routing_hint(description: &str, hint_max: usize) -> String {
    truncate_scalars(description, hint_max).trim_end().to_string()
}

fn index_for(lib: &KnowledgeLibrary, hint_max: usize) -> Vec<CategoryIndexEntry> {
    lib.categories
        .iter()
        .map(|c| CategoryIndexEntry {
            name: c.name.clone(),
            skill_count: c.skills.len(),
            routing_hint: routing_hint(&c.description, hint_max),
        })
        .collect()
}

/// Copy of `lib` with a freshly built summary using default instructions and
/// no routing roles.
pub fn build_summary(lib: &KnowledgeLibrary, hint_max: usize) -> Result<KnowledgeLibrary, GuidanceError> {
    build_summary_with(lib, &SummaryConfig { hint_max, ..Default::default() })
}

pub fn build_summary_with(lib: &KnowledgeLibrary, cfg: &SummaryConfig) -> Result<KnowledgeLibrary, GuidanceError> {
    if lib.categories.is_empty() {
        return Err(GuidanceError::EmptyLibrary);
    }
    if cfg.hint_max == 0 {
        return Err(GuidanceError::ZeroHintMax);
    }
    let mut out = lib.clone();
    out.summary = Some(SummaryBlock {
        category_index: index_for(lib, cfg.hint_max),
        llm_instructions: cfg.llm_instructions.clone(),
        routing_roles: cfg.routing_roles.clone(),
    });
    Ok(out)
}

/// Recomputes the category index of an existing summary after the category
/// list changed, keeping its instructions and roles.
pub fn refresh_summary(lib: &mut KnowledgeLibrary, hint_max: usize) {
    let index = index_for(lib, hint_max);
    if let Some(summary) = &mut lib.summary {
        summary.category_index = index;
    }
}

pub fn strip_summary(lib: &KnowledgeLibrary) -> KnowledgeLibrary {
    KnowledgeLibrary { summary: None, ..lib.clone() }
}

/// One experimental condition: the library file to upload and the system
/// prompt that accompanies it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuidanceCondition {
    pub condition: Condition,
    pub library_artifact: String,
    pub system_prompt: String,
}

pub fn build_condition(
    lib: &KnowledgeLibrary,
    condition: Condition,
    prompts: &PromptConfig,
    summary: &SummaryConfig,
) -> Result<GuidanceCondition, GuidanceError> {
    build_condition_in(lib, condition, prompts, summary, &LibraryFormat::default())
}

pub fn build_condition_in(
    lib: &KnowledgeLibrary,
    condition: Condition,
    prompts: &PromptConfig,
    summary: &SummaryConfig,
    format: &LibraryFormat,
) -> Result<GuidanceCondition, GuidanceError> {
    prompts.validate()?;
    let artifact = if condition.has_summary() {
        build_summary_with(lib, summary)?
    } else {
        if lib.categories.is_empty() {
            return Err(GuidanceError::EmptyLibrary);
        }
        strip_summary(lib)
    };
    Ok(GuidanceCondition {
        condition,
        library_artifact: format.to_string(&artifact),
        system_prompt: prompts.prompt_for(condition),
    })
}
