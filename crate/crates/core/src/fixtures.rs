//! The synthetic fixture data shipped with the crate: a 36-category,
//! 190-skill library, a 20-question key, distractor rounds, Round-1
//! selection matrices and a sample judgment.

use indexmap::IndexMap;

use crate::bench::Question;
use crate::corpus::{CrossReference, SectionRule};
use crate::distractor::RoundConfig;
use crate::guidance::{build_summary_with, Condition, SummaryConfig};
use crate::library::{KnowledgeLibrary, LibraryFormat};
use crate::response::SelectionSet;

pub const SKILLS_LIBRARY_JSON: &str = include_str!("../fixtures/skills_library.json");
pub const ROUTING_ROLES_JSON: &str = include_str!("../fixtures/routing_roles.json");
pub const QUESTIONS_JSON: &str = include_str!("../fixtures/questions.json");
pub const ROUND2_JSON: &str = include_str!("../fixtures/round2_specs.json");
pub const ROUND3_JSON: &str = include_str!("../fixtures/round3_specs.json");
pub const R1_SELECTIONS_A_JSON: &str = include_str!("../fixtures/r1_selections_a.json");
pub const R1_SELECTIONS_B_JSON: &str = include_str!("../fixtures/r1_selections_b.json");
pub const R1_SELECTIONS_C_JSON: &str = include_str!("../fixtures/r1_selections_c.json");
pub const JUDGMENT_TEXT: &str = include_str!("../fixtures/judgment.txt");
pub const JUDGMENT_RULES_JSON: &str = include_str!("../fixtures/judgment_rules.json");

/// The fixture library without a summary block.
pub fn skills_library() -> KnowledgeLibrary {
    LibraryFormat::default().parse(SKILLS_LIBRARY_JSON).expect("fixture library parses")
}

pub fn routing_roles() -> IndexMap<String, Vec<String>> {
    serde_json::from_str(ROUTING_ROLES_JSON).expect("fixture roles parse")
}

pub fn summary_config() -> SummaryConfig {
    SummaryConfig { routing_roles: routing_roles(), ..Default::default() }
}

/// The fixture library with a freshly built summary and routing roles.
pub fn summarized_library() -> KnowledgeLibrary {
    build_summary_with(&skills_library(), &summary_config()).expect("fixture library is non-empty")
}

pub fn questions() -> Vec<Question> {
    serde_json::from_str(QUESTIONS_JSON).expect("fixture questions parse")
}

pub fn round2() -> RoundConfig {
    serde_json::from_str(ROUND2_JSON).expect("round 2 specs parse")
}

pub fn round3() -> RoundConfig {
    serde_json::from_str(ROUND3_JSON).expect("round 3 specs parse")
}

/// Round-1 selections with every primary right and 2, 3 and 2 secondary
/// hits for A, B and C. There is no matrix for D.
pub fn r1_selections(condition: Condition) -> Option<SelectionSet> {
    let json = match condition {
        Condition::A => R1_SELECTIONS_A_JSON,
        Condition::B => R1_SELECTIONS_B_JSON,
        Condition::C => R1_SELECTIONS_C_JSON,
        Condition::D => return None,
    };
    Some(serde_json::from_str(json).expect("fixture selections parse"))
}

pub fn judgment_rules() -> Vec<SectionRule> {
    serde_json::from_str(JUDGMENT_RULES_JSON).expect("fixture rules parse")
}

/// Reasoning on damages leans on the claimant's figures.
pub fn damages_cross_reference() -> CrossReference {
    CrossReference {
        from_section: "reasoning".into(),
        to_section: "claimant".into(),
        locator: "paras 3, 9".into(),
        trigger: "quantum of damages".into(),
    }
}
