use std::collections::HashSet;

use crate::report::{Code, Finding, ValidationReport};
use crate::text::{names_match, scalar_len};

use super::{DistractorTier, KnowledgeLibrary};

/// Category count above which a single summary index stops helping.
pub const DENSITY_LIMIT: usize = 60;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationOptions {
    pub strict: bool,
    pub hint_max: usize,
    pub density_limit: usize,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self { strict: false, hint_max: crate::guidance::DEFAULT_HINT_MAX, density_limit: DENSITY_LIMIT }
    }
}

pub fn validate_library(lib: &KnowledgeLibrary, strict: bool) -> ValidationReport {
    validate_library_with(lib, &ValidationOptions { strict, ..Default::default() })
}

pub fn validate_library_with(lib: &KnowledgeLibrary, opts: &ValidationOptions) -> ValidationReport {
    let mut report = ValidationReport::new();
    check_categories(lib, &mut report);
    if let Some(summary) = &lib.summary {
        check_summary(lib, summary, opts, &mut report);
    }
    if opts.strict {
        report.escalate_warnings();
    }
    report
}

fn check_categories(lib: &KnowledgeLibrary, report: &mut ValidationReport) {
    let mut seen = HashSet::new();
    for (i, cat) in lib.categories.iter().enumerate() {
        let name = cat.name.trim();
        if name.is_empty() {
            report.push(Finding::error(Code::EmptyName, format!("category #{} has an empty name", i + 1)));
        } else if !seen.insert(name) {
            report.push(Finding::error(Code::DuplicateCategory, format!("category `{name}` appears more than once")));
        }
        if cat.description.trim().is_empty() {
            report.push(Finding::error(Code::EmptyDescription, format!("category `{name}` has an empty description")));
        }
        match cat.distractor_tier {
            None if cat.skills.is_empty() => {
                report.push(Finding::error(Code::EmptyCategory, format!("category `{name}` has no skills")));
            }
            Some(DistractorTier::High) if !(2..=3).contains(&cat.skills.len()) => {
                report.push(Finding::warning(
                    Code::DistractorSkillCount,
                    format!("high-tier distractor `{name}` has {} skills, expected 2-3", cat.skills.len()),
                ));
            }
            _ => {}
        }
        let mut skill_names = HashSet::new();
        for skill in &cat.skills {
            let sname = skill.name.trim();
            if sname.is_empty() {
                report.push(Finding::error(Code::EmptyName, format!("category `{name}` has a skill with an empty name")));
                continue;
            }
            if skill.name.contains(['\n', '\r', '\u{2028}', '\u{2029}']) {
                report.push(Finding::error(
                    Code::NameLineBreak,
                    format!("skill `{}` in `{name}` contains a line break", sname.escape_debug()),
                ));
            }
            if !skill_names.insert(sname) {
                report.push(Finding::error(Code::DuplicateSkill, format!("skill `{sname}` appears twice in `{name}`")));
            }
        }
        if let Some(target) = &cat.complement {
            if !lib.contains(target) {
                report.push(Finding::error(
                    Code::DanglingComplement,
                    format!("complement of `{name}` names missing category `{target}`"),
                ));
            }
        }
    }
}

fn check_summary(
    lib: &KnowledgeLibrary,
    summary: &super::SummaryBlock,
    opts: &ValidationOptions,
    report: &mut ValidationReport,
) {
    let index = &summary.category_index;
    if index.len() != lib.categories.len() {
        report.push(Finding::error(
            Code::IndexMismatch,
            format!("summary indexes {} categories, library has {}", index.len(), lib.categories.len()),
        ));
    }
    for (pos, (entry, cat)) in index.iter().zip(&lib.categories).enumerate() {
        if !names_match(&entry.name, &cat.name) {
            report.push(Finding::error(
                Code::IndexMismatch,
                format!("index entry #{} is `{}` but category #{} is `{}`", pos + 1, entry.name, pos + 1, cat.name),
            ));
            continue;
        }
        if entry.skill_count != cat.skills.len() {
            report.push(Finding::error(
                Code::CountMismatch,
                format!("index says `{}` has {} skills, category has {}", cat.name, entry.skill_count, cat.skills.len()),
            ));
        }
    }
    for entry in index {
        let len = scalar_len(&entry.routing_hint);
        if len > opts.hint_max {
            report.push(Finding::error(
                Code::HintTooLong,
                format!("routing hint for `{}` is {len} characters, limit {}", entry.name, opts.hint_max),
            ));
        }
    }
    for (role, targets) in &summary.routing_roles {
        for target in targets {
            if !lib.contains(target) {
                report.push(Finding::error(
                    Code::UnknownRoleTarget,
                    format!("routing role `{role}` names missing category `{target}`"),
                ));
            }
        }
    }
    if lib.categories.len() > opts.density_limit {
        report.push(Finding::warning(
            Code::HintDensity,
            format!(
                "summary indexes {} categories; routing hints lose effect beyond about {}",
                lib.categories.len(),
                opts.density_limit
            ),
        ));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::{Category, CategoryIndexEntry, SummaryBlock};
    use crate::report::Severity;

    fn lib_with_summary(n: usize) -> KnowledgeLibrary {
        let categories: Vec<_> = (0..n)
            .map(|i| Category::new(format!("Cat_{i:03}"), format!("description {i}")).with_skill("s", "d"))
            .collect();
        let index = categories
            .iter()
            .map(|c| CategoryIndexEntry { name: c.name.clone(), skill_count: 1, routing_hint: "hint".into() })
            .collect();
        let mut lib = KnowledgeLibrary::new(categories);
        lib.summary = Some(SummaryBlock { category_index: index, ..Default::default() });
        lib
    }

    #[test]
    fn count_mismatch_is_an_error() {
        let mut lib = lib_with_summary(3);
        lib.summary.as_mut().unwrap().category_index[1].skill_count = 5;
        let r = validate_library(&lib, false);
        assert_eq!(r.findings.len(), 1);
        assert_eq!(r.findings[0].code, Code::CountMismatch);
        assert_eq!(r.findings[0].severity, Severity::Error);
    }

    #[test]
    fn density_warning_above_sixty_and_strict_escalation() {
        assert!(validate_library(&lib_with_summary(60), false).is_empty());
        let r = validate_library(&lib_with_summary(61), false);
        assert_eq!(r.findings.len(), 1);
        assert_eq!(r.findings[0].code, Code::HintDensity);
        assert_eq!(r.findings[0].severity, Severity::Warning);
        let strict = validate_library(&lib_with_summary(61), true);
        assert_eq!(strict.findings[0].severity, Severity::Error);
    }

    #[test]
    fn density_is_not_checked_without_a_summary() {
        let mut lib = lib_with_summary(100);
        lib.summary = None;
        assert!(validate_library(&lib, true).is_empty());
    }

    #[test]
    fn structural_errors_are_all_reported() {
        let mut lib = lib_with_summary(2);
        lib.categories.push(Category::new("Cat_000", "dup").with_skill("a\nb", "").with_skill("a\nb", ""));
        lib.categories[0].complement = Some("Gone".into());
        lib.summary.as_mut().unwrap().routing_roles.insert("anchor".into(), vec!["Nope".into()]);
        lib.summary.as_mut().unwrap().category_index[0].routing_hint = "x".repeat(101);
        let r = validate_library(&lib, false);
        for code in [
            Code::DuplicateCategory,
            Code::NameLineBreak,
            Code::DuplicateSkill,
            Code::DanglingComplement,
            Code::UnknownRoleTarget,
            Code::HintTooLong,
            Code::IndexMismatch,
        ] {
            assert!(r.has_code(code), "missing {code}");
        }
    }

    #[test]
    fn high_tier_distractor_size_is_a_warning() {
        let mut cat = Category::new("D", "d").with_skill("a", "");
        cat.distractor_tier = Some(DistractorTier::High);
        let lib = KnowledgeLibrary::new(vec![cat]);
        let r = validate_library(&lib, false);
        assert_eq!(r.findings.len(), 1);
        assert_eq!(r.findings[0].severity, Severity::Warning);
        assert_eq!(r.findings[0].code, Code::DistractorSkillCount);
    }
}
