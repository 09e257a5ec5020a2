//! Rule-based sectioning of semi-structured documents, summaries with
//! cross-references, and cross-reference driven co-loading.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use regex::Regex;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::prefix::estimate_tokens;
use crate::report::{Code, Finding, ValidationReport};
use crate::retrieval::{lexical_score, LexicalEntry};
use crate::text::content_token_set;

pub const DEFAULT_TOKEN_BUDGET: usize = 400;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("document is empty")]
    EmptyDocument,
    #[error("ruleset is empty")]
    NoRules,
    #[error("invalid header pattern `{pattern}`: {source}")]
    BadPattern { pattern: String, source: regex::Error },
    #[error("cross-reference {from} -> {to} names a section not in the document")]
    DanglingReference { from: String, to: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectionRole {
    Claimant,
    Respondent,
    Reasoning,
    Holding,
    Other,
}

impl SectionRole {
    pub fn as_str(self) -> &'static str {
        match self {
            SectionRole::Claimant => "claimant",
            SectionRole::Respondent => "respondent",
            SectionRole::Reasoning => "reasoning",
            SectionRole::Holding => "holding",
            SectionRole::Other => "other",
        }
    }
}

impl fmt::Display for SectionRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for SectionRole {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "claimant" => Ok(SectionRole::Claimant),
            "respondent" => Ok(SectionRole::Respondent),
            "reasoning" => Ok(SectionRole::Reasoning),
            "holding" => Ok(SectionRole::Holding),
            "other" => Ok(SectionRole::Other),
            _ => Err(format!("unknown section role `{s}`")),
        }
    }
}

/// A header pattern, matched against each line with its terminator removed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionRule {
    pub role: SectionRole,
    pub pattern: String,
}

#[derive(Debug, Clone)]
pub struct Ruleset {
    rules: Vec<(SectionRole, Regex)>,
}

impl Ruleset {
    pub fn new(rules: &[SectionRule]) -> Result<Self, CorpusError> {
        if rules.is_empty() {
            return Err(CorpusError::NoRules);
        }
        let rules = rules
            .iter()
            .map(|r| {
                Regex::new(&r.pattern)
                    .map(|re| (r.role, re))
                    .map_err(|source| CorpusError::BadPattern { pattern: r.pattern.clone(), source })
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { rules })
    }

    fn classify(&self, line: &str) -> Option<SectionRole> {
        self.rules.iter().find(|(_, re)| re.is_match(line)).map(|(role, _)| *role)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub section_id: String,
    pub role: SectionRole,
    pub text: String,
    /// Half-open range in Unicode scalar values.
    pub char_span: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionedDocument {
    pub doc_id: String,
    pub sections: Vec<Section>,
}

impl SectionedDocument {
    pub fn section(&self, id: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.section_id == id)
    }

    pub fn first_of(&self, role: SectionRole) -> Option<&Section> {
        self.sections.iter().find(|s| s.role == role)
    }
}

/// Splits `text` at every line matched by a rule. Each header line opens a
/// section that runs to the next header. Text before the first header
/// becomes an `other` section unless it is whitespace only. Section ids are
/// the role name, suffixed `_2`, `_3`, ... on repeats.
pub fn section_document(doc_id: &str, text: &str, rules: &Ruleset) -> Result<SectionedDocument, CorpusError> {
    if text.trim().is_empty() {
        return Err(CorpusError::EmptyDocument);
    }
    // (byte offset, role) of each section start
    let mut starts: Vec<(usize, SectionRole)> = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let bare = line.trim_end_matches(['\n', '\r']);
        if let Some(role) = rules.classify(bare) {
            starts.push((offset, role));
        }
        offset += line.len();
    }
    match starts.first() {
        None => starts.push((0, SectionRole::Other)),
        Some(&(first, _)) if first > 0 && !text[..first].trim().is_empty() => {
            starts.insert(0, (0, SectionRole::Other));
        }
        _ => {}
    }

    let mut seen: BTreeMap<SectionRole, usize> = BTreeMap::new();
    let mut sections = Vec::with_capacity(starts.len());
    for (i, &(start, role)) in starts.iter().enumerate() {
        let end = starts.get(i + 1).map_or(text.len(), |s| s.0);
        let n = seen.entry(role).or_insert(0);
        *n += 1;
        let section_id = if *n == 1 { role.as_str().to_string() } else { format!("{}_{}", role, n) };
        let char_start = text[..start].chars().count();
        let body = &text[start..end];
        sections.push(Section {
            section_id,
            role,
            text: body.to_string(),
            char_span: (char_start, char_start + body.chars().count()),
        });
    }
    Ok(SectionedDocument { doc_id: doc_id.to_string(), sections })
}

/// "Load `to_section` alongside `from_section` when a query is about
/// `trigger`."
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossReference {
    pub from_section: String,
    pub to_section: String,
    pub locator: String,
    pub trigger: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocSummary {
    pub doc_id: String,
    pub claims_digest: String,
    pub reasoning_digest: String,
    pub cross_references: Vec<CrossReference>,
    pub token_estimate: usize,
}

#[derive(Serialize)]
struct DocSummaryBody<'a> {
    doc_id: &'a str,
    claims_digest: &'a str,
    reasoning_digest: &'a str,
    cross_references: &'a [CrossReference],
}

impl DocSummary {
    /// Estimate over the compact serialization, excluding the estimate
    /// field itself.
    pub fn estimate(&self) -> usize {
        let body = DocSummaryBody {
            doc_id: &self.doc_id,
            claims_digest: &self.claims_digest,
            reasoning_digest: &self.reasoning_digest,
            cross_references: &self.cross_references,
        };
        estimate_tokens(&serde_json::to_string(&body).expect("summary serializes"))
    }
}

fn join_digests(digests: &BTreeMap<SectionRole, String>, roles: [SectionRole; 2]) -> String {
    roles
        .iter()
        .filter_map(|r| digests.get(r))
        .map(|d| d.trim())
        .filter(|d| !d.is_empty())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Assembles a summary from caller-supplied digests. The claims digest joins
/// the claimant and respondent digests, the reasoning digest joins reasoning
/// and holding.
pub fn build_doc_summary(
    doc: &SectionedDocument,
    digests: &BTreeMap<SectionRole, String>,
    refs: &[CrossReference],
    budget: usize,
) -> Result<(DocSummary, ValidationReport), CorpusError> {
    for r in refs {
        if doc.section(&r.from_section).is_none() || doc.section(&r.to_section).is_none() {
            return Err(CorpusError::DanglingReference { from: r.from_section.clone(), to: r.to_section.clone() });
        }
    }
    let mut summary = DocSummary {
        doc_id: doc.doc_id.clone(),
        claims_digest: join_digests(digests, [SectionRole::Claimant, SectionRole::Respondent]),
        reasoning_digest: join_digests(digests, [SectionRole::Reasoning, SectionRole::Holding]),
        cross_references: refs.to_vec(),
        token_estimate: 0,
    };
    summary.token_estimate = summary.estimate();
    let mut report = ValidationReport::default();
    if summary.token_estimate > budget {
        report.push(Finding::warning(
            Code::TokenBudgetExceeded,
            format!("summary for `{}` is ~{} tokens, budget {}", doc.doc_id, summary.token_estimate, budget),
        ));
    }
    Ok((summary, report))
}

/// Section ids to load for `query`, in document order. Every cross-reference
/// whose trigger shares a content token with the query contributes both
/// endpoints; with no such trigger, the single best-scoring section is
/// returned, earliest first on ties.
pub fn resolve_coload(query: &str, summary: &DocSummary, doc: &SectionedDocument) -> Vec<String> {
    let q = content_token_set(query);
    let mut wanted: Vec<&str> = Vec::new();
    for r in &summary.cross_references {
        if !content_token_set(&r.trigger).is_disjoint(&q) {
            wanted.push(&r.from_section);
            wanted.push(&r.to_section);
        }
    }
    if !wanted.is_empty() {
        return doc
            .sections
            .iter()
            .filter(|s| wanted.contains(&s.section_id.as_str()))
            .map(|s| s.section_id.clone())
            .collect();
    }
    let mut best: Option<(f64, &Section)> = None;
    for s in &doc.sections {
        let score = lexical_score(query, &LexicalEntry { name: "", text: &s.text });
        if best.is_none_or(|(b, _)| score > b) {
            best = Some((score, s));
        }
    }
    best.map(|(_, s)| vec![s.section_id.clone()]).unwrap_or_default()
}

/// A structured document file: summary first, then the sections.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct StructuredDocument {
    #[serde(rename = "_summary")]
    pub summary: DocSummary,
    pub document: SectionedDocument,
}

impl Serialize for StructuredDocument {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("_summary", &self.summary)?;
        map.serialize_entry("document", &self.document)?;
        map.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rules() -> Ruleset {
        let rules: Vec<SectionRule> = serde_json::from_str(include_str!("../fixtures/judgment_rules.json")).unwrap();
        Ruleset::new(&rules).unwrap()
    }

    const JUDGMENT: &str = include_str!("../fixtures/judgment.txt");

    fn damages_ref() -> CrossReference {
        CrossReference {
            from_section: "reasoning".into(),
            to_section: "claimant".into(),
            locator: "paras 3, 9".into(),
            trigger: "quantum of damages".into(),
        }
    }

    #[test]
    fn four_canonical_sections() {
        let doc = section_document("harrow", JUDGMENT, &rules()).unwrap();
        let roles: Vec<SectionRole> = doc.sections.iter().map(|s| s.role).collect();
        assert_eq!(
            roles,
            vec![SectionRole::Claimant, SectionRole::Respondent, SectionRole::Reasoning, SectionRole::Holding]
        );
        let joined: String = doc.sections.iter().map(|s| s.text.as_str()).collect();
        assert_eq!(joined, JUDGMENT);
    }

    #[test]
    fn no_headers_is_one_other_section() {
        let doc = section_document("d", "just prose\nno headers\n", &rules()).unwrap();
        assert_eq!(doc.sections.len(), 1);
        assert_eq!(doc.sections[0].role, SectionRole::Other);
        assert_eq!(doc.sections[0].char_span, (0, 22));
    }

    #[test]
    fn empty_and_bad_inputs() {
        assert!(matches!(section_document("d", "  \n", &rules()), Err(CorpusError::EmptyDocument)));
        assert!(matches!(Ruleset::new(&[]), Err(CorpusError::NoRules)));
    }

    #[test]
    fn repeated_roles_get_suffixes() {
        let doc = section_document("d", "intro\nREASONING\na\nREASONING\nb\n", &rules()).unwrap();
        let ids: Vec<&str> = doc.sections.iter().map(|s| s.section_id.as_str()).collect();
        assert_eq!(ids, vec!["other", "reasoning", "reasoning_2"]);
    }

    #[test]
    fn summary_and_coload() {
        let doc = section_document("harrow", JUDGMENT, &rules()).unwrap();
        let (summary, report) = build_doc_summary(&doc, &BTreeMap::new(), &[damages_ref()], DEFAULT_TOKEN_BUDGET).unwrap();
        assert!(report.is_empty());
        assert_eq!(summary.cross_references.len(), 1);
        assert_eq!(summary.token_estimate, summary.estimate());
        assert_eq!(resolve_coload("how were damages assessed", &summary, &doc), vec!["claimant", "reasoning"]);

        let mut dangling = damages_ref();
        dangling.to_section = "appendix".into();
        assert!(matches!(
            build_doc_summary(&doc, &BTreeMap::new(), &[dangling], 400),
            Err(CorpusError::DanglingReference { .. })
        ));
    }

    #[test]
    fn no_refs_zero_scores_picks_first() {
        let doc = section_document("harrow", JUDGMENT, &rules()).unwrap();
        let (summary, _) = build_doc_summary(&doc, &BTreeMap::new(), &[], 400).unwrap();
        assert_eq!(resolve_coload("zebra xylophone", &summary, &doc), vec!["claimant"]);
    }

    #[test]
    fn budget_warning() {
        let doc = section_document("harrow", JUDGMENT, &rules()).unwrap();
        let mut digests = BTreeMap::new();
        digests.insert(SectionRole::Claimant, "word ".repeat(2000));
        let (_, report) = build_doc_summary(&doc, &digests, &[], 400).unwrap();
        assert!(report.has_code(Code::TokenBudgetExceeded));
    }
}
