//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use sdsr::library::{Category, KnowledgeLibrary, SummaryBlock};

pub use rand::SeedableRng;
pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const WORDS: &[&str] = &[
    "routing", "ledger", "audit", "glacier", "harbor", "lantern", "cipher", "meadow", "orbit", "quartz",
    "signal", "tensor", "vector", "willow", "canyon", "beacon", "falcon", "garnet", "helix", "ember",
    "prism", "summit", "tundra", "violet", "zephyr", "anchor", "bramble", "cobalt", "delta", "fable",
    "café", "naïve", "über", "日本", "données", "señal", "mañana", "Ωmega", "straße", "crème",
];

/// Descriptions sometimes carry characters that need escaping in JSON.
const ODD_BITS: &[&str] = &["\"quoted\"", "back\\slash", "tab\there", "brace}", "{open", "[list]", "colon:", "comma,"];

pub fn sentence(rng: &mut TestRng, words: usize) -> String {
    let mut out = Vec::with_capacity(words);
    for _ in 0..words {
        if rng.gen_ratio(1, 25) {
            out.push(*ODD_BITS.choose(rng).unwrap());
        } else {
            out.push(*WORDS.choose(rng).unwrap());
        }
    }
    out.join(" ")
}

pub fn category(rng: &mut TestRng, index: usize, skills: usize, desc_words: usize) -> Category {
    let stem = WORDS[index % 30];
    let mut c = Category::new(format!("{}_{}_{index}", capitalize(stem), capitalize(WORDS[(index * 7 + 3) % 30])), sentence(rng, desc_words));
    for s in 0..skills {
        c = c.with_skill(format!("Skill_{index}_{s}"), sentence(rng, desc_words));
    }
    c
}

fn capitalize(s: &str) -> String {
    let mut cs = s.chars();
    match cs.next() {
        Some(f) => f.to_uppercase().chain(cs).collect(),
        None => String::new(),
    }
}

pub fn library(rng: &mut TestRng, categories: usize, skills: usize, desc_words: usize) -> KnowledgeLibrary {
    KnowledgeLibrary::new((0..categories).map(|i| category(rng, i, skills, desc_words)).collect())
}

/// Byte offset one past the summary value in a file whose first key is
/// `"_summary"`, found with serde_json's streaming reader.
pub fn summary_end_oracle(text: &str) -> usize {
    let key = "\"_summary\"";
    let at = text.find(key).expect("summary key present");
    let colon = at + key.len() + text[at + key.len()..].find(':').expect("colon after key");
    let rest = &text[colon + 1..];
    let mut stream = serde_json::Deserializer::from_str(rest).into_iter::<Value>();
    stream.next().expect("a value").expect("valid value");
    colon + 1 + stream.byte_offset()
}

/// The summary a full parse of the whole file yields.
pub fn summary_full_parse(text: &str) -> SummaryBlock {
    let v: Value = serde_json::from_str(text).expect("file parses");
    serde_json::from_value(v["_summary"].clone()).expect("summary parses")
}

/// Content tokens written out from the contract: lowercased alphanumeric
/// runs, length over one, stopwords dropped.
pub fn oracle_tokens(s: &str) -> BTreeSet<String> {
    let lower = s.to_lowercase();
    let mut out = BTreeSet::new();
    let mut cur = String::new();
    for ch in lower.chars().chain(std::iter::once(' ')) {
        if ch.is_alphanumeric() {
            cur.push(ch);
        } else if !cur.is_empty() {
            if cur.chars().count() > 1 && !sdsr::text::STOPWORDS.contains(&cur.as_str()) {
                out.insert(cur.clone());
            }
            cur.clear();
        }
    }
    out
}

/// Weighted Jaccard with name tokens at weight 2 and all others at 1.
pub fn oracle_score(query: &str, name: &str, text: &str) -> f64 {
    let q = oracle_tokens(query);
    let n = oracle_tokens(name);
    let t = oracle_tokens(text);
    let mut weights: BTreeMap<&str, f64> = BTreeMap::new();
    for tok in q.iter().chain(&t) {
        weights.insert(tok, 1.0);
    }
    for tok in &n {
        weights.insert(tok, 2.0);
    }
    let total: f64 = weights.values().sum();
    if total == 0.0 {
        return 0.0;
    }
    let shared: f64 = weights
        .iter()
        .filter(|(tok, _)| q.contains(**tok) && (n.contains(**tok) || t.contains(**tok)))
        .map(|(_, w)| w)
        .sum();
    shared / total
}

/// Exhaustive Tier-1 argmax: best entry score per file, highest file score
/// wins, smallest file id on ties.
pub fn oracle_route_argmax(query: &str, files: &[(String, SummaryBlock)]) -> String {
    let mut best: Option<(f64, &str)> = None;
    for (id, summary) in files {
        let score = summary
            .category_index
            .iter()
            .map(|e| oracle_score(query, &e.name, &e.routing_hint))
            .fold(0.0, f64::max);
        best = match best {
            None => Some((score, id)),
            Some((b, bid)) if score > b || (score == b && id.as_str() < bid) => Some((score, id)),
            keep => keep,
        };
    }
    best.expect("non-empty registry").1.to_string()
}
