mod common;

use std::collections::BTreeMap;
use std::io::Cursor;

use proptest::prelude::*;

use sdsr::bench::{max_total, score_responses, Question};
use sdsr::corpus::{build_doc_summary, resolve_coload, section_document, CrossReference, Ruleset};
use sdsr::distractor::inject_interleaved;
use sdsr::fixtures;
use sdsr::guidance::build_summary;
use sdsr::library::{Category, KnowledgeLibrary, LibraryFormat};
use sdsr::prefix::{estimate_tokens, extract_summary_from_reader, PrefixOptions};
use sdsr::response::{QuestionSelection, Selection, SelectionSet};
use sdsr::retrieval::{guard_selections, lexical_score, resolve_complement, LexicalEntry};

fn arb_library() -> impl Strategy<Value = KnowledgeLibrary> {
    (any::<u64>(), 1usize..12, 1usize..6, 1usize..30).prop_map(|(seed, cats, skills, words)| {
        let mut rng = common::rng(seed);
        build_summary(&common::library(&mut rng, cats, skills, words), 100).unwrap()
    })
}

fn key_and_selections() -> impl Strategy<Value = (Vec<Question>, SelectionSet)> {
    let names = ["A", "B", "C", "D", "E"];
    prop::collection::vec(
        (0usize..5, prop::option::of(0usize..5), 0usize..5, prop::option::of(0usize..5), any::<bool>()),
        1..25,
    )
    .prop_map(move |rows| {
        let mut key = Vec::new();
        let mut set = SelectionSet::new();
        for (i, (p, s, sp, ss, answered)) in rows.into_iter().enumerate() {
            let id = i as u32 + 1;
            key.push(Question {
                id,
                text: String::new(),
                primary_target: names[p].into(),
                secondary_target: s.map(|s| names[s].to_string()),
            });
            if answered {
                set.insert(QuestionSelection {
                    question_id: id,
                    primary: Selection::new(names[sp], "k"),
                    secondary: ss.map(|c| Selection::new(names[c], "k")),
                });
            }
        }
        (key, set)
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn prefix_result_is_independent_of_block_size(lib in arb_library(), a in 1usize..300, m in 1usize..40) {
        // whole-block reads are monotone when one block size divides the other
        let b = a * m;
        let text = LibraryFormat::default().to_string(&lib);
        let read = |block_size| {
            extract_summary_from_reader(Cursor::new(text.as_bytes()), PrefixOptions { block_size, ..Default::default() }).unwrap()
        };
        let (ra, rb) = (read(a), read(b));
        prop_assert_eq!(&ra.summary, &rb.summary);
        prop_assert_eq!(ra.summary_end_offset, rb.summary_end_offset);
        prop_assert_eq!(ra.summary_end_offset, common::summary_end_oracle(&text));
        prop_assert!(ra.bytes_read <= rb.bytes_read);
        prop_assert!(rb.bytes_read <= ra.bytes_read + b);
        prop_assert!(rb.bytes_read <= rb.summary_end_offset + b);
    }

    #[test]
    fn estimate_is_quarter_scalars_rounded_up(s in "\\PC{0,200}") {
        let n = s.chars().count();
        prop_assert_eq!(estimate_tokens(&s), n / 4 + usize::from(n % 4 != 0));
    }

    #[test]
    fn scoring_arithmetic((key, set) in key_and_selections()) {
        let r = score_responses(&set, &key).unwrap();
        let n = key.len() as f64;
        let n_sec = key.iter().filter(|q| q.secondary_target.is_some()).count() as f64;
        for q in &r.per_question {
            prop_assert!([0.0, 1.0, 1.5].contains(&q.score));
            prop_assert_eq!(q.score == 1.5, q.primary_hit && q.secondary_hit);
            prop_assert!(!q.secondary_hit || q.primary_hit);
        }
        prop_assert!((r.total - (r.pa * n + r.shr * n_sec * 0.5)).abs() < 1e-9);
        prop_assert_eq!(r.max_total, max_total(&key));
        prop_assert!(r.total <= r.max_total);
    }

    #[test]
    fn scoring_ignores_skill_names((key, set) in key_and_selections(), salt in "[a-z]{1,8}") {
        let renamed: SelectionSet = set
            .iter()
            .map(|q| {
                let mut q = q.clone();
                q.primary.skill = format!("{salt}{}", q.primary.skill);
                if let Some(s) = &mut q.secondary {
                    s.skill = salt.clone();
                }
                q
            })
            .collect();
        prop_assert_eq!(score_responses(&set, &key).unwrap(), score_responses(&renamed, &key).unwrap());
    }

    #[test]
    fn lexical_score_matches_oracle(q in "[a-z ]{0,40}", name in "[A-Za-z_&]{0,30}", text in "[a-z ,.]{0,60}") {
        let got = lexical_score(&q, &LexicalEntry { name: &name, text: &text });
        prop_assert!((0.0..=1.0).contains(&got));
        prop_assert_eq!(got, common::oracle_score(&q, &name, &text));
    }

    #[test]
    fn guarded_selections_exist(lib in arb_library(), picks in prop::collection::vec((0usize..40, 0usize..8, any::<bool>()), 0..20)) {
        let raw: SelectionSet = picks
            .iter()
            .enumerate()
            .map(|(i, &(c, s, real))| {
                let sel = match lib.categories.get(c % (lib.categories.len() + 1)) {
                    Some(cat) if real => Selection::new(&cat.name, cat.skills.get(s).map_or("ghost", |k| k.name.as_str())),
                    _ => Selection::new("Ghost_Category", "ghost"),
                };
                QuestionSelection { question_id: i as u32 + 1, primary: sel, secondary: None }
            })
            .collect();
        let out = guard_selections(&raw, std::slice::from_ref(&lib));
        for q in out.selections.iter() {
            prop_assert!(lib.has_skill(&q.primary.category, &q.primary.skill));
        }
        prop_assert_eq!(out.selections.len() + out.stripped.len(), raw.len());
    }

    #[test]
    fn complements_survive_distractor_injection(extra in 0usize..80) {
        let lib = fixtures::skills_library();
        let distractors: Vec<Category> =
            (0..extra).map(|i| Category::new(format!("Noise_{i}"), "noise").with_skill("n", "n")).collect();
        let bigger = inject_interleaved(&lib, &distractors).unwrap();
        for c in &lib.categories {
            prop_assert_eq!(resolve_complement(&lib, &c.name).unwrap(), resolve_complement(&bigger, &c.name).unwrap());
        }
    }

    #[test]
    fn adding_a_reference_never_shrinks_coload(query in "(damages|costs|appeal|wool|strike|clause)( (damages|costs|appeal|wool|strike|clause)){0,3}") {
        let rules = Ruleset::new(&fixtures::judgment_rules()).unwrap();
        let doc = section_document("j", fixtures::JUDGMENT_TEXT, &rules).unwrap();
        let base_ref = fixtures::damages_cross_reference();
        let extra = CrossReference {
            from_section: "holding".into(),
            to_section: "respondent".into(),
            locator: "paras 5, 10".into(),
            trigger: "limitation clause".into(),
        };
        let (one, _) = build_doc_summary(&doc, &BTreeMap::new(), std::slice::from_ref(&base_ref), 400).unwrap();
        let (two, _) = build_doc_summary(&doc, &BTreeMap::new(), &[base_ref, extra.clone()], 400).unwrap();
        let before = resolve_coload(&query, &one, &doc);
        let after = resolve_coload(&query, &two, &doc);
        prop_assert!(!after.is_empty());
        if lexical_score(&query, &LexicalEntry { name: "", text: &extra.trigger }) > 0.0 {
            let triggered_before = lexical_score(&query, &LexicalEntry { name: "", text: "quantum of damages" }) > 0.0;
            if triggered_before {
                for id in &before {
                    prop_assert!(after.contains(id), "{id} dropped");
                }
            }
            prop_assert!(after.contains(&"holding".to_string()) && after.contains(&"respondent".to_string()));
        }
    }
}
