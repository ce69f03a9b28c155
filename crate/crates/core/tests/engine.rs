mod common;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use cascade::{
    default_action, mention_to_json, ActionRegistry, Document, EngineError, ExtractorEngine,
    Grammar, Mention, Sentence, State,
};
use common::*;

fn names_doc() -> Document {
    let mut s = Sentence::from_words(&["Fox", "met", "Mulder", "and", "Fox", "Mulder", "left"]);
    s.tags = Some(
        ["NNP", "VBD", "NNP", "CC", "NNP", "NNP", "VBD"]
            .map(String::from)
            .to_vec(),
    );
    Document::new("names", vec![s])
}

const NAMES: &str = r#"
- name: names
  label: Name
  type: token
  action: ACTION
  pattern: "[tag=NNP]+"
"#;

fn texts(doc: &Document, ms: &[Mention]) -> Vec<String> {
    ms.iter().map(|m| m.text(doc)).collect()
}

#[test]
fn registered_action_filters_fox_mentions() {
    let mut actions = ActionRegistry::new();
    actions
        .register_action("filterFox", |ms: Vec<Mention>, state: &State| {
            let doc = state.document().expect("state is tied to a document");
            ms.into_iter().filter(|m| !m.text(doc).contains("Fox")).collect()
        })
        .unwrap();
    let grammar = Grammar::from_str(&NAMES.replace("ACTION", "filterFox")).unwrap();
    let doc = names_doc();
    let out = ExtractorEngine::with_actions(grammar, &actions)
        .unwrap()
        .extract_from(&doc);
    assert_eq!(texts(&doc, &out.mentions), ["Mulder"]);
    let rule = &out.trace.iterations[0].rules[0];
    assert_eq!(rule.action.as_deref(), Some("filterFox"));
    assert_eq!(rule.matches, [(0, 3)]);
    assert_eq!(rule.produced, 1);
}

#[test]
fn unregistered_action_is_an_error() {
    let grammar = Grammar::from_str(&NAMES.replace("ACTION", "filterFox")).unwrap();
    assert_eq!(
        ExtractorEngine::new(grammar).unwrap_err(),
        EngineError::UnknownAction {
            rule: "names".into(),
            action: "filterFox".into()
        }
    );
}

#[test]
fn actions_run_once_per_rule_and_iteration() {
    let calls = Arc::new(AtomicUsize::new(0));
    let seen = calls.clone();
    let mut actions = ActionRegistry::new();
    actions
        .register_action("count", move |ms: Vec<Mention>, _: &State| {
            seen.fetch_add(1, Ordering::SeqCst);
            ms
        })
        .unwrap();
    let grammar = Grammar::from_str(&NAMES.replace("ACTION", "count")).unwrap();
    let mut doc = names_doc();
    doc.sentences.push(doc.sentences[0].clone());
    let out = ExtractorEngine::with_actions(grammar, &actions)
        .unwrap()
        .extract_from(&doc);
    // iteration 1 finds six mentions across both sentences, iteration 2
    // finds them again and adds nothing
    assert_eq!(out.iterations, 2);
    assert_eq!(calls.load(Ordering::SeqCst), 2);
    assert_eq!(out.mentions.len(), 6);
    assert_eq!(out.trace.iterations[1].deduplicated, 6);
}

#[test]
fn every_constructor_honours_its_hooks() {
    let grammar = Grammar::from_str(&NAMES.replace("ACTION", "default")).unwrap();
    let doc = names_doc();
    let drop_all: cascade::Action = Arc::new(|_: Vec<Mention>, _: &State| Vec::new());

    let plain = ExtractorEngine::new(grammar.clone()).unwrap().extract_from(&doc);
    assert_eq!(plain.mentions.len(), 3);

    let registry = ActionRegistry::new();
    let with_actions = ExtractorEngine::with_actions(grammar.clone(), &registry)
        .unwrap()
        .extract_from(&doc);
    assert_eq!(with_actions.mentions.len(), 3);

    let global = ExtractorEngine::with_global(grammar.clone(), drop_all.clone())
        .unwrap()
        .extract_from(&doc);
    assert!(global.mentions.is_empty());
    assert_eq!(global.trace.iterations[0].survived, 0);

    let both = ExtractorEngine::with_actions_and_global(grammar, &registry, drop_all)
        .unwrap()
        .extract_from(&doc);
    assert!(both.mentions.is_empty());
}

#[test]
fn default_action_is_the_identity() {
    let doc = names_doc();
    let state = State::for_document(&doc);
    let m = Mention::text_bound(vec!["A".into()], 0, cascade::Interval::new(0, 1), "r");
    let out = default_action(vec![m.clone(), m.clone()], &state);
    assert_eq!(out.len(), 2);
    assert!(out.iter().all(|x| *x == m));
}

#[test]
fn hidden_mentions_still_feed_later_rules() {
    let grammar = Grammar::from_str(
        r#"
- name: names
  label: Name
  type: token
  keep: false
  pattern: "[tag=NNP]+"
- name: meeting
  label: Meeting
  type: token
  priority: 2
  pattern: "@a:Name met @b:Name"
"#,
    )
    .unwrap();
    let doc = names_doc();
    let out = ExtractorEngine::new(grammar).unwrap().extract_from(&doc);
    assert_eq!(out.mentions.len(), 1);
    let meeting = &out.mentions[0];
    assert_eq!(meeting.label(), "Meeting");
    assert_eq!(meeting.arguments()["a"][0].text(&doc), "Fox");
    assert!(!meeting.arguments()["a"][0].keep());
    // the hidden names remain in the state
    assert_eq!(out.state.mentions_with_label("Name").count(), 3);
}

#[test]
fn kept_mentions_are_reported_in_insertion_order() {
    let grammar = Grammar::from_str(
        r#"
- name: verbs
  label: Verb
  type: token
  pattern: "[tag=VBD]"
- name: names
  label: Name
  type: token
  pattern: "[tag=NNP]+"
"#,
    )
    .unwrap();
    let doc = names_doc();
    let out = ExtractorEngine::new(grammar).unwrap().extract_from(&doc);
    assert_eq!(
        texts(&doc, &out.mentions),
        ["met", "left", "Fox", "Mulder", "Fox Mulder"]
    );
}

#[test]
fn extraction_is_deterministic() {
    let grammar = Grammar::from_file(fixture_path("marriage.yml")).unwrap();
    let doc = fixture_doc("marriage.json");
    let engine = ExtractorEngine::new(grammar).unwrap();
    let render = || {
        let out = engine.extract_from(&doc);
        let json: Vec<_> = out.mentions.iter().map(|m| mention_to_json(m, &doc)).collect();
        (serde_json::to_string(&json).unwrap(), out.trace.to_string())
    };
    let first = render();
    for _ in 0..5 {
        assert_eq!(render(), first);
    }
}

#[test]
fn walkthrough_trace_orders_the_cascade() {
    let grammar = Grammar::from_file(fixture_path("walkthrough.yml")).unwrap();
    let doc = fixture_doc("signaling.json");
    let out = ExtractorEngine::new(grammar).unwrap().extract_from(&doc);
    let added: Vec<usize> = out.trace.iterations.iter().map(|i| i.added).collect();
    assert_eq!(added, [3, 2, 1, 0]);
    assert_eq!(out.trace.fixpoint, Some(4));
    let negreg = out.mentions.iter().find(|m| m.label() == "Negative_regulation").unwrap();
    assert_eq!(out.state.added_in(negreg), Some(3));
}

#[test]
fn iteration_cap_is_reported() {
    let grammar = Grammar::from_file(fixture_path("walkthrough.yml")).unwrap();
    let doc = fixture_doc("signaling.json");
    let out = ExtractorEngine::new(grammar)
        .unwrap()
        .with_max_iterations(2)
        .unwrap()
        .extract_from(&doc);
    assert_eq!(out.iterations, 2);
    assert!(out.warning.is_some());
    assert_eq!(out.trace.fixpoint, None);
    assert!(out.mentions.iter().all(|m| m.label() != "Negative_regulation"));
}
