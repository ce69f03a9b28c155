use super::*;
use crate::mention::{Interval, MentionKind};

fn words(text: &str) -> Sentence {
    Sentence::from_words(&text.split_whitespace().collect::<Vec<_>>())
}

fn spans(pattern: &str, s: &Sentence, state: &State) -> Vec<(usize, usize)> {
    CompiledTokenPattern::compile(pattern, Unit::Word)
        .unwrap()
        .find_all(s, 0, state)
        .iter()
        .map(|m| (m.interval.start, m.interval.end))
        .collect()
}

#[test]
fn greedy_and_lazy() {
    let s = words("a b c d e f c");
    let state = State::new();
    assert_eq!(spans("[]+ c", &s, &state), vec![(0, 7)]);
    assert_eq!(spans("[]+? c", &s, &state), vec![(0, 3), (3, 7)]);
    assert_eq!(spans("[]* c", &s, &state), vec![(0, 7)]);
    assert_eq!(spans("[]*? c", &s, &state), vec![(0, 3), (3, 7)]);
}

#[test]
fn ranged_repetition() {
    let s = words("a a a a a");
    let state = State::new();
    assert_eq!(spans("a{2}", &s, &state), vec![(0, 2), (2, 4)]);
    assert_eq!(spans("a{2,3}", &s, &state), vec![(0, 3), (3, 5)]);
    assert_eq!(spans("a{2,3}?", &s, &state), vec![(0, 2), (2, 4)]);
    assert_eq!(
        spans("a{,2}", &s, &state),
        vec![(0, 2), (2, 4), (4, 5), (5, 5)]
    );
    assert_eq!(spans("a{4,}", &s, &state), vec![(0, 5)]);
}

#[test]
fn alternation_precedence() {
    let state = State::new();
    assert_eq!(
        spans("fat rats | mice", &words("fat mice"), &state),
        vec![(1, 2)]
    );
    assert_eq!(
        spans("fat (rats | mice)", &words("fat mice"), &state),
        vec![(0, 2)]
    );
    assert_eq!(spans("fat (rats | mice)", &words("mice"), &state), vec![]);
}

#[test]
fn anchors() {
    let s = words("a a a");
    let state = State::new();
    assert_eq!(spans("^ a", &s, &state), vec![(0, 1)]);
    assert_eq!(spans("a $", &s, &state), vec![(2, 3)]);
    assert_eq!(spans("^ a+ $", &s, &state), vec![(0, 3)]);
    assert_eq!(spans("$", &s, &state), vec![(3, 3)]);
}

#[test]
fn lookarounds_do_not_consume() {
    let s = words("the big dog and the cat");
    let state = State::new();
    assert_eq!(spans("[] (?=dog)", &s, &state), vec![(1, 2)]);
    assert_eq!(spans("the (?!big) []", &s, &state), vec![(4, 6)]);
    assert_eq!(spans("(?<=the) []", &s, &state), vec![(1, 2), (5, 6)]);
    assert_eq!(spans("(?<=[]{2}) dog", &s, &state), vec![(2, 3)]);
    assert_eq!(spans("(?<![]{2}) the", &s, &state), vec![(0, 1)]);
    assert_eq!(spans("(?<!and) the", &s, &state), vec![(0, 1)]);
}

#[test]
fn empty_loops_terminate() {
    let s = words("a b a");
    let state = State::new();
    assert_eq!(spans("(a?)* b", &s, &state), vec![(0, 2)]);
    assert_eq!(
        spans("(a*)+", &s, &state),
        vec![(0, 1), (1, 1), (2, 3), (3, 3)]
    );
}

fn numbers_fixture() -> (Sentence, State<'static>) {
    let mut s = words("The numbers 4 , 8 , 15 , 16 , 23 and 42 frequently recurred in Lost .");
    s.tags = Some(
        "DT NNS CD , CD , CD , CD , CD CC CD RB VBD IN NNP ."
            .split_whitespace()
            .map(String::from)
            .collect(),
    );
    let numbers = CompiledTokenPattern::compile("[tag=CD]", Unit::Word).unwrap();
    let mut state = State::new();
    let info = RuleInfo::new("numbers", &["Number"]);
    for m in numbers.find_all(&s, 0, &State::new()) {
        for mention in match_to_mentions(&m, &info, 0) {
            state.add(mention, 1);
        }
    }
    (s, state)
}

#[test]
fn repeated_mention_captures() {
    let (s, state) = numbers_fixture();
    assert_eq!(state.len(), 6);
    let list = CompiledTokenPattern::compile(
        "@num:Number (\",\" @num:Number)+ (and @num:Number)?",
        Unit::Word,
    )
    .unwrap();
    let matches = list.find_all(&s, 0, &state);
    assert_eq!(matches.len(), 1);
    let m = &matches[0];
    assert_eq!(m.interval, Interval::new(2, 13));
    let nums = &m.captures["num"];
    assert_eq!(nums.len(), 6);
    assert!(nums.iter().all(|c| c.mention.is_some()));
    let starts: Vec<_> = nums.iter().map(|c| c.interval.start).collect();
    assert_eq!(starts, vec![2, 4, 6, 8, 10, 12]);

    let out = match_to_mentions(m, &RuleInfo::new("list", &["ListOfNumbers"]), 0);
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].kind(), MentionKind::Relation);
    assert_eq!(out[0].arguments()["num"].len(), 6);
    assert_eq!(out[0].arguments()["num"][0].found_by(), "numbers");
}

#[test]
fn mention_matcher_prefers_longer_mentions() {
    let s = words("New York City is big");
    let mut state = State::new();
    for (a, b) in [(0, 2), (0, 3)] {
        state.add(
            Mention::text_bound(vec!["Loc".into()], 0, Interval::new(a, b), "r"),
            1,
        );
    }
    assert_eq!(spans("@Loc", &s, &state), vec![(0, 3)]);
    // falls back to the shorter mention when the longer one cannot continue
    assert_eq!(spans("@Loc City", &s, &state), vec![(0, 3)]);
    assert_eq!(spans("@Loc is", &s, &state), vec![(0, 4)]);
    // a mention that merely covers the start position does not match
    assert_eq!(spans("York @Loc", &s, &state), vec![]);
}

#[test]
fn event_from_token_pattern() {
    let mut s = words("Oscar lives in a trash can .");
    s.lemmas = Some(
        "Oscar live in a trash can ."
            .split(' ')
            .map(String::from)
            .collect(),
    );
    s.tags = Some(
        "NNP VBZ IN DT NN NN ."
            .split(' ')
            .map(String::from)
            .collect(),
    );
    let p = CompiledTokenPattern::compile(
        "(?<resident>Oscar) \n(?<trigger>[lemma=live]) \nin [tag=DT]? (?<location>[tag=/^N/]+)\n",
        Unit::Word,
    )
    .unwrap();
    let state = State::new();
    let matches = p.find_all(&s, 0, &state);
    assert_eq!(matches.len(), 1);
    let out = match_to_mentions(
        &matches[0],
        &RuleInfo::new("event_mention_out", &["LivesIn"]),
        0,
    );
    let e = &out[0];
    assert_eq!(e.kind(), MentionKind::Event);
    assert_eq!(e.labels(), ["LivesIn"]);
    assert_eq!(e.trigger().unwrap().interval(), Interval::new(1, 2));
    assert_eq!(e.arguments()["resident"][0].interval(), Interval::new(0, 1));
    assert_eq!(e.arguments()["location"][0].interval(), Interval::new(4, 6));
    assert_eq!(e.arguments()["location"][0].labels(), ["LivesIn"]);
    assert_eq!(e.interval(), Interval::new(0, 6));
}

#[test]
fn relation_from_token_pattern() {
    let s = words("Dr. Frankenstein spends a lot of time in the graveyard .");
    let mut state = State::new();
    state.add(
        Mention::text_bound(vec!["Person".into()], 0, Interval::new(1, 2), "ner"),
        1,
    );
    let p = CompiledTokenPattern::compile(
        "(?<title>[word=/(?i)^mr?s|dr|prof/]) @person:Person",
        Unit::Word,
    )
    .unwrap();
    let matches = p.find_all(&s, 0, &state);
    assert_eq!(matches.len(), 1);
    let r = &match_to_mentions(&matches[0], &RuleInfo::new("rel", &["PersonWithTitle"]), 0)[0];
    assert_eq!(r.kind(), MentionKind::Relation);
    assert!(r.trigger().is_none());
    assert_eq!(r.arguments()["title"][0].interval(), Interval::new(0, 1));
    assert_eq!(r.arguments()["person"][0].found_by(), "ner");
}

#[test]
fn no_captures_gives_text_bound() {
    let s = words("x y");
    let m = &CompiledTokenPattern::compile("x y", Unit::Word)
        .unwrap()
        .find_all(&s, 0, &State::new())[0];
    let out = match_to_mentions(m, &RuleInfo::new("r", &["L"]), 0);
    assert_eq!(out[0].kind(), MentionKind::TextBound);
    assert_eq!(out[0].interval(), Interval::new(0, 2));
}

#[test]
fn nested_captures_are_both_recorded() {
    let s = words("a b c");
    let m = &CompiledTokenPattern::compile("(?<outer> a (?<inner> b)) c", Unit::Word)
        .unwrap()
        .find_all(&s, 0, &State::new())[0];
    assert_eq!(m.captures["inner"][0].interval, Interval::new(1, 2));
    assert_eq!(m.captures["outer"][0].interval, Interval::new(0, 2));
}

#[test]
fn trigger_capture_limits() {
    assert!(CompiledTokenPattern::compile("(?<trigger>a) (?<Trigger>b)", Unit::Word).is_err());
    assert!(CompiledTokenPattern::compile("(?<trigger>a)+", Unit::Word).is_err());
    assert!(CompiledTokenPattern::compile("(?<TRIGGER>a)? b", Unit::Word).is_ok());
}

#[test]
fn keep_flag_is_stamped() {
    let s = words("x");
    let m = &CompiledTokenPattern::compile("x", Unit::Word)
        .unwrap()
        .find_all(&s, 0, &State::new())[0];
    let mut info = RuleInfo::new("r", &["L"]);
    info.keep = false;
    assert!(!match_to_mentions(m, &info, 0)[0].keep());
}
