//! Shared fixtures, reference implementations and generators for the
//! integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use cascade::dep::{Direction, PathPattern};
use cascade::token::Assertion;
use cascade::{
    parse_document, ArgQuantifier, DependencyGraph, Document, Edge, Interval, Mention, Sentence,
    State, TokenPattern,
};
use proptest::prelude::*;

pub fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).expect("fixture exists")
}

pub fn fixture_doc(name: &str) -> Document {
    parse_document(fixture_text(name).as_bytes()).expect("fixture document parses")
}

// ---------------------------------------------------------------------------
// Token patterns: a continuation-passing backtracking matcher over the AST.
// Alternatives are tried in priority order, so the first end position that
// reaches the continuation is the match. An iteration of an unbounded loop
// that consumes nothing is a dead end.

pub struct TokenOracle<'a> {
    pub sentence: &'a Sentence,
    pub state: &'a State<'a>,
}

impl TokenOracle<'_> {
    fn go(&self, p: &TokenPattern, pos: usize, k: &mut dyn FnMut(usize) -> bool) -> bool {
        let len = self.sentence.len();
        match p {
            TokenPattern::Constraint(c) => {
                pos < len && c.matches(self.sentence, 0, pos, self.state) && k(pos + 1)
            }
            TokenPattern::Concat(ps) => self.seq(ps, pos, k),
            TokenPattern::Alternation(ps) => ps.iter().any(|alt| self.go(alt, pos, k)),
            TokenPattern::Group(inner) | TokenPattern::Capture { pattern: inner, .. } => {
                self.go(inner, pos, k)
            }
            TokenPattern::Mention { label, .. } => {
                let mut ends: Vec<(usize, usize)> = self
                    .state
                    .mentions_starting_at(0, pos)
                    .enumerate()
                    .filter(|(_, m)| m.labels().iter().any(|l| label.matches(l)))
                    .map(|(i, m)| (m.interval().end, i))
                    .collect();
                // longest first, earlier insertion first on ties
                ends.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
                ends.into_iter().any(|(end, _)| k(end))
            }
            TokenPattern::Repeat {
                pattern,
                min,
                max,
                lazy,
            } => self.repeat(pattern, *min, *max, *lazy, 0, pos, k),
            TokenPattern::Assertion(a) => {
                let ok = match a {
                    Assertion::Start => pos == 0,
                    Assertion::End => pos == len,
                    Assertion::Lookahead { negated, pattern } => {
                        self.go(pattern, pos, &mut |_| true) != *negated
                    }
                    Assertion::Lookbehind {
                        negated,
                        pattern,
                        len: n,
                    } => {
                        let found = pos >= *n && self.go(pattern, pos - n, &mut |end| end == pos);
                        found != *negated
                    }
                };
                ok && k(pos)
            }
        }
    }

    fn seq(&self, ps: &[TokenPattern], pos: usize, k: &mut dyn FnMut(usize) -> bool) -> bool {
        match ps.split_first() {
            None => k(pos),
            Some((first, rest)) => self.go(first, pos, &mut |q| self.seq(rest, q, k)),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn repeat(
        &self,
        p: &TokenPattern,
        min: usize,
        max: Option<usize>,
        lazy: bool,
        done: usize,
        pos: usize,
        k: &mut dyn FnMut(usize) -> bool,
    ) -> bool {
        if done < min {
            return self.go(p, pos, &mut |q| self.repeat(p, min, max, lazy, done + 1, q, k));
        }
        if max == Some(done) {
            return k(pos);
        }
        let unbounded = max.is_none();
        let more = |k: &mut dyn FnMut(usize) -> bool| {
            self.go(p, pos, &mut |q| {
                (!unbounded || q != pos) && self.repeat(p, min, max, lazy, done + 1, q, k)
            })
        };
        if lazy && k(pos) {
            return true;
        }
        more(k) || (!lazy && k(pos))
    }

    /// End of the highest-priority match starting at `start`.
    pub fn match_at(&self, p: &TokenPattern, start: usize) -> Option<usize> {
        let mut found = None;
        self.go(p, start, &mut |end| {
            found = Some(end);
            true
        });
        found
    }

    /// Non-overlapping matches scanning left to right.
    pub fn find_all(&self, p: &TokenPattern) -> Vec<(usize, usize)> {
        let len = self.sentence.len();
        let mut out = Vec::new();
        let mut start = 0;
        while start <= len {
            match self.match_at(p, start) {
                Some(end) => {
                    out.push((start, end));
                    start = if end > start { end } else { start + 1 };
                }
                None => start += 1,
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Dependency paths: per-token walk enumeration. Repetition is unrolled up to
// `min + tokens + 1` steps, which is enough to see every reachable token.

pub fn walk_ends(p: &PathPattern, t: usize, s: &Sentence, state: &State) -> BTreeSet<usize> {
    let graph = s.graph.as_ref().expect("graph");
    match p {
        PathPattern::Hop(dir, m) => graph
            .edges()
            .iter()
            .filter_map(|e| {
                let (from, to) = match dir {
                    Direction::Outgoing => (e.source, e.destination),
                    Direction::Incoming => (e.destination, e.source),
                };
                (from == t && m.matches(&e.relation)).then_some(to)
            })
            .collect(),
        PathPattern::Wildcard(dir) => graph
            .edges()
            .iter()
            .filter_map(|e| match dir {
                Direction::Outgoing => (e.source == t).then_some(e.destination),
                Direction::Incoming => (e.destination == t).then_some(e.source),
            })
            .collect(),
        PathPattern::Filter(c) => {
            if c.matches(s, 0, t, state) {
                BTreeSet::from([t])
            } else {
                BTreeSet::new()
            }
        }
        PathPattern::Concat(ps) => {
            let mut current = BTreeSet::from([t]);
            for q in ps {
                current = current.iter().flat_map(|&u| walk_ends(q, u, s, state)).collect();
            }
            current
        }
        PathPattern::Alternation(ps) => ps.iter().flat_map(|q| walk_ends(q, t, s, state)).collect(),
        PathPattern::Group(q) => walk_ends(q, t, s, state),
        PathPattern::Repeat { pattern, min, max } => {
            let cap = max.unwrap_or(min + s.len() + 1);
            let mut out = BTreeSet::new();
            let mut current = BTreeSet::from([t]);
            for step in 0..=cap {
                if step >= *min {
                    out.extend(current.iter().copied());
                }
                current = current
                    .iter()
                    .flat_map(|&u| walk_ends(pattern, u, s, state))
                    .collect();
            }
            out
        }
        PathPattern::Lookaround { negated, pattern } => {
            if walk_ends(pattern, t, s, state).is_empty() == *negated {
                BTreeSet::from([t])
            } else {
                BTreeSet::new()
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Argument expansion: closed-form count.

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

pub fn expansion_count(args: &[(ArgQuantifier, usize)]) -> usize {
    args.iter()
        .map(|&(q, n)| match q {
            ArgQuantifier::One => n,
            ArgQuantifier::Optional => n + usize::from(n == 0),
            ArgQuantifier::OneOrMore => usize::from(n >= 1),
            ArgQuantifier::ZeroOrMore => 1,
            ArgQuantifier::Exactly(k) => binomial(n, k),
        })
        .product()
}

// ---------------------------------------------------------------------------
// Generators.

pub const WORDS: [&str; 3] = ["a", "b", "c"];
pub const TAGS: [&str; 2] = ["X", "Y"];
pub const RELATIONS: [&str; 3] = ["x", "y", "z"];

pub fn sentence_from(words: &[usize], tags: &[usize], edges: &[(usize, usize, usize)]) -> Sentence {
    let mut s = Sentence::from_words(&words.iter().map(|&w| WORDS[w]).collect::<Vec<_>>());
    s.tags = Some(tags.iter().map(|&t| TAGS[t].to_string()).collect());
    let mut seen = BTreeSet::new();
    let edges: Vec<Edge> = edges
        .iter()
        .filter(|&&(a, b, _)| a < s.len() && b < s.len())
        .filter(|e| seen.insert(**e))
        .map(|&(source, destination, r)| Edge {
            source,
            destination,
            relation: RELATIONS[r].to_string(),
        })
        .collect();
    s.graph = Some(DependencyGraph::new(s.len(), edges, Vec::<usize>::new()).expect("valid edges"));
    s
}

/// A sentence of up to `max_len` tokens (at least one) with tags and a
/// random dependency graph.
pub fn arb_sentence(max_len: usize) -> impl Strategy<Value = Sentence> {
    (1..=max_len).prop_flat_map(|n| {
        (
            prop::collection::vec(0..WORDS.len(), n),
            prop::collection::vec(0..TAGS.len(), n),
            prop::collection::vec((0..n, 0..n, 0..RELATIONS.len()), 0..=2 * n),
        )
            .prop_map(|(w, t, e)| sentence_from(&w, &t, &e))
    })
}

/// Random `M`-labeled mentions over a sentence of length `n`.
pub fn mentions_for(n: usize, spans: &[(usize, usize)]) -> Vec<Mention> {
    spans
        .iter()
        .map(|&(a, l)| {
            let start = a % n;
            let end = (start + 1 + l).min(n);
            Mention::text_bound(vec!["M".into()], 0, Interval::new(start, end), "gen")
        })
        .collect()
}

fn token_atom() -> impl Strategy<Value = String> {
    prop_oneof![
        4 => prop::sample::select(WORDS.to_vec()).prop_map(String::from),
        1 => Just("[]".to_string()),
        1 => prop::sample::select(TAGS.to_vec()).prop_map(|t| format!("[tag={t}]")),
        1 => Just("[!word=a]".to_string()),
        1 => Just("[word=b | tag=X]".to_string()),
        1 => Just("@M".to_string()),
        1 => Just("@m:M".to_string()),
        1 => Just("^".to_string()),
        1 => Just("$".to_string()),
    ]
}

const QUANTIFIERS: [&str; 14] = [
    "?", "*", "+", "??", "*?", "+?", "{2}", "{1,2}", "{1,2}?", "{,2}", "{0,2}?", "{1,}", "{2,}?",
    "{0,1}",
];

/// Token pattern source text with at most `budget` nodes.
pub fn token_pattern_src(budget: u32) -> BoxedStrategy<String> {
    let leaf = token_atom().boxed();
    leaf.prop_recursive(3, budget, 3, |inner| {
        prop_oneof![
            3 => prop::collection::vec(inner.clone(), 2..=3).prop_map(|v| v.join(" ")),
            2 => prop::collection::vec(inner.clone(), 2..=3).prop_map(|v| format!("({})", v.join(" | "))),
            3 => (inner.clone(), prop::sample::select(QUANTIFIERS.to_vec()))
                .prop_map(|(p, q)| format!("({p}){q}")),
            1 => inner.clone().prop_map(|p| format!("(?<g>{p})")),
            1 => inner.clone().prop_map(|p| format!("(?={p})")),
            1 => inner.clone().prop_map(|p| format!("(?!{p})")),
            1 => prop::sample::select(WORDS.to_vec()).prop_map(|w| format!("(?<={w})")),
            1 => prop::sample::select(WORDS.to_vec()).prop_map(|w| format!("(?<![]{w})")),
        ]
    })
    .boxed()
}

fn path_atom() -> impl Strategy<Value = String> {
    prop_oneof![
        3 => prop::sample::select(RELATIONS.to_vec()).prop_map(String::from),
        2 => prop::sample::select(RELATIONS.to_vec()).prop_map(|r| format!("<{r}")),
        1 => Just("/x|y/".to_string()),
        1 => Just("</^[yz]$/".to_string()),
        1 => Just(">>".to_string()),
        1 => Just("<<".to_string()),
        1 => prop::sample::select(TAGS.to_vec()).prop_map(|t| format!("[tag={t}]")),
        1 => Just("[word=a | word=c]".to_string()),
    ]
}

const PATH_QUANTIFIERS: [&str; 8] = ["?", "*", "+", "{2}", "{1,2}", "{,2}", "{2,}", "{0,3}"];

/// Dependency path source text.
pub fn path_src(budget: u32) -> BoxedStrategy<String> {
    path_atom()
        .boxed()
        .prop_recursive(3, budget, 3, |inner| {
            prop_oneof![
                3 => prop::collection::vec(inner.clone(), 2..=3).prop_map(|v| v.join(" ")),
                2 => prop::collection::vec(inner.clone(), 2..=3).prop_map(|v| format!("({})", v.join(" | "))),
                3 => (inner.clone(), prop::sample::select(PATH_QUANTIFIERS.to_vec()))
                    .prop_map(|(p, q)| format!("({p}){q}")),
                1 => inner.clone().prop_map(|p| format!("(?={p})")),
                1 => inner.clone().prop_map(|p| format!("(?!{p})")),
            ]
        })
        .boxed()
}

pub fn count_nodes(p: &TokenPattern) -> usize {
    let mut n = 0;
    p.walk(&mut |_| n += 1);
    n
}
