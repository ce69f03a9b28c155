//! Rule output: text-bound spans, relations and events.

use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::doc::Document;

/// Half-open token interval `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Interval { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, token: usize) -> bool {
        self.start <= token && token < self.end
    }

    /// Smallest interval covering both.
    pub fn hull(self, other: Interval) -> Interval {
        Interval::new(self.start.min(other.start), self.end.max(other.end))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MentionKind {
    TextBound,
    Relation,
    Event,
}

impl MentionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MentionKind::TextBound => "TextBound",
            MentionKind::Relation => "Relation",
            MentionKind::Event => "Event",
        }
    }
}

pub type Arguments = IndexMap<String, Vec<Mention>>;

#[derive(Debug)]
struct MentionData {
    kind: MentionKind,
    labels: Vec<String>,
    sentence: usize,
    interval: Interval,
    arguments: Arguments,
    trigger: Option<Mention>,
    found_by: String,
    keep: bool,
}

/// An immutable, cheaply clonable mention.
///
/// Equality ignores `found_by` and `keep`, and compares the mentions stored
/// under each argument name as multisets.
#[derive(Clone)]
pub struct Mention(Arc<MentionData>);

impl Mention {
    pub fn text_bound(
        labels: Vec<String>,
        sentence: usize,
        interval: Interval,
        found_by: impl Into<String>,
    ) -> Mention {
        assert!(!labels.is_empty(), "a mention needs at least one label");
        Mention(Arc::new(MentionData {
            kind: MentionKind::TextBound,
            labels,
            sentence,
            interval,
            arguments: Arguments::new(),
            trigger: None,
            found_by: found_by.into(),
            keep: true,
        }))
    }

    /// A relation over `arguments`; its interval spans every argument.
    pub fn relation(
        labels: Vec<String>,
        sentence: usize,
        arguments: Arguments,
        found_by: impl Into<String>,
    ) -> Mention {
        assert!(!labels.is_empty(), "a mention needs at least one label");
        let interval = span(None, &arguments).expect("a relation needs at least one argument");
        Mention(Arc::new(MentionData {
            kind: MentionKind::Relation,
            labels,
            sentence,
            interval,
            arguments,
            trigger: None,
            found_by: found_by.into(),
            keep: true,
        }))
    }

    /// An event anchored on a text-bound `trigger`; its interval spans the
    /// trigger and every argument.
    pub fn event(
        labels: Vec<String>,
        sentence: usize,
        trigger: Mention,
        arguments: Arguments,
        found_by: impl Into<String>,
    ) -> Mention {
        assert!(!labels.is_empty(), "a mention needs at least one label");
        assert_eq!(
            trigger.kind(),
            MentionKind::TextBound,
            "triggers are text-bound"
        );
        let interval = span(Some(&trigger), &arguments).unwrap_or(trigger.interval());
        Mention(Arc::new(MentionData {
            kind: MentionKind::Event,
            labels,
            sentence,
            interval,
            arguments,
            trigger: Some(trigger),
            found_by: found_by.into(),
            keep: true,
        }))
    }

    /// Same mention with a different `keep` flag.
    pub fn with_keep(&self, keep: bool) -> Mention {
        if self.0.keep == keep {
            return self.clone();
        }
        let d = &self.0;
        Mention(Arc::new(MentionData {
            kind: d.kind,
            labels: d.labels.clone(),
            sentence: d.sentence,
            interval: d.interval,
            arguments: d.arguments.clone(),
            trigger: d.trigger.clone(),
            found_by: d.found_by.clone(),
            keep,
        }))
    }

    pub fn kind(&self) -> MentionKind {
        self.0.kind
    }

    pub fn labels(&self) -> &[String] {
        &self.0.labels
    }

    /// The first, most specific label.
    pub fn label(&self) -> &str {
        &self.0.labels[0]
    }

    pub fn sentence(&self) -> usize {
        self.0.sentence
    }

    pub fn interval(&self) -> Interval {
        self.0.interval
    }

    pub fn arguments(&self) -> &Arguments {
        &self.0.arguments
    }

    pub fn trigger(&self) -> Option<&Mention> {
        self.0.trigger.as_ref()
    }

    pub fn found_by(&self) -> &str {
        &self.0.found_by
    }

    pub fn keep(&self) -> bool {
        self.0.keep
    }

    /// Exact label membership, without taxonomy expansion.
    pub fn has_label(&self, label: &str) -> bool {
        self.0.labels.iter().any(|l| l == label)
    }

    /// The covered words joined by spaces.
    pub fn text(&self, doc: &Document) -> String {
        let i = self.interval();
        doc.sentences[self.sentence()].text(i.start, i.end)
    }

    /// Character offsets `[start, end)` of the covered tokens.
    pub fn character_offsets(&self, doc: &Document) -> (usize, usize) {
        let s = &doc.sentences[self.sentence()];
        let i = self.interval();
        if i.is_empty() {
            let at = s.start_offsets.get(i.start).copied().unwrap_or(0);
            return (at, at);
        }
        (s.start_offsets[i.start], s.end_offsets[i.end - 1])
    }

    /// Every mention reachable through triggers and arguments, excluding
    /// `self`.
    pub fn descendants(&self) -> Vec<Mention> {
        let mut out = Vec::new();
        let mut stack: Vec<&Mention> = vec![self];
        while let Some(m) = stack.pop() {
            for child in m.0.trigger.iter().chain(m.0.arguments.values().flatten()) {
                out.push(child.clone());
                stack.push(child);
            }
        }
        out
    }

    fn ptr_eq(&self, other: &Mention) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

fn span(trigger: Option<&Mention>, arguments: &Arguments) -> Option<Interval> {
    trigger
        .into_iter()
        .chain(arguments.values().flatten())
        .map(Mention::interval)
        .reduce(Interval::hull)
}

/// Structural equality over kind, labels, sentence, interval, trigger and
/// arguments (per name, as multisets).
pub fn mentions_equal(a: &Mention, b: &Mention) -> bool {
    if a.ptr_eq(b) {
        return true;
    }
    let (x, y) = (&a.0, &b.0);
    if x.kind != y.kind
        || x.sentence != y.sentence
        || x.interval != y.interval
        || x.labels != y.labels
        || x.arguments.len() != y.arguments.len()
    {
        return false;
    }
    match (&x.trigger, &y.trigger) {
        (None, None) => {}
        (Some(t), Some(u)) if mentions_equal(t, u) => {}
        _ => return false,
    }
    x.arguments
        .iter()
        .all(|(name, xs)| match y.arguments.get(name) {
            Some(ys) => multiset_equal(xs, ys),
            None => false,
        })
}

fn multiset_equal(xs: &[Mention], ys: &[Mention]) -> bool {
    if xs.len() != ys.len() {
        return false;
    }
    let mut used = vec![false; ys.len()];
    'outer: for x in xs {
        for (j, y) in ys.iter().enumerate() {
            if !used[j] && mentions_equal(x, y) {
                used[j] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

impl PartialEq for Mention {
    fn eq(&self, other: &Self) -> bool {
        mentions_equal(self, other)
    }
}

impl Eq for Mention {}

impl fmt::Debug for Mention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = &self.0;
        let mut s = f.debug_struct(d.kind.as_str());
        s.field("labels", &d.labels)
            .field("sentence", &d.sentence)
            .field("interval", &(d.interval.start..d.interval.end))
            .field("found_by", &d.found_by);
        if let Some(t) = &d.trigger {
            s.field("trigger", t);
        }
        if !d.arguments.is_empty() {
            s.field("arguments", &d.arguments);
        }
        s.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tb(label: &str, start: usize, end: usize, by: &str) -> Mention {
        Mention::text_bound(vec![label.to_string()], 0, Interval::new(start, end), by)
    }

    #[test]
    fn found_by_is_ignored() {
        assert_eq!(tb("Protein", 3, 4, "a"), tb("Protein", 3, 4, "b"));
        assert_ne!(tb("Protein", 3, 4, "a"), tb("Gene", 3, 4, "a"));
        assert_ne!(tb("Protein", 3, 4, "a"), tb("Protein", 3, 5, "a"));
    }

    #[test]
    fn argument_order_is_ignored() {
        let (a, b) = (tb("P", 0, 1, "r"), tb("P", 2, 3, "r"));
        let trig = tb("E", 1, 2, "r");
        let mk = |args: Vec<Mention>| {
            let mut map = Arguments::new();
            map.insert("x".to_string(), args);
            Mention::event(vec!["E".into()], 0, trig.clone(), map, "r")
        };
        assert_eq!(
            mk(vec![a.clone(), b.clone()]),
            mk(vec![b.clone(), a.clone()])
        );
        assert_ne!(
            mk(vec![a.clone(), a.clone()]),
            mk(vec![a.clone(), b.clone()])
        );
    }

    #[test]
    fn composite_interval_is_hull() {
        let mut args = Arguments::new();
        args.insert("a".into(), vec![tb("P", 5, 7, "r")]);
        args.insert("b".into(), vec![tb("P", 0, 1, "r")]);
        let e = Mention::event(vec!["E".into()], 0, tb("E", 3, 4, "r"), args.clone(), "r");
        assert_eq!(e.interval(), Interval::new(0, 7));
        let r = Mention::relation(vec!["R".into()], 0, args, "r");
        assert_eq!(r.interval(), Interval::new(0, 7));
        assert_eq!(r.kind(), MentionKind::Relation);
        assert!(r.trigger().is_none());
    }

    #[test]
    fn keep_does_not_affect_equality() {
        let m = tb("P", 0, 1, "r");
        let hidden = m.with_keep(false);
        assert!(!hidden.keep());
        assert_eq!(m, hidden);
    }
}
