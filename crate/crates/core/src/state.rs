//! The store of mentions found so far in one document.

use std::collections::HashMap;

use crate::doc::Document;
use crate::mention::{mentions_equal, Interval, Mention};
use crate::taxonomy::{label_matches, Taxonomy};

/// Mentions accumulated during extraction, indexed by token, start token,
/// label and span. Insertion order is preserved and equal mentions are stored
/// once.
#[derive(Clone, Debug, Default)]
pub struct State<'d> {
    document: Option<&'d Document>,
    mentions: Vec<Mention>,
    iterations: Vec<usize>,
    by_token: HashMap<(usize, usize), Vec<usize>>,
    by_start: HashMap<(usize, usize), Vec<usize>>,
    by_sentence: HashMap<usize, Vec<usize>>,
    by_label: HashMap<String, Vec<usize>>,
    by_span: HashMap<(usize, Interval), Vec<usize>>,
}

impl<'d> State<'d> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn for_document(document: &'d Document) -> Self {
        State {
            document: Some(document),
            ..Self::default()
        }
    }

    pub fn document(&self) -> Option<&'d Document> {
        self.document
    }

    pub fn len(&self) -> usize {
        self.mentions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mentions.is_empty()
    }

    /// All stored mentions in insertion order.
    pub fn mentions(&self) -> &[Mention] {
        &self.mentions
    }

    /// The iteration in which the `index`-th mention was added.
    pub fn iteration_of(&self, index: usize) -> usize {
        self.iterations[index]
    }

    /// Iteration in which a mention equal to `m` was added, if stored.
    pub fn added_in(&self, m: &Mention) -> Option<usize> {
        self.position(m).map(|i| self.iterations[i])
    }

    fn position(&self, m: &Mention) -> Option<usize> {
        self.by_span
            .get(&(m.sentence(), m.interval()))?
            .iter()
            .copied()
            .find(|&i| mentions_equal(&self.mentions[i], m))
    }

    pub fn contains(&self, m: &Mention) -> bool {
        self.position(m).is_some()
    }

    /// Stores `m` unless an equal mention is already present. Returns whether
    /// it was added.
    pub fn add(&mut self, m: Mention, iteration: usize) -> bool {
        if self.contains(&m) {
            return false;
        }
        let idx = self.mentions.len();
        let (sentence, interval) = (m.sentence(), m.interval());
        for token in interval.start..interval.end {
            self.by_token
                .entry((sentence, token))
                .or_default()
                .push(idx);
        }
        self.by_start
            .entry((sentence, interval.start))
            .or_default()
            .push(idx);
        self.by_sentence.entry(sentence).or_default().push(idx);
        for label in m.labels() {
            self.by_label.entry(label.clone()).or_default().push(idx);
        }
        self.by_span
            .entry((sentence, interval))
            .or_default()
            .push(idx);
        self.mentions.push(m);
        self.iterations.push(iteration);
        true
    }

    /// Mentions covering `token` in `sentence`, in insertion order.
    pub fn mentions_at(&self, sentence: usize, token: usize) -> impl Iterator<Item = &Mention> {
        self.indexed(&self.by_token, (sentence, token))
    }

    /// Mentions whose interval begins at `token`, in insertion order.
    pub fn mentions_starting_at(
        &self,
        sentence: usize,
        token: usize,
    ) -> impl Iterator<Item = &Mention> {
        self.indexed(&self.by_start, (sentence, token))
    }

    /// Mentions of one sentence, in insertion order.
    pub fn mentions_in_sentence(&self, sentence: usize) -> impl Iterator<Item = &Mention> {
        self.by_sentence
            .get(&sentence)
            .into_iter()
            .flatten()
            .map(|&i| &self.mentions[i])
    }

    /// Mentions carrying exactly `label` (no taxonomy expansion).
    pub fn mentions_with_label(&self, label: &str) -> impl Iterator<Item = &Mention> {
        self.by_label
            .get(label)
            .into_iter()
            .flatten()
            .map(|&i| &self.mentions[i])
    }

    fn indexed<'a>(
        &'a self,
        index: &'a HashMap<(usize, usize), Vec<usize>>,
        key: (usize, usize),
    ) -> impl Iterator<Item = &'a Mention> {
        index
            .get(&key)
            .into_iter()
            .flatten()
            .map(|&i| &self.mentions[i])
    }

    /// Mentions covering `token` whose labels satisfy `query`.
    pub fn lookup(
        &self,
        sentence: usize,
        token: usize,
        query: &str,
        taxonomy: Option<&Taxonomy>,
    ) -> Vec<Mention> {
        self.mentions_at(sentence, token)
            .filter(|m| label_matches(m.labels(), query, taxonomy))
            .cloned()
            .collect()
    }
}
