//! The extraction loop.

use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::doc::Document;
use crate::grammar::{Grammar, Priority};
use crate::mention::Mention;
use crate::state::State;

/// A hook applied to mentions: a rule's raw matches or, for the global
/// action, everything produced in an iteration.
pub type Action = Arc<dyn Fn(Vec<Mention>, &State) -> Vec<Mention> + Send + Sync>;

/// The identity action.
pub fn default_action(mentions: Vec<Mention>, _state: &State) -> Vec<Mention> {
    mentions
}

pub fn priority_admits(priority: &Priority, iteration: usize) -> bool {
    priority.admits(iteration)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("action `{0}` is already registered")]
    DuplicateAction(String),
    #[error("action name `{0}` is reserved or empty")]
    ReservedAction(String),
    #[error("rule `{rule}` uses action `{action}`, which is not registered")]
    UnknownAction { rule: String, action: String },
    #[error("the iteration limit must be at least 1")]
    ZeroIterations,
}

/// Named actions that rules can refer to. `default` is always available.
#[derive(Clone, Default)]
pub struct ActionRegistry {
    actions: IndexMap<String, Action>,
}

impl ActionRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register_action<F>(&mut self, name: &str, action: F) -> Result<&mut Self, EngineError>
    where
        F: Fn(Vec<Mention>, &State) -> Vec<Mention> + Send + Sync + 'static,
    {
        if name.is_empty() || name == "default" {
            return Err(EngineError::ReservedAction(name.to_string()));
        }
        if self.actions.contains_key(name) {
            return Err(EngineError::DuplicateAction(name.to_string()));
        }
        self.actions.insert(name.to_string(), Arc::new(action));
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Option<Action> {
        if name == "default" {
            return Some(Arc::new(default_action));
        }
        self.actions.get(name).cloned()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        std::iter::once("default").chain(self.actions.keys().map(String::as_str))
    }
}

impl fmt::Debug for ActionRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

/// What one rule did in one iteration.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RuleTrace {
    pub rule: String,
    /// `(sentence, matches)` for sentences with at least one match.
    pub matches: Vec<(usize, usize)>,
    /// The action invoked, if the rule matched anything.
    pub action: Option<String>,
    /// Mentions returned by the action.
    pub produced: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IterationTrace {
    pub iteration: usize,
    pub rules: Vec<RuleTrace>,
    /// Mentions that survived the global action.
    pub survived: usize,
    pub added: usize,
    pub deduplicated: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub iterations: Vec<IterationTrace>,
    /// The iteration that added nothing, if the loop reached a fixpoint.
    pub fixpoint: Option<usize>,
    pub warning: Option<String>,
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for it in &self.iterations {
            writeln!(f, "iteration {}", it.iteration)?;
            for r in &it.rules {
                write!(f, "  rule {}:", r.rule)?;
                if r.matches.is_empty() {
                    write!(f, " no matches")?;
                }
                for (s, n) in &r.matches {
                    write!(f, " s{s}={n}")?;
                }
                if let Some(a) = &r.action {
                    write!(f, " action={a} produced={}", r.produced)?;
                }
                writeln!(f)?;
            }
            writeln!(
                f,
                "  added {} deduplicated {} (after global action: {})",
                it.added, it.deduplicated, it.survived
            )?;
        }
        match self.fixpoint {
            Some(i) => writeln!(f, "fixpoint at iteration {i}")?,
            None => writeln!(f, "no fixpoint reached")?,
        }
        if let Some(w) = &self.warning {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

/// The result of running a grammar over one document.
#[derive(Clone, Debug)]
pub struct Extraction<'d> {
    /// Mentions of rules with `keep: true`, in insertion order.
    pub mentions: Vec<Mention>,
    /// Number of iterations run.
    pub iterations: usize,
    /// Set when the iteration cap was hit while mentions were still being added.
    pub warning: Option<String>,
    pub trace: Trace,
    /// The final state, including `keep: false` mentions.
    pub state: State<'d>,
}

/// Applies a grammar to documents.
#[derive(Clone)]
pub struct ExtractorEngine {
    grammar: Grammar,
    rule_actions: Vec<(String, Action)>,
    global: Action,
    max_iterations: usize,
}

impl fmt::Debug for ExtractorEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtractorEngine")
            .field("rules", &self.grammar.rules.len())
            .field("max_iterations", &self.max_iterations)
            .finish()
    }
}

impl ExtractorEngine {
    pub const DEFAULT_MAX_ITERATIONS: usize = 100;

    /// An engine whose rules all use the default action.
    pub fn new(grammar: Grammar) -> Result<Self, EngineError> {
        Self::with_actions(grammar, &ActionRegistry::new())
    }

    pub fn with_actions(grammar: Grammar, actions: &ActionRegistry) -> Result<Self, EngineError> {
        Self::build(grammar, actions, Arc::new(default_action))
    }

    pub fn with_actions_and_global(
        grammar: Grammar,
        actions: &ActionRegistry,
        global: Action,
    ) -> Result<Self, EngineError> {
        Self::build(grammar, actions, global)
    }

    pub fn with_global(grammar: Grammar, global: Action) -> Result<Self, EngineError> {
        Self::build(grammar, &ActionRegistry::new(), global)
    }

    fn build(
        grammar: Grammar,
        actions: &ActionRegistry,
        global: Action,
    ) -> Result<Self, EngineError> {
        let rule_actions = grammar
            .rules
            .iter()
            .map(|r| {
                actions
                    .get(&r.spec.action)
                    .map(|a| (r.spec.action.clone(), a))
                    .ok_or_else(|| EngineError::UnknownAction {
                        rule: r.spec.name.clone(),
                        action: r.spec.action.clone(),
                    })
            })
            .collect::<Result<_, _>>()?;
        Ok(ExtractorEngine {
            grammar,
            rule_actions,
            global,
            max_iterations: Self::DEFAULT_MAX_ITERATIONS,
        })
    }

    pub fn with_max_iterations(mut self, n: usize) -> Result<Self, EngineError> {
        if n == 0 {
            return Err(EngineError::ZeroIterations);
        }
        self.max_iterations = n;
        Ok(self)
    }

    pub fn grammar(&self) -> &Grammar {
        &self.grammar
    }

    pub fn max_iterations(&self) -> usize {
        self.max_iterations
    }

    pub fn extract_from<'d>(&self, doc: &'d Document) -> Extraction<'d> {
        self.extract_with_state(doc, State::for_document(doc))
    }

    /// Continues extraction from an existing state; iterations are again
    /// numbered from 1.
    pub fn extract_with_state<'d>(
        &self,
        doc: &'d Document,
        mut state: State<'d>,
    ) -> Extraction<'d> {
        let taxonomy = self.grammar.taxonomy.as_ref();
        let bound = self.grammar.max_priority_bound();
        let mut trace = Trace::default();
        let mut iteration = 0;
        loop {
            iteration += 1;
            let mut it = IterationTrace {
                iteration,
                ..Default::default()
            };
            let mut produced = Vec::new();
            for (rule, (action_name, action)) in self.grammar.rules.iter().zip(&self.rule_actions) {
                if !rule.spec.priority.admits(iteration) {
                    continue;
                }
                let mut rt = RuleTrace {
                    rule: rule.spec.name.clone(),
                    ..Default::default()
                };
                let mut matches = Vec::new();
                for (si, sentence) in doc.sentences.iter().enumerate() {
                    let found = rule.find_mentions(sentence, si, &state, taxonomy);
                    if !found.is_empty() {
                        rt.matches.push((si, found.len()));
                        matches.extend(found);
                    }
                }
                if !matches.is_empty() {
                    let out = action(matches, &state);
                    rt.action = Some(action_name.clone());
                    rt.produced = out.len();
                    produced.extend(out);
                }
                it.rules.push(rt);
            }
            let survivors = (self.global)(produced, &state);
            it.survived = survivors.len();
            for m in survivors {
                if state.add(m, iteration) {
                    it.added += 1;
                } else {
                    it.deduplicated += 1;
                }
            }
            let added = it.added;
            trace.iterations.push(it);
            if added == 0 && iteration >= bound {
                trace.fixpoint = Some(iteration);
                break;
            }
            if iteration >= self.max_iterations {
                if added > 0 {
                    trace.warning = Some(format!(
                        "stopped after {iteration} iterations while new mentions were still being added"
                    ));
                }
                break;
            }
        }
        let mentions = state
            .mentions()
            .iter()
            .filter(|m| m.keep())
            .cloned()
            .collect();
        Extraction {
            mentions,
            iterations: iteration,
            warning: trace.warning.clone(),
            trace,
            state,
        }
    }
}
