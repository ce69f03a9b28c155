//! Surface (token) patterns.

mod ast;
mod nfa;

pub(crate) use ast::quantifier;
pub use ast::{Assertion, TokenPattern, Unit};
pub use nfa::{Capture, Program, TokenMatch};

use crate::doc::Sentence;
use crate::mention::{Arguments, Mention};
use crate::rule::RuleInfo;
use crate::state::State;
use crate::syntax::PatternError;

/// A parsed token pattern together with its NFA.
#[derive(Clone, Debug)]
pub struct CompiledTokenPattern {
    pattern: TokenPattern,
    program: Program,
}

impl CompiledTokenPattern {
    pub fn compile(src: &str, unit: Unit) -> Result<Self, PatternError> {
        let pattern = TokenPattern::parse(src, unit)?;
        check_trigger_captures(&pattern).map_err(|m| PatternError::at(src, 0, m))?;
        Ok(Self::from_pattern(pattern))
    }

    pub fn from_pattern(pattern: TokenPattern) -> Self {
        let program = Program::compile(&pattern);
        CompiledTokenPattern { pattern, program }
    }

    pub fn pattern(&self) -> &TokenPattern {
        &self.pattern
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    /// Non-overlapping matches in `sentence`, left to right.
    pub fn find_all(
        &self,
        sentence: &Sentence,
        sentence_index: usize,
        state: &State,
    ) -> Vec<TokenMatch> {
        nfa::find_all(
            &self.program,
            &nfa::Input {
                sentence,
                sentence_index,
                state,
            },
        )
    }
}

fn is_trigger(name: &str) -> bool {
    name.eq_ignore_ascii_case("trigger")
}

/// A pattern may produce at most one trigger per match.
fn check_trigger_captures(p: &TokenPattern) -> Result<(), String> {
    let count = p
        .capture_names()
        .into_iter()
        .filter(|n| is_trigger(n))
        .count();
    if count > 1 {
        return Err("a token pattern may capture at most one trigger".to_string());
    }
    let mut repeated = false;
    p.walk(&mut |node| {
        if let TokenPattern::Repeat { pattern, max, .. } = node {
            if *max != Some(1) && pattern.capture_names().into_iter().any(is_trigger) {
                repeated = true;
            }
        }
    });
    if repeated {
        return Err("the trigger capture cannot be repeated".to_string());
    }
    Ok(())
}

/// Turns one token match into mentions: a text-bound mention when nothing
/// was captured, an event when a capture is named `trigger` (any case), and
/// a relation otherwise. Zero-width matches and captures produce nothing.
pub fn match_to_mentions(m: &TokenMatch, rule: &RuleInfo, sentence: usize) -> Vec<Mention> {
    let text_bound =
        |interval| Mention::text_bound(rule.labels.clone(), sentence, interval, &rule.name);
    let mut trigger = None;
    let mut arguments = Arguments::new();
    for (name, caps) in &m.captures {
        for cap in caps {
            if is_trigger(name) {
                if trigger.is_none() && !cap.interval.is_empty() {
                    trigger = Some(text_bound(cap.interval));
                }
                continue;
            }
            let arg = match &cap.mention {
                Some(existing) => existing.clone(),
                None if cap.interval.is_empty() => continue,
                None => text_bound(cap.interval),
            };
            arguments.entry(name.clone()).or_default().push(arg);
        }
    }
    let out = match trigger {
        Some(t) => Mention::event(rule.labels.clone(), sentence, t, arguments, &rule.name),
        None if !arguments.is_empty() => {
            Mention::relation(rule.labels.clone(), sentence, arguments, &rule.name)
        }
        None if m.interval.is_empty() => return Vec::new(),
        None => text_bound(m.interval),
    };
    vec![rule.stamp(out)]
}

#[cfg(test)]
mod tests;
