//! Capture-aware NFA for token patterns and its backtracking executor.
//!
//! Alternatives out of a `Split` are ordered by priority, which is how greedy
//! and lazy quantifiers differ. The executor explores paths depth first in
//! that order and remembers every `(instruction, position)` pair it has
//! already entered, so each pair is expanded at most once per search. This
//! keeps matching polynomial and also cuts empty iterations of unbounded
//! loops.

use indexmap::IndexMap;

use super::ast::{Assertion, TokenPattern};
use crate::constraint::TokenConstraint;
use crate::doc::Sentence;
use crate::mention::{Interval, Mention};
use crate::state::State;
use crate::syntax::StringMatcher;

type InstId = usize;

#[derive(Clone, Debug)]
pub(crate) enum Inst {
    Match,
    Token {
        constraint: TokenConstraint,
        next: InstId,
    },
    Mention {
        label: StringMatcher,
        capture: Option<usize>,
        next: InstId,
    },
    Split(Vec<InstId>),
    Open {
        group: usize,
        next: InstId,
    },
    Close {
        group: usize,
        next: InstId,
    },
    Start {
        next: InstId,
    },
    End {
        next: InstId,
    },
    Look {
        program: Box<Program>,
        behind: Option<usize>,
        negated: bool,
        next: InstId,
    },
    /// Placeholder while a loop is being built.
    Hole,
}

/// A compiled token pattern: one start instruction and one `Match`.
#[derive(Clone, Debug)]
pub struct Program {
    insts: Vec<Inst>,
    start: InstId,
    accept: InstId,
    /// Capture name per group id; plain groups and mention captures share
    /// the numbering.
    names: Vec<String>,
}

impl Program {
    pub fn compile(pattern: &TokenPattern) -> Program {
        let mut c = Compiler {
            insts: vec![Inst::Match],
            names: Vec::new(),
        };
        let start = c.compile(pattern, 0);
        Program {
            insts: c.insts,
            start,
            accept: 0,
            names: c.names,
        }
    }

    pub fn len(&self) -> usize {
        self.insts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.insts.is_empty()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn accept(&self) -> usize {
        self.accept
    }
}

struct Compiler {
    insts: Vec<Inst>,
    names: Vec<String>,
}

impl Compiler {
    fn push(&mut self, inst: Inst) -> InstId {
        self.insts.push(inst);
        self.insts.len() - 1
    }

    fn group(&mut self, name: &str) -> usize {
        self.names.push(name.to_string());
        self.names.len() - 1
    }

    /// Compiles `p` so that a successful path continues at `next`; returns
    /// the entry instruction.
    fn compile(&mut self, p: &TokenPattern, next: InstId) -> InstId {
        match p {
            TokenPattern::Constraint(c) => self.push(Inst::Token {
                constraint: c.clone(),
                next,
            }),
            TokenPattern::Concat(ps) => ps.iter().rev().fold(next, |next, p| self.compile(p, next)),
            TokenPattern::Alternation(ps) => {
                let entries = ps.iter().map(|p| self.compile(p, next)).collect();
                self.push(Inst::Split(entries))
            }
            TokenPattern::Group(p) => self.compile(p, next),
            TokenPattern::Capture { name, pattern } => {
                let group = self.group(name);
                let close = self.push(Inst::Close { group, next });
                let body = self.compile(pattern, close);
                self.push(Inst::Open { group, next: body })
            }
            TokenPattern::Mention { name, label } => {
                let capture = name.as_deref().map(|n| self.group(n));
                self.push(Inst::Mention {
                    label: label.clone(),
                    capture,
                    next,
                })
            }
            TokenPattern::Repeat {
                pattern,
                min,
                max,
                lazy,
            } => {
                let order = |body: InstId, skip: InstId| {
                    if *lazy {
                        vec![skip, body]
                    } else {
                        vec![body, skip]
                    }
                };
                let mut entry = match max {
                    None => {
                        let lp = self.push(Inst::Hole);
                        let body = self.compile(pattern, lp);
                        self.insts[lp] = Inst::Split(order(body, next));
                        lp
                    }
                    Some(max) => {
                        let mut entry = next;
                        for _ in *min..*max {
                            let body = self.compile(pattern, entry);
                            entry = self.push(Inst::Split(order(body, next)));
                        }
                        entry
                    }
                };
                for _ in 0..*min {
                    entry = self.compile(pattern, entry);
                }
                entry
            }
            TokenPattern::Assertion(a) => match a {
                Assertion::Start => self.push(Inst::Start { next }),
                Assertion::End => self.push(Inst::End { next }),
                Assertion::Lookahead { negated, pattern } => self.push(Inst::Look {
                    program: Box::new(Program::compile(pattern)),
                    behind: None,
                    negated: *negated,
                    next,
                }),
                Assertion::Lookbehind {
                    negated,
                    pattern,
                    len,
                } => self.push(Inst::Look {
                    program: Box::new(Program::compile(pattern)),
                    behind: Some(*len),
                    negated: *negated,
                    next,
                }),
            },
        }
    }
}

/// One captured span; mention captures carry the consumed mention.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Capture {
    pub interval: Interval,
    pub mention: Option<Mention>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenMatch {
    pub interval: Interval,
    /// Capture name to captured spans in the order they closed.
    pub captures: IndexMap<String, Vec<Capture>>,
}

#[derive(Clone)]
enum CapEvent {
    Open(usize, usize),
    Close(usize, usize),
    Mention(usize, Mention),
}

struct Frame {
    pc: InstId,
    pos: usize,
    log_len: usize,
    event: Option<CapEvent>,
}

/// Read-only inputs to one search.
pub(crate) struct Input<'a, 'd> {
    pub sentence: &'a Sentence,
    pub sentence_index: usize,
    pub state: &'a State<'d>,
}

/// Reusable per-pattern search scratch.
pub(crate) struct Searcher<'p> {
    program: &'p Program,
    visited: Vec<bool>,
    stride: usize,
    stack: Vec<Frame>,
    log: Vec<CapEvent>,
}

impl<'p> Searcher<'p> {
    pub fn new(program: &'p Program, sentence_len: usize) -> Self {
        let stride = sentence_len + 1;
        Searcher {
            program,
            visited: vec![false; program.insts.len() * stride],
            stride,
            stack: Vec::new(),
            log: Vec::new(),
        }
    }

    pub fn reset(&mut self) {
        self.visited.iter_mut().for_each(|v| *v = false);
    }

    /// Highest-priority match starting exactly at `start`. Returns the end
    /// position; captures are left in the log.
    pub fn search_at(&mut self, input: &Input, start: usize) -> Option<usize> {
        let len = input.sentence.len();
        self.stack.clear();
        self.log.clear();
        self.stack.push(Frame {
            pc: self.program.start,
            pos: start,
            log_len: 0,
            event: None,
        });
        while let Some(frame) = self.stack.pop() {
            self.log.truncate(frame.log_len);
            if let Some(e) = frame.event {
                self.log.push(e);
            }
            let (mut pc, mut pos) = (frame.pc, frame.pos);
            loop {
                let slot = pc * self.stride + pos;
                if self.visited[slot] {
                    break;
                }
                self.visited[slot] = true;
                match &self.program.insts[pc] {
                    Inst::Match => return Some(pos),
                    Inst::Token { constraint, next } => {
                        if pos < len
                            && constraint.matches(
                                input.sentence,
                                input.sentence_index,
                                pos,
                                input.state,
                            )
                        {
                            pc = *next;
                            pos += 1;
                        } else {
                            break;
                        }
                    }
                    Inst::Mention {
                        label,
                        capture,
                        next,
                    } => {
                        let mut candidates: Vec<&Mention> = input
                            .state
                            .mentions_starting_at(input.sentence_index, pos)
                            .filter(|m| m.labels().iter().any(|l| label.matches(l)))
                            .collect();
                        // longest first; stable keeps insertion order on ties
                        candidates.sort_by_key(|m| std::cmp::Reverse(m.interval().len()));
                        let log_len = self.log.len();
                        for m in candidates.into_iter().rev() {
                            self.stack.push(Frame {
                                pc: *next,
                                pos: m.interval().end,
                                log_len,
                                event: capture.map(|g| CapEvent::Mention(g, m.clone())),
                            });
                        }
                        break;
                    }
                    Inst::Split(alts) => {
                        let log_len = self.log.len();
                        for &alt in alts[1..].iter().rev() {
                            self.stack.push(Frame {
                                pc: alt,
                                pos,
                                log_len,
                                event: None,
                            });
                        }
                        pc = alts[0];
                    }
                    Inst::Open { group, next } => {
                        self.log.push(CapEvent::Open(*group, pos));
                        pc = *next;
                    }
                    Inst::Close { group, next } => {
                        self.log.push(CapEvent::Close(*group, pos));
                        pc = *next;
                    }
                    Inst::Start { next } => {
                        if pos != 0 {
                            break;
                        }
                        pc = *next;
                    }
                    Inst::End { next } => {
                        if pos != len {
                            break;
                        }
                        pc = *next;
                    }
                    Inst::Look {
                        program,
                        behind,
                        negated,
                        next,
                    } => {
                        let found = match behind {
                            None => Searcher::new(program, len).search_at(input, pos).is_some(),
                            Some(n) => {
                                pos >= *n
                                    && Searcher::new(program, len)
                                        .search_at(input, pos - n)
                                        .is_some()
                            }
                        };
                        if found == *negated {
                            break;
                        }
                        pc = *next;
                    }
                    Inst::Hole => unreachable!("unpatched loop"),
                }
            }
        }
        None
    }

    fn captures(&self) -> IndexMap<String, Vec<Capture>> {
        let mut out: IndexMap<String, Vec<Capture>> = IndexMap::new();
        let mut open: Vec<(usize, usize)> = Vec::new();
        for e in &self.log {
            match e {
                CapEvent::Open(g, pos) => open.push((*g, *pos)),
                CapEvent::Close(g, pos) => {
                    if let Some(i) = open.iter().rposition(|(og, _)| og == g) {
                        let (_, start) = open.remove(i);
                        out.entry(self.program.names[*g].clone())
                            .or_default()
                            .push(Capture {
                                interval: Interval::new(start, *pos),
                                mention: None,
                            });
                    }
                }
                CapEvent::Mention(g, m) => out
                    .entry(self.program.names[*g].clone())
                    .or_default()
                    .push(Capture {
                        interval: m.interval(),
                        mention: Some(m.clone()),
                    }),
            }
        }
        out
    }
}

/// All non-overlapping matches, scanning start positions left to right.
pub(crate) fn find_all(program: &Program, input: &Input) -> Vec<TokenMatch> {
    let len = input.sentence.len();
    let mut searcher = Searcher::new(program, len);
    let mut out = Vec::new();
    let mut start = 0;
    while start <= len {
        match searcher.search_at(input, start) {
            Some(end) => {
                out.push(TokenMatch {
                    interval: Interval::new(start, end),
                    captures: searcher.captures(),
                });
                // the successful path left marks that are not failures
                searcher.reset();
                start = if end > start { end } else { start + 1 };
            }
            None => start += 1,
        }
    }
    out
}
