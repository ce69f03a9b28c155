use std::collections::BTreeSet;
use std::fmt;

use crate::constraint::TokenConstraint;
use crate::doc::Sentence;
use crate::state::State;
use crate::syntax::{Cursor, PatternError, StringMatcher};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Head to dependent (`>`).
    Outgoing,
    /// Dependent to head (`<`).
    Incoming,
}

/// A path through the dependency graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathPattern {
    Hop(Direction, StringMatcher),
    /// `>>` or `<<`: any relation.
    Wildcard(Direction),
    Filter(TokenConstraint),
    Concat(Vec<PathPattern>),
    Alternation(Vec<PathPattern>),
    Group(Box<PathPattern>),
    Repeat {
        pattern: Box<PathPattern>,
        min: usize,
        max: Option<usize>,
    },
    /// `(?= ...)` / `(?! ...)`: keeps the current token only if the
    /// sub-path does (or does not) lead somewhere.
    Lookaround {
        negated: bool,
        pattern: Box<PathPattern>,
    },
}

impl PathPattern {
    pub fn parse(src: &str) -> Result<PathPattern, PatternError> {
        let mut cur = Cursor::new(src);
        let p = Self::parse_at(&mut cur)?;
        if !cur.at_end() {
            return Err(cur.error("unexpected input in path"));
        }
        Ok(p)
    }

    pub(crate) fn parse_at(cur: &mut Cursor) -> Result<PathPattern, PatternError> {
        alternation(cur)
    }

    /// Every token reachable from some token in `start` by a walk that
    /// satisfies this path.
    pub fn traverse(
        &self,
        start: &BTreeSet<usize>,
        sentence: &Sentence,
        sentence_index: usize,
        state: &State,
    ) -> BTreeSet<usize> {
        if start.is_empty() {
            return BTreeSet::new();
        }
        let Some(graph) = sentence.graph.as_ref() else {
            return BTreeSet::new();
        };
        match self {
            PathPattern::Hop(Direction::Outgoing, m) => start
                .iter()
                .flat_map(|&t| graph.outgoing(t))
                .filter(|(r, _)| m.matches(r))
                .map(|&(_, d)| d)
                .collect(),
            PathPattern::Hop(Direction::Incoming, m) => start
                .iter()
                .flat_map(|&t| graph.incoming(t))
                .filter(|(r, _)| m.matches(r))
                .map(|&(_, s)| s)
                .collect(),
            PathPattern::Wildcard(Direction::Outgoing) => start
                .iter()
                .flat_map(|&t| graph.outgoing(t))
                .map(|&(_, d)| d)
                .collect(),
            PathPattern::Wildcard(Direction::Incoming) => start
                .iter()
                .flat_map(|&t| graph.incoming(t))
                .map(|&(_, s)| s)
                .collect(),
            PathPattern::Filter(c) => start
                .iter()
                .copied()
                .filter(|&t| t < sentence.len() && c.matches(sentence, sentence_index, t, state))
                .collect(),
            PathPattern::Concat(ps) => {
                let mut current = start.clone();
                for p in ps {
                    current = p.traverse(&current, sentence, sentence_index, state);
                    if current.is_empty() {
                        break;
                    }
                }
                current
            }
            PathPattern::Alternation(ps) => ps
                .iter()
                .flat_map(|p| p.traverse(start, sentence, sentence_index, state))
                .collect(),
            PathPattern::Group(p) => p.traverse(start, sentence, sentence_index, state),
            PathPattern::Repeat { pattern, min, max } => {
                let mut current = start.clone();
                for _ in 0..*min {
                    current = pattern.traverse(&current, sentence, sentence_index, state);
                }
                let mut result = current.clone();
                let mut frontier = current;
                let mut extra = 0;
                // a path step is a function of its input set, so only tokens
                // not seen before can lead anywhere new when unbounded
                while !frontier.is_empty() && max.is_none_or(|m| *min + extra < m) {
                    let next = pattern.traverse(&frontier, sentence, sentence_index, state);
                    frontier = match max {
                        None => next.difference(&result).copied().collect(),
                        Some(_) => next,
                    };
                    result.extend(frontier.iter().copied());
                    extra += 1;
                }
                result
            }
            PathPattern::Lookaround { negated, pattern } => start
                .iter()
                .copied()
                .filter(|&t| {
                    let found = !pattern
                        .traverse(&BTreeSet::from([t]), sentence, sentence_index, state)
                        .is_empty();
                    found != *negated
                })
                .collect(),
        }
    }
}

fn alternation(cur: &mut Cursor) -> Result<PathPattern, PatternError> {
    let mut branches = vec![concatenation(cur)?];
    while cur.eat("|") {
        branches.push(concatenation(cur)?);
    }
    Ok(if branches.len() == 1 {
        branches.pop().unwrap()
    } else {
        PathPattern::Alternation(branches)
    })
}

fn concatenation(cur: &mut Cursor) -> Result<PathPattern, PatternError> {
    let mut items = Vec::new();
    while !matches!(cur.peek(), None | Some(')' | '|')) {
        items.push(quantified(cur)?);
    }
    match items.len() {
        0 => Err(cur.error("expected a dependency path")),
        1 => Ok(items.pop().unwrap()),
        _ => Ok(PathPattern::Concat(items)),
    }
}

fn quantified(cur: &mut Cursor) -> Result<PathPattern, PatternError> {
    let atom = atom(cur)?;
    let at = cur.pos();
    let Some((min, max, exact)) = crate::token::quantifier(cur)? else {
        return Ok(atom);
    };
    if !exact && cur.peek_raw() == Some('?') {
        return Err(cur.error_at(at, "dependency paths have no lazy quantifiers"));
    }
    if matches!(atom, PathPattern::Lookaround { .. }) {
        return Err(cur.error_at(at, "lookarounds cannot be quantified"));
    }
    Ok(PathPattern::Repeat {
        pattern: Box::new(atom),
        min,
        max,
    })
}

fn atom(cur: &mut Cursor) -> Result<PathPattern, PatternError> {
    cur.skip_ws();
    if cur.eat(">>") {
        return Ok(PathPattern::Wildcard(Direction::Outgoing));
    }
    if cur.eat("<<") {
        return Ok(PathPattern::Wildcard(Direction::Incoming));
    }
    if cur.eat(">") {
        return Ok(PathPattern::Hop(Direction::Outgoing, cur.string_matcher()?));
    }
    if cur.eat("<") {
        return Ok(PathPattern::Hop(Direction::Incoming, cur.string_matcher()?));
    }
    if cur.eat("[") {
        return TokenConstraint::parse_bracketed(cur).map(PathPattern::Filter);
    }
    if cur.eat("(?=") || cur.eat("(?!") {
        let negated = cur.src()[..cur.pos()].ends_with('!');
        let pattern = alternation(cur)?;
        cur.expect(")")?;
        return Ok(PathPattern::Lookaround {
            negated,
            pattern: Box::new(pattern),
        });
    }
    if cur.rest().starts_with("(?") {
        return Err(cur.error("dependency paths support only (?= ...) and (?! ...) assertions"));
    }
    if cur.eat("(") {
        let pattern = alternation(cur)?;
        cur.expect(")")?;
        return Ok(PathPattern::Group(Box::new(pattern)));
    }
    if cur.at_string_matcher() {
        return Ok(PathPattern::Hop(Direction::Outgoing, cur.string_matcher()?));
    }
    let message = match cur.peek() {
        Some(c) => format!("unexpected `{c}` in dependency path"),
        None => "unexpected end of dependency path".to_string(),
    };
    Err(cur.error(message))
}

impl fmt::Display for PathPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathPattern::Hop(Direction::Outgoing, m) => write!(f, ">{m}"),
            PathPattern::Hop(Direction::Incoming, m) => write!(f, "<{m}"),
            PathPattern::Wildcard(Direction::Outgoing) => f.write_str(">>"),
            PathPattern::Wildcard(Direction::Incoming) => f.write_str("<<"),
            PathPattern::Filter(c) => write!(f, "{c}"),
            PathPattern::Concat(ps) => {
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    match p {
                        PathPattern::Alternation(_) => write!(f, "({p})")?,
                        _ => write!(f, "{p}")?,
                    }
                }
                Ok(())
            }
            PathPattern::Alternation(ps) => {
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
            PathPattern::Group(p) => write!(f, "({p})"),
            PathPattern::Repeat { pattern, min, max } => {
                match **pattern {
                    PathPattern::Concat(_) | PathPattern::Alternation(_) => {
                        write!(f, "({pattern})")?
                    }
                    _ => write!(f, "{pattern}")?,
                }
                match (min, max) {
                    (0, Some(1)) => f.write_str("?"),
                    (0, None) => f.write_str("*"),
                    (1, None) => f.write_str("+"),
                    (n, Some(m)) if n == m => write!(f, "{{{n}}}"),
                    (n, Some(m)) => write!(f, "{{{n},{m}}}"),
                    (n, None) => write!(f, "{{{n},}}"),
                }
            }
            PathPattern::Lookaround { negated, pattern } => {
                write!(f, "(?{}{pattern})", if *negated { '!' } else { '=' })
            }
        }
    }
}
