use std::fmt;

use crate::constraint::{Field, TokenConstraint};
use crate::syntax::{Cursor, PatternError, StringMatcher};

/// Which token field a bare string in a token pattern matches.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Unit {
    #[default]
    Word,
    Tag,
}

impl Unit {
    pub fn field(self) -> Field {
        match self {
            Unit::Word => Field::Word,
            Unit::Tag => Field::Tag,
        }
    }

    pub fn parse(s: &str) -> Option<Unit> {
        match s {
            "word" => Some(Unit::Word),
            "tag" => Some(Unit::Tag),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Unit::Word => "word",
            Unit::Tag => "tag",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Assertion {
    /// `^`
    Start,
    /// `$`
    End,
    Lookahead {
        negated: bool,
        pattern: Box<TokenPattern>,
    },
    /// `len` is the fixed number of tokens the sub-pattern spans.
    Lookbehind {
        negated: bool,
        pattern: Box<TokenPattern>,
        len: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenPattern {
    Constraint(TokenConstraint),
    Concat(Vec<TokenPattern>),
    Alternation(Vec<TokenPattern>),
    Group(Box<TokenPattern>),
    Capture {
        name: String,
        pattern: Box<TokenPattern>,
    },
    /// `@label` or `@name:label`: consumes the tokens of a stored mention.
    Mention {
        name: Option<String>,
        label: StringMatcher,
    },
    Repeat {
        pattern: Box<TokenPattern>,
        min: usize,
        max: Option<usize>,
        lazy: bool,
    },
    Assertion(Assertion),
}

impl TokenPattern {
    /// Parses a token pattern; bare strings match the `unit` field.
    pub fn parse(src: &str, unit: Unit) -> Result<TokenPattern, PatternError> {
        let mut cur = Cursor::new(src);
        let p = Parser { unit }.alternation(&mut cur)?;
        if !cur.at_end() {
            let found = cur.peek().map(String::from).unwrap_or_default();
            return Err(cur.error(format!("unexpected `{found}`")));
        }
        Ok(p)
    }

    /// Parses a token pattern that is embedded in a larger source (the
    /// trigger field of a dependency pattern); stops at end of input.
    pub(crate) fn parse_at(cur: &mut Cursor, unit: Unit) -> Result<TokenPattern, PatternError> {
        Parser { unit }.alternation(cur)
    }

    /// Number of tokens consumed by every match, if that is fixed.
    pub fn fixed_len(&self) -> Option<usize> {
        match self {
            TokenPattern::Constraint(_) => Some(1),
            TokenPattern::Concat(ps) => ps.iter().map(TokenPattern::fixed_len).sum(),
            TokenPattern::Alternation(ps) => {
                let first = ps.first()?.fixed_len()?;
                ps.iter()
                    .all(|p| p.fixed_len() == Some(first))
                    .then_some(first)
            }
            TokenPattern::Group(p) | TokenPattern::Capture { pattern: p, .. } => p.fixed_len(),
            TokenPattern::Mention { .. } => None,
            TokenPattern::Repeat {
                pattern, min, max, ..
            } => match max {
                Some(max) if max == min => pattern.fixed_len().map(|n| n * min),
                _ => None,
            },
            TokenPattern::Assertion(_) => Some(0),
        }
    }

    /// Calls `f` on every node, parents before children.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a TokenPattern)) {
        f(self);
        match self {
            TokenPattern::Concat(ps) | TokenPattern::Alternation(ps) => {
                ps.iter().for_each(|p| p.walk(f))
            }
            TokenPattern::Group(p)
            | TokenPattern::Capture { pattern: p, .. }
            | TokenPattern::Repeat { pattern: p, .. } => p.walk(f),
            TokenPattern::Assertion(
                Assertion::Lookahead { pattern, .. } | Assertion::Lookbehind { pattern, .. },
            ) => pattern.walk(f),
            TokenPattern::Constraint(_)
            | TokenPattern::Mention { .. }
            | TokenPattern::Assertion(_) => {}
        }
    }

    /// Names of all captures (plain and mention), in source order.
    pub fn capture_names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(&mut |p| match p {
            TokenPattern::Capture { name, .. }
            | TokenPattern::Mention {
                name: Some(name), ..
            } => out.push(name.as_str()),
            _ => {}
        });
        out
    }
}

struct Parser {
    unit: Unit,
}

impl Parser {
    fn alternation(&self, cur: &mut Cursor) -> Result<TokenPattern, PatternError> {
        let mut branches = vec![self.concatenation(cur)?];
        while cur.eat("|") {
            branches.push(self.concatenation(cur)?);
        }
        Ok(if branches.len() == 1 {
            branches.pop().unwrap()
        } else {
            TokenPattern::Alternation(branches)
        })
    }

    fn concatenation(&self, cur: &mut Cursor) -> Result<TokenPattern, PatternError> {
        let mut items = Vec::new();
        while !matches!(cur.peek(), None | Some(')' | '|')) {
            items.push(self.quantified(cur)?);
        }
        match items.len() {
            0 => Err(cur.error("expected a token pattern")),
            1 => Ok(items.pop().unwrap()),
            _ => Ok(TokenPattern::Concat(items)),
        }
    }

    fn quantified(&self, cur: &mut Cursor) -> Result<TokenPattern, PatternError> {
        let mut atom = self.atom(cur)?;
        let at = cur.pos();
        if let Some((min, max, exact)) = quantifier(cur)? {
            if matches!(atom, TokenPattern::Assertion(_)) {
                return Err(cur.error_at(at, "zero-width assertions cannot be quantified"));
            }
            let lazy = cur.rest().starts_with('?') && {
                cur.bump();
                true
            };
            if lazy && exact {
                return Err(cur.error_at(at, "exact repetition has no lazy form"));
            }
            atom = TokenPattern::Repeat {
                pattern: Box::new(atom),
                min,
                max,
                lazy,
            };
            cur.skip_ws();
            if matches!(cur.peek_raw(), Some('?' | '*' | '+' | '{')) {
                return Err(cur.error("nested quantifier; use parentheses"));
            }
        }
        Ok(atom)
    }

    fn atom(&self, cur: &mut Cursor) -> Result<TokenPattern, PatternError> {
        cur.skip_ws();
        let start = cur.pos();
        if cur.eat("[") {
            return TokenConstraint::parse_bracketed(cur).map(TokenPattern::Constraint);
        }
        if cur.eat("^") {
            return Ok(TokenPattern::Assertion(Assertion::Start));
        }
        if cur.eat("$") {
            return Ok(TokenPattern::Assertion(Assertion::End));
        }
        if cur.eat("@") {
            return self.mention(cur);
        }
        if cur.eat("(?<=") || cur.eat("(?<!") {
            let negated = cur.src()[start..cur.pos()].ends_with('!');
            let pattern = self.alternation(cur)?;
            cur.expect(")")?;
            let len = pattern.fixed_len().ok_or_else(|| {
                cur.error_at(
                    start,
                    "lookbehind patterns must have a fixed length (token constraints, groups and exact repetition only)",
                )
            })?;
            return Ok(TokenPattern::Assertion(Assertion::Lookbehind {
                negated,
                pattern: Box::new(pattern),
                len,
            }));
        }
        if cur.eat("(?<") {
            let name = cur
                .identifier()
                .ok_or_else(|| cur.error("expected a capture name"))?
                .to_string();
            if !cur.rest().starts_with('>') {
                return Err(cur.error("expected `>` after capture name"));
            }
            cur.bump();
            let pattern = self.alternation(cur)?;
            cur.expect(")")?;
            return Ok(TokenPattern::Capture {
                name,
                pattern: Box::new(pattern),
            });
        }
        if cur.eat("(?=") || cur.eat("(?!") {
            let negated = cur.src()[start..cur.pos()].ends_with('!');
            let pattern = self.alternation(cur)?;
            cur.expect(")")?;
            return Ok(TokenPattern::Assertion(Assertion::Lookahead {
                negated,
                pattern: Box::new(pattern),
            }));
        }
        if cur.eat("(?") {
            return Err(cur.error_at(start, "unknown group syntax"));
        }
        if cur.eat("(") {
            let pattern = self.alternation(cur)?;
            cur.expect(")")?;
            return Ok(TokenPattern::Group(Box::new(pattern)));
        }
        if cur.at_string_matcher() {
            let m = cur.string_matcher()?;
            return Ok(TokenPattern::Constraint(TokenConstraint::Field(
                self.unit.field(),
                m,
            )));
        }
        let message = match cur.peek() {
            Some(c) => format!("unexpected `{c}`"),
            None => "unexpected end of pattern".to_string(),
        };
        Err(cur.error(message))
    }

    fn mention(&self, cur: &mut Cursor) -> Result<TokenPattern, PatternError> {
        let mut probe = cur.clone();
        if let Some(id) = probe.identifier() {
            if probe.rest().starts_with(':') {
                let name = id.to_string();
                probe.bump();
                *cur = probe;
                let label = cur.string_matcher()?;
                return Ok(TokenPattern::Mention {
                    name: Some(name),
                    label,
                });
            }
        }
        Ok(TokenPattern::Mention {
            name: None,
            label: cur.string_matcher()?,
        })
    }
}

/// Parses `?`, `*`, `+`, `{n}`, `{n,m}`, `{,m}` or `{n,}` (without the lazy
/// suffix). Returns `(min, max, is_exact)`.
pub(crate) fn quantifier(
    cur: &mut Cursor,
) -> Result<Option<(usize, Option<usize>, bool)>, PatternError> {
    cur.skip_ws();
    let start = cur.pos();
    let q = match cur.peek_raw() {
        Some('?') => (0, Some(1), false),
        Some('*') => (0, None, false),
        Some('+') => (1, None, false),
        Some('{') => {
            cur.bump();
            let min = cur.number();
            let q = if cur.eat(",") {
                let max = cur.number();
                match (min, max) {
                    (None, None) => return Err(cur.error_at(start, "empty repetition range")),
                    (None, Some(0)) => {
                        return Err(cur.error_at(start, "repetition upper bound must be positive"))
                    }
                    (Some(n), Some(m)) if n > m => {
                        return Err(cur.error_at(start, "repetition range is inverted"))
                    }
                    (min, max) => (min.unwrap_or(0), max, false),
                }
            } else {
                match min {
                    Some(n) => (n, Some(n), true),
                    None => return Err(cur.error("expected a repetition count")),
                }
            };
            if !cur.eat("}") {
                return Err(cur.error("expected `}`"));
            }
            return Ok(Some(q));
        }
        _ => return Ok(None),
    };
    cur.bump();
    Ok(Some(q))
}

impl fmt::Display for TokenPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenPattern::Constraint(c) => write!(f, "{c}"),
            TokenPattern::Concat(ps) => {
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    match p {
                        TokenPattern::Alternation(_) => write!(f, "({p})")?,
                        _ => write!(f, "{p}")?,
                    }
                }
                Ok(())
            }
            TokenPattern::Alternation(ps) => {
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
            TokenPattern::Group(p) => write!(f, "({p})"),
            TokenPattern::Capture { name, pattern } => write!(f, "(?<{name}> {pattern})"),
            TokenPattern::Mention {
                name: Some(n),
                label,
            } => write!(f, "@{n}:{label}"),
            TokenPattern::Mention { name: None, label } => write!(f, "@{label}"),
            TokenPattern::Repeat {
                pattern,
                min,
                max,
                lazy,
            } => {
                match **pattern {
                    TokenPattern::Concat(_)
                    | TokenPattern::Alternation(_)
                    | TokenPattern::Repeat { .. } => write!(f, "({pattern})")?,
                    _ => write!(f, "{pattern}")?,
                }
                match (min, max) {
                    (0, Some(1)) => f.write_str("?")?,
                    (0, None) => f.write_str("*")?,
                    (1, None) => f.write_str("+")?,
                    (n, Some(m)) if n == m => return write!(f, "{{{n}}}"),
                    (n, Some(m)) => write!(f, "{{{n},{m}}}")?,
                    (n, None) => write!(f, "{{{n},}}")?,
                }
                if *lazy {
                    f.write_str("?")?;
                }
                Ok(())
            }
            TokenPattern::Assertion(a) => match a {
                Assertion::Start => f.write_str("^"),
                Assertion::End => f.write_str("$"),
                Assertion::Lookahead { negated, pattern } => {
                    write!(f, "(?{}{pattern})", if *negated { '!' } else { '=' })
                }
                Assertion::Lookbehind {
                    negated, pattern, ..
                } => write!(f, "(?<{}{pattern})", if *negated { '!' } else { '=' }),
            },
        }
    }
}
