//! Lexical helpers shared by the token-pattern and dependency-pattern
//! parsers.

use std::fmt;

use regex::Regex;
use thiserror::Error;

/// A syntax error at a byte offset of the pattern source.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{message} (line {line}, column {column})")]
pub struct PatternError {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl PatternError {
    pub fn at(src: &str, offset: usize, message: impl Into<String>) -> Self {
        let offset = offset.min(src.len());
        let before = &src[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
        PatternError {
            offset,
            line,
            column,
            message: message.into(),
        }
    }
}

/// Matches a string either exactly or by regex search.
#[derive(Clone, Debug)]
pub enum StringMatcher {
    Exact(String),
    Regex(Regex),
}

impl StringMatcher {
    pub fn exact(s: impl Into<String>) -> Self {
        StringMatcher::Exact(s.into())
    }

    pub fn regex(pattern: &str) -> Result<Self, regex::Error> {
        Regex::new(pattern).map(StringMatcher::Regex)
    }

    pub fn matches(&self, s: &str) -> bool {
        match self {
            StringMatcher::Exact(e) => e == s,
            StringMatcher::Regex(r) => r.is_match(s),
        }
    }

    /// The literal string for exact matchers.
    pub fn as_exact(&self) -> Option<&str> {
        match self {
            StringMatcher::Exact(e) => Some(e),
            StringMatcher::Regex(_) => None,
        }
    }
}

impl PartialEq for StringMatcher {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (StringMatcher::Exact(a), StringMatcher::Exact(b)) => a == b,
            (StringMatcher::Regex(a), StringMatcher::Regex(b)) => a.as_str() == b.as_str(),
            _ => false,
        }
    }
}

impl Eq for StringMatcher {}

impl fmt::Display for StringMatcher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StringMatcher::Exact(s) if is_identifier(s) => f.write_str(s),
            StringMatcher::Exact(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    if c == '"' || c == '\\' {
                        f.write_str("\\")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("\"")
            }
            StringMatcher::Regex(r) => write!(f, "/{}/", r.as_str().replace('/', "\\/")),
        }
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if is_ident_start(c) => chars.all(is_ident_char),
        _ => false,
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// A byte cursor over pattern source. Whitespace and `#` comments between
/// tokens are skipped by [`Cursor::skip_ws`].
#[derive(Clone)]
pub struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub fn src(&self) -> &'a str {
        self.src
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn error(&self, message: impl Into<String>) -> PatternError {
        PatternError::at(self.src, self.pos, message)
    }

    pub fn error_at(&self, offset: usize, message: impl Into<String>) -> PatternError {
        PatternError::at(self.src, offset, message)
    }

    pub fn skip_ws(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('#') {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                break;
            }
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }

    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    /// Next character without skipping whitespace.
    pub fn peek_raw(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek_raw()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    /// Consumes `token` if the source continues with it (after whitespace).
    pub fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, token: &str) -> Result<(), PatternError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{token}`")))
        }
    }

    pub fn identifier(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if is_ident_start(c) => {}
            _ => return None,
        }
        let len = chars
            .find(|&(_, c)| !is_ident_char(c))
            .map_or(rest.len(), |(i, _)| i);
        self.pos += len;
        Some(&rest[..len])
    }

    pub fn number(&mut self) -> Option<usize> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest.bytes().take_while(u8::is_ascii_digit).count();
        if len == 0 {
            return None;
        }
        let n = rest[..len].parse().ok()?;
        self.pos += len;
        Some(n)
    }

    /// A quoted literal (single or double quotes, backslash escapes).
    fn quoted(&mut self) -> Result<String, PatternError> {
        let start = self.pos;
        let quote = self.bump().expect("caller checked the quote");
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error_at(start, "unterminated string literal")),
                Some('\\') => match self.bump() {
                    Some(c) => out.push(c),
                    None => return Err(self.error_at(start, "unterminated string literal")),
                },
                Some(c) if c == quote => return Ok(out),
                Some(c) => out.push(c),
            }
        }
    }

    /// A slash-delimited regex; `\/` is the only escape handled here.
    fn regex_literal(&mut self) -> Result<String, PatternError> {
        let start = self.pos;
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error_at(start, "unterminated regular expression")),
                Some('\\') => match self.bump() {
                    Some('/') => out.push('/'),
                    Some(c) => {
                        out.push('\\');
                        out.push(c);
                    }
                    None => return Err(self.error_at(start, "unterminated regular expression")),
                },
                Some('/') => return Ok(out),
                Some(c) => out.push(c),
            }
        }
    }

    /// Whether a string matcher starts here.
    pub fn at_string_matcher(&mut self) -> bool {
        match self.peek() {
            Some('"' | '\'' | '/') => true,
            Some(c) => is_ident_start(c),
            None => false,
        }
    }

    pub fn string_matcher(&mut self) -> Result<StringMatcher, PatternError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek_raw() {
            Some('"' | '\'') => Ok(StringMatcher::Exact(self.quoted()?)),
            Some('/') => {
                let src = self.regex_literal()?;
                StringMatcher::regex(&src)
                    .map_err(|e| self.error_at(start, format!("invalid regular expression: {e}")))
            }
            _ => match self.identifier() {
                Some(id) => Ok(StringMatcher::Exact(id.to_string())),
                None => Err(self.error("expected a string, identifier or /regex/")),
            },
        }
    }
}
