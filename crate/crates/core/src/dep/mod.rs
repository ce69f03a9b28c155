//! Dependency patterns: a trigger (or anchor mention) plus one graph path
//! per argument.
//!
//! ```text
//! trigger = [lemma=marry & !outgoing=neg]
//! spouse:Person+ = (<xcomp? /^nsubj/ | dobj) conj_and?
//! date:Date? = /prep_(on|in|at)/+ | tmod
//! ```

mod path;

pub use path::{Direction, PathPattern};

use std::collections::BTreeSet;
use std::fmt;

use crate::doc::Sentence;
use crate::mention::{Arguments, Mention};
use crate::rule::RuleInfo;
use crate::state::State;
use crate::syntax::{Cursor, PatternError};
use crate::taxonomy::Taxonomy;
use crate::token::{CompiledTokenPattern, TokenPattern, Unit};

/// How the candidates of one argument turn into argument sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArgQuantifier {
    /// One mention per candidate; required.
    One,
    /// `?`: like `One`, or absent when nothing is found.
    Optional,
    /// `+`: all candidates together; required.
    OneOrMore,
    /// `*`: all candidates together, or absent.
    ZeroOrMore,
    /// `{k}`: every k-subset of the candidates.
    Exactly(usize),
}

impl fmt::Display for ArgQuantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArgQuantifier::One => Ok(()),
            ArgQuantifier::Optional => f.write_str("?"),
            ArgQuantifier::OneOrMore => f.write_str("+"),
            ArgQuantifier::ZeroOrMore => f.write_str("*"),
            ArgQuantifier::Exactly(k) => write!(f, "{{{k}}}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArgPattern {
    pub name: String,
    pub label: String,
    pub quantifier: ArgQuantifier,
    pub path: PathPattern,
}

#[derive(Clone, Debug)]
pub enum Anchor {
    Trigger(CompiledTokenPattern),
    /// Triggerless form: the first field names an existing mention that the
    /// other paths start from.
    Argument {
        name: String,
        label: String,
    },
}

#[derive(Clone, Debug)]
pub struct DepPattern {
    pub anchor: Anchor,
    pub args: Vec<ArgPattern>,
}

struct FieldSrc {
    offset: usize,
    is_trigger: bool,
}

impl DepPattern {
    /// Parses a dependency pattern. Bare strings in the trigger pattern match
    /// the `unit` field.
    pub fn parse(src: &str, unit: Unit) -> Result<DepPattern, PatternError> {
        let fields = split_fields(src)?;
        let mut anchor = None;
        let mut args: Vec<ArgPattern> = Vec::new();
        for (i, field) in fields.iter().enumerate() {
            let end = fields.get(i + 1).map_or(src.len(), |f| f.offset);
            let text = &src[field.offset..end];
            let relocate =
                |e: PatternError| PatternError::at(src, field.offset + e.offset, e.message);
            if field.is_trigger {
                if anchor.is_some() {
                    return Err(PatternError::at(src, field.offset, "duplicate trigger"));
                }
                if i != 0 {
                    return Err(PatternError::at(
                        src,
                        field.offset,
                        "the trigger must be the first field",
                    ));
                }
                let mut cur = Cursor::new(text);
                cur.expect("trigger").map_err(relocate)?;
                cur.expect("=").map_err(relocate)?;
                let pattern = TokenPattern::parse_at(&mut cur, unit).map_err(relocate)?;
                if !cur.at_end() {
                    return Err(relocate(cur.error("unexpected input in trigger pattern")));
                }
                anchor = Some(Anchor::Trigger(CompiledTokenPattern::from_pattern(pattern)));
                continue;
            }
            let (name, label, quantifier, path) = parse_arg(text).map_err(relocate)?;
            if name.eq_ignore_ascii_case("trigger") {
                return Err(PatternError::at(
                    src,
                    field.offset,
                    "`trigger` must be set with `=`",
                ));
            }
            if args.iter().any(|a| a.name == name)
                || matches!(&anchor, Some(Anchor::Argument { name: n, .. }) if *n == name)
            {
                return Err(PatternError::at(
                    src,
                    field.offset,
                    format!("duplicate argument name `{name}`"),
                ));
            }
            match path {
                Some(path) => {
                    if anchor.is_none() {
                        return Err(PatternError::at(
                            src,
                            field.offset,
                            "a pattern without a trigger must start with an anchor argument (`name:Label`)",
                        ));
                    }
                    args.push(ArgPattern {
                        name,
                        label,
                        quantifier,
                        path,
                    });
                }
                None if anchor.is_none() && i == 0 => {
                    if quantifier != ArgQuantifier::One {
                        return Err(PatternError::at(
                            src,
                            field.offset,
                            "the anchor argument cannot be quantified",
                        ));
                    }
                    anchor = Some(Anchor::Argument { name, label });
                }
                None => {
                    return Err(PatternError::at(
                        src,
                        field.offset,
                        format!("argument `{name}` has no path"),
                    ))
                }
            }
        }
        let anchor = anchor.ok_or_else(|| PatternError::at(src, 0, "empty dependency pattern"))?;
        Ok(DepPattern { anchor, args })
    }

    /// Every mention label the pattern refers to.
    pub fn labels(&self) -> Vec<&str> {
        let mut out = Vec::new();
        if let Anchor::Argument { label, .. } = &self.anchor {
            out.push(label.as_str());
        }
        out.extend(self.args.iter().map(|a| a.label.as_str()));
        out
    }

    /// Applies the pattern to one sentence.
    pub fn find_mentions(
        &self,
        rule: &RuleInfo,
        sentence: &Sentence,
        sentence_index: usize,
        state: &State,
        taxonomy: Option<&Taxonomy>,
    ) -> Vec<Mention> {
        let mut out = Vec::new();
        match &self.anchor {
            Anchor::Trigger(trigger) => {
                for m in trigger.find_all(sentence, sentence_index, state) {
                    if m.interval.is_empty() {
                        continue;
                    }
                    let start: BTreeSet<usize> = (m.interval.start..m.interval.end).collect();
                    let trig = Mention::text_bound(
                        rule.labels.clone(),
                        sentence_index,
                        m.interval,
                        &rule.name,
                    );
                    for args in self.expand_from(&start, sentence, sentence_index, state, taxonomy)
                    {
                        out.push(rule.stamp(Mention::event(
                            rule.labels.clone(),
                            sentence_index,
                            trig.clone(),
                            args,
                            &rule.name,
                        )));
                    }
                }
            }
            Anchor::Argument { name, label } => {
                let anchors: Vec<Mention> = state
                    .mentions_in_sentence(sentence_index)
                    .filter(|m| crate::taxonomy::label_matches(m.labels(), label, taxonomy))
                    .cloned()
                    .collect();
                for anchor in anchors {
                    let i = anchor.interval();
                    let start: BTreeSet<usize> = (i.start..i.end).collect();
                    for args in self.expand_from(&start, sentence, sentence_index, state, taxonomy)
                    {
                        let mut all = Arguments::new();
                        all.insert(name.clone(), vec![anchor.clone()]);
                        all.extend(args);
                        out.push(rule.stamp(Mention::relation(
                            rule.labels.clone(),
                            sentence_index,
                            all,
                            &rule.name,
                        )));
                    }
                }
            }
        }
        out
    }

    fn expand_from(
        &self,
        start: &BTreeSet<usize>,
        sentence: &Sentence,
        sentence_index: usize,
        state: &State,
        taxonomy: Option<&Taxonomy>,
    ) -> Vec<Arguments> {
        let mut candidates = Vec::with_capacity(self.args.len());
        for arg in &self.args {
            let ends = arg.path.traverse(start, sentence, sentence_index, state);
            let found = resolve_argument(arg, &ends, sentence_index, state, taxonomy);
            let required = matches!(
                arg.quantifier,
                ArgQuantifier::One | ArgQuantifier::OneOrMore | ArgQuantifier::Exactly(_)
            );
            if required && found.is_empty() {
                return Vec::new();
            }
            candidates.push((arg.name.as_str(), arg.quantifier, found));
        }
        expand_arguments(&candidates)
    }
}

impl fmt::Display for DepPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.anchor {
            Anchor::Trigger(t) => writeln!(f, "trigger = {}", t.pattern())?,
            Anchor::Argument { name, label } => writeln!(f, "{name}:{label}")?,
        }
        for a in &self.args {
            writeln!(f, "{}:{}{} = {}", a.name, a.label, a.quantifier, a.path)?;
        }
        Ok(())
    }
}

/// Splits the source into fields. A field starts on a line beginning with
/// `trigger =` or `name:`; other non-blank lines continue the previous field.
fn split_fields(src: &str) -> Result<Vec<FieldSrc>, PatternError> {
    let mut fields = Vec::new();
    let mut offset = 0;
    for line in src.split_inclusive('\n') {
        let trimmed = line.trim_start();
        let start = offset + (line.len() - trimmed.len());
        offset += line.len();
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut cur = Cursor::new(trimmed);
        let is_field = match cur.identifier() {
            Some("trigger") => {
                let mut probe = cur.clone();
                if probe.eat("=") {
                    fields.push(FieldSrc {
                        offset: start,
                        is_trigger: true,
                    });
                    continue;
                }
                cur.eat(":")
            }
            Some(_) => cur.eat(":"),
            None => false,
        };
        if is_field {
            fields.push(FieldSrc {
                offset: start,
                is_trigger: false,
            });
        } else if fields.is_empty() {
            return Err(PatternError::at(
                src,
                start,
                "expected `trigger = ...` or `name:Label`",
            ));
        }
    }
    Ok(fields)
}

type ParsedArg = (String, String, ArgQuantifier, Option<PathPattern>);

fn parse_arg(text: &str) -> Result<ParsedArg, PatternError> {
    let mut cur = Cursor::new(text);
    let name = cur
        .identifier()
        .ok_or_else(|| cur.error("expected an argument name"))?
        .to_string();
    cur.expect(":")?;
    cur.skip_ws();
    let label = match cur.string_matcher()? {
        crate::syntax::StringMatcher::Exact(l) => l,
        _ => return Err(cur.error("argument labels must be plain strings")),
    };
    let at = cur.pos();
    let quantifier = match crate::token::quantifier(&mut cur)? {
        None => ArgQuantifier::One,
        Some((0, Some(1), false)) => ArgQuantifier::Optional,
        Some((1, None, false)) => ArgQuantifier::OneOrMore,
        Some((0, None, false)) => ArgQuantifier::ZeroOrMore,
        Some((k, Some(_), true)) if k >= 1 => ArgQuantifier::Exactly(k),
        Some(_) => {
            return Err(cur.error_at(at, "argument quantifiers are ?, *, + or {k} with k >= 1"))
        }
    };
    if cur.at_end() {
        return Ok((name, label, quantifier, None));
    }
    // `name:Label path` without `=` is accepted as `name:Label = path`
    cur.eat("=");
    let path = PathPattern::parse_at(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.error("unexpected input after dependency path"));
    }
    Ok((name, label, quantifier, Some(path)))
}

/// Mentions labeled `arg.label` covering any of `ends`, without duplicates,
/// in token order then insertion order.
pub fn resolve_argument(
    arg: &ArgPattern,
    ends: &BTreeSet<usize>,
    sentence_index: usize,
    state: &State,
    taxonomy: Option<&Taxonomy>,
) -> Vec<Mention> {
    let mut out: Vec<Mention> = Vec::new();
    for &t in ends {
        for m in state.lookup(sentence_index, t, &arg.label, taxonomy) {
            if !out.contains(&m) {
                out.push(m);
            }
        }
    }
    out
}

/// Expands per-argument candidates into argument maps: the cartesian
/// product of each argument's alternatives. An empty result means the
/// pattern fails.
pub fn expand_arguments(candidates: &[(&str, ArgQuantifier, Vec<Mention>)]) -> Vec<Arguments> {
    let mut results = vec![Arguments::new()];
    for (name, quantifier, found) in candidates {
        let n = found.len();
        let alternatives: Vec<Option<Vec<Mention>>> = match quantifier {
            ArgQuantifier::One => found.iter().map(|m| Some(vec![m.clone()])).collect(),
            ArgQuantifier::Optional if n == 0 => vec![None],
            ArgQuantifier::Optional => found.iter().map(|m| Some(vec![m.clone()])).collect(),
            ArgQuantifier::OneOrMore if n == 0 => Vec::new(),
            ArgQuantifier::ZeroOrMore if n == 0 => vec![None],
            ArgQuantifier::OneOrMore | ArgQuantifier::ZeroOrMore => vec![Some(found.clone())],
            ArgQuantifier::Exactly(k) => combinations(n, *k)
                .into_iter()
                .map(|idx| Some(idx.into_iter().map(|i| found[i].clone()).collect()))
                .collect(),
        };
        let mut next = Vec::with_capacity(results.len() * alternatives.len());
        for partial in &results {
            for alt in &alternatives {
                let mut args = partial.clone();
                if let Some(ms) = alt {
                    args.insert(name.to_string(), ms.clone());
                }
                next.push(args);
            }
        }
        results = next;
        if results.is_empty() {
            break;
        }
    }
    results
}

/// All k-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
