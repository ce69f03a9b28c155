//! Token constraints: boolean expressions over one token's annotations.

use std::fmt;

use crate::doc::Sentence;
use crate::state::State;
use crate::syntax::{Cursor, PatternError, StringMatcher};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Word,
    Lemma,
    Tag,
    Chunk,
    Entity,
    Incoming,
    Outgoing,
    Mention,
}

impl Field {
    pub fn parse(name: &str) -> Option<Field> {
        Some(match name {
            "word" => Field::Word,
            "lemma" => Field::Lemma,
            "tag" => Field::Tag,
            "chunk" => Field::Chunk,
            "entity" => Field::Entity,
            "incoming" => Field::Incoming,
            "outgoing" => Field::Outgoing,
            "mention" => Field::Mention,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Field::Word => "word",
            Field::Lemma => "lemma",
            Field::Tag => "tag",
            Field::Chunk => "chunk",
            Field::Entity => "entity",
            Field::Incoming => "incoming",
            Field::Outgoing => "outgoing",
            Field::Mention => "mention",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenConstraint {
    /// `[]`
    Any,
    Field(Field, StringMatcher),
    Not(Box<TokenConstraint>),
    And(Vec<TokenConstraint>),
    Or(Vec<TokenConstraint>),
}

impl TokenConstraint {
    pub fn field(field: Field, matcher: StringMatcher) -> Self {
        TokenConstraint::Field(field, matcher)
    }

    /// Evaluates the constraint on token `token` of `sentence` (the
    /// `sentence_index`-th sentence of the document `state` belongs to).
    pub fn matches(
        &self,
        sentence: &Sentence,
        sentence_index: usize,
        token: usize,
        state: &State,
    ) -> bool {
        match self {
            TokenConstraint::Any => true,
            TokenConstraint::Field(field, m) => {
                eval_field(*field, m, sentence, sentence_index, token, state)
            }
            TokenConstraint::Not(c) => !c.matches(sentence, sentence_index, token, state),
            TokenConstraint::And(cs) => cs
                .iter()
                .all(|c| c.matches(sentence, sentence_index, token, state)),
            TokenConstraint::Or(cs) => cs
                .iter()
                .any(|c| c.matches(sentence, sentence_index, token, state)),
        }
    }

    /// Every `(field, matcher)` atom, in source order.
    pub fn atoms(&self) -> Vec<(Field, &StringMatcher)> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<(Field, &'a StringMatcher)>) {
        match self {
            TokenConstraint::Any => {}
            TokenConstraint::Field(f, m) => out.push((*f, m)),
            TokenConstraint::Not(c) => c.collect_atoms(out),
            TokenConstraint::And(cs) | TokenConstraint::Or(cs) => {
                cs.iter().for_each(|c| c.collect_atoms(out))
            }
        }
    }

    /// Parses the body of `[ ... ]`; the cursor must sit just after `[`.
    /// Consumes the closing bracket.
    pub fn parse_bracketed(cur: &mut Cursor) -> Result<Self, PatternError> {
        if cur.eat("]") {
            return Ok(TokenConstraint::Any);
        }
        let c = parse_or(cur)?;
        cur.expect("]")?;
        Ok(c)
    }

    pub fn parse(src: &str) -> Result<Self, PatternError> {
        let mut cur = Cursor::new(src);
        cur.expect("[")?;
        let c = Self::parse_bracketed(&mut cur)?;
        if !cur.at_end() {
            return Err(cur.error("unexpected input after token constraint"));
        }
        Ok(c)
    }
}

fn layer_value(layer: &Option<Vec<String>>, token: usize) -> Option<&str> {
    layer
        .as_ref()
        .and_then(|l| l.get(token))
        .map(String::as_str)
}

fn eval_field(
    field: Field,
    m: &StringMatcher,
    s: &Sentence,
    sentence_index: usize,
    token: usize,
    state: &State,
) -> bool {
    let value = match field {
        Field::Word => s.words.get(token).map(String::as_str),
        Field::Lemma => layer_value(&s.lemmas, token),
        Field::Tag => layer_value(&s.tags, token),
        Field::Chunk => layer_value(&s.chunks, token),
        Field::Entity => layer_value(&s.entities, token),
        Field::Incoming => {
            return s
                .graph
                .as_ref()
                .is_some_and(|g| g.incoming(token).iter().any(|(r, _)| m.matches(r)))
        }
        Field::Outgoing => {
            return s
                .graph
                .as_ref()
                .is_some_and(|g| g.outgoing(token).iter().any(|(r, _)| m.matches(r)))
        }
        Field::Mention => {
            return state
                .mentions_at(sentence_index, token)
                .any(|mention| mention.labels().iter().any(|l| m.matches(l)))
        }
    };
    value.is_some_and(|v| m.matches(v))
}

fn parse_or(cur: &mut Cursor) -> Result<TokenConstraint, PatternError> {
    let mut terms = vec![parse_and(cur)?];
    while cur.eat("|") {
        terms.push(parse_and(cur)?);
    }
    Ok(if terms.len() == 1 {
        terms.pop().unwrap()
    } else {
        TokenConstraint::Or(terms)
    })
}

fn parse_and(cur: &mut Cursor) -> Result<TokenConstraint, PatternError> {
    let mut terms = vec![parse_not(cur)?];
    while cur.eat("&") {
        terms.push(parse_not(cur)?);
    }
    Ok(if terms.len() == 1 {
        terms.pop().unwrap()
    } else {
        TokenConstraint::And(terms)
    })
}

fn parse_not(cur: &mut Cursor) -> Result<TokenConstraint, PatternError> {
    if cur.eat("!") {
        return Ok(TokenConstraint::Not(Box::new(parse_not(cur)?)));
    }
    if cur.eat("(") {
        let c = parse_or(cur)?;
        cur.expect(")")?;
        return Ok(c);
    }
    cur.skip_ws();
    let at = cur.pos();
    let name = cur
        .identifier()
        .ok_or_else(|| cur.error("expected a field name"))?;
    let field = Field::parse(name).ok_or_else(|| {
        cur.error_at(
            at,
            format!(
                "unknown field `{name}` (expected word, lemma, tag, chunk, entity, incoming, outgoing or mention)"
            ),
        )
    })?;
    let negated = if cur.eat("!=") {
        true
    } else {
        cur.expect("=")?;
        false
    };
    let atom = TokenConstraint::Field(field, cur.string_matcher()?);
    Ok(if negated {
        TokenConstraint::Not(Box::new(atom))
    } else {
        atom
    })
}

impl fmt::Display for TokenConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        write_expr(self, f, 0)?;
        f.write_str("]")
    }
}

// precedence: 0 = or, 1 = and, 2 = unary
fn write_expr(c: &TokenConstraint, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
    match c {
        TokenConstraint::Any => Ok(()),
        TokenConstraint::Field(field, m) => write!(f, "{}={}", field.name(), m),
        TokenConstraint::Not(inner) => {
            f.write_str("!")?;
            write_expr(inner, f, 2)
        }
        TokenConstraint::And(cs) | TokenConstraint::Or(cs) => {
            let (prec, op) = match c {
                TokenConstraint::And(_) => (1, " & "),
                _ => (0, " | "),
            };
            if ctx > prec {
                f.write_str("(")?;
            }
            for (i, sub) in cs.iter().enumerate() {
                if i > 0 {
                    f.write_str(op)?;
                }
                write_expr(sub, f, prec + 1)?;
            }
            if ctx > prec {
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doc::{DependencyGraph, Edge};
    use crate::mention::{Interval, Mention};

    fn sentence() -> Sentence {
        let mut s = Sentence::from_words(&["RAS", "inhibits", "MEK"]);
        s.lemmas = Some(vec!["RAS".into(), "inhibit".into(), "MEK".into()]);
        s.tags = Some(vec!["NN".into(), "VBZ".into(), "NN".into()]);
        s.entities = Some(vec!["B-Protein".into(), "O".into(), "B-Protein".into()]);
        s.graph = Some(
            DependencyGraph::new(
                3,
                vec![
                    Edge {
                        source: 1,
                        destination: 0,
                        relation: "nsubj".into(),
                    },
                    Edge {
                        source: 1,
                        destination: 2,
                        relation: "dobj".into(),
                    },
                ],
                vec![1],
            )
            .unwrap(),
        );
        s
    }

    fn eval(src: &str, token: usize) -> bool {
        let state = State::new();
        TokenConstraint::parse(src)
            .unwrap()
            .matches(&sentence(), 0, token, &state)
    }

    #[test]
    fn field_atoms() {
        assert!(eval("[tag=/^V/]", 1));
        assert!(!eval("[tag=/^V/]", 0));
        assert!(eval("[]", 0) && eval("[]", 2));
        assert!(eval("[lemma=inhibit & tag=/^V/]", 1));
        assert!(!eval("[entity=\"B-Person\"]", 1));
        assert!(eval("[entity=\"B-Protein\"]", 0));
        assert!(eval("[outgoing=nsubj]", 1));
        assert!(eval("[incoming=/obj/]", 2));
        assert!(!eval("[incoming=nsubj]", 1));
        assert!(eval("[!outgoing=neg]", 1));
        assert!(eval("[word!=RAS]", 1));
    }

    #[test]
    fn boolean_precedence() {
        // & binds tighter than |
        assert!(eval("[word=MEK | word=RAS & tag=VBZ]", 2));
        assert!(!eval("[(word=MEK | word=RAS) & tag=VBZ]", 2));
        assert!(eval("[!(word=MEK | word=RAS)]", 1));
    }

    #[test]
    fn absent_layers_never_match() {
        let s = Sentence::from_words(&["x"]);
        let state = State::new();
        for src in [
            "[lemma=x]",
            "[tag=/./]",
            "[chunk=NP]",
            "[entity=O]",
            "[outgoing=/./]",
        ] {
            assert!(
                !TokenConstraint::parse(src)
                    .unwrap()
                    .matches(&s, 0, 0, &state),
                "{src}"
            );
        }
        assert!(TokenConstraint::parse("[!lemma=x]")
            .unwrap()
            .matches(&s, 0, 0, &state));
    }

    #[test]
    fn mention_field_consults_state() {
        let mut state = State::new();
        state.add(
            Mention::text_bound(vec!["Protein".into()], 0, Interval::new(2, 3), "ner"),
            1,
        );
        let c = TokenConstraint::parse("[mention=Protein]").unwrap();
        assert!(c.matches(&sentence(), 0, 2, &state));
        assert!(!c.matches(&sentence(), 0, 1, &state));
        assert!(!c.matches(&sentence(), 1, 2, &state));
    }

    #[test]
    fn errors() {
        let e = TokenConstraint::parse("[colour=red]").unwrap_err();
        assert!(e.message.contains("unknown field `colour`"), "{e}");
        assert_eq!(e.column, 2);
        assert!(TokenConstraint::parse("[word=]").is_err());
        assert!(TokenConstraint::parse("[word=a").is_err());
        assert!(TokenConstraint::parse("[word=/(/]").is_err());
    }

    #[test]
    fn display_reparses() {
        for src in [
            "[]",
            "[word=a]",
            "[lemma=inhibit & tag=/^V/]",
            "[(word=a | word=b) & !tag=\"N-N\"]",
            "[word=a | word=b & tag=c]",
        ] {
            let c = TokenConstraint::parse(src).unwrap();
            assert_eq!(TokenConstraint::parse(&c.to_string()).unwrap(), c, "{src}");
        }
    }
}
