//! A rule-cascade engine for event extraction over pre-annotated text.
//!
//! Grammars are YAML lists of rules. Each rule carries either a surface
//! *token pattern* (a regular language over token constraints) or a
//! *dependency pattern* (a trigger plus paths through the dependency graph
//! to argument mentions). The [`ExtractorEngine`] applies the rules over
//! numbered iterations until nothing new is found, so rules can build on
//! the mentions produced by other rules.
//!
//! ```
//! use cascade::{parse_document, ExtractorEngine, Grammar};
//!
//! let grammar = Grammar::from_str(r#"
//! - name: ner
//!   label: Protein
//!   type: token
//!   pattern: |
//!     [entity="B-Protein"][entity="I-Protein"]*
//! "#).unwrap();
//! let doc = parse_document(br#"{"id": "d", "sentences": [{
//!     "words": ["RAS", "binds"], "startOffsets": [0, 4], "endOffsets": [3, 9],
//!     "entities": ["B-Protein", "O"]}]}"#).unwrap();
//! let mentions = ExtractorEngine::new(grammar).unwrap().extract_from(&doc).mentions;
//! assert_eq!(mentions.len(), 1);
//! assert_eq!(mentions[0].text(&doc), "RAS");
//! ```

pub mod constraint;
pub mod dep;
pub mod doc;
pub mod engine;
pub mod grammar;
pub mod json;
pub mod mention;
pub mod rule;
pub mod state;
pub mod syntax;
pub mod taxonomy;
pub mod token;

pub use constraint::{Field, TokenConstraint};
pub use dep::{ArgQuantifier, DepPattern};
pub use doc::{parse_document, DependencyGraph, Document, DocumentError, Edge, Sentence};
pub use engine::{
    default_action, Action, ActionRegistry, EngineError, Extraction, ExtractorEngine, Trace,
};
pub use grammar::{
    load_grammar, Grammar, GrammarError, Priority, Rule, RuleKind, RuleSpec, RuleType,
};
pub use json::{mention_from_json, mention_to_json, MentionJson};
pub use mention::{mentions_equal, Arguments, Interval, Mention, MentionKind};
pub use rule::RuleInfo;
pub use state::State;
pub use syntax::{PatternError, StringMatcher};
pub use taxonomy::{label_matches, Taxonomy};
pub use token::{CompiledTokenPattern, TokenMatch, TokenPattern, Unit};
