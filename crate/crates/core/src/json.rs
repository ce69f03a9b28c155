//! JSON form of mentions.
//!
//! ```json
//! {"type":"TextBound","tokenInterval":[0,1],"characterOffsets":[189,194],
//!  "labels":["Person"],"sentence":5,"foundBy":"ner-person-or-pronouns"}
//! ```
//!
//! Events add a `trigger` object; relations and events add an `arguments`
//! map from argument name to a list of mention objects.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::doc::Document;
use crate::mention::{Arguments, Interval, Mention, MentionKind};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MentionJson {
    #[serde(rename = "type")]
    pub kind: String,
    pub token_interval: [usize; 2],
    pub character_offsets: [usize; 2],
    pub labels: Vec<String>,
    pub sentence: usize,
    pub found_by: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trigger: Option<Box<MentionJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arguments: Option<IndexMap<String, Vec<MentionJson>>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MentionJsonError {
    #[error("unknown mention type `{0}`")]
    UnknownType(String),
    #[error("{0} mention is missing its {1}")]
    Missing(&'static str, &'static str),
    #[error("mention has no labels")]
    NoLabels,
}

pub fn mention_to_json(m: &Mention, doc: &Document) -> MentionJson {
    let i = m.interval();
    let (start, end) = m.character_offsets(doc);
    let arguments = match m.kind() {
        MentionKind::TextBound => None,
        _ => Some(
            m.arguments()
                .iter()
                .map(|(name, ms)| {
                    (
                        name.clone(),
                        ms.iter().map(|a| mention_to_json(a, doc)).collect(),
                    )
                })
                .collect(),
        ),
    };
    MentionJson {
        kind: m.kind().as_str().to_string(),
        token_interval: [i.start, i.end],
        character_offsets: [start, end],
        labels: m.labels().to_vec(),
        sentence: m.sentence(),
        found_by: m.found_by().to_string(),
        trigger: m.trigger().map(|t| Box::new(mention_to_json(t, doc))),
        arguments,
    }
}

/// Rebuilds a mention from its JSON form. Character offsets are not
/// checked.
pub fn mention_from_json(j: &MentionJson) -> Result<Mention, MentionJsonError> {
    if j.labels.is_empty() {
        return Err(MentionJsonError::NoLabels);
    }
    let args = || -> Result<Arguments, MentionJsonError> {
        let mut out = Arguments::new();
        for (name, ms) in j.arguments.iter().flatten() {
            out.insert(
                name.clone(),
                ms.iter().map(mention_from_json).collect::<Result<_, _>>()?,
            );
        }
        Ok(out)
    };
    match j.kind.as_str() {
        "TextBound" => Ok(Mention::text_bound(
            j.labels.clone(),
            j.sentence,
            Interval::new(j.token_interval[0], j.token_interval[1]),
            j.found_by.clone(),
        )),
        "Relation" => {
            let args = args()?;
            if args.values().all(Vec::is_empty) {
                return Err(MentionJsonError::Missing("Relation", "arguments"));
            }
            Ok(Mention::relation(
                j.labels.clone(),
                j.sentence,
                args,
                j.found_by.clone(),
            ))
        }
        "Event" => {
            let trigger = j
                .trigger
                .as_deref()
                .ok_or(MentionJsonError::Missing("Event", "trigger"))?;
            let trigger = mention_from_json(trigger)?;
            if trigger.kind() != MentionKind::TextBound {
                return Err(MentionJsonError::Missing("Event", "text-bound trigger"));
            }
            Ok(Mention::event(
                j.labels.clone(),
                j.sentence,
                trigger,
                args()?,
                j.found_by.clone(),
            ))
        }
        other => Err(MentionJsonError::UnknownType(other.to_string())),
    }
}
