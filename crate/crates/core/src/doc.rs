//! Pre-annotated documents.
//!
//! A [`Document`] is a list of [`Sentence`]s, each holding parallel per-token
//! annotation layers and an optional dependency graph. Only `words` and the
//! character offsets are mandatory; every other layer may be absent, and
//! token constraints over an absent layer simply fail to match.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed document at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("sentence {sentence}: layer `{layer}` has {found} entries, expected {expected}")]
    LayerLength {
        sentence: usize,
        layer: &'static str,
        found: usize,
        expected: usize,
    },
    #[error("sentence {sentence}, token {token}: {message}")]
    Offsets {
        sentence: usize,
        token: usize,
        message: String,
    },
    #[error("sentence {sentence}: edge ({source_token}, {destination}, {relation}) {message}")]
    Edge {
        sentence: usize,
        source_token: usize,
        destination: usize,
        relation: String,
        message: &'static str,
    },
    #[error("sentence {sentence}: root {root} is out of range")]
    Root { sentence: usize, root: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("sentence has no dependency graph")]
pub struct MissingGraph;

/// One labeled, directed dependency edge (head to dependent).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub destination: usize,
    pub relation: String,
}

/// A dependency graph with per-token adjacency lists for both directions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DependencyGraph {
    edges: Vec<Edge>,
    roots: BTreeSet<usize>,
    outgoing: Vec<Vec<(String, usize)>>,
    incoming: Vec<Vec<(String, usize)>>,
}

impl DependencyGraph {
    /// Builds a graph over `len` tokens. Duplicate `(src, dst, rel)` triples
    /// and out-of-range indices are rejected.
    pub fn new(
        len: usize,
        edges: impl IntoIterator<Item = Edge>,
        roots: impl IntoIterator<Item = usize>,
    ) -> Result<Self, (Edge, &'static str)> {
        let mut seen = BTreeSet::new();
        let mut outgoing = vec![Vec::new(); len];
        let mut incoming = vec![Vec::new(); len];
        let mut kept = Vec::new();
        for edge in edges {
            if edge.source >= len || edge.destination >= len {
                return Err((edge, "is out of range"));
            }
            if !seen.insert(edge.clone()) {
                return Err((edge, "is duplicated"));
            }
            outgoing[edge.source].push((edge.relation.clone(), edge.destination));
            incoming[edge.destination].push((edge.relation.clone(), edge.source));
            kept.push(edge);
        }
        Ok(DependencyGraph {
            edges: kept,
            roots: roots.into_iter().collect(),
            outgoing,
            incoming,
        })
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn roots(&self) -> &BTreeSet<usize> {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.outgoing.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outgoing.is_empty()
    }

    /// `(relation, destination)` for every edge leaving `token`.
    pub fn outgoing(&self, token: usize) -> &[(String, usize)] {
        self.outgoing.get(token).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `(relation, source)` for every edge entering `token`.
    pub fn incoming(&self, token: usize) -> &[(String, usize)] {
        self.incoming.get(token).map(Vec::as_slice).unwrap_or(&[])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    pub words: Vec<String>,
    pub lemmas: Option<Vec<String>>,
    pub tags: Option<Vec<String>>,
    pub chunks: Option<Vec<String>>,
    pub entities: Option<Vec<String>>,
    pub start_offsets: Vec<usize>,
    pub end_offsets: Vec<usize>,
    pub graph: Option<DependencyGraph>,
}

impl Sentence {
    /// A sentence with only words; offsets are synthesized as if the words
    /// were joined by single spaces. Mostly useful in tests.
    pub fn from_words<S: AsRef<str>>(words: &[S]) -> Self {
        let mut start_offsets = Vec::with_capacity(words.len());
        let mut end_offsets = Vec::with_capacity(words.len());
        let mut pos = 0;
        for w in words {
            start_offsets.push(pos);
            pos += w.as_ref().len().max(1);
            end_offsets.push(pos);
            pos += 1;
        }
        Sentence {
            words: words.iter().map(|w| w.as_ref().to_string()).collect(),
            lemmas: None,
            tags: None,
            chunks: None,
            entities: None,
            start_offsets,
            end_offsets,
            graph: None,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn outgoing_edges(&self, token: usize) -> Result<&[(String, usize)], MissingGraph> {
        self.graph
            .as_ref()
            .map(|g| g.outgoing(token))
            .ok_or(MissingGraph)
    }

    pub fn incoming_edges(&self, token: usize) -> Result<&[(String, usize)], MissingGraph> {
        self.graph
            .as_ref()
            .map(|g| g.incoming(token))
            .ok_or(MissingGraph)
    }

    /// Words of a token interval joined by single spaces.
    pub fn text(&self, start: usize, end: usize) -> String {
        self.words[start..end].join(" ")
    }

    fn validate(&self, index: usize) -> Result<(), DocumentError> {
        let expected = self.words.len();
        let layers: [(&'static str, Option<usize>); 6] = [
            ("lemmas", self.lemmas.as_ref().map(Vec::len)),
            ("tags", self.tags.as_ref().map(Vec::len)),
            ("chunks", self.chunks.as_ref().map(Vec::len)),
            ("entities", self.entities.as_ref().map(Vec::len)),
            ("startOffsets", Some(self.start_offsets.len())),
            ("endOffsets", Some(self.end_offsets.len())),
        ];
        for (layer, found) in layers {
            if let Some(found) = found {
                if found != expected {
                    return Err(DocumentError::LayerLength {
                        sentence: index,
                        layer,
                        found,
                        expected,
                    });
                }
            }
        }
        for token in 0..expected {
            let (start, end) = (self.start_offsets[token], self.end_offsets[token]);
            if start >= end {
                return Err(DocumentError::Offsets {
                    sentence: index,
                    token,
                    message: format!("start offset {start} is not before end offset {end}"),
                });
            }
            if token > 0 && start < self.start_offsets[token - 1] {
                return Err(DocumentError::Offsets {
                    sentence: index,
                    token,
                    message: "offsets decrease".to_string(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub text: Option<String>,
    pub sentences: Vec<Sentence>,
}

impl Document {
    pub fn new(id: impl Into<String>, sentences: Vec<Sentence>) -> Self {
        Document {
            id: id.into(),
            text: None,
            sentences,
        }
    }

    /// Checks every sentence invariant; documents built by hand should call
    /// this before extraction.
    pub fn validate(&self) -> Result<(), DocumentError> {
        for (i, s) in self.sentences.iter().enumerate() {
            s.validate(i)?;
            if let (Some(text), Some(&last)) = (&self.text, s.end_offsets.last()) {
                if last > text.len() {
                    return Err(DocumentError::Offsets {
                        sentence: i,
                        token: s.len() - 1,
                        message: format!("end offset {last} exceeds text length {}", text.len()),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let raw = RawDocument {
            id: self.id.clone(),
            text: self.text.clone(),
            sentences: self
                .sentences
                .iter()
                .map(|s| RawSentence {
                    words: s.words.clone(),
                    start_offsets: s.start_offsets.clone(),
                    end_offsets: s.end_offsets.clone(),
                    lemmas: s.lemmas.clone(),
                    tags: s.tags.clone(),
                    chunks: s.chunks.clone(),
                    entities: s.entities.clone(),
                    graph: s.graph.as_ref().map(|g| RawGraph {
                        edges: g.edges().to_vec(),
                        roots: g.roots().iter().copied().collect(),
                    }),
                })
                .collect(),
        };
        serde_json::to_value(raw).expect("document serializes")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    text: Option<String>,
    sentences: Vec<RawSentence>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawSentence {
    words: Vec<String>,
    start_offsets: Vec<usize>,
    end_offsets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lemmas: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tags: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    chunks: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    entities: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    graph: Option<RawGraph>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraph {
    edges: Vec<Edge>,
    #[serde(default)]
    roots: Vec<usize>,
}

/// Parses and validates a document payload.
pub fn parse_document(bytes: &[u8]) -> Result<Document, DocumentError> {
    let raw: RawDocument = serde_json::from_slice(bytes).map_err(|e| DocumentError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut sentences = Vec::with_capacity(raw.sentences.len());
    for (index, rs) in raw.sentences.into_iter().enumerate() {
        let len = rs.words.len();
        let graph =
            match rs.graph {
                Some(g) => {
                    for &root in &g.roots {
                        if root >= len {
                            return Err(DocumentError::Root {
                                sentence: index,
                                root,
                            });
                        }
                    }
                    Some(DependencyGraph::new(len, g.edges, g.roots).map_err(
                        |(edge, message)| DocumentError::Edge {
                            sentence: index,
                            source_token: edge.source,
                            destination: edge.destination,
                            relation: edge.relation,
                            message,
                        },
                    )?)
                }
                None => None,
            };
        sentences.push(Sentence {
            words: rs.words,
            lemmas: rs.lemmas,
            tags: rs.tags,
            chunks: rs.chunks,
            entities: rs.entities,
            start_offsets: rs.start_offsets,
            end_offsets: rs.end_offsets,
            graph,
        });
    }
    let doc = Document {
        id: raw.id,
        text: raw.text,
        sentences,
    };
    doc.validate()?;
    Ok(doc)
}
