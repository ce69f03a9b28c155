//! Loading grammars from YAML: rule schema, priorities, variables, imports
//! and the optional label taxonomy.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::OnceLock;

use indexmap::IndexMap;
use regex::Regex;
use serde_yaml::{Mapping, Value};
use thiserror::Error;

use crate::constraint::Field;
use crate::dep::{Anchor, DepPattern, PathPattern};
use crate::doc::Sentence;
use crate::mention::Mention;
use crate::rule::RuleInfo;
use crate::state::State;
use crate::syntax::{PatternError, StringMatcher};
use crate::taxonomy::{Taxonomy, TaxonomyError};
use crate::token::{match_to_mentions, CompiledTokenPattern, TokenPattern, Unit};

#[derive(Debug, Error)]
pub enum GrammarError {
    #[error("{file}: invalid YAML: {message}")]
    Yaml { file: String, message: String },
    #[error("{file}: {message}")]
    Structure { file: String, message: String },
    #[error("{file}: unknown key `{key}` in {context}")]
    UnknownKey {
        file: String,
        key: String,
        context: String,
    },
    #[error("rule `{rule}`: missing required field `{field}`")]
    MissingField { rule: String, field: &'static str },
    #[error("rule `{rule}`: invalid `{field}`: {message}")]
    InvalidField {
        rule: String,
        field: &'static str,
        message: String,
    },
    #[error("duplicate rule name `{0}`")]
    DuplicateName(String),
    #[error("rule `{rule}`: invalid priority `{text}`: {message}")]
    Priority {
        rule: String,
        text: String,
        message: String,
    },
    #[error("rule `{rule}`: pattern error at line {}, column {}: {}", .error.line, .error.column, .error.message)]
    Pattern { rule: String, error: PatternError },
    #[error("{context}: unresolved variable(s): {}", .names.join(", "))]
    UnresolvedVariable { context: String, names: Vec<String> },
    #[error("import cycle: {}", .chain.join(" -> "))]
    ImportCycle { chain: Vec<String> },
    #[error("cannot read `{path}`: {message}")]
    Resolve { path: String, message: String },
    #[error("{file}: a taxonomy may only be declared in the master file")]
    TaxonomyPlacement { file: String },
    #[error("taxonomy: {0}")]
    Taxonomy(#[from] TaxonomyError),
    #[error("rule `{rule}`: label `{label}` is not declared in the taxonomy")]
    UndeclaredLabel { rule: String, label: String },
}

/// The iterations in which a rule runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Priority {
    Exact(usize),
    Range(usize, usize),
    OpenRange(usize),
    List(Vec<usize>),
}

impl Default for Priority {
    fn default() -> Self {
        Priority::OpenRange(1)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("{0}")]
pub struct PriorityError(String);

impl Priority {
    pub fn admits(&self, iteration: usize) -> bool {
        match self {
            Priority::Exact(n) => iteration == *n,
            Priority::Range(n, m) => (*n..=*m).contains(&iteration),
            Priority::OpenRange(n) => iteration >= *n,
            Priority::List(ns) => ns.contains(&iteration),
        }
    }

    /// The largest iteration number the priority names explicitly.
    pub fn max_finite_bound(&self) -> usize {
        match self {
            Priority::Exact(n) | Priority::OpenRange(n) | Priority::Range(_, n) => *n,
            Priority::List(ns) => ns.iter().copied().max().unwrap_or(1),
        }
    }

    fn from_yaml(v: &Value) -> Result<Priority, PriorityError> {
        match v {
            Value::String(s) => s.parse(),
            Value::Number(n) => match n.as_u64() {
                Some(n) if n >= 1 => Ok(Priority::Exact(n as usize)),
                _ => Err(PriorityError(format!(
                    "`{n}` is not a positive iteration number"
                ))),
            },
            Value::Sequence(items) => {
                let ns = items
                    .iter()
                    .map(|i| match i {
                        Value::Number(n) => n.as_u64().map(|n| n.to_string()),
                        Value::String(s) => Some(s.clone()),
                        _ => None,
                    })
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| PriorityError("list items must be numbers".into()))?;
                format!("[{}]", ns.join(",")).parse()
            }
            _ => Err(PriorityError("expected a number, range or list".into())),
        }
    }
}

fn iteration_number(s: &str) -> Result<usize, PriorityError> {
    let s = s.trim();
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        Ok(_) => Err(PriorityError("iterations are numbered from 1".into())),
        Err(_) => Err(PriorityError(format!("`{s}` is not an iteration number"))),
    }
}

impl FromStr for Priority {
    type Err = PriorityError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let t = text.trim();
        if let Some(inner) = t.strip_prefix('[') {
            let inner = inner
                .strip_suffix(']')
                .ok_or_else(|| PriorityError("unterminated list".into()))?;
            if inner.trim().is_empty() {
                return Err(PriorityError("empty priority list".into()));
            }
            let ns = inner
                .split(',')
                .map(iteration_number)
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(Priority::List(ns));
        }
        if let Some(n) = t.strip_suffix('+') {
            return Ok(Priority::OpenRange(iteration_number(n)?));
        }
        if let Some((a, b)) = t.split_once('-') {
            let (a, b) = (iteration_number(a)?, iteration_number(b)?);
            if a > b {
                return Err(PriorityError(format!("inverted range {a}-{b}")));
            }
            return Ok(Priority::Range(a, b));
        }
        Ok(Priority::Exact(iteration_number(t)?))
    }
}

impl fmt::Display for Priority {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Priority::Exact(n) => write!(f, "{n}"),
            Priority::Range(n, m) => write!(f, "{n}-{m}"),
            Priority::OpenRange(n) => write!(f, "{n}+"),
            Priority::List(ns) => {
                let ns: Vec<String> = ns.iter().map(|n| n.to_string()).collect();
                write!(f, "[{}]", ns.join(", "))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RuleType {
    Token,
    #[default]
    Dependency,
}

impl RuleType {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleType::Token => "token",
            RuleType::Dependency => "dependency",
        }
    }
}

/// A rule as written, after variable substitution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSpec {
    pub name: String,
    pub labels: Vec<String>,
    pub priority: Priority,
    pub action: String,
    pub keep: bool,
    pub rule_type: RuleType,
    pub unit: Unit,
    pub pattern: String,
}

impl RuleSpec {
    /// A spec with every optional field at its default.
    pub fn new(name: impl Into<String>, labels: &[&str], pattern: impl Into<String>) -> Self {
        RuleSpec {
            name: name.into(),
            labels: labels.iter().map(|l| l.to_string()).collect(),
            priority: Priority::default(),
            action: "default".to_string(),
            keep: true,
            rule_type: RuleType::Dependency,
            unit: Unit::Word,
            pattern: pattern.into(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum RuleKind {
    Token(CompiledTokenPattern),
    Dependency(DepPattern),
}

/// A validated rule with its compiled pattern.
#[derive(Clone, Debug)]
pub struct Rule {
    pub spec: RuleSpec,
    pub info: RuleInfo,
    pub kind: RuleKind,
}

impl Rule {
    /// Compiles `spec`. With a taxonomy the first label is expanded to its
    /// ancestor chain.
    pub fn compile(spec: RuleSpec, taxonomy: Option<&Taxonomy>) -> Result<Rule, GrammarError> {
        let pattern_error = |error| GrammarError::Pattern {
            rule: spec.name.clone(),
            error,
        };
        let kind = match spec.rule_type {
            RuleType::Token => RuleKind::Token(
                CompiledTokenPattern::compile(&spec.pattern, spec.unit).map_err(pattern_error)?,
            ),
            RuleType::Dependency => RuleKind::Dependency(
                DepPattern::parse(&spec.pattern, spec.unit).map_err(pattern_error)?,
            ),
        };
        let mut labels = spec.labels.clone();
        if let Some(tax) = taxonomy {
            let mut declared = Vec::new();
            declared.extend(spec.labels.iter().cloned());
            declared.extend(kind.referenced_labels());
            for label in declared {
                if !tax.contains(&label) {
                    return Err(GrammarError::UndeclaredLabel {
                        rule: spec.name.clone(),
                        label,
                    });
                }
            }
            labels = tax.hierarchy(&spec.labels[0])?;
            for l in &spec.labels[1..] {
                if !labels.contains(l) {
                    labels.push(l.clone());
                }
            }
        }
        let info = RuleInfo {
            name: spec.name.clone(),
            labels,
            keep: spec.keep,
        };
        Ok(Rule { spec, info, kind })
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    /// Matches the rule against one sentence.
    pub fn find_mentions(
        &self,
        sentence: &Sentence,
        sentence_index: usize,
        state: &State,
        taxonomy: Option<&Taxonomy>,
    ) -> Vec<Mention> {
        match &self.kind {
            RuleKind::Token(p) => p
                .find_all(sentence, sentence_index, state)
                .iter()
                .flat_map(|m| match_to_mentions(m, &self.info, sentence_index))
                .collect(),
            RuleKind::Dependency(p) => {
                p.find_mentions(&self.info, sentence, sentence_index, state, taxonomy)
            }
        }
    }
}

impl RuleKind {
    /// Exact mention labels mentioned anywhere in the pattern.
    pub fn referenced_labels(&self) -> Vec<String> {
        let mut out = Vec::new();
        match self {
            RuleKind::Token(p) => token_labels(p.pattern(), &mut out),
            RuleKind::Dependency(p) => {
                if let Anchor::Trigger(t) = &p.anchor {
                    token_labels(t.pattern(), &mut out);
                }
                out.extend(p.labels().into_iter().map(str::to_string));
                for arg in &p.args {
                    path_labels(&arg.path, &mut out);
                }
            }
        }
        out
    }
}

fn constraint_labels(c: &crate::constraint::TokenConstraint, out: &mut Vec<String>) {
    for (field, m) in c.atoms() {
        if let (Field::Mention, StringMatcher::Exact(l)) = (field, m) {
            out.push(l.clone());
        }
    }
}

fn token_labels(p: &TokenPattern, out: &mut Vec<String>) {
    p.walk(&mut |node| match node {
        TokenPattern::Mention {
            label: StringMatcher::Exact(l),
            ..
        } => out.push(l.clone()),
        TokenPattern::Constraint(c) => constraint_labels(c, out),
        _ => {}
    });
}

fn path_labels(p: &PathPattern, out: &mut Vec<String>) {
    match p {
        PathPattern::Filter(c) => constraint_labels(c, out),
        PathPattern::Concat(ps) | PathPattern::Alternation(ps) => {
            ps.iter().for_each(|p| path_labels(p, out))
        }
        PathPattern::Group(p)
        | PathPattern::Repeat { pattern: p, .. }
        | PathPattern::Lookaround { pattern: p, .. } => path_labels(p, out),
        PathPattern::Hop(..) | PathPattern::Wildcard(_) => {}
    }
}

/// A compiled grammar: rules in application order plus the optional taxonomy.
#[derive(Clone, Debug, Default)]
pub struct Grammar {
    pub rules: Vec<Rule>,
    pub taxonomy: Option<Taxonomy>,
}

impl Grammar {
    /// Loads a grammar that has no imports and no taxonomy file.
    #[allow(clippy::should_implement_trait)]
    pub fn from_str(src: &str) -> Result<Grammar, GrammarError> {
        load_grammar(src, &|path: &str| {
            Err(format!("no file resolver available to read `{path}`"))
        })
    }

    /// Loads a grammar from disk. Imports and taxonomy files are read
    /// relative to the file that names them.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Grammar, GrammarError> {
        let path = path.as_ref();
        let src = std::fs::read_to_string(path).map_err(|e| GrammarError::Resolve {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        load_grammar(&src, &|p: &str| {
            std::fs::read_to_string(base.join(p)).map_err(|e| e.to_string())
        })
    }

    /// Largest iteration explicitly named by any rule's priority (1 when
    /// there are no rules).
    pub fn max_priority_bound(&self) -> usize {
        self.rules
            .iter()
            .map(|r| r.spec.priority.max_finite_bound())
            .max()
            .unwrap_or(1)
    }
}

/// Replaces every `${name}` in `text`. Substituted text is not re-scanned.
pub fn substitute_vars(
    text: &str,
    bindings: &IndexMap<String, String>,
) -> Result<String, Vec<String>> {
    static VAR: OnceLock<Regex> = OnceLock::new();
    let var = VAR.get_or_init(|| Regex::new(r"\$\{([A-Za-z_][A-Za-z0-9_]*)\}").expect("valid"));
    let mut missing = Vec::new();
    let out = var.replace_all(text, |caps: &regex::Captures| {
        match bindings.get(&caps[1]) {
            Some(v) => v.clone(),
            None => {
                if !missing.iter().any(|m| m == &caps[1]) {
                    missing.push(caps[1].to_string());
                }
                String::new()
            }
        }
    });
    if missing.is_empty() {
        Ok(out.into_owned())
    } else {
        Err(missing)
    }
}

/// Merges variable bindings: import-site vars override master-file vars,
/// which override the imported file's own vars.
pub fn resolve_bindings(
    file_vars: &IndexMap<String, String>,
    master_vars: &IndexMap<String, String>,
    import_vars: &IndexMap<String, String>,
) -> IndexMap<String, String> {
    let mut out = file_vars.clone();
    for layer in [master_vars, import_vars] {
        for (k, v) in layer {
            out.insert(k.clone(), v.clone());
        }
    }
    out
}

/// Reads the text of a file named in a grammar (an import or taxonomy file).
pub type FileResolver<'a> = dyn Fn(&str) -> Result<String, String> + 'a;

/// Loads and compiles a grammar. `resolver` reads imported files; paths
/// are joined to the directory of the importing file first.
pub fn load_grammar(source: &str, resolver: &FileResolver) -> Result<Grammar, GrammarError> {
    let master = parse_file(source, "<master>")?;
    let mut loader = Loader {
        resolver,
        master_vars: master.vars.clone(),
        stack: Vec::new(),
        specs: Vec::new(),
    };
    let taxonomy = match &master.taxonomy {
        None => None,
        Some(Value::String(path)) => {
            let src = read(resolver, path)?;
            let value: Value = serde_yaml::from_str(&src).map_err(|e| GrammarError::Yaml {
                file: path.clone(),
                message: e.to_string(),
            })?;
            Some(Taxonomy::from_yaml(&value)?)
        }
        Some(v) => Some(Taxonomy::from_yaml(v)?),
    };
    loader.splice(&master, Path::new(""), &IndexMap::new())?;

    let mut origins: HashMap<String, (String, usize)> = HashMap::new();
    let mut rules = Vec::with_capacity(loader.specs.len());
    for (spec, origin) in loader.specs {
        if let Some(prev) = origins.get(&spec.name) {
            if *prev != origin {
                return Err(GrammarError::DuplicateName(spec.name));
            }
        } else {
            origins.insert(spec.name.clone(), origin);
        }
        rules.push(Rule::compile(spec, taxonomy.as_ref())?);
    }
    Ok(Grammar { rules, taxonomy })
}

fn read(resolver: &FileResolver, path: &str) -> Result<String, GrammarError> {
    resolver(path).map_err(|message| GrammarError::Resolve {
        path: path.to_string(),
        message,
    })
}

struct GrammarFile {
    name: String,
    vars: IndexMap<String, String>,
    taxonomy: Option<Value>,
    rules: Vec<Value>,
}

fn parse_file(src: &str, name: &str) -> Result<GrammarFile, GrammarError> {
    let value: Value = serde_yaml::from_str(src).map_err(|e| GrammarError::Yaml {
        file: name.to_string(),
        message: e.to_string(),
    })?;
    let structure = |message: &str| GrammarError::Structure {
        file: name.to_string(),
        message: message.to_string(),
    };
    let mut file = GrammarFile {
        name: name.to_string(),
        vars: IndexMap::new(),
        taxonomy: None,
        rules: Vec::new(),
    };
    match value {
        Value::Null => {}
        Value::Sequence(rules) => file.rules = rules,
        Value::Mapping(map) => {
            let mut has_rules = false;
            for (k, v) in map {
                let key = k
                    .as_str()
                    .ok_or_else(|| structure("top-level keys must be strings"))?;
                match key {
                    "rules" => {
                        has_rules = true;
                        file.rules = match v {
                            Value::Sequence(rules) => rules,
                            Value::Null => Vec::new(),
                            _ => return Err(structure("`rules` must be a list")),
                        }
                    }
                    "vars" => file.vars = parse_vars(&v, name)?,
                    "taxonomy" => file.taxonomy = Some(v),
                    other => {
                        return Err(GrammarError::UnknownKey {
                            file: name.to_string(),
                            key: other.to_string(),
                            context: "the top level".to_string(),
                        })
                    }
                }
            }
            if !has_rules {
                return Err(structure("missing the required `rules` section"));
            }
        }
        _ => {
            return Err(structure(
                "a grammar is a list of rules or a map with a `rules` section",
            ))
        }
    }
    Ok(file)
}

fn scalar_string(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

fn parse_vars(v: &Value, file: &str) -> Result<IndexMap<String, String>, GrammarError> {
    let structure = |message: String| GrammarError::Structure {
        file: file.to_string(),
        message,
    };
    let map = match v {
        Value::Mapping(m) => m,
        Value::Null => return Ok(IndexMap::new()),
        _ => return Err(structure("`vars` must be a map".into())),
    };
    let mut out = IndexMap::new();
    for (k, v) in map {
        let key = k
            .as_str()
            .filter(|k| crate::syntax::is_identifier(k))
            .ok_or_else(|| structure(format!("invalid variable name {k:?}")))?;
        let value = scalar_string(v)
            .ok_or_else(|| structure(format!("variable `{key}` must be a scalar")))?;
        out.insert(key.to_string(), value);
    }
    Ok(out)
}

struct Loader<'r, 'a> {
    resolver: &'r FileResolver<'a>,
    master_vars: IndexMap<String, String>,
    stack: Vec<String>,
    /// Specs in order, each with its origin (file, index within file).
    specs: Vec<(RuleSpec, (String, usize))>,
}

impl Loader<'_, '_> {
    fn splice(
        &mut self,
        file: &GrammarFile,
        dir: &Path,
        import_vars: &IndexMap<String, String>,
    ) -> Result<(), GrammarError> {
        let bindings = resolve_bindings(&file.vars, &self.master_vars, import_vars);
        for (index, item) in file.rules.iter().enumerate() {
            let map = item.as_mapping().ok_or_else(|| GrammarError::Structure {
                file: file.name.clone(),
                message: format!("rule #{} must be a map", index + 1),
            })?;
            if map.contains_key("import") {
                self.import(map, file, dir, import_vars)?;
            } else {
                let spec = rule_spec(map, &bindings, &file.name)?;
                self.specs.push((spec, (file.name.clone(), index)));
            }
        }
        Ok(())
    }

    fn import(
        &mut self,
        map: &Mapping,
        parent: &GrammarFile,
        dir: &Path,
        outer_vars: &IndexMap<String, String>,
    ) -> Result<(), GrammarError> {
        let mut path = None;
        let mut vars = IndexMap::new();
        for (k, v) in map {
            match k.as_str() {
                Some("import") => path = v.as_str(),
                Some("vars") => vars = parse_vars(v, &parent.name)?,
                _ => {
                    return Err(GrammarError::UnknownKey {
                        file: parent.name.clone(),
                        key: scalar_string(k).unwrap_or_default(),
                        context: "an import".to_string(),
                    })
                }
            }
        }
        let path = path.ok_or_else(|| GrammarError::Structure {
            file: parent.name.clone(),
            message: "`import` must name a file".to_string(),
        })?;
        let full: PathBuf = dir.join(path);
        let key = full.to_string_lossy().into_owned();
        if self.stack.contains(&key) {
            let mut chain = self.stack.clone();
            chain.push(key);
            return Err(GrammarError::ImportCycle { chain });
        }
        let src = read(self.resolver, &key)?;
        let file = parse_file(&src, &key)?;
        if file.taxonomy.is_some() {
            return Err(GrammarError::TaxonomyPlacement { file: key });
        }
        let mut merged = outer_vars.clone();
        merged.extend(vars);
        self.stack.push(key);
        let next_dir = full.parent().map(Path::to_path_buf).unwrap_or_default();
        let result = self.splice(&file, &next_dir, &merged);
        self.stack.pop();
        result
    }
}

const RULE_KEYS: [&str; 9] = [
    "name", "label", "priority", "action", "keep", "type", "unit", "pattern", "example",
];

fn rule_spec(
    map: &Mapping,
    bindings: &IndexMap<String, String>,
    file: &str,
) -> Result<RuleSpec, GrammarError> {
    let name = match map.get("name") {
        Some(Value::String(s)) if !s.trim().is_empty() => s.clone(),
        Some(_) => {
            return Err(GrammarError::Structure {
                file: file.to_string(),
                message: "rule names must be nonempty strings".to_string(),
            })
        }
        None => {
            return Err(GrammarError::Structure {
                file: file.to_string(),
                message: "a rule is missing its `name`".to_string(),
            })
        }
    };
    for k in map.keys() {
        let key = scalar_string(k).unwrap_or_default();
        if !RULE_KEYS.contains(&key.as_str()) {
            return Err(GrammarError::UnknownKey {
                file: file.to_string(),
                key,
                context: format!("rule `{name}`"),
            });
        }
    }
    let invalid = |field: &'static str, message: String| GrammarError::InvalidField {
        rule: name.clone(),
        field,
        message,
    };
    let subst = |text: &str| {
        substitute_vars(text, bindings).map_err(|names| GrammarError::UnresolvedVariable {
            context: format!("rule `{name}`"),
            names,
        })
    };
    let string_field = |field: &'static str| -> Result<Option<String>, GrammarError> {
        match map.get(field) {
            None => Ok(None),
            Some(v) => scalar_string(v)
                .map(Some)
                .ok_or_else(|| invalid(field, "expected a string".to_string())),
        }
    };

    let labels = match map.get("label") {
        None => {
            return Err(GrammarError::MissingField {
                rule: name.clone(),
                field: "label",
            })
        }
        Some(Value::Sequence(items)) => items
            .iter()
            .map(|i| {
                scalar_string(i).ok_or_else(|| invalid("label", "labels must be strings".into()))
            })
            .collect::<Result<Vec<_>, _>>()?,
        Some(v) => {
            vec![scalar_string(v)
                .ok_or_else(|| invalid("label", "expected a string or list".into()))?]
        }
    };
    let labels = labels
        .iter()
        .map(|l| subst(l).map(|l| l.trim().to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    if labels.is_empty() || labels.iter().any(|l| l.is_empty()) {
        return Err(invalid(
            "label",
            "at least one nonempty label is required".into(),
        ));
    }

    let priority = match map.get("priority") {
        None => Priority::default(),
        Some(v) => Priority::from_yaml(v).map_err(|e| GrammarError::Priority {
            rule: name.clone(),
            text: scalar_string(v).unwrap_or_else(|| format!("{v:?}")),
            message: e.0,
        })?,
    };
    let action = string_field("action")?.unwrap_or_else(|| "default".to_string());
    let keep = match map.get("keep") {
        None => true,
        Some(Value::Bool(b)) => *b,
        Some(_) => return Err(invalid("keep", "expected true or false".into())),
    };
    let rule_type = match string_field("type")?.as_deref() {
        None | Some("dependency") => RuleType::Dependency,
        Some("token") => RuleType::Token,
        Some(other) => {
            return Err(invalid(
                "type",
                format!("`{other}` is not one of token, dependency"),
            ))
        }
    };
    let unit = match string_field("unit")? {
        None => Unit::Word,
        Some(u) => {
            let u = subst(&u)?;
            Unit::parse(u.trim())
                .ok_or_else(|| invalid("unit", format!("`{u}` is not one of word, tag")))?
        }
    };
    let pattern = string_field("pattern")?.ok_or_else(|| GrammarError::MissingField {
        rule: name.clone(),
        field: "pattern",
    })?;
    let pattern = subst(&pattern)?;

    Ok(RuleSpec {
        name,
        labels,
        priority,
        action,
        keep,
        rule_type,
        unit,
        pattern,
    })
}
