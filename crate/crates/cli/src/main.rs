use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cascade::{
    label_matches, load_grammar, mention_to_json, parse_document, Document, Extraction,
    ExtractorEngine, Grammar,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Rule-based event extraction over pre-annotated documents.
#[derive(Parser, Debug)]
#[command(name = "cascade", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load a grammar and list its rules.
    Validate { grammar: PathBuf },
    /// Run a grammar over documents and print the mentions as JSON.
    Extract {
        #[command(flatten)]
        run: RunArgs,
        /// Only output mentions carrying this label (or a descendant of it).
        #[arg(long)]
        label: Option<String>,
        #[arg(long)]
        pretty: bool,
        /// Write `<docid>.mentions` files into this directory instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Show what every rule did in every iteration.
    Trace {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = TraceFormat::Text)]
        trace_format: TraceFormat,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    grammar: PathBuf,
    #[arg(required = true)]
    documents: Vec<PathBuf>,
    #[arg(long, default_value_t = ExtractorEngine::DEFAULT_MAX_ITERATIONS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    max_iterations: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TraceFormat {
    Text,
    Jsonl,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn grammar(message: impl ToString) -> Self {
        Failure {
            code: 1,
            message: message.to_string(),
        }
    }

    fn document(path: &Path, message: impl ToString) -> Self {
        Failure {
            code: 2,
            message: format!("{}: {}", path.display(), message.to_string()),
        }
    }

    fn io(path: &Path, err: io::Error) -> Self {
        Failure {
            code: 3,
            message: format!("{}: {err}", path.display()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { grammar } => validate(&grammar),
        Command::Extract {
            run,
            label,
            pretty,
            out,
        } => {
            let outputs = with_extractions(&run, |grammar, docs, results| {
                Ok(docs
                    .iter()
                    .zip(&results)
                    .map(|(doc, result)| {
                        let json: Vec<_> = result
                            .mentions
                            .iter()
                            .filter(|m| match &label {
                                Some(l) => label_matches(m.labels(), l, grammar.taxonomy.as_ref()),
                                None => true,
                            })
                            .map(|m| mention_to_json(m, doc))
                            .collect();
                        let text = if pretty {
                            serde_json::to_string_pretty(&json)
                        } else {
                            serde_json::to_string(&json)
                        };
                        (doc.id.clone(), text.expect("mentions serialize"))
                    })
                    .collect::<Vec<_>>())
            })?;
            match out {
                Some(dir) => write_files(&dir, &outputs),
                None => {
                    let mut stdout = io::stdout().lock();
                    for (_, text) in outputs {
                        writeln!(stdout, "{text}")
                            .map_err(|e| Failure::io(Path::new("<stdout>"), e))?;
                    }
                    Ok(())
                }
            }
        }
        Command::Trace { run, trace_format } => with_extractions(&run, |_, docs, results| {
            let mut stdout = io::stdout().lock();
            for (doc, result) in docs.iter().zip(&results) {
                let trace = &result.trace;
                let text = match trace_format {
                    TraceFormat::Text => format!("document {}\n{trace}", doc.id),
                    TraceFormat::Jsonl => {
                        let mut lines = String::new();
                        for it in &trace.iterations {
                            let mut v = serde_json::to_value(it).expect("trace serializes");
                            v["document"] = doc.id.clone().into();
                            lines.push_str(&v.to_string());
                            lines.push('\n');
                        }
                        let summary = serde_json::json!({
                            "document": doc.id,
                            "fixpoint": trace.fixpoint,
                            "iterations": result.iterations,
                            "warning": trace.warning,
                        });
                        lines.push_str(&summary.to_string());
                        lines.push('\n');
                        lines
                    }
                };
                stdout
                    .write_all(text.as_bytes())
                    .map_err(|e| Failure::io(Path::new("<stdout>"), e))?;
            }
            Ok(())
        }),
    }
}

fn load(path: &Path) -> Result<Grammar, Failure> {
    let src = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let grammar = load_grammar(&src, &|p: &str| {
        fs::read_to_string(base.join(p)).map_err(|e| e.to_string())
    })
    .map_err(|e| Failure::grammar(format!("{}: {e}", path.display())))?;
    for rule in &grammar.rules {
        if rule.spec.action != "default" {
            return Err(Failure::grammar(format!(
                "{}: rule `{}` uses action `{}`; custom actions are only available through the library API (ActionRegistry)",
                path.display(),
                rule.spec.name,
                rule.spec.action
            )));
        }
    }
    Ok(grammar)
}

fn validate(path: &Path) -> Result<(), Failure> {
    let grammar = load(path)?;
    let mut stdout = io::stdout().lock();
    let mut emit = |line: String| {
        writeln!(stdout, "{line}").map_err(|e| Failure::io(Path::new("<stdout>"), e))
    };
    emit(format!("{}: {} rules", path.display(), grammar.rules.len()))?;
    for rule in &grammar.rules {
        emit(format!(
            "{}\t{}\t{}\t{}",
            rule.spec.name,
            rule.spec.rule_type.as_str(),
            rule.spec.priority,
            rule.info.labels.join(",")
        ))?;
    }
    Ok(())
}

/// Loads the grammar and documents, extracts every document (in parallel)
/// and hands the results, in input order, to `f`.
fn with_extractions<R>(
    run: &RunArgs,
    f: impl FnOnce(&Grammar, &[Document], Vec<Extraction>) -> Result<R, Failure>,
) -> Result<R, Failure> {
    let grammar = load(&run.grammar)?;
    let engine = ExtractorEngine::new(grammar)
        .and_then(|e| e.with_max_iterations(run.max_iterations as usize))
        .map_err(Failure::grammar)?;
    let mut docs = Vec::with_capacity(run.documents.len());
    for path in &run.documents {
        let bytes = fs::read(path).map_err(|e| Failure::io(path, e))?;
        docs.push(parse_document(&bytes).map_err(|e| Failure::document(path, e))?);
    }
    let engine = &engine;
    let results = std::thread::scope(|scope| {
        let handles: Vec<_> = docs
            .iter()
            .map(|doc| scope.spawn(move || engine.extract_from(doc)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("extraction thread panicked"))
            .collect::<Vec<_>>()
    });
    for extraction in &results {
        if let Some(w) = &extraction.warning {
            eprintln!("warning: {w}");
        }
    }
    f(engine.grammar(), &docs, results)
}

/// Writes every output file, each via a temporary file and a rename.
fn write_files(dir: &Path, outputs: &[(String, String)]) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    for (id, text) in outputs {
        let target = dir.join(format!("{id}.mentions"));
        let tmp = dir.join(format!(".{id}.mentions.tmp"));
        fs::write(&tmp, format!("{text}\n")).map_err(|e| Failure::io(&tmp, e))?;
        fs::rename(&tmp, &target).map_err(|e| Failure::io(&target, e))?;
    }
    Ok(())
}
