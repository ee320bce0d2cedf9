use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nile::corpus::corpus_selfcheck;
use nile::eval::Evaluator;
use nile::syntax::expand_sugar;
use nile_grader::service::{parse_check, serve, AppState, ParseRequest};
use nile_grader::{alphabet_from, check_text, grade, DiagnosticSource, GradeRequest, GradeResponse, GradeStatus};
use nile_pipeline::llm::{llm_translate, translate_rows, EndpointConfig, PromptInput, PromptKind, Templates};
use nile_pipeline::score::Scorer;

#[derive(Parser)]
#[command(name = "nile", version, about = "Parse, evaluate, compare and grade NILE expressions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GradeFlags {
    /// Alphabet symbols, e.g. `a,b`.
    #[arg(long, default_value = "a,b")]
    alphabet: String,
    /// Word-length bound for the bounded fallback.
    #[arg(long)]
    bound: Option<usize>,
    /// Automaton state budget.
    #[arg(long)]
    state_budget: Option<usize>,
    /// Presburger formula size budget.
    #[arg(long)]
    formula_budget: Option<usize>,
    /// Print the full JSON response.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check an expression and print its canonical form.
    Parse {
        expr: String,
        /// Also validate against this alphabet.
        #[arg(long)]
        alphabet: Option<String>,
    },
    /// Decide whether a word belongs to the language of an expression.
    Eval {
        expr: String,
        /// The word; `eps` or an empty argument for the empty word.
        word: String,
        #[arg(long, default_value = "a,b")]
        alphabet: String,
    },
    /// Decide whether two expressions denote the same language.
    Equiv {
        first: String,
        second: String,
        #[command(flatten)]
        flags: GradeFlags,
    },
    /// Compare a candidate with a reference and explain the difference.
    Explain {
        reference: String,
        candidate: String,
        #[command(flatten)]
        flags: GradeFlags,
    },
    /// Bundled corpus tools.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
    /// Run the HTTP grading service.
    Serve {
        #[arg(long, env = "NILE_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "NILE_HOST", default_value = "127.0.0.1")]
        host: String,
        /// Append one JSON line per graded request to this file.
        #[arg(long, env = "NILE_LOG_PATH")]
        log: Option<PathBuf>,
    },
    /// Dataset tools.
    Dataset {
        #[command(subcommand)]
        command: DatasetCommand,
    },
    /// Chat-completion tools. The endpoint comes from NILE_LLM_BASE_URL,
    /// NILE_LLM_MODEL and NILE_LLM_API_KEY.
    Llm {
        #[command(subcommand)]
        command: LlmCommand,
    },
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Check every entry against its regular expression or set definition.
    Check {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Markdown,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum DatasetCommand {
    /// Score a JSONL dataset and print the statistics table.
    Score {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "markdown")]
        format: TableFormat,
    },
}

#[derive(Subcommand)]
enum LlmCommand {
    /// Translate one description, or fill model outputs for a dataset.
    Translate {
        /// m1, m2 or m3.
        #[arg(long, default_value = "m3")]
        method: String,
        /// A single description to translate.
        description: Option<String>,
        #[arg(long, default_value = "a,b")]
        alphabet: String,
        /// Treat the task as context-free (m2 then asks for a grammar).
        #[arg(long)]
        context_free: bool,
        /// Task description for m1.
        #[arg(long, default_value = "")]
        task_description: String,
        /// JSONL dataset whose rows get their model outputs filled.
        #[arg(long, conflicts_with = "description")]
        dataset: Option<PathBuf>,
        /// Where to write the filled dataset; defaults to stdout.
        #[arg(long, requires = "dataset")]
        output: Option<PathBuf>,
        /// Directory with m1.md, m2a.md, m2b.md and m3.md.
        #[arg(long)]
        templates: Option<PathBuf>,
        /// Requests in flight at once.
        #[arg(long, default_value_t = 4)]
        parallel: usize,
    },
}

fn symbols(list: &str) -> Vec<String> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

fn request(reference: String, candidate: String, flags: &GradeFlags, explain: bool) -> GradeRequest {
    let mut req =
        GradeRequest { alphabet: symbols(&flags.alphabet), reference, candidate, options: Default::default() };
    req.options.bound_l = flags.bound;
    req.options.explain = explain;
    req.options.budgets.states = flags.state_budget;
    req.options.budgets.formula = flags.formula_budget;
    req
}

fn print_response(resp: &GradeResponse, json: bool) -> Result<ExitCode> {
    if json {
        println!("{}", serde_json::to_string_pretty(resp)?);
    } else {
        match resp.status {
            GradeStatus::Error => {
                for d in &resp.diagnostics {
                    eprintln!("{:?} {}: {}", d.source, d.kind, d.message);
                }
            }
            status => {
                let method = resp.method.map(|m| serde_json::to_value(m).unwrap_or_default());
                let method = method.as_ref().and_then(|m| m.as_str()).unwrap_or("-");
                let status = serde_json::to_value(status)?;
                match resp.bound {
                    Some(l) => println!("{} (words up to length {l}; method {method})", status.as_str().unwrap_or("")),
                    None => println!("{} (method {method})", status.as_str().unwrap_or("")),
                }
                if let Some(c) = &resp.counterexample {
                    let word = if c.word.is_empty() { "eps" } else { &c.word };
                    println!("counterexample: {word} (reference: {}, candidate: {})", c.in_reference, c.in_candidate);
                }
                for f in &resp.findings {
                    println!("{} at {} {:?}: {}", f.code, f.side, f.path, f.message);
                }
            }
        }
    }
    Ok(if resp.status == GradeStatus::Error { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn endpoint() -> Result<EndpointConfig> {
    EndpointConfig::from_env().context("set NILE_LLM_BASE_URL and NILE_LLM_MODEL to use the chat-completion endpoint")
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Parse { expr, alphabet } => {
            let resp = parse_check(&ParseRequest { text: expr, alphabet: alphabet.as_deref().map(symbols) });
            if let Some(r) = &resp.rendered {
                println!("{r}");
            }
            for d in &resp.diagnostics {
                eprintln!("{}: {}", d.kind, d.message);
            }
            Ok(if resp.ok { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Eval { expr, word, alphabet } => {
            let sigma = alphabet_from(&symbols(&alphabet)).map_err(anyhow::Error::msg)?;
            let e = match check_text(DiagnosticSource::Candidate, &expr, &sigma) {
                Ok(e) => e,
                Err(diags) => {
                    for d in diags {
                        eprintln!("{}: {}", d.kind, d.message);
                    }
                    return Ok(ExitCode::from(2));
                }
            };
            let core = expand_sugar(&e, &sigma)?;
            let word = if word == "eps" { String::new() } else { word };
            if !sigma.accepts_word(&word) {
                bail!("word {word:?} uses symbols outside the alphabet");
            }
            println!("{}", Evaluator::new(&core, &sigma).accepts(&word)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Equiv { first, second, flags } => {
            print_response(&grade(&request(first, second, &flags, false)), flags.json)
        }
        Command::Explain { reference, candidate, flags } => {
            print_response(&grade(&request(reference, candidate, &flags, true)), flags.json)
        }
        Command::Corpus { command: CorpusCommand::Check { json } } => {
            let report = corpus_selfcheck();
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                for e in &report.entries {
                    let how = match e.method {
                        Some(_) => "exact".to_string(),
                        None => format!("{} words", e.words_checked),
                    };
                    println!("{} {} ({how}, {} ms)", e.id, if e.ok { "ok" } else { "FAILED" }, e.millis);
                    for f in &e.failures {
                        println!("  {f}");
                    }
                }
            }
            Ok(if report.ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Serve { port, host, log } => {
            let state = match &log {
                Some(path) => AppState::with_log(path).with_context(|| format!("opening {}", path.display()))?,
                None => AppState::default(),
            };
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(serve(&format!("{host}:{port}"), state))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Dataset { command: DatasetCommand::Score { path, format } } => {
            let ingested = nile_pipeline::ingest(&path)?;
            for d in &ingested.diagnostics {
                eprintln!("{}:{}: {}", path.display(), d.line, d.message);
            }
            let table = Scorer::default().score(&ingested.rows);
            match format {
                TableFormat::Markdown => print!("{}", table.to_markdown()),
                TableFormat::Csv => print!("{}", table.to_csv()),
                TableFormat::Json => println!("{}", serde_json::to_string_pretty(&table)?),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Llm {
            command:
                LlmCommand::Translate {
                    method,
                    description,
                    alphabet,
                    context_free,
                    task_description,
                    dataset,
                    output,
                    templates,
                    parallel,
                },
        } => {
            let templates = templates.map_or(Templates::Bundled, Templates::Dir);
            let cfg = endpoint()?;
            if let Some(path) = dataset {
                let mut ingested = nile_pipeline::ingest(&path)?;
                for d in &ingested.diagnostics {
                    eprintln!("{}:{}: skipped: {}", path.display(), d.line, d.message);
                }
                if PromptKind::from_method(&method, true).is_none() {
                    bail!("unknown method {method:?}; use m1, m2 or m3");
                }
                let failures = translate_rows(&mut ingested.rows, &method, &cfg, &templates, parallel);
                for (id, e) in &failures {
                    eprintln!("row {id}: {e}");
                }
                let mut text = String::new();
                for row in &ingested.rows {
                    text.push_str(&serde_json::to_string(row)?);
                    text.push('\n');
                }
                match output {
                    Some(out) => fs::write(&out, text).with_context(|| format!("writing {}", out.display()))?,
                    None => print!("{text}"),
                }
                return Ok(if failures.is_empty() { ExitCode::SUCCESS } else { ExitCode::FAILURE });
            }
            let Some(description) = description else { bail!("give a description or --dataset") };
            let kind = PromptKind::from_method(&method, !context_free)
                .with_context(|| format!("unknown method {method:?}; use m1, m2 or m3"))?;
            let input = PromptInput { description, alphabet: symbols(&alphabet), task_description };
            println!("{}", llm_translate(&input, kind, &cfg, &templates)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
