use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use pmodel::corpus::{gardenpath_report, recognition_line, scope_listing, Corpus, CORPUS_ENV};
use pmodel::formal_lang::{evaluate, parse_formula, to_sheffer, Assignment, Model};
use pmodel::frep::{resolve_scope, FRepresentation, Force, Mood};
use pmodel::gardenpath::{parse_incremental, Grammar};
use pmodel::lexicon_cohort::{recognize, Lexicon, RecognizeError, Threshold};
use pmodel::movement::MovementConfig;
use pmodel::pipeline::{compare, derive_p, derive_t, Derivation};
use pmodel::syntax_rep::{parse_sstring, Level};
use pmodel::Category;

#[derive(Parser)]
#[command(
    name = "pmodel",
    version,
    about = "Derivations under the T-model and the P-model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Formal strings: parse, evaluate, rewrite with the Sheffer stroke
    Formal {
        #[command(subcommand)]
        action: FormalAction,
    },
    /// Validate an F-representation file and print its qualities
    Frep {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run a derivation
    Derive {
        #[command(subcommand)]
        model: DeriveModel,
    },
    /// List the scope readings of an F-representation
    Scope { file: PathBuf },
    /// Run both models on an F-representation and compare them
    Compare { file: PathBuf },
    /// Recover words from input with `#` marking unheard graphemes
    Recognize {
        lexicon: PathBuf,
        sentence: String,
        /// Expected categories per word, e.g. "N V Q"; `N|V` allows either,
        /// `*` allows any
        #[arg(long)]
        expect: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Parse incrementally and report garden paths
    Gardenpath {
        grammar: PathBuf,
        sentence: String,
        /// Also run the exhaustive parser
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Golden corpus
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum FormalAction {
    /// Print the canonical rendering
    Parse {
        formula: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Evaluate on a model file
    Eval {
        #[arg(long)]
        model: PathBuf,
        formula: String,
    },
    /// Rewrite with the Sheffer stroke only
    Sheffer { formula: String },
}

#[derive(Subcommand)]
enum DeriveModel {
    /// P-model: F-representation, D-structure, S-structure
    P {
        file: PathBuf,
        /// Emphasize this word
        #[arg(long)]
        emphasis: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// T-model: D-structure, S-structure, LF
    T {
        /// D-structure in bracketed form
        ds: String,
        #[arg(long, default_value = "declarative")]
        force: String,
        #[arg(long)]
        emphasis: Option<String>,
        /// Leave Wh words in situ
        #[arg(long)]
        no_wh_fronting: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Recompute every golden case and diff against the stored output
    Run {
        #[arg(long, env = CORPUS_ENV)]
        dir: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Overwrite stored outputs with the current ones
        #[arg(long)]
        bless: bool,
    },
}

/// A failure the command reports with exit code 1, after printing `stdout`.
struct DomainFailure {
    stdout: String,
    message: String,
}

enum Outcome {
    Ok(String),
    Failed(DomainFailure),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Ok(out)) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Ok(Outcome::Failed(f)) => {
            print!("{}", f.stdout);
            eprintln!("error: {}", f.message);
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_frep(path: &Path) -> Result<FRepresentation> {
    FRepresentation::from_json(&read(path)?).with_context(|| path.display().to_string())
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Formal { action } => formal(action),
        Command::Frep { file, format } => frep(&file, format),
        Command::Derive { model } => derive(model),
        Command::Scope { file } => {
            let f = load_frep(&file)?;
            Ok(Outcome::Ok(scope_listing(&resolve_scope(&f)?)))
        }
        Command::Compare { file } => {
            let report = compare(&load_frep(&file)?);
            let text = report.to_text();
            Ok(if report.consistent() {
                Outcome::Ok(text)
            } else {
                Outcome::Failed(DomainFailure {
                    stdout: text,
                    message: "models disagree".into(),
                })
            })
        }
        Command::Recognize {
            lexicon,
            sentence,
            expect,
            format,
        } => recognize_cmd(&lexicon, &sentence, expect.as_deref(), format),
        Command::Gardenpath {
            grammar,
            sentence,
            oracle,
            format,
        } => gardenpath(&grammar, &sentence, oracle, format),
        Command::Corpus {
            action: CorpusAction::Run { dir, jobs, bless },
        } => corpus_run(dir, jobs, bless),
    }
}

fn formal(action: FormalAction) -> Result<Outcome> {
    match action {
        FormalAction::Parse { formula, format } => {
            let f = parse_formula(&formula)?;
            Ok(Outcome::Ok(match format {
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&f.to_json())?),
                _ => format!("{f}\n"),
            }))
        }
        FormalAction::Eval { model, formula } => {
            let m: Model = serde_json::from_str(&read(&model)?)
                .with_context(|| model.display().to_string())?;
            let f = parse_formula(&formula)?;
            let v = evaluate(&f, &m, &Assignment::new())?;
            Ok(Outcome::Ok(format!("{v}\n")))
        }
        FormalAction::Sheffer { formula } => {
            let f = parse_formula(&formula)?;
            Ok(Outcome::Ok(format!("{}\n", to_sheffer(&f)?)))
        }
    }
}

fn frep(file: &Path, format: Format) -> Result<Outcome> {
    let f = load_frep(file)?;
    if format == Format::Json {
        return Ok(Outcome::Ok(format!("{}\n", f.to_json())));
    }
    let mut out = String::new();
    out.push_str("external:\n");
    for (word, entity) in f.external() {
        out.push_str(&format!("  {word} = {entity}\n"));
    }
    out.push_str("lexical:\n");
    for r in f.lexical() {
        out.push_str(&format!("  {} = {} ({})\n", r.symbol, r.word, r.category));
    }
    let d = f.declarants();
    out.push_str(&format!("calculus: {:?}\n", d.calculus).to_lowercase());
    let params: Vec<String> = d
        .parameters
        .iter()
        .map(|p| format!("{} in {}", p.variable, p.sort))
        .collect();
    out.push_str(&format!("parameters: {}\n", params.join(", ")));
    if let Some(order) = &d.scope_order {
        out.push_str(&format!("scope order: {}\n", order.join(" > ")));
    }
    out.push_str(&format!("string: {}\n", f.string()));
    let mood = match f.force().mood {
        Mood::Declarative => "declarative",
        Mood::Interrogative => "interrogative",
    };
    out.push_str(&format!("force: {mood}"));
    if let Some(e) = &f.force().emphasis {
        out.push_str(&format!(", emphasis on {e}"));
    }
    out.push('\n');
    Ok(Outcome::Ok(out))
}

fn show(d: &Derivation, format: Format) -> Result<String> {
    Ok(match format {
        Format::Text => d.to_text(),
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&d.to_json())?),
        Format::Dot => d.to_dot(),
    })
}

fn derive(model: DeriveModel) -> Result<Outcome> {
    match model {
        DeriveModel::P {
            file,
            emphasis,
            format,
        } => {
            let mut f = load_frep(&file)?;
            if let Some(word) = emphasis {
                let symbol = f
                    .referent_for_word(&word)
                    .map(|r| r.symbol.clone())
                    .ok_or_else(|| {
                        anyhow!("`{word}` is not a lexical referent of {}", file.display())
                    })?;
                f = f.with_force(f.force().clone().emphasizing(&symbol))?;
            }
            let d = derive_p(&f)?;
            Ok(Outcome::Ok(show(&d, format)?))
        }
        DeriveModel::T {
            ds,
            force,
            emphasis,
            no_wh_fronting,
            format,
        } => {
            let mood: Mood = force.parse().map_err(|e: String| anyhow!(e))?;
            let force = Force { mood, emphasis };
            let ds = parse_sstring(Level::DS, &ds)?;
            let cfg = MovementConfig::default().with_wh_fronting(!no_wh_fronting);
            let d = derive_t(&ds, &force, &cfg)?;
            Ok(Outcome::Ok(show(&d, format)?))
        }
    }
}

fn parse_expect(spec: &str) -> Result<Vec<BTreeSet<Category>>> {
    spec.split_whitespace()
        .map(|slot| {
            if slot == "*" {
                return Ok(Category::ALL.into_iter().collect());
            }
            slot.split('|')
                .map(|c| c.parse::<Category>().map_err(|e| anyhow!("{e}")))
                .collect()
        })
        .collect()
}

fn recognize_cmd(
    lexicon: &Path,
    sentence: &str,
    expect: Option<&str>,
    format: Format,
) -> Result<Outcome> {
    let lex = Lexicon::load(lexicon)?;
    let tokens: Vec<&str> = sentence.split_whitespace().collect();
    let expected = expect.map(parse_expect).transpose()?;
    let result = recognize(&lex, &tokens, expected.as_deref(), Threshold::HalfForm);
    if format == Format::Json {
        let value = match &result {
            Ok(words) => serde_json::json!({ "ok": true, "words": words }),
            Err(RecognizeError::NoCandidate { slot, partial }) => {
                serde_json::json!({ "ok": false, "failed_slot": slot, "words": partial })
            }
            Err(e) => bail!("{e}"),
        };
        let text = format!("{}\n", serde_json::to_string_pretty(&value)?);
        return Ok(match result {
            Ok(_) => Outcome::Ok(text),
            Err(e) => Outcome::Failed(DomainFailure {
                stdout: text,
                message: e.to_string(),
            }),
        });
    }
    match result {
        Ok(words) => {
            let line: Vec<&str> = words.iter().map(|r| r.entry.form.as_str()).collect();
            Ok(Outcome::Ok(format!("{}\n", line.join(" "))))
        }
        Err(RecognizeError::NoCandidate { partial, .. }) => {
            let failed: Vec<String> = partial
                .iter()
                .enumerate()
                .filter(|(_, r)| r.is_none())
                .map(|(k, _)| format!("{} (`{}`)", k, tokens[k]))
                .collect();
            Ok(Outcome::Failed(DomainFailure {
                stdout: format!("{}\n", recognition_line(&lex, &tokens)),
                message: format!("no candidate for slot {}", failed.join(", ")),
            }))
        }
        Err(e) => bail!("{e}"),
    }
}

fn gardenpath(grammar: &Path, sentence: &str, oracle: bool, format: Format) -> Result<Outcome> {
    let g = Grammar::load(grammar)?;
    let words: Vec<&str> = sentence.split_whitespace().collect();
    let parse = parse_incremental(&words, &g);
    let out = match (format, &parse.result) {
        (Format::Dot, Ok(tree)) => tree.to_dot(),
        (Format::Json, _) => {
            let value = serde_json::json!({
                "tree": parse.result.as_ref().ok(),
                "error": parse.result.as_ref().err().map(ToString::to_string),
                "node_counts": parse.node_counts,
            });
            format!("{}\n", serde_json::to_string_pretty(&value)?)
        }
        _ => gardenpath_report(sentence, &words, &g, oracle),
    };
    Ok(match parse.result {
        Ok(_) => Outcome::Ok(out),
        Err(e) => Outcome::Failed(DomainFailure {
            stdout: out,
            message: e.to_string(),
        }),
    })
}

fn diff(expected: &str, actual: &str) -> String {
    let e: Vec<&str> = expected.lines().collect();
    let a: Vec<&str> = actual.lines().collect();
    let mut out = String::new();
    for k in 0..e.len().max(a.len()) {
        match (e.get(k), a.get(k)) {
            (Some(x), Some(y)) if x == y => {}
            (x, y) => {
                if let Some(x) = x {
                    out.push_str(&format!("  - {x}\n"));
                }
                if let Some(y) = y {
                    out.push_str(&format!("  + {y}\n"));
                }
            }
        }
    }
    out
}

fn corpus_run(dir: Option<PathBuf>, jobs: usize, bless: bool) -> Result<Outcome> {
    let corpus = dir
        .map(Corpus::open)
        .unwrap_or_else(Corpus::default_location);
    let cases = corpus.golden_cases()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()?;
    let results: Vec<(String, Result<String, String>)> = pool.install(|| {
        cases
            .par_iter()
            .map(|c| (c.clone(), corpus.render_case(c).map_err(|e| e.to_string())))
            .collect()
    });
    let mut out = String::new();
    let mut failures = 0;
    for (case, actual) in results {
        let path = corpus.golden_path(&case);
        let actual = match actual {
            Ok(a) => a,
            Err(e) => {
                failures += 1;
                out.push_str(&format!("FAIL {case}: {e}\n"));
                continue;
            }
        };
        if bless {
            if let Some(parent) = path.parent() {
                fs::create_dir_all(parent)?;
            }
            fs::write(&path, &actual)?;
            out.push_str(&format!("blessed {case}\n"));
            continue;
        }
        match fs::read_to_string(&path) {
            Ok(expected) if expected == actual => out.push_str(&format!("ok {case}\n")),
            Ok(expected) => {
                failures += 1;
                out.push_str(&format!("FAIL {case}\n{}", diff(&expected, &actual)));
            }
            Err(_) => {
                failures += 1;
                out.push_str(&format!("FAIL {case}: missing {}\n", path.display()));
            }
        }
    }
    out.push_str(&format!("{} cases, {failures} failed\n", cases.len()));
    Ok(if failures == 0 {
        Outcome::Ok(out)
    } else {
        Outcome::Failed(DomainFailure {
            stdout: out,
            message: format!("{failures} golden cases differ"),
        })
    })
}
