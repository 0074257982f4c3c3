//! The bundled example corpus and its golden outputs.
//!
//! Layout of a corpus directory:
//!
//! ```text
//! frep/*.json       F-representations run through both models
//! scope/*.json      F-representations used for scope listings only
//! formal/           formulas' models (JSON)
//! lexicon.tsv       recognizer lexicon
//! grammar.cfg       garden-path grammar
//! sentences.txt     garden-path sentences, one per line
//! corrupted.txt     recognizer inputs, one sentence per line
//! golden/           expected outputs, one file per case
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::formal_lang::{evaluate, parse_formula, Assignment, Model};
use crate::frep::{resolve_scope, FRepresentation};
use crate::gardenpath::{enumerate_parses, parse_incremental, Grammar, ORACLE_BOUND};
use crate::lexicon_cohort::{recognize, Lexicon, RecognizeError, Threshold};
use crate::pipeline::{compare, derive_p};

/// Environment variable overriding the corpus location.
pub const CORPUS_ENV: &str = "PMODEL_CORPUS_DIR";

/// `$PMODEL_CORPUS_DIR`, or the corpus shipped with this crate.
pub fn default_dir() -> PathBuf {
    std::env::var_os(CORPUS_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/corpus")))
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {message}")]
    File { path: PathBuf, message: String },
}

fn file_error(path: &Path, message: impl ToString) -> CorpusError {
    CorpusError::File {
        path: path.to_path_buf(),
        message: message.to_string(),
    }
}

fn read(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|e| file_error(path, e))
}

#[derive(Debug, Clone)]
pub struct Corpus {
    dir: PathBuf,
}

impl Corpus {
    pub fn open(dir: impl Into<PathBuf>) -> Self {
        Corpus { dir: dir.into() }
    }

    pub fn default_location() -> Self {
        Corpus::open(default_dir())
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn json_files(&self, sub: &str) -> Result<Vec<PathBuf>, CorpusError> {
        let dir = self.dir.join(sub);
        let mut out: Vec<PathBuf> = fs::read_dir(&dir)
            .map_err(|e| file_error(&dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        out.sort();
        Ok(out)
    }

    fn load_freps(&self, sub: &str) -> Result<Vec<(String, FRepresentation)>, CorpusError> {
        self.json_files(sub)?
            .into_iter()
            .map(|p| {
                let name = p
                    .file_stem()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .into_owned();
                let f = FRepresentation::from_json(&read(&p)?).map_err(|e| file_error(&p, e))?;
                Ok((name, f))
            })
            .collect()
    }

    /// Representations that go through both derivation models.
    pub fn freps(&self) -> Result<Vec<(String, FRepresentation)>, CorpusError> {
        self.load_freps("frep")
    }

    /// Representations used only for scope listings.
    pub fn scope_freps(&self) -> Result<Vec<(String, FRepresentation)>, CorpusError> {
        self.load_freps("scope")
    }

    pub fn model(&self, name: &str) -> Result<Model, CorpusError> {
        let path = self.dir.join("formal").join(format!("{name}.json"));
        serde_json::from_str(&read(&path)?).map_err(|e| file_error(&path, e))
    }

    pub fn frep_at(&self, sub: &str, name: &str) -> Result<FRepresentation, CorpusError> {
        let path = self.dir.join(sub).join(format!("{name}.json"));
        FRepresentation::from_json(&read(&path)?).map_err(|e| file_error(&path, e))
    }

    pub fn lexicon(&self) -> Result<Lexicon, CorpusError> {
        let path = self.dir.join("lexicon.tsv");
        Lexicon::load(&path).map_err(|e| file_error(&path, e))
    }

    pub fn grammar(&self) -> Result<Grammar, CorpusError> {
        let path = self.dir.join("grammar.cfg");
        Grammar::load(&path).map_err(|e| file_error(&path, e))
    }

    fn lines(&self, file: &str) -> Result<Vec<String>, CorpusError> {
        Ok(read(&self.dir.join(file))?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with("//"))
            .map(str::to_string)
            .collect())
    }

    pub fn sentences(&self) -> Result<Vec<String>, CorpusError> {
        self.lines("sentences.txt")
    }

    pub fn corrupted(&self) -> Result<Vec<String>, CorpusError> {
        self.lines("corrupted.txt")
    }

    /// Names of all golden cases, in a fixed order.
    pub fn golden_cases(&self) -> Result<Vec<String>, CorpusError> {
        let mut cases = Vec::new();
        for p in self.json_files("frep")? {
            let stem = p
                .file_stem()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned();
            cases.push(format!("derive/{stem}"));
        }
        for sub in ["frep", "scope"] {
            for p in self.json_files(sub)? {
                let stem = p
                    .file_stem()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .into_owned();
                cases.push(format!("scope/{stem}"));
            }
        }
        cases.extend(["formal", "gardenpath", "recognize"].map(String::from));
        Ok(cases)
    }

    pub fn golden_path(&self, case: &str) -> PathBuf {
        self.dir.join("golden").join(format!("{case}.txt"))
    }

    /// Computes the current output of one golden case.
    pub fn render_case(&self, case: &str) -> Result<String, CorpusError> {
        match case.split_once('/') {
            Some(("derive", name)) => {
                let f = self.frep_at("frep", name)?;
                let mut out = match derive_p(&f) {
                    Ok(d) => d.to_text(),
                    Err(e) => format!("error: {e}\n"),
                };
                let report = compare(&f);
                if let Some(t) = &report.t {
                    out.push_str(&t.to_text());
                }
                out.push_str(&report.to_text());
                Ok(out)
            }
            Some(("scope", name)) => {
                let path = self.dir.join("frep").join(format!("{name}.json"));
                let sub = if path.exists() { "frep" } else { "scope" };
                let f = self.frep_at(sub, name)?;
                Ok(match resolve_scope(&f) {
                    Ok(readings) => scope_listing(&readings),
                    Err(e) => format!("error: {e}\n"),
                })
            }
            None if case == "formal" => self.render_formal(),
            None if case == "gardenpath" => self.render_gardenpath(),
            None if case == "recognize" => self.render_recognize(),
            _ => Err(file_error(&self.golden_path(case), "unknown golden case")),
        }
    }

    fn render_formal(&self) -> Result<String, CorpusError> {
        let mut out = String::new();
        let cases = [
            ("snow_model", "prob(snow) = 4/5"),
            ("singleton", "forall x. (x in H -> J S x)"),
            ("jones_saw_some", "forall x. (x in H -> J S x)"),
            ("jones_saw_some", "exists x. (x in H & J S x)"),
        ];
        for (model, text) in cases {
            let m = self.model(model)?;
            let value = parse_formula(text)
                .map_err(|e| e.to_string())
                .and_then(|f| evaluate(&f, &m, &Assignment::new()).map_err(|e| e.to_string()));
            match value {
                Ok(v) => out.push_str(&format!("{model}: {text} => {v}\n")),
                Err(e) => out.push_str(&format!("{model}: {text} => error: {e}\n")),
            }
        }
        Ok(out)
    }

    fn render_gardenpath(&self) -> Result<String, CorpusError> {
        let g = self.grammar()?;
        let mut out = String::new();
        for s in self.sentences()? {
            let words: Vec<&str> = s.split_whitespace().collect();
            out.push_str(&gardenpath_report(&s, &words, &g, true));
            out.push('\n');
        }
        Ok(out)
    }

    fn render_recognize(&self) -> Result<String, CorpusError> {
        let lex = self.lexicon()?;
        let mut out = String::new();
        for line in self.corrupted()? {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            out.push_str(&format!("{line} => {}\n", recognition_line(&lex, &tokens)));
        }
        Ok(out)
    }
}

/// Numbered readings, one per line.
pub fn scope_listing(readings: &[crate::formal_lang::Formula]) -> String {
    readings
        .iter()
        .enumerate()
        .map(|(k, r)| format!("{}. {r}\n", k + 1))
        .collect()
}

/// Recognized words joined by spaces, with `?` marking failed slots.
pub fn recognition_line(lex: &Lexicon, tokens: &[&str]) -> String {
    match recognize(lex, tokens, None, Threshold::HalfForm) {
        Ok(words) => words
            .iter()
            .map(|r| r.entry.form.as_str())
            .collect::<Vec<_>>()
            .join(" "),
        Err(RecognizeError::NoCandidate { partial, .. }) => partial
            .iter()
            .map(|r| r.as_ref().map_or("?", |r| r.entry.form.as_str()))
            .collect::<Vec<_>>()
            .join(" "),
        Err(e) => format!("error: {e}"),
    }
}

/// Incremental parse, node counts and, with `oracle`, the exhaustive
/// comparison.
pub fn gardenpath_report(sentence: &str, words: &[&str], g: &Grammar, oracle: bool) -> String {
    let p = parse_incremental(words, g);
    let counts: String = p.node_counts.iter().map(|n| format!(" {n}")).collect();
    let mut out = format!("sentence: {sentence}\n");
    match &p.result {
        Ok(t) => out.push_str(&format!("tree: {t}\nnodes: {}\n", t.node_count())),
        Err(e) => out.push_str(&format!("failed: {e}\n")),
    }
    out.push_str(&format!("counts:{counts}\n"));
    if oracle {
        match enumerate_parses(words, g, ORACLE_BOUND) {
            Ok(parses) => {
                let minimal = parses.iter().map(|t| t.node_count()).min();
                out.push_str(&format!("parses: {}\n", parses.len()));
                if let Some(m) = minimal {
                    out.push_str(&format!("minimal: {m}\n"));
                }
                out.push_str(&format!(
                    "garden-path: {}\n",
                    p.result.is_err() && !parses.is_empty()
                ));
            }
            Err(e) => out.push_str(&format!("oracle: {e}\n")),
        }
    }
    out
}
