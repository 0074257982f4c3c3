//! Lexicon with cohort-style word recognition: access by heard prefix,
//! selection by edit distance, then integration with the categories the
//! context expects.
//!
//! Lexicon files are tab separated, one entry per line:
//!
//! ```text
//! form    category    feature,feature    frequency    symbol
//! ```
//!
//! The feature list may be empty or `-`; the symbol column is optional.
//! Blank lines and lines starting with `#` are skipped. In recognizer input
//! `#` marks an unheard grapheme.

use std::collections::BTreeSet;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Category;

/// Grapheme standing for an unheard sound in recognizer input.
pub const MARKER: char = '#';

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LexEntry {
    pub form: String,
    pub category: Category,
    #[serde(default)]
    pub features: BTreeSet<String>,
    pub frequency: u64,
    #[serde(default)]
    pub symbol: Option<String>,
}

impl LexEntry {
    pub fn new(form: &str, category: Category, frequency: u64) -> Self {
        LexEntry {
            form: form.to_string(),
            category,
            features: BTreeSet::new(),
            frequency,
            symbol: None,
        }
    }

    pub fn with_features(mut self, features: &[&str]) -> Self {
        self.features = features.iter().map(|f| f.to_string()).collect();
        self
    }

    pub fn with_symbol(mut self, symbol: &str) -> Self {
        self.symbol = Some(symbol.to_string());
        self
    }

    fn to_line(&self) -> String {
        let features = if self.features.is_empty() {
            "-".to_string()
        } else {
            self.features.iter().cloned().collect::<Vec<_>>().join(",")
        };
        let mut line = format!(
            "{}\t{}\t{}\t{}",
            self.form, self.category, features, self.frequency
        );
        if let Some(s) = &self.symbol {
            line.push('\t');
            line.push_str(s);
        }
        line
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LexiconError {
    #[error("line {line}: expected 4 or 5 tab-separated fields, found {found}")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: empty form")]
    EmptyForm { line: usize },
    #[error("line {line}: form `{form}` contains the corruption marker")]
    MarkerInForm { line: usize, form: String },
    #[error("line {line}: unknown category `{category}`")]
    UnknownCategory { line: usize, category: String },
    #[error("line {line}: bad frequency `{value}`")]
    BadFrequency { line: usize, value: String },
    #[error("duplicate entry {form}:{category}")]
    Duplicate { form: String, category: Category },
    #[error("cannot read lexicon: {0}")]
    Io(String),
}

/// Entries in load order. Forms are nonempty and (form, category) pairs are
/// unique.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Lexicon {
    entries: Vec<LexEntry>,
    /// Lowercased forms, parallel to `entries`.
    #[serde(skip)]
    keys: Vec<String>,
}

impl Lexicon {
    pub fn new(entries: Vec<LexEntry>) -> Result<Self, LexiconError> {
        let mut seen = BTreeSet::new();
        for (k, e) in entries.iter().enumerate() {
            if e.form.is_empty() {
                return Err(LexiconError::EmptyForm { line: k + 1 });
            }
            if e.form.contains(MARKER) {
                return Err(LexiconError::MarkerInForm {
                    line: k + 1,
                    form: e.form.clone(),
                });
            }
            if !seen.insert((e.form.to_lowercase(), e.category)) {
                return Err(LexiconError::Duplicate {
                    form: e.form.clone(),
                    category: e.category,
                });
            }
        }
        let keys = entries.iter().map(|e| e.form.to_lowercase()).collect();
        Ok(Lexicon { entries, keys })
    }

    pub fn entries(&self) -> &[LexEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LexiconError::Io(format!("{}: {e}", path.display())))?;
        text.parse()
    }

    pub fn to_tsv(&self) -> String {
        self.entries.iter().map(|e| e.to_line() + "\n").collect()
    }
}

impl FromStr for Lexicon {
    type Err = LexiconError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut entries = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = raw.split('\t').collect();
            if !(4..=5).contains(&fields.len()) {
                return Err(LexiconError::FieldCount {
                    line,
                    found: fields.len(),
                });
            }
            let form = fields[0].trim();
            if form.is_empty() {
                return Err(LexiconError::EmptyForm { line });
            }
            if form.contains(MARKER) {
                return Err(LexiconError::MarkerInForm {
                    line,
                    form: form.into(),
                });
            }
            let category = fields[1]
                .trim()
                .parse()
                .map_err(|_| LexiconError::UnknownCategory {
                    line,
                    category: fields[1].into(),
                })?;
            let features = match fields[2].trim() {
                "" | "-" => BTreeSet::new(),
                list => list.split(',').map(|f| f.trim().to_string()).collect(),
            };
            let frequency = fields[3]
                .trim()
                .parse()
                .map_err(|_| LexiconError::BadFrequency {
                    line,
                    value: fields[3].into(),
                })?;
            let symbol = fields
                .get(4)
                .map(|s| s.trim())
                .filter(|s| !s.is_empty())
                .map(str::to_string);
            entries.push(LexEntry {
                form: form.to_string(),
                category,
                features,
                frequency,
                symbol,
            });
        }
        Lexicon::new(entries)
    }
}

fn rank_order(a: &LexEntry, b: &LexEntry) -> std::cmp::Ordering {
    b.frequency
        .cmp(&a.frequency)
        .then_with(|| a.form.cmp(&b.form))
        .then_with(|| a.category.cmp(&b.category))
}

/// Entries activated by a heard prefix, most frequent first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cohort {
    pub prefix: String,
    pub members: Vec<LexEntry>,
}

fn cohort_indices(lex: &Lexicon, prefix: &str) -> Vec<usize> {
    let wanted = prefix.to_lowercase();
    let mut members: Vec<usize> = (0..lex.entries.len())
        .filter(|&k| lex.keys[k].starts_with(&wanted))
        .collect();
    members.sort_by(|&a, &b| rank_order(&lex.entries[a], &lex.entries[b]));
    members
}

/// Every entry whose form starts with `prefix`, compared without case.
pub fn access(lex: &Lexicon, prefix: &str) -> Cohort {
    Cohort {
        prefix: prefix.to_string(),
        members: cohort_indices(lex, prefix)
            .into_iter()
            .map(|k| lex.entries[k].clone())
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ranked {
    pub entry: LexEntry,
    pub distance: usize,
}

/// Ranks cohort members by edit distance to the observed token, then by
/// descending frequency, then by form.
pub fn select(c: &Cohort, observed: &str) -> Vec<Ranked> {
    let observed = observed.to_lowercase();
    let mut ranked: Vec<Ranked> = c
        .members
        .iter()
        .map(|e| Ranked {
            distance: strsim::levenshtein(&observed, &e.form.to_lowercase()),
            entry: e.clone(),
        })
        .collect();
    ranked.sort_by(|a, b| {
        a.distance
            .cmp(&b.distance)
            .then_with(|| rank_order(&a.entry, &b.entry))
    });
    ranked
}

/// Keeps candidates of the expected categories, preserving order.
pub fn integrate(ranked: Vec<Ranked>, expected: &BTreeSet<Category>) -> Vec<Ranked> {
    ranked
        .into_iter()
        .filter(|r| expected.contains(&r.entry.category))
        .collect()
}

/// Largest edit distance at which a candidate is still accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    /// Half the candidate's form length, rounded up.
    #[default]
    HalfForm,
    Fixed(usize),
    Unbounded,
}

impl Threshold {
    pub fn accepts(self, form: &str, distance: usize) -> bool {
        match self {
            Threshold::HalfForm => distance <= form.chars().count().div_ceil(2),
            Threshold::Fixed(max) => distance <= max,
            Threshold::Unbounded => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Recognized {
    pub token: String,
    pub entry: LexEntry,
    pub distance: usize,
    /// Size of the cohort the heard prefix activated.
    pub cohort: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RecognizeError {
    #[error("no input tokens")]
    Empty,
    #[error("expected categories given for {given} slots, but there are {tokens} tokens")]
    SlotMismatch { given: usize, tokens: usize },
    #[error("no acceptable candidate for token {slot}")]
    NoCandidate {
        slot: usize,
        /// What was recognized, slot by slot; `None` where recognition
        /// failed.
        partial: Vec<Option<Recognized>>,
    },
}

/// Text before the first corruption marker.
pub fn heard_prefix(token: &str) -> &str {
    token.split(MARKER).next().unwrap_or_default()
}

/// Recognizes one token: access on its heard prefix, select on the whole
/// token, integrate with the expected categories, apply the threshold.
pub fn recognize_token(
    lex: &Lexicon,
    token: &str,
    expected: Option<&BTreeSet<Category>>,
    threshold: Threshold,
) -> Option<Recognized> {
    let cohort = cohort_indices(lex, heard_prefix(token));
    let observed = token.to_lowercase();
    let (distance, best) = cohort
        .iter()
        .filter(|&&k| expected.is_none_or(|e| e.contains(&lex.entries[k].category)))
        .map(|&k| (strsim::levenshtein(&observed, &lex.keys[k]), k))
        .min_by(|a, b| {
            a.0.cmp(&b.0)
                .then_with(|| rank_order(&lex.entries[a.1], &lex.entries[b.1]))
        })?;
    let entry = &lex.entries[best];
    threshold
        .accepts(&entry.form, distance)
        .then(|| Recognized {
            token: token.to_string(),
            entry: entry.clone(),
            distance,
            cohort: cohort.len(),
        })
}

/// Recognizes every token. If any slot fails the error carries everything
/// that was recognized.
pub fn recognize(
    lex: &Lexicon,
    tokens: &[&str],
    expected: Option<&[BTreeSet<Category>]>,
    threshold: Threshold,
) -> Result<Vec<Recognized>, RecognizeError> {
    if tokens.is_empty() {
        return Err(RecognizeError::Empty);
    }
    if let Some(e) = expected {
        if e.len() != tokens.len() {
            return Err(RecognizeError::SlotMismatch {
                given: e.len(),
                tokens: tokens.len(),
            });
        }
    }
    let results: Vec<Option<Recognized>> = tokens
        .iter()
        .enumerate()
        .map(|(slot, t)| recognize_token(lex, t, expected.map(|e| &e[slot]), threshold))
        .collect();
    match results.iter().position(Option::is_none) {
        Some(slot) => Err(RecognizeError::NoCandidate {
            slot,
            partial: results,
        }),
        None => Ok(results.into_iter().map(|r| r.expect("checked")).collect()),
    }
}
