//! End-to-end derivations.
//!
//! The T-model runs D-structure, S-structure, LF. The P-model starts from an
//! F-representation, builds D-structure from it and realizes S-structure
//! under the representation's force.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::formal_lang::{Formula, Term};
use crate::frep::{
    assemble, binder_symbol, binders, binding_referents, canonicalize, resolve_scope, Binder,
    BinderKind, BindingConstraints, FRepresentation, Force, ScopeError,
};
use crate::movement::{
    apply_emphasis, normalize_case, quantifier_lower, quantifier_raise, wh_lower, wh_raise, Moved,
    MovementConfig, MovementError, MovementRecord,
};
use crate::syntax_rep::{
    strip, write_dot_body, Item, Label, Level, Punctuation, SString, TraceKind,
};
use crate::Category;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DerivationModel {
    T,
    P,
}

impl DerivationModel {
    /// Levels a derivation under this model passes through, in order.
    pub fn levels(self) -> &'static [Level] {
        match self {
            DerivationModel::T => &[Level::DS, Level::SS, Level::LF],
            DerivationModel::P => &[Level::DS, Level::SS],
        }
    }
}

impl fmt::Display for DerivationModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DerivationModel::T => "T",
            DerivationModel::P => "P",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub string: SString,
    /// Movement that produced this step; empty for a step reached without
    /// movement.
    pub records: Vec<MovementRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "warning", rename_all = "snake_case")]
pub enum Warning {
    AmbiguousScope { readings: usize },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::AmbiguousScope { readings } => write!(
                f,
                "scope is ambiguous ({readings} readings); the first was used"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    pub model: DerivationModel,
    /// Source representation of a P-model derivation.
    pub frep: Option<FRepresentation>,
    /// The scope reading a P-model derivation lexicalized.
    pub reading: Option<Formula>,
    pub steps: Vec<Step>,
    pub warnings: Vec<Warning>,
}

impl Derivation {
    /// True when the step levels are exactly those of the model.
    pub fn levels_match(&self) -> bool {
        let levels: Vec<Level> = self.steps.iter().map(|s| s.string.level()).collect();
        levels == self.model.levels()
    }

    pub fn step(&self, level: Level) -> Option<&Step> {
        self.steps.iter().find(|s| s.string.level() == level)
    }

    pub fn last(&self) -> &SString {
        &self
            .steps
            .last()
            .expect("derivations are never empty")
            .string
    }

    pub fn to_json(&self) -> serde_json::Value {
        let steps: Vec<_> = self
            .steps
            .iter()
            .map(|s| {
                json!({
                    "level": s.string.level(),
                    "rendered": s.string.render(),
                    "stripped": strip(&s.string),
                    "records": s.records,
                })
            })
            .collect();
        let mut out = json!({
            "model": self.model,
            "steps": steps,
            "warnings": self.warnings,
        });
        if let Some(f) = &self.frep {
            out["frep"] = serde_json::to_value(f.to_document()).expect("document serializes");
        }
        if let Some(r) = &self.reading {
            out["reading"] = json!(r.to_string());
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("model {}\n", self.model);
        if let Some(r) = &self.reading {
            out.push_str(&format!("reading {r}\n"));
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        for s in &self.steps {
            out.push_str(&format!("{}  {}\n", s.string.level(), s.string.render()));
            for r in &s.records {
                out.push_str(&format!("    {r}\n"));
            }
        }
        out.push_str(&format!("=> {}\n", strip(self.last())));
        out
    }

    /// One cluster per step.
    pub fn to_dot(&self) -> String {
        let mut out = format!("digraph derivation_{} {{\n  rankdir=LR;\n", self.model);
        for (k, s) in self.steps.iter().enumerate() {
            out.push_str(&format!(
                "  subgraph cluster_{k} {{\n  label=\"{}\";\n",
                s.string.level()
            ));
            write_dot_body(&s.string, &format!("s{k}_"), &mut out);
            out.push_str("  }\n");
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error("no lexicalization rule for {0}")]
    UnlexicalizableNode(String),
    #[error("symbol `{0}` has no lexical referent")]
    MissingReferent(String),
    #[error("word `{0}` has no lexical referent")]
    UnknownWord(String),
    #[error("LF string has no recoverable formula: {0}")]
    Unrecoverable(String),
    #[error(transparent)]
    Scope(#[from] ScopeError),
    #[error(transparent)]
    Movement(#[from] MovementError),
}

/// Movement configuration extended with the quantifier, Wh and auxiliary
/// words of an F-representation.
pub fn movement_config(f: &FRepresentation) -> MovementConfig {
    let mut cfg = MovementConfig::default();
    for r in f.lexical() {
        cfg = match r.category {
            Category::Q => cfg.with_quantifier(&r.word),
            Category::WH => cfg.with_wh(&r.word),
            Category::AUX => cfg.with_auxiliary(&r.word),
            _ => cfg,
        };
    }
    cfg
}

fn word_for(f: &FRepresentation, symbol: &str) -> Result<String, PipelineError> {
    f.referent_for_symbol(symbol)
        .map(|r| r.word.clone())
        .ok_or_else(|| PipelineError::MissingReferent(symbol.to_string()))
}

fn term_item(
    f: &FRepresentation,
    t: &Term,
    index_of: &BTreeMap<&str, u32>,
) -> Result<Item, PipelineError> {
    if t.is_variable() {
        index_of
            .get(t.name())
            .map(|&i| Item::trace(TraceKind::X, i))
            .ok_or_else(|| {
                PipelineError::UnlexicalizableNode(format!("free variable {}", t.name()))
            })
    } else {
        Ok(Item::word(&word_for(f, t.name())?))
    }
}

fn bracket(items: Vec<Item>, label: Option<Label>) -> Vec<Item> {
    let mut out = vec![Item::open(label)];
    out.extend(items);
    out.push(Item::Close);
    out
}

/// Builds the LF string of a reading: binder words fronted with indices
/// 1, 2, … outermost first, the matrix in subject-verb-object order with x
/// traces for bound variables.
pub fn lexicalize_lf(f: &FRepresentation, reading: &Formula) -> Result<SString, PipelineError> {
    let (chain, matrix) = binders(reading);
    let index_of: BTreeMap<&str, u32> = chain
        .iter()
        .enumerate()
        .map(|(k, b)| (b.var.as_str(), k as u32 + 1))
        .collect();
    let (subject, predicate, object) = match &*matrix {
        Formula::Membership {
            subject,
            predicate,
            object,
        } => (subject, predicate, object),
        other => return Err(PipelineError::UnlexicalizableNode(other.kind_name().into())),
    };
    let mut words = vec![
        term_item(f, subject, &index_of)?,
        Item::word(&word_for(f, predicate)?),
    ];
    if let Some(o) = object {
        words.push(term_item(f, o, &index_of)?);
    }
    for b in &chain {
        let uses = words
            .iter()
            .filter(|i| i.index() == Some(index_of[b.var.as_str()]))
            .count();
        if uses != 1 {
            return Err(PipelineError::UnlexicalizableNode(format!(
                "binder over {} used {uses} times",
                b.var
            )));
        }
    }

    let wh = chain.iter().filter(|b| b.kind == BinderKind::Wh).count();
    if wh > 0 {
        if chain.len() > 1 {
            return Err(PipelineError::UnlexicalizableNode(
                "Wh binder combined with other binders".into(),
            ));
        }
        let b = &chain[0];
        let who = word_for(f, &binder_symbol(b.kind, b.sort()))?;
        let mut cp = vec![Item::indexed(&who, 1)];
        let subject_question = words[0].is_trace();
        if !subject_question {
            if let Some(aux) = f.lexical().iter().find(|r| r.category == Category::AUX) {
                cp.push(Item::word(&aux.word));
            }
        }
        cp.extend(bracket(words, Some(Label::IP)));
        let mut items = bracket(cp, Some(Label::CP));
        normalize_case(&mut items, &movement_config(f));
        return Ok(SString::new(Level::LF, items, Punctuation::Question)
            .expect("lexicalized strings are well formed"));
    }

    let mut body = bracket(words, None);
    for (k, b) in chain.iter().enumerate().rev() {
        let word = word_for(f, &binder_symbol(b.kind, b.sort()))?;
        let mut next = vec![Item::indexed(&word, k as u32 + 1)];
        next.extend(body);
        body = bracket(next, None);
    }
    if chain.is_empty() {
        body = body[1..body.len() - 1].to_vec();
    }
    normalize_case(&mut body, &movement_config(f));
    Ok(SString::new(Level::LF, body, Punctuation::None)
        .expect("lexicalized strings are well formed"))
}

/// Lexicalizes a reading and lowers it to D-structure, keeping the lowering
/// records.
pub fn generate_ds_moved(f: &FRepresentation, reading: &Formula) -> Result<Moved, PipelineError> {
    let cfg = movement_config(f);
    let lf = lexicalize_lf(f, reading)?;
    if lf.coindex().is_empty() {
        return Ok(Moved {
            string: lf.without_brackets().with_level(Level::DS),
            records: Vec::new(),
        });
    }
    let moved = if lf.is_question() {
        wh_lower(&lf, &cfg)?
    } else {
        quantifier_lower(&lf, &cfg)?
    };
    Ok(moved)
}

/// D-structure of a reading of `f`.
pub fn generate_ds(f: &FRepresentation, reading: &Formula) -> Result<SString, PipelineError> {
    Ok(generate_ds_moved(f, reading)?.string)
}

/// The representation's force with the emphasis symbol replaced by its word.
pub fn surface_force(f: &FRepresentation) -> Result<Force, PipelineError> {
    let mut force = f.force().clone();
    if let Some(symbol) = &force.emphasis {
        force.emphasis = Some(word_for(f, symbol)?);
    }
    Ok(force)
}

/// P-model derivation: D-structure from the first scope reading, then
/// S-structure under the representation's force and binding referents.
pub fn derive_p(f: &FRepresentation) -> Result<Derivation, PipelineError> {
    let readings = resolve_scope(f)?;
    let reading = readings
        .first()
        .cloned()
        .ok_or_else(|| PipelineError::Unrecoverable("no admissible reading".into()))?;
    let warnings = if readings.len() > 1 {
        vec![Warning::AmbiguousScope {
            readings: readings.len(),
        }]
    } else {
        Vec::new()
    };
    derive_p_reading(f, &reading, warnings)
}

fn derive_p_reading(
    f: &FRepresentation,
    reading: &Formula,
    warnings: Vec<Warning>,
) -> Result<Derivation, PipelineError> {
    let cfg = movement_config(f);
    let ds = generate_ds_moved(f, reading)?;
    let ss = apply_emphasis(&ds.string, &surface_force(f)?, &binding_referents(f), &cfg)?;
    let d = Derivation {
        model: DerivationModel::P,
        frep: Some(f.clone()),
        reading: Some(reading.clone()),
        steps: vec![
            Step {
                string: ds.string,
                records: ds.records,
            },
            Step {
                string: ss.string,
                records: ss.records,
            },
        ],
        warnings,
    };
    debug_assert!(d.levels_match());
    Ok(d)
}

/// T-model derivation from D-structure. `force.emphasis` names a surface
/// word.
///
/// At LF, t traces become x traces; quantifiers still in situ are raised
/// rightmost first, so the leftmost quantifier takes widest scope.
pub fn derive_t(
    ds: &SString,
    force: &Force,
    cfg: &MovementConfig,
) -> Result<Derivation, PipelineError> {
    let ss = apply_emphasis(ds, force, &BindingConstraints::default(), cfg)?;
    let has_wh = ss
        .string
        .items()
        .iter()
        .any(|i| i.text().is_some_and(|t| cfg.is_wh(t)));
    let mut lf = if has_wh {
        wh_raise(&ss.string, cfg)?
    } else {
        retype_traces(&ss.string)
    };
    loop {
        let next = lf
            .string
            .items()
            .iter()
            .rposition(|i| matches!(i, Item::Word { text } if cfg.is_quantifier(text)));
        let Some(pos) = next else { break };
        let raised = quantifier_raise(&lf.string, pos, cfg)?;
        lf.string = raised.string;
        lf.records.extend(raised.records);
    }
    let d = Derivation {
        model: DerivationModel::T,
        frep: None,
        reading: None,
        steps: vec![
            Step {
                string: ds.clone(),
                records: Vec::new(),
            },
            Step {
                string: ss.string,
                records: ss.records,
            },
            Step {
                string: lf.string,
                records: lf.records,
            },
        ],
        warnings: Vec::new(),
    };
    debug_assert!(d.levels_match());
    Ok(d)
}

fn retype_traces(s: &SString) -> Moved {
    let items = s
        .items()
        .iter()
        .map(|i| match i {
            Item::Trace {
                trace: TraceKind::T,
                index,
            } => Item::trace(TraceKind::X, *index),
            other => other.clone(),
        })
        .collect();
    Moved {
        string: SString::new(Level::LF, items, s.punctuation())
            .expect("retyping keeps coindexation"),
        records: Vec::new(),
    }
}

fn parse_binder_symbol(symbol: &str) -> Option<(BinderKind, Option<&str>)> {
    let (head, sort) = match symbol.split_once('.') {
        Some((h, s)) => (h, Some(s)),
        None => (symbol, None),
    };
    let kind = match head {
        "forall" => BinderKind::Forall,
        "exists" => BinderKind::Exists,
        "wh" => BinderKind::Wh,
        _ => return None,
    };
    Some((kind, sort))
}

/// Inverse lexicalization of an LF string: indexed binder words become
/// binders (outermost first, in order of appearance), the remaining words
/// and traces become the matrix. Variables are named from the declared
/// parameters of the binder's sort, in order of appearance.
pub fn recover_formula(lf: &SString, f: &FRepresentation) -> Result<Formula, PipelineError> {
    let cfg = movement_config(f);
    let mut chain: Vec<Binder> = Vec::new();
    let mut var_of: BTreeMap<u32, String> = BTreeMap::new();
    let mut filler: BTreeMap<u32, String> = BTreeMap::new();
    let mut used: BTreeSet<String> = BTreeSet::new();
    let mut matrix: Vec<Result<Term, u32>> = Vec::new();

    for item in lf.items() {
        match item {
            Item::Open { .. } | Item::Close => {}
            Item::Indexed { text, index } => {
                let r = f
                    .referent_for_word(text)
                    .ok_or_else(|| PipelineError::UnknownWord(text.clone()))?;
                match parse_binder_symbol(&r.symbol) {
                    Some((kind, sort)) => {
                        let var = f
                            .declarants()
                            .parameters
                            .iter()
                            .find(|p| Some(p.sort.as_str()) == sort && !used.contains(&p.variable))
                            .map(|p| p.variable.clone())
                            .unwrap_or_else(|| fresh_var(&used));
                        used.insert(var.clone());
                        let restrictor =
                            sort.map(|s| Arc::new(Formula::member(Term::var(&var), s)));
                        if kind == BinderKind::Wh && restrictor.is_none() {
                            return Err(PipelineError::Unrecoverable(format!(
                                "Wh word `{text}` has no sort"
                            )));
                        }
                        var_of.insert(*index, var.clone());
                        chain.push(Binder {
                            kind,
                            var,
                            restrictor,
                        });
                    }
                    None => {
                        filler.insert(*index, r.symbol.clone());
                    }
                }
            }
            Item::Word { text } => {
                if cfg.is_auxiliary(text) {
                    continue;
                }
                let r = f
                    .referent_for_word(text)
                    .ok_or_else(|| PipelineError::UnknownWord(text.clone()))?;
                matrix.push(Ok(Term::constant(&r.symbol)));
            }
            Item::Trace { index, .. } => {
                matrix.push(Err(*index));
            }
        }
    }
    let terms: Vec<Term> = matrix
        .into_iter()
        .map(|slot| match slot {
            Ok(t) => Ok(t),
            Err(i) => var_of
                .get(&i)
                .map(|v| Term::var(v))
                .or_else(|| filler.get(&i).map(|s| Term::constant(s)))
                .ok_or_else(|| PipelineError::Unrecoverable(format!("trace {i} has no binder"))),
        })
        .collect::<Result<_, _>>()?;
    let body = match terms.as_slice() {
        [s, p] => Formula::member(s.clone(), p.name()),
        [s, r, o] => Formula::relation(s.clone(), r.name(), o.clone()),
        _ => {
            return Err(PipelineError::Unrecoverable(format!(
                "matrix has {} terms",
                terms.len()
            )))
        }
    };
    Ok(assemble(&chain, Arc::new(body)))
}

fn fresh_var(used: &BTreeSet<String>) -> String {
    ["x", "y", "z"]
        .iter()
        .map(|s| s.to_string())
        .chain((1..).map(|n| format!("x{n}")))
        .find(|v| !used.contains(v))
        .expect("infinite supply")
}

/// Outcome of running both models on one representation.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub readings: Vec<Formula>,
    pub p: Option<Derivation>,
    pub t: Option<Derivation>,
    /// Formula read back from the T-model LF.
    pub recovered: Option<Formula>,
    /// Positions in `readings` whose canonical form equals the recovered one.
    pub matching_readings: Vec<usize>,
    /// The reading the P-model used agrees with the recovered formula.
    pub lf_agrees: bool,
    /// D-structure to S-structure records are the same in both models.
    pub records_identical: bool,
    /// The string has a formal meaning but no lexicalization.
    pub formal_only: bool,
    pub failures: Vec<String>,
}

impl CompareReport {
    pub fn consistent(&self) -> bool {
        self.failures.is_empty() && self.lf_agrees && self.records_identical
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, r) in self.readings.iter().enumerate() {
            let mark = if self.matching_readings.contains(&k) {
                "*"
            } else {
                " "
            };
            out.push_str(&format!("{mark} reading {}: {r}\n", k + 1));
        }
        if let Some(r) = &self.recovered {
            out.push_str(&format!("recovered: {r}\n"));
        }
        if self.formal_only {
            out.push_str("formal only: no lexicalization\n");
        }
        out.push_str(&format!("lf agrees: {}\n", self.lf_agrees));
        out.push_str(&format!("records identical: {}\n", self.records_identical));
        for f in &self.failures {
            out.push_str(&format!("failure: {f}\n"));
        }
        out
    }
}

/// Runs the P-model, seeds the T-model with its D-structure and compares
/// the recovered LF formula and the D-to-S movement of the two runs.
pub fn compare(f: &FRepresentation) -> CompareReport {
    let mut report = CompareReport {
        readings: Vec::new(),
        p: None,
        t: None,
        recovered: None,
        matching_readings: Vec::new(),
        lf_agrees: false,
        records_identical: false,
        formal_only: false,
        failures: Vec::new(),
    };
    match resolve_scope(f) {
        Ok(r) => report.readings = r,
        Err(e) => {
            report.failures.push(e.to_string());
            return report;
        }
    }
    let p = match derive_p(f) {
        Ok(p) => p,
        Err(PipelineError::UnlexicalizableNode(kind)) => {
            report.formal_only = true;
            report
                .failures
                .push(format!("P-model: no lexicalization rule for {kind}"));
            return report;
        }
        Err(e) => {
            report.failures.push(format!("P-model: {e}"));
            return report;
        }
    };
    let cfg = movement_config(f);
    let force = match surface_force(f) {
        Ok(force) => force,
        Err(e) => {
            report.failures.push(e.to_string());
            return report;
        }
    };
    let t = match derive_t(&p.steps[0].string, &force, &cfg) {
        Ok(t) => t,
        Err(e) => {
            report.failures.push(format!("T-model: {e}"));
            report.p = Some(p);
            return report;
        }
    };
    report.records_identical = p.steps[1].records == t.steps[1].records;
    match recover_formula(t.last(), f) {
        Ok(recovered) => {
            if let Ok(canon) = canonicalize(&recovered) {
                report.matching_readings = report
                    .readings
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| canonicalize(r).as_ref() == Ok(&canon))
                    .map(|(k, _)| k)
                    .collect();
                let used = p
                    .reading
                    .as_ref()
                    .expect("P-model derivations carry their reading");
                report.lf_agrees = canonicalize(used).as_ref() == Ok(&canon);
            } else {
                report
                    .failures
                    .push("recovered formula is not canonicalizable".into());
            }
            report.recovered = Some(recovered);
        }
        Err(e) => report.failures.push(format!("inverse lexicalization: {e}")),
    }
    report.p = Some(p);
    report.t = Some(t);
    report
}
