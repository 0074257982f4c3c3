//! The F-representation: external referents, lexical referents, formal
//! declarants, formal string and force.
//!
//! Values are only obtainable through [`build_frep`] (or the JSON loader,
//! which calls it), so every `FRepresentation` in circulation satisfies its
//! invariants.

mod canon;
mod scope;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::category::Category;
use crate::formal_lang::{
    parse_formula, symbols, well_formed, Calculus, Diagnostic, Formula, SyntaxError,
};

pub use canon::{canonicalize, canonicalize_trailing, parse_trailing, CanonError};
pub use scope::{assemble, binders, scope_readings, Binder, BinderKind, ScopeError};

/// Discourse entity id. Opaque.
pub type EntityId = u64;

/// A word paired with the symbol standing for it in the formal string.
///
/// Quantifier and Wh words are keyed by the binder and sort they lexicalize,
/// e.g. `forall.H` for "everyone" and `wh.H` for "who"; see
/// [`binder_symbol`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LexicalReferent {
    pub symbol: String,
    pub word: String,
    pub category: Category,
}

impl LexicalReferent {
    pub fn new(symbol: &str, word: &str, category: Category) -> Self {
        LexicalReferent {
            symbol: symbol.to_string(),
            word: word.to_string(),
            category,
        }
    }
}

/// Referent symbol for a binder word: `forall.H`, `exists.H`, `wh.H`, or the
/// bare binder name for an unrestricted binder.
pub fn binder_symbol(kind: BinderKind, sort: Option<&str>) -> String {
    let head = match kind {
        BinderKind::Forall => "forall",
        BinderKind::Exists => "exists",
        BinderKind::Wh => "wh",
    };
    match sort {
        Some(s) => format!("{head}.{s}"),
        None => head.to_string(),
    }
}

/// `x ε H`: a variable and its sort predicate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Parameter {
    pub variable: String,
    pub sort: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Locality {
    Local,
    Global,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormalDeclarants {
    pub calculus: Calculus,
    #[serde(default)]
    pub parameters: Vec<Parameter>,
    /// Quantified variables, outermost first.
    #[serde(default)]
    pub scope_order: Option<Vec<String>>,
    /// Stored and reported; does not influence scope resolution.
    #[serde(default)]
    pub locality: BTreeMap<String, Locality>,
}

impl FormalDeclarants {
    pub fn predicate(parameters: &[(&str, &str)]) -> Self {
        FormalDeclarants {
            calculus: Calculus::Predicate,
            parameters: parameters
                .iter()
                .map(|(v, s)| Parameter {
                    variable: v.to_string(),
                    sort: s.to_string(),
                })
                .collect(),
            scope_order: None,
            locality: BTreeMap::new(),
        }
    }

    pub fn with_scope_order(mut self, order: &[&str]) -> Self {
        self.scope_order = Some(order.iter().map(|s| s.to_string()).collect());
        self
    }

    /// The sort declared for `var`, if any.
    pub fn sort_of(&self, var: &str) -> Option<&str> {
        self.parameters
            .iter()
            .find(|p| p.variable == var)
            .map(|p| p.sort.as_str())
    }
}

pub type ExternalReferents = BTreeMap<String, EntityId>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mood {
    Declarative,
    Interrogative,
}

impl std::str::FromStr for Mood {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "declarative" => Ok(Mood::Declarative),
            "interrogative" => Ok(Mood::Interrogative),
            _ => Err(format!("unknown mood `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Force {
    pub mood: Mood,
    #[serde(default)]
    pub emphasis: Option<String>,
}

impl Force {
    pub fn declarative() -> Self {
        Force {
            mood: Mood::Declarative,
            emphasis: None,
        }
    }

    pub fn interrogative() -> Self {
        Force {
            mood: Mood::Interrogative,
            emphasis: None,
        }
    }

    pub fn emphasizing(mut self, target: &str) -> Self {
        self.emphasis = Some(target.to_string());
        self
    }
}

/// Word/entity pairs that realization must neither drop nor duplicate.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BindingConstraints(pub BTreeSet<(String, EntityId)>);

impl BindingConstraints {
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(w, _)| w.as_str())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "error", rename_all = "snake_case")]
pub enum FrepDiagnostic {
    MissingLexicalReferent { symbol: String },
    IllFormedString { diagnostics: Vec<Diagnostic> },
    DanglingExternalReferent { word: String },
    DuplicateSymbol { symbol: String },
    DuplicateWord { word: String },
    EmphasisWithoutReferent { symbol: String },
    ScopeOrderUnknownVariable { name: String },
    ScopeOrderDuplicate { name: String },
}

impl fmt::Display for FrepDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrepDiagnostic::MissingLexicalReferent { symbol } => {
                write!(f, "symbol `{symbol}` has no lexical referent")
            }
            FrepDiagnostic::IllFormedString { diagnostics } => {
                let parts: Vec<String> = diagnostics.iter().map(ToString::to_string).collect();
                write!(f, "formal string is ill formed: {}", parts.join("; "))
            }
            FrepDiagnostic::DanglingExternalReferent { word } => {
                write!(f, "external referent `{word}` is not a lexical word")
            }
            FrepDiagnostic::DuplicateSymbol { symbol } => {
                write!(f, "symbol `{symbol}` names two words")
            }
            FrepDiagnostic::DuplicateWord { word } => write!(f, "word `{word}` has two symbols"),
            FrepDiagnostic::EmphasisWithoutReferent { symbol } => {
                write!(f, "emphasis target `{symbol}` has no lexical referent")
            }
            FrepDiagnostic::ScopeOrderUnknownVariable { name } => {
                write!(f, "scope order names `{name}`, which is not quantified")
            }
            FrepDiagnostic::ScopeOrderDuplicate { name } => {
                write!(f, "scope order lists `{name}` twice")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrepError {
    #[error("invalid F-representation: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<FrepDiagnostic>),
    #[error("formal string: {0}")]
    Syntax(#[from] SyntaxError),
    #[error("unsupported frep_version {0}")]
    Version(u32),
    #[error("malformed F-representation document: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FRepresentation {
    external: ExternalReferents,
    lexical: Vec<LexicalReferent>,
    declarants: FormalDeclarants,
    string: Formula,
    force: Force,
}

/// Validates the five qualities and assembles them. On failure every
/// violated invariant is reported.
pub fn build_frep(
    external: ExternalReferents,
    lexical: Vec<LexicalReferent>,
    declarants: FormalDeclarants,
    string: Formula,
    force: Force,
) -> Result<FRepresentation, FrepError> {
    let mut diags = Vec::new();

    let mut seen_symbols = BTreeSet::new();
    let mut seen_words = BTreeSet::new();
    for r in &lexical {
        if !seen_symbols.insert(r.symbol.as_str()) {
            diags.push(FrepDiagnostic::DuplicateSymbol {
                symbol: r.symbol.clone(),
            });
        }
        if !seen_words.insert(r.word.as_str()) {
            diags.push(FrepDiagnostic::DuplicateWord {
                word: r.word.clone(),
            });
        }
    }

    for symbol in symbols(&string) {
        if !seen_symbols.contains(symbol.as_str()) {
            diags.push(FrepDiagnostic::MissingLexicalReferent { symbol });
        }
    }

    let wf = well_formed(&string, &declarants, seen_symbols.iter().copied());
    let wf: Vec<Diagnostic> = wf
        .diagnostics
        .into_iter()
        .filter(|d| !matches!(d, Diagnostic::UndeclaredSymbol { .. }))
        .collect();
    if !wf.is_empty() {
        diags.push(FrepDiagnostic::IllFormedString { diagnostics: wf });
    }

    for word in external.keys() {
        if !seen_words.contains(word.as_str()) {
            diags.push(FrepDiagnostic::DanglingExternalReferent { word: word.clone() });
        }
    }

    if let Some(target) = &force.emphasis {
        if !seen_symbols.contains(target.as_str()) {
            diags.push(FrepDiagnostic::EmphasisWithoutReferent {
                symbol: target.clone(),
            });
        }
    }

    if let Some(order) = &declarants.scope_order {
        let quantified: BTreeSet<String> = all_bound_vars(&string);
        let mut listed = BTreeSet::new();
        for name in order {
            if !quantified.contains(name) {
                diags.push(FrepDiagnostic::ScopeOrderUnknownVariable { name: name.clone() });
            } else if !listed.insert(name) {
                diags.push(FrepDiagnostic::ScopeOrderDuplicate { name: name.clone() });
            }
        }
    }

    if !diags.is_empty() {
        return Err(FrepError::Invalid(diags));
    }
    Ok(FRepresentation {
        external,
        lexical,
        declarants,
        string,
        force,
    })
}

fn all_bound_vars(f: &Formula) -> BTreeSet<String> {
    fn go(f: &Formula, out: &mut BTreeSet<String>) {
        match f {
            Formula::Atom { .. } | Formula::Membership { .. } | Formula::ProbAssertion { .. } => {}
            Formula::Not { operand } => go(operand, out),
            Formula::Binary { left, right, .. } => {
                go(left, out);
                go(right, out);
            }
            Formula::Forall { var, body } | Formula::Exists { var, body } => {
                out.insert(var.clone());
                go(body, out);
            }
            Formula::WhQuery {
                var,
                restrictor,
                body,
            } => {
                out.insert(var.clone());
                go(restrictor, out);
                go(body, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    go(f, &mut out);
    out
}

impl FRepresentation {
    pub fn external(&self) -> &ExternalReferents {
        &self.external
    }

    pub fn lexical(&self) -> &[LexicalReferent] {
        &self.lexical
    }

    pub fn declarants(&self) -> &FormalDeclarants {
        &self.declarants
    }

    pub fn string(&self) -> &Formula {
        &self.string
    }

    pub fn force(&self) -> &Force {
        &self.force
    }

    pub fn referent_for_symbol(&self, symbol: &str) -> Option<&LexicalReferent> {
        self.lexical.iter().find(|r| r.symbol == symbol)
    }

    /// Case-insensitive lookup by surface word.
    pub fn referent_for_word(&self, word: &str) -> Option<&LexicalReferent> {
        self.lexical
            .iter()
            .find(|r| r.word.eq_ignore_ascii_case(word))
    }

    /// Rebuilds with another force, re-running validation.
    pub fn with_force(&self, force: Force) -> Result<FRepresentation, FrepError> {
        build_frep(
            self.external.clone(),
            self.lexical.clone(),
            self.declarants.clone(),
            self.string.clone(),
            force,
        )
    }

    /// Rebuilds with another scope order, re-running validation.
    pub fn with_scope_order(
        &self,
        order: Option<Vec<String>>,
    ) -> Result<FRepresentation, FrepError> {
        let mut declarants = self.declarants.clone();
        declarants.scope_order = order;
        build_frep(
            self.external.clone(),
            self.lexical.clone(),
            declarants,
            self.string.clone(),
            self.force.clone(),
        )
    }

    pub fn from_json(text: &str) -> Result<Self, FrepError> {
        let doc: FrepDocument =
            serde_json::from_str(text).map_err(|e| FrepError::Json(e.to_string()))?;
        doc.into_frep()
    }

    pub fn to_document(&self) -> FrepDocument {
        FrepDocument {
            frep_version: FREP_VERSION,
            external: self.external.clone(),
            lexical: self.lexical.clone(),
            declarants: self.declarants.clone(),
            string: self.string.to_string(),
            force: self.force.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("document serializes")
    }
}

pub const FREP_VERSION: u32 = 1;

/// On-disk form of an F-representation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrepDocument {
    pub frep_version: u32,
    #[serde(default)]
    pub external: ExternalReferents,
    pub lexical: Vec<LexicalReferent>,
    pub declarants: FormalDeclarants,
    pub string: String,
    pub force: Force,
}

impl FrepDocument {
    pub fn into_frep(self) -> Result<FRepresentation, FrepError> {
        if self.frep_version != FREP_VERSION {
            return Err(FrepError::Version(self.frep_version));
        }
        let string = parse_formula(&self.string)?;
        build_frep(
            self.external,
            self.lexical,
            self.declarants,
            string,
            self.force,
        )
    }
}

/// One formula per admissible quantifier ordering; exactly one when the
/// declarants fix the order.
pub fn resolve_scope(f: &FRepresentation) -> Result<Vec<Formula>, ScopeError> {
    scope_readings(f.string(), f.declarants().scope_order.as_deref())
}

/// Projects the external referents onto binding constraints.
pub fn binding_referents(f: &FRepresentation) -> BindingConstraints {
    BindingConstraints(f.external.iter().map(|(w, e)| (w.clone(), *e)).collect())
}

/// The order of binders in a formula string, used by callers that need the
/// variable sequence of a reading.
pub fn binder_vars(f: &Formula) -> Vec<String> {
    binders(f).0.into_iter().map(|b| b.var).collect()
}
