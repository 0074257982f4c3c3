//! The formal language carried by a formal string: first-order predicate
//! calculus with restricted membership atoms, a Wh binder, the two single
//! connective bases, and an exact probability assertion.
//!
//! Concrete syntax (one formula per string):
//!
//! ```text
//! forall x. BODY      exists x. BODY      wh x. (RESTRICTOR, BODY)
//! (A -> B)  (A & B)  (A v B)  (A |/ B)  (A !v B)   !A
//! x in H    J S x    p        prob(snow) = 4/5
//! ```
//!
//! Every binary connective is parenthesized, so a quantifier body extends
//! over exactly one unary-level formula.

mod eval;
mod parse;
mod render;
mod rewrite;

use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use eval::{evaluate, Assignment, EvalError, Model, ModelError};
pub use parse::{parse_formula, SyntaxError};
pub use render::render_formula;
pub use rewrite::{
    free_vars, quantifier_depth, symbols, to_sheffer, well_formed, Diagnostic, RewriteError,
    ShefferRewriter, WellFormedness,
};

/// Identifiers reserved by the concrete syntax.
pub const KEYWORDS: &[&str] = &["forall", "exists", "wh", "in", "v", "prob"];

/// Letters and digits, starting with a letter, not a keyword.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric())
        && !KEYWORDS.contains(&name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermKind {
    Constant,
    Variable,
}

/// A constant or variable occurring in a membership atom.
///
/// The kind follows the case of the first letter: `x`, `y` are variables,
/// `J` is a constant. The parser relies on this to recover the kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawTerm", into = "RawTerm")]
pub struct Term {
    kind: TermKind,
    name: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("`{0}` is not an identifier")]
    NotAnIdentifier(String),
    #[error("variable names start with a lowercase letter, got `{0}`")]
    BadVariable(String),
    #[error("constant names start with an uppercase letter, got `{0}`")]
    BadConstant(String),
}

impl Term {
    pub fn new(kind: TermKind, name: impl Into<String>) -> Result<Self, TermError> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(TermError::NotAnIdentifier(name));
        }
        let first = name.chars().next().unwrap_or_default();
        match kind {
            TermKind::Variable if !first.is_ascii_lowercase() => Err(TermError::BadVariable(name)),
            TermKind::Constant if !first.is_ascii_uppercase() => Err(TermError::BadConstant(name)),
            _ => Ok(Term { kind, name }),
        }
    }

    /// Picks the kind from the identifier's case.
    pub fn from_name(name: impl Into<String>) -> Result<Self, TermError> {
        let name = name.into();
        let kind = if name.starts_with(|c: char| c.is_ascii_uppercase()) {
            TermKind::Constant
        } else {
            TermKind::Variable
        };
        Term::new(kind, name)
    }

    /// Panics on a malformed name; intended for literals.
    pub fn var(name: &str) -> Self {
        Term::new(TermKind::Variable, name).expect("valid variable literal")
    }

    /// Panics on a malformed name; intended for literals.
    pub fn constant(name: &str) -> Self {
        Term::new(TermKind::Constant, name).expect("valid constant literal")
    }

    pub fn kind(&self) -> TermKind {
        self.kind
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_variable(&self) -> bool {
        self.kind == TermKind::Variable
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Serialize, Deserialize)]
struct RawTerm {
    kind: TermKind,
    name: String,
}

impl TryFrom<RawTerm> for Term {
    type Error = TermError;
    fn try_from(raw: RawTerm) -> Result<Self, Self::Error> {
        Term::new(raw.kind, raw.name)
    }
}

impl From<Term> for RawTerm {
    fn from(t: Term) -> Self {
        RawTerm {
            kind: t.kind,
            name: t.name,
        }
    }
}

/// An exact probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Probability(Ratio<u64>);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProbabilityError {
    #[error("denominator must be positive")]
    ZeroDenominator,
    #[error("{0}/{1} lies outside [0,1]")]
    OutOfRange(u64, u64),
    #[error("expected N/D, got `{0}`")]
    Malformed(String),
}

impl Probability {
    pub fn new(numerator: u64, denominator: u64) -> Result<Self, ProbabilityError> {
        if denominator == 0 {
            return Err(ProbabilityError::ZeroDenominator);
        }
        if numerator > denominator {
            return Err(ProbabilityError::OutOfRange(numerator, denominator));
        }
        Ok(Probability(Ratio::new(numerator, denominator)))
    }

    /// Numerator in lowest terms.
    pub fn numerator(&self) -> u64 {
        *self.0.numer()
    }

    /// Denominator in lowest terms.
    pub fn denominator(&self) -> u64 {
        *self.0.denom()
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator(), self.denominator())
    }
}

impl std::str::FromStr for Probability {
    type Err = ProbabilityError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || ProbabilityError::Malformed(s.to_string());
        let (n, d) = s.split_once('/').ok_or_else(malformed)?;
        let n = n.trim().parse().map_err(|_| malformed())?;
        let d = d.trim().parse().map_err(|_| malformed())?;
        Probability::new(n, d)
    }
}

impl TryFrom<String> for Probability {
    type Error = ProbabilityError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Probability> for String {
    fn from(p: Probability) -> Self {
        p.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Connective {
    And,
    Or,
    Implies,
    /// NAND.
    Sheffer,
    /// NOR.
    Pierce,
}

impl Connective {
    pub const ALL: [Connective; 5] = [
        Connective::And,
        Connective::Or,
        Connective::Implies,
        Connective::Sheffer,
        Connective::Pierce,
    ];

    pub fn glyph(self) -> &'static str {
        match self {
            Connective::And => "&",
            Connective::Or => "v",
            Connective::Implies => "->",
            Connective::Sheffer => "|/",
            Connective::Pierce => "!v",
        }
    }

    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            Connective::And => a && b,
            Connective::Or => a || b,
            Connective::Implies => !a || b,
            Connective::Sheffer => !(a && b),
            Connective::Pierce => !(a || b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantifier {
    Forall,
    Exists,
}

/// A formula of the formal language. Subformulas are shared through `Arc`,
/// so cloning is cheap and values can cross threads.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Formula {
    /// A proposition letter.
    Atom {
        symbol: String,
    },
    /// `x in H` when `object` is absent, `J S x` when present.
    Membership {
        subject: Term,
        predicate: String,
        object: Option<Term>,
    },
    Not {
        operand: Arc<Formula>,
    },
    Binary {
        connective: Connective,
        left: Arc<Formula>,
        right: Arc<Formula>,
    },
    Forall {
        var: String,
        body: Arc<Formula>,
    },
    Exists {
        var: String,
        body: Arc<Formula>,
    },
    WhQuery {
        var: String,
        restrictor: Arc<Formula>,
        body: Arc<Formula>,
    },
    ProbAssertion {
        event: String,
        p: Probability,
    },
}

impl Formula {
    pub fn atom(symbol: &str) -> Self {
        Formula::Atom {
            symbol: symbol.to_string(),
        }
    }

    /// `subject in predicate`
    pub fn member(subject: Term, predicate: &str) -> Self {
        Formula::Membership {
            subject,
            predicate: predicate.to_string(),
            object: None,
        }
    }

    /// `subject relation object`
    pub fn relation(subject: Term, relation: &str, object: Term) -> Self {
        Formula::Membership {
            subject,
            predicate: relation.to_string(),
            object: Some(object),
        }
    }

    pub fn not(f: impl Into<Arc<Formula>>) -> Self {
        Formula::Not { operand: f.into() }
    }

    pub fn binary(
        connective: Connective,
        left: impl Into<Arc<Formula>>,
        right: impl Into<Arc<Formula>>,
    ) -> Self {
        Formula::Binary {
            connective,
            left: left.into(),
            right: right.into(),
        }
    }

    pub fn and(l: impl Into<Arc<Formula>>, r: impl Into<Arc<Formula>>) -> Self {
        Formula::binary(Connective::And, l, r)
    }

    pub fn or(l: impl Into<Arc<Formula>>, r: impl Into<Arc<Formula>>) -> Self {
        Formula::binary(Connective::Or, l, r)
    }

    pub fn implies(l: impl Into<Arc<Formula>>, r: impl Into<Arc<Formula>>) -> Self {
        Formula::binary(Connective::Implies, l, r)
    }

    pub fn sheffer(l: impl Into<Arc<Formula>>, r: impl Into<Arc<Formula>>) -> Self {
        Formula::binary(Connective::Sheffer, l, r)
    }

    pub fn pierce(l: impl Into<Arc<Formula>>, r: impl Into<Arc<Formula>>) -> Self {
        Formula::binary(Connective::Pierce, l, r)
    }

    pub fn forall(var: &str, body: impl Into<Arc<Formula>>) -> Self {
        Formula::Forall {
            var: var.to_string(),
            body: body.into(),
        }
    }

    pub fn exists(var: &str, body: impl Into<Arc<Formula>>) -> Self {
        Formula::Exists {
            var: var.to_string(),
            body: body.into(),
        }
    }

    pub fn quantified(q: Quantifier, var: &str, body: impl Into<Arc<Formula>>) -> Self {
        match q {
            Quantifier::Forall => Formula::forall(var, body),
            Quantifier::Exists => Formula::exists(var, body),
        }
    }

    pub fn wh(
        var: &str,
        restrictor: impl Into<Arc<Formula>>,
        body: impl Into<Arc<Formula>>,
    ) -> Self {
        Formula::WhQuery {
            var: var.to_string(),
            restrictor: restrictor.into(),
            body: body.into(),
        }
    }

    pub fn prob(event: &str, p: Probability) -> Self {
        Formula::ProbAssertion {
            event: event.to_string(),
            p,
        }
    }

    /// The quantifier and variable when this node is `Forall`/`Exists`.
    pub fn as_quantifier(&self) -> Option<(Quantifier, &str, &Arc<Formula>)> {
        match self {
            Formula::Forall { var, body } => Some((Quantifier::Forall, var, body)),
            Formula::Exists { var, body } => Some((Quantifier::Exists, var, body)),
            _ => None,
        }
    }

    /// Node name used in diagnostics.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Formula::Atom { .. } => "Atom",
            Formula::Membership { .. } => "Membership",
            Formula::Not { .. } => "Not",
            Formula::Binary { connective, .. } => match connective {
                Connective::And => "And",
                Connective::Or => "Or",
                Connective::Implies => "Implies",
                Connective::Sheffer => "Sheffer",
                Connective::Pierce => "Pierce",
            },
            Formula::Forall { .. } => "Forall",
            Formula::Exists { .. } => "Exists",
            Formula::WhQuery { .. } => "WhQuery",
            Formula::ProbAssertion { .. } => "ProbAssertion",
        }
    }

    /// JSON export as a tagged tree.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("formula serializes")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_formula(self))
    }
}

impl std::str::FromStr for Formula {
    type Err = SyntaxError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

/// Which formal calculus a formal string is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Calculus {
    Predicate,
    Probability,
}

impl Calculus {
    pub fn permits_probability(self) -> bool {
        self == Calculus::Probability
    }
}
