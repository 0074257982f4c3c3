use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::{Connective, Formula};
use crate::frep::FormalDeclarants;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("cannot rewrite a {0} node")]
    UnsupportedNode(&'static str),
}

/// Rewrites every connective into the Sheffer stroke. Quantifier structure
/// is untouched. Strokes already present are kept. Leaves of the result are
/// shared with the input.
pub fn to_sheffer(f: &Formula) -> Result<Formula, RewriteError> {
    ShefferRewriter::new().rewrite(f)
}

/// [`to_sheffer`] with a memo over shared subformulas. Formulas built from a
/// common pool of `Arc` subterms rewrite each subterm once.
#[derive(Debug, Default)]
pub struct ShefferRewriter {
    /// Keyed by address; the input is kept alive so the address stays unique.
    memo: HashMap<usize, (Arc<Formula>, Arc<Formula>)>,
}

impl ShefferRewriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of memoized subformulas.
    pub fn len(&self) -> usize {
        self.memo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memo.is_empty()
    }

    pub fn rewrite(&mut self, f: &Formula) -> Result<Formula, RewriteError> {
        Ok(match f {
            Formula::Atom { .. } | Formula::Membership { .. } | Formula::ProbAssertion { .. } => {
                f.clone()
            }
            Formula::Not { operand } => {
                let p = self.shared(operand)?;
                Formula::sheffer(p.clone(), p)
            }
            Formula::Binary {
                connective,
                left,
                right,
            } => {
                let p = self.shared(left)?;
                let q = self.shared(right)?;
                match connective {
                    Connective::Sheffer => Formula::sheffer(p, q),
                    Connective::And => {
                        let pq = Arc::new(Formula::sheffer(p, q));
                        Formula::sheffer(pq.clone(), pq)
                    }
                    Connective::Or => {
                        let np = Formula::sheffer(p.clone(), p);
                        let nq = Formula::sheffer(q.clone(), q);
                        Formula::sheffer(np, nq)
                    }
                    Connective::Implies => Formula::sheffer(p, Formula::sheffer(q.clone(), q)),
                    Connective::Pierce => return Err(RewriteError::UnsupportedNode("Pierce")),
                }
            }
            Formula::Forall { var, body } => Formula::forall(var, self.shared(body)?),
            Formula::Exists { var, body } => Formula::exists(var, self.shared(body)?),
            Formula::WhQuery {
                var,
                restrictor,
                body,
            } => Formula::wh(var, self.shared(restrictor)?, self.shared(body)?),
        })
    }

    fn shared(&mut self, f: &Arc<Formula>) -> Result<Arc<Formula>, RewriteError> {
        if let Formula::Atom { .. } | Formula::Membership { .. } | Formula::ProbAssertion { .. } =
            &**f
        {
            return Ok(f.clone());
        }
        let key = Arc::as_ptr(f) as usize;
        if let Some((_, out)) = self.memo.get(&key) {
            return Ok(out.clone());
        }
        let out = Arc::new(self.rewrite(f)?);
        self.memo.insert(key, (f.clone(), out.clone()));
        Ok(out)
    }
}

/// Variables with at least one free occurrence.
pub fn free_vars(f: &Formula) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_free(f, &mut Vec::new(), &mut out);
    out
}

fn collect_free<'a>(f: &'a Formula, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
    match f {
        Formula::Atom { .. } | Formula::ProbAssertion { .. } => {}
        Formula::Membership {
            subject, object, ..
        } => {
            for t in std::iter::once(subject).chain(object.iter()) {
                if t.is_variable() && !bound.contains(&t.name()) {
                    out.insert(t.name().to_string());
                }
            }
        }
        Formula::Not { operand } => collect_free(operand, bound, out),
        Formula::Binary { left, right, .. } => {
            collect_free(left, bound, out);
            collect_free(right, bound, out);
        }
        Formula::Forall { var, body } | Formula::Exists { var, body } => {
            bound.push(var);
            collect_free(body, bound, out);
            bound.pop();
        }
        Formula::WhQuery {
            var,
            restrictor,
            body,
        } => {
            bound.push(var);
            collect_free(restrictor, bound, out);
            collect_free(body, bound, out);
            bound.pop();
        }
    }
}

/// Non-variable symbols: predicates, relations, constants, proposition
/// letters and probability events.
pub fn symbols(f: &Formula) -> BTreeSet<String> {
    fn go(f: &Formula, out: &mut BTreeSet<String>) {
        match f {
            Formula::Atom { symbol } => {
                out.insert(symbol.clone());
            }
            Formula::ProbAssertion { event, .. } => {
                out.insert(event.clone());
            }
            Formula::Membership {
                subject,
                predicate,
                object,
            } => {
                out.insert(predicate.clone());
                for t in std::iter::once(subject).chain(object.iter()) {
                    if !t.is_variable() {
                        out.insert(t.name().to_string());
                    }
                }
            }
            Formula::Not { operand } => go(operand, out),
            Formula::Binary { left, right, .. } => {
                go(left, out);
                go(right, out);
            }
            Formula::Forall { body, .. } | Formula::Exists { body, .. } => go(body, out),
            Formula::WhQuery {
                restrictor, body, ..
            } => {
                go(restrictor, out);
                go(body, out);
            }
        }
    }
    let mut out = BTreeSet::new();
    go(f, &mut out);
    out
}

/// Maximum nesting of binders on a root-to-leaf path.
pub fn quantifier_depth(f: &Formula) -> usize {
    match f {
        Formula::Atom { .. } | Formula::Membership { .. } | Formula::ProbAssertion { .. } => 0,
        Formula::Not { operand } => quantifier_depth(operand),
        Formula::Binary { left, right, .. } => quantifier_depth(left).max(quantifier_depth(right)),
        Formula::Forall { body, .. } | Formula::Exists { body, .. } => 1 + quantifier_depth(body),
        Formula::WhQuery {
            restrictor, body, ..
        } => 1 + quantifier_depth(restrictor).max(quantifier_depth(body)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "diagnostic", rename_all = "snake_case")]
pub enum Diagnostic {
    /// A binder reuses a variable already bound on the same path.
    Shadowing { var: String },
    /// A free variable without a parameter declaration.
    UndeclaredVariable { var: String },
    /// A symbol with neither a sort declaration nor a lexical referent.
    UndeclaredSymbol { symbol: String },
    /// A probability assertion under a calculus that does not allow it.
    CalculusMismatch,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Diagnostic::Shadowing { var } => write!(f, "variable `{var}` is bound twice"),
            Diagnostic::UndeclaredVariable { var } => {
                write!(f, "free variable `{var}` is not a declared parameter")
            }
            Diagnostic::UndeclaredSymbol { symbol } => {
                write!(f, "symbol `{symbol}` is not declared")
            }
            Diagnostic::CalculusMismatch => {
                f.write_str("probability assertion outside the probability calculus")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct WellFormedness {
    pub diagnostics: Vec<Diagnostic>,
}

impl WellFormedness {
    pub fn is_ok(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

/// Checks a formal string against its declarants. `lexical_symbols` are the
/// symbols carried by lexical referents.
pub fn well_formed<'s>(
    f: &Formula,
    d: &'s FormalDeclarants,
    lexical_symbols: impl IntoIterator<Item = &'s str>,
) -> WellFormedness {
    let mut diagnostics = BTreeSet::new();
    check_shadowing(f, &mut Vec::new(), &mut diagnostics);

    let params: BTreeSet<&str> = d.parameters.iter().map(|p| p.variable.as_str()).collect();
    for var in free_vars(f) {
        if !params.contains(var.as_str()) {
            diagnostics.insert(Diagnostic::UndeclaredVariable { var });
        }
    }

    let mut known: BTreeSet<&str> = d.parameters.iter().map(|p| p.sort.as_str()).collect();
    known.extend(lexical_symbols);
    for symbol in symbols(f) {
        if !known.contains(symbol.as_str()) {
            diagnostics.insert(Diagnostic::UndeclaredSymbol { symbol });
        }
    }

    if !d.calculus.permits_probability() && contains_probability(f) {
        diagnostics.insert(Diagnostic::CalculusMismatch);
    }
    WellFormedness {
        diagnostics: diagnostics.into_iter().collect(),
    }
}

fn check_shadowing<'a>(f: &'a Formula, bound: &mut Vec<&'a str>, out: &mut BTreeSet<Diagnostic>) {
    match f {
        Formula::Atom { .. } | Formula::Membership { .. } | Formula::ProbAssertion { .. } => {}
        Formula::Not { operand } => check_shadowing(operand, bound, out),
        Formula::Binary { left, right, .. } => {
            check_shadowing(left, bound, out);
            check_shadowing(right, bound, out);
        }
        Formula::Forall { var, body } | Formula::Exists { var, body } => {
            if bound.contains(&var.as_str()) {
                out.insert(Diagnostic::Shadowing { var: var.clone() });
            }
            bound.push(var);
            check_shadowing(body, bound, out);
            bound.pop();
        }
        Formula::WhQuery {
            var,
            restrictor,
            body,
        } => {
            if bound.contains(&var.as_str()) {
                out.insert(Diagnostic::Shadowing { var: var.clone() });
            }
            bound.push(var);
            check_shadowing(restrictor, bound, out);
            check_shadowing(body, bound, out);
            bound.pop();
        }
    }
}

fn contains_probability(f: &Formula) -> bool {
    match f {
        Formula::ProbAssertion { .. } => true,
        Formula::Atom { .. } | Formula::Membership { .. } => false,
        Formula::Not { operand } => contains_probability(operand),
        Formula::Binary { left, right, .. } => {
            contains_probability(left) || contains_probability(right)
        }
        Formula::Forall { body, .. } | Formula::Exists { body, .. } => contains_probability(body),
        Formula::WhQuery {
            restrictor, body, ..
        } => contains_probability(restrictor) || contains_probability(body),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal_lang::{parse_formula, Calculus, Term};
    use crate::frep::Parameter;

    fn p() -> Formula {
        Formula::atom("p")
    }

    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn definitional_rewrites() {
        assert_eq!(
            to_sheffer(&Formula::not(p())).unwrap(),
            Formula::sheffer(p(), p())
        );
        let pq = Formula::sheffer(p(), q());
        assert_eq!(
            to_sheffer(&Formula::and(p(), q())).unwrap(),
            Formula::sheffer(pq.clone(), pq)
        );
        assert_eq!(
            to_sheffer(&Formula::implies(p(), q())).unwrap(),
            Formula::sheffer(p(), Formula::sheffer(q(), q()))
        );
    }

    #[test]
    fn pierce_is_rejected() {
        let f = Formula::not(Formula::pierce(p(), q()));
        assert_eq!(to_sheffer(&f), Err(RewriteError::UnsupportedNode("Pierce")));
    }

    #[test]
    fn memo_matches_fresh_rewrites() {
        let shared = Arc::new(Formula::or(p(), Formula::not(q())));
        let f = Formula::and(shared.clone(), Formula::implies(shared.clone(), q()));
        let mut rw = ShefferRewriter::new();
        let warm = rw.rewrite(&f).unwrap();
        assert_eq!(rw.rewrite(&f).unwrap(), warm);
        assert_eq!(to_sheffer(&f).unwrap(), warm);
        assert!(!rw.is_empty());
    }

    #[test]
    fn quantifiers_survive_rewriting() {
        let f = parse_formula("forall x. (x in H -> J S x)").unwrap();
        let g = to_sheffer(&f).unwrap();
        assert_eq!(g.to_string(), "forall x. (x in H |/ (J S x |/ J S x))");
    }

    #[test]
    fn free_variables() {
        let bound = Formula::forall("x", Formula::member(Term::var("x"), "H"));
        assert!(free_vars(&bound).is_empty());
        let open = Formula::member(Term::var("x"), "H");
        assert_eq!(free_vars(&open), BTreeSet::from(["x".to_string()]));
        let mixed = Formula::implies(
            open,
            Formula::forall("y", Formula::member(Term::var("y"), "H")),
        );
        assert_eq!(free_vars(&mixed), BTreeSet::from(["x".to_string()]));
    }

    fn declarants(calculus: Calculus) -> FormalDeclarants {
        FormalDeclarants {
            calculus,
            parameters: vec![Parameter {
                variable: "x".into(),
                sort: "H".into(),
            }],
            scope_order: None,
            locality: Default::default(),
        }
    }

    #[test]
    fn declared_universal_is_well_formed() {
        let f = parse_formula("forall x. (x in H -> J S x)").unwrap();
        let wf = well_formed(&f, &declarants(Calculus::Predicate), ["J", "S", "H"]);
        assert!(wf.is_ok(), "{:?}", wf.diagnostics);
    }

    #[test]
    fn probability_needs_probability_calculus() {
        let f = parse_formula("prob(snow) = 4/5").unwrap();
        let wf = well_formed(&f, &declarants(Calculus::Predicate), ["snow"]);
        assert_eq!(wf.diagnostics, vec![Diagnostic::CalculusMismatch]);
        assert!(well_formed(&f, &declarants(Calculus::Probability), ["snow"]).is_ok());
    }

    #[test]
    fn undeclared_free_variable() {
        let f = parse_formula("y in H").unwrap();
        let wf = well_formed(&f, &declarants(Calculus::Predicate), ["H"]);
        assert_eq!(
            wf.diagnostics,
            vec![Diagnostic::UndeclaredVariable { var: "y".into() }]
        );
    }

    #[test]
    fn shadowing_is_reported() {
        let f = parse_formula("forall x. exists x. x in H").unwrap();
        let wf = well_formed(&f, &declarants(Calculus::Predicate), ["H"]);
        assert_eq!(
            wf.diagnostics,
            vec![Diagnostic::Shadowing { var: "x".into() }]
        );
        let disjoint = parse_formula("(forall x. x in H & forall x. x in H)").unwrap();
        assert!(well_formed(&disjoint, &declarants(Calculus::Predicate), ["H"]).is_ok());
    }
}
