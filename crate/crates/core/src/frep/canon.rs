use std::sync::Arc;

use thiserror::Error;

use crate::formal_lang::{parse_formula, Connective, Formula, Quantifier, SyntaxError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CanonError {
    #[error("quantifier over `{0}` cannot move to the front without capture")]
    NotCanonicalizable(String),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

type Prefix = Vec<(Quantifier, String)>;

fn flip(prefix: Prefix) -> Prefix {
    prefix
        .into_iter()
        .map(|(q, v)| {
            let q = match q {
                Quantifier::Forall => Quantifier::Exists,
                Quantifier::Exists => Quantifier::Forall,
            };
            (q, v)
        })
        .collect()
}

/// Every variable name occurring in `f`, bound or free.
fn mentions(f: &Formula, var: &str) -> bool {
    match f {
        Formula::Atom { .. } | Formula::ProbAssertion { .. } => false,
        Formula::Membership {
            subject, object, ..
        } => {
            (subject.is_variable() && subject.name() == var)
                || object
                    .as_ref()
                    .is_some_and(|o| o.is_variable() && o.name() == var)
        }
        Formula::Not { operand } => mentions(operand, var),
        Formula::Binary { left, right, .. } => mentions(left, var) || mentions(right, var),
        Formula::Forall { var: v, body } | Formula::Exists { var: v, body } => {
            v == var || mentions(body, var)
        }
        Formula::WhQuery {
            var: v,
            restrictor,
            body,
        } => v == var || mentions(restrictor, var) || mentions(body, var),
    }
}

fn prenex(f: &Formula) -> Result<(Prefix, Arc<Formula>), CanonError> {
    Ok(match f {
        Formula::Atom { .. } | Formula::Membership { .. } | Formula::ProbAssertion { .. } => {
            (Vec::new(), Arc::new(f.clone()))
        }
        Formula::Forall { var, body } | Formula::Exists { var, body } => {
            let q = if matches!(f, Formula::Forall { .. }) {
                Quantifier::Forall
            } else {
                Quantifier::Exists
            };
            let (mut inner, m) = prenex(body)?;
            inner.insert(0, (q, var.clone()));
            (inner, m)
        }
        Formula::Not { operand } => {
            let (p, m) = prenex(operand)?;
            (flip(p), Arc::new(Formula::not(m)))
        }
        Formula::Binary {
            connective,
            left,
            right,
        } => {
            let (pl, ml) = prenex(left)?;
            let (pr, mr) = prenex(right)?;
            for (_, v) in &pl {
                if mentions(right, v) {
                    return Err(CanonError::NotCanonicalizable(v.clone()));
                }
            }
            for (_, v) in &pr {
                if mentions(left, v) {
                    return Err(CanonError::NotCanonicalizable(v.clone()));
                }
            }
            // Antitone positions swap the quantifier.
            let (pl, pr) = match connective {
                Connective::And | Connective::Or => (pl, pr),
                Connective::Implies => (flip(pl), pr),
                Connective::Sheffer | Connective::Pierce => (flip(pl), flip(pr)),
            };
            let mut prefix = pl;
            prefix.extend(pr);
            (prefix, Arc::new(Formula::binary(*connective, ml, mr)))
        }
        // Wh binders are kept in place; their parts are normalized separately.
        Formula::WhQuery {
            var,
            restrictor,
            body,
        } => (
            Vec::new(),
            Arc::new(Formula::wh(
                var,
                canonicalize(restrictor)?,
                canonicalize(body)?,
            )),
        ),
    })
}

/// Moves every quantifier to the front, outermost first, keeping the
/// written left-to-right order. Truth is preserved on every model with a
/// nonempty domain. Renaming is never attempted: a quantifier whose variable
/// also occurs on the other side of a connective is reported instead.
pub fn canonicalize(f: &Formula) -> Result<Formula, CanonError> {
    let (prefix, matrix) = prenex(f)?;
    let mut out = matrix;
    for (q, v) in prefix.into_iter().rev() {
        out = Arc::new(Formula::quantified(q, &v, out));
    }
    Ok(Arc::try_unwrap(out).unwrap_or_else(|a| (*a).clone()))
}

/// Splits `BODY forall x exists y` into the body and its trailing
/// quantifiers, in written order. A comma may separate body and prefix.
pub fn parse_trailing(text: &str) -> Result<(Formula, Vec<(Quantifier, String)>), CanonError> {
    let mut words: Vec<&str> = text.split_whitespace().collect();
    let mut trailing = Vec::new();
    while words.len() >= 2 {
        let var = words[words.len() - 1].trim_end_matches(',');
        let q = match words[words.len() - 2].trim_start_matches(',') {
            "forall" => Quantifier::Forall,
            "exists" => Quantifier::Exists,
            _ => break,
        };
        trailing.insert(0, (q, var.to_string()));
        words.truncate(words.len() - 2);
    }
    let body = words.join(" ");
    let body = body.trim_end_matches(',').trim();
    Ok((parse_formula(body)?, trailing))
}

/// Canonical form of a string written with trailing quantifiers:
/// `(x in H -> J S x) forall x` becomes `forall x. (x in H -> J S x)`.
pub fn canonicalize_trailing(text: &str) -> Result<Formula, CanonError> {
    let (body, trailing) = parse_trailing(text)?;
    let mut f = Arc::new(body);
    for (q, v) in trailing.into_iter().rev() {
        f = Arc::new(Formula::quantified(q, &v, f));
    }
    canonicalize(&f)
}
