use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::formal_lang::{free_vars, Connective, Formula};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScopeError {
    #[error("scope order names `{0}`, which is not quantified in the clause")]
    ScopeOrderUnknownVariable(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinderKind {
    Forall,
    Exists,
    Wh,
}

/// One binder of a clause-initial binder chain, with its sort restrictor
/// when it has the shape `forall x. (x in H -> ...)`,
/// `exists x. (x in H & ...)` or `wh x. (R, ...)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binder {
    pub kind: BinderKind,
    pub var: String,
    pub restrictor: Option<Arc<Formula>>,
}

impl Binder {
    /// The sort predicate of a `var in SORT` restrictor.
    pub fn sort(&self) -> Option<&str> {
        match self.restrictor.as_deref() {
            Some(Formula::Membership {
                subject,
                predicate,
                object: None,
            }) if subject.name() == self.var => Some(predicate),
            _ => None,
        }
    }

    fn wrap(&self, body: Arc<Formula>) -> Formula {
        match (&self.kind, &self.restrictor) {
            (BinderKind::Forall, Some(r)) => {
                Formula::forall(&self.var, Formula::implies(r.clone(), body))
            }
            (BinderKind::Forall, None) => Formula::forall(&self.var, body),
            (BinderKind::Exists, Some(r)) => {
                Formula::exists(&self.var, Formula::and(r.clone(), body))
            }
            (BinderKind::Exists, None) => Formula::exists(&self.var, body),
            (BinderKind::Wh, r) => {
                let r = r.clone().expect("wh binders always carry a restrictor");
                Formula::wh(&self.var, r, body)
            }
        }
    }
}

fn sort_restrictor(var: &str, f: &Formula) -> bool {
    matches!(f, Formula::Membership { subject, object: None, .. } if subject.name() == var)
}

/// Splits a formula into its leading binder chain and the matrix below it.
pub fn binders(f: &Formula) -> (Vec<Binder>, Arc<Formula>) {
    let mut chain = Vec::new();
    let mut cur = Arc::new(f.clone());
    loop {
        let next = match &*cur {
            Formula::Forall { var, body } => match &**body {
                Formula::Binary {
                    connective: Connective::Implies,
                    left,
                    right,
                } if sort_restrictor(var, left) => {
                    chain.push(Binder {
                        kind: BinderKind::Forall,
                        var: var.clone(),
                        restrictor: Some(left.clone()),
                    });
                    right.clone()
                }
                _ => {
                    chain.push(Binder {
                        kind: BinderKind::Forall,
                        var: var.clone(),
                        restrictor: None,
                    });
                    body.clone()
                }
            },
            Formula::Exists { var, body } => match &**body {
                Formula::Binary {
                    connective: Connective::And,
                    left,
                    right,
                } if sort_restrictor(var, left) => {
                    chain.push(Binder {
                        kind: BinderKind::Exists,
                        var: var.clone(),
                        restrictor: Some(left.clone()),
                    });
                    right.clone()
                }
                _ => {
                    chain.push(Binder {
                        kind: BinderKind::Exists,
                        var: var.clone(),
                        restrictor: None,
                    });
                    body.clone()
                }
            },
            Formula::WhQuery {
                var,
                restrictor,
                body,
            } => {
                chain.push(Binder {
                    kind: BinderKind::Wh,
                    var: var.clone(),
                    restrictor: Some(restrictor.clone()),
                });
                body.clone()
            }
            _ => break,
        };
        cur = next;
    }
    (chain, cur)
}

/// Reassembles a binder chain (outermost first) over a matrix.
pub fn assemble(chain: &[Binder], matrix: Arc<Formula>) -> Formula {
    let mut body = matrix;
    for b in chain.iter().rev() {
        body = Arc::new(b.wrap(body));
    }
    Arc::try_unwrap(body).unwrap_or_else(|a| (*a).clone())
}

/// Every admissible ordering of the clause-initial binder chain.
///
/// The written order comes first, then the remaining orders sorted by their
/// variable sequence. `order` constrains the relative order of the variables
/// it lists (outermost first); listing all of them leaves one reading.
pub fn scope_readings(f: &Formula, order: Option<&[String]>) -> Result<Vec<Formula>, ScopeError> {
    let (chain, matrix) = binders(f);
    let vars: Vec<&str> = chain.iter().map(|b| b.var.as_str()).collect();
    if let Some(order) = order {
        if let Some(unknown) = order.iter().find(|v| !vars.contains(&v.as_str())) {
            return Err(ScopeError::ScopeOrderUnknownVariable(unknown.clone()));
        }
    }

    let mut perms = Vec::new();
    permutations(&mut (0..chain.len()).collect(), 0, &mut perms);
    let identity: Vec<usize> = (0..chain.len()).collect();
    let mut rest: Vec<Vec<usize>> = perms.into_iter().filter(|p| *p != identity).collect();
    rest.sort_by(|a, b| {
        let va: Vec<&str> = a.iter().map(|&i| vars[i]).collect();
        let vb: Vec<&str> = b.iter().map(|&i| vars[i]).collect();
        va.cmp(&vb)
    });

    let mut readings = Vec::new();
    for perm in std::iter::once(identity).chain(rest) {
        let ordered: Vec<Binder> = perm.iter().map(|&i| chain[i].clone()).collect();
        if !admissible(&ordered) || !respects(&ordered, order) {
            continue;
        }
        let reading = assemble(&ordered, matrix.clone());
        if !readings.contains(&reading) {
            readings.push(reading);
        }
    }
    Ok(readings)
}

fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

/// A restrictor may only mention its own variable and those bound outside it.
fn admissible(chain: &[Binder]) -> bool {
    let mut outer: BTreeSet<&str> = BTreeSet::new();
    for b in chain {
        if let Some(r) = &b.restrictor {
            let ok = free_vars(r)
                .iter()
                .all(|v| v == &b.var || outer.contains(v.as_str()));
            if !ok {
                return false;
            }
        }
        outer.insert(&b.var);
    }
    true
}

fn respects(chain: &[Binder], order: Option<&[String]>) -> bool {
    let Some(order) = order else { return true };
    let positions: Vec<usize> = order
        .iter()
        .filter_map(|v| chain.iter().position(|b| &b.var == v))
        .collect();
    positions.windows(2).all(|w| w[0] < w[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal_lang::parse_formula;

    const EVERYONE_SOMEONE: &str = "forall x. (x in H -> exists y. (y in H & x S y))";

    #[test]
    fn two_readings_without_declarant() {
        let f = parse_formula(EVERYONE_SOMEONE).unwrap();
        let r = scope_readings(&f, None).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0], f);
        assert_eq!(
            r[1].to_string(),
            "exists y. (y in H & forall x. (x in H -> x S y))"
        );
    }

    #[test]
    fn declarant_picks_one() {
        let f = parse_formula(EVERYONE_SOMEONE).unwrap();
        let order = vec!["y".to_string(), "x".to_string()];
        let r = scope_readings(&f, Some(&order)).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].to_string().starts_with("exists y."));
        let partial = vec!["x".to_string()];
        assert_eq!(scope_readings(&f, Some(&partial)).unwrap().len(), 2);
    }

    #[test]
    fn single_quantifier_single_reading() {
        let f = parse_formula("forall x. (x in H -> J S x)").unwrap();
        assert_eq!(scope_readings(&f, None).unwrap(), vec![f]);
    }

    #[test]
    fn unknown_variable_in_order() {
        let f = parse_formula("forall x. (x in H -> J S x)").unwrap();
        let order = vec!["z".to_string()];
        assert_eq!(
            scope_readings(&f, Some(&order)),
            Err(ScopeError::ScopeOrderUnknownVariable("z".into()))
        );
    }

    #[test]
    fn dependent_restrictor_limits_orderings() {
        let f =
            parse_formula("forall x. (x in H -> exists y. ((y in H & y S x) & x S y))").unwrap();
        // The restrictor of y is not a plain sort, so y has no restrictor and
        // both orders stay admissible.
        assert_eq!(scope_readings(&f, None).unwrap().len(), 2);
        let chain = vec![
            Binder {
                kind: BinderKind::Exists,
                var: "y".into(),
                restrictor: Some(Arc::new(parse_formula("y S x").unwrap())),
            },
            Binder {
                kind: BinderKind::Forall,
                var: "x".into(),
                restrictor: None,
            },
        ];
        assert!(!admissible(&chain));
    }

    #[test]
    fn three_binders_give_six() {
        let f = parse_formula(
            "forall x. (x in H -> exists y. (y in H & forall z. (z in H -> (x S y & y S z))))",
        )
        .unwrap();
        let r = scope_readings(&f, None).unwrap();
        assert_eq!(r.len(), 6);
        assert_eq!(r[0], f);
    }
}
