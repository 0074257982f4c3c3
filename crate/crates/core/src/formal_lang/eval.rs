use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Formula, Probability, Term};

/// Variable name to entity id.
pub type Assignment = BTreeMap<String, String>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("symbol `{0}` is not interpreted in the model")]
    UninterpretedSymbol(String),
    #[error("variable `{0}` is unbound")]
    UnboundVariable(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("entity `{entity}` used by `{symbol}` is not in the domain")]
    EntityOutsideDomain { symbol: String, entity: String },
}

/// A finite model: the truth oracle for formal strings.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct Model {
    domain: BTreeSet<String>,
    predicates: BTreeMap<String, BTreeSet<String>>,
    relations: BTreeMap<String, BTreeSet<(String, String)>>,
    constants: BTreeMap<String, String>,
    events: BTreeMap<String, Probability>,
    propositions: BTreeMap<String, bool>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawModel {
    domain: BTreeSet<String>,
    predicates: BTreeMap<String, BTreeSet<String>>,
    relations: BTreeMap<String, BTreeSet<(String, String)>>,
    constants: BTreeMap<String, String>,
    events: BTreeMap<String, Probability>,
    propositions: BTreeMap<String, bool>,
}

impl TryFrom<RawModel> for Model {
    type Error = ModelError;
    fn try_from(raw: RawModel) -> Result<Self, Self::Error> {
        let m = Model {
            domain: raw.domain,
            predicates: raw.predicates,
            relations: raw.relations,
            constants: raw.constants,
            events: raw.events,
            propositions: raw.propositions,
        };
        m.validate()?;
        Ok(m)
    }
}

impl From<Model> for RawModel {
    fn from(m: Model) -> Self {
        RawModel {
            domain: m.domain,
            predicates: m.predicates,
            relations: m.relations,
            constants: m.constants,
            events: m.events,
            propositions: m.propositions,
        }
    }
}

impl Model {
    /// Starts a model over `domain`; chain the `with_*` methods and finish
    /// with [`Model::validate`] or use the value directly in tests.
    pub fn new<I, S>(domain: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Model {
            domain: domain.into_iter().map(Into::into).collect(),
            ..Model::default()
        }
    }

    pub fn with_predicate<I, S>(mut self, symbol: &str, extension: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.predicates.insert(
            symbol.to_string(),
            extension.into_iter().map(Into::into).collect(),
        );
        self
    }

    pub fn with_relation<I, S>(mut self, symbol: &str, pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, S)>,
        S: Into<String>,
    {
        self.relations.insert(
            symbol.to_string(),
            pairs
                .into_iter()
                .map(|(a, b)| (a.into(), b.into()))
                .collect(),
        );
        self
    }

    pub fn with_constant(mut self, symbol: &str, entity: &str) -> Self {
        self.constants
            .insert(symbol.to_string(), entity.to_string());
        self
    }

    pub fn with_event(mut self, event: &str, p: Probability) -> Self {
        self.events.insert(event.to_string(), p);
        self
    }

    pub fn with_proposition(mut self, symbol: &str, value: bool) -> Self {
        self.propositions.insert(symbol.to_string(), value);
        self
    }

    /// Checks that every entity mentioned is in the domain.
    pub fn validate(&self) -> Result<(), ModelError> {
        let check = |symbol: &str, entity: &str| {
            if self.domain.contains(entity) {
                Ok(())
            } else {
                Err(ModelError::EntityOutsideDomain {
                    symbol: symbol.to_string(),
                    entity: entity.to_string(),
                })
            }
        };
        for (sym, ext) in &self.predicates {
            ext.iter().try_for_each(|e| check(sym, e))?;
        }
        for (sym, ext) in &self.relations {
            ext.iter()
                .try_for_each(|(a, b)| check(sym, a).and(check(sym, b)))?;
        }
        for (sym, e) in &self.constants {
            check(sym, e)?;
        }
        Ok(())
    }

    pub fn domain(&self) -> &BTreeSet<String> {
        &self.domain
    }
}

struct Env<'a> {
    model: &'a Model,
    base: &'a Assignment,
    bound: Vec<(&'a str, &'a str)>,
}

impl<'a> Env<'a> {
    fn value(&self, t: &Term) -> Result<&'a str, EvalError> {
        if t.is_variable() {
            if let Some((_, e)) = self.bound.iter().rev().find(|(v, _)| *v == t.name()) {
                return Ok(e);
            }
            self.base
                .get(t.name())
                .map(String::as_str)
                .ok_or_else(|| EvalError::UnboundVariable(t.name().to_string()))
        } else {
            self.model
                .constants
                .get(t.name())
                .map(String::as_str)
                .ok_or_else(|| EvalError::UninterpretedSymbol(t.name().to_string()))
        }
    }

    fn eval(&mut self, f: &'a Formula) -> Result<bool, EvalError> {
        let m = self.model;
        match f {
            Formula::Atom { symbol } => m
                .propositions
                .get(symbol)
                .copied()
                .ok_or_else(|| EvalError::UninterpretedSymbol(symbol.clone())),
            Formula::Membership {
                subject,
                predicate,
                object: None,
            } => {
                let ext = m
                    .predicates
                    .get(predicate)
                    .ok_or_else(|| EvalError::UninterpretedSymbol(predicate.clone()))?;
                Ok(ext.contains(self.value(subject)?))
            }
            Formula::Membership {
                subject,
                predicate,
                object: Some(object),
            } => {
                let ext = m
                    .relations
                    .get(predicate)
                    .ok_or_else(|| EvalError::UninterpretedSymbol(predicate.clone()))?;
                let pair = (
                    self.value(subject)?.to_string(),
                    self.value(object)?.to_string(),
                );
                Ok(ext.contains(&pair))
            }
            Formula::Not { operand } => Ok(!self.eval(operand)?),
            Formula::Binary {
                connective,
                left,
                right,
            } => {
                let a = self.eval(left)?;
                let b = self.eval(right)?;
                Ok(connective.apply(a, b))
            }
            Formula::Forall { var, body } => {
                for e in &m.domain {
                    if !self.with(var, e, |env| env.eval(body))? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Exists { var, body } => {
                for e in &m.domain {
                    if self.with(var, e, |env| env.eval(body))? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            // A Wh question is true when it has at least one answer.
            Formula::WhQuery {
                var,
                restrictor,
                body,
            } => {
                for e in &m.domain {
                    let hit =
                        self.with(var, e, |env| Ok(env.eval(restrictor)? && env.eval(body)?))?;
                    if hit {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::ProbAssertion { event, p } => m
                .events
                .get(event)
                .map(|q| q == p)
                .ok_or_else(|| EvalError::UninterpretedSymbol(event.clone())),
        }
    }

    fn with<T>(
        &mut self,
        var: &'a str,
        entity: &'a str,
        k: impl FnOnce(&mut Self) -> Result<T, EvalError>,
    ) -> Result<T, EvalError> {
        self.bound.push((var, entity));
        let r = k(self);
        self.bound.pop();
        r
    }
}

/// Tarskian truth of `f` in `m` under `a`. Quantifiers range over the
/// model's domain; binary connectives evaluate both operands so that an
/// uninterpreted symbol is always reported.
pub fn evaluate(f: &Formula, m: &Model, a: &Assignment) -> Result<bool, EvalError> {
    Env {
        model: m,
        base: a,
        bound: Vec::new(),
    }
    .eval(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal_lang::parse_formula;

    fn everyone_seen() -> Formula {
        parse_formula("forall x. (x in H -> J S x)").unwrap()
    }

    #[test]
    fn one_element_domain() {
        let m = Model::new(["a"])
            .with_predicate("H", ["a"])
            .with_relation("S", [("a", "a")])
            .with_constant("J", "a");
        m.validate().unwrap();
        assert!(evaluate(&everyone_seen(), &m, &Assignment::new()).unwrap());
    }

    #[test]
    fn unseen_human_falsifies() {
        let m = Model::new(["a", "b"])
            .with_predicate("H", ["a", "b"])
            .with_relation("S", [("a", "a")])
            .with_constant("J", "a");
        assert!(!evaluate(&everyone_seen(), &m, &Assignment::new()).unwrap());
    }

    #[test]
    fn errors_name_the_symbol() {
        let m = Model::new(["a"]).with_predicate("H", ["a"]);
        assert_eq!(
            evaluate(&everyone_seen(), &m, &Assignment::new()),
            Err(EvalError::UninterpretedSymbol("S".into()))
        );
        let f = parse_formula("x in H").unwrap();
        assert_eq!(
            evaluate(&f, &m, &Assignment::new()),
            Err(EvalError::UnboundVariable("x".into()))
        );
        let a = Assignment::from([("x".to_string(), "a".to_string())]);
        assert!(evaluate(&f, &m, &a).unwrap());
    }

    #[test]
    fn probability_needs_exact_value() {
        let f = parse_formula("prob(snow) = 4/5").unwrap();
        let m = Model::new(["a"]).with_event("snow", Probability::new(8, 10).unwrap());
        assert!(evaluate(&f, &m, &Assignment::new()).unwrap());
        let m = Model::new(["a"]).with_event("snow", Probability::new(79, 100).unwrap());
        assert!(!evaluate(&f, &m, &Assignment::new()).unwrap());
    }

    #[test]
    fn model_rejects_foreign_entity() {
        let m = Model::new(["a"]).with_relation("S", [("J", "a")]);
        assert!(matches!(
            m.validate(),
            Err(ModelError::EntityOutsideDomain { .. })
        ));
        let json = r#"{"domain":["a"],"predicates":{"H":["b"]}}"#;
        assert!(serde_json::from_str::<Model>(json).is_err());
        let json = r#"{"domain":["a"],"predicates":{"H":["a"]},"events":{"snow":"4/5"}}"#;
        assert!(serde_json::from_str::<Model>(json).is_ok());
    }
}
