//! Quantifier and Wh movement between levels, and emphasis-driven
//! realization of D-structure as S-structure.
//!
//! Every operation returns the moved string together with one
//! [`MovementRecord`] per constituent that changed position. Source
//! positions index the input items, target positions the output items.
//!
//! Closed-class words (quantifiers, Wh words, auxiliaries) take their case
//! from position: capitalized when they are the first non-bracket item,
//! lowercase elsewhere.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frep::{BindingConstraints, Force, Mood};
use crate::syntax_rep::{
    capitalize, decapitalize, fresh_index_from, Item, Label, Level, Punctuation, SString,
    SStringError, TraceKind,
};

/// Where a raised quantifier lands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Landing {
    #[default]
    Front,
    End,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MovementConfig {
    pub quantifiers: BTreeSet<String>,
    pub wh_words: BTreeSet<String>,
    pub auxiliaries: BTreeSet<String>,
    /// Whether interrogatives front their Wh word.
    pub wh_fronting: bool,
    pub landing: Landing,
}

fn word_set(words: &[&str]) -> BTreeSet<String> {
    words.iter().map(|w| w.to_string()).collect()
}

impl Default for MovementConfig {
    fn default() -> Self {
        MovementConfig {
            quantifiers: word_set(&[
                "anybody",
                "anyone",
                "anything",
                "everybody",
                "everyone",
                "everything",
                "nobody",
                "nothing",
                "somebody",
                "someone",
                "something",
            ]),
            wh_words: word_set(&[
                "how", "what", "when", "where", "which", "who", "whom", "whose", "why",
            ]),
            auxiliaries: word_set(&[
                "are", "can", "could", "did", "do", "does", "had", "has", "have", "is", "should",
                "was", "were", "will", "would",
            ]),
            wh_fronting: true,
            landing: Landing::Front,
        }
    }
}

impl MovementConfig {
    pub fn with_quantifier(mut self, word: &str) -> Self {
        self.quantifiers.insert(word.to_lowercase());
        self
    }

    pub fn with_wh(mut self, word: &str) -> Self {
        self.wh_words.insert(word.to_lowercase());
        self
    }

    pub fn with_auxiliary(mut self, word: &str) -> Self {
        self.auxiliaries.insert(word.to_lowercase());
        self
    }

    pub fn with_wh_fronting(mut self, on: bool) -> Self {
        self.wh_fronting = on;
        self
    }

    pub fn with_landing(mut self, landing: Landing) -> Self {
        self.landing = landing;
        self
    }

    pub fn is_quantifier(&self, word: &str) -> bool {
        self.quantifiers.contains(&word.to_lowercase())
    }

    pub fn is_wh(&self, word: &str) -> bool {
        self.wh_words.contains(&word.to_lowercase())
    }

    pub fn is_auxiliary(&self, word: &str) -> bool {
        self.auxiliaries.contains(&word.to_lowercase())
    }

    fn is_closed_class(&self, word: &str) -> bool {
        self.is_quantifier(word) || self.is_wh(word) || self.is_auxiliary(word)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MovementOp {
    QuantifierRaise,
    WhRaise,
    QuantifierLower,
    WhLower,
    WhFront,
    Emphasis,
    Topicalize,
}

impl fmt::Display for MovementOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MovementOp::QuantifierRaise => "quantifier_raise",
            MovementOp::WhRaise => "wh_raise",
            MovementOp::QuantifierLower => "quantifier_lower",
            MovementOp::WhLower => "wh_lower",
            MovementOp::WhFront => "wh_front",
            MovementOp::Emphasis => "emphasis",
            MovementOp::Topicalize => "topicalize",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MovementRecord {
    pub operation: MovementOp,
    pub index: u32,
    pub source: usize,
    pub target: usize,
}

impl fmt::Display for MovementRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} _{}: {} -> {}",
            self.operation, self.index, self.source, self.target
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Moved {
    pub string: SString,
    pub records: Vec<MovementRecord>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MovementError {
    #[error("item at position {0} is not a quantifier word")]
    NotAQuantifier(usize),
    #[error("expected a string at {expected}, found {found}")]
    LevelMismatch { expected: String, found: Level },
    #[error("no Wh word in the string")]
    NoWhItem,
    #[error("more than one Wh word in the string")]
    MultipleWhItems,
    #[error("no fronted quantifier coindexed with an x trace")]
    NoFrontedQuantifier,
    #[error("index {0} is not coindexed as the operation requires")]
    BrokenCoindexation(u32),
    #[error("emphasis target `{0}` does not occur in the string")]
    EmphasisTargetMissing(String),
    #[error("bound word `{0}` must occur exactly once")]
    BindingViolation(String),
    #[error(transparent)]
    Invalid(#[from] SStringError),
}

fn expect_level(s: &SString, allowed: &[Level]) -> Result<(), MovementError> {
    if allowed.contains(&s.level()) {
        Ok(())
    } else {
        let expected = allowed
            .iter()
            .map(Level::to_string)
            .collect::<Vec<_>>()
            .join(" or ");
        Err(MovementError::LevelMismatch {
            expected,
            found: s.level(),
        })
    }
}

/// An item tagged with the input position it came from. Only surviving or
/// moved constituents carry an origin; inserted traces and brackets do not.
#[derive(Debug, Clone)]
struct Slot {
    origin: Option<usize>,
    item: Item,
}

fn slots(s: &SString) -> Vec<Slot> {
    s.items()
        .iter()
        .enumerate()
        .map(|(i, item)| Slot {
            origin: Some(i),
            item: item.clone(),
        })
        .collect()
}

fn fresh(item: Item) -> Slot {
    Slot { origin: None, item }
}

/// Capitalizes a closed-class word in first position, lowercases the rest.
pub fn normalize_case(items: &mut [Item], cfg: &MovementConfig) {
    let first = items.iter().position(|i| !i.is_bracket());
    for (pos, item) in items.iter_mut().enumerate() {
        if let Item::Word { text } | Item::Indexed { text, .. } = item {
            if cfg.is_closed_class(text) {
                *text = if Some(pos) == first {
                    capitalize(text)
                } else {
                    decapitalize(text)
                };
            }
        }
    }
}

/// A pending record: operation, index and the input position of the moved
/// constituent. Targets are filled in once the output is fixed.
type Pending = (MovementOp, u32, usize);

fn finish(
    level: Level,
    slots: Vec<Slot>,
    punctuation: Punctuation,
    cfg: &MovementConfig,
    pending: Vec<Pending>,
) -> Result<Moved, MovementError> {
    let mut items: Vec<Item> = slots.iter().map(|s| s.item.clone()).collect();
    normalize_case(&mut items, cfg);
    let string = SString::new(level, items, punctuation)?;
    let records = pending
        .into_iter()
        .filter_map(|(operation, index, source)| {
            let target = slots.iter().position(|s| s.origin == Some(source))?;
            (target != source).then_some(MovementRecord {
                operation,
                index,
                source,
                target,
            })
        })
        .collect();
    Ok(Moved { string, records })
}

/// True when the whole sequence is one bracketed constituent.
fn single_constituent(items: &[Slot]) -> bool {
    if !matches!(items.first().map(|s| &s.item), Some(Item::Open { .. })) {
        return false;
    }
    let mut depth = 0usize;
    for (pos, s) in items.iter().enumerate() {
        match s.item {
            Item::Open { .. } => depth += 1,
            Item::Close => {
                depth -= 1;
                if depth == 0 {
                    return pos + 1 == items.len();
                }
            }
            _ => {}
        }
    }
    false
}

fn wrapped(mut rest: Vec<Slot>) -> Vec<Slot> {
    if single_constituent(&rest) {
        return rest;
    }
    rest.insert(0, fresh(Item::open(None)));
    rest.push(fresh(Item::Close));
    rest
}

/// Raises the quantifier at `qpos`: it becomes an indexed phrase at the
/// landing site and leaves an x trace behind.
///
/// Accepts S-structure and, for stacking a further quantifier, LF.
pub fn quantifier_raise(
    s: &SString,
    qpos: usize,
    cfg: &MovementConfig,
) -> Result<Moved, MovementError> {
    expect_level(s, &[Level::SS, Level::LF])?;
    let text = match s.items().get(qpos) {
        Some(Item::Word { text }) if cfg.is_quantifier(text) => text.clone(),
        _ => return Err(MovementError::NotAQuantifier(qpos)),
    };
    let index = fresh_index_from(s, 1);
    let mut rest = slots(s);
    rest[qpos] = fresh(Item::trace(TraceKind::X, index));
    let phrase = Slot {
        origin: Some(qpos),
        item: Item::indexed(&text, index),
    };
    let mut out = vec![fresh(Item::open(None))];
    match cfg.landing {
        Landing::Front => {
            out.push(phrase);
            out.extend(wrapped(rest));
        }
        Landing::End => {
            out.extend(wrapped(rest));
            out.push(phrase);
        }
    }
    out.push(fresh(Item::Close));
    finish(
        Level::LF,
        out,
        s.punctuation(),
        cfg,
        vec![(MovementOp::QuantifierRaise, index, qpos)],
    )
}

/// Positions of audible items whose text is a Wh word.
fn wh_positions(s: &SString, cfg: &MovementConfig) -> Vec<usize> {
    s.items()
        .iter()
        .enumerate()
        .filter(|(_, i)| i.text().is_some_and(|t| cfg.is_wh(t)))
        .map(|(p, _)| p)
        .collect()
}

fn single_wh(s: &SString, cfg: &MovementConfig) -> Result<usize, MovementError> {
    match wh_positions(s, cfg).as_slice() {
        [] => Err(MovementError::NoWhItem),
        [p] => Ok(*p),
        _ => Err(MovementError::MultipleWhItems),
    }
}

/// S-structure to LF for a Wh question: word order is kept and t traces
/// become x traces.
pub fn wh_raise(s: &SString, cfg: &MovementConfig) -> Result<Moved, MovementError> {
    expect_level(s, &[Level::SS])?;
    single_wh(s, cfg)?;
    let out = slots(s)
        .into_iter()
        .map(|mut slot| {
            if let Item::Trace {
                trace: TraceKind::T,
                index,
            } = slot.item
            {
                slot.item = Item::trace(TraceKind::X, index);
            }
            slot
        })
        .collect();
    finish(Level::LF, out, s.punctuation(), cfg, Vec::new())
}

/// Swaps each listed chain: the fronted phrase goes to its x-trace position
/// and a y trace marks where it stood. Brackets are dropped.
fn lower_chains(
    s: &SString,
    chains: &[(u32, usize, usize)],
    op: MovementOp,
    cfg: &MovementConfig,
) -> Result<Moved, MovementError> {
    let mut out = slots(s);
    let mut pending = Vec::new();
    for &(index, phrase, trace) in chains {
        let text = s.items()[phrase]
            .text()
            .expect("phrase is indexed")
            .to_string();
        out[phrase] = fresh(Item::trace(TraceKind::Y, index));
        out[trace] = Slot {
            origin: Some(phrase),
            item: Item::indexed(&text, index),
        };
        pending.push((op, index, phrase));
    }
    out.retain(|slot| !slot.item.is_bracket());
    finish(Level::DS, out, s.punctuation(), cfg, pending)
}

/// LF to D-structure: every fronted quantifier returns to the position of
/// its x trace, leaving a y trace at the front.
pub fn quantifier_lower(s: &SString, cfg: &MovementConfig) -> Result<Moved, MovementError> {
    expect_level(s, &[Level::LF])?;
    let mut chains = Vec::new();
    for (&index, &(phrase, trace)) in s.coindex() {
        let text = s.items()[phrase].text().unwrap_or_default();
        if !cfg.is_quantifier(text) {
            continue;
        }
        match s.items()[trace] {
            Item::Trace {
                trace: TraceKind::X,
                ..
            } if phrase < trace => chains.push((index, phrase, trace)),
            _ => return Err(MovementError::BrokenCoindexation(index)),
        }
    }
    if chains.is_empty() {
        return Err(MovementError::NoFrontedQuantifier);
    }
    lower_chains(s, &chains, MovementOp::QuantifierLower, cfg)
}

/// LF to D-structure for a Wh question: the Wh phrase returns to its x
/// trace, leaving a y trace. A Wh word in situ is only relabeled.
pub fn wh_lower(s: &SString, cfg: &MovementConfig) -> Result<Moved, MovementError> {
    expect_level(s, &[Level::LF])?;
    let pos = single_wh(s, cfg)?;
    match &s.items()[pos] {
        Item::Indexed { index, .. } => {
            let (phrase, trace) = s.coindex()[index];
            match s.items()[trace] {
                Item::Trace {
                    trace: TraceKind::X,
                    ..
                } if phrase < trace => {
                    lower_chains(s, &[(*index, phrase, trace)], MovementOp::WhLower, cfg)
                }
                _ => Err(MovementError::BrokenCoindexation(*index)),
            }
        }
        _ => {
            let out = slots(s)
                .into_iter()
                .filter(|x| !x.item.is_bracket())
                .collect();
            finish(Level::DS, out, s.punctuation(), cfg, Vec::new())
        }
    }
}

fn position_of_index(slots: &[Slot], index: u32, trace: bool) -> Option<usize> {
    slots
        .iter()
        .position(|s| s.item.index() == Some(index) && s.item.is_trace() == trace)
}

fn first_audible(slots: &[Slot]) -> usize {
    slots
        .iter()
        .position(|s| !s.item.is_bracket())
        .unwrap_or(slots.len())
}

fn used_indices(slots: &[Slot]) -> BTreeSet<u32> {
    slots.iter().filter_map(|s| s.item.index()).collect()
}

fn fresh_in(slots: &[Slot]) -> u32 {
    let used = used_indices(slots);
    (1..)
        .find(|i| !used.contains(i))
        .expect("u32 range is not exhausted")
}

/// If the item at `pos` heads a chain ending in a y trace, the trace position.
fn y_partner(slots: &[Slot], pos: usize) -> Option<(u32, usize)> {
    let Item::Indexed { index, .. } = slots[pos].item else {
        return None;
    };
    slots
        .iter()
        .position(|s| {
            s.item
                == Item::Trace {
                    trace: TraceKind::Y,
                    index,
                }
        })
        .map(|y| (index, y))
}

/// Fronts the emphasized word: a lowered chain moves back into its y-trace
/// position, any other word is topicalized with a fresh index.
fn emphasize(
    out: &mut Vec<Slot>,
    target: &str,
    pending: &mut Vec<Pending>,
) -> Result<(), MovementError> {
    let pos = out
        .iter()
        .position(|s| {
            s.item
                .text()
                .is_some_and(|t| t.eq_ignore_ascii_case(target))
        })
        .ok_or_else(|| MovementError::EmphasisTargetMissing(target.to_string()))?;
    let origin = out[pos].origin.expect("input items keep their origin");
    let text = out[pos].item.text().expect("audible").to_string();
    if let Some((index, y)) = y_partner(out, pos) {
        out[y] = Slot {
            origin: Some(origin),
            item: Item::indexed(&text, index),
        };
        out[pos] = fresh(Item::trace(TraceKind::T, index));
        pending.push((MovementOp::Emphasis, index, origin));
    } else if matches!(out[pos].item, Item::Word { .. }) && pos != first_audible(out) {
        let index = fresh_in(out);
        out[pos] = fresh(Item::trace(TraceKind::T, index));
        let land = first_audible(out);
        out.insert(
            land,
            Slot {
                origin: Some(origin),
                item: Item::indexed(&text, index),
            },
        );
        pending.push((MovementOp::Topicalize, index, origin));
    }
    Ok(())
}

/// Builds `[CP Wh_i (aux) [IP rest]]` at the Wh word's landing site.
fn front_wh(out: &mut Vec<Slot>, pos: usize, cfg: &MovementConfig, pending: &mut Vec<Pending>) {
    let origin = out[pos].origin.expect("input items keep their origin");
    let text = out[pos].item.text().expect("audible").to_string();
    let (index, land) = match y_partner(out, pos) {
        Some((index, y)) => (index, y),
        None => (fresh_in(out), first_audible(out)),
    };
    out[pos] = fresh(Item::trace(TraceKind::T, index));
    let mut after = out.split_off(land);
    if let Some(Item::Trace {
        trace: TraceKind::Y,
        index: i,
    }) = after.first().map(|s| &s.item)
    {
        if *i == index {
            after.remove(0);
        }
    }
    out.push(fresh(Item::open(Some(Label::CP))));
    out.push(Slot {
        origin: Some(origin),
        item: Item::indexed(&text, index),
    });
    let aux = matches!(&after.first().map(|s| &s.item), Some(Item::Word { text }) if cfg.is_auxiliary(text));
    if aux {
        out.push(after.remove(0));
    }
    out.push(fresh(Item::open(Some(Label::IP))));
    out.extend(after);
    out.push(fresh(Item::Close));
    out.push(fresh(Item::Close));
    pending.push((MovementOp::WhFront, index, origin));
}

/// Erases y traces left without a filler and drops their partner's index.
fn erase_vacuous(out: &mut Vec<Slot>) {
    let vacuous: Vec<u32> = out
        .iter()
        .filter_map(|s| match s.item {
            Item::Trace {
                trace: TraceKind::Y,
                index,
            } => Some(index),
            _ => None,
        })
        .collect();
    for index in vacuous {
        if let Some(p) = position_of_index(out, index, false) {
            let text = out[p].item.text().expect("audible").to_string();
            out[p].item = Item::word(&text);
        }
        out.retain(|s| {
            s.item
                != Item::Trace {
                    trace: TraceKind::Y,
                    index,
                }
        });
    }
}

/// Realizes D-structure as S-structure under a force.
///
/// Interrogative mood fronts the Wh word into a CP (unless the config turns
/// Wh fronting off); an emphasized word is fronted; remaining y traces are
/// erased. Every word carried by `bc` must occur exactly once in the result.
pub fn apply_emphasis(
    ds: &SString,
    force: &Force,
    bc: &BindingConstraints,
    cfg: &MovementConfig,
) -> Result<Moved, MovementError> {
    expect_level(ds, &[Level::DS])?;
    let mut out: Vec<Slot> = slots(ds)
        .into_iter()
        .filter(|s| !s.item.is_bracket())
        .collect();
    let mut pending = Vec::new();
    let interrogative = force.mood == Mood::Interrogative;

    let wh_target = interrogative && force.emphasis.as_deref().is_some_and(|e| cfg.is_wh(e));
    if let Some(target) = force.emphasis.as_deref() {
        if !wh_target {
            emphasize(&mut out, target, &mut pending)?;
        }
    }
    if interrogative && cfg.wh_fronting {
        let wh: Vec<usize> = out
            .iter()
            .enumerate()
            .filter(|(_, s)| s.item.text().is_some_and(|t| cfg.is_wh(t)))
            .map(|(p, _)| p)
            .collect();
        match wh.as_slice() {
            [] => {}
            [p] => front_wh(&mut out, *p, cfg, &mut pending),
            _ => return Err(MovementError::MultipleWhItems),
        }
    } else if let Some(target) = force.emphasis.as_deref().filter(|_| wh_target) {
        if !out.iter().any(|s| {
            s.item
                .text()
                .is_some_and(|t| t.eq_ignore_ascii_case(target))
        }) {
            return Err(MovementError::EmphasisTargetMissing(target.to_string()));
        }
    }
    erase_vacuous(&mut out);

    let punctuation = if interrogative {
        Punctuation::Question
    } else {
        ds.punctuation()
    };
    let moved = finish(Level::SS, out, punctuation, cfg, pending)?;
    for word in bc.words() {
        let count = moved
            .string
            .items()
            .iter()
            .filter(|i| i.text().is_some_and(|t| t.eq_ignore_ascii_case(word)))
            .count();
        if count != 1 {
            return Err(MovementError::BindingViolation(word.to_string()));
        }
    }
    Ok(moved)
}

/// Lowercased texts of the audible items, sorted: the multiset every
/// movement operation preserves.
pub fn word_multiset(s: &SString) -> Vec<String> {
    let mut words: Vec<String> = s
        .items()
        .iter()
        .filter_map(Item::text)
        .map(str::to_lowercase)
        .collect();
    words.sort();
    words
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax_rep::{equivalent_mod_indices, parse_sstring, render, strip};

    fn cfg() -> MovementConfig {
        MovementConfig::default()
    }

    fn at(level: Level, text: &str) -> SString {
        parse_sstring(level, text).unwrap()
    }

    fn bc(words: &[&str]) -> BindingConstraints {
        BindingConstraints(
            words
                .iter()
                .enumerate()
                .map(|(i, w)| (w.to_string(), i as u64))
                .collect(),
        )
    }

    #[test]
    fn raise_object_quantifier() {
        let m = quantifier_raise(&at(Level::SS, "Jones saw everyone"), 2, &cfg()).unwrap();
        assert_eq!(render(&m.string), "[ Everyone_1 [ Jones saw x_1 ] ]");
        assert_eq!(m.string.level(), Level::LF);
        assert_eq!(
            m.records,
            vec![MovementRecord {
                operation: MovementOp::QuantifierRaise,
                index: 1,
                source: 2,
                target: 1
            }]
        );
    }

    #[test]
    fn raise_initial_quantifier_leaves_adjacent_trace() {
        let m = quantifier_raise(&at(Level::SS, "everyone left"), 0, &cfg()).unwrap();
        assert_eq!(render(&m.string), "[ Everyone_1 [ x_1 left ] ]");
        assert_eq!(render(&m.string.without_brackets()), "Everyone_1 x_1 left");
    }

    #[test]
    fn raise_to_the_end() {
        let c = cfg().with_landing(Landing::End);
        let m = quantifier_raise(&at(Level::SS, "Jones saw everyone"), 2, &c).unwrap();
        assert_eq!(render(&m.string), "[ [ Jones saw x_1 ] everyone_1 ]");
    }

    #[test]
    fn raise_rejects_non_quantifiers() {
        let s = at(Level::SS, "Jones saw everyone");
        assert_eq!(
            quantifier_raise(&s, 0, &cfg()),
            Err(MovementError::NotAQuantifier(0))
        );
        assert_eq!(
            quantifier_raise(&s, 9, &cfg()),
            Err(MovementError::NotAQuantifier(9))
        );
        let ds = at(Level::DS, "Jones saw everyone");
        assert!(matches!(
            quantifier_raise(&ds, 2, &cfg()),
            Err(MovementError::LevelMismatch { .. })
        ));
    }

    #[test]
    fn stacked_raising_nests() {
        let s = at(Level::SS, "everyone saw someone");
        let m = quantifier_raise(&s, 2, &cfg()).unwrap();
        let pos = m
            .string
            .items()
            .iter()
            .position(|i| i.text() == Some("everyone"))
            .unwrap();
        let m = quantifier_raise(&m.string, pos, &cfg()).unwrap();
        assert_eq!(
            render(&m.string),
            "[ Everyone_2 [ someone_1 [ x_2 saw x_1 ] ] ]"
        );
    }

    #[test]
    fn wh_raise_retypes() {
        let s = at(Level::SS, "[CP Who_1 did [IP Jones see t_1]] ?");
        let m = wh_raise(&s, &cfg()).unwrap();
        assert_eq!(render(&m.string), "[CP Who_1 did [IP Jones see x_1]] ?");
        assert!(m.records.is_empty());
        let in_situ = wh_raise(&at(Level::SS, "Jones saw who ?"), &cfg()).unwrap();
        assert_eq!(render(&in_situ.string), "Jones saw who ?");
        assert_eq!(in_situ.string.level(), Level::LF);
        assert_eq!(
            wh_raise(&at(Level::SS, "Jones saw Mary"), &cfg()),
            Err(MovementError::NoWhItem)
        );
        assert_eq!(
            wh_raise(&at(Level::SS, "who saw what"), &cfg()),
            Err(MovementError::MultipleWhItems)
        );
    }

    #[test]
    fn quantifier_lowering() {
        let lf = at(Level::LF, "[ Everyone_1 [ Jones saw x_1 ] ]");
        let m = quantifier_lower(&lf, &cfg()).unwrap();
        assert_eq!(render(&m.string), "y_1 Jones saw everyone_1");
        assert_eq!(strip(&m.string), "Jones saw everyone");
        assert_eq!(m.records[0].source, 1);
        assert_eq!(m.records[0].target, 3);
        assert_eq!(
            quantifier_lower(&at(Level::LF, "Jones saw Mary"), &cfg()),
            Err(MovementError::NoFrontedQuantifier)
        );
    }

    #[test]
    fn wh_lowering() {
        let lf = at(Level::LF, "[CP Who_1 did [IP Jones see x_1]] ?");
        let m = wh_lower(&lf, &cfg()).unwrap();
        assert_eq!(render(&m.string), "y_1 did Jones see who_1 ?");
        assert_eq!(
            wh_lower(&at(Level::LF, "Jones saw Mary"), &cfg()),
            Err(MovementError::NoWhItem)
        );
    }

    #[test]
    fn interrogative_fronts_wh() {
        let ds = at(Level::DS, "y_1 did Jones see who_1 ?");
        let m = apply_emphasis(&ds, &Force::interrogative(), &bc(&["Jones"]), &cfg()).unwrap();
        assert_eq!(render(&m.string), "[CP Who_1 did [IP Jones see t_1]] ?");
        assert_eq!(strip(&m.string), "Who did Jones see?");
        assert_eq!(m.records[0].operation, MovementOp::WhFront);
        assert_eq!((m.records[0].source, m.records[0].target), (4, 1));
    }

    #[test]
    fn wh_in_situ_without_fronting() {
        let ds = at(Level::DS, "y_1 did Jones see who_1 ?");
        let c = cfg().with_wh_fronting(false);
        let m = apply_emphasis(&ds, &Force::interrogative(), &bc(&[]), &c).unwrap();
        assert_eq!(render(&m.string), "Did Jones see who ?");
        assert!(m.records.is_empty());
    }

    #[test]
    fn emphasis_fronts_quantifier() {
        let ds = at(Level::DS, "y_1 Jones saw everyone_1");
        let force = Force::declarative().emphasizing("everyone");
        let m = apply_emphasis(&ds, &force, &bc(&["Jones"]), &cfg()).unwrap();
        assert_eq!(render(&m.string), "Everyone_1 Jones saw t_1");
        assert_eq!(strip(&m.string), "Everyone Jones saw");
    }

    #[test]
    fn plain_declarative_erases_vacuous_trace() {
        let ds = at(Level::DS, "y_1 Jones saw everyone_1");
        let m = apply_emphasis(&ds, &Force::declarative(), &bc(&["Jones"]), &cfg()).unwrap();
        assert_eq!(render(&m.string), "Jones saw everyone");
        assert!(m.records.is_empty());
    }

    #[test]
    fn topicalization_of_plain_word() {
        let ds = at(Level::DS, "Jones saw Mary");
        let force = Force::declarative().emphasizing("Mary");
        let m = apply_emphasis(&ds, &force, &bc(&[]), &cfg()).unwrap();
        assert_eq!(render(&m.string), "Mary_1 Jones saw t_1");
        let same = apply_emphasis(
            &ds,
            &Force::declarative().emphasizing("jones"),
            &bc(&[]),
            &cfg(),
        )
        .unwrap();
        assert_eq!(render(&same.string), "Jones saw Mary");
        assert!(same.records.is_empty());
    }

    #[test]
    fn emphasis_and_binding_errors() {
        let ds = at(Level::DS, "y_1 Jones saw everyone_1");
        let force = Force::declarative().emphasizing("Mary");
        assert_eq!(
            apply_emphasis(&ds, &force, &bc(&[]), &cfg()),
            Err(MovementError::EmphasisTargetMissing("Mary".into()))
        );
        assert_eq!(
            apply_emphasis(&ds, &Force::declarative(), &bc(&["Mary"]), &cfg()),
            Err(MovementError::BindingViolation("Mary".into()))
        );
        let twice = at(Level::DS, "Jones saw Jones");
        assert_eq!(
            apply_emphasis(&twice, &Force::declarative(), &bc(&["Jones"]), &cfg()),
            Err(MovementError::BindingViolation("Jones".into()))
        );
    }

    #[test]
    fn wh_round_trip() {
        let s = at(Level::SS, "[CP Who_1 did [IP Jones see t_1]] ?");
        let lf = wh_raise(&s, &cfg()).unwrap().string;
        let ds = wh_lower(&lf, &cfg()).unwrap().string;
        let back = apply_emphasis(&ds, &Force::interrogative(), &bc(&[]), &cfg()).unwrap();
        assert!(equivalent_mod_indices(&back.string, &s));
    }

    #[test]
    fn subject_wh_round_trip() {
        let lf = at(Level::LF, "[CP Who_1 [IP x_1 left]] ?");
        let ds = wh_lower(&lf, &cfg()).unwrap().string;
        assert_eq!(render(&ds), "y_1 who_1 left ?");
        let ss = apply_emphasis(&ds, &Force::interrogative(), &bc(&[]), &cfg()).unwrap();
        assert_eq!(render(&ss.string), "[CP Who_1 [IP t_1 left]] ?");
        assert_eq!(strip(&ss.string), "Who left?");
    }

    #[test]
    fn lowering_keeps_words() {
        let lf = at(Level::LF, "[ Everyone_2 [ someone_1 [ x_2 saw x_1 ] ] ]");
        let ds = quantifier_lower(&lf, &cfg()).unwrap();
        assert_eq!(render(&ds.string), "y_2 y_1 everyone_2 saw someone_1");
        assert_eq!(word_multiset(&ds.string), word_multiset(&lf));
        assert_eq!(ds.records.len(), 2);
    }
}
