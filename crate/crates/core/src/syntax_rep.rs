//! Leveled syntactic strings: flat item sequences at D-structure,
//! S-structure or LF, with indexed phrases, traces and optional labeled
//! brackets.
//!
//! The bracketed text form is what golden files hold:
//!
//! ```text
//! [CP Who_1 did [IP Jones see t_1]] ?
//! [ Everyone_1 [ Jones saw x_1 ] ]
//! y_1 did Jones see who_1 ?
//! ```
//!
//! A close bracket is glued to the preceding item when its open bracket
//! carries a label and spaced otherwise.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    DS,
    SS,
    LF,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::DS => "DS",
            Level::SS => "SS",
            Level::LF => "LF",
        })
    }
}

/// Trace glyph. `t` marks S-structure traces, `x` LF traces and `y`
/// D-structure traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    T,
    X,
    Y,
}

impl TraceKind {
    pub fn glyph(self) -> char {
        match self {
            TraceKind::T => 't',
            TraceKind::X => 'x',
            TraceKind::Y => 'y',
        }
    }

    fn from_glyph(s: &str) -> Option<Self> {
        match s {
            "t" => Some(TraceKind::T),
            "x" => Some(TraceKind::X),
            "y" => Some(TraceKind::Y),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    CP,
    IP,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Item {
    Word { text: String },
    Indexed { text: String, index: u32 },
    Trace { trace: TraceKind, index: u32 },
    Open { label: Option<Label> },
    Close,
}

impl Item {
    pub fn word(text: &str) -> Self {
        Item::Word {
            text: text.to_string(),
        }
    }

    pub fn indexed(text: &str, index: u32) -> Self {
        Item::Indexed {
            text: text.to_string(),
            index,
        }
    }

    pub fn trace(trace: TraceKind, index: u32) -> Self {
        Item::Trace { trace, index }
    }

    pub fn open(label: Option<Label>) -> Self {
        Item::Open { label }
    }

    /// Audible text of a word or indexed phrase.
    pub fn text(&self) -> Option<&str> {
        match self {
            Item::Word { text } | Item::Indexed { text, .. } => Some(text),
            _ => None,
        }
    }

    pub fn index(&self) -> Option<u32> {
        match self {
            Item::Indexed { index, .. } | Item::Trace { index, .. } => Some(*index),
            _ => None,
        }
    }

    pub fn is_bracket(&self) -> bool {
        matches!(self, Item::Open { .. } | Item::Close)
    }

    pub fn is_trace(&self) -> bool {
        matches!(self, Item::Trace { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Punctuation {
    #[default]
    None,
    Question,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SStringError {
    #[error("brackets do not balance")]
    UnbalancedBrackets,
    #[error("index {0} is not coindexed with exactly one phrase and one trace")]
    BrokenCoindexation(u32),
    #[error("`{0}` cannot be a word")]
    BadWord(String),
    #[error("cannot read `{0}` as a string item")]
    BadToken(String),
}

/// A syntactic string at one level. Construction validates bracket balance
/// and that coindexation is a perfect matching between indexed phrases and
/// traces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSString", into = "RawSString")]
pub struct SString {
    level: Level,
    items: Vec<Item>,
    punctuation: Punctuation,
    coindex: BTreeMap<u32, (usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct RawSString {
    level: Level,
    items: Vec<Item>,
    #[serde(default)]
    punctuation: Punctuation,
    #[serde(default, skip_deserializing)]
    coindex: BTreeMap<u32, (usize, usize)>,
}

impl TryFrom<RawSString> for SString {
    type Error = SStringError;
    fn try_from(raw: RawSString) -> Result<Self, Self::Error> {
        SString::new(raw.level, raw.items, raw.punctuation)
    }
}

impl From<SString> for RawSString {
    fn from(s: SString) -> Self {
        RawSString {
            level: s.level,
            items: s.items,
            punctuation: s.punctuation,
            coindex: s.coindex,
        }
    }
}

fn valid_word(text: &str) -> bool {
    !text.is_empty()
        && text != "?"
        && !text
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '_' | '^' | '[' | ']'))
}

impl SString {
    pub fn new(
        level: Level,
        items: Vec<Item>,
        punctuation: Punctuation,
    ) -> Result<Self, SStringError> {
        let mut depth = 0usize;
        let mut phrases: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        let mut traces: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (pos, item) in items.iter().enumerate() {
            match item {
                Item::Open { .. } => depth += 1,
                Item::Close => {
                    depth = depth
                        .checked_sub(1)
                        .ok_or(SStringError::UnbalancedBrackets)?;
                }
                Item::Word { text } => {
                    if !valid_word(text) {
                        return Err(SStringError::BadWord(text.clone()));
                    }
                }
                Item::Indexed { text, index } => {
                    if !valid_word(text) {
                        return Err(SStringError::BadWord(text.clone()));
                    }
                    phrases.entry(*index).or_default().push(pos);
                }
                Item::Trace { index, .. } => traces.entry(*index).or_default().push(pos),
            }
        }
        if depth != 0 {
            return Err(SStringError::UnbalancedBrackets);
        }
        let indices: BTreeSet<u32> = phrases.keys().chain(traces.keys()).copied().collect();
        let mut coindex = BTreeMap::new();
        for i in indices {
            match (
                phrases.get(&i).map(Vec::as_slice),
                traces.get(&i).map(Vec::as_slice),
            ) {
                (Some([p]), Some([t])) => {
                    coindex.insert(i, (*p, *t));
                }
                _ => return Err(SStringError::BrokenCoindexation(i)),
            }
        }
        Ok(SString {
            level,
            items,
            punctuation,
            coindex,
        })
    }

    /// A string of plain words.
    pub fn from_words(
        level: Level,
        words: &[&str],
        punctuation: Punctuation,
    ) -> Result<Self, SStringError> {
        SString::new(
            level,
            words.iter().map(|w| Item::word(w)).collect(),
            punctuation,
        )
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn punctuation(&self) -> Punctuation {
        self.punctuation
    }

    pub fn is_question(&self) -> bool {
        self.punctuation == Punctuation::Question
    }

    /// Index to (phrase position, trace position).
    pub fn coindex(&self) -> &BTreeMap<u32, (usize, usize)> {
        &self.coindex
    }

    pub fn with_level(&self, level: Level) -> SString {
        SString {
            level,
            ..self.clone()
        }
    }

    /// The same string with every bracket removed.
    pub fn without_brackets(&self) -> SString {
        let items = self
            .items
            .iter()
            .filter(|i| !i.is_bracket())
            .cloned()
            .collect();
        SString::new(self.level, items, self.punctuation)
            .expect("removing brackets keeps coindexation")
    }

    pub fn render(&self) -> String {
        render(self)
    }

    pub fn strip(&self) -> String {
        strip(self)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("string serializes")
    }
}

impl fmt::Display for SString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

/// Bracketed text form.
pub fn render(s: &SString) -> String {
    let mut out = String::new();
    let mut open_labels: Vec<Option<Label>> = Vec::new();
    for item in &s.items {
        let (glue, piece) = match item {
            Item::Word { text } => (false, text.clone()),
            Item::Indexed { text, index } => (false, format!("{text}_{index}")),
            Item::Trace { trace, index } => (false, format!("{}_{index}", trace.glyph())),
            Item::Open { label } => {
                open_labels.push(*label);
                let piece = match label {
                    Some(l) => format!("[{l:?}"),
                    None => "[".to_string(),
                };
                (false, piece)
            }
            Item::Close => {
                let label = open_labels.pop().flatten();
                (label.is_some(), "]".to_string())
            }
        };
        if !out.is_empty() && !glue {
            out.push(' ');
        }
        out.push_str(&piece);
    }
    if s.is_question() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push('?');
    }
    out
}

/// The audible form: words only, traces and brackets silent, first letter
/// capitalized, question mark attached.
pub fn strip(s: &SString) -> String {
    let words: Vec<&str> = s.items.iter().filter_map(Item::text).collect();
    let mut out = capitalize(&words.join(" "));
    if s.is_question() {
        out.push('?');
    }
    out
}

pub(crate) fn capitalize(text: &str) -> String {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

pub(crate) fn decapitalize(text: &str) -> String {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) => c.to_lowercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Reads the bracketed text form. Superscript indices (`y^1`) are accepted
/// and normalized to subscripts.
pub fn parse_sstring(level: Level, text: &str) -> Result<SString, SStringError> {
    let mut items = Vec::new();
    let mut punctuation = Punctuation::None;
    let tokens: Vec<&str> = text.split_whitespace().collect();
    for (n, tok) in tokens.iter().enumerate() {
        let last = n + 1 == tokens.len();
        if *tok == "?" {
            if !last {
                return Err(SStringError::BadToken(tok.to_string()));
            }
            punctuation = Punctuation::Question;
            continue;
        }
        let mut core = *tok;
        if last {
            if let Some(c) = core.strip_suffix('?') {
                core = c;
                punctuation = Punctuation::Question;
            }
        }
        let closes = core.len() - core.trim_end_matches(']').len();
        core = core.trim_end_matches(']');
        if let Some(label) = core.strip_prefix('[') {
            let label = match label {
                "" => None,
                "CP" => Some(Label::CP),
                "IP" => Some(Label::IP),
                _ => return Err(SStringError::BadToken(tok.to_string())),
            };
            items.push(Item::open(label));
        } else if !core.is_empty() {
            items.push(parse_item(core)?);
        }
        items.extend(std::iter::repeat_n(Item::Close, closes));
    }
    SString::new(level, items, punctuation)
}

fn parse_item(core: &str) -> Result<Item, SStringError> {
    let bad = || SStringError::BadToken(core.to_string());
    if let Some(pos) = core.rfind(['_', '^']) {
        let (head, index) = (&core[..pos], &core[pos + 1..]);
        let index: u32 = index.parse().map_err(|_| bad())?;
        if head.is_empty() {
            return Err(bad());
        }
        return Ok(match TraceKind::from_glyph(head) {
            Some(kind) => Item::trace(kind, index),
            None => Item::indexed(head, index),
        });
    }
    if valid_word(core) {
        Ok(Item::word(core))
    } else {
        Err(bad())
    }
}

/// True when the strings agree item by item under a bijective renaming of
/// indices.
pub fn equivalent_mod_indices(a: &SString, b: &SString) -> bool {
    if a.level != b.level || a.punctuation != b.punctuation || a.items.len() != b.items.len() {
        return false;
    }
    let mut forward: BTreeMap<u32, u32> = BTreeMap::new();
    let mut backward: BTreeMap<u32, u32> = BTreeMap::new();
    let mut link = |i: u32, j: u32| {
        *forward.entry(i).or_insert(j) == j && *backward.entry(j).or_insert(i) == i
    };
    a.items.iter().zip(&b.items).all(|(x, y)| match (x, y) {
        (Item::Indexed { text: s, index: i }, Item::Indexed { text: t, index: j }) => {
            s == t && link(*i, *j)
        }
        (Item::Trace { trace: k, index: i }, Item::Trace { trace: l, index: j }) => {
            k == l && link(*i, *j)
        }
        _ => x == y,
    })
}

/// Smallest index not used in `s`.
pub fn fresh_index(s: &SString) -> u32 {
    fresh_index_from(s, 0)
}

/// Smallest index at least `min` not used in `s`.
pub fn fresh_index_from(s: &SString, min: u32) -> u32 {
    let used: BTreeSet<u32> = s.items.iter().filter_map(Item::index).collect();
    (min..)
        .find(|i| !used.contains(i))
        .expect("u32 range is not exhausted")
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Appends the nodes and edges of `s` to a DOT body, prefixing node ids.
pub(crate) fn write_dot_body(s: &SString, prefix: &str, out: &mut String) {
    use std::fmt::Write;
    let mut rendered = Vec::new();
    for item in &s.items {
        let single = SString {
            level: s.level,
            items: vec![item.clone()],
            punctuation: Punctuation::None,
            coindex: BTreeMap::new(),
        };
        rendered.push(render(&single));
    }
    for (i, label) in rendered.iter().enumerate() {
        let shape = if s.items[i].is_trace() {
            "circle"
        } else {
            "box"
        };
        let _ = writeln!(
            out,
            "  {prefix}{i} [label=\"{}\", shape={shape}];",
            dot_escape(label)
        );
    }
    if s.is_question() {
        let _ = writeln!(out, "  {prefix}q [label=\"?\", shape=plaintext];");
    }
    let mut ids: Vec<String> = (0..rendered.len())
        .map(|i| format!("{prefix}{i}"))
        .collect();
    if s.is_question() {
        ids.push(format!("{prefix}q"));
    }
    for w in ids.windows(2) {
        let _ = writeln!(out, "  {} -> {};", w[0], w[1]);
    }
    for (index, (phrase, trace)) in &s.coindex {
        let _ = writeln!(
            out,
            "  {prefix}{phrase} -> {prefix}{trace} [style=dashed, constraint=false, label=\"{index}\"];"
        );
    }
}

/// DOT graph: the items as a flat chain with dashed coindexation arcs.
pub fn to_dot(s: &SString) -> String {
    let mut out = format!("digraph {} {{\n  rankdir=LR;\n", s.level);
    write_dot_body(s, "n", &mut out);
    out.push_str("}\n");
    out
}
