//! Incremental parsing by Minimal Attachment with Late Closure tie-breaks,
//! plus an exhaustive chart oracle.
//!
//! Grammar files hold one rule per line:
//!
//! ```text
//! S -> NP VP
//! VP -> V NP | V PP
//! NP -> 'Jones'
//! ```
//!
//! The parent of the first rule is the start category. Internal rules are
//! binary; a lexical rule gives a word a category. Blank lines and `#`
//! comments are skipped.
//!
//! The incremental parser never backtracks. Each word either fills the
//! lowest open right-hand site through the shortest left-corner chain, or
//! adjoins to a complete node on the right frontier through a rule of the
//! form `X -> X Y`. The option postulating the fewest new nodes wins; ties go
//! to the most recently postulated target, then to the lower rule index.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::rc::Rc;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

/// Longest sentence the exhaustive oracle accepts by default.
pub const ORACLE_BOUND: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Rule {
    pub parent: String,
    pub left: String,
    pub right: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("line {line}: expected `A -> B C` or `A -> 'word'`")]
    Malformed { line: usize },
    #[error("line {line}: rules must be binary or lexical")]
    NotBinary { line: usize },
    #[error("cannot read grammar: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    rules: Vec<Rule>,
    lexicon: BTreeMap<String, Vec<String>>,
    start: String,
    /// Shortest left-corner chain (as rule indices) from a category down to a
    /// lexical category.
    chains: BTreeMap<(String, String), Vec<usize>>,
}

impl Grammar {
    /// `lexical` pairs a category with a word.
    pub fn new(start: &str, rules: Vec<Rule>, lexical: &[(&str, &str)]) -> Self {
        let mut lexicon: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (cat, word) in lexical {
            let cats = lexicon.entry(word.to_string()).or_default();
            if !cats.iter().any(|c| c == cat) {
                cats.push(cat.to_string());
            }
        }
        let mut g = Grammar {
            rules,
            lexicon,
            start: start.to_string(),
            chains: BTreeMap::new(),
        };
        g.chains = g.compute_chains();
        g
    }

    pub fn empty(start: &str) -> Self {
        Grammar::new(start, Vec::new(), &[])
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn start(&self) -> &str {
        &self.start
    }

    /// Lexical categories of a word, in grammar order.
    pub fn categories(&self, word: &str) -> &[String] {
        self.lexicon
            .get(word)
            .map(Vec::as_slice)
            .unwrap_or_default()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.lexicon.keys().map(String::as_str)
    }

    pub fn load(path: &Path) -> Result<Self, GrammarError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GrammarError::Io(format!("{}: {e}", path.display())))?;
        text.parse()
    }

    fn categories_all(&self) -> BTreeSet<String> {
        let mut cats: BTreeSet<String> = self
            .rules
            .iter()
            .flat_map(|r| [r.parent.clone(), r.left.clone(), r.right.clone()])
            .collect();
        cats.insert(self.start.clone());
        cats.extend(self.lexicon.values().flatten().cloned());
        cats
    }

    /// First rule index for each (parent, left) pair.
    fn corner_edges(&self) -> BTreeMap<(&str, &str), usize> {
        let mut edges = BTreeMap::new();
        for (k, r) in self.rules.iter().enumerate() {
            edges
                .entry((r.parent.as_str(), r.left.as_str()))
                .or_insert(k);
        }
        edges
    }

    fn compute_chains(&self) -> BTreeMap<(String, String), Vec<usize>> {
        let cats = self.categories_all();
        let edges = self.corner_edges();
        let mut out = BTreeMap::new();
        for from in &cats {
            // Shortest chains to every reachable category; among equal
            // lengths the smallest rule-index sequence.
            let mut best: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
            best.insert(from.as_str(), Vec::new());
            let mut frontier: Vec<&str> = vec![from.as_str()];
            while !frontier.is_empty() {
                let mut next: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
                for cat in &frontier {
                    let path = best[cat].clone();
                    for (&(parent, left), &k) in &edges {
                        if parent != *cat || best.contains_key(left) {
                            continue;
                        }
                        let mut p = path.clone();
                        p.push(k);
                        match next.get(left) {
                            Some(existing) if *existing <= p => {}
                            _ => {
                                next.insert(left, p);
                            }
                        }
                    }
                }
                frontier = next.keys().copied().collect();
                best.extend(next);
            }
            for (to, path) in best {
                out.insert((from.clone(), to.to_string()), path);
            }
        }
        out
    }

    fn chain(&self, from: &str, to: &str) -> Option<&Vec<usize>> {
        self.chains.get(&(from.to_string(), to.to_string()))
    }

    /// Right categories licensed after `left` under `parent`.
    fn right_candidates(&self, parent: &str, left: &str) -> Vec<(usize, &str)> {
        self.rules
            .iter()
            .enumerate()
            .filter(|(_, r)| r.parent == parent && r.left == left)
            .map(|(k, r)| (k, r.right.as_str()))
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.rules {
            out.push_str(&format!("{} -> {} {}\n", r.parent, r.left, r.right));
        }
        for (word, cats) in &self.lexicon {
            for c in cats {
                out.push_str(&format!("{c} -> '{word}'\n"));
            }
        }
        out
    }
}

impl FromStr for Grammar {
    type Err = GrammarError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut rules = Vec::new();
        let mut lexical: Vec<(String, String)> = Vec::new();
        let mut start = None;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let body = raw.split('#').next().unwrap_or_default().trim();
            if body.is_empty() {
                continue;
            }
            let (lhs, rhs) = body
                .split_once("->")
                .ok_or(GrammarError::Malformed { line })?;
            let parent = lhs.trim();
            if parent.is_empty() || parent.contains(char::is_whitespace) {
                return Err(GrammarError::Malformed { line });
            }
            start.get_or_insert_with(|| parent.to_string());
            for alt in rhs.split('|') {
                let parts: Vec<&str> = alt.split_whitespace().collect();
                match parts.as_slice() {
                    [w] if w.len() >= 3 && w.starts_with('\'') && w.ends_with('\'') => {
                        lexical.push((parent.to_string(), w[1..w.len() - 1].to_string()));
                    }
                    [l, r] if !l.contains('\'') && !r.contains('\'') => rules.push(Rule {
                        parent: parent.to_string(),
                        left: l.to_string(),
                        right: r.to_string(),
                    }),
                    [] => return Err(GrammarError::Malformed { line }),
                    _ => return Err(GrammarError::NotBinary { line }),
                }
            }
        }
        let start = start.ok_or(GrammarError::Malformed { line: 0 })?;
        let pairs: Vec<(&str, &str)> = lexical
            .iter()
            .map(|(c, w)| (c.as_str(), w.as_str()))
            .collect();
        Ok(Grammar::new(&start, rules, &pairs))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ParseTree {
    pub category: String,
    /// Set on leaves only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub word: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<ParseTree>,
}

impl ParseTree {
    pub fn leaf(category: &str, word: &str) -> Self {
        ParseTree {
            category: category.to_string(),
            word: Some(word.to_string()),
            children: Vec::new(),
        }
    }

    pub fn branch(category: &str, left: ParseTree, right: ParseTree) -> Self {
        ParseTree {
            category: category.to_string(),
            word: None,
            children: vec![left, right],
        }
    }

    /// Internal (phrasal) nodes; leaves are not counted.
    pub fn node_count(&self) -> usize {
        if self.children.is_empty() {
            0
        } else {
            1 + self
                .children
                .iter()
                .map(ParseTree::node_count)
                .sum::<usize>()
        }
    }

    pub fn words(&self) -> Vec<&str> {
        match &self.word {
            Some(w) => vec![w.as_str()],
            None => self.children.iter().flat_map(ParseTree::words).collect(),
        }
    }

    /// True when every internal node is licensed by a rule and every leaf by
    /// a lexical rule.
    pub fn licensed_by(&self, g: &Grammar) -> bool {
        match (&self.word, self.children.as_slice()) {
            (Some(w), []) => g.categories(w).contains(&self.category),
            (None, [l, r]) => {
                g.rules.iter().any(|rule| {
                    rule.parent == self.category
                        && rule.left == l.category
                        && rule.right == r.category
                }) && l.licensed_by(g)
                    && r.licensed_by(g)
            }
            _ => false,
        }
    }

    /// `(S (NP Jones) (VP (V saw) (NP everyone)))`
    pub fn bracketed(&self) -> String {
        match &self.word {
            Some(w) => format!("({} {w})", self.category),
            None => {
                let kids: Vec<String> = self.children.iter().map(ParseTree::bracketed).collect();
                format!("({} {})", self.category, kids.join(" "))
            }
        }
    }

    pub fn to_dot(&self) -> String {
        fn walk(t: &ParseTree, next: &mut usize, out: &mut String) -> usize {
            let id = *next;
            *next += 1;
            out.push_str(&format!("  n{id} [label=\"{}\"];\n", t.category));
            if let Some(w) = &t.word {
                let wid = *next;
                *next += 1;
                out.push_str(&format!(
                    "  n{wid} [label=\"{}\", shape=plaintext];\n  n{id} -> n{wid};\n",
                    w.replace('"', "\\\"")
                ));
            }
            for c in &t.children {
                let cid = walk(c, next, out);
                out.push_str(&format!("  n{id} -> n{cid};\n"));
            }
            id
        }
        let mut out = String::from("digraph parse {\n");
        walk(self, &mut 0, &mut out);
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.bracketed())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GardenPathError {
    #[error("no attachment for `{word}` at position {position}")]
    NoAttachment { word: String, position: usize },
    #[error("input ends with open sites")]
    Incomplete,
    #[error("empty input")]
    Empty,
    #[error("{len} words exceed the oracle bound of {bound}")]
    BoundExceeded { len: usize, bound: usize },
}

type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
enum NodeKind {
    Leaf(String),
    Branch { left: NodeId, right: Option<NodeId> },
}

/// Node ids double as creation stamps: a higher id was postulated later.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Node {
    category: String,
    parent: Option<NodeId>,
    kind: NodeKind,
}

/// Snapshot of an incremental parse.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParserState {
    nodes: Vec<Node>,
    root: Option<NodeId>,
    last_leaf: Option<NodeId>,
    consumed: usize,
}

/// How a word can join the current partial tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum AttachmentKind {
    /// Spine from the start category (first word only).
    Spine,
    /// Fill the lowest open site.
    Fill,
    /// Adjoin to a complete right-frontier node.
    Adjoin,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttachmentOption {
    pub kind: AttachmentKind,
    /// Internal nodes this attachment postulates.
    pub new_nodes: usize,
    /// Category of the target node (the open site or the adjunction host).
    pub target: String,
    /// Creation stamp of the target; higher is more recent.
    pub target_stamp: usize,
    /// Lexical category the word takes.
    pub word_category: String,
    /// Rule indices: the rule fixing the target's expansion, then the chain.
    pub rules: Vec<usize>,
    site_right: Option<String>,
    target_id: Option<NodeId>,
}

impl ParserState {
    pub fn new() -> Self {
        ParserState::default()
    }

    /// Internal nodes postulated so far.
    pub fn nodes_postulated(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::Branch { .. }))
            .count()
    }

    pub fn is_complete(&self, g: &Grammar) -> bool {
        self.root
            .is_some_and(|r| self.nodes[r].category == g.start && self.deepest_open().is_none())
    }

    fn ancestors_of_last(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut cur = self.last_leaf;
        while let Some(id) = cur {
            out.push(id);
            cur = self.nodes[id].parent;
        }
        out
    }

    /// The open site closest to the last word.
    fn deepest_open(&self) -> Option<NodeId> {
        self.ancestors_of_last()
            .into_iter()
            .find(|&id| matches!(self.nodes[id].kind, NodeKind::Branch { right: None, .. }))
    }

    /// Complete nodes whose right edge is the last word, lowest first.
    fn right_frontier(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        for id in self.ancestors_of_last() {
            if matches!(self.nodes[id].kind, NodeKind::Branch { right: None, .. }) {
                break;
            }
            out.push(id);
        }
        out
    }

    fn push(&mut self, category: &str, parent: Option<NodeId>, kind: NodeKind) -> NodeId {
        self.nodes.push(Node {
            category: category.to_string(),
            parent,
            kind,
        });
        self.nodes.len() - 1
    }

    /// Builds a left-corner chain under `parent`, ending in the word's leaf.
    /// Returns the top node.
    fn build_chain(
        &mut self,
        g: &Grammar,
        top: &str,
        chain: &[usize],
        word: &str,
        word_category: &str,
        parent: Option<NodeId>,
    ) -> NodeId {
        let mut above = parent;
        let mut first = None;
        let mut attach_left: Option<NodeId> = None;
        let mut category = top.to_string();
        for &k in chain {
            let id = self.push(
                &category,
                above,
                NodeKind::Branch {
                    left: usize::MAX,
                    right: None,
                },
            );
            if let Some(p) = attach_left {
                self.set_left(p, id);
            }
            first.get_or_insert(id);
            attach_left = Some(id);
            above = Some(id);
            category = g.rules[k].left.clone();
        }
        debug_assert_eq!(category, word_category);
        let leaf = self.push(word_category, above, NodeKind::Leaf(word.to_string()));
        if let Some(p) = attach_left {
            self.set_left(p, leaf);
        }
        self.last_leaf = Some(leaf);
        first.unwrap_or(leaf)
    }

    fn set_left(&mut self, node: NodeId, child: NodeId) {
        if let NodeKind::Branch { left, .. } = &mut self.nodes[node].kind {
            *left = child;
        }
    }

    fn set_right(&mut self, node: NodeId, child: NodeId) {
        if let NodeKind::Branch { right, .. } = &mut self.nodes[node].kind {
            *right = Some(child);
        }
    }

    fn tree_at(&self, id: NodeId) -> Option<ParseTree> {
        let n = &self.nodes[id];
        match &n.kind {
            NodeKind::Leaf(w) => Some(ParseTree::leaf(&n.category, w)),
            NodeKind::Branch { left, right } => Some(ParseTree::branch(
                &n.category,
                self.tree_at(*left)?,
                self.tree_at((*right)?)?,
            )),
        }
    }

    /// The finished tree, if the parse is complete.
    pub fn tree(&self, g: &Grammar) -> Option<ParseTree> {
        if !self.is_complete(g) {
            return None;
        }
        self.tree_at(self.root?)
    }
}

/// Every licensed attachment of `word`, best first.
pub fn attachment_options(st: &ParserState, word: &str, g: &Grammar) -> Vec<AttachmentOption> {
    let mut options = Vec::new();
    for wc in g.categories(word) {
        if st.root.is_none() {
            if let Some(chain) = g.chain(&g.start, wc) {
                options.push(AttachmentOption {
                    kind: AttachmentKind::Spine,
                    new_nodes: chain.len(),
                    target: g.start.clone(),
                    target_stamp: 0,
                    word_category: wc.clone(),
                    rules: chain.clone(),
                    site_right: None,
                    target_id: None,
                });
            }
            continue;
        }
        if let Some(site) = st.deepest_open() {
            let node = &st.nodes[site];
            let NodeKind::Branch { left, .. } = node.kind else {
                unreachable!("open sites are branches")
            };
            for (k, right) in g.right_candidates(&node.category, &st.nodes[left].category) {
                if let Some(chain) = g.chain(right, wc) {
                    let mut rules = vec![k];
                    rules.extend(chain);
                    options.push(AttachmentOption {
                        kind: AttachmentKind::Fill,
                        new_nodes: chain.len(),
                        target: node.category.clone(),
                        target_stamp: site,
                        word_category: wc.clone(),
                        rules,
                        site_right: Some(right.to_string()),
                        target_id: Some(site),
                    });
                }
            }
        }
        for host in st.right_frontier() {
            let cat = &st.nodes[host].category;
            for (k, right) in g.right_candidates(cat, cat) {
                if let Some(chain) = g.chain(right, wc) {
                    let mut rules = vec![k];
                    rules.extend(chain);
                    options.push(AttachmentOption {
                        kind: AttachmentKind::Adjoin,
                        new_nodes: 1 + chain.len(),
                        target: cat.clone(),
                        target_stamp: host,
                        word_category: wc.clone(),
                        rules,
                        site_right: Some(right.to_string()),
                        target_id: Some(host),
                    });
                }
            }
        }
    }
    options.sort_by(|a, b| {
        (
            a.new_nodes,
            Reverse(a.target_stamp),
            &a.rules,
            &a.word_category,
        )
            .cmp(&(
                b.new_nodes,
                Reverse(b.target_stamp),
                &b.rules,
                &b.word_category,
            ))
    });
    options
}

/// Attaches one word by Minimal Attachment, breaking ties by Late Closure.
pub fn step(st: &ParserState, word: &str, g: &Grammar) -> Result<ParserState, GardenPathError> {
    let best = attachment_options(st, word, g)
        .into_iter()
        .next()
        .ok_or_else(|| GardenPathError::NoAttachment {
            word: word.to_string(),
            position: st.consumed,
        })?;
    let mut next = st.clone();
    next.consumed += 1;
    match best.kind {
        AttachmentKind::Spine => {
            let top = next.build_chain(g, &g.start, &best.rules, word, &best.word_category, None);
            next.root = Some(top);
        }
        AttachmentKind::Fill => {
            let site = best.target_id.expect("fill has a site");
            let right = best.site_right.as_deref().expect("fill has a category");
            let top = next.build_chain(
                g,
                right,
                &best.rules[1..],
                word,
                &best.word_category,
                Some(site),
            );
            next.set_right(site, top);
        }
        AttachmentKind::Adjoin => {
            let host = best.target_id.expect("adjunction has a host");
            let right = best
                .site_right
                .as_deref()
                .expect("adjunction has a category");
            let above = next.nodes[host].parent;
            let category = next.nodes[host].category.clone();
            let m = next.push(
                &category,
                above,
                NodeKind::Branch {
                    left: host,
                    right: None,
                },
            );
            match above {
                Some(p) => {
                    if let NodeKind::Branch { left, right: r } = &mut next.nodes[p].kind {
                        if *left == host {
                            *left = m;
                        } else {
                            *r = Some(m);
                        }
                    }
                }
                None => next.root = Some(m),
            }
            next.nodes[host].parent = Some(m);
            let top = next.build_chain(
                g,
                right,
                &best.rules[1..],
                word,
                &best.word_category,
                Some(m),
            );
            next.set_right(m, top);
        }
    }
    Ok(next)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncrementalParse {
    pub result: Result<ParseTree, GardenPathError>,
    /// Internal nodes postulated after each word that attached.
    pub node_counts: Vec<usize>,
}

/// Folds [`step`] over the words.
pub fn parse_incremental(words: &[&str], g: &Grammar) -> IncrementalParse {
    let mut node_counts = Vec::new();
    if words.is_empty() {
        return IncrementalParse {
            result: Err(GardenPathError::Empty),
            node_counts,
        };
    }
    let mut st = ParserState::new();
    for w in words {
        match step(&st, w, g) {
            Ok(next) => {
                st = next;
                node_counts.push(st.nodes_postulated());
            }
            Err(e) => {
                return IncrementalParse {
                    result: Err(e),
                    node_counts,
                }
            }
        }
    }
    IncrementalParse {
        result: st.tree(g).ok_or(GardenPathError::Incomplete),
        node_counts,
    }
}

/// Every complete parse, sorted by bracketed form. Exponential; refuses
/// inputs longer than `bound`.
pub fn enumerate_parses(
    words: &[&str],
    g: &Grammar,
    bound: usize,
) -> Result<Vec<ParseTree>, GardenPathError> {
    let n = words.len();
    if n > bound {
        return Err(GardenPathError::BoundExceeded { len: n, bound });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    type Cell = BTreeMap<String, Vec<Rc<ParseTree>>>;
    let mut chart: Vec<Vec<Cell>> = vec![vec![Cell::new(); n + 1]; n + 1];
    for (i, w) in words.iter().enumerate() {
        for c in g.categories(w) {
            chart[i][i + 1]
                .entry(c.clone())
                .or_default()
                .push(Rc::new(ParseTree::leaf(c, w)));
        }
    }
    for len in 2..=n {
        for i in 0..=n - len {
            let j = i + len;
            let mut cell = Cell::new();
            #[allow(clippy::needless_range_loop)]
            for k in i + 1..j {
                for r in &g.rules {
                    let (Some(ls), Some(rs)) =
                        (chart[i][k].get(&r.left), chart[k][j].get(&r.right))
                    else {
                        continue;
                    };
                    for l in ls {
                        for rt in rs {
                            cell.entry(r.parent.clone()).or_default().push(Rc::new(
                                ParseTree::branch(&r.parent, (**l).clone(), (**rt).clone()),
                            ));
                        }
                    }
                }
            }
            chart[i][j] = cell;
        }
    }
    let mut out: Vec<ParseTree> = chart[0][n]
        .get(&g.start)
        .map(|ts| ts.iter().map(|t| (**t).clone()).collect())
        .unwrap_or_default();
    out.sort_by_key(ParseTree::bracketed);
    out.dedup();
    Ok(out)
}

/// True when the incremental parse dead-ends although a global parse exists.
pub fn is_garden_path(words: &[&str], g: &Grammar, bound: usize) -> Result<bool, GardenPathError> {
    let parses = enumerate_parses(words, g, bound)?;
    Ok(parse_incremental(words, g).result.is_err() && !parses.is_empty())
}
