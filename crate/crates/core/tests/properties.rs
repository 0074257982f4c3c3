use std::collections::BTreeSet;

use proptest::prelude::*;

use pmodel::corpus::Corpus;
use pmodel::formal_lang::{
    evaluate, parse_formula, render_formula, to_sheffer, Assignment, Connective, Formula, Model,
    Probability, Term,
};
use pmodel::frep::{
    canonicalize, scope_readings, BindingConstraints, FRepresentation, Force, FrepDocument,
    LexicalReferent,
};
use pmodel::gardenpath::{step, ParserState};
use pmodel::lexicon_cohort::{access, recognize, select, Threshold};
use pmodel::movement::{
    apply_emphasis, quantifier_lower, quantifier_raise, wh_lower, wh_raise, word_multiset,
    MovementConfig,
};
use pmodel::pipeline::{compare, derive_p};
use pmodel::syntax_rep::{parse_sstring, Item, Label, Level, Punctuation, SString, TraceKind};
use pmodel::Category;

fn corpus() -> Corpus {
    Corpus::open(concat!(env!("CARGO_MANIFEST_DIR"), "/corpus"))
}

// formulas ------------------------------------------------------------------

fn term() -> impl Strategy<Value = Term> {
    prop_oneof![
        prop::sample::select(vec!["x", "y", "z"]).prop_map(Term::var),
        prop::sample::select(vec!["J", "M"]).prop_map(Term::constant),
    ]
}

fn leaf() -> impl Strategy<Value = Formula> {
    prop_oneof![
        prop::sample::select(vec!["p", "q", "r"]).prop_map(Formula::atom),
        (term(), prop::sample::select(vec!["H", "T"])).prop_map(|(t, p)| Formula::member(t, p)),
        (term(), prop::sample::select(vec!["S", "G"]), term())
            .prop_map(|(a, r, b)| Formula::relation(a, r, b)),
        (
            prop::sample::select(vec!["snow", "rain"]),
            1u64..10,
            0u64..10
        )
            .prop_map(|(e, d, n)| { Formula::prob(e, Probability::new(n.min(d), d).unwrap()) }),
    ]
}

/// Any formula, to depth 5.
fn formula() -> impl Strategy<Value = Formula> {
    leaf().prop_recursive(5, 64, 3, |inner| {
        let var = prop::sample::select(vec!["x", "y", "z"]);
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (
                prop::sample::select(Connective::ALL.to_vec()),
                inner.clone(),
                inner.clone()
            )
                .prop_map(|(c, l, r)| Formula::binary(c, l, r)),
            (var.clone(), inner.clone()).prop_map(|(v, b)| Formula::forall(v, b)),
            (var.clone(), inner.clone()).prop_map(|(v, b)| Formula::exists(v, b)),
            (var, inner.clone(), inner).prop_map(|(v, r, b)| Formula::wh(v, r, b)),
        ]
    })
}

/// Connective formulas over p, q, r to depth 4.
fn connective_formula() -> impl Strategy<Value = Formula> {
    let atom = prop::sample::select(vec!["p", "q", "r"]).prop_map(Formula::atom);
    atom.prop_recursive(3, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (
                prop::sample::select(vec![
                    Connective::And,
                    Connective::Or,
                    Connective::Implies,
                    Connective::Sheffer
                ]),
                inner.clone(),
                inner
            )
                .prop_map(|(c, l, r)| Formula::binary(c, l, r)),
        ]
    })
}

fn propositional_models() -> Vec<Model> {
    (0..8u8)
        .map(|row| {
            Model::new(["e"])
                .with_proposition("p", row & 4 != 0)
                .with_proposition("q", row & 2 != 0)
                .with_proposition("r", row & 1 != 0)
        })
        .collect()
}

/// Every model over a domain of `n` entities interpreting H, T, S and J.
fn small_models(n: usize) -> Vec<Model> {
    let dom: Vec<String> = (0..n).map(|k| format!("e{k}")).collect();
    let mut out = Vec::new();
    for h in 0u32..1 << n {
        for t in 0u32..1 << n {
            for s in 0u32..1 << (n * n) {
                let pick = |mask: u32| -> Vec<String> {
                    (0..n)
                        .filter(|k| mask >> k & 1 == 1)
                        .map(|k| dom[k].clone())
                        .collect()
                };
                let pairs: Vec<(String, String)> = (0..n * n)
                    .filter(|k| s >> k & 1 == 1)
                    .map(|k| (dom[k / n].clone(), dom[k % n].clone()))
                    .collect();
                out.push(
                    Model::new(dom.clone())
                        .with_predicate("H", pick(h))
                        .with_predicate("T", pick(t))
                        .with_relation("S", pairs)
                        .with_constant("J", &dom[0]),
                );
            }
        }
    }
    out
}

/// Closed formulas with a quantifier prefix over H/T-restricted variables.
fn quantified_formula() -> impl Strategy<Value = Formula> {
    let q = prop::bool::ANY;
    let sort = prop::sample::select(vec!["H", "T"]);
    let vars = prop::sample::subsequence(vec!["x", "y", "z"], 1..=3).prop_shuffle();
    let matrix_atom = prop::sample::select(vec![0usize, 1, 2]);
    (
        vars,
        prop::collection::vec((q, sort), 3),
        prop::collection::vec((matrix_atom.clone(), matrix_atom), 1..3),
    )
        .prop_map(|(vars, quants, rels)| {
            let var = |k: usize| Term::var(vars[k % vars.len()]);
            let mut matrix: Option<Formula> = None;
            for (a, b) in rels {
                let r = Formula::relation(var(a), "S", var(b));
                matrix = Some(match matrix {
                    None => r,
                    Some(m) => Formula::and(m, r),
                });
            }
            let mut f = matrix.unwrap();
            for (k, v) in vars.iter().enumerate().rev() {
                let (universal, sort) = quants[k];
                let restrictor = Formula::member(Term::var(v), sort);
                f = if universal {
                    Formula::forall(v, Formula::implies(restrictor, f))
                } else {
                    Formula::exists(v, Formula::and(restrictor, f))
                };
            }
            f
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn formula_render_round_trips(f in formula()) {
        let text = render_formula(&f);
        prop_assert_eq!(parse_formula(&text).unwrap(), f, "{}", text);
    }

    #[test]
    fn sheffer_rewrite_is_sound(f in connective_formula()) {
        let s = to_sheffer(&f).unwrap();
        for m in propositional_models() {
            let a = Assignment::new();
            prop_assert_eq!(evaluate(&s, &m, &a), evaluate(&f, &m, &a));
        }
    }

    #[test]
    fn tautology_padding(f in connective_formula(), g in connective_formula()) {
        let tautology = Formula::implies(g.clone(), g);
        let padded = Formula::and(f.clone(), tautology);
        for m in propositional_models() {
            let a = Assignment::new();
            prop_assert_eq!(evaluate(&padded, &m, &a), evaluate(&f, &m, &a));
        }
    }

    #[test]
    fn scope_readings_are_distinct_and_bounded(f in quantified_formula()) {
        let readings = scope_readings(&f, None).unwrap();
        let n = pmodel::frep::binders(&f).0.len();
        let factorial: usize = (1..=n).product();
        prop_assert!(!readings.is_empty() && readings.len() <= factorial);
        let distinct: BTreeSet<String> = readings.iter().map(render_formula).collect();
        prop_assert_eq!(distinct.len(), readings.len());
    }

    #[test]
    fn canonicalize_is_idempotent_and_sound(f in quantified_formula()) {
        let c = canonicalize(&f).unwrap();
        prop_assert_eq!(canonicalize(&c).unwrap(), c.clone());
        let a = Assignment::new();
        for n in 1..=2 {
            for m in small_models(n) {
                prop_assert_eq!(evaluate(&c, &m, &a), evaluate(&f, &m, &a));
            }
        }
    }
}

#[test]
fn evaluate_is_total_on_closed_formulas_to_domain_three() {
    let a = Assignment::new();
    let models = small_models(3);
    let mut runner = proptest::test_runner::TestRunner::new(ProptestConfig::with_cases(16));
    runner
        .run(&quantified_formula(), |f| {
            for m in models.iter().step_by(37) {
                prop_assert!(evaluate(&f, m, &a).is_ok());
            }
            Ok(())
        })
        .unwrap();
}

// frep ------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
enum Corruption {
    DuplicateWord,
    DuplicateSymbol,
    DropReferent,
    DanglingExternal,
    UnknownEmphasis,
    UnknownScopeVariable,
    RepeatedScopeVariable,
    ProbabilityInPredicate,
    FreeVariable,
}

fn corrupt(mut doc: FrepDocument, c: Corruption, k: usize) -> Option<FrepDocument> {
    let n = doc.lexical.len();
    match c {
        Corruption::DuplicateWord if n >= 2 => {
            let w = doc.lexical[k % n].word.clone();
            let j = (k + 1) % n;
            doc.lexical[j].word = w;
        }
        Corruption::DuplicateSymbol if n >= 2 => {
            let s = doc.lexical[k % n].symbol.clone();
            let j = (k + 1) % n;
            doc.lexical[j].symbol = s;
        }
        Corruption::DropReferent => {
            let f = parse_formula(&doc.string).ok()?;
            let used = pmodel::formal_lang::symbols(&f);
            let pos: Vec<usize> = (0..n)
                .filter(|&j| used.contains(&doc.lexical[j].symbol))
                .collect();
            if pos.is_empty() {
                return None;
            }
            doc.lexical.remove(pos[k % pos.len()]);
        }
        Corruption::DanglingExternal => {
            doc.external.insert("Zed".into(), 99);
        }
        Corruption::UnknownEmphasis => doc.force.emphasis = Some("NoSuchSymbol".into()),
        Corruption::UnknownScopeVariable => {
            doc.declarants.scope_order = Some(vec!["w".into()]);
        }
        Corruption::RepeatedScopeVariable => {
            let f = parse_formula(&doc.string).ok()?;
            let var = pmodel::frep::binder_vars(&f).into_iter().next()?;
            doc.declarants.scope_order = Some(vec![var.clone(), var]);
        }
        Corruption::ProbabilityInPredicate => {
            doc.string = format!("({} & prob(snow) = 1/2)", doc.string);
        }
        Corruption::FreeVariable => {
            let rel = doc
                .lexical
                .iter()
                .find(|r| r.category == Category::V)?
                .symbol
                .clone();
            doc.string = format!("({} & w {rel} w)", doc.string);
        }
        _ => return None,
    }
    Some(doc)
}

fn corruption() -> impl Strategy<Value = Corruption> {
    prop::sample::select(vec![
        Corruption::DuplicateWord,
        Corruption::DuplicateSymbol,
        Corruption::DropReferent,
        Corruption::DanglingExternal,
        Corruption::UnknownEmphasis,
        Corruption::UnknownScopeVariable,
        Corruption::RepeatedScopeVariable,
        Corruption::ProbabilityInPredicate,
        Corruption::FreeVariable,
    ])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn single_field_corruptions_are_rejected(pick in 0usize..64, c in corruption(), k in 0usize..8) {
        let freps = corpus().freps().unwrap();
        let (_, f) = &freps[pick % freps.len()];
        let doc = f.to_document();
        prop_assert!(doc.clone().into_frep().is_ok());
        if let Some(bad) = corrupt(doc, c, k) {
            prop_assert!(bad.into_frep().is_err(), "{:?} accepted", c);
        }
    }
}

// syntax_rep ------------------------------------------------------------------

fn word() -> impl Strategy<Value = String> {
    "[A-Za-z][a-z]{0,5}"
}

/// Valid strings: words, coindexed phrase/trace pairs, balanced brackets.
fn sstring() -> impl Strategy<Value = SString> {
    (
        prop::sample::select(vec![Level::DS, Level::SS, Level::LF]),
        prop::collection::vec(word(), 0..6),
        prop::collection::vec(
            // phrases longer than a trace glyph, so `t_1` stays a trace
            (
                "[A-Za-z][a-z]{1,5}",
                prop::sample::select(vec![TraceKind::T, TraceKind::X, TraceKind::Y]),
                any::<prop::sample::Index>(),
                any::<prop::sample::Index>(),
            ),
            0..3,
        ),
        prop::collection::vec(
            (
                prop::sample::select(vec![None, Some(Label::CP), Some(Label::IP)]),
                any::<prop::sample::Index>(),
                any::<prop::sample::Index>(),
            ),
            0..3,
        ),
        prop::bool::ANY,
    )
        .prop_map(|(level, words, chains, brackets, question)| {
            let mut items: Vec<Item> = words.iter().map(|w| Item::word(w)).collect();
            for (k, (w, kind, a, b)) in chains.into_iter().enumerate() {
                let index = k as u32 + 1;
                items.insert(a.index(items.len() + 1), Item::indexed(&w, index));
                items.insert(b.index(items.len() + 1), Item::trace(kind, index));
            }
            for (label, a, b) in brackets {
                let open = a.index(items.len() + 1);
                items.insert(open, Item::open(label));
                let close = open + 1 + b.index(items.len() - open);
                items.insert(close, Item::Close);
            }
            let punct = if question {
                Punctuation::Question
            } else {
                Punctuation::None
            };
            SString::new(level, items, punct).expect("generator keeps the invariants")
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn sstring_render_round_trips(s in sstring()) {
        let text = s.render();
        prop_assert_eq!(parse_sstring(s.level(), &text).unwrap(), s, "{}", text);
    }

    #[test]
    fn strip_keeps_only_words(s in sstring()) {
        let audible: Vec<String> = s.items().iter().filter_map(Item::text).map(str::to_lowercase).collect();
        let stripped = s.strip();
        let heard: Vec<String> = stripped
            .trim_end_matches('?')
            .split_whitespace()
            .map(str::to_lowercase)
            .collect();
        prop_assert_eq!(heard, audible);
        prop_assert!(!stripped.contains(['_', '[', ']']));
    }

    #[test]
    fn coindexation_is_a_perfect_matching(s in sstring()) {
        for (i, (phrase, trace)) in s.coindex() {
            prop_assert_eq!(s.items()[*phrase].index(), Some(*i));
            prop_assert!(s.items()[*trace].is_trace());
        }
        if let Some(pos) = s.items().iter().position(Item::is_trace) {
            let mut items = s.items().to_vec();
            items.remove(pos);
            prop_assert!(SString::new(s.level(), items, s.punctuation()).is_err());
        }
    }
}

// movement ------------------------------------------------------------------

const VOCABULARY: [&str; 12] = [
    "Jones", "Mary", "saw", "see", "left", "did", "everyone", "someone", "who", "what", "the",
    "man",
];

fn plain_words() -> impl Strategy<Value = Vec<&'static str>> {
    prop::collection::vec(prop::sample::select(VOCABULARY.to_vec()), 1..7)
}

fn traces(s: &SString) -> usize {
    s.items().iter().filter(|i| i.is_trace()).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn movement_preserves_words_and_traces(words in plain_words(), question in prop::bool::ANY) {
        let cfg = MovementConfig::default();
        let punct = if question { Punctuation::Question } else { Punctuation::None };
        let ss = SString::from_words(Level::SS, &words, punct).unwrap();
        let before = word_multiset(&ss);
        for (pos, _) in words.iter().enumerate().filter(|(_, w)| cfg.is_quantifier(w)) {
            let m = quantifier_raise(&ss, pos, &cfg).unwrap();
            prop_assert_eq!(word_multiset(&m.string), before.clone());
            prop_assert_eq!(traces(&m.string), traces(&ss) + 1);
            // no record when the landing site has the same position number
            prop_assert_eq!(m.records.len(), usize::from(pos != 1));
            prop_assert!(m.records.iter().all(|r| r.source != r.target));
            let l = quantifier_lower(&m.string, &cfg).unwrap();
            prop_assert_eq!(word_multiset(&l.string), before.clone());
            prop_assert_eq!(traces(&l.string), traces(&m.string));
        }
        if let Ok(m) = wh_raise(&ss, &cfg) {
            prop_assert_eq!(word_multiset(&m.string), before.clone());
            prop_assert_eq!(traces(&m.string), traces(&ss));
            if let Ok(l) = wh_lower(&m.string, &cfg) {
                prop_assert_eq!(word_multiset(&l.string), before.clone());
            }
        }
    }

    #[test]
    fn emphasis_respects_binding(
        words in plain_words(),
        question in prop::bool::ANY,
        bound in prop::collection::vec(any::<prop::sample::Index>(), 0..3),
        emphasis in prop::option::of(any::<prop::sample::Index>()),
    ) {
        let cfg = MovementConfig::default();
        let ds = SString::from_words(Level::DS, &words, Punctuation::None).unwrap();
        let bc = BindingConstraints(
            bound.iter().map(|i| (words[i.index(words.len())].to_string(), 1)).collect(),
        );
        let mut force = if question { Force::interrogative() } else { Force::declarative() };
        if let Some(e) = emphasis {
            force = force.emphasizing(words[e.index(words.len())]);
        }
        let occurrences = |w: &str| words.iter().filter(|x| x.eq_ignore_ascii_case(w)).count();
        match apply_emphasis(&ds, &force, &bc, &cfg) {
            Ok(m) => {
                prop_assert_eq!(word_multiset(&m.string), word_multiset(&ds));
                for w in bc.words() {
                    prop_assert_eq!(occurrences(w), 1);
                }
            }
            Err(pmodel::movement::MovementError::BindingViolation(w)) => {
                prop_assert_ne!(occurrences(&w), 1);
            }
            Err(_) => {}
        }
    }
}

// lexicon -------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn exact_match_iff_member(observed in "[a-zA-Z#]{0,9}", prefix_len in 0usize..4) {
        let lex = corpus().lexicon().unwrap();
        let prefix: String = observed.chars().take(prefix_len).collect();
        let cohort = access(&lex, &prefix);
        let ranked = select(&cohort, &observed);
        let member = cohort.members.iter().any(|e| e.form.eq_ignore_ascii_case(&observed));
        prop_assert_eq!(ranked.first().is_some_and(|r| r.distance == 0), member);
        prop_assert_eq!(select(&cohort, &observed), ranked);
    }

    #[test]
    fn longer_prefix_narrows_cohort(a in "[a-zA-Z]{0,4}", b in "[a-z]{0,3}") {
        let lex = corpus().lexicon().unwrap();
        let short = access(&lex, &a);
        let long = access(&lex, &format!("{a}{b}"));
        prop_assert!(long.members.iter().all(|e| short.members.contains(e)));
    }

    #[test]
    fn recognition_is_deterministic(tokens in prop::collection::vec("[a-z#]{1,7}", 1..5)) {
        let lex = corpus().lexicon().unwrap();
        let t: Vec<&str> = tokens.iter().map(String::as_str).collect();
        prop_assert_eq!(
            recognize(&lex, &t, None, Threshold::HalfForm),
            recognize(&lex, &t, None, Threshold::HalfForm)
        );
    }
}

// gardenpath ----------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn step_is_deterministic(picks in prop::collection::vec(any::<prop::sample::Index>(), 1..8)) {
        let g = corpus().grammar().unwrap();
        let words: Vec<&str> = g.words().collect();
        let mut st = ParserState::new();
        for p in picks {
            let w = words[p.index(words.len())];
            let a = step(&st, w, &g);
            prop_assert_eq!(&a, &step(&st, w, &g));
            match a {
                Ok(next) => st = next,
                Err(_) => break,
            }
        }
    }
}

// pipeline ------------------------------------------------------------------

#[test]
fn pipeline_runs_are_deterministic_and_well_leveled() {
    let c = corpus();
    let mut all: Vec<(String, FRepresentation)> = c.freps().unwrap();
    all.extend(c.scope_freps().unwrap());
    for (name, f) in &all {
        if let Ok(d) = derive_p(f) {
            assert!(d.levels_match(), "{name}");
            assert_eq!(derive_p(f).unwrap(), d, "{name}");
        }
        let r = compare(f);
        if let Some(t) = &r.t {
            assert!(t.levels_match(), "{name}");
        }
        assert_eq!(compare(f), r, "{name}");
    }
}

#[test]
fn lexical_map_is_injective_in_corpus() {
    for (name, f) in corpus().freps().unwrap() {
        let refs: &[LexicalReferent] = f.lexical();
        let symbols: BTreeSet<&str> = refs.iter().map(|r| r.symbol.as_str()).collect();
        let words: BTreeSet<&str> = refs.iter().map(|r| r.word.as_str()).collect();
        assert_eq!(symbols.len(), refs.len(), "{name}");
        assert_eq!(words.len(), refs.len(), "{name}");
    }
}
