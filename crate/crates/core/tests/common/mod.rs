#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use emg::derivation::{Choice, Derivation, EmptyBudget, Poll};
use emg::grammar::{load_grammar, Grammar};
use emg::output::to_dependencies;
use emg::parsing::{parse, ParseConfig};

pub fn data_path(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect()
}

pub fn grammar_file(name: &str) -> Grammar {
    load_grammar(&std::fs::read_to_string(data_path(name)).unwrap()).unwrap()
}

pub fn grammar(text: &str) -> Grammar {
    load_grammar(text).unwrap()
}

pub const PRO_DROP: &str = "@start C\n@agr T {per, num}\n_ :: C +D =T\n\
                            ha :: T {per.3, num.s} +D =V\ncantato :: V =D\n\
                            Maria :: D {per.3, num.s}\n_ :: D {per.3, num.s}\n";

pub const TWO_SITES: &str = "@start S\nl1 :: S =L =X\nl2 :: L =X\nx :: X\n_ :: X\n";

/// A root with nested selection, homophones and an optional empty adjunct.
pub const NESTED: &str = "@start C\n_ :: C +D =T\nt :: T +D =V\nv :: V =D\nv :: V =D =Adv\n\
                          d :: D\nd :: D =N\nn :: N\n_ :: Adv\nadv :: Adv\n";

/// The toy grammars of the suite: name, source.
pub fn toy_grammars() -> Vec<(&'static str, Grammar)> {
    vec![
        ("dn", grammar_file("dn.emg")),
        ("dp", grammar_file("dp.emg")),
        ("raising", grammar_file("raising.emg")),
        ("clauses", grammar_file("clauses.emg")),
        ("pro_drop", grammar(PRO_DROP)),
        ("two_sites", grammar(TWO_SITES)),
        ("nested", grammar(NESTED)),
    ]
}

pub fn analyses(g: &Grammar, tokens: &[&str], cfg: &ParseConfig) -> BTreeSet<String> {
    parse(g, tokens, cfg)
        .unwrap()
        .analyses
        .iter()
        .map(|a| a.graph.to_tsv())
        .collect()
}

pub fn accepts(g: &Grammar, sentence: &str) -> bool {
    let tokens: Vec<&str> = sentence.split_whitespace().collect();
    parse(g, &tokens, &ParseConfig::default()).unwrap().accepted()
}

/// Every string of length 1..=n over the grammar's vocabulary that the
/// parser accepts.
///
/// Strings are grown one word at a time, and a prefix is extended only if
/// some state of its own parse consumed all of it. The parser's choices
/// before the last word of a prefix depend only on the words seen so far,
/// so an extension of a prefix that no state covers has no analysis either.
pub fn accepted_strings(g: &Grammar, n: usize) -> BTreeSet<Vec<String>> {
    let vocab: Vec<String> = g.vocabulary().into_iter().map(str::to_string).collect();
    let mut accepted = BTreeSet::new();
    let mut layer: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for prefix in &layer {
            for w in &vocab {
                let mut s = prefix.clone();
                s.push(w.clone());
                let tokens: Vec<&str> = s.iter().map(String::as_str).collect();
                let f = parse(g, &tokens, &ParseConfig::default()).unwrap();
                if f.accepted() {
                    accepted.insert(s.clone());
                }
                if f.furthest == s.len() {
                    next.push(s);
                }
            }
        }
        layer = next;
    }
    accepted
}

/// Every string over the grammar's vocabulary of length 1..=n.
pub fn all_strings(g: &Grammar, n: usize) -> Vec<Vec<String>> {
    let vocab: Vec<String> = g.vocabulary().into_iter().map(str::to_string).collect();
    let mut out: Vec<Vec<String>> = Vec::new();
    let mut layer: Vec<Vec<String>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for s in &layer {
            for w in &vocab {
                let mut t = s.clone();
                t.push(w.clone());
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Brute-force oracle: tries every sequence of homophones of the tokens,
/// empty items anywhere the budget allows, and up to `max_suspends`
/// suspensions. Sequences are extended one choice at a time and dropped
/// once the derivation has failed.
pub fn brute_force(
    g: &Grammar,
    tokens: &[&str],
    budget: EmptyBudget,
    max_suspends: usize,
) -> BTreeSet<String> {
    let mut found = BTreeSet::new();
    for root in g.start_items() {
        let item = g.item(root);
        if let Some(p) = &item.phon {
            if tokens.first() != Some(&p.as_str()) {
                continue;
            }
        }
        let d = Derivation::start(g, root);
        extend(g, tokens, budget, max_suspends, d, &mut found);
    }
    found
}

fn extend(
    g: &Grammar,
    tokens: &[&str],
    budget: EmptyBudget,
    suspends_left: usize,
    d: Derivation,
    found: &mut BTreeSet<String>,
) {
    let pos = d.words_consumed();
    if pos == tokens.len() {
        let mut done = d.clone();
        if done.finish(g) == Poll::Complete && done.is_success() {
            found.insert(to_dependencies(&done).to_tsv());
        }
    }
    let mut options: Vec<Choice> = Vec::new();
    if let Some(tok) = tokens.get(pos) {
        options.extend(g.lookup_ids(tok).iter().map(|&id| Choice::Item(id)));
    }
    if budget.allows(&d) {
        options.extend(g.empty_items().iter().map(|&id| Choice::Item(id)));
    }
    if suspends_left > 0 {
        options.push(Choice::Suspend);
    }
    for c in options {
        let mut next = d.clone();
        if next.apply(g, c).is_ok() {
            let left = suspends_left - usize::from(c == Choice::Suspend);
            extend(g, tokens, budget, left, next, found);
        }
    }
}
