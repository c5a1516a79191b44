//! Search over derivations of an input sentence.
//!
//! The choice tree branches on (i) homophones of the next token, (ii) empty
//! items postulated at the pending expectation, (iii) attachment variants,
//! which are empty postulations made even though the token could merge
//! directly, and (iv) suspensions of the pending expectation. Branches are
//! explored depth-first in that order; the beam strategy instead advances a
//! ranked frontier one overt word at a time.

use std::collections::BTreeSet;

use crate::derivation::{derive, Choice, Derivation, EmptyBudget, FailReason, Poll};
use crate::error::ParseError;
use crate::grammar::{Category, ExpectFeature, Grammar, ItemId, LexicalItem};
use crate::output::{to_dependencies, DependencyGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Exhaustive,
    Beam(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParseConfig {
    pub strategy: Strategy,
    /// Try only homophones whose label refines the pending expectation.
    pub priming: bool,
    pub empties: EmptyBudget,
    /// Postulate empty items at every expectation, not only where the next
    /// token could still attach afterwards.
    pub eager_empties: bool,
    /// Safety cap on explored states.
    pub max_branches: usize,
}

impl Default for ParseConfig {
    fn default() -> Self {
        ParseConfig {
            strategy: Strategy::Exhaustive,
            priming: true,
            empties: EmptyBudget::default(),
            eager_empties: false,
            max_branches: 1_000_000,
        }
    }
}

/// Scores a candidate item against the expectation it would satisfy. Higher
/// is better; beam search keeps the best cumulative scores.
pub trait RankingOracle {
    fn score(&self, item: &LexicalItem, expectation: &ExpectFeature) -> f64;
}

/// Every candidate scores the same, so the beam keeps depth-first order.
#[derive(Clone, Copy, Debug, Default)]
pub struct Uniform;

impl RankingOracle for Uniform {
    fn score(&self, _: &LexicalItem, _: &ExpectFeature) -> f64 {
        0.0
    }
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub derivation: Derivation,
    pub graph: DependencyGraph,
}

#[derive(Clone, Debug, Default)]
pub struct ParseForest {
    pub analyses: Vec<Analysis>,
    /// Candidate states created, start states included.
    pub explored: usize,
    /// Candidate states that died.
    pub abandoned: usize,
    /// Most input words consumed by any explored state.
    pub furthest: usize,
    /// The failed branch that got furthest, for diagnostics.
    pub best_failure: Option<Derivation>,
    pub notes: Vec<String>,
}

impl ParseForest {
    pub fn accepted(&self) -> bool {
        !self.analyses.is_empty()
    }
}

/// With priming on, keeps the candidates whose label refines the expected
/// category; with priming off, returns them all.
pub fn prime_filter<'a>(
    candidates: &[&'a LexicalItem],
    expectation: &ExpectFeature,
    priming: bool,
) -> Vec<&'a LexicalItem> {
    candidates
        .iter()
        .copied()
        .filter(|c| !priming || expectation.accepts(c.label()))
        .collect()
}

/// Splits a sentence on whitespace.
pub fn tokenize(sentence: &str) -> Vec<&str> {
    sentence.split_whitespace().collect()
}

pub fn parse(g: &Grammar, tokens: &[&str], cfg: &ParseConfig) -> Result<ParseForest, ParseError> {
    parse_with_oracle(g, tokens, cfg, &Uniform)
}

pub fn parse_with_oracle(
    g: &Grammar,
    tokens: &[&str],
    cfg: &ParseConfig,
    oracle: &dyn RankingOracle,
) -> Result<ParseForest, ParseError> {
    if let Strategy::Beam(0) = cfg.strategy {
        panic!("beam width must be at least 1");
    }
    let mut s = Search {
        g,
        tokens,
        cfg,
        forest: ParseForest::default(),
        found: Vec::new(),
    };
    let roots = s.roots();
    match cfg.strategy {
        Strategy::Exhaustive => {
            for d in roots {
                s.dfs(d)?;
            }
        }
        Strategy::Beam(k) => s.beam(roots, k, oracle)?,
    }
    s.assemble()
}

struct Search<'a> {
    g: &'a Grammar,
    tokens: &'a [&'a str],
    cfg: &'a ParseConfig,
    forest: ParseForest,
    found: Vec<Derivation>,
}

/// Where a settled state stands.
enum Stage {
    Dead,
    Done,
    Open(ExpectFeature),
}

impl<'a> Search<'a> {
    fn count(&mut self, d: &Derivation) -> Result<(), ParseError> {
        self.forest.explored += 1;
        self.forest.furthest = self.forest.furthest.max(d.words_consumed());
        if self.forest.explored > self.cfg.max_branches {
            return Err(ParseError::BranchLimit {
                explored: self.forest.explored,
                limit: self.cfg.max_branches,
            });
        }
        Ok(())
    }

    fn abandon(&mut self, d: Derivation) {
        self.forest.abandoned += 1;
        let better = match &self.forest.best_failure {
            None => true,
            Some(b) => {
                (d.words_consumed(), d.steps().len()) > (b.words_consumed(), b.steps().len())
            }
        };
        if better {
            self.forest.best_failure = Some(d);
        }
    }

    /// Start states: every start-compatible item; an overt root must match
    /// the first token.
    fn roots(&mut self) -> Vec<Derivation> {
        let mut out = Vec::new();
        for id in self.g.start_items() {
            let item = self.g.item(id);
            let fits = match &item.phon {
                None => true,
                Some(p) => self.tokens.first() == Some(&p.as_str()),
            };
            if fits {
                out.push(Derivation::start(self.g, id));
            }
        }
        out
    }

    fn settle(&mut self, d: &mut Derivation) -> Stage {
        match d.settle(self.g) {
            Poll::Failed => Stage::Dead,
            Poll::NeedsInput(p) => Stage::Open(p),
            Poll::Complete => {
                let left = self.tokens.len() - d.words_consumed();
                if left > 0 {
                    d.reject(FailReason::LeftoverInput { remaining: left });
                    return Stage::Dead;
                }
                d.finish(self.g);
                if d.is_success() {
                    Stage::Done
                } else {
                    Stage::Dead
                }
            }
        }
    }

    /// Child states of an open state, in branching order. Each child has
    /// already merged its choice; `false` marks an attempt that failed.
    fn children(&mut self, d: &Derivation, pending: &ExpectFeature) -> Vec<(Derivation, bool)> {
        let g = self.g;
        let mut out = Vec::new();
        let pos = d.words_consumed();
        let try_item = |id: ItemId, out: &mut Vec<(Derivation, bool)>| {
            let mut next = d.clone();
            let ok = next.merge_input(g, id).is_ok();
            out.push((next, ok));
        };

        if let Some(tok) = self.tokens.get(pos) {
            for &id in g.lookup_ids(tok) {
                if !self.cfg.priming || pending.accepts(g.item(id).label()) {
                    try_item(id, &mut out);
                }
            }
        }

        if self.cfg.empties.allows(d) {
            for id in g.lookup_empty(&pending.category) {
                if self.cfg.eager_empties || self.empty_can_help(d, id) {
                    try_item(id, &mut out);
                }
            }
        }

        if d.can_suspend(g) {
            let mut next = d.clone();
            let ok = next.suspend(g);
            out.push((next, ok));
        } else if d.suspension_too_deep(g) {
            let note = "a resumed expectation cannot be suspended again".to_string();
            if !self.forest.notes.contains(&note) {
                self.forest.notes.push(note);
            }
        }
        out
    }

    /// Postulating an empty item is useful only if the input is exhausted or
    /// the next token could merge at some expectation that will still be open
    /// afterwards: one of the empty item's own, or one already pending or
    /// suspended on a node of the derivation.
    fn empty_can_help(&self, d: &Derivation, empty: ItemId) -> bool {
        let Some(tok) = self.tokens.get(d.words_consumed()) else {
            return true;
        };
        let mut sites: BTreeSet<&Category> = self
            .g
            .item(empty)
            .expect
            .iter()
            .map(|f| &f.category)
            .collect();
        for (_, n) in d.tree().arena.iter() {
            sites.extend(n.remaining_expect.iter().map(|f| &f.category));
            sites.extend(n.suspended.iter().map(|f| &f.category));
        }
        self.g
            .lookup(tok)
            .iter()
            .any(|item| sites.iter().any(|c| item.label().refines(c)))
    }

    fn dfs(&mut self, mut d: Derivation) -> Result<(), ParseError> {
        self.count(&d)?;
        match self.settle(&mut d) {
            Stage::Dead => self.abandon(d),
            Stage::Done => self.found.push(d),
            Stage::Open(pending) => {
                let kids = self.children(&d, &pending);
                if kids.is_empty() {
                    let token = self
                        .tokens
                        .get(d.words_consumed())
                        .map_or("<end of input>".to_string(), |t| t.to_string());
                    let mut dead = d;
                    dead.reject(FailReason::NoCandidate { token });
                    self.abandon(dead);
                }
                for (child, ok) in kids {
                    if ok {
                        self.dfs(child)?;
                    } else {
                        self.count(&child)?;
                        self.abandon(child);
                    }
                }
            }
        }
        Ok(())
    }

    /// Layered beam: from each frontier state, close over empty items and
    /// suspensions until one more overt word has been merged, then keep the
    /// `k` best-scoring states.
    fn beam(
        &mut self,
        roots: Vec<Derivation>,
        k: usize,
        oracle: &dyn RankingOracle,
    ) -> Result<(), ParseError> {
        let mut frontier: Vec<(Derivation, f64)> = roots.into_iter().map(|d| (d, 0.0)).collect();
        while !frontier.is_empty() {
            let mut next: Vec<(Derivation, f64)> = Vec::new();
            for (d, score) in frontier {
                self.advance(d, score, oracle, &mut next)?;
            }
            // stable sort keeps depth-first order among equal scores
            next.sort_by(|a, b| b.1.total_cmp(&a.1));
            next.truncate(k);
            frontier = next;
        }
        Ok(())
    }

    fn advance(
        &mut self,
        mut d: Derivation,
        score: f64,
        oracle: &dyn RankingOracle,
        out: &mut Vec<(Derivation, f64)>,
    ) -> Result<(), ParseError> {
        self.count(&d)?;
        let start = d.words_consumed();
        let pending = match self.settle(&mut d) {
            Stage::Dead => {
                self.abandon(d);
                return Ok(());
            }
            Stage::Done => {
                self.found.push(d);
                return Ok(());
            }
            Stage::Open(p) => p,
        };
        for (child, ok) in self.children(&d, &pending) {
            if !ok {
                self.count(&child)?;
                self.abandon(child);
                continue;
            }
            let s = score + last_score(self.g, &child, &pending, oracle);
            if child.words_consumed() > start {
                out.push((child, s));
            } else {
                self.advance(child, s, oracle, out)?;
            }
        }
        Ok(())
    }

    /// Deduplicates by dependency graph, sorts canonically and replays every
    /// analysis from its recorded choices.
    fn assemble(mut self) -> Result<ParseForest, ParseError> {
        let mut keyed: Vec<(String, Analysis)> = Vec::new();
        for d in std::mem::take(&mut self.found) {
            let replay = derive(self.g, d.root_item(), d.choices());
            if !replay.is_success() || replay.tree().signature() != d.tree().signature() {
                return Err(ParseError::ReplayMismatch(format!(
                    "choices {:?} do not reproduce the analysis",
                    d.choices()
                )));
            }
            let graph = to_dependencies(&d);
            keyed.push((graph.to_tsv(), Analysis { derivation: d, graph }));
        }
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        keyed.dedup_by(|a, b| a.0 == b.0);
        self.forest.analyses = keyed.into_iter().map(|(_, a)| a).collect();
        Ok(self.forest)
    }
}

fn last_score(
    g: &Grammar,
    d: &Derivation,
    pending: &ExpectFeature,
    oracle: &dyn RankingOracle,
) -> f64 {
    match d.choices().last() {
        Some(Choice::Item(id)) => oracle.score(g.item(*id), pending),
        _ => 0.0,
    }
}
