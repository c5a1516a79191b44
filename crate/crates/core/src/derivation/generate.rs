use crate::error::ParseError;
use crate::grammar::Grammar;

use super::{linearize, Derivation, Poll};

/// Bound on phonetically empty items in one derivation. Parsing uses the same
/// bound, so generation and exhaustive parsing enumerate the same space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EmptyBudget {
    /// Total empty items, the root excluded.
    pub max_total: usize,
    /// Whether two empty items may be merged with no overt word between them.
    pub allow_adjacent: bool,
}

impl Default for EmptyBudget {
    fn default() -> Self {
        EmptyBudget {
            max_total: 3,
            allow_adjacent: false,
        }
    }
}

impl EmptyBudget {
    pub fn allows(&self, d: &Derivation) -> bool {
        d.empties_used() < self.max_total && (self.allow_adjacent || !d.last_was_empty())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GenerateConfig {
    /// Maximum number of overt words.
    pub max_len: usize,
    pub empties: EmptyBudget,
    /// Cap on explored states; exceeding it is an error rather than a
    /// silently partial language.
    pub max_states: usize,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        GenerateConfig {
            max_len: 6,
            empties: EmptyBudget::default(),
            max_states: 1_000_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub words: Vec<String>,
    pub derivation: Derivation,
}

/// Every successful derivation with at most `max_len` overt words, with
/// the default empty-item budget.
pub fn generate(g: &Grammar, max_len: usize) -> Result<Vec<Generated>, ParseError> {
    generate_with(
        g,
        &GenerateConfig {
            max_len,
            ..GenerateConfig::default()
        },
    )
}

/// Enumerates derivations by proposing, at each pending expectation, every
/// item whose label refines it (and a suspension where allowed). Results are
/// sorted by length, then sentence, and deduplicated structurally.
pub fn generate_with(g: &Grammar, cfg: &GenerateConfig) -> Result<Vec<Generated>, ParseError> {
    let mut out = Vec::new();
    let mut explored = 0usize;
    for root in g.start_items() {
        let d = Derivation::start(g, root);
        if d.words_consumed() > cfg.max_len {
            continue;
        }
        expand(g, d, cfg, &mut out, &mut explored)?;
    }
    let mut keyed: Vec<_> = out
        .into_iter()
        .map(|d| {
            let words = linearize(d.tree(), g.params.linearization);
            (words.len(), words, d.tree().signature(), d)
        })
        .collect();
    keyed.sort_by(|a, b| (a.0, &a.1, &a.2).cmp(&(b.0, &b.1, &b.2)));
    keyed.dedup_by(|a, b| a.1 == b.1 && a.2 == b.2);
    Ok(keyed
        .into_iter()
        .map(|(_, words, _, derivation)| Generated { words, derivation })
        .collect())
}

fn expand(
    g: &Grammar,
    mut d: Derivation,
    cfg: &GenerateConfig,
    out: &mut Vec<Derivation>,
    explored: &mut usize,
) -> Result<(), ParseError> {
    *explored += 1;
    if *explored > cfg.max_states {
        return Err(ParseError::BranchLimit {
            explored: *explored,
            limit: cfg.max_states,
        });
    }
    let pending = match d.settle(g) {
        Poll::Failed => return Ok(()),
        Poll::Complete => {
            d.finish(g);
            if d.is_success() {
                out.push(d);
            }
            return Ok(());
        }
        Poll::NeedsInput(p) => p,
    };
    for id in g.item_ids() {
        let item = g.item(id);
        if !pending.accepts(item.label()) {
            continue;
        }
        let fits = if item.is_empty_item() {
            cfg.empties.allows(&d)
        } else {
            d.words_consumed() < cfg.max_len
        };
        if !fits {
            continue;
        }
        let mut next = d.clone();
        if next.merge_input(g, id).is_ok() {
            expand(g, next, cfg, out, explored)?;
        }
    }
    if d.can_suspend(g) {
        let mut next = d.clone();
        next.suspend(g);
        expand(g, next, cfg, out, explored)?;
    }
    Ok(())
}
