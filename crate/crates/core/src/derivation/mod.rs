//! The top-down derivation loop shared by generation and parsing.
//!
//! A [`Derivation`] starts from a root item and is fed one lexical item at a
//! time. Between inputs, [`Derivation::settle`] runs everything that needs no
//! input: memory re-merges against the current node's pending expectation
//! (active filler first), SUCCESS checks at right edges, and the ascent to the
//! nearest ancestor that still expects something. Search layers clone the
//! state at each choice point.

mod generate;
mod linearize;

use std::fmt;

use crate::grammar::{ExpectFeature, Grammar, ItemId, MemoryProbe};
use crate::ops::{
    op_inherit, op_merge, op_move, op_success, MergeFailure, MergeOutcome, Node, NodeArena,
    NodeId, SuccessOutcome,
};

pub use generate::{generate, generate_with, EmptyBudget, GenerateConfig, Generated};
pub use linearize::linearize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepKind {
    MergeInput,
    MergeMemory,
    Move,
    Inherit,
    SuccessCheck,
    Ascend,
    PostulateEmpty,
    Suspend,
    Resume,
}

impl StepKind {
    pub fn name(self) -> &'static str {
        match self {
            StepKind::MergeInput => "MERGE_INPUT",
            StepKind::MergeMemory => "MERGE_MEMORY",
            StepKind::Move => "MOVE",
            StepKind::Inherit => "INHERIT",
            StepKind::SuccessCheck => "SUCCESS_CHECK",
            StepKind::Ascend => "ASCEND",
            StepKind::PostulateEmpty => "POSTULATE_EMPTY",
            StepKind::Suspend => "SUSPEND",
            StepKind::Resume => "RESUME",
        }
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationStep {
    pub kind: StepKind,
    pub nodes: Vec<NodeId>,
    pub feature: Option<ExpectFeature>,
    pub detail: String,
    /// Overt word index consumed by this step, for input merges of overt items.
    pub word: Option<usize>,
    pub mem_load_after: usize,
    pub oldest_retained: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FailReason {
    Merge { probe: String, failure: Box<MergeFailure> },
    /// A right edge was reached with items still in memory.
    Stop { node: String, held: usize },
    LeftoverInput { remaining: usize },
    LeftoverExpectations { node: String, pending: String },
    UnresumedSuspension { node: String, features: String },
    NoCandidate { token: String },
}

impl FailReason {
    pub fn is_stop(&self) -> bool {
        matches!(self, FailReason::Stop { .. })
    }
}

impl fmt::Display for FailReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailReason::Merge { probe, failure } => write!(f, "merge at {probe}: {failure}"),
            FailReason::Stop { node, held } => {
                write!(f, "STOP: {node} reached its right edge holding {held} item(s)")
            }
            FailReason::LeftoverInput { remaining } => {
                write!(f, "derivation complete with {remaining} input item(s) left")
            }
            FailReason::LeftoverExpectations { node, pending } => {
                write!(f, "input exhausted while {node} still expects {pending}")
            }
            FailReason::UnresumedSuspension { node, features } => {
                write!(f, "{node} never resumed suspended {features}")
            }
            FailReason::NoCandidate { token } => write!(f, "no lexical item for `{token}` fits"),
        }
    }
}

/// Form, token position, and `(relation, child, from memory)` per dependency.
pub type NodeSignature = (String, Option<usize>, Vec<(String, usize, bool)>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Running,
    Success,
    Fail(FailReason),
}

/// One input decision. Replaying the same choices from the same root
/// reproduces a derivation exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Choice {
    Item(ItemId),
    Suspend,
}

/// What the derivation needs next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Poll {
    NeedsInput(ExpectFeature),
    Complete,
    Failed,
}

/// The node graph built by a derivation. Node ids follow introduction order.
#[derive(Clone, Debug)]
pub struct DerivationTree {
    pub arena: NodeArena,
    pub root: NodeId,
}

impl DerivationTree {
    pub fn node(&self, id: NodeId) -> &Node {
        self.arena.get(id)
    }

    /// Structural identity: forms, token positions and every recorded dependency.
    pub fn signature(&self) -> Vec<NodeSignature> {
        self.arena
            .iter()
            .map(|(_, n)| {
                let deps = n
                    .dependents
                    .iter()
                    .map(|d| (d.relation.to_string(), d.child.0, d.from_memory))
                    .collect();
                (n.form().to_string(), n.token, deps)
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct Derivation {
    tree: DerivationTree,
    cn: NodeId,
    status: Status,
    complete: bool,
    steps: Vec<DerivationStep>,
    choices: Vec<Choice>,
    root_item: ItemId,
    words: usize,
    empties_used: usize,
    last_was_empty: bool,
}

pub type DerivationResult = Derivation;

impl Derivation {
    /// Initializes a derivation with `root` as the current node. An overt root
    /// consumes word 0.
    pub fn start(g: &Grammar, root: ItemId) -> Derivation {
        let item = g.item(root);
        let token = item.phon.as_ref().map(|_| 0);
        let mut arena = NodeArena::new();
        let root_id = arena.add(Node::from_item(root, item, token, g.params.memory_policy));
        let mut d = Derivation {
            tree: DerivationTree {
                arena,
                root: root_id,
            },
            cn: root_id,
            status: Status::Running,
            complete: false,
            steps: Vec::new(),
            choices: Vec::new(),
            root_item: root,
            words: usize::from(token.is_some()),
            empties_used: 0,
            last_was_empty: false,
        };
        d.log(
            StepKind::MergeInput,
            vec![root_id],
            None,
            format!("root {item}"),
            token,
        );
        d
    }

    pub fn status(&self) -> &Status {
        &self.status
    }

    pub fn is_success(&self) -> bool {
        self.status == Status::Success
    }

    pub fn fail_reason(&self) -> Option<&FailReason> {
        match &self.status {
            Status::Fail(r) => Some(r),
            _ => None,
        }
    }

    pub fn steps(&self) -> &[DerivationStep] {
        &self.steps
    }

    pub fn choices(&self) -> &[Choice] {
        &self.choices
    }

    pub fn root_item(&self) -> ItemId {
        self.root_item
    }

    pub fn tree(&self) -> &DerivationTree {
        &self.tree
    }

    pub fn current(&self) -> NodeId {
        self.cn
    }

    /// Overt words consumed so far, the root included.
    pub fn words_consumed(&self) -> usize {
        self.words
    }

    pub fn empties_used(&self) -> usize {
        self.empties_used
    }

    pub fn last_was_empty(&self) -> bool {
        self.last_was_empty
    }

    pub fn memory_load(&self) -> usize {
        self.tree.arena.memory_load()
    }

    fn node_desc(&self, id: NodeId) -> String {
        let n = self.tree.arena.get(id);
        format!("[{} {}]", n.head_label, n.phon.as_deref().unwrap_or("ε"))
    }

    fn log(
        &mut self,
        kind: StepKind,
        nodes: Vec<NodeId>,
        feature: Option<ExpectFeature>,
        detail: String,
        word: Option<usize>,
    ) {
        self.steps.push(DerivationStep {
            kind,
            nodes,
            feature,
            detail,
            word,
            mem_load_after: self.tree.arena.memory_load(),
            oldest_retained: self.tree.arena.oldest_retained(),
        });
    }

    /// Marks the derivation failed for a reason found outside it, such as
    /// input left over or no candidate for the next token.
    pub fn reject(&mut self, reason: FailReason) {
        if self.status == Status::Running {
            self.status = Status::Fail(reason);
        }
    }

    fn fail(&mut self, reason: FailReason) -> Poll {
        self.status = Status::Fail(reason);
        Poll::Failed
    }

    /// Runs every step that needs no input and reports what comes next.
    pub fn settle(&mut self, g: &Grammar) -> Poll {
        loop {
            match self.status {
                Status::Fail(_) => return Poll::Failed,
                Status::Success => return Poll::Complete,
                Status::Running => {}
            }
            if self.complete {
                return Poll::Complete;
            }
            let cn = self.cn;
            if let Some(pending) = self.tree.arena.get(cn).pending().cloned() {
                if self.probe_memory(g) {
                    continue;
                }
                return Poll::NeedsInput(pending);
            }
            if !self.success_check(cn) {
                return Poll::Failed;
            }
            match self.tree.arena.get(cn).parent {
                Some(p) => {
                    self.cn = p;
                    let detail = format!("{} -> {}", self.node_desc(cn), self.node_desc(p));
                    self.log(StepKind::Ascend, vec![cn, p], None, detail, None);
                }
                None => {
                    self.complete = true;
                    return Poll::Complete;
                }
            }
        }
    }

    /// SUCCESS at `node`; records a STOP failure and returns false if it halts.
    fn success_check(&mut self, node: NodeId) -> bool {
        self.noted_success_check(node, "")
    }

    fn noted_success_check(&mut self, node: NodeId, note: &str) -> bool {
        let outcome = op_success(self.tree.arena.get(node));
        if outcome == SuccessOutcome::Vacuous {
            return true;
        }
        let held = self.tree.arena.get(node).mem.len();
        let detail = format!("{} {:?}{note}", self.node_desc(node), outcome);
        self.log(StepKind::SuccessCheck, vec![node], None, detail, None);
        if outcome == SuccessOutcome::Stop {
            let node = self.node_desc(node);
            self.fail(FailReason::Stop { node, held });
            return false;
        }
        true
    }

    /// Tries the current node's buffer against its pending expectation.
    fn probe_memory(&mut self, g: &Grammar) -> bool {
        let cn = self.cn;
        let order = self.tree.arena.get(cn).mem.probe_order();
        for idx in order {
            let slot = *self.tree.arena.get(cn).mem.get(idx).expect("probe index");
            match op_merge(&mut self.tree.arena, cn, slot.node, true, &g.params) {
                Ok(out) => {
                    self.after_memory_merge(idx, slot.node, out);
                    return true;
                }
                Err(_) if g.params.memory_probe == MemoryProbe::Prefix => return false,
                Err(_) => continue,
            }
        }
        false
    }

    fn after_memory_merge(&mut self, idx: usize, node: NodeId, out: MergeOutcome) {
        let cn = self.cn;
        let desc = format!("{} {} {}", self.node_desc(cn), out.feature, self.node_desc(node));
        if out.label_consumed {
            self.tree.arena.get_mut(cn).mem.pop(idx);
            self.log(
                StepKind::MergeMemory,
                vec![cn, node],
                Some(out.feature.clone()),
                desc,
                None,
            );
            if op_move(&mut self.tree.arena, cn, node, None) {
                let d = format!("{} re-stored in {}", self.node_desc(node), self.node_desc(cn));
                self.log(StepKind::Move, vec![cn, node], None, d, None);
            }
        } else {
            self.log(
                StepKind::MergeMemory,
                vec![cn, node],
                Some(out.feature.clone()),
                format!("{desc} (retained)"),
                None,
            );
        }

        let resumed = self.tree.arena.get_mut(node).resume_suspended();
        if resumed > 0 {
            let d = format!("{} resumes {} expectation(s)", self.node_desc(node), resumed);
            self.log(StepKind::Resume, vec![node], None, d, None);
        }
        self.after_merge(cn, node, out.probe_exhausted);
    }

    /// Shared tail of both merge kinds: INHERIT, then either descend into the
    /// goal or run its SUCCESS check.
    fn after_merge(&mut self, probe: NodeId, goal: NodeId, probe_exhausted: bool) {
        if probe_exhausted {
            let moved = op_inherit(&mut self.tree.arena, probe, goal);
            if moved > 0 {
                let d = format!(
                    "{} -> {} ({moved} slot(s), last expectation)",
                    self.node_desc(probe),
                    self.node_desc(goal)
                );
                self.log(StepKind::Inherit, vec![probe, goal], None, d, None);
            }
        }
        let g = self.tree.arena.get(goal);
        if g.pending().is_some() {
            self.tree.arena.get_mut(goal).parent = Some(probe);
            self.cn = goal;
        } else if g.dependents.is_empty() {
            // A goal that never had expectations is still checked, so a
            // buffer it inherited cannot slip through unlicensed.
            self.noted_success_check(goal, " (goal without expectations)");
        } else {
            self.success_check(goal);
        }
    }

    /// Merges `item` as the next input against the pending expectation.
    pub fn merge_input(&mut self, g: &Grammar, item: ItemId) -> Result<(), FailReason> {
        let lex = g.item(item);
        let cn = self.cn;
        let token = lex.phon.as_ref().map(|_| self.words);
        let goal = self.tree.arena.add(Node::from_item(
            item,
            lex,
            token,
            g.params.memory_policy,
        ));
        let out = match op_merge(&mut self.tree.arena, cn, goal, false, &g.params) {
            Ok(out) => out,
            Err(failure) => {
                let reason = FailReason::Merge {
                    probe: self.node_desc(cn),
                    failure: Box::new(failure),
                };
                self.fail(reason.clone());
                return Err(reason);
            }
        };
        self.choices.push(Choice::Item(item));
        if token.is_some() {
            self.words += 1;
            self.last_was_empty = false;
        } else {
            self.empties_used += 1;
            self.last_was_empty = true;
        }
        let kind = if token.is_some() {
            StepKind::MergeInput
        } else {
            StepKind::PostulateEmpty
        };
        let desc = format!("{} {} {}", self.node_desc(cn), out.feature, self.node_desc(goal));
        self.log(kind, vec![cn, goal], Some(out.feature.clone()), desc, token);
        if op_move(&mut self.tree.arena, cn, goal, token.or(self.words.checked_sub(1))) {
            let d = format!("{} stored in {}", self.node_desc(goal), self.node_desc(cn));
            self.log(StepKind::Move, vec![cn, goal], None, d, None);
        }
        self.after_merge(cn, goal, out.probe_exhausted);
        match &self.status {
            Status::Fail(r) => Err(r.clone()),
            _ => Ok(()),
        }
    }

    /// Whether the pending expectation may be postponed: delayed expectation
    /// is on, the feature was not itself resumed, and the node still has
    /// expected categories so it can be re-merged from memory later.
    pub fn can_suspend(&self, g: &Grammar) -> bool {
        if !g.params.delayed_expectation || self.status != Status::Running || self.complete {
            return false;
        }
        let n = self.tree.arena.get(self.cn);
        n.pending().is_some() && !n.pending_is_resumed() && !n.is_fully_licensed()
    }

    /// True when suspension is otherwise allowed but the pending feature was
    /// itself resumed (a second level of nesting).
    pub fn suspension_too_deep(&self, g: &Grammar) -> bool {
        g.params.delayed_expectation
            && self.status == Status::Running
            && self.tree.arena.get(self.cn).pending_is_resumed()
    }

    /// Postpones the current node's pending expectation.
    pub fn suspend(&mut self, g: &Grammar) -> bool {
        if !self.can_suspend(g) {
            return false;
        }
        let cn = self.cn;
        let f = self
            .tree
            .arena
            .get_mut(cn)
            .suspend_pending()
            .expect("pending expectation");
        self.choices.push(Choice::Suspend);
        let d = format!("{} postpones {}", self.node_desc(cn), f);
        self.log(StepKind::Suspend, vec![cn], Some(f), d, None);
        true
    }

    /// Ends the input: settles, then sweeps every node for leftover memory,
    /// expectations, or suspended features.
    pub fn finish(&mut self, g: &Grammar) -> Poll {
        match self.settle(g) {
            Poll::Failed => return Poll::Failed,
            Poll::NeedsInput(pending) => {
                let node = self.node_desc(self.cn);
                return self.fail(FailReason::LeftoverExpectations {
                    node,
                    pending: pending.to_string(),
                });
            }
            Poll::Complete => {}
        }
        if self.status == Status::Success {
            return Poll::Complete;
        }
        let ids: Vec<NodeId> = self.tree.arena.ids().collect();
        for id in ids {
            let n = self.tree.arena.get(id);
            if !n.remaining_expect.is_empty() {
                let pending = n.remaining_expect[0].to_string();
                let node = self.node_desc(id);
                return self.fail(FailReason::LeftoverExpectations { node, pending });
            }
            if !n.suspended.is_empty() {
                let features: Vec<String> = n.suspended.iter().map(|f| f.to_string()).collect();
                let node = self.node_desc(id);
                return self.fail(FailReason::UnresumedSuspension {
                    node,
                    features: features.join(" "),
                });
            }
            if !n.mem.is_empty() && !self.success_check(id) {
                return Poll::Failed;
            }
        }
        self.status = Status::Success;
        Poll::Complete
    }

    /// Applies one recorded choice after settling. Errors if the derivation
    /// cannot take input at this point.
    pub fn apply(&mut self, g: &Grammar, choice: Choice) -> Result<(), FailReason> {
        match self.settle(g) {
            Poll::Failed => return Err(self.fail_reason().cloned().expect("failed")),
            Poll::Complete => {
                let reason = FailReason::LeftoverInput { remaining: 1 };
                self.fail(reason.clone());
                return Err(reason);
            }
            Poll::NeedsInput(_) => {}
        }
        match choice {
            Choice::Item(id) => self.merge_input(g, id),
            Choice::Suspend => {
                if self.suspend(g) {
                    Ok(())
                } else {
                    let reason = FailReason::NoCandidate {
                        token: "<suspend>".into(),
                    };
                    self.fail(reason.clone());
                    Err(reason)
                }
            }
        }
    }
}

/// Deterministic derivation from `root` over a fixed sequence of choices
/// (lexical items, empty ones included, and suspensions).
pub fn derive(g: &Grammar, root: ItemId, input: &[Choice]) -> DerivationResult {
    let mut d = Derivation::start(g, root);
    for (i, &c) in input.iter().enumerate() {
        if d.settle(g) == Poll::Complete {
            d.fail(FailReason::LeftoverInput {
                remaining: input.len() - i,
            });
            return d;
        }
        if d.apply(g, c).is_err() {
            return d;
        }
    }
    d.finish(g);
    d
}

/// Derivation over surface forms with no search: each form takes its first
/// homophone whose label fits the pending expectation, and no empty items are
/// postulated. Ambiguity and empty categories are the parser's job.
pub fn derive_forms(g: &Grammar, root: ItemId, forms: &[&str]) -> DerivationResult {
    let mut d = Derivation::start(g, root);
    let skip = usize::from(g.item(root).phon.is_some());
    for (i, form) in forms.iter().enumerate().skip(skip) {
        let pending = match d.settle(g) {
            Poll::Failed => return d,
            Poll::Complete => {
                d.fail(FailReason::LeftoverInput {
                    remaining: forms.len() - i,
                });
                return d;
            }
            Poll::NeedsInput(p) => p,
        };
        let pick = g
            .lookup_ids(form)
            .iter()
            .copied()
            .find(|&id| pending.accepts(g.item(id).label()));
        match pick {
            Some(id) => {
                if d.merge_input(g, id).is_err() {
                    return d;
                }
            }
            None => {
                d.fail(FailReason::NoCandidate {
                    token: form.to_string(),
                });
                return d;
            }
        }
    }
    d.finish(g);
    d
}
