//! Structure-building operations over derivation nodes: MERGE, AGREE, UNIFY,
//! MOVE, INHERIT and the SUCCESS check, plus the per-node memory buffer.
//!
//! Nodes live in a [`NodeArena`] and refer to each other by [`NodeId`], so a
//! whole derivation branch can be cloned at a choice point.

mod memory;
mod unify;

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::grammar::{
    AgrSet, Category, ExpectFeature, ItemId, LexicalItem, MemoryPolicy, ParameterSet, Polarity,
};

pub use memory::MemoryBuffer;
pub use unify::{op_unify, UnifyConflict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

/// A merge recorded on the probe: which feature it consumed and what it took.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dependency {
    pub relation: ExpectFeature,
    pub child: NodeId,
    pub from_memory: bool,
}

/// A memory slot. It points at the moved node; the stripped view of that node
/// (no phon, only unconsumed expected categories) is [`NodeArena::stripped`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MemorySlot {
    pub node: NodeId,
}

/// What a memory slot exposes: the moved item minus its consumed features.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrippedCopy {
    pub phon: Option<String>,
    pub expected: Vec<Category>,
    pub agr: AgrSet,
    pub suspended: Vec<ExpectFeature>,
}

/// An in-derivation instance of a lexical item.
#[derive(Clone, Debug)]
pub struct Node {
    pub item: ItemId,
    pub phon: Option<String>,
    /// Position of the overt input token this node realizes.
    pub token: Option<usize>,
    /// The item's label, kept after the label itself has been consumed.
    pub head_label: Category,
    pub remaining_expected: VecDeque<Category>,
    pub remaining_expect: VecDeque<ExpectFeature>,
    /// How many trailing entries of `remaining_expect` were resumed from suspension.
    resumed: usize,
    pub agr: AgrSet,
    pub mem: MemoryBuffer<MemorySlot>,
    pub parent: Option<NodeId>,
    pub dependents: Vec<Dependency>,
    pub suspended: Vec<ExpectFeature>,
    /// Word index at which this node first entered a memory buffer.
    pub stored_since: Option<usize>,
}

impl Node {
    pub fn from_item(
        id: ItemId,
        item: &LexicalItem,
        token: Option<usize>,
        policy: MemoryPolicy,
    ) -> Node {
        Node {
            item: id,
            phon: item.phon.clone(),
            token,
            head_label: item.label().clone(),
            remaining_expected: item.expected.iter().cloned().collect(),
            remaining_expect: item.expect.iter().cloned().collect(),
            resumed: 0,
            agr: item.agr.clone(),
            mem: MemoryBuffer::new(policy),
            parent: None,
            dependents: Vec::new(),
            suspended: Vec::new(),
            stored_since: None,
        }
    }

    /// Current label: the first unconsumed expected category.
    pub fn label(&self) -> Option<&Category> {
        self.remaining_expected.front()
    }

    pub fn pending(&self) -> Option<&ExpectFeature> {
        self.remaining_expect.front()
    }

    pub fn is_fully_licensed(&self) -> bool {
        self.remaining_expected.is_empty()
    }

    pub fn is_empty_item(&self) -> bool {
        self.phon.is_none()
    }

    pub fn form(&self) -> &str {
        self.phon.as_deref().unwrap_or("_")
    }

    /// Whether the pending expectation was itself resumed from suspension.
    pub fn pending_is_resumed(&self) -> bool {
        !self.remaining_expect.is_empty() && self.resumed == self.remaining_expect.len()
    }

    fn consume_expect(&mut self) -> Option<ExpectFeature> {
        let f = self.remaining_expect.pop_front();
        self.resumed = self.resumed.min(self.remaining_expect.len());
        f
    }

    /// Moves the pending expectation to the suspended list.
    pub fn suspend_pending(&mut self) -> Option<ExpectFeature> {
        let f = self.consume_expect()?;
        self.suspended.push(f.clone());
        Some(f)
    }

    /// Appends every suspended expectation back as pending; returns how many.
    pub fn resume_suspended(&mut self) -> usize {
        let n = self.suspended.len();
        self.remaining_expect.extend(self.suspended.drain(..));
        self.resumed += n;
        n
    }
}

#[derive(Clone, Debug, Default)]
pub struct NodeArena {
    nodes: Vec<Node>,
}

impl NodeArena {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, node: Node) -> NodeId {
        self.nodes.push(node);
        NodeId(self.nodes.len() - 1)
    }

    pub fn get(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn get_mut(&mut self, id: NodeId) -> &mut Node {
        &mut self.nodes[id.0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &Node)> {
        self.nodes.iter().enumerate().map(|(i, n)| (NodeId(i), n))
    }

    pub fn stripped(&self, slot: MemorySlot) -> StrippedCopy {
        let n = self.get(slot.node);
        StrippedCopy {
            phon: None,
            expected: n.remaining_expected.iter().cloned().collect(),
            agr: n.agr.clone(),
            suspended: n.suspended.clone(),
        }
    }

    /// Occupied memory slots across all nodes.
    pub fn memory_load(&self) -> usize {
        self.nodes.iter().map(|n| n.mem.len()).sum()
    }

    /// Earliest word index among the items currently held in memory.
    pub fn oldest_retained(&self) -> Option<usize> {
        self.nodes
            .iter()
            .flat_map(|n| n.mem.iter())
            .filter_map(|s| self.get(s.node).stored_since)
            .min()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AgreeOutcome {
    /// No applicable agreement parameter.
    Trivial,
    /// The listed attributes were unified and written back to both nodes.
    Unified(BTreeSet<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgreeFailure {
    pub probe: Category,
    pub goal: Category,
    pub conflict: UnifyConflict,
}

impl fmt::Display for AgreeFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "agreement failure between {} and {} on {}",
            self.probe, self.goal, self.conflict
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeOutcome {
    pub feature: ExpectFeature,
    pub label_consumed: bool,
    pub agreement: AgreeOutcome,
    /// The probe has no expectations left after this merge.
    pub probe_exhausted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MergeFailure {
    NoExpectation,
    FullyLicensed,
    LabelMismatch {
        expected: ExpectFeature,
        found: Category,
    },
    Agreement(AgreeFailure),
}

impl fmt::Display for MergeFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MergeFailure::NoExpectation => f.write_str("probe has no pending expectation"),
            MergeFailure::FullyLicensed => f.write_str("goal is already fully licensed"),
            MergeFailure::LabelMismatch { expected, found } => {
                write!(f, "label mismatch: expected {expected}, found {found}")
            }
            MergeFailure::Agreement(a) => a.fmt(f),
        }
    }
}

fn active_attributes(
    params: &ParameterSet,
    label: &Category,
    from_memory: bool,
) -> Option<BTreeSet<String>> {
    params
        .agr_entry(label)
        .filter(|(_, e)| !e.moved_only || from_memory)
        .map(|(_, e)| e.attributes.clone())
}

/// Checks agreement between a probe and the goal it is about to merge.
///
/// Each side resolves its label to an agreement parameter; moved-only entries
/// count only when the goal comes from memory. The union of the active
/// entries' attributes is unified and the result written back to both nodes.
/// Nothing is modified on failure.
pub fn op_agree(
    arena: &mut NodeArena,
    probe: NodeId,
    goal: NodeId,
    from_memory: bool,
    params: &ParameterSet,
) -> Result<AgreeOutcome, AgreeFailure> {
    let probe_label = arena.get(probe).head_label.clone();
    let goal_label = match arena.get(goal).label() {
        Some(l) => l.clone(),
        None => arena.get(goal).head_label.clone(),
    };
    let mut governed = BTreeSet::new();
    for label in [&probe_label, &goal_label] {
        if let Some(attrs) = active_attributes(params, label, from_memory) {
            governed.extend(attrs);
        }
    }
    if governed.is_empty() {
        return Ok(AgreeOutcome::Trivial);
    }
    let a = arena.get(probe).agr.restrict(|x| governed.contains(x));
    let b = arena.get(goal).agr.restrict(|x| governed.contains(x));
    let unified = op_unify(&a, &b).map_err(|conflict| AgreeFailure {
        probe: probe_label,
        goal: goal_label,
        conflict,
    })?;
    for f in unified.iter() {
        arena.get_mut(probe).agr.set(f.clone());
        arena.get_mut(goal).agr.set(f);
    }
    Ok(AgreeOutcome::Unified(governed))
}

/// MERGE of `goal` into `probe`'s pending expectation, coupled with AGREE.
///
/// `=X` consumes the goal's label; `+X` leaves it in place so the goal must be
/// moved. On success the dependency is recorded on the probe.
pub fn op_merge(
    arena: &mut NodeArena,
    probe: NodeId,
    goal: NodeId,
    from_memory: bool,
    params: &ParameterSet,
) -> Result<MergeOutcome, MergeFailure> {
    let feature = arena
        .get(probe)
        .pending()
        .cloned()
        .ok_or(MergeFailure::NoExpectation)?;
    let label = arena
        .get(goal)
        .label()
        .cloned()
        .ok_or(MergeFailure::FullyLicensed)?;
    if !feature.accepts(&label) {
        return Err(MergeFailure::LabelMismatch {
            expected: feature,
            found: label,
        });
    }
    let agreement =
        op_agree(arena, probe, goal, from_memory, params).map_err(MergeFailure::Agreement)?;

    let p = arena.get_mut(probe);
    p.consume_expect();
    p.dependents.push(Dependency {
        relation: feature.clone(),
        child: goal,
        from_memory,
    });
    let probe_exhausted = p.remaining_expect.is_empty();
    let label_consumed = feature.polarity == Polarity::Select;
    if label_consumed {
        arena.get_mut(goal).remaining_expected.pop_front();
    }
    Ok(MergeOutcome {
        feature,
        label_consumed,
        agreement,
        probe_exhausted,
    })
}

/// MOVE: if `goal` still has expected categories, a stripped copy of it is
/// pushed into `governor`'s buffer. Returns whether a push happened.
pub fn op_move(arena: &mut NodeArena, governor: NodeId, goal: NodeId, word: Option<usize>) -> bool {
    if arena.get(goal).is_fully_licensed() {
        return false;
    }
    let g = arena.get_mut(goal);
    if g.stored_since.is_none() {
        g.stored_since = word;
    }
    arena.get_mut(governor).mem.push(MemorySlot { node: goal });
    true
}

/// INHERIT: when the merge just consumed the parent's last expectation, the
/// parent's buffer moves to the child. A non-final merge opens a nested
/// expansion that starts with an empty buffer. Returns the slots moved.
pub fn op_inherit(arena: &mut NodeArena, parent: NodeId, child: NodeId) -> usize {
    if parent == child || !arena.get(parent).remaining_expect.is_empty() {
        return 0;
    }
    let policy = arena.get(parent).mem.policy();
    let mut taken = std::mem::replace(&mut arena.get_mut(parent).mem, MemoryBuffer::new(policy));
    taken.transfer_into(&mut arena.get_mut(child).mem)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuccessOutcome {
    /// Right edge with an empty buffer.
    Success,
    /// Expectations remain; the check does not apply yet.
    Vacuous,
    /// Right edge with items still in memory.
    Stop,
}

pub fn op_success(node: &Node) -> SuccessOutcome {
    if !node.remaining_expect.is_empty() {
        SuccessOutcome::Vacuous
    } else if node.mem.is_empty() {
        SuccessOutcome::Success
    } else {
        SuccessOutcome::Stop
    }
}
