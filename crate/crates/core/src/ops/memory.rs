use crate::grammar::MemoryPolicy;

/// Ordered store of partially licensed items.
///
/// Slots are kept in insertion order; the policy only decides the order in
/// which they are probed. FIFO probes the earliest filler first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemoryBuffer<T> {
    slots: Vec<T>,
    policy: MemoryPolicy,
}

impl<T> MemoryBuffer<T> {
    pub fn new(policy: MemoryPolicy) -> Self {
        MemoryBuffer {
            slots: Vec::new(),
            policy,
        }
    }

    pub fn policy(&self) -> MemoryPolicy {
        self.policy
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn push(&mut self, slot: T) {
        self.slots.push(slot);
    }

    /// Removes and returns the slot at `index` (an insertion-order index).
    ///
    /// Panics if `index` is out of bounds.
    pub fn pop(&mut self, index: usize) -> T {
        assert!(
            index < self.slots.len(),
            "pop({index}) on a memory buffer with {} slots",
            self.slots.len()
        );
        self.slots.remove(index)
    }

    pub fn get(&self, index: usize) -> Option<&T> {
        self.slots.get(index)
    }

    /// Slot indices in the order they are probed.
    pub fn probe_order(&self) -> Vec<usize> {
        let n = self.slots.len();
        match self.policy {
            MemoryPolicy::Fifo => (0..n).collect(),
            MemoryPolicy::Lifo => (0..n).rev().collect(),
        }
    }

    /// Slots in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.slots.iter()
    }

    /// Moves every slot of `self` to the end of `other`, preserving order.
    pub fn transfer_into(&mut self, other: &mut MemoryBuffer<T>) -> usize {
        let n = self.slots.len();
        other.slots.append(&mut self.slots);
        n
    }
}
