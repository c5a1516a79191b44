//! Lexicon, categories, agreement features and grammar parameters.
//!
//! A grammar is a lexicon of [`LexicalItem`]s plus a [`ParameterSet`]. Items
//! are written `[Expected(; Agr) Phon =/+Expect]` in the literature; in the
//! grammar file format they become `PHON :: EXPECTED {AGR} =X +Y`.

mod category;
mod features;
mod format;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

pub use category::{refines, Category};
pub use features::{AgrFeature, AgrSet, ExpectFeature, Polarity};
pub use format::{load_grammar, GrammarWarning};

/// Index of an item in its grammar's lexicon (declaration order).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ItemId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LexicalItem {
    /// Surface form; `None` for a phonetically empty item.
    pub phon: Option<String>,
    /// Expected categories, most prominent first. Never empty.
    pub expected: Vec<Category>,
    /// Expectations, in expansion order.
    pub expect: Vec<ExpectFeature>,
    pub agr: AgrSet,
}

impl LexicalItem {
    pub fn new(
        phon: Option<String>,
        expected: Vec<Category>,
        expect: Vec<ExpectFeature>,
        agr: AgrSet,
    ) -> Self {
        assert!(!expected.is_empty(), "a lexical item needs a label");
        LexicalItem {
            phon,
            expected,
            expect,
            agr,
        }
    }

    pub fn label(&self) -> &Category {
        &self.expected[0]
    }

    /// The first expectation, if any.
    pub fn select(&self) -> Option<&ExpectFeature> {
        self.expect.first()
    }

    /// Expectations after the first.
    pub fn remainder(&self) -> &[ExpectFeature] {
        self.expect.get(1..).unwrap_or(&[])
    }

    pub fn is_empty_item(&self) -> bool {
        self.phon.is_none()
    }

    pub fn form(&self) -> &str {
        self.phon.as_deref().unwrap_or("_")
    }
}

impl fmt::Display for LexicalItem {
    /// The bracketed notation, e.g. `[T; num.s, per.3 ha +D =V]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let expected: Vec<String> = self.expected.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}", expected.join(","))?;
        if !self.agr.is_empty() {
            let agr: Vec<String> = self.agr.iter().map(|a| a.to_string()).collect();
            write!(f, "; {}", agr.join(", "))?;
        }
        write!(f, " {}", self.phon.as_deref().unwrap_or("ε"))?;
        for e in &self.expect {
            write!(f, " {e}")?;
        }
        f.write_str("]")
    }
}

/// Attributes that must unify when an item with this label merges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgrEntry {
    pub attributes: BTreeSet<String>,
    /// Only applies when the merged item comes from memory.
    pub moved_only: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Linearization {
    #[default]
    Default,
    HeadMedial,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MemoryPolicy {
    /// Earliest filler is probed first.
    #[default]
    Fifo,
    Lifo,
}

/// How memory slots are probed against the pending expectation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MemoryProbe {
    /// Stop at the first slot (in policy order) that does not merge.
    #[default]
    Prefix,
    /// Merge the first slot (in policy order) that does merge.
    FirstMatch,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParameterSet {
    pub agr: BTreeMap<Category, AgrEntry>,
    pub delayed_expectation: bool,
    pub linearization: Linearization,
    pub memory_policy: MemoryPolicy,
    pub memory_probe: MemoryProbe,
    pub start: Category,
}

impl ParameterSet {
    pub fn new(start: Category) -> Self {
        ParameterSet {
            agr: BTreeMap::new(),
            delayed_expectation: false,
            linearization: Linearization::default(),
            memory_policy: MemoryPolicy::default(),
            memory_probe: MemoryProbe::default(),
            start,
        }
    }

    /// The entry keyed by the most refined category that `label` refines.
    pub fn agr_entry(&self, label: &Category) -> Option<(&Category, &AgrEntry)> {
        self.agr
            .iter()
            .filter(|(key, _)| label.refines(key))
            .max_by_key(|(key, _)| key.depth())
    }
}

#[derive(Clone, Debug)]
pub struct Grammar {
    items: Vec<LexicalItem>,
    by_form: HashMap<String, Vec<ItemId>>,
    empties: Vec<ItemId>,
    categories: BTreeSet<Category>,
    pub params: ParameterSet,
    pub warnings: Vec<GrammarWarning>,
}

impl Grammar {
    /// Assembles a grammar from items in declaration order.
    pub fn new(items: Vec<LexicalItem>, params: ParameterSet) -> Self {
        let mut by_form: HashMap<String, Vec<ItemId>> = HashMap::new();
        let mut empties = Vec::new();
        let mut categories = BTreeSet::new();
        categories.insert(params.start.clone());
        categories.extend(params.agr.keys().cloned());
        for (i, item) in items.iter().enumerate() {
            match &item.phon {
                Some(p) => by_form.entry(p.clone()).or_default().push(ItemId(i)),
                None => empties.push(ItemId(i)),
            }
            categories.extend(item.expected.iter().cloned());
            categories.extend(item.expect.iter().map(|e| e.category.clone()));
        }
        Grammar {
            items,
            by_form,
            empties,
            categories,
            params,
            warnings: Vec::new(),
        }
    }

    pub fn items(&self) -> &[LexicalItem] {
        &self.items
    }

    pub fn item(&self, id: ItemId) -> &LexicalItem {
        &self.items[id.0]
    }

    pub fn item_ids(&self) -> impl Iterator<Item = ItemId> {
        (0..self.items.len()).map(ItemId)
    }

    pub fn categories(&self) -> &BTreeSet<Category> {
        &self.categories
    }

    /// Overt items with this surface form, in declaration order.
    pub fn lookup(&self, form: &str) -> Vec<&LexicalItem> {
        self.lookup_ids(form).iter().map(|&id| self.item(id)).collect()
    }

    pub fn lookup_ids(&self, form: &str) -> &[ItemId] {
        self.by_form.get(form).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Phonetically empty items whose label refines `category`.
    pub fn lookup_empty(&self, category: &Category) -> Vec<ItemId> {
        self.empties
            .iter()
            .copied()
            .filter(|&id| self.item(id).label().refines(category))
            .collect()
    }

    pub fn empty_items(&self) -> &[ItemId] {
        &self.empties
    }

    /// Items that may root a derivation: those whose label refines the start category.
    pub fn start_items(&self) -> Vec<ItemId> {
        self.item_ids()
            .filter(|&id| self.item(id).label().refines(&self.params.start))
            .collect()
    }

    /// Distinct overt forms, sorted.
    pub fn vocabulary(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.by_form.keys().map(String::as_str).collect();
        v.sort_unstable();
        v
    }
}

impl fmt::Display for Grammar {
    /// Serializes back to the grammar file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        format::write_grammar(self, f)
    }
}
