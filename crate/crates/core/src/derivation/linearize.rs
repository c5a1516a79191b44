use crate::grammar::Linearization;
use crate::ops::NodeId;

use super::DerivationTree;

/// Spells out the overt yield of a derivation tree.
///
/// `Default` emits nodes in the order the derivation introduced them, which
/// for a parsed input is exactly the input order. `HeadMedial` walks the
/// first-merge edges and places a head that merged two or more dependents
/// after the yield of its first one.
pub fn linearize(tree: &DerivationTree, mode: Linearization) -> Vec<String> {
    let order: Vec<NodeId> = match mode {
        Linearization::Default => tree.arena.ids().collect(),
        Linearization::HeadMedial => {
            let mut out = Vec::new();
            head_medial(tree, tree.root, &mut out);
            out
        }
    };
    order
        .into_iter()
        .filter_map(|id| tree.node(id).phon.clone())
        .collect()
}

fn head_medial(tree: &DerivationTree, id: NodeId, out: &mut Vec<NodeId>) {
    let deps: Vec<NodeId> = tree
        .node(id)
        .dependents
        .iter()
        .filter(|d| !d.from_memory)
        .map(|d| d.child)
        .collect();
    if deps.len() >= 2 {
        head_medial(tree, deps[0], out);
        out.push(id);
        for &d in &deps[1..] {
            head_medial(tree, d, out);
        }
    } else {
        out.push(id);
        for &d in &deps {
            head_medial(tree, d, out);
        }
    }
}
