//! Dependency-graph export (TSV) and step traces.

use std::collections::BTreeMap;
use std::fmt;

use crate::derivation::{Derivation, Status, StepKind};
use crate::error::TsvError;
use crate::ops::NodeId;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepToken {
    /// 1-based. Overt tokens come first in input order, then empty items in
    /// the order they were introduced.
    pub index: usize,
    pub form: String,
    /// `(head index, relation)`; the root has the single head `(0, "root")`.
    pub heads: Vec<(usize, String)>,
    pub memload: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependencyGraph {
    /// `SUCCESS` or `FAIL(reason)`.
    pub status: String,
    pub tokens: Vec<DepToken>,
}

fn status_text(status: &Status) -> String {
    match status {
        Status::Success => "SUCCESS".into(),
        Status::Fail(r) => format!("FAIL({})", clean(&r.to_string())),
        Status::Running => "FAIL(incomplete)".into(),
    }
}

fn clean(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

/// Memory load after each introduced node's steps, i.e. at the last step
/// before the next item enters the derivation.
fn loads_by_node(d: &Derivation) -> BTreeMap<NodeId, usize> {
    let mut out = BTreeMap::new();
    let mut current = None;
    for step in d.steps() {
        let introduces = matches!(step.kind, StepKind::MergeInput | StepKind::PostulateEmpty);
        if introduces {
            current = step.nodes.last().copied();
        }
        if let Some(n) = current {
            out.insert(n, step.mem_load_after);
        }
    }
    out
}

/// Memory load after each overt word, in input order.
pub fn word_loads(d: &Derivation) -> Vec<usize> {
    let loads = loads_by_node(d);
    let mut overt: Vec<(usize, usize)> = d
        .tree()
        .arena
        .iter()
        .filter_map(|(id, n)| n.token.map(|t| (t, loads.get(&id).copied().unwrap_or(0))))
        .collect();
    overt.sort_unstable();
    overt.into_iter().map(|(_, l)| l).collect()
}

pub fn to_dependencies(d: &Derivation) -> DependencyGraph {
    let tree = d.tree();
    let loads = loads_by_node(d);
    let mut order: Vec<NodeId> = Vec::new();
    let mut overt: Vec<(usize, NodeId)> = tree
        .arena
        .iter()
        .filter_map(|(id, n)| n.token.map(|t| (t, id)))
        .collect();
    overt.sort_unstable();
    order.extend(overt.into_iter().map(|(_, id)| id));
    order.extend(tree.arena.iter().filter(|(_, n)| n.token.is_none()).map(|(id, _)| id));
    let index: BTreeMap<NodeId, usize> =
        order.iter().enumerate().map(|(i, &id)| (id, i + 1)).collect();

    let mut heads: BTreeMap<NodeId, Vec<(usize, String)>> = BTreeMap::new();
    heads.insert(tree.root, vec![(0, "root".into())]);
    for (id, n) in tree.arena.iter() {
        for dep in &n.dependents {
            heads
                .entry(dep.child)
                .or_default()
                .push((index[&id], dep.relation.to_string()));
        }
    }
    let tokens = order
        .iter()
        .map(|id| DepToken {
            index: index[id],
            form: tree.node(*id).form().to_string(),
            heads: heads.remove(id).unwrap_or_default(),
            memload: loads.get(id).copied().unwrap_or(0),
        })
        .collect();
    DependencyGraph {
        status: status_text(d.status()),
        tokens,
    }
}

impl DependencyGraph {
    pub fn to_tsv(&self) -> String {
        self.to_string()
    }

    /// Reads back what [`DependencyGraph::to_tsv`] writes.
    pub fn from_tsv(text: &str) -> Result<DependencyGraph, TsvError> {
        let mut status = None;
        let mut tokens = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let bad = |message: &str| TsvError::Malformed {
                line: line_no,
                message: message.to_string(),
            };
            if let Some(s) = line.strip_prefix("# status: ") {
                status = Some(s.to_string());
                continue;
            }
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let [index, form, head, rel, memload] = cols[..] else {
                return Err(bad("expected 5 tab-separated columns"));
            };
            let index: usize = index.parse().map_err(|_| bad("bad INDEX"))?;
            let memload: usize = memload.parse().map_err(|_| bad("bad MEMLOAD"))?;
            let (hs, rs): (Vec<&str>, Vec<&str>) = if head == "_" && rel == "_" {
                (Vec::new(), Vec::new())
            } else {
                (head.split('|').collect(), rel.split('|').collect())
            };
            if hs.len() != rs.len() {
                return Err(bad("HEAD and REL lists differ in length"));
            }
            let heads = hs
                .iter()
                .zip(&rs)
                .map(|(h, r)| Ok((h.parse().map_err(|_| bad("bad HEAD"))?, r.to_string())))
                .collect::<Result<Vec<_>, TsvError>>()?;
            tokens.push(DepToken {
                index,
                form: form.to_string(),
                heads,
                memload,
            });
        }
        Ok(DependencyGraph {
            status: status.ok_or(TsvError::MissingStatus)?,
            tokens,
        })
    }
}

impl fmt::Display for DependencyGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# status: {}", self.status)?;
        writeln!(f, "# INDEX\tFORM\tHEAD\tREL\tMEMLOAD")?;
        for t in &self.tokens {
            let mut heads: Vec<String> = t.heads.iter().map(|(h, _)| h.to_string()).collect();
            let mut rels: Vec<&str> = t.heads.iter().map(|(_, r)| r.as_str()).collect();
            if heads.is_empty() {
                // a node whose merge failed has no head
                heads.push("_".into());
                rels.push("_");
            }
            writeln!(
                f,
                "{}\t{}\t{}\t{}\t{}",
                t.index,
                t.form,
                heads.join("|"),
                rels.join("|"),
                t.memload
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceLine {
    pub step: usize,
    pub kind: StepKind,
    pub detail: String,
    pub memload: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceReport {
    pub status: String,
    pub lines: Vec<TraceLine>,
    pub peak_load: usize,
    pub word_loads: Vec<usize>,
}

pub fn to_trace(d: &Derivation) -> TraceReport {
    let lines: Vec<TraceLine> = d
        .steps()
        .iter()
        .enumerate()
        .map(|(i, s)| TraceLine {
            step: i + 1,
            kind: s.kind,
            detail: clean(&s.detail),
            memload: s.mem_load_after,
        })
        .collect();
    TraceReport {
        status: status_text(d.status()),
        peak_load: lines.iter().map(|l| l.memload).max().unwrap_or(0),
        lines,
        word_loads: word_loads(d),
    }
}

impl fmt::Display for TraceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# status: {}", self.status)?;
        writeln!(f, "# STEP\tKIND\tDETAIL\tMEMLOAD")?;
        for l in &self.lines {
            writeln!(f, "{}\t{}\t{}\t{}", l.step, l.kind, l.detail, l.memload)?;
        }
        let loads: Vec<String> = self.word_loads.iter().map(|l| l.to_string()).collect();
        writeln!(f, "# word loads: <{}>", loads.join(","))?;
        writeln!(f, "# peak load: {}", self.peak_load)
    }
}
