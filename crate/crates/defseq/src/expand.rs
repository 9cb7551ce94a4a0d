//! Stage expansion: instantiating assigned patterns inside each component.

use std::collections::BTreeMap;

use crate::model::{PatternSystem, StageEdge, StageGraph, TorusNode};
use crate::{Error, Result};

/// Resource limits for expansion.
#[derive(Clone, Copy, Debug)]
pub struct ExpandOptions {
    /// Budget for the total number of nodes across all produced stages.
    /// Exceeding it is an error, never a silent truncation.
    pub node_cap: usize,
}

impl Default for ExpandOptions {
    fn default() -> Self {
        ExpandOptions { node_cap: 1_000_000 }
    }
}

/// Expands `ps` into explicit stage graphs for stages `0..=depth`.
///
/// Stage 0 is the roots with their edges (node ids are root indices);
/// stage `m+1` instantiates the assigned pattern inside every stage-`m`
/// node. Child ids extend the parent id by `.{child_index}`, so the whole
/// expansion is deterministic including identifier assignment.
pub fn expand(ps: &PatternSystem, depth: u32, opts: ExpandOptions) -> Result<Vec<StageGraph>> {
    ps.validate()?;

    let nodes: Vec<TorusNode> = ps
        .roots
        .iter()
        .enumerate()
        .map(|(i, r)| TorusNode {
            id: i.to_string(),
            parent: None,
            stage: 0,
            winding: 0,
            knot_label: r.knot.clone(),
            spine_flag: r.spine,
        })
        .collect();
    let index_of: BTreeMap<&str, usize> =
        ps.roots.iter().enumerate().map(|(i, r)| (r.id.as_str(), i)).collect();
    let mut edges: Vec<StageEdge> = ps
        .root_edges
        .iter()
        .map(|e| {
            let ia = index_of[e.a.as_str()].to_string();
            let ib = index_of[e.b.as_str()].to_string();
            let (a, b) = if ia <= ib { (ia, ib) } else { (ib, ia) };
            StageEdge { a, b, lk: e.lk, split: e.split }
        })
        .collect();
    sort_edges(&mut edges);

    let mut total = nodes.len();
    if total > opts.node_cap {
        return Err(cap_error(0, total, opts.node_cap));
    }
    let mut stages = Vec::with_capacity(depth as usize + 1);
    stages.push(StageGraph { stage: 0, nodes, edges });

    for m in 1..=depth {
        let prev = stages.last().expect("stage 0 present");
        let rule = ps.assignment.rule_for_stage(m);

        let next_count: usize = prev
            .nodes
            .iter()
            .map(|p| {
                let name = if p.spine_flag { &rule.spine } else { &rule.other };
                ps.pattern(name).children.len()
            })
            .sum();
        if total + next_count > opts.node_cap {
            return Err(cap_error(m, total + next_count, opts.node_cap));
        }
        total += next_count;

        let mut nodes = Vec::with_capacity(next_count);
        let mut edges = Vec::new();
        for parent in &prev.nodes {
            let name = if parent.spine_flag { &rule.spine } else { &rule.other };
            let pat = ps.pattern(name);
            for (ci, slot) in pat.children.iter().enumerate() {
                nodes.push(TorusNode {
                    id: format!("{}.{ci}", parent.id),
                    parent: Some(parent.id.clone()),
                    stage: m,
                    winding: slot.winding,
                    knot_label: slot.knot.clone(),
                    spine_flag: parent.spine_flag && pat.spine_child == Some(ci),
                });
            }
            // Linking is intra-parent: each instantiated configuration lies
            // inside its own parent torus, so no cross-parent edges arise.
            for e in &pat.edges {
                let ia = format!("{}.{}", parent.id, e.i);
                let ib = format!("{}.{}", parent.id, e.j);
                let (a, b) = if ia <= ib { (ia, ib) } else { (ib, ia) };
                edges.push(StageEdge { a, b, lk: e.lk, split: e.split });
            }
        }
        sort_edges(&mut edges);
        stages.push(StageGraph { stage: m, nodes, edges });
    }
    Ok(stages)
}

/// Random-access wrapper: just the stage-`m` graph.
pub fn stage(ps: &PatternSystem, m: u32, opts: ExpandOptions) -> Result<StageGraph> {
    expand(ps, m, opts).map(|mut v| v.pop().expect("expand returns depth+1 stages"))
}

fn sort_edges(edges: &mut [StageEdge]) {
    edges.sort_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)));
}

fn cap_error(stage: u32, needed: usize, cap: usize) -> Error {
    Error::Resource {
        message: format!(
            "expanding through stage {stage} needs {needed} nodes total, over the cap of {cap}"
        ),
    }
}

// ---------------------------------------------------------------------------
