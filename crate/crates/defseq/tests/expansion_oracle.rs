//! Cross-checks stage expansion against an independent recursive
//! enumerator, and the symbolic invariants against explicit stage graphs.
//!
//! The oracle rebuilds each stage by plain recursion on id paths — none of
//! the iterative bookkeeping the library uses — so a shared bug would have
//! to be implemented twice to slip through.

use std::collections::BTreeMap;

use defseq::{
    antoine_chain, antoine_from_target, bing_pattern, component_counts, expand,
    mod2_linking_sequence, whitehead_pattern, Arrangement, Assignment, ChildSlot, EpSeq,
    ExpandOptions, Pattern, PatternEdge, PatternSystem, RootEdge, RootSpec, StageEdge, StageGraph,
    StageRule, TorusNode, Z2,
};
use num_bigint::BigUint;

fn opts() -> ExpandOptions {
    ExpandOptions::default()
}

/// Depth-first descent from one node to all its stage-`target` descendants.
fn grow(ps: &PatternSystem, node: TorusNode, target: u32, out: &mut Vec<TorusNode>) {
    if node.stage == target {
        out.push(node);
        return;
    }
    let next = node.stage + 1;
    let rule = ps.assignment.rule_for_stage(next);
    let pat = ps.pattern(if node.spine_flag { &rule.spine } else { &rule.other });
    for (ci, slot) in pat.children.iter().enumerate() {
        grow(
            ps,
            TorusNode {
                id: format!("{}.{ci}", node.id),
                parent: Some(node.id.clone()),
                stage: next,
                winding: slot.winding,
                knot_label: slot.knot.clone(),
                spine_flag: node.spine_flag && pat.spine_child == Some(ci),
            },
            target,
            out,
        );
    }
}

fn oracle_nodes(ps: &PatternSystem, m: u32) -> Vec<TorusNode> {
    let mut out = Vec::new();
    for (ri, root) in ps.roots.iter().enumerate() {
        grow(
            ps,
            TorusNode {
                id: ri.to_string(),
                parent: None,
                stage: 0,
                winding: 0,
                knot_label: root.knot.clone(),
                spine_flag: root.spine,
            },
            m,
            &mut out,
        );
    }
    out
}

fn oracle_stage(ps: &PatternSystem, m: u32) -> StageGraph {
    let nodes = oracle_nodes(ps, m);
    let mut edges = Vec::new();
    if m == 0 {
        let index: BTreeMap<&str, usize> =
            ps.roots.iter().enumerate().map(|(i, r)| (r.id.as_str(), i)).collect();
        for e in &ps.root_edges {
            let (ia, ib) = (index[e.a.as_str()].to_string(), index[e.b.as_str()].to_string());
            let (a, b) = if ia <= ib { (ia, ib) } else { (ib, ia) };
            edges.push(StageEdge { a, b, lk: e.lk, split: e.split });
        }
    } else {
        for parent in oracle_nodes(ps, m - 1) {
            let rule = ps.assignment.rule_for_stage(m);
            let pat = ps.pattern(if parent.spine_flag { &rule.spine } else { &rule.other });
            for e in &pat.edges {
                let ia = format!("{}.{}", parent.id, e.i);
                let ib = format!("{}.{}", parent.id, e.j);
                let (a, b) = if ia <= ib { (ia, ib) } else { (ib, ia) };
                edges.push(StageEdge { a, b, lk: e.lk, split: e.split });
            }
        }
    }
    edges.sort_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)));
    StageGraph { stage: m, nodes, edges }
}

/// Nodes touched by at least one nonzero-lk edge, recounted from scratch.
fn recount_linked(sg: &StageGraph) -> u64 {
    let mut touched: Vec<&str> = Vec::new();
    for e in &sg.edges {
        if e.lk != 0 {
            touched.push(&e.a);
            touched.push(&e.b);
        }
    }
    touched.sort_unstable();
    touched.dedup();
    touched.len() as u64
}

fn target(pre: &[u8], per: &[u8]) -> EpSeq<Z2> {
    EpSeq::new(
        pre.iter().map(|&b| Z2::from(b == 1)).collect(),
        per.iter().map(|&b| Z2::from(b == 1)).collect(),
    )
}

/// Two linked roots, a preperiodic assignment, and distinct spine/other
/// patterns — every document feature the expander touches.
fn mixed_two_root_system() -> PatternSystem {
    let mut patterns = BTreeMap::new();
    patterns.insert("chain4".to_string(), Pattern::chain_of_unknots(4));
    patterns.insert("chain5".to_string(), Pattern::chain_of_unknots(5));
    patterns.insert(
        "clasp".to_string(),
        Pattern {
            children: vec![
                ChildSlot { winding: 0, knot: "unknot".into() },
                ChildSlot { winding: 2, knot: "trefoil".into() },
            ],
            edges: vec![PatternEdge { i: 0, j: 1, lk: 0, split: false }],
            arrangement: Arrangement::Custom,
            spine_child: Some(1),
        },
    );
    PatternSystem {
        roots: vec![
            RootSpec { id: "outer".into(), knot: "unknot".into(), spine: true },
            RootSpec { id: "inner".into(), knot: "trefoil".into(), spine: false },
        ],
        root_edges: vec![RootEdge { a: "inner".into(), b: "outer".into(), lk: 1, split: false }],
        patterns,
        assignment: Assignment {
            preperiod: vec![
                StageRule { spine: "chain5".into(), other: "chain4".into() },
                StageRule { spine: "clasp".into(), other: "chain4".into() },
            ],
            period: vec![
                StageRule { spine: "chain4".into(), other: "chain4".into() },
                StageRule { spine: "chain5".into(), other: "chain5".into() },
            ],
        },
    }
}

fn battery() -> Vec<(String, PatternSystem, u32)> {
    vec![
        ("chain4".into(), antoine_chain(4).unwrap().system, 4),
        ("chain5".into(), antoine_chain(5).unwrap().system, 3),
        (
            "spine mix".into(),
            antoine_from_target(&target(&[0, 1, 1, 0], &[1, 0])).unwrap().system,
            4,
        ),
        ("bing".into(), bing_pattern().system, 6),
        ("whitehead".into(), whitehead_pattern().system, 6),
        ("two roots".into(), mixed_two_root_system(), 4),
    ]
}

#[test]
fn expansion_matches_recursive_oracle() {
    for (name, ps, depth) in battery() {
        let stages = expand(&ps, depth, opts()).unwrap();
        assert_eq!(stages.len() as u32, depth + 1, "{name}: stage count");
        for m in 0..=depth {
            let got = &stages[m as usize];
            let want = oracle_stage(&ps, m);
            assert_eq!(got.nodes, want.nodes, "{name}: stage {m} nodes");
            assert_eq!(got.edges, want.edges, "{name}: stage {m} edges");
        }
    }
}

#[test]
fn count_descriptor_matches_enumerated_sizes() {
    for (name, ps, depth) in battery() {
        let counts = component_counts(&ps).unwrap();
        let stages = expand(&ps, depth, opts()).unwrap();
        let enumerated: Vec<BigUint> =
            stages.iter().map(|s| BigUint::from(s.nodes.len())).collect();
        assert_eq!(counts.values(depth as usize + 1), enumerated, "{name}: counts");
    }
}

#[test]
fn linking_sequence_matches_enumerated_parity() {
    for (name, ps, depth) in battery() {
        let l = mod2_linking_sequence(&ps).unwrap();
        let stages = expand(&ps, depth, opts()).unwrap();
        for sg in &stages {
            let want = Z2::from_parity(recount_linked(sg));
            assert_eq!(
                *l.value_at(sg.stage as usize),
                want,
                "{name}: stage {} linked-component parity",
                sg.stage
            );
        }
    }
}

#[test]
fn stage_ids_parse_back_to_parent_paths() {
    let ps = mixed_two_root_system();
    let stages = expand(&ps, 3, opts()).unwrap();
    for sg in &stages[1..] {
        for n in &sg.nodes {
            let (head, tail) = n.id.rsplit_once('.').expect("replacement ids carry a dot");
            assert_eq!(Some(head), n.parent.as_deref());
            tail.parse::<usize>().expect("child index is numeric");
        }
    }
}
