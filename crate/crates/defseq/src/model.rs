//! Document model for pattern systems and their expanded stage graphs.
//!
//! A `PatternSystem` finitely presents an infinite nested family of solid
//! tori: stage-0 roots with their linking edges, a dictionary of named
//! replacement patterns, and an eventually periodic assignment choosing
//! which pattern is applied inside each component at each stage.

use std::collections::{BTreeMap, BTreeSet};

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::Error;

// ---------------------------------------------------------------------------
// Expanded stages
// ---------------------------------------------------------------------------

/// One solid-torus component of an expanded stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusNode {
    /// Path-based identifier: root index, then child indices (`"0.2.1"`).
    pub id: String,
    /// Containing component at the previous stage; `None` for roots.
    pub parent: Option<String>,
    pub stage: u32,
    /// Algebraic winding of this torus's core in its parent (0 for roots,
    /// where no parent exists).
    pub winding: i64,
    pub knot_label: String,
    /// Marks the designated descent path used by the generators.
    pub spine_flag: bool,
}

/// Undirected linking edge between two same-stage nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageEdge {
    pub a: String,
    pub b: String,
    /// Algebraic linking number of the two cores in the ambient sphere.
    pub lk: i64,
    /// Declared geometrically separable (splitting number 0).
    pub split: bool,
}

/// A fully expanded stage: all components plus their linking edges.
///
/// Nodes appear in deterministic expansion order (roots in document order,
/// then children grouped by parent in child-index order); edges are sorted
/// by endpoint ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageGraph {
    pub stage: u32,
    pub nodes: Vec<TorusNode>,
    pub edges: Vec<StageEdge>,
}

impl StageGraph {
    /// Map from node id to its index in `nodes`.
    pub fn id_index(&self) -> BTreeMap<&str, usize> {
        self.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect()
    }

    /// Ids of the partners each node is linked to with nonzero `lk`.
    pub fn nonzero_partners(&self) -> BTreeMap<&str, BTreeSet<&str>> {
        let mut map: BTreeMap<&str, BTreeSet<&str>> =
            self.nodes.iter().map(|n| (n.id.as_str(), BTreeSet::new())).collect();
        for e in &self.edges {
            if e.lk != 0 {
                map.get_mut(e.a.as_str()).map(|s| s.insert(e.b.as_str()));
                map.get_mut(e.b.as_str()).map(|s| s.insert(e.a.as_str()));
            }
        }
        map
    }

    /// Nodes grouped by parent id (roots group under `None`).
    pub fn by_parent(&self) -> BTreeMap<Option<&str>, Vec<&TorusNode>> {
        let mut map: BTreeMap<Option<&str>, Vec<&TorusNode>> = BTreeMap::new();
        for n in &self.nodes {
            map.entry(n.parent.as_deref()).or_default().push(n);
        }
        map
    }

    /// Number of nodes incident to at least one nonzero-`lk` edge.
    pub fn linked_node_count(&self) -> usize {
        let mut linked: BTreeSet<&str> = BTreeSet::new();
        for e in &self.edges {
            if e.lk != 0 {
                linked.insert(e.a.as_str());
                linked.insert(e.b.as_str());
            }
        }
        linked.len()
    }
}

// ---------------------------------------------------------------------------
// Document types
// ---------------------------------------------------------------------------

/// A stage-0 component as written in a document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootSpec {
    pub id: String,
    pub knot: String,
    pub spine: bool,
}

/// Linking edge between two roots; serialized as `[idA, idB, lk, split]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootEdge {
    pub a: String,
    pub b: String,
    pub lk: i64,
    pub split: bool,
}

impl Serialize for RootEdge {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(4))?;
        seq.serialize_element(&self.a)?;
        seq.serialize_element(&self.b)?;
        seq.serialize_element(&self.lk)?;
        seq.serialize_element(&self.split)?;
        seq.end()
    }
}

/// One child slot of a pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChildSlot {
    pub winding: i64,
    pub knot: String,
}

/// Linking edge between two child slots; serialized as `[i, j, lk, split]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternEdge {
    pub i: usize,
    pub j: usize,
    pub lk: i64,
    pub split: bool,
}

impl Serialize for PatternEdge {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(4))?;
        seq.serialize_element(&self.i)?;
        seq.serialize_element(&self.j)?;
        seq.serialize_element(&self.lk)?;
        seq.serialize_element(&self.split)?;
        seq.end()
    }
}

/// How the children of a pattern sit inside the parent torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Arrangement {
    /// Children are cyclically ordered, each linking exactly its two cyclic
    /// neighbors (the necklace configuration).
    Chain,
    Custom,
}

/// A replacement pattern: the configuration instantiated inside a parent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pattern {
    pub children: Vec<ChildSlot>,
    pub edges: Vec<PatternEdge>,
    pub arrangement: Arrangement,
    /// Index of the child that continues the spine, if any.
    pub spine_child: Option<usize>,
}

impl Pattern {
    /// Cyclic chain of `k` unknots: neighbor lk alternates ±1 around the
    /// cycle, every winding is 1, child 0 continues the spine. Valid as a
    /// chain arrangement only for `k >= 3`.
    pub fn chain_of_unknots(k: usize) -> Pattern {
        Pattern {
            children: (0..k).map(|_| ChildSlot { winding: 1, knot: "unknot".into() }).collect(),
            edges: (0..k)
                .map(|i| PatternEdge {
                    i,
                    j: (i + 1) % k,
                    lk: if i % 2 == 0 { 1 } else { -1 },
                    split: false,
                })
                .collect(),
            arrangement: Arrangement::Chain,
            spine_child: Some(0),
        }
    }

    /// True when the pattern is a cyclic chain of unknots — the only shape
    /// the geometric realizer and the assumed-conditions check recognize.
    pub fn is_chain_of_unknots(&self) -> bool {
        self.arrangement == Arrangement::Chain
            && self.children.iter().all(|c| c.knot == "unknot")
    }

    /// Validates the single-cycle chain shape: every child linked to exactly
    /// its two cyclic neighbors with nonzero `lk`, at least 3 children.
    fn check_chain_shape(&self) -> Result<(), String> {
        let n = self.children.len();
        if n < 3 {
            return Err(format!("chain arrangement needs >= 3 children, found {n}"));
        }
        if self.edges.len() != n {
            return Err(format!(
                "chain arrangement needs exactly {n} edges (one cycle), found {}",
                self.edges.len()
            ));
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in &self.edges {
            if e.lk == 0 {
                return Err(format!("chain edge [{}, {}] has lk = 0", e.i, e.j));
            }
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        if let Some(v) = (0..n).find(|&v| adj[v].len() != 2) {
            return Err(format!("child {v} has {} linked neighbors, chain needs 2", adj[v].len()));
        }
        // Degree 2 everywhere with n edges: a single cycle iff connected.
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        if count != n {
            return Err("chain edges split into more than one cycle".into());
        }
        Ok(())
    }
}

/// Per-stage rule: which pattern the spine component receives and which
/// pattern every other component receives.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageRule {
    pub spine: String,
    pub other: String,
}

/// Eventually periodic assignment of per-stage rules. The rule at list
/// index `m - 1` governs the construction of stage `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Assignment {
    pub preperiod: Vec<StageRule>,
    pub period: Vec<StageRule>,
}

impl Assignment {
    /// Rule applied when building stage `m` (requires `m >= 1`).
    pub fn rule_for_stage(&self, m: u32) -> &StageRule {
        assert!(m >= 1, "stage-0 components come from roots, not rules");
        let idx = (m - 1) as usize;
        if idx < self.preperiod.len() {
            &self.preperiod[idx]
        } else {
            &self.period[(idx - self.preperiod.len()) % self.period.len()]
        }
    }
}

/// Finite presentation of an infinite toroidal defining sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternSystem {
    pub roots: Vec<RootSpec>,
    pub root_edges: Vec<RootEdge>,
    pub patterns: BTreeMap<String, Pattern>,
    pub assignment: Assignment,
}

impl PatternSystem {
    /// Checks every semantic invariant, reporting the first violation with
    /// a path into the document.
    pub fn validate(&self) -> Result<(), Error> {
        let fail = |path: &str, message: String| {
            Err(Error::Semantic { path: path.to_string(), message })
        };

        if self.roots.is_empty() {
            return fail("/roots", "at least one root is required".into());
        }
        let mut root_ids = BTreeSet::new();
        for (i, r) in self.roots.iter().enumerate() {
            if r.id.is_empty() {
                return fail(&format!("/roots/{i}/id"), "root id must be nonempty".into());
            }
            if !root_ids.insert(r.id.as_str()) {
                return fail(&format!("/roots/{i}/id"), format!("duplicate root id {:?}", r.id));
            }
        }
        let spine_count = self.roots.iter().filter(|r| r.spine).count();
        if spine_count != 1 {
            return fail(
                "/roots",
                format!("exactly one root must set spine, found {spine_count}"),
            );
        }

        let mut root_pairs = BTreeSet::new();
        for (i, e) in self.root_edges.iter().enumerate() {
            let path = format!("/root_edges/{i}");
            for id in [&e.a, &e.b] {
                if !root_ids.contains(id.as_str()) {
                    return fail(&path, format!("edge endpoint {id:?} is not a root id"));
                }
            }
            if e.a == e.b {
                return fail(&path, "edge endpoints must differ".into());
            }
            if e.lk != 0 && e.split {
                return fail(&path, "nonzero lk contradicts split = true".into());
            }
            let key = if e.a <= e.b { (e.a.clone(), e.b.clone()) } else { (e.b.clone(), e.a.clone()) };
            if !root_pairs.insert(key) {
                return fail(&path, format!("duplicate edge between {:?} and {:?}", e.a, e.b));
            }
        }

        for (name, p) in &self.patterns {
            let base = format!("/patterns/{name}");
            if name.is_empty() {
                return fail("/patterns", "pattern names must be nonempty".into());
            }
            if p.children.is_empty() {
                return fail(
                    &format!("{base}/children"),
                    "every pattern needs at least one child (each component must \
                     contain a next-stage component)"
                        .into(),
                );
            }
            let n = p.children.len();
            let mut pairs = BTreeSet::new();
            for (k, e) in p.edges.iter().enumerate() {
                let path = format!("{base}/edges/{k}");
                if e.i >= n || e.j >= n {
                    return fail(&path, format!("child index out of range (children: {n})"));
                }
                if e.i == e.j {
                    return fail(&path, "edge endpoints must differ".into());
                }
                if e.lk != 0 && e.split {
                    return fail(&path, "nonzero lk contradicts split = true".into());
                }
                if !pairs.insert((e.i.min(e.j), e.i.max(e.j))) {
                    return fail(&path, format!("duplicate edge between {} and {}", e.i, e.j));
                }
            }
            if let Some(sc) = p.spine_child {
                if sc >= n {
                    return fail(
                        &format!("{base}/spine_child"),
                        format!("spine_child {sc} out of range (children: {n})"),
                    );
                }
            }
            if p.arrangement == Arrangement::Chain {
                if let Err(msg) = p.check_chain_shape() {
                    return fail(&base, msg);
                }
            }
        }

        if self.assignment.period.is_empty() {
            return fail("/assignment/period", "assignment period must be nonempty".into());
        }
        let lists = [("preperiod", &self.assignment.preperiod), ("period", &self.assignment.period)];
        for (list_name, rules) in lists {
            for (i, rule) in rules.iter().enumerate() {
                for (slot, pname) in [("spine", &rule.spine), ("other", &rule.other)] {
                    let path = format!("/assignment/{list_name}/{i}/{slot}");
                    let Some(p) = self.patterns.get(pname) else {
                        return fail(&path, format!("unknown pattern {pname:?}"));
                    };
                    if slot == "spine" && p.spine_child.is_none() {
                        return fail(
                            &format!("/patterns/{pname}/spine_child"),
                            "pattern used on the spine must designate a spine child".into(),
                        );
                    }
                }
            }
        }
        Ok(())
    }

    /// Index of the unique spine root (valid systems have exactly one).
    pub fn spine_root_index(&self) -> usize {
        self.roots
            .iter()
            .position(|r| r.spine)
            .expect("validated systems have exactly one spine root")
    }

    pub fn pattern(&self, name: &str) -> &Pattern {
        self.patterns
            .get(name)
            .unwrap_or_else(|| panic!("validated systems resolve pattern {name:?}"))
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn chain_pattern(k: usize) -> Pattern {
        let edges = (0..k)
            .map(|i| PatternEdge {
                i,
                j: (i + 1) % k,
                lk: if i % 2 == 0 { 1 } else { -1 },
                split: false,
            })
            .collect();
        Pattern {
            children: (0..k).map(|_| ChildSlot { winding: 1, knot: "unknot".into() }).collect(),
            edges,
            arrangement: Arrangement::Chain,
            spine_child: Some(0),
        }
    }

    pub(crate) fn chain_system(k: usize) -> PatternSystem {
        let mut patterns = BTreeMap::new();
        patterns.insert(format!("chain{k}"), chain_pattern(k));
        PatternSystem {
            roots: vec![RootSpec { id: "r".into(), knot: "unknot".into(), spine: true }],
            root_edges: vec![],
            patterns,
            assignment: Assignment {
                preperiod: vec![],
                period: vec![StageRule {
                    spine: format!("chain{k}"),
                    other: format!("chain{k}"),
                }],
            },
        }
    }

    #[test]
    fn chain_system_validates() {
        assert!(chain_system(4).validate().is_ok());
        assert!(chain_system(3).validate().is_ok()); // shape is legal; admissibility rejects it
    }

    fn expect_semantic(ps: &PatternSystem, want_path: &str) {
        match ps.validate() {
            Err(Error::Semantic { path, .. }) => {
                assert_eq!(path, want_path, "unexpected violation path")
            }
            other => panic!("expected semantic violation at {want_path}, got {other:?}"),
        }
    }

    #[test]
    fn validation_rejects_dangling_pattern_name() {
        let mut ps = chain_system(4);
        ps.assignment.period[0].other = "chainX".into();
        expect_semantic(&ps, "/assignment/period/0/other");
    }

    #[test]
    fn validation_rejects_missing_spine_root() {
        let mut ps = chain_system(4);
        ps.roots[0].spine = false;
        expect_semantic(&ps, "/roots");
    }

    #[test]
    fn validation_rejects_spine_pattern_without_spine_child() {
        let mut ps = chain_system(4);
        ps.patterns.get_mut("chain4").unwrap().spine_child = None;
        expect_semantic(&ps, "/patterns/chain4/spine_child");
    }

    #[test]
    fn validation_rejects_contradictory_split_flag() {
        let mut ps = chain_system(4);
        ps.root_edges = vec![RootEdge { a: "r".into(), b: "r".into(), lk: 1, split: false }];
        expect_semantic(&ps, "/root_edges/0");
        ps.root_edges.clear();
        ps.patterns.get_mut("chain4").unwrap().edges[0].split = true;
        expect_semantic(&ps, "/patterns/chain4/edges/0");
    }

    #[test]
    fn chain_shape_must_be_one_full_cycle() {
        let mut ps = chain_system(4);
        // Zeroing one lk breaks the chain contract.
        ps.patterns.get_mut("chain4").unwrap().edges[0].lk = 0;
        expect_semantic(&ps, "/patterns/chain4");

        // Two disjoint 3-cycles are rejected even though every degree is 2.
        let mut ps = chain_system(6);
        {
            let p = ps.patterns.get_mut("chain6").unwrap();
            p.edges = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]
                .iter()
                .map(|&(i, j)| PatternEdge { i, j, lk: 1, split: false })
                .collect();
        }
        expect_semantic(&ps, "/patterns/chain6");

        // Dropping an edge leaves a degree-1 child.
        let mut ps = chain_system(4);
        ps.patterns.get_mut("chain4").unwrap().edges.pop();
        expect_semantic(&ps, "/patterns/chain4");
    }

    #[test]
    fn rule_lookup_follows_preperiod_then_cycle() {
        let mk = |s: &str| StageRule { spine: s.into(), other: s.into() };
        let a = Assignment { preperiod: vec![mk("p"), mk("q")], period: vec![mk("x"), mk("y")] };
        let got: Vec<&str> = (1..=7).map(|m| a.rule_for_stage(m).spine.as_str()).collect();
        assert_eq!(got, ["p", "q", "x", "y", "x", "y", "x"]);
    }

    #[test]
    fn edge_tuples_serialize_as_arrays() {
        let e = RootEdge { a: "a".into(), b: "b".into(), lk: -1, split: false };
        assert_eq!(serde_json::to_string(&e).unwrap(), r#"["a","b",-1,false]"#);
        let pe = PatternEdge { i: 0, j: 3, lk: 1, split: false };
        assert_eq!(serde_json::to_string(&pe).unwrap(), "[0,3,1,false]");
    }
}
