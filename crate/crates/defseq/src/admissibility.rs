//! Admissibility checking and the certifying component-bijection verifier.
//!
//! Conditions (1) and (2) are decided combinatorially on expanded stages;
//! conditions (3) and (4) are geometric statements about the infinite
//! intersection, so they are reported as declared assumptions for the one
//! shape whose classical geometry is understood (chains of unknots) and as
//! not checkable otherwise.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::expand::{expand, ExpandOptions};
use crate::model::{Arrangement, PatternSystem, StageGraph};
use crate::{Error, Result};

const TRACE_CAP: usize = 60;

// ---------------------------------------------------------------------------
// Admissibility report
// ---------------------------------------------------------------------------

/// Status of one admissibility condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ConditionStatus {
    Satisfied,
    Violated { trace: Vec<String> },
    Assumed { declaration: String },
    NotCheckable { reason: String },
}

impl ConditionStatus {
    pub fn is_violated(&self) -> bool {
        matches!(self, ConditionStatus::Violated { .. })
    }

    pub fn is_satisfied(&self) -> bool {
        matches!(self, ConditionStatus::Satisfied)
    }
}

/// Per-condition verdicts plus the aggregate "admissible modulo assumptions".
#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityReport {
    pub depth: u32,
    pub condition1: ConditionStatus,
    pub condition2: ConditionStatus,
    pub condition3: ConditionStatus,
    pub condition4: ConditionStatus,
    /// True iff nothing is violated and conditions (1), (2) are satisfied.
    pub overall: bool,
}

fn cap_trace(mut trace: Vec<String>) -> Vec<String> {
    if trace.len() > TRACE_CAP {
        let extra = trace.len() - TRACE_CAP;
        trace.truncate(TRACE_CAP);
        trace.push(format!("... and {extra} further violations"));
    }
    trace
}

/// Checks the four admissibility conditions on stages `1..=depth`.
///
/// Condition (1): every parent holds at least four components, every
/// component is linked (nonzero lk) to exactly two others, and every
/// zero-lk pair is declared split. Condition (2) is decided through its
/// structural proxy: chain arrangement with all windings nonzero; zero
/// winding inside a chain is a violation, non-chain patterns are not
/// checkable. Conditions (3), (4) are assumed for chains of unknots.
pub fn check_admissible(
    ps: &PatternSystem,
    depth: u32,
    opts: ExpandOptions,
) -> Result<AdmissibilityReport> {
    ps.validate()?;
    if depth == 0 {
        let nc = |_: ()| ConditionStatus::NotCheckable {
            reason: "depth 0 inspects no replacement stage".into(),
        };
        return Ok(AdmissibilityReport {
            depth,
            condition1: nc(()),
            condition2: nc(()),
            condition3: nc(()),
            condition4: nc(()),
            overall: false,
        });
    }

    let stages = expand(ps, depth, opts)?;

    // Condition (1), per replacement stage.
    let mut c1 = Vec::new();
    for sg in &stages[1..] {
        for (parent, children) in sg.by_parent() {
            let parent = parent.expect("replacement stages have parents");
            if children.len() < 4 {
                c1.push(format!(
                    "condition (1): stage {}, parent {} holds {} components — at least four \
                     are required",
                    sg.stage,
                    parent,
                    children.len()
                ));
            }
        }
        let partners = sg.nonzero_partners();
        for n in &sg.nodes {
            let k = partners[n.id.as_str()].len();
            if k != 2 {
                c1.push(format!(
                    "condition (1): stage {}, component {} is linked to {} other components — \
                     exactly two are required",
                    sg.stage, n.id, k
                ));
            }
        }
        for e in &sg.edges {
            if e.lk == 0 && !e.split {
                c1.push(format!(
                    "condition (1): stage {}, components {} and {} have zero algebraic linking \
                     but are not declared split",
                    sg.stage, e.a, e.b
                ));
            }
        }
    }
    let condition1 = if c1.is_empty() {
        ConditionStatus::Satisfied
    } else {
        ConditionStatus::Violated { trace: cap_trace(c1) }
    };

    // Condition (2) on the patterns actually applied within the depth.
    let mut used: BTreeSet<&str> = BTreeSet::new();
    for m in 1..=depth {
        let rule = ps.assignment.rule_for_stage(m);
        used.insert(&rule.spine);
        used.insert(&rule.other);
    }
    let mut c2 = Vec::new();
    let mut c2_unchecked: Option<String> = None;
    for name in &used {
        let p = ps.pattern(name);
        if p.arrangement == Arrangement::Chain {
            for (i, child) in p.children.iter().enumerate() {
                if child.winding == 0 {
                    c2.push(format!(
                        "condition (2): pattern {name:?} child {i} has winding 0 — a chain \
                         component null-homotopic in its parent is forbidden"
                    ));
                }
            }
        } else {
            c2_unchecked = Some(format!(
                "pattern {name:?} is not a chain arrangement; the null-homotopy condition has \
                 no structural proxy here"
            ));
        }
    }
    let condition2 = if !c2.is_empty() {
        ConditionStatus::Violated { trace: cap_trace(c2) }
    } else if let Some(reason) = c2_unchecked {
        ConditionStatus::NotCheckable { reason }
    } else {
        ConditionStatus::Satisfied
    };

    // Conditions (3), (4): assumed for the classical necklace shape.
    let c34 = if used.iter().all(|n| ps.pattern(n).is_chain_of_unknots()) {
        ConditionStatus::Assumed {
            declaration: "all applied patterns are cyclic chains of unknots; the classical \
                          necklace geometry satisfies this condition"
                .into(),
        }
    } else {
        ConditionStatus::NotCheckable {
            reason: "no recognized geometric certificate beyond chains of unknots".into(),
        }
    };

    let overall = condition1.is_satisfied() && condition2.is_satisfied();
    Ok(AdmissibilityReport {
        depth,
        condition1,
        condition2,
        condition3: c34.clone(),
        condition4: c34,
        overall,
    })
}

// ---------------------------------------------------------------------------
// Nesting relations
// ---------------------------------------------------------------------------

/// Direction of one containment between the two compared families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum NestingTag {
    CInsideD,
    DInsideC,
}

/// One declared containment between a c-family and a d-family component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestingPair {
    pub c: String,
    pub d: String,
    pub tag: NestingTag,
}

/// The post-isotopy containment relation between two same-stage families.
///
/// The geometric normalization that produces it (boundary intersections
/// removed, trivial annuli eliminated) is an isotopy argument with no
/// combinatorial state; the verifier consumes its result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestingRelation {
    pub stage: u32,
    pub pairs: Vec<NestingPair>,
}

/// A verified one-to-one correspondence between the two component sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BijectionCertificate {
    /// Matched (c-node, d-node) pairs, sorted by c-node id.
    pub matching: Vec<(String, String)>,
    /// The proof rules applied to reach the certificate.
    pub log: Vec<String>,
}

/// Result of the bijection verifier: a certificate or a refutation trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum BijectionOutcome {
    Certificate(BijectionCertificate),
    Violation { trace: Vec<String> },
}

/// Family marker for verifier-internal node references.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Fam {
    C,
    D,
}

impl Fam {
    fn label(self) -> &'static str {
        match self {
            Fam::C => "C",
            Fam::D => "D",
        }
    }
}

type NodeRef<'a> = (Fam, &'a str);

fn show(n: NodeRef<'_>) -> String {
    format!("{}:{}", n.0.label(), n.1)
}

/// Decides whether the two stages' components correspond one-to-one,
/// given the declared nesting relation.
///
/// Rules, in order: (a) a component unrelated to the whole other family
/// refutes correspondence; (b) a contained component with winding 0 is
/// null-homotopic where an essential curve is required; (c) a component
/// containing two or more components of the other family lets nonzero
/// linking propagate through containments (linking with an essential inner
/// curve and linking with its container force each other) until some
/// component is linked to three members of its own family, contradicting
/// condition (1); (d) otherwise the relation is itself the bijection.
pub fn verify_component_bijection(
    c_stage: &StageGraph,
    d_stage: &StageGraph,
    rel: &NestingRelation,
) -> Result<BijectionOutcome> {
    let relation_err = |message: String| Error::Relation { message };

    let c_nodes: BTreeMap<&str, i64> =
        c_stage.nodes.iter().map(|n| (n.id.as_str(), n.winding)).collect();
    let d_nodes: BTreeMap<&str, i64> =
        d_stage.nodes.iter().map(|n| (n.id.as_str(), n.winding)).collect();

    // Validate the relation: no dangling ids, no repeated pair, each node
    // inside at most one other, and nobody both container and contained
    // (that would nest two same-family components).
    let mut inside: BTreeMap<NodeRef, NodeRef> = BTreeMap::new();
    let mut seen_pairs: BTreeSet<(&str, &str)> = BTreeSet::new();
    for p in &rel.pairs {
        if !c_nodes.contains_key(p.c.as_str()) {
            return Err(relation_err(format!("unknown c-family component {:?}", p.c)));
        }
        if !d_nodes.contains_key(p.d.as_str()) {
            return Err(relation_err(format!("unknown d-family component {:?}", p.d)));
        }
        if !seen_pairs.insert((p.c.as_str(), p.d.as_str())) {
            return Err(relation_err(format!(
                "pair ({:?}, {:?}) appears more than once",
                p.c, p.d
            )));
        }
        let (inner, outer) = match p.tag {
            NestingTag::CInsideD => ((Fam::C, p.c.as_str()), (Fam::D, p.d.as_str())),
            NestingTag::DInsideC => ((Fam::D, p.d.as_str()), (Fam::C, p.c.as_str())),
        };
        if let Some(prev) = inside.insert(inner, outer) {
            return Err(relation_err(format!(
                "{} is declared inside both {} and {}, but same-stage components are disjoint",
                show(inner),
                show(prev),
                show(outer)
            )));
        }
    }
    for outer in inside.values() {
        if inside.contains_key(outer) {
            return Err(relation_err(format!(
                "{} is both contained and a container; the containment chain would nest two \
                 components of one family",
                show(*outer)
            )));
        }
    }

    // Rule (a): every component must meet the other family somewhere.
    let mut related: BTreeSet<NodeRef> = BTreeSet::new();
    for p in &rel.pairs {
        related.insert((Fam::C, p.c.as_str()));
        related.insert((Fam::D, p.d.as_str()));
    }
    let mut unrelated: Vec<String> = Vec::new();
    for (fam, ids) in [(Fam::C, &c_nodes), (Fam::D, &d_nodes)] {
        for id in ids.keys() {
            if !related.contains(&(fam, id)) {
                unrelated.push(format!(
                    "rule (a): component {} is disjoint from every component of the other \
                     family, so the families cannot bound a correspondence",
                    show((fam, id))
                ));
            }
        }
    }
    if !unrelated.is_empty() {
        return Ok(BijectionOutcome::Violation { trace: cap_trace(unrelated) });
    }

    // Rule (b): contained components must be essential.
    for (inner, outer) in &inside {
        let w = match inner.0 {
            Fam::C => c_nodes[inner.1],
            Fam::D => d_nodes[inner.1],
        };
        if w == 0 {
            return Ok(BijectionOutcome::Violation {
                trace: vec![format!(
                    "rule (b): component {} lies inside {} with winding 0 — it can be shrunk \
                     to a point, so the nesting carries no correspondence",
                    show(*inner),
                    show(*outer)
                )],
            });
        }
    }

    // Rule (c): multiply-contained components propagate linking.
    let mut contains: BTreeMap<NodeRef, Vec<NodeRef>> = BTreeMap::new();
    for (inner, outer) in &inside {
        contains.entry(*outer).or_default().push(*inner);
    }
    let multi: Vec<(&NodeRef, &Vec<NodeRef>)> =
        contains.iter().filter(|(_, inners)| inners.len() >= 2).collect();
    if !multi.is_empty() {
        let mut log: Vec<String> = multi
            .iter()
            .map(|(outer, inners)| {
                format!(
                    "rule (c): {} contains {} components of the other family ({})",
                    show(**outer),
                    inners.len(),
                    inners.iter().map(|i| show(*i)).collect::<Vec<_>>().join(", ")
                )
            })
            .collect();

        // Seed linking facts with each family's own nonzero-lk edges.
        fn add_link<'a>(
            links: &mut BTreeMap<NodeRef<'a>, BTreeSet<NodeRef<'a>>>,
            x: NodeRef<'a>,
            y: NodeRef<'a>,
        ) {
            links.entry(x).or_default().insert(y);
            links.entry(y).or_default().insert(x);
        }
        let mut links: BTreeMap<NodeRef, BTreeSet<NodeRef>> = BTreeMap::new();
        for (fam, sg) in [(Fam::C, c_stage), (Fam::D, d_stage)] {
            for e in &sg.edges {
                if e.lk != 0 {
                    add_link(&mut links, (fam, e.a.as_str()), (fam, e.b.as_str()));
                }
            }
        }

        // Propagate: for an essential inner ⊂ outer and any z outside the
        // container, lk(z, inner) = winding·lk(z, outer), so nonzero linking
        // transfers both ways.
        loop {
            let mut added = false;
            for (&inner, &outer) in &inside {
                for (from, to) in [(inner, outer), (outer, inner)] {
                    let partners: Vec<NodeRef> =
                        links.get(&from).map(|s| s.iter().copied().collect()).unwrap_or_default();
                    for z in partners {
                        if z == to || inside.get(&z) == Some(&outer) {
                            continue;
                        }
                        let known = links.get(&to).map_or(false, |s| s.contains(&z));
                        if !known {
                            add_link(&mut links, z, to);
                            log.push(format!(
                                "rule (c): {} is essential in {}, so {}–{} linking forces \
                                 {}–{} linking",
                                show(inner),
                                show(outer),
                                show(z),
                                show(from),
                                show(z),
                                show(to)
                            ));
                            added = true;
                        }
                    }
                }
            }
            if !added {
                break;
            }
        }

        // Contradiction: three linked partners within one family.
        for (node, partners) in &links {
            let own: Vec<&NodeRef> = partners.iter().filter(|p| p.0 == node.0).collect();
            if own.len() >= 3 {
                log.push(format!(
                    "component {} is linked to {} components of its own family ({}), \
                     contradicting condition (1): linked to exactly two",
                    show(*node),
                    own.len(),
                    own.iter().map(|p| show(**p)).collect::<Vec<_>>().join(", ")
                ));
                return Ok(BijectionOutcome::Violation { trace: cap_trace(log) });
            }
        }
        log.push(
            "no explicit third linking was derivable, but the multiply-contained components \
             can only correspond to their common container, so no one-to-one correspondence \
             exists"
                .to_string(),
        );
        return Ok(BijectionOutcome::Violation { trace: cap_trace(log) });
    }

    // Rule (d): with no unrelated and no multiply-contained components,
    // every component sits in exactly one pair — the relation is the
    // bijection (in particular both families have equal size).
    let mut matching: Vec<(String, String)> =
        rel.pairs.iter().map(|p| (p.c.clone(), p.d.clone())).collect();
    matching.sort();
    Ok(BijectionOutcome::Certificate(BijectionCertificate {
        matching,
        log: vec![
            "rule (d): every component relates to exactly one component of the other family; \
             the relation itself is the correspondence"
                .to_string(),
        ],
    }))
}

// ---------------------------------------------------------------------------
