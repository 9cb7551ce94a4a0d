//! Constructors for the named families: Antoine chains, the spine
//! construction realizing a prescribed mod-2 linking target, and the
//! Bing/Whitehead slice fixtures.

use std::collections::BTreeMap;

use crate::model::{
    Arrangement, Assignment, ChildSlot, Pattern, PatternEdge, PatternSystem, RootSpec, StageRule,
};
use crate::seq::{ParitySeq, Z2};
use crate::{Error, Result};

/// A constructed system plus construction-time notes.
#[derive(Clone, Debug)]
pub struct GeneratedSystem {
    pub system: PatternSystem,
    /// Non-fatal caveats, e.g. that the construction fails admissibility.
    pub warnings: Vec<String>,
    /// Provenance of the slice property, when the family is a classical
    /// slice decomposition; consumed by slice certificates.
    pub slice_provenance: Option<String>,
}

fn single_root_system(patterns: BTreeMap<String, Pattern>, assignment: Assignment) -> PatternSystem {
    PatternSystem {
        roots: vec![RootSpec { id: "r0".into(), knot: "unknot".into(), spine: true }],
        root_edges: vec![],
        patterns,
        assignment,
    }
}

/// The uniform necklace system: one unknotted root, a cyclic chain of `k`
/// unknots applied everywhere at every stage.
///
/// `k >= 4` is admissible; `k = 3` is a legal document but fails the
/// at-least-four-children condition, so it is returned with a warning.
pub fn antoine_chain(k: usize) -> Result<GeneratedSystem> {
    if k < 3 {
        return Err(Error::Generator {
            message: format!("a chain needs at least 3 components, got {k}"),
        });
    }
    let name = format!("chain{k}");
    let mut patterns = BTreeMap::new();
    patterns.insert(name.clone(), Pattern::chain_of_unknots(k));
    let system = single_root_system(
        patterns,
        Assignment {
            preperiod: vec![],
            period: vec![StageRule { spine: name.clone(), other: name }],
        },
    );
    let warnings = if k == 3 {
        vec![
            "a chain of 3 puts fewer than four components in each parent, so the system \
             is not admissible"
                .to_string(),
        ]
    } else {
        Vec::new()
    };
    system.validate()?;
    Ok(GeneratedSystem { system, warnings, slice_provenance: None })
}

/// Spine construction realizing a prescribed mod-2 linking sequence.
///
/// The target must start with 0 (a single unlinked root contributes 0 at
/// index 0). Stage m applies chain5 on the spine when `l(m) = 1` and chain4
/// otherwise, chain4 off the spine; then the number of linked components at
/// stage m is 4·count(m−1) + l(m), which is ≡ l(m) (mod 2), so the
/// resulting mod-2 linking sequence equals `l` exactly.
pub fn antoine_from_target(l: &ParitySeq) -> Result<GeneratedSystem> {
    if *l.value_at(0) != Z2::ZERO {
        return Err(Error::Generator {
            message: "the target must start with 0: a single unlinked root always \
                      contributes an even count at index 0"
                .into(),
        });
    }
    let rule_for = |bit: &Z2| -> StageRule {
        StageRule {
            spine: if bit.is_one() { "chain5".into() } else { "chain4".into() },
            other: "chain4".into(),
        }
    };
    // The rule at assignment index i governs stage i + 1, so the target's
    // shape shifts left by one.
    let p = l.preperiod().len();
    let q = l.period().len();
    let (preperiod, period) = if p > 0 {
        (
            (1..p).map(|i| rule_for(l.value_at(i))).collect::<Vec<_>>(),
            (p..p + q).map(|i| rule_for(l.value_at(i))).collect::<Vec<_>>(),
        )
    } else {
        (vec![], (0..q).map(|j| rule_for(&l.period()[(j + 1) % q])).collect::<Vec<_>>())
    };

    let mut patterns = BTreeMap::new();
    patterns.insert("chain4".to_string(), Pattern::chain_of_unknots(4));
    let uses_chain5 =
        preperiod.iter().chain(&period).any(|r| r.spine == "chain5" || r.other == "chain5");
    if uses_chain5 {
        patterns.insert("chain5".to_string(), Pattern::chain_of_unknots(5));
    }
    let system = single_root_system(patterns, Assignment { preperiod, period });
    system.validate()?;
    Ok(GeneratedSystem { system, warnings: Vec::new(), slice_provenance: None })
}

/// The Bing construction: two unknots clasped inside the parent with
/// algebraic linking 0 (a declared non-split pair), winding 0 each.
///
/// Not admissible (2 children per parent, nobody linked to exactly two);
/// ships as a slice fixture.
pub fn bing_pattern() -> GeneratedSystem {
    let mut patterns = BTreeMap::new();
    patterns.insert(
        "bing".to_string(),
        Pattern {
            children: vec![
                ChildSlot { winding: 0, knot: "unknot".into() },
                ChildSlot { winding: 0, knot: "unknot".into() },
            ],
            edges: vec![PatternEdge { i: 0, j: 1, lk: 0, split: false }],
            arrangement: Arrangement::Custom,
            spine_child: Some(0),
        },
    );
    let system = single_root_system(
        patterns,
        Assignment {
            preperiod: vec![],
            period: vec![StageRule { spine: "bing".into(), other: "bing".into() }],
        },
    );
    GeneratedSystem {
        system,
        warnings: vec![
            "not admissible: each parent holds 2 children and no component has nonzero \
             algebraic linking"
                .to_string(),
        ],
        slice_provenance: Some("Bing double of the unknot is slice — Bing".to_string()),
    }
}

/// The Whitehead construction: one child per stage, winding 0, no linking.
///
/// Not admissible; ships as a slice fixture.
pub fn whitehead_pattern() -> GeneratedSystem {
    let mut patterns = BTreeMap::new();
    patterns.insert(
        "whitehead".to_string(),
        Pattern {
            children: vec![ChildSlot { winding: 0, knot: "unknot".into() }],
            edges: vec![],
            arrangement: Arrangement::Custom,
            spine_child: Some(0),
        },
    );
    let system = single_root_system(
        patterns,
        Assignment {
            preperiod: vec![],
            period: vec![StageRule { spine: "whitehead".into(), other: "whitehead".into() }],
        },
    );
    GeneratedSystem {
        system,
        warnings: vec![
            "not admissible: each parent holds a single child with no linking".to_string(),
        ],
        slice_provenance: Some("Whitehead decomposition is slice — Freedman".to_string()),
    }
}

// ---------------------------------------------------------------------------
