//! Concordance invariants: component counts, the mod-2 linking sequence,
//! the class-level map ν, disjoint union, and invariant-based comparison.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::model::{Assignment, Pattern, PatternSystem, RootEdge, RootSpec, StageRule};
use crate::seq::{lcm, EpSeq, ParitySeq, Z2};
use crate::{Error, Result};

/// Minimum number of explicitly materialized count values.
const MIN_PREFIX: usize = 12;

/// Window cap for comparing summed count sequences; beyond it the
/// comparison stays sound but may return `Undecided`.
const SUM_WINDOW_CAP: usize = 20_000;

// ---------------------------------------------------------------------------
// Component counts
// ---------------------------------------------------------------------------

/// The component-count sequence, exactly.
///
/// Counts grow without bound, so the sequence is held as an explicit prefix
/// (stages `0..prefix_len`) plus a periodic affine recurrence: for
/// `m >= prefix_len`,
/// `count(m) = multipliers[i]·count(m−1) + additive[i]` with
/// `i = (m − prefix_len) mod period`. The multiplier is the non-spine
/// pattern size and the additive term is (spine size − non-spine size),
/// reflecting that exactly one component per stage lies on the spine.
#[derive(Clone, Debug)]
pub struct CountSequence {
    prefix: Vec<BigUint>,
    multipliers: Vec<u64>,
    additive: Vec<i64>,
}

impl CountSequence {
    pub fn prefix(&self) -> &[BigUint] {
        &self.prefix
    }

    pub fn multipliers(&self) -> &[u64] {
        &self.multipliers
    }

    pub fn additive_terms(&self) -> &[i64] {
        &self.additive
    }

    /// The first `n` counts.
    pub fn values(&self, n: usize) -> Vec<BigUint> {
        let mut out: Vec<BigUint> = self.prefix.iter().take(n).cloned().collect();
        let q = self.multipliers.len();
        while out.len() < n {
            let i = (out.len() - self.prefix.len()) % q;
            // Evaluate as (prev − 1)·other_size + spine_size, which never
            // underflows: counts stay >= 1 because every pattern has a child.
            let o = self.multipliers[i];
            let s = (self.multipliers[i] as i64 + self.additive[i]) as u64;
            let prev = out.last().expect("prefix is never empty").clone();
            out.push((prev - 1u32) * o + s);
        }
        out
    }

    pub fn value_at(&self, m: usize) -> BigUint {
        self.values(m + 1).pop().expect("nonempty")
    }

    /// First index where the two count sequences differ, or `None` when
    /// they are equal at every index (decided exactly).
    pub fn first_difference(&self, other: &CountSequence) -> Option<usize> {
        match compare_count_sums(
            std::slice::from_ref(self),
            std::slice::from_ref(other),
            usize::MAX,
        ) {
            CountComparison::Differ(i) => Some(i),
            _ => None,
        }
    }
}

impl Serialize for CountSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        // Counts outgrow every fixed-width integer, so the prefix is
        // serialized as decimal strings.
        #[derive(Serialize)]
        struct Repr<'a> {
            prefix: Vec<String>,
            multipliers_per_period_stage: &'a [u64],
            additive_terms: &'a [i64],
        }
        Repr {
            prefix: self.prefix.iter().map(|v| v.to_string()).collect(),
            multipliers_per_period_stage: &self.multipliers,
            additive_terms: &self.additive,
        }
        .serialize(serializer)
    }
}

/// Outcome of an exact comparison of two sums of count sequences.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountComparison {
    /// First differing index.
    Differ(usize),
    /// Proven equal at every index.
    EqualProven,
    /// Equal on the capped window; equality not decided.
    Undecided,
}

/// Compares Σ of one family of count sequences against Σ of another.
///
/// Beyond the common stabilization point each summand follows, per phase
/// class of the common period Q, a closed form c·Mᵗ + (linear in t). The
/// difference of the two sums is an exponential polynomial with at most
/// (number of summands + 2) monomials per phase, so vanishing at that many
/// consecutive periods forces identical sequences; the window below adds
/// one period of margin. Windows above `cap` are truncated, trading the
/// proof of equality for `Undecided`.
pub fn compare_count_sums(
    a: &[CountSequence],
    b: &[CountSequence],
    cap: usize,
) -> CountComparison {
    let p_star = a.iter().chain(b).map(|c| c.prefix.len()).max().unwrap_or(1);
    let q = a.iter().chain(b).fold(1usize, |acc, c| lcm(acc, c.multipliers.len()));
    let terms = a.len() + b.len() + 3;
    let window = p_star.saturating_add(terms.saturating_mul(q));
    let capped = window > cap;
    let window = window.min(cap);

    let sum = |cs: &[CountSequence]| -> Vec<BigUint> {
        let mut acc = vec![BigUint::zero(); window];
        for c in cs {
            for (i, v) in c.values(window).into_iter().enumerate() {
                acc[i] += v;
            }
        }
        acc
    };
    let sa = sum(a);
    let sb = sum(b);
    match (0..window).find(|&i| sa[i] != sb[i]) {
        Some(i) => CountComparison::Differ(i),
        None if capped => CountComparison::Undecided,
        None => CountComparison::EqualProven,
    }
}

/// Computes the component-count sequence symbolically (no expansion).
pub fn component_counts(ps: &PatternSystem) -> Result<CountSequence> {
    ps.validate()?;
    // Per-stage data: (non-spine pattern size, spine pattern size).
    let pair = |r: &StageRule| -> (u64, u64) {
        (
            ps.pattern(&r.other).children.len() as u64,
            ps.pattern(&r.spine).children.len() as u64,
        )
    };
    let stream: EpSeq<(u64, u64)> = EpSeq::new(
        ps.assignment.preperiod.iter().map(pair).collect(),
        ps.assignment.period.iter().map(pair).collect(),
    );
    let pre_len = stream.preperiod().len();
    let q = stream.period().len();

    let prefix_len = (pre_len + 1).max(MIN_PREFIX);
    let mut prefix = Vec::with_capacity(prefix_len);
    prefix.push(BigUint::from(ps.roots.len()));
    for m in 1..prefix_len {
        let (o, s) = *stream.value_at(m - 1);
        let prev = prefix.last().expect("count(0) present").clone();
        prefix.push((prev - 1u32) * o + s);
    }
    // Rotate the period so descriptor index 0 lines up with stage prefix_len.
    let rot = (prefix_len - 1 - pre_len) % q;
    let multipliers = (0..q).map(|i| stream.period()[(rot + i) % q].0).collect();
    let additive = (0..q)
        .map(|i| {
            let (o, s) = stream.period()[(rot + i) % q];
            s as i64 - o as i64
        })
        .collect();
    Ok(CountSequence { prefix, multipliers, additive })
}

// ---------------------------------------------------------------------------
// Mod-2 linking sequence
// ---------------------------------------------------------------------------

/// Computes L: at each stage, the parity of the number of components having
/// nonzero algebraic linking with some other component.
///
/// Stage m >= 1 has exactly one spine component and count(m−1) − 1 others,
/// so the linked total is (count(m−1) − 1)·linked(O) + linked(S); its parity
/// depends only on the rule phase and the parity of count(m−1). That state
/// space is finite, so the sequence is exactly eventually periodic and the
/// cycle is detected by first state repetition.
pub fn mod2_linking_sequence(ps: &PatternSystem) -> Result<ParitySeq> {
    ps.validate()?;

    let mut linked_roots: BTreeSet<&str> = BTreeSet::new();
    for e in &ps.root_edges {
        if e.lk != 0 {
            linked_roots.insert(e.a.as_str());
            linked_roots.insert(e.b.as_str());
        }
    }
    let l0 = Z2::from_parity(linked_roots.len() as u64);

    let linked_children = |p: &Pattern| -> u64 {
        let mut touched = vec![false; p.children.len()];
        for e in &p.edges {
            if e.lk != 0 {
                touched[e.i] = true;
                touched[e.j] = true;
            }
        }
        touched.iter().filter(|&&t| t).count() as u64
    };

    let pre_len = ps.assignment.preperiod.len();
    let q = ps.assignment.period.len();
    let mut l_vals = vec![l0];
    let mut par = Z2::from_parity(ps.roots.len() as u64); // parity of count(m−1)
    let mut seen: BTreeMap<(usize, bool), usize> = BTreeMap::new();
    let mut m = 1usize;
    loop {
        let idx = m - 1;
        if idx >= pre_len {
            let state = ((idx - pre_len) % q, par.is_one());
            if let Some(&m0) = seen.get(&state) {
                let period = l_vals.split_off(m0);
                return Ok(EpSeq::new(l_vals, period));
            }
            seen.insert(state, m);
        }
        let rule = ps.assignment.rule_for_stage(m as u32);
        let o_pat = ps.pattern(&rule.other);
        let s_pat = ps.pattern(&rule.spine);
        let lo = Z2::from_parity(linked_children(o_pat));
        let ls = Z2::from_parity(linked_children(s_pat));
        let so = Z2::from_parity(o_pat.children.len() as u64);
        let ss = Z2::from_parity(s_pat.children.len() as u64);
        // linked(m) = (count(m−1) − 1)·linked(O) + linked(S)
        l_vals.push((par + Z2::ONE) * lo + ls);
        // count(m) = (count(m−1) − 1)·|O| + |S|
        par = (par + Z2::ONE) * so + ss;
        m += 1;
    }
}

// ---------------------------------------------------------------------------
// Formal classes and ν
// ---------------------------------------------------------------------------

/// A system declared slice, with the mandatory provenance of the claim.
#[derive(Clone, Debug)]
pub struct SliceCertificate {
    pub system: PatternSystem,
    pub provenance: String,
}

/// Unoriented bookkeeping token for a concordance class: a multiset of
/// representative systems plus declared slice certificates.
#[derive(Clone, Debug, Default)]
pub struct FormalClass {
    pub representatives: Vec<PatternSystem>,
    pub slice_certificates: Vec<SliceCertificate>,
}

impl FormalClass {
    pub fn of(ps: PatternSystem) -> FormalClass {
        FormalClass { representatives: vec![ps], slice_certificates: Vec::new() }
    }
}

/// ν: componentwise mod-2 sum of L over the representatives.
pub fn nu(class: &FormalClass) -> Result<ParitySeq> {
    nu_with_warnings(class).map(|(v, _)| v)
}

/// ν plus refutation warnings for slice certificates whose L is nonzero.
///
/// Certificates contribute zero to ν either way: slice systems have
/// vanishing L, and a nonzero value refutes the declaration rather than
/// changing the class arithmetic.
pub fn nu_with_warnings(class: &FormalClass) -> Result<(ParitySeq, Vec<String>)> {
    let mut acc = ParitySeq::zero();
    for ps in &class.representatives {
        acc = acc.xor(&mod2_linking_sequence(ps)?);
    }
    let mut warnings = Vec::new();
    for (i, cert) in class.slice_certificates.iter().enumerate() {
        let l = mod2_linking_sequence(&cert.system)?;
        if let Some(idx) = l.first_difference(&ParitySeq::zero()) {
            warnings.push(format!(
                "slice certificate {i} ({}) has nonzero mod-2 linking, first at index {idx}; \
                 the declaration is refuted (the system still contributes zero to ν)",
                cert.provenance
            ));
        }
    }
    Ok((acc, warnings))
}

// ---------------------------------------------------------------------------
// Disjoint union
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
struct ContentRule {
    spine: Pattern,
    other: Pattern,
}

fn content_stream(ps: &PatternSystem) -> EpSeq<ContentRule> {
    let resolve = |r: &StageRule| ContentRule {
        spine: ps.pattern(&r.spine).clone(),
        other: ps.pattern(&r.other).clone(),
    };
    EpSeq::new(
        ps.assignment.preperiod.iter().map(resolve).collect(),
        ps.assignment.period.iter().map(resolve).collect(),
    )
}

/// Returns the name of `pat` in `dict`, inserting it under `preferred`
/// (suffixed if taken) when no equal-content entry exists.
fn intern(dict: &mut BTreeMap<String, Pattern>, pat: &Pattern, preferred: &str) -> String {
    if let Some(name) = dict.iter().find(|(_, p)| *p == pat).map(|(n, _)| n.clone()) {
        return name;
    }
    let mut name = preferred.to_string();
    let mut n = 2;
    while dict.contains_key(&name) {
        name = format!("{preferred}_{n}");
        n += 1;
    }
    dict.insert(name.clone(), pat.clone());
    name
}

/// Disjoint union of two systems: roots side by side, no new linking.
///
/// Both component counts and L add exactly: counts componentwise, L by XOR.
/// The result keeps `a`'s spine; `b`'s former spine deviation is folded into
/// the single combined spine rule. When both spines deviate from the shared
/// non-spine pattern at the same stage, a combined spine chain of size
/// |Sa| + |Sb| − |O| is synthesized (all three must be chains of unknots);
/// if the two systems assign different non-spine patterns at some stage, or
/// the combined chain would need fewer than 3 components, the union is not
/// presentable in this document model and an error says so.
pub fn disjoint_union(a: &PatternSystem, b: &PatternSystem) -> Result<PatternSystem> {
    a.validate()?;
    b.validate()?;

    let sa = content_stream(a);
    let sb = content_stream(b);
    let p = sa.preperiod().len().max(sb.preperiod().len());
    let q = lcm(sa.period().len(), sb.period().len());

    let mut dict = a.patterns.clone();
    for (name, pat) in &b.patterns {
        intern(&mut dict, pat, name);
    }

    let mut rules = Vec::with_capacity(p + q);
    for i in 0..p + q {
        let ra = sa.value_at(i);
        let rb = sb.value_at(i);
        if ra.other != rb.other {
            return Err(Error::Union {
                message: format!(
                    "at stage {}, the systems assign different non-spine patterns; a single \
                     per-stage rule cannot present their union",
                    i + 1
                ),
            });
        }
        let other_name = intern(&mut dict, &ra.other, "other");
        let a_trivial = ra.spine == ra.other;
        let b_trivial = rb.spine == rb.other;
        let spine_name = match (a_trivial, b_trivial) {
            (true, true) => {
                if ra.other.spine_child.is_some() {
                    other_name.clone()
                } else {
                    let mut variant = ra.other.clone();
                    variant.spine_child = Some(0);
                    intern(&mut dict, &variant, &format!("{other_name}_spine"))
                }
            }
            (false, true) => intern(&mut dict, &ra.spine, "spine"),
            (true, false) => intern(&mut dict, &rb.spine, "spine"),
            (false, false) => {
                if !(ra.spine.is_chain_of_unknots()
                    && rb.spine.is_chain_of_unknots()
                    && ra.other.is_chain_of_unknots())
                {
                    return Err(Error::Union {
                        message: format!(
                            "at stage {}, both spines deviate from the shared pattern and the \
                             patterns are not all chains of unknots; no combined spine pattern \
                             exists in this model",
                            i + 1
                        ),
                    });
                }
                let k = (ra.spine.children.len() + rb.spine.children.len())
                    .checked_sub(ra.other.children.len());
                match k {
                    Some(k) if k >= 3 => {
                        intern(&mut dict, &Pattern::chain_of_unknots(k), &format!("chain{k}"))
                    }
                    _ => {
                        return Err(Error::Union {
                            message: format!(
                                "at stage {}, the combined spine chain would have fewer than 3 \
                                 components",
                                i + 1
                            ),
                        })
                    }
                }
            }
        };
        rules.push(StageRule { spine: spine_name, other: other_name });
    }

    let eps = EpSeq::new(rules[..p].to_vec(), rules[p..].to_vec());
    let assignment =
        Assignment { preperiod: eps.preperiod().to_vec(), period: eps.period().to_vec() };
    let used: BTreeSet<&String> = assignment
        .preperiod
        .iter()
        .chain(&assignment.period)
        .flat_map(|r| [&r.spine, &r.other])
        .collect();
    let patterns: BTreeMap<String, Pattern> =
        dict.into_iter().filter(|(n, _)| used.contains(n)).collect();

    let mut roots = a.roots.clone();
    let mut ids: BTreeSet<String> = roots.iter().map(|r| r.id.clone()).collect();
    let mut remap: BTreeMap<&str, String> = BTreeMap::new();
    for r in &b.roots {
        let mut id = r.id.clone();
        let mut n = 1;
        while ids.contains(&id) {
            id = if n == 1 { format!("{}_b", r.id) } else { format!("{}_b{n}", r.id) };
            n += 1;
        }
        ids.insert(id.clone());
        remap.insert(r.id.as_str(), id.clone());
        roots.push(RootSpec { id, knot: r.knot.clone(), spine: false });
    }
    let mut root_edges = a.root_edges.clone();
    for e in &b.root_edges {
        root_edges.push(RootEdge {
            a: remap[e.a.as_str()].clone(),
            b: remap[e.b.as_str()].clone(),
            lk: e.lk,
            split: e.split,
        });
    }

    let out = PatternSystem { roots, root_edges, patterns, assignment };
    out.validate()?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

/// What the implemented invariants can say about two classes. `Unknown`
/// means they agree here — never a claim that the classes coincide.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    DistinctByNu { witness: usize },
    DistinctByCounts { witness: usize },
    Unknown,
}

/// Compares two classes by ν first, then by summed component counts over
/// the representatives.
pub fn distinguish(a: &FormalClass, b: &FormalClass) -> Result<Verdict> {
    let na = nu(a)?;
    let nb = nu(b)?;
    if let Some(witness) = na.first_difference(&nb) {
        return Ok(Verdict::DistinctByNu { witness });
    }
    let ca: Vec<CountSequence> =
        a.representatives.iter().map(component_counts).collect::<Result<_>>()?;
    let cb: Vec<CountSequence> =
        b.representatives.iter().map(component_counts).collect::<Result<_>>()?;
    match compare_count_sums(&ca, &cb, SUM_WINDOW_CAP) {
        CountComparison::Differ(witness) => Ok(Verdict::DistinctByCounts { witness }),
        CountComparison::EqualProven | CountComparison::Undecided => Ok(Verdict::Unknown),
    }
}

// ---------------------------------------------------------------------------
