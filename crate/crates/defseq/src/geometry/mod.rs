//! Explicit R³ placements of chain-type stages, numeric certification of
//! the defining-sequence axioms, and mesh export.
//!
//! The layout realizes each replacement stage as a compact cluster of `k`
//! round circles anchored on the parent core, cyclically interlocked. The
//! scaffold depends on `k`: a balanced column for `k = 3` (centers stacked
//! on one axis, planes at mutual 120°, pairwise clearance √(3/7) per unit
//! ring radius), a crown for `k = 4` (centers at ⅓ radius with alternating
//! ±√2/3 axial offsets, planes radial — every pairwise clearance is exactly
//! 2/3, which numerical search over free configurations did not beat), and
//! a twisted bead chain around a guide circle for `k ≥ 5`. Tube radii are
//! capped at 45% of the measured scaffold clearance so that certified
//! disjointness always holds with ~10% headroom. Each child cluster lies
//! strictly inside its parent tube, so disjointness across parents is
//! inherited from the parent stage. The certifier measures, rather than
//! trusts, all of this: same-stage core distances, sampled tube
//! containment, and Gauss linking numbers.

pub mod vec3;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::expand::{expand, ExpandOptions};
use crate::model::PatternSystem;
use crate::{Error, Real, Result};
use vec3::{circle, linking_number, point_polyline_distance, polyline_min_distance, Vec3};

/// Segments per core circle (vertex count is one more: the core is closed).
const CORE_SEGMENTS: usize = 256;
/// Tube radius as a fraction of the measured minimum sibling clearance.
/// Two tubes of this fill factor consume 90% of the clearance, leaving 10%
/// as certified margin.
const TUBE_FILL: Real = 0.45;
/// Smallest allowed cluster spread multiplier. When a cluster cannot fit
/// its parent tube at any spread (oversized `shrink`), beads are laid out
/// at this spread and the overlap check reports the collision honestly.
const SPREAD_FLOOR: Real = 0.05;
/// Same-stage cores must clear each other by more than this beyond the sum
/// of tube radii.
pub const DISJOINT_TOLERANCE: Real = 1e-6;
/// Sampled child-tube points must sit deeper than this inside the parent.
pub const CONTAINMENT_TOLERANCE: Real = 1e-6;
/// Gauss linking numbers must land within this of their target.
pub const LINKING_TOLERANCE: Real = 1e-3;
/// Containment sampling resolution: 40 core stations × 25 meridian angles.
const CONTAIN_CORE_SAMPLES: usize = 40;
const CONTAIN_MERIDIAN_SAMPLES: usize = 25;

type V3 = Vec3<Real>;

// ---------------------------------------------------------------------------
// Placements
// ---------------------------------------------------------------------------

/// One solid torus in model units: a closed core polyline (first vertex
/// repeated at the end, ≥ 64 vertices when generated here) plus a tube
/// radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusPlacement {
    pub id: String,
    pub core: Vec<[Real; 3]>,
    #[serde(rename = "radius")]
    pub tube_radius: Real,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlacementsDoc {
    tori: Vec<TorusPlacement>,
}

/// Serializes placements as the `{"tori": [...]}` interchange document.
pub fn placements_to_json(placements: &[TorusPlacement]) -> String {
    let doc = PlacementsDoc { tori: placements.to_vec() };
    let mut s = serde_json::to_string_pretty(&doc).expect("placements serialize");
    s.push('\n');
    s
}

/// Parses and validates a `{"tori": [...]}` document.
pub fn parse_placements(text: &str) -> Result<Vec<TorusPlacement>> {
    let doc: PlacementsDoc = serde_json::from_str(text)?;
    for t in &doc.tori {
        validate_placement(t)?;
    }
    Ok(doc.tori)
}

fn validate_placement(t: &TorusPlacement) -> Result<()> {
    let layout = |message: String| Error::Layout { message };
    if t.core.len() < 4 {
        return Err(layout(format!("torus {:?}: core needs at least 4 vertices", t.id)));
    }
    if t.core.first() != t.core.last() {
        return Err(layout(format!(
            "torus {:?}: core must be closed (first vertex repeated at the end)",
            t.id
        )));
    }
    if !(t.tube_radius > 0.0) || !t.tube_radius.is_finite() {
        return Err(layout(format!("torus {:?}: tube radius must be positive", t.id)));
    }
    if t.core.iter().flatten().any(|c| !c.is_finite()) {
        return Err(layout(format!("torus {:?}: core has non-finite coordinates", t.id)));
    }
    Ok(())
}

fn core_points(t: &TorusPlacement) -> Vec<V3> {
    t.core.iter().map(|&a| Vec3::from_array(a)).collect()
}

// ---------------------------------------------------------------------------
// Embedding
// ---------------------------------------------------------------------------

/// Layout parameters. `shrink` scales a child ring radius relative to the
/// parent tube radius; `tube_ratio` is every torus's tube radius relative
/// to its own ring radius (the root ring radius is 1, so the root tube
/// radius equals `tube_ratio`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EmbedParams {
    pub shrink: Real,
    pub tube_ratio: Real,
}

impl Default for EmbedParams {
    fn default() -> Self {
        EmbedParams { shrink: 0.22, tube_ratio: 0.35 }
    }
}

/// A placed (but not yet discretized) torus: exact circle data.
#[derive(Clone, Copy)]
struct Ring {
    center: V3,
    e1: V3,
    e2: V3,
    ring: Real,
    tube: Real,
}

impl Ring {
    fn core(&self) -> Vec<V3> {
        circle(self.center, self.e1, self.e2, self.ring, CORE_SEGMENTS)
    }

    /// Exact distance from a point to this ring's core circle.
    fn core_distance(&self, p: V3) -> Real {
        let q = p - self.center;
        let e3 = self.e1.cross(self.e2);
        let in_plane = (q.dot(self.e1).powi(2) + q.dot(self.e2).powi(2)).sqrt();
        ((in_plane - self.ring).powi(2) + q.dot(e3).powi(2)).sqrt()
    }
}

/// A scaffold bead in local cluster coordinates: unit ring radius, center
/// offsets in units of the ring radius.
struct Bead {
    center: V3,
    e1: V3,
    e2: V3,
}

/// The unit scaffold for a cyclic cluster of `k` rings: cyclically
/// consecutive beads interlock, all others are unlinked and separated.
fn unit_scaffold(k: usize) -> Vec<Bead> {
    let z = Vec3::new(0.0, 0.0, 1.0);
    let tau = 2.0 * std::f64::consts::PI;
    match k {
        3 => {
            // Balanced column: centers on the z-axis at heights ±h, 0 with
            // h = √(3/7); planes vertical, normals at mutual 120°. All three
            // pairs are linked (k = 3 is the complete cycle) at distance h.
            let h = (3.0f64 / 7.0).sqrt();
            [h, -h, 0.0]
                .iter()
                .enumerate()
                .map(|(j, &height)| {
                    let alpha = 0.5 * std::f64::consts::PI + tau * j as Real / 3.0;
                    let nu = Vec3::new(alpha.cos(), alpha.sin(), 0.0);
                    Bead { center: z.scale(height), e1: z, e2: nu.cross(z) }
                })
                .collect()
        }
        4 => {
            // Crown: centers a·ρ̂_j ± d·ẑ, planes spanned by ẑ and the
            // azimuthal direction (normals radial). All six pairwise
            // distances equal 2/3.
            let a = 1.0 / 3.0;
            let d = 2.0f64.sqrt() / 3.0;
            (0..4)
                .map(|j| {
                    let psi = tau * j as Real / 4.0;
                    let rho = Vec3::new(psi.cos(), psi.sin(), 0.0);
                    let tan = Vec3::new(-psi.sin(), psi.cos(), 0.0);
                    let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                    Bead { center: rho.scale(a) + z.scale(s * d), e1: z, e2: tan }
                })
                .collect()
        }
        _ => chain_scaffold(k, chain_chord(k)),
    }
}

/// Center spacing (in ring radii) between adjacent beads of the `k ≥ 5`
/// chain scaffold. Small spacings favor the interlocked neighbors but push
/// second neighbors together; values balance the two (measured).
fn chain_chord(k: usize) -> Real {
    match k {
        5 => 1.00,
        6 => 1.35,
        7 => 1.25,
        8 => 1.35,
        9 => 1.30,
        _ => 1.35,
    }
}

/// Bead chain around a guide circle: adjacent centers `chord` ring radii
/// apart, planes twisted by ⌈k/2⌉ half-turns around the cycle so the
/// alternation closes for even and odd k alike.
fn chain_scaffold(k: usize, chord: Real) -> Vec<Bead> {
    let z = Vec3::new(0.0, 0.0, 1.0);
    let tau = 2.0 * std::f64::consts::PI;
    let guide = 0.5 * chord / (std::f64::consts::PI / k as Real).sin();
    let twist_steps = (k + 1) / 2;
    (0..k)
        .map(|j| {
            let psi = tau * j as Real / k as Real;
            let radial = Vec3::new(psi.cos(), psi.sin(), 0.0);
            let tangent = Vec3::new(-psi.sin(), psi.cos(), 0.0);
            let gamma = std::f64::consts::PI * (j * twist_steps) as Real / k as Real;
            let m = z.scale(gamma.cos()) + radial.scale(gamma.sin());
            Bead { center: radial.scale(guide), e1: tangent, e2: m }
        })
        .collect()
}

/// Measured properties of the unit scaffold: (minimum pairwise core
/// distance, maximum center offset norm). Computed once per `k` and reused;
/// distances scale exactly with the cluster.
fn unit_metrics(k: usize) -> (Real, Real) {
    let beads = unit_scaffold(k);
    let cores: Vec<Vec<V3>> =
        beads.iter().map(|b| circle(b.center, b.e1, b.e2, 1.0, CORE_SEGMENTS)).collect();
    let mut clearance = Real::INFINITY;
    for i in 0..cores.len() {
        for j in i + 1..cores.len() {
            clearance = clearance.min(polyline_min_distance(&cores[i], &cores[j]));
        }
    }
    let spread = beads.iter().map(|b| b.center.norm()).fold(0.0, Real::max);
    (clearance, spread)
}

/// Places the `k` child rings of a parent: the unit scaffold is scaled to
/// the child ring radius `shrink × parent tube` and anchored at the parent
/// core point φ = 0. Tube radii are `tube_ratio × ring`, capped at
/// [`TUBE_FILL`] of the scaffold clearance. The center spread is compressed
/// when needed to keep the cluster inside the parent tube (down to
/// [`SPREAD_FLOOR`]; an infeasible cluster then fails the overlap check).
fn child_rings(parent: &Ring, k: usize, params: EmbedParams, metrics: (Real, Real)) -> Vec<Ring> {
    let (clearance, max_offset) = metrics;
    let rho = params.shrink * parent.tube;
    let fill = params.tube_ratio.min(TUBE_FILL * clearance);
    let tube = fill * rho;

    // Spread multiplier: σ·ρ·max_offset + ρ(1 + fill) must stay inside the
    // parent tube with headroom over the containment pre-check bar.
    let margin = 20.0 * CONTAINMENT_TOLERANCE;
    let spread_cap = if max_offset > 0.0 {
        (((parent.tube - margin) / rho - (1.0 + fill)) / max_offset).clamp(SPREAD_FLOOR, 1.0)
    } else {
        1.0
    };

    let anchor = parent.center + parent.e1.scale(parent.ring);
    let t = parent.e2; // core tangent at the anchor
    let n = parent.e1; // radial direction
    let b = t.cross(n);
    let world = |v: V3| t.scale(v.x) + b.scale(v.y) + n.scale(v.z);

    unit_scaffold(k)
        .into_iter()
        .map(|bead| Ring {
            center: anchor + world(bead.center).scale(spread_cap * rho),
            e1: world(bead.e1),
            e2: world(bead.e2),
            ring: rho,
            tube,
        })
        .collect()
}

/// Places the stages of a chain-of-unknots system in R³.
///
/// The root is the standard torus (unit circle in the xy-plane, tube radius
/// `tube_ratio`); additional unlinked roots are translated along x. Children
/// are placed by [`child_rings`] and checked as they are placed: adjacent
/// siblings whose tubes touch raise [`Error::Overlap`] naming the pair, and
/// a cluster that fails to fit inside its parent tube raises
/// [`Error::Layout`].
pub fn embed_antoine(
    ps: &PatternSystem,
    depth: u32,
    params: EmbedParams,
    opts: ExpandOptions,
) -> Result<Vec<TorusPlacement>> {
    let layout = |message: String| Error::Layout { message };
    if !(params.shrink > 0.0 && params.shrink < 1.0) {
        return Err(layout(format!("shrink must lie in (0, 1), got {}", params.shrink)));
    }
    if !(params.tube_ratio > 0.0 && params.tube_ratio < 1.0) {
        return Err(layout(format!("tube_ratio must lie in (0, 1), got {}", params.tube_ratio)));
    }
    ps.validate()?;
    for m in 1..=depth {
        let rule = ps.assignment.rule_for_stage(m);
        for name in [&rule.spine, &rule.other] {
            if !ps.pattern(name).is_chain_of_unknots() {
                return Err(layout(format!(
                    "geometric realization supports chains of unknots only; pattern {name:?} \
                     (applied at stage {m}) is not one"
                )));
            }
        }
    }
    for r in &ps.roots {
        if r.knot != "unknot" {
            return Err(layout(format!("root {:?} is knotted; only unknots are realized", r.id)));
        }
    }
    if ps.root_edges.iter().any(|e| e.lk != 0) {
        return Err(layout("linked roots are not geometrically realized".into()));
    }

    let stages = expand(ps, depth, opts)?;

    let x = Vec3::new(1.0, 0.0, 0.0);
    let y = Vec3::new(0.0, 1.0, 0.0);
    let mut rings: BTreeMap<String, Ring> = BTreeMap::new();
    let mut order: Vec<Vec<String>> = Vec::new(); // ids per stage, placement order
    let mut metrics_cache: BTreeMap<usize, (Real, Real)> = BTreeMap::new();

    let mut stage0 = Vec::new();
    for (i, node) in stages[0].nodes.iter().enumerate() {
        rings.insert(
            node.id.clone(),
            Ring {
                center: Vec3::new(3.5 * i as Real, 0.0, 0.0),
                e1: x,
                e2: y,
                ring: 1.0,
                tube: params.tube_ratio,
            },
        );
        stage0.push(node.id.clone());
    }
    order.push(stage0);

    for m in 1..=depth as usize {
        let sg = &stages[m];
        let mut by_parent: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for node in &sg.nodes {
            let parent = node.parent.as_deref().expect("replacement stages have parents");
            by_parent.entry(parent).or_default().push(&node.id);
        }
        let mut stage_ids = Vec::new();
        for parent_id in &order[m - 1] {
            let mut child_ids = by_parent.remove(parent_id.as_str()).unwrap_or_default();
            child_ids.sort_by_key(|id| child_index(id));
            let parent = rings[parent_id.as_str()];
            let k = child_ids.len();
            let metrics = *metrics_cache.entry(k).or_insert_with(|| unit_metrics(k));
            let placed = child_rings(&parent, k, params, metrics);
            check_cluster(parent_id, &child_ids, &parent, &placed, params)?;
            for (id, ring) in child_ids.iter().zip(placed) {
                rings.insert((*id).to_string(), ring);
                stage_ids.push((*id).to_string());
            }
        }
        order.push(stage_ids);
    }

    let mut placements = Vec::new();
    for stage_ids in &order {
        for id in stage_ids {
            let ring = &rings[id.as_str()];
            placements.push(TorusPlacement {
                id: id.clone(),
                core: ring.core().into_iter().map(Vec3::to_array).collect(),
                tube_radius: ring.tube,
            });
        }
    }
    Ok(placements)
}

fn child_index(id: &str) -> usize {
    id.rsplit('.').next().and_then(|s| s.parse().ok()).unwrap_or(usize::MAX)
}

/// Overlap check first (adjacent sibling pairs, then the rest), then a
/// containment pre-check of the whole cluster against the parent tube.
fn check_cluster(
    parent_id: &str,
    ids: &[&str],
    parent: &Ring,
    placed: &[Ring],
    params: EmbedParams,
) -> Result<()> {
    let k = placed.len();
    let cores: Vec<Vec<V3>> = placed.iter().map(Ring::core).collect();
    let mut pairs: Vec<(usize, usize)> = (0..k).map(|j| (j, (j + 1) % k)).collect();
    for i in 0..k {
        for j in i + 1..k {
            if !(j == i + 1 || (i == 0 && j == k - 1)) {
                pairs.push((i, j));
            }
        }
    }
    for (i, j) in pairs {
        if i == j {
            continue; // k = 1 degenerate cycle
        }
        let required = placed[i].tube + placed[j].tube + DISJOINT_TOLERANCE;
        let dist = polyline_min_distance(&cores[i], &cores[j]);
        if dist <= required {
            return Err(Error::Overlap {
                a: ids[i].to_string(),
                b: ids[j].to_string(),
                message: format!(
                    "minimum core distance {dist:.3e} does not clear the required \
                     {required:.3e} (shrink = {}, tube_ratio = {})",
                    params.shrink, params.tube_ratio
                ),
            });
        }
    }
    // Sampled containment pre-check against the exact parent circle, held
    // to a stricter bar than the certifier's tolerance.
    let strict = parent.tube - 10.0 * CONTAINMENT_TOLERANCE;
    for (id, ring) in ids.iter().zip(placed) {
        let worst = torus_surface_samples(ring, 96, 24)
            .into_iter()
            .map(|p| parent.core_distance(p))
            .fold(0.0, Real::max);
        if worst >= strict {
            return Err(Error::Layout {
                message: format!(
                    "child {id} of {parent_id} does not fit inside the parent tube: sampled \
                     surface distance {worst:.3e} vs tube radius {:.3e} (k = {k}, shrink = {})",
                    parent.tube, params.shrink
                ),
            });
        }
    }
    Ok(())
}

/// Deterministic samples on an exact torus surface.
fn torus_surface_samples(ring: &Ring, n_core: usize, n_meridian: usize) -> Vec<V3> {
    let e3 = ring.e1.cross(ring.e2);
    let tau = 2.0 * std::f64::consts::PI;
    let mut out = Vec::with_capacity(n_core * n_meridian);
    for i in 0..n_core {
        let phi = tau * i as Real / n_core as Real;
        let radial = ring.e1.scale(phi.cos()) + ring.e2.scale(phi.sin());
        for j in 0..n_meridian {
            let theta = tau * j as Real / n_meridian as Real;
            out.push(
                ring.center
                    + radial.scale(ring.ring + ring.tube * theta.cos())
                    + e3.scale(ring.tube * theta.sin()),
            );
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

/// One measured check. Semantics by `check`:
/// `"disjointness"` — `measured` is a certified lower bound on the minimum
/// core distance between `a` and `b`; pass iff it exceeds `bound`
/// (sum of tube radii + 10⁻⁶). `"containment"` — `measured` is the largest
/// sampled distance from `a`'s tube surface to parent `b`'s core; pass iff
/// below `bound` (parent tube radius − 10⁻⁶). `"linking"` — `measured` is
/// the Gauss linking number of the sibling cores `a`, `b`; pass iff within
/// `bound` (10⁻³) of `expected` in absolute value.
#[derive(Clone, Debug, Serialize)]
pub struct CheckEntry {
    pub check: String,
    pub a: String,
    pub b: String,
    pub measured: Real,
    pub bound: Real,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<Real>,
    pub pass: bool,
}

/// Full certification report; `pass` is the conjunction of all entries.
#[derive(Clone, Debug, Serialize)]
pub struct GeometryReport {
    pub pass: bool,
    pub checks: Vec<CheckEntry>,
}

struct CertNode {
    id: String,
    core: Vec<V3>,
    tube: Real,
    stage: usize,
    parent: Option<String>,
    index: usize,
    centroid: V3,
    reach: Real, // max distance of a core vertex from the centroid
}

/// Measures same-stage disjointness, child-in-parent containment, and
/// sibling Gauss linking for a placement set (ids follow the `root.i.j`
/// scheme; tori without a placed parent are treated as roots).
pub fn certify_geometry(placements: &[TorusPlacement]) -> Result<GeometryReport> {
    let mut nodes: Vec<CertNode> = Vec::with_capacity(placements.len());
    let mut ids: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, t) in placements.iter().enumerate() {
        validate_placement(t)?;
        if ids.insert(t.id.as_str(), i).is_some() {
            return Err(Error::Layout { message: format!("duplicate torus id {:?}", t.id) });
        }
        let core = core_points(t);
        let n = core.len() - 1;
        let centroid = core[..n]
            .iter()
            .fold(Vec3::new(0.0, 0.0, 0.0), |acc, &p| acc + p)
            .scale(1.0 / n as Real);
        let reach = core.iter().map(|p| p.dist(centroid)).fold(0.0, Real::max);
        let (parent, index) = match t.id.rsplit_once('.') {
            Some((head, tail)) => match tail.parse::<usize>() {
                Ok(ci) => (Some(head.to_string()), ci),
                Err(_) => {
                    return Err(Error::Layout {
                        message: format!(
                            "torus id {:?} has a non-numeric child index {tail:?}",
                            t.id
                        ),
                    })
                }
            },
            None => (None, 0),
        };
        nodes.push(CertNode {
            id: t.id.clone(),
            core,
            tube: t.tube_radius,
            stage: t.id.matches('.').count(),
            parent,
            index,
            centroid,
            reach,
        });
    }

    let mut checks = Vec::new();

    // (a) same-stage disjointness, bounding spheres first.
    let mut by_stage: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, n) in nodes.iter().enumerate() {
        by_stage.entry(n.stage).or_default().push(i);
    }
    for members in by_stage.values() {
        let mut sorted = members.clone();
        sorted.sort_by(|&i, &j| nodes[i].id.cmp(&nodes[j].id));
        for (pos, &i) in sorted.iter().enumerate() {
            for &j in &sorted[pos + 1..] {
                let (na, nb) = (&nodes[i], &nodes[j]);
                let bound = na.tube + nb.tube + DISJOINT_TOLERANCE;
                let sphere_gap = na.centroid.dist(nb.centroid) - na.reach - nb.reach;
                let measured = if sphere_gap > bound {
                    sphere_gap
                } else {
                    polyline_min_distance(&na.core, &nb.core)
                };
                checks.push(CheckEntry {
                    check: "disjointness".into(),
                    a: na.id.clone(),
                    b: nb.id.clone(),
                    measured,
                    bound,
                    expected: None,
                    pass: measured > bound,
                });
            }
        }
    }

    // (b) containment: sampled child tube surface inside the parent tube.
    for n in &nodes {
        let Some(parent_id) = &n.parent else { continue };
        let Some(&pi) = ids.get(parent_id.as_str()) else { continue };
        let parent = &nodes[pi];
        let bound = parent.tube - CONTAINMENT_TOLERANCE;
        let worst = polyline_surface_samples(&n.core, n.tube)
            .into_iter()
            .map(|p| point_polyline_distance(p, &parent.core))
            .fold(0.0, Real::max);
        checks.push(CheckEntry {
            check: "containment".into(),
            a: n.id.clone(),
            b: parent_id.clone(),
            measured: worst,
            bound,
            expected: None,
            pass: worst < bound,
        });
    }

    // (c) sibling linking: ±1 for cyclic neighbors, 0 otherwise.
    let mut by_parent: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, n) in nodes.iter().enumerate() {
        if let Some(p) = &n.parent {
            by_parent.entry(p.as_str()).or_default().push(i);
        }
    }
    for members in by_parent.values() {
        let mut sorted = members.clone();
        sorted.sort_by_key(|&i| nodes[i].index);
        let k = sorted.len();
        if k < 2 {
            continue;
        }
        for a in 0..k {
            for b in a + 1..k {
                let adjacent = b == a + 1 || (a == 0 && b == k - 1);
                let (na, nb) = (&nodes[sorted[a]], &nodes[sorted[b]]);
                let measured = linking_number(&na.core, &nb.core);
                let expected = if adjacent { 1.0 } else { 0.0 };
                checks.push(CheckEntry {
                    check: "linking".into(),
                    a: na.id.clone(),
                    b: nb.id.clone(),
                    measured,
                    bound: LINKING_TOLERANCE,
                    expected: Some(expected),
                    pass: (measured.abs() - expected).abs() <= LINKING_TOLERANCE,
                });
            }
        }
    }

    let pass = checks.iter().all(|c| c.pass);
    Ok(GeometryReport { pass, checks })
}

/// Parallel-transported orthonormal frames at selected stations of a closed
/// polyline, then tube-surface samples around each station.
fn polyline_surface_samples(core: &[V3], tube: Real) -> Vec<V3> {
    let stations = polyline_frames(core, CONTAIN_CORE_SAMPLES);
    let tau = 2.0 * std::f64::consts::PI;
    let mut out = Vec::with_capacity(stations.len() * CONTAIN_MERIDIAN_SAMPLES);
    for (p, _t, n, b) in stations {
        for j in 0..CONTAIN_MERIDIAN_SAMPLES {
            let theta = tau * j as Real / CONTAIN_MERIDIAN_SAMPLES as Real;
            out.push(p + n.scale(tube * theta.cos()) + b.scale(tube * theta.sin()));
        }
    }
    out
}

/// `count` evenly spaced stations (point, tangent, normal, binormal) along
/// a closed polyline, frames propagated by projection to avoid twist jumps.
fn polyline_frames(core: &[V3], count: usize) -> Vec<(V3, V3, V3, V3)> {
    let n = core.len() - 1; // distinct vertices
    let idx: Vec<usize> = (0..count).map(|i| i * n / count).collect();
    let tangent = |at: usize| -> V3 {
        let prev = core[(at + n - 1) % n];
        let next = core[(at + 1) % n];
        (next - prev).normalize()
    };
    let t0 = tangent(idx[0]);
    let mut normal = {
        let candidates = [Vec3::new(0.0, 0.0, 1.0), Vec3::new(1.0, 0.0, 0.0)];
        let seed = candidates
            .into_iter()
            .find(|c| c.dot(t0).abs() < 0.9)
            .unwrap_or(Vec3::new(0.0, 1.0, 0.0));
        (seed - t0.scale(t0.dot(seed))).normalize()
    };
    let mut out = Vec::with_capacity(count);
    for &at in &idx {
        let t = tangent(at);
        normal = (normal - t.scale(t.dot(normal))).normalize();
        let b = t.cross(normal);
        out.push((core[at], t, normal, b));
    }
    out
}

// ---------------------------------------------------------------------------
// OBJ export
// ---------------------------------------------------------------------------

const OBJ_RINGS: usize = 32;
const OBJ_SIDES: usize = 16;

/// Renders placements as a Wavefront OBJ string: one `o` record per torus,
/// a 32×16 tube mesh each, deterministic ordering and formatting.
pub fn obj_string(placements: &[TorusPlacement]) -> String {
    let mut s = String::new();
    s.push_str("# toroidal defining-sequence placements\n");
    s.push_str(&format!("# tori: {}\n", placements.len()));
    let mut base = 0usize;
    for t in placements {
        s.push_str(&format!("o {}\n", t.id));
        let core = core_points(t);
        for (p, _t, n, b) in polyline_frames(&core, OBJ_RINGS) {
            let tau = 2.0 * std::f64::consts::PI;
            for j in 0..OBJ_SIDES {
                let theta = tau * j as Real / OBJ_SIDES as Real;
                let v = p
                    + n.scale(t.tube_radius * theta.cos())
                    + b.scale(t.tube_radius * theta.sin());
                s.push_str(&format!("v {:.9} {:.9} {:.9}\n", v.x, v.y, v.z));
            }
        }
        for i in 0..OBJ_RINGS {
            let i2 = (i + 1) % OBJ_RINGS;
            for j in 0..OBJ_SIDES {
                let j2 = (j + 1) % OBJ_SIDES;
                s.push_str(&format!(
                    "f {} {} {} {}\n",
                    base + i * OBJ_SIDES + j + 1,
                    base + i2 * OBJ_SIDES + j + 1,
                    base + i2 * OBJ_SIDES + j2 + 1,
                    base + i * OBJ_SIDES + j2 + 1,
                ));
            }
        }
        base += OBJ_RINGS * OBJ_SIDES;
    }
    s
}

/// Writes [`obj_string`] to a file.
pub fn export_obj(placements: &[TorusPlacement], path: &Path) -> Result<()> {
    std::fs::write(path, obj_string(placements))?;
    Ok(())
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{antoine_chain, bing_pattern};

    fn chain4() -> PatternSystem {
        antoine_chain(4).unwrap().system
    }

    fn opts() -> ExpandOptions {
        ExpandOptions::default()
    }

    #[test]
    fn depth_zero_is_the_standard_torus() {
        let p = embed_antoine(&chain4(), 0, EmbedParams::default(), opts()).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].id, "0");
        assert_eq!(p[0].tube_radius, 0.35);
        assert_eq!(p[0].core.len(), CORE_SEGMENTS + 1);
        assert_eq!(p[0].core.first(), p[0].core.last());
        for v in &p[0].core {
            let r = (v[0] * v[0] + v[1] * v[1]).sqrt();
            assert!((r - 1.0).abs() < 1e-12 && v[2] == 0.0);
        }
    }

    #[test]
    fn chain4_depth1_certifies() {
        let p = embed_antoine(&chain4(), 1, EmbedParams::default(), opts()).unwrap();
        assert_eq!(p.len(), 5);
        assert_eq!(
            p.iter().map(|t| t.id.as_str()).collect::<Vec<_>>(),
            ["0", "0.0", "0.1", "0.2", "0.3"]
        );
        let report = certify_geometry(&p).unwrap();
        assert!(report.pass, "failing checks: {:?}", report.checks.iter().filter(|c| !c.pass).collect::<Vec<_>>());
        // 6 sibling disjointness pairs + 4 containments + 6 linking pairs.
        assert_eq!(report.checks.len(), 16);
    }

    #[test]
    fn oversized_shrink_reports_adjacent_overlap() {
        let err = embed_antoine(
            &chain4(),
            1,
            EmbedParams { shrink: 0.9, tube_ratio: 0.35 },
            opts(),
        )
        .unwrap_err();
        match err {
            Error::Overlap { a, b, .. } => {
                assert_eq!((a.as_str(), b.as_str()), ("0.0", "0.1"));
            }
            other => panic!("expected overlap, got {other}"),
        }
    }

    #[test]
    fn non_chain_systems_are_not_realized() {
        let err =
            embed_antoine(&bing_pattern().system, 1, EmbedParams::default(), opts()).unwrap_err();
        assert!(matches!(err, Error::Layout { .. }));
    }

    #[test]
    fn placements_round_trip_through_json() {
        let p = embed_antoine(&chain4(), 1, EmbedParams::default(), opts()).unwrap();
        let text = placements_to_json(&p);
        let back = parse_placements(&text).unwrap();
        assert_eq!(p, back);
        assert_eq!(text, placements_to_json(&back));
    }

    #[test]
    fn open_cores_are_rejected() {
        let t = TorusPlacement {
            id: "a".into(),
            core: vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]],
            tube_radius: 0.1,
        };
        let text = placements_to_json(&[t]);
        assert!(matches!(parse_placements(&text), Err(Error::Layout { .. })));
    }

    #[test]
    fn obj_export_shape_and_determinism() {
        let p = embed_antoine(&chain4(), 1, EmbedParams::default(), opts()).unwrap();
        let obj = obj_string(&p);
        assert_eq!(obj.lines().filter(|l| l.starts_with("o ")).count(), 5);
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 5 * 32 * 16);
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 5 * 32 * 16);
        assert_eq!(obj, obj_string(&p));

        let empty = obj_string(&[]);
        assert!(empty.starts_with("# "));
        assert!(!empty.contains("\nv "));
    }

    #[test]
    fn external_roots_only_get_disjointness_checks() {
        let x = Vec3::new(1.0, 0.0, 0.0);
        let y = Vec3::new(0.0, 1.0, 0.0);
        let mk = |id: &str, cx: Real| TorusPlacement {
            id: id.into(),
            core: circle(Vec3::new(cx, 0.0, 0.0), x, y, 1.0, 64)
                .into_iter()
                .map(Vec3::to_array)
                .collect(),
            tube_radius: 0.2,
        };
        let report = certify_geometry(&[mk("a", 0.0), mk("b", 5.0)]).unwrap();
        assert!(report.pass);
        assert_eq!(report.checks.len(), 1);
        assert_eq!(report.checks[0].check, "disjointness");
    }

    /// Sweeps the chain-scaffold chord per k and prints the binding
    /// clearance; run with `--ignored --nocapture`.
    #[test]
    #[ignore]
    fn probe_chord_sweep() {
        for k in [5usize, 6, 7, 8, 9, 10, 12] {
            let mut best = (0.0, 0.0);
            for step in 0..=20 {
                let chord = 1.0 + 0.05 * step as Real;
                let beads = chain_scaffold(k, chord);
                let cores: Vec<Vec<V3>> = beads
                    .iter()
                    .map(|b| circle(b.center, b.e1, b.e2, 1.0, CORE_SEGMENTS))
                    .collect();
                let mut min_clear = Real::INFINITY;
                for i in 0..cores.len() {
                    for j in i + 1..cores.len() {
                        min_clear = min_clear.min(polyline_min_distance(&cores[i], &cores[j]));
                    }
                }
                if min_clear > best.1 {
                    best = (chord, min_clear);
                }
            }
            println!("k={k}: best chord {:.2} clearance {:.4}", best.0, best.1);
        }
    }

    /// Prints layout margins over a parameter sweep; run with
    /// `cargo test -p defseq probe_margins -- --ignored --nocapture`.
    #[test]
    #[ignore]
    fn probe_margins() {
        for k in [3usize, 4, 5, 6, 8] {
            let ps = antoine_chain(k).unwrap().system;
            let depth = if k <= 4 { 3 } else { 2 };
            match embed_antoine(&ps, depth, EmbedParams::default(), opts()) {
                Ok(p) => {
                    let rep = certify_geometry(&p).unwrap();
                    let mut worst_disj = Real::INFINITY;
                    let mut worst_cont = Real::INFINITY;
                    let mut worst_link = 0.0;
                    for c in &rep.checks {
                        match c.check.as_str() {
                            "disjointness" => worst_disj = worst_disj.min(c.measured - c.bound),
                            "containment" => worst_cont = worst_cont.min(c.bound - c.measured),
                            _ => {
                                let err = (c.measured.abs() - c.expected.unwrap()).abs();
                                worst_link = Real::max(worst_link, err);
                            }
                        }
                    }
                    println!(
                        "k={k} depth={depth}: tori={} pass={} disj_margin={worst_disj:.3e} \
                         cont_margin={worst_cont:.3e} link_err={worst_link:.3e}",
                        p.len(),
                        rep.pass
                    );
                }
                Err(e) => println!("k={k} depth={depth}: {e}"),
            }
        }
    }
}
