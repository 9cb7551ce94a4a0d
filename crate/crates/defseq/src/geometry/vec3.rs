//! Small 3-vector kernel and polyline primitives, generic over the scalar.
//!
//! Everything here works on closed polylines given as vertex lists whose
//! first vertex is repeated at the end; segment loops therefore run over
//! consecutive pairs without wraparound.

use std::ops::{Add, Neg, Sub};

use num_traits::Float;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Float> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Vec3 { x, y, z }
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Vec3 { x: a[0], y: a[1], z: a[2] }
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn scale(self, s: T) -> Self {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_sq(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn dist(self, o: Self) -> T {
        (self - o).norm()
    }

    /// Unit vector; the caller guarantees a nonzero input.
    pub fn normalize(self) -> Self {
        self.scale(T::one() / self.norm())
    }
}

impl<T: Float> Add for Vec3<T> {
    type Output = Vec3<T>;
    fn add(self, o: Self) -> Self {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Float> Sub for Vec3<T> {
    type Output = Vec3<T>;
    fn sub(self, o: Self) -> Self {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Float> Neg for Vec3<T> {
    type Output = Vec3<T>;
    fn neg(self) -> Self {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

fn clamp01<T: Float>(t: T) -> T {
    t.max(T::zero()).min(T::one())
}

/// Distance from a point to the segment `[a, b]`.
pub fn point_segment_distance<T: Float>(p: Vec3<T>, a: Vec3<T>, b: Vec3<T>) -> T {
    let ab = b - a;
    let len2 = ab.norm_sq();
    if len2 <= T::epsilon() {
        return p.dist(a);
    }
    let t = clamp01((p - a).dot(ab) / len2);
    p.dist(a + ab.scale(t))
}

/// Distance between the segments `[p1, q1]` and `[p2, q2]`
/// (clamped closest-point computation).
pub fn segment_distance<T: Float>(p1: Vec3<T>, q1: Vec3<T>, p2: Vec3<T>, q2: Vec3<T>) -> T {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_sq();
    let e = d2.norm_sq();
    let f = d2.dot(r);
    let eps = T::epsilon();

    let (s, t);
    if a <= eps && e <= eps {
        return p1.dist(p2);
    }
    if a <= eps {
        s = T::zero();
        t = clamp01(f / e);
    } else {
        let c = d1.dot(r);
        if e <= eps {
            t = T::zero();
            s = clamp01(-c / a);
        } else {
            let b = d1.dot(d2);
            let denom = a * e - b * b;
            let s0 = if denom > eps { clamp01((b * f - c * e) / denom) } else { T::zero() };
            let t0 = (b * s0 + f) / e;
            if t0 < T::zero() {
                t = T::zero();
                s = clamp01(-c / a);
            } else if t0 > T::one() {
                t = T::one();
                s = clamp01((b - c) / a);
            } else {
                t = t0;
                s = s0;
            }
        }
    }
    (p1 + d1.scale(s)).dist(p2 + d2.scale(t))
}

/// Distance from a point to a closed polyline (first vertex repeated last).
pub fn point_polyline_distance<T: Float>(p: Vec3<T>, line: &[Vec3<T>]) -> T {
    let mut best = T::infinity();
    for w in line.windows(2) {
        best = best.min(point_segment_distance(p, w[0], w[1]));
    }
    best
}

const CHUNK: usize = 16;

struct ChunkSphere<T> {
    lo: usize,
    hi: usize, // segment index range [lo, hi)
    center: Vec3<T>,
    radius: T,
}

fn chunk_spheres<T: Float>(line: &[Vec3<T>]) -> Vec<ChunkSphere<T>> {
    let nseg = line.len() - 1;
    let mut out = Vec::new();
    let mut lo = 0;
    while lo < nseg {
        let hi = (lo + CHUNK).min(nseg);
        let verts = &line[lo..=hi];
        let mut min = verts[0];
        let mut max = verts[0];
        for v in verts {
            min = Vec3::new(min.x.min(v.x), min.y.min(v.y), min.z.min(v.z));
            max = Vec3::new(max.x.max(v.x), max.y.max(v.y), max.z.max(v.z));
        }
        let center = (min + max).scale(T::from(0.5).unwrap());
        let radius = verts.iter().map(|v| v.dist(center)).fold(T::zero(), T::max);
        out.push(ChunkSphere { lo, hi, center, radius });
        lo = hi;
    }
    out
}

/// Exact minimum distance between two closed polylines, with bounding-sphere
/// pruning over 16-segment chunks (pruning only skips pairs that provably
/// cannot improve the minimum).
pub fn polyline_min_distance<T: Float>(a: &[Vec3<T>], b: &[Vec3<T>]) -> T {
    let ca = chunk_spheres(a);
    let cb = chunk_spheres(b);
    let mut pairs: Vec<(T, usize, usize)> = Vec::with_capacity(ca.len() * cb.len());
    for (i, sa) in ca.iter().enumerate() {
        for (j, sb) in cb.iter().enumerate() {
            let lb = sa.center.dist(sb.center) - sa.radius - sb.radius;
            pairs.push((lb, i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).expect("finite distances"));

    let mut best = T::infinity();
    for (lb, i, j) in pairs {
        if lb >= best {
            break;
        }
        let (sa, sb) = (&ca[i], &cb[j]);
        for s in sa.lo..sa.hi {
            for t in sb.lo..sb.hi {
                let d = segment_distance(a[s], a[s + 1], b[t], b[t + 1]);
                best = best.min(d);
            }
        }
    }
    best
}

/// Gauss linking number of two disjoint closed polylines via the midpoint
/// double sum over segment pairs:
/// lk ≈ Σᵢⱼ (mⱼ−mᵢ)·(aᵢ×bⱼ) / (4π·|mⱼ−mᵢ|³).
pub fn linking_number<T: Float>(a: &[Vec3<T>], b: &[Vec3<T>]) -> T {
    let half = T::from(0.5).unwrap();
    let segs_b: Vec<(Vec3<T>, Vec3<T>)> = b
        .windows(2)
        .map(|w| (w[1] - w[0], (w[0] + w[1]).scale(half)))
        .collect();
    let mut acc = T::zero();
    for w in a.windows(2) {
        let ea = w[1] - w[0];
        let ma = (w[0] + w[1]).scale(half);
        for (eb, mb) in &segs_b {
            let d = *mb - ma;
            let n2 = d.norm_sq();
            acc = acc + d.dot(ea.cross(*eb)) / (n2 * n2.sqrt());
        }
    }
    let four_pi = T::from(4.0 * std::f64::consts::PI).unwrap();
    acc / four_pi
}

/// A closed circle polyline: `segments` edges, first vertex repeated last.
pub fn circle<T: Float>(
    center: Vec3<T>,
    e1: Vec3<T>,
    e2: Vec3<T>,
    radius: T,
    segments: usize,
) -> Vec<Vec3<T>> {
    let tau = T::from(2.0 * std::f64::consts::PI).unwrap();
    let n = T::from(segments).unwrap();
    let mut pts = Vec::with_capacity(segments + 1);
    for i in 0..segments {
        let phi = tau * T::from(i).unwrap() / n;
        pts.push(center + e1.scale(radius * phi.cos()) + e2.scale(radius * phi.sin()));
    }
    pts.push(pts[0]);
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    type V = Vec3<f64>;

    const X: V = Vec3 { x: 1.0, y: 0.0, z: 0.0 };
    const Y: V = Vec3 { x: 0.0, y: 1.0, z: 0.0 };
    const Z: V = Vec3 { x: 0.0, y: 0.0, z: 1.0 };

    fn o() -> V {
        Vec3::new(0.0, 0.0, 0.0)
    }

    #[test]
    fn cross_follows_the_right_hand_rule() {
        assert_eq!(X.cross(Y), Z);
        assert_eq!(Y.cross(Z), X);
        assert!(X.cross(Y).dot(Z) > 0.0);
    }

    #[test]
    fn point_segment_clamps_to_endpoints() {
        let d = point_segment_distance(Vec3::new(2.0, 1.0, 0.0), o(), X);
        assert!((d - 2.0f64.sqrt()).abs() < 1e-12);
        let d = point_segment_distance(Vec3::new(0.5, 1.0, 0.0), o(), X);
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn segment_distance_handles_skew_parallel_and_degenerate() {
        // Skew perpendicular segments passing 1 apart.
        let d = segment_distance(
            Vec3::new(-1.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, -1.0, 1.0),
            Vec3::new(0.0, 1.0, 1.0),
        );
        assert!((d - 1.0).abs() < 1e-12);
        // Parallel offset.
        let d = segment_distance(o(), X, Vec3::new(0.0, 2.0, 0.0), Vec3::new(1.0, 2.0, 0.0));
        assert!((d - 2.0).abs() < 1e-12);
        // One segment degenerate.
        let d = segment_distance(o(), o(), Vec3::new(3.0, 4.0, 0.0), Vec3::new(3.0, 4.0, 0.0));
        assert!((d - 5.0).abs() < 1e-12);
    }

    #[test]
    fn polyline_min_distance_matches_brute_force() {
        let a = circle(o(), X, Y, 1.0, 64);
        let b = circle(Vec3::new(0.0, 0.0, 0.7), X, Y, 1.3, 48);
        let pruned = polyline_min_distance(&a, &b);
        let mut brute = f64::INFINITY;
        for s in a.windows(2) {
            for t in b.windows(2) {
                brute = brute.min(segment_distance(s[0], s[1], t[0], t[1]));
            }
        }
        assert!((pruned - brute).abs() < 1e-12);
    }

    #[test]
    fn hopf_pair_links_once() {
        let a = circle(o(), X, Y, 1.0, 256);
        let b = circle(X, X, Z, 1.0, 256);
        let lk = linking_number(&a, &b);
        assert!((lk.abs() - 1.0).abs() < 1e-3, "lk = {lk}");
    }

    #[test]
    fn far_apart_rings_do_not_link() {
        let a = circle(o(), X, Y, 1.0, 128);
        let b = circle(Vec3::new(10.0, 0.0, 0.0), X, Z, 1.0, 128);
        assert!(linking_number(&a, &b).abs() < 1e-3);
    }

    #[test]
    fn linking_is_antisymmetric_and_orientation_sensitive() {
        let a = circle(o(), X, Y, 1.0, 128);
        let b = circle(X, X, Z, 1.0, 128);
        let ab = linking_number(&a, &b);
        let ba = linking_number(&b, &a);
        assert!((ab - ba).abs() < 1e-9);
        let mut rev = b.clone();
        rev.reverse();
        assert!((linking_number(&a, &rev) + ab).abs() < 1e-9);
    }
}
