//! Eventually periodic sequences with a decidable canonical form.
//!
//! A sequence is presented as a finite preperiod followed by a repeating
//! block. The constructor reduces every presentation to canonical form
//! (primitive period, shortest preperiod), so structural equality on the
//! stored parts coincides with equality of the infinite sequences.

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::Add;

// ---------------------------------------------------------------------------
// Z2
// ---------------------------------------------------------------------------

/// Residue mod 2, serialized as the integer 0 or 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Z2(bool);

impl Z2 {
    pub const ZERO: Z2 = Z2(false);
    pub const ONE: Z2 = Z2(true);

    /// Parity of an arbitrary integer count.
    pub fn from_parity(n: u64) -> Z2 {
        Z2(n % 2 == 1)
    }

    pub fn is_one(self) -> bool {
        self.0
    }

    pub fn as_u8(self) -> u8 {
        self.0 as u8
    }
}

impl Add for Z2 {
    type Output = Z2;
    fn add(self, rhs: Z2) -> Z2 {
        Z2(self.0 ^ rhs.0)
    }
}

impl std::ops::Mul for Z2 {
    type Output = Z2;
    fn mul(self, rhs: Z2) -> Z2 {
        Z2(self.0 && rhs.0)
    }
}

impl From<bool> for Z2 {
    fn from(b: bool) -> Z2 {
        Z2(b)
    }
}

impl fmt::Display for Z2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

impl Serialize for Z2 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.as_u8())
    }
}

impl<'de> Deserialize<'de> for Z2 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match u8::deserialize(deserializer)? {
            0 => Ok(Z2::ZERO),
            1 => Ok(Z2::ONE),
            n => Err(D::Error::custom(format!("expected 0 or 1, found {n}"))),
        }
    }
}

// ---------------------------------------------------------------------------
// EpSeq
// ---------------------------------------------------------------------------

/// An eventually periodic sequence over `T`, always held in canonical form.
///
/// Two values compare equal exactly when they describe the same infinite
/// sequence. The period is never empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EpSeq<T> {
    preperiod: Vec<T>,
    period: Vec<T>,
}

/// Sequences of parities: the carrier of the mod-2 linking invariants.
pub type ParitySeq = EpSeq<Z2>;

impl<T: Clone + Eq> EpSeq<T> {
    /// Builds a sequence and reduces it to canonical form.
    ///
    /// Panics if `period` is empty; inputs arriving from documents are
    /// validated before reaching this constructor.
    pub fn new(preperiod: Vec<T>, period: Vec<T>) -> Self {
        assert!(!period.is_empty(), "EpSeq period must be nonempty");
        let mut s = EpSeq { preperiod, period };
        s.primitivize();
        s.absorb_preperiod();
        s
    }

    /// The constant sequence `v, v, v, …`.
    pub fn constant(v: T) -> Self {
        EpSeq { preperiod: Vec::new(), period: vec![v] }
    }

    /// Shrinks the period to its primitive root.
    fn primitivize(&mut self) {
        let q = self.period.len();
        for d in 1..q {
            if q % d != 0 {
                continue;
            }
            if (d..q).all(|i| self.period[i] == self.period[i % d]) {
                self.period.truncate(d);
                return;
            }
        }
    }

    /// Drops preperiod entries that already agree with the cycle.
    ///
    /// The last preperiod entry can be folded into the period exactly when
    /// it equals the period's last entry; folding rotates the period right
    /// so later indices keep their values.
    fn absorb_preperiod(&mut self) {
        while let Some(last) = self.preperiod.last() {
            if last == self.period.last().expect("nonempty period") {
                self.preperiod.pop();
                self.period.rotate_right(1);
            } else {
                break;
            }
        }
    }

    pub fn preperiod(&self) -> &[T] {
        &self.preperiod
    }

    pub fn period(&self) -> &[T] {
        &self.period
    }

    /// Value at index `i` of the infinite sequence.
    pub fn value_at(&self, i: usize) -> &T {
        if i < self.preperiod.len() {
            &self.preperiod[i]
        } else {
            &self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    /// The first `n` values, materialized.
    pub fn prefix(&self, n: usize) -> Vec<T> {
        (0..n).map(|i| self.value_at(i).clone()).collect()
    }

    /// Length of the window on which two sequences with these shapes must
    /// agree to be equal everywhere: `max(preperiods) + lcm(periods)`.
    pub fn equality_window(&self, other: &Self) -> usize {
        let p = self.preperiod.len().max(other.preperiod.len());
        p + lcm(self.period.len(), other.period.len())
    }

    /// Index of the first position where the sequences differ, if any.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        (0..self.equality_window(other)).find(|&i| self.value_at(i) != other.value_at(i))
    }

    /// Pointwise combination; the result is re-canonicalized.
    pub fn combine<F: Fn(&T, &T) -> T>(&self, other: &Self, f: F) -> Self {
        let p = self.preperiod.len().max(other.preperiod.len());
        let q = lcm(self.period.len(), other.period.len());
        let preperiod = (0..p).map(|i| f(self.value_at(i), other.value_at(i))).collect();
        let period = (p..p + q).map(|i| f(self.value_at(i), other.value_at(i))).collect();
        EpSeq::new(preperiod, period)
    }
}

impl ParitySeq {
    /// The all-zero sequence.
    pub fn zero() -> ParitySeq {
        EpSeq::constant(Z2::ZERO)
    }

    /// Pointwise sum mod 2.
    pub fn xor(&self, other: &ParitySeq) -> ParitySeq {
        self.combine(other, |a, b| *a + *b)
    }

    pub fn is_zero(&self) -> bool {
        self.preperiod.is_empty() && self.period == [Z2::ZERO]
    }

    /// Parses the compact `pre:0,1;per:1,0` syntax.
    ///
    /// The `pre:` part may be omitted or left empty. Accepted digits are
    /// exactly 0 and 1.
    pub fn parse_spec(text: &str) -> Result<ParitySeq, String> {
        fn bits(part: &str, label: &str) -> Result<Vec<Z2>, String> {
            if part.is_empty() {
                return Ok(Vec::new());
            }
            part.split(',')
                .map(|tok| match tok.trim() {
                    "0" => Ok(Z2::ZERO),
                    "1" => Ok(Z2::ONE),
                    other => Err(format!("{label}: expected 0 or 1, found {other:?}")),
                })
                .collect()
        }

        let text = text.trim();
        let (pre_part, per_part) = match text.split_once(';') {
            Some((a, b)) => (Some(a.trim()), b.trim()),
            None => (None, text),
        };
        let preperiod = match pre_part {
            Some(p) => {
                let body = p
                    .strip_prefix("pre:")
                    .ok_or_else(|| format!("expected `pre:` before {p:?}"))?;
                bits(body, "preperiod")?
            }
            None => Vec::new(),
        };
        let per_body = per_part
            .strip_prefix("per:")
            .ok_or_else(|| format!("expected `per:` before {per_part:?}"))?;
        let period = bits(per_body, "period")?;
        if period.is_empty() {
            return Err("period must contain at least one digit".into());
        }
        Ok(EpSeq::new(preperiod, period))
    }

    /// Formats the canonical form in the same syntax `parse_spec` accepts.
    pub fn spec_string(&self) -> String {
        let join = |xs: &[Z2]| xs.iter().map(Z2::to_string).collect::<Vec<_>>().join(",");
        if self.preperiod.is_empty() {
            format!("per:{}", join(&self.period))
        } else {
            format!("pre:{};per:{}", join(&self.preperiod), join(&self.period))
        }
    }
}

impl<T: Serialize> Serialize for EpSeq<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a, T> {
            preperiod: &'a [T],
            period: &'a [T],
        }
        Repr { preperiod: &self.preperiod, period: &self.period }.serialize(serializer)
    }
}

impl<'de, T: Deserialize<'de> + Clone + Eq> Deserialize<'de> for EpSeq<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Repr<T> {
            preperiod: Vec<T>,
            period: Vec<T>,
        }
        let repr = Repr::deserialize(deserializer)?;
        if repr.period.is_empty() {
            return Err(D::Error::custom("period must be nonempty"));
        }
        Ok(EpSeq::new(repr.preperiod, repr.period))
    }
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

// ---------------------------------------------------------------------------
