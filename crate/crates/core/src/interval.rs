//! Rational intervals in `[0,1]` with per-endpoint inclusivity, and canonical
//! finite unions of them.
//!
//! An [`Interval`] can be degenerate (a single point, necessarily closed); an
//! empty interval is not representable — absence is expressed at the
//! [`IntervalSet`] level. Sets are kept in canonical form: parts sorted by
//! lower endpoint, pairwise disjoint, and merged whenever their union is again
//! an interval, so structural equality is set equality.

use num::{BigInt, BigRational, Zero};
use std::fmt;
use thiserror::Error;

/// Arbitrary-precision rational. Always stored in lowest terms with a positive
/// denominator (maintained by `num`).
pub type Rat = BigRational;

/// Rational from an integer pair. Panics on a zero denominator.
pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error("interval ({0}, {1}) is empty or reversed")]
    Empty(String, String),
    #[error("operation requires a non-empty set")]
    EmptySet,
}

/// A non-empty rational interval with independent endpoint inclusivity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Rat,
    hi: Rat,
    lo_closed: bool,
    hi_closed: bool,
}

impl Interval {
    /// Builds an interval, rejecting empty ones (`lo > hi`, or `lo == hi`
    /// without both endpoints closed).
    pub fn new(lo: Rat, hi: Rat, lo_closed: bool, hi_closed: bool) -> Result<Self, IntervalError> {
        if lo > hi || (lo == hi && !(lo_closed && hi_closed)) {
            return Err(IntervalError::Empty(lo.to_string(), hi.to_string()));
        }
        Ok(Interval { lo, hi, lo_closed, hi_closed })
    }

    pub fn closed(lo: Rat, hi: Rat) -> Result<Self, IntervalError> {
        Interval::new(lo, hi, true, true)
    }

    pub fn open(lo: Rat, hi: Rat) -> Result<Self, IntervalError> {
        Interval::new(lo, hi, false, false)
    }

    /// The degenerate interval `{x}`.
    pub fn point(x: Rat) -> Self {
        Interval { lo: x.clone(), hi: x, lo_closed: true, hi_closed: true }
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rat) -> bool {
        let above = x > &self.lo || (x == &self.lo && self.lo_closed);
        let below = x < &self.hi || (x == &self.hi && self.hi_closed);
        above && below
    }

    /// Containment with inclusivity: every point of `other` lies in `self`.
    pub fn contains_interval(&self, other: &Interval) -> bool {
        let lo_ok = self.lo < other.lo || (self.lo == other.lo && (self.lo_closed || !other.lo_closed));
        let hi_ok = other.hi < self.hi || (other.hi == self.hi && (self.hi_closed || !other.hi_closed));
        lo_ok && hi_ok
    }

    /// Exact intersection, `None` when disjoint.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            std::cmp::Ordering::Greater => (self.lo.clone(), self.lo_closed),
            std::cmp::Ordering::Less => (other.lo.clone(), other.lo_closed),
            std::cmp::Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            std::cmp::Ordering::Less => (self.hi.clone(), self.hi_closed),
            std::cmp::Ordering::Greater => (other.hi.clone(), other.hi_closed),
            std::cmp::Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        Interval::new(lo, hi, lo_closed, hi_closed).ok()
    }

    /// Single-interval union when the two overlap or touch with a covered
    /// junction point; `None` when the union is not an interval.
    fn try_merge(&self, other: &Interval) -> Option<Interval> {
        // assumes self.lo <= other.lo (callers sort)
        debug_assert!(self.lo <= other.lo);
        let joinable = other.lo < self.hi
            || (other.lo == self.hi && (other.lo_closed || self.hi_closed));
        if !joinable {
            return None;
        }
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            std::cmp::Ordering::Less => (other.hi.clone(), other.hi_closed),
            std::cmp::Ordering::Greater => (self.hi.clone(), self.hi_closed),
            std::cmp::Ordering::Equal => (self.hi.clone(), self.hi_closed || other.hi_closed),
        };
        let lo_closed = if self.lo == other.lo {
            self.lo_closed || other.lo_closed
        } else {
            self.lo_closed
        };
        Some(Interval { lo: self.lo.clone(), hi, lo_closed, hi_closed })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            return write!(f, "{{{}}}", self.lo);
        }
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' },
        )
    }
}

/// Canonical finite union of intervals. Parts are sorted, pairwise disjoint,
/// and non-mergeable; equality of values is equality of the represented sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { parts: Vec::new() }
    }

    /// Canonicalizes an arbitrary collection of parts.
    pub fn from_parts(mut parts: Vec<Interval>) -> Self {
        parts.sort_by(|a, b| {
            a.lo.cmp(&b.lo)
                .then_with(|| b.lo_closed.cmp(&a.lo_closed)) // closed end first
                .then_with(|| a.hi.cmp(&b.hi))
        });
        let mut canon: Vec<Interval> = Vec::with_capacity(parts.len());
        for p in parts {
            match canon.last_mut() {
                Some(last) => match last.try_merge(&p) {
                    Some(merged) => *last = merged,
                    None => canon.push(p),
                },
                None => canon.push(p),
            }
        }
        IntervalSet { parts: canon }
    }

    pub fn point(x: Rat) -> Self {
        Interval::point(x).into()
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains_point(&self, x: &Rat) -> bool {
        self.parts.iter().any(|p| p.contains(x))
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        let mut parts = self.parts.clone();
        parts.extend(other.parts.iter().cloned());
        IntervalSet::from_parts(parts)
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let mut parts = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                if let Some(c) = a.intersect(b) {
                    parts.push(c);
                }
            }
        }
        IntervalSet::from_parts(parts)
    }

    pub fn intersects(&self, other: &IntervalSet) -> bool {
        self.parts
            .iter()
            .any(|a| other.parts.iter().any(|b| a.intersect(b).is_some()))
    }

    /// Inclusivity-exact containment. Canonical parts are non-mergeable, so
    /// every part of `self` must fit inside a single part of `other`.
    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.parts
            .iter()
            .all(|a| other.parts.iter().any(|b| b.contains_interval(a)))
    }

    /// Interior relative to `[0,1]`: degenerate parts vanish; an endpoint stays
    /// attained only at 0 or 1 (where `[0,ε)`-style sets are relatively open).
    pub fn interior(&self) -> IntervalSet {
        let parts = self
            .parts
            .iter()
            .filter(|p| !p.is_point())
            .map(|p| Interval {
                lo: p.lo.clone(),
                hi: p.hi.clone(),
                lo_closed: p.lo_closed && p.lo.is_zero(),
                hi_closed: p.hi_closed && p.hi == Rat::from_integer(1.into()),
            })
            .collect();
        IntervalSet::from_parts(parts)
    }

    /// Closure: every endpoint becomes attained.
    pub fn closure(&self) -> IntervalSet {
        let parts = self
            .parts
            .iter()
            .map(|p| Interval {
                lo: p.lo.clone(),
                hi: p.hi.clone(),
                lo_closed: true,
                hi_closed: true,
            })
            .collect();
        IntervalSet::from_parts(parts)
    }

    /// True if some part is non-degenerate.
    pub fn has_interior(&self) -> bool {
        self.parts.iter().any(|p| !p.is_point())
    }
}

impl From<Interval> for IntervalSet {
    fn from(iv: Interval) -> Self {
        IntervalSet { parts: vec![iv] }
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "empty");
        }
        let mut first = true;
        for p in &self.parts {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "{p}")?;
            first = false;
        }
        Ok(())
    }
}

fn point_to_set_distance(x: &Rat, parts: &[Interval]) -> Rat {
    // parts closed and sorted; distance 0 inside, else gap to nearest endpoint
    let mut best: Option<Rat> = None;
    for p in parts {
        let d = if x < p.lo() {
            p.lo() - x
        } else if x > p.hi() {
            x - p.hi()
        } else {
            return Rat::zero();
        };
        best = Some(match best {
            Some(b) if b <= d => b,
            _ => d,
        });
    }
    best.expect("non-empty set")
}

fn directed_hausdorff(a: &IntervalSet, b: &IntervalSet) -> Rat {
    // sup over x in A of d(x,B); attained at an endpoint of A or at the
    // midpoint of a gap of B that A covers
    let mut best = Rat::zero();
    for p in a.parts() {
        for e in [p.lo(), p.hi()] {
            let d = point_to_set_distance(e, b.parts());
            if d > best {
                best = d;
            }
        }
    }
    for w in b.parts().windows(2) {
        let mid = (w[0].hi() + w[1].lo()) / Rat::from_integer(2.into());
        if a.contains_point(&mid) {
            let d = (w[1].lo() - w[0].hi()) / Rat::from_integer(2.into());
            if d > best {
                best = d;
            }
        }
    }
    best
}

/// Exact Hausdorff distance between the closures of two non-empty sets.
pub fn hausdorff_distance(a: &IntervalSet, b: &IntervalSet) -> Result<Rat, IntervalError> {
    if a.is_empty() || b.is_empty() {
        return Err(IntervalError::EmptySet);
    }
    let (ca, cb) = (a.closure(), b.closure());
    let d1 = directed_hausdorff(&ca, &cb);
    let d2 = directed_hausdorff(&cb, &ca);
    Ok(d1.max(d2))
}
