//! Non-autonomous map sequences, orbit-of-set iteration, and exact hit sets
//! with certified infinite-tail verdicts.
//!
//! A [`MapSequence`] resolves every index `n ≥ 1` to a map `f_n` and is
//! eventually periodic by construction, with a structural preperiod and period.
//! The hit set `N(U,V) = {n : f_1^n(U) ∩ V ≠ ∅}` is computed exactly by
//! iterating images (never by building `f_1^n`, whose node count can grow
//! geometrically). A [`TailCertificate`] is a finite witness that soundly
//! determines the infinite tail of a hit set:
//!
//! - window nesting: if the maps repeat with period `p` from index `n` and
//!   `A_{n+p} ⊆ A_n`, then `A_{n+p+j} ⊆ A_{n+j}` for all `j ≥ 0` by induction,
//!   so a `V`-miss over one full period propagates forever (dually for `⊇` and
//!   hits);
//! - absorbing set: a per-phase forward-closed overapproximation of all later
//!   images that misses `V`, found by closing over a finite atom partition.
//!   This covers tails whose images wander without ever nesting (for example a
//!   contraction sliding an interval toward a fixed point).
//!
//! `Unknown` is a legitimate output; downstream verdicts degrade to
//! horizon-limited evidence rather than guessing.

use crate::interval::{IntervalSet, Rat};
use crate::plmap::PLMap;
use num::{One, Zero};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// Node-count guard for [`MapSequence::compose_prefix`].
pub const DEFAULT_NODE_CAP: usize = 1 << 17;

/// Default certificate search bound used by [`MapSequence::hit_set`].
pub const DEFAULT_CERT_SEARCH: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("a cycle needs at least one map")]
    EmptyCycle,
    #[error("composition node count {nodes} exceeds cap {cap} at step {step}")]
    NodeCapExceeded { step: usize, nodes: usize, cap: usize },
}

/// Tail rule of an explicit-prefix sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TailRule {
    Cycle(Vec<PLMap>),
    Constant(PLMap),
}

/// The non-autonomous rule `f_{1,∞}`: every index `n ≥ 1` resolves to exactly
/// one map, and the resolved sequence is eventually periodic with computable
/// preperiod and period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapSequence {
    /// `f_n = maps[(n-1) mod k]`.
    Cycle(Vec<PLMap>),
    /// The prefix maps in order, then `tail` forever.
    EventuallyConstant { prefix: Vec<PLMap>, tail: PLMap },
    /// Explicit prefix followed by a cyclic or constant tail.
    Explicit { prefix: Vec<PLMap>, tail: TailRule },
}

impl MapSequence {
    pub fn cycle(maps: Vec<PLMap>) -> Result<Self, SequenceError> {
        if maps.is_empty() {
            return Err(SequenceError::EmptyCycle);
        }
        Ok(MapSequence::Cycle(maps))
    }

    pub fn constant(map: PLMap) -> Self {
        MapSequence::EventuallyConstant { prefix: Vec::new(), tail: map }
    }

    pub fn eventually_constant(prefix: Vec<PLMap>, tail: PLMap) -> Self {
        MapSequence::EventuallyConstant { prefix, tail }
    }

    pub fn explicit(prefix: Vec<PLMap>, tail: TailRule) -> Result<Self, SequenceError> {
        if let TailRule::Cycle(maps) = &tail {
            if maps.is_empty() {
                return Err(SequenceError::EmptyCycle);
            }
        }
        Ok(MapSequence::Explicit { prefix, tail })
    }

    /// The map applied at step `n ≥ 1`.
    pub fn resolve(&self, n: usize) -> &PLMap {
        assert!(n >= 1, "sequence indices are 1-based");
        match self {
            MapSequence::Cycle(maps) => &maps[(n - 1) % maps.len()],
            MapSequence::EventuallyConstant { prefix, tail } => {
                prefix.get(n - 1).unwrap_or(tail)
            }
            MapSequence::Explicit { prefix, tail } => {
                if n <= prefix.len() {
                    &prefix[n - 1]
                } else {
                    match tail {
                        TailRule::Cycle(maps) => &maps[(n - prefix.len() - 1) % maps.len()],
                        TailRule::Constant(map) => map,
                    }
                }
            }
        }
    }

    /// Smallest index from which the resolved sequence repeats with
    /// [`period`](Self::period) (structural, not necessarily minimal).
    pub fn preperiod(&self) -> usize {
        match self {
            MapSequence::Cycle(_) => 1,
            MapSequence::EventuallyConstant { prefix, .. } => prefix.len() + 1,
            MapSequence::Explicit { prefix, .. } => prefix.len() + 1,
        }
    }

    /// Structural period of the tail.
    pub fn period(&self) -> usize {
        match self {
            MapSequence::Cycle(maps) => maps.len(),
            MapSequence::EventuallyConstant { .. } => 1,
            MapSequence::Explicit { tail, .. } => match tail {
                TailRule::Cycle(maps) => maps.len(),
                TailRule::Constant(_) => 1,
            },
        }
    }

    /// The sequence whose `n`-th map is `f_{n+k-1}` (the system obtained by
    /// deleting the first `k-1` members).
    pub fn shifted(&self, k: usize) -> MapSequence {
        assert!(k >= 1, "shift indices are 1-based");
        let drop = k - 1;
        let rotate = |maps: &[PLMap], by: usize| -> Vec<PLMap> {
            let len = maps.len();
            let by = by % len;
            maps[by..].iter().chain(maps[..by].iter()).cloned().collect()
        };
        match self {
            MapSequence::Cycle(maps) => MapSequence::Cycle(rotate(maps, drop)),
            MapSequence::EventuallyConstant { prefix, tail } => {
                if drop <= prefix.len() {
                    MapSequence::EventuallyConstant {
                        prefix: prefix[drop..].to_vec(),
                        tail: tail.clone(),
                    }
                } else {
                    MapSequence::constant(tail.clone())
                }
            }
            MapSequence::Explicit { prefix, tail } => {
                if drop <= prefix.len() {
                    MapSequence::Explicit { prefix: prefix[drop..].to_vec(), tail: tail.clone() }
                } else {
                    match tail {
                        TailRule::Cycle(maps) => {
                            MapSequence::Cycle(rotate(maps, drop - prefix.len()))
                        }
                        TailRule::Constant(map) => MapSequence::constant(map.clone()),
                    }
                }
            }
        }
    }

    /// Exact composition `f_n ∘ … ∘ f_1` (`n = 0` gives the identity).
    /// Intended for small `n`; the node count is guarded by `cap`.
    pub fn compose_prefix(&self, n: usize, cap: usize) -> Result<PLMap, SequenceError> {
        let mut acc = PLMap::identity();
        for i in 1..=n {
            acc = self.resolve(i).compose(&acc);
            if acc.node_count() > cap {
                return Err(SequenceError::NodeCapExceeded {
                    step: i,
                    nodes: acc.node_count(),
                    cap,
                });
            }
        }
        Ok(acc)
    }

    /// The image sets `A_1, …, A_horizon` with `A_n = f_n(A_{n-1})`, `A_0 = U`.
    pub fn orbit_images(&self, u: &IntervalSet, horizon: usize) -> Vec<IntervalSet> {
        let mut out = Vec::with_capacity(horizon);
        let mut cur = u.clone();
        for n in 1..=horizon {
            cur = self.resolve(n).image(&cur);
            out.push(cur.clone());
        }
        out
    }

    /// Hit set with certificate search bounded by [`DEFAULT_CERT_SEARCH`].
    pub fn hit_set(&self, u: &IntervalSet, v: &IntervalSet, horizon: usize) -> HitSetReport {
        self.hit_set_with(u, v, horizon, DEFAULT_CERT_SEARCH.min(horizon))
    }

    /// Hit set with an explicit certificate search bound.
    pub fn hit_set_with(
        &self,
        u: &IntervalSet,
        v: &IntervalSet,
        horizon: usize,
        cert_bound: usize,
    ) -> HitSetReport {
        let depth = horizon.max(cert_bound);
        let orbit = self.orbit_images(u, depth);
        let hits: BTreeSet<usize> = (1..=horizon)
            .filter(|n| orbit[n - 1].intersects(v))
            .collect();
        let certificate = certify_scan(self, &orbit, v, cert_bound);
        HitSetReport {
            hits,
            horizon,
            certificate,
            source: ReportSource::Single { seq: self.clone(), u: u.clone(), v: v.clone() },
        }
    }

    /// Searches for a sound tail certificate, scanning base indices from the
    /// preperiod up to `search_bound` with candidate periods that are
    /// multiples of the sequence period. Returns the first certificate found,
    /// else `Unknown`; never an unsound one.
    pub fn certify_tail(
        &self,
        u: &IntervalSet,
        v: &IntervalSet,
        search_bound: usize,
    ) -> TailCertificate {
        let orbit = self.orbit_images(u, search_bound);
        certify_scan(self, &orbit, v, search_bound)
    }
}

/// Tail verdict for a hit set, with the finite witness that justifies it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TailCertificate {
    /// No hit occurs at any index `≥ base`.
    EventuallyEmpty { base: usize, period: usize, witness: Witness },
    /// Every index `≥ base` is a hit.
    EventuallyFull { base: usize, period: usize, witness: Witness },
    Unknown,
}

/// The evidence carried by a certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// The window `A_base, …, A_{base+period}` (inclusive of the wrap image so
    /// the nesting can be audited directly).
    NestedWindow { images: Vec<IntervalSet> },
    /// Per-phase forward-closed overapproximations of every later image.
    AbsorbingSet { phases: Vec<IntervalSet> },
    /// Derived by combining component certificates of a product system.
    Combined,
}

impl TailCertificate {
    pub fn is_unknown(&self) -> bool {
        matches!(self, TailCertificate::Unknown)
    }

    pub fn base(&self) -> Option<usize> {
        match self {
            TailCertificate::EventuallyEmpty { base, .. }
            | TailCertificate::EventuallyFull { base, .. } => Some(*base),
            TailCertificate::Unknown => None,
        }
    }

    pub fn period(&self) -> Option<usize> {
        match self {
            TailCertificate::EventuallyEmpty { period, .. }
            | TailCertificate::EventuallyFull { period, .. } => Some(*period),
            TailCertificate::Unknown => None,
        }
    }

    pub fn kind_str(&self) -> &'static str {
        match self {
            TailCertificate::EventuallyEmpty { .. } => "eventually_empty",
            TailCertificate::EventuallyFull { .. } => "eventually_full",
            TailCertificate::Unknown => "unknown",
        }
    }
}

impl fmt::Display for TailCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailCertificate::EventuallyEmpty { base, period, .. } => {
                write!(f, "eventually-empty from n={base} (period {period})")
            }
            TailCertificate::EventuallyFull { base, period, .. } => {
                write!(f, "eventually-full from n={base} (period {period})")
            }
            TailCertificate::Unknown => write!(f, "unknown"),
        }
    }
}

/// What a [`HitSetReport`] was computed from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReportSource {
    Single { seq: MapSequence, u: IntervalSet, v: IntervalSet },
    Product {
        seq: MapSequence,
        u1: IntervalSet,
        v1: IntervalSet,
        u2: IntervalSet,
        v2: IntervalSet,
    },
}

/// Finite hit set up to a horizon plus the tail certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HitSetReport {
    /// Indices `n ≤ horizon` with `f_1^n(U) ∩ V ≠ ∅`, exact.
    pub hits: BTreeSet<usize>,
    pub horizon: usize,
    pub certificate: TailCertificate,
    pub source: ReportSource,
}

impl HitSetReport {
    /// Prefix density `|hits ∩ [1,n]| / n`.
    pub fn prefix_density(&self, n: usize) -> Rat {
        assert!(n >= 1);
        let count = self.hits.range(1..=n).count();
        Rat::new(count.into(), n.into())
    }

    /// `max_{n ≤ horizon} |hits ∩ [1,n]| / n`, the prefix limsup proxy.
    pub fn max_prefix_density(&self) -> Rat {
        let mut best = Rat::zero();
        let mut count = 0usize;
        // the maximum over all n is attained at some hit index
        for &h in &self.hits {
            count += 1;
            let d = Rat::new(count.into(), h.into());
            if d > best {
                best = d;
            }
        }
        best
    }
}

fn orbit_at(orbit: &[IntervalSet], n: usize) -> &IntervalSet {
    &orbit[n - 1]
}

/// Window-nesting scan followed by the absorbing-set fallback.
fn certify_scan(
    seq: &MapSequence,
    orbit: &[IntervalSet],
    v: &IntervalSet,
    bound: usize,
) -> TailCertificate {
    let n0 = seq.preperiod();
    let q = seq.period();
    if bound < n0 + q || orbit.len() < bound {
        return TailCertificate::Unknown;
    }
    let hit: Vec<bool> = orbit.iter().map(|a| a.intersects(v)).collect();

    for base in n0..=bound.saturating_sub(q) {
        let mut p = q;
        while base + p <= bound {
            let all_miss = (base..base + p).all(|m| !hit[m - 1]);
            let all_hit = (base..base + p).all(|m| hit[m - 1]);
            if all_miss && orbit_at(orbit, base + p).is_subset_of(orbit_at(orbit, base)) {
                let images = orbit[base - 1..base + p].to_vec();
                return TailCertificate::EventuallyEmpty {
                    base,
                    period: p,
                    witness: Witness::NestedWindow { images },
                };
            }
            if all_hit && orbit_at(orbit, base).is_subset_of(orbit_at(orbit, base + p)) {
                let images = orbit[base - 1..base + p].to_vec();
                return TailCertificate::EventuallyFull {
                    base,
                    period: p,
                    witness: Witness::NestedWindow { images },
                };
            }
            p += q;
        }
    }

    // nesting failed everywhere; try the atom-closure absorbing set at a few
    // bases (later bases let transients fade)
    let mut step = 0usize;
    loop {
        let base = n0 + step * q;
        if base + q > bound {
            break;
        }
        if (base..base + q).all(|m| !hit[m - 1]) {
            if let Some(cert) = absorbing_certificate(seq, orbit, v, base) {
                return cert;
            }
        }
        step = if step == 0 { 1 } else { step * 2 };
    }
    TailCertificate::Unknown
}

/// Snaps each part outward to the enclosing atom-aligned closed interval.
fn snap_to_atoms(s: &IntervalSet, atoms: &BTreeSet<Rat>) -> IntervalSet {
    let parts = s
        .parts()
        .iter()
        .map(|p| {
            let lo = atoms.range(..=p.lo().clone()).next_back().expect("0 is an atom").clone();
            let hi = atoms.range(p.hi().clone()..).next().expect("1 is an atom").clone();
            crate::interval::Interval::closed(lo, hi).expect("snapped interval is ordered")
        })
        .collect();
    IntervalSet::from_parts(parts)
}

/// Builds a per-phase forward-closed overapproximation of all images from
/// `base` onward by closing over a finite atom partition; certifies
/// EventuallyEmpty when every phase misses `V`.
fn absorbing_certificate(
    seq: &MapSequence,
    orbit: &[IntervalSet],
    v: &IntervalSet,
    base: usize,
) -> Option<TailCertificate> {
    let p = seq.period();
    let maps: Vec<&PLMap> = (0..p).map(|j| seq.resolve(base + 1 + j)).collect();

    // atoms stay structural (map nodes and V endpoints), never orbit
    // endpoints: orbit denominators grow without bound, and the snapped
    // overapproximation is sound either way
    let mut atoms: BTreeSet<Rat> = BTreeSet::new();
    atoms.insert(Rat::zero());
    atoms.insert(Rat::one());
    for part in v.parts() {
        atoms.insert(part.lo().clone());
        atoms.insert(part.hi().clone());
    }
    for m in &maps {
        for (x, y) in m.nodes() {
            atoms.insert(x.clone());
            atoms.insert(y.clone());
        }
    }

    let mut phases: Vec<IntervalSet> = (0..p)
        .map(|j| snap_to_atoms(orbit_at(orbit, base + j), &atoms))
        .collect();
    if phases.iter().any(|s| s.intersects(v)) {
        return None;
    }
    let max_sweeps = 2 * atoms.len() * p + 8;
    for _ in 0..max_sweeps {
        let mut changed = false;
        for j in 0..p {
            let snapped = snap_to_atoms(&maps[j].image(&phases[j]), &atoms);
            let target = (j + 1) % p;
            if !snapped.is_subset_of(&phases[target]) {
                phases[target] = phases[target].union(&snapped);
                changed = true;
            }
        }
        if !changed {
            if phases.iter().all(|s| !s.intersects(v)) {
                return Some(TailCertificate::EventuallyEmpty {
                    base,
                    period: p,
                    witness: Witness::AbsorbingSet { phases },
                });
            }
            return None;
        }
    }
    None
}
