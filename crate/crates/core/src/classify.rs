//! System-level classification over finite grids of basic open sets, product
//! systems, finite-subset hyperspace checks, and instance-level relation
//! checkers.
//!
//! Quantification over "all non-empty open sets" is replaced by the dyadic
//! grid of a declared depth. Positive verdicts are therefore labelled relative
//! to the grid (`SupportedYes`, or `CertifiedYes` when every pair carries a
//! certificate); negative verdicts are absolute — a single witness pair with a
//! certified-empty hit set suffices.
//!
//! Grid pairs are independent work units. With the `parallel` feature they are
//! evaluated on a rayon pool; the final report is always assembled in
//! lexicographic pair order, so results are identical either way.

use crate::family::{Decision, FamilyKind, FamilyVerdict};
use crate::interval::{Interval, IntervalSet, Rat};
use crate::ndsys::{
    HitSetReport, MapSequence, ReportSource, SequenceError, TailCertificate, Witness,
    DEFAULT_NODE_CAP,
};
use crate::plmap::PLMap;
use num::{integer::lcm, One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("grid depth must be at least 1")]
    BadDepth,
    #[error("map at index {index} does not commute with the reference map")]
    NonCommuting { index: usize },
    #[error("sequence is not eventually constant at the reference map")]
    NotEventuallyConstant,
    #[error("operation requires a cycle sequence")]
    NotACycle,
    #[error("finite subset must be non-empty with points in [0,1]")]
    BadFiniteSubset,
    #[error("vietoris open needs non-empty parts")]
    BadVietorisOpen,
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

/// How grid pairs are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Serial,
    /// Rayon pool when the `parallel` feature is enabled; otherwise falls back
    /// to serial evaluation.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Serial
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ClassifyOptions {
    pub exec: Exec,
}

fn map_indexed<I, T, F>(ids: &[I], f: F, exec: Exec) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => ids.par_iter().map(f).collect(),
        _ => ids.iter().map(f).collect(),
    }
}

/// The dyadic open cells `(i/2^depth, (i+1)/2^depth)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpenSetGrid {
    depth: u32,
}

impl OpenSetGrid {
    pub fn new(depth: u32) -> Result<Self, ClassifyError> {
        if depth == 0 {
            return Err(ClassifyError::BadDepth);
        }
        Ok(OpenSetGrid { depth })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn cell_count(&self) -> usize {
        1usize << self.depth
    }

    pub fn cells(&self) -> Vec<IntervalSet> {
        let n = self.cell_count() as i64;
        (0..n)
            .map(|i| {
                Interval::open(
                    Rat::new(i.into(), n.into()),
                    Rat::new((i + 1).into(), n.into()),
                )
                .expect("dyadic cell is non-empty")
                .into()
            })
            .collect()
    }
}

/// Which property a classification report is about.
#[derive(Debug, Clone)]
pub enum PropertyKind {
    FTransitive(FamilyKind),
    FMixing(FamilyKind),
    TopologicallyErgodic,
}

impl fmt::Display for PropertyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyKind::FTransitive(fam) => write!(f, "{}-transitive", fam.name()),
            PropertyKind::FMixing(fam) => write!(f, "{}-mixing", fam.name()),
            PropertyKind::TopologicallyErgodic => write!(f, "topologically-ergodic"),
        }
    }
}

/// Identifies a grid pair in lexicographic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairId {
    Cells(usize, usize),
    Rects(usize, usize, usize, usize),
}

impl fmt::Display for PairId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairId::Cells(i, j) => write!(f, "U=c{i} V=c{j}"),
            PairId::Rects(i, j, k, l) => write!(f, "U=c{i}xc{j} V=c{k}xc{l}"),
        }
    }
}

/// The witness pair of a `ProvenNo` verdict.
#[derive(Debug, Clone)]
pub enum WitnessPair {
    Base { u: IntervalSet, v: IntervalSet },
    Rectangle { u1: IntervalSet, u2: IntervalSet, v1: IntervalSet, v2: IntervalSet },
}

impl fmt::Display for WitnessPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessPair::Base { u, v } => write!(f, "U={u}, V={v}"),
            WitnessPair::Rectangle { u1, u2, v1, v2 } => {
                write!(f, "U={u1}x{u2}, V={v1}x{v2}")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum ClassVerdict {
    /// A concrete pair whose hit set is certified empty.
    ProvenNo { pair_id: PairId, pair: WitnessPair, certificate: TailCertificate },
    /// Every grid pair carries a certified yes.
    CertifiedYes,
    /// Every grid pair is yes-certified or yes-at-horizon.
    SupportedYes,
    Inconclusive,
}

impl ClassVerdict {
    pub fn is_positive(&self) -> bool {
        matches!(self, ClassVerdict::CertifiedYes | ClassVerdict::SupportedYes)
    }

    pub fn label(&self) -> &'static str {
        match self {
            ClassVerdict::ProvenNo { .. } => "proven-no",
            ClassVerdict::CertifiedYes => "certified-yes",
            ClassVerdict::SupportedYes => "supported-yes",
            ClassVerdict::Inconclusive => "inconclusive",
        }
    }
}

/// Per-pair outcome kept for auditing.
#[derive(Debug, Clone)]
pub struct PairSummary {
    pub id: PairId,
    pub verdict: FamilyVerdict,
    pub certificate: TailCertificate,
    pub hit_count: usize,
    pub first_hit: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct ClassificationReport {
    pub property: PropertyKind,
    pub verdict: ClassVerdict,
    pub depth: u32,
    pub horizon: usize,
    pub pair_summaries: Vec<PairSummary>,
    /// Minimum per-pair density estimate (ergodic classification only).
    pub min_density: Option<Rat>,
}

fn strip_witness(cert: &TailCertificate) -> TailCertificate {
    match cert {
        TailCertificate::EventuallyEmpty { base, period, .. } => TailCertificate::EventuallyEmpty {
            base: *base,
            period: *period,
            witness: Witness::Combined,
        },
        TailCertificate::EventuallyFull { base, period, .. } => TailCertificate::EventuallyFull {
            base: *base,
            period: *period,
            witness: Witness::Combined,
        },
        TailCertificate::Unknown => TailCertificate::Unknown,
    }
}

fn summarize(
    property: PropertyKind,
    depth: u32,
    horizon: usize,
    entries: Vec<(PairId, WitnessPair, HitSetReport, FamilyVerdict)>,
    min_density: Option<Rat>,
) -> ClassificationReport {
    let mut verdict = None;
    for (id, pair, report, fv) in &entries {
        if fv.decision == Decision::NoCertified {
            verdict = Some(ClassVerdict::ProvenNo {
                pair_id: *id,
                pair: pair.clone(),
                certificate: report.certificate.clone(),
            });
            break;
        }
    }
    let verdict = verdict.unwrap_or_else(|| {
        if entries.iter().all(|(_, _, _, fv)| fv.decision == Decision::YesCertified) {
            ClassVerdict::CertifiedYes
        } else if entries.iter().all(|(_, _, _, fv)| fv.decision.is_yes()) {
            ClassVerdict::SupportedYes
        } else {
            ClassVerdict::Inconclusive
        }
    });
    let pair_summaries = entries
        .into_iter()
        .map(|(id, _, report, fv)| PairSummary {
            id,
            verdict: fv,
            certificate: strip_witness(&report.certificate),
            hit_count: report.hits.len(),
            first_hit: report.hits.iter().next().copied(),
        })
        .collect();
    ClassificationReport { property, verdict, depth, horizon, pair_summaries, min_density }
}

/// F-transitivity over all ordered grid pairs.
pub fn classify_transitive(
    seq: &MapSequence,
    fam: &FamilyKind,
    grid: &OpenSetGrid,
    horizon: usize,
) -> ClassificationReport {
    classify_transitive_with(seq, fam, grid, horizon, &ClassifyOptions::default())
}

pub fn classify_transitive_with(
    seq: &MapSequence,
    fam: &FamilyKind,
    grid: &OpenSetGrid,
    horizon: usize,
    opts: &ClassifyOptions,
) -> ClassificationReport {
    let cells = grid.cells();
    let n = cells.len();
    let ids: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let entries = map_indexed(
        &ids,
        |&(i, j)| {
            let report = seq.hit_set(&cells[i], &cells[j], horizon);
            let fv = fam.member(&report);
            (
                PairId::Cells(i, j),
                WitnessPair::Base { u: cells[i].clone(), v: cells[j].clone() },
                report,
                fv,
            )
        },
        opts.exec,
    );
    summarize(PropertyKind::FTransitive(fam.clone()), grid.depth(), horizon, entries, None)
}

/// Intersection of the two component hit sets with the combined certificate:
/// any eventually-empty component forces eventually-empty; two eventually-full
/// components give eventually-full with the lcm period; otherwise unknown.
pub fn combine_product(r1: &HitSetReport, r2: &HitSetReport) -> HitSetReport {
    let hits = r1.hits.intersection(&r2.hits).copied().collect();
    let certificate = match (&r1.certificate, &r2.certificate) {
        (
            TailCertificate::EventuallyEmpty { base: b1, period: p1, .. },
            TailCertificate::EventuallyEmpty { base: b2, period: p2, .. },
        ) => {
            let (base, period) = if (b1, p1) <= (b2, p2) { (*b1, *p1) } else { (*b2, *p2) };
            TailCertificate::EventuallyEmpty { base, period, witness: Witness::Combined }
        }
        (TailCertificate::EventuallyEmpty { base, period, .. }, _)
        | (_, TailCertificate::EventuallyEmpty { base, period, .. }) => {
            TailCertificate::EventuallyEmpty {
                base: *base,
                period: *period,
                witness: Witness::Combined,
            }
        }
        (
            TailCertificate::EventuallyFull { base: b1, period: p1, .. },
            TailCertificate::EventuallyFull { base: b2, period: p2, .. },
        ) => TailCertificate::EventuallyFull {
            base: *b1.max(b2),
            period: lcm(*p1, *p2),
            witness: Witness::Combined,
        },
        _ => TailCertificate::Unknown,
    };
    let (seq, u1, v1) = match &r1.source {
        ReportSource::Single { seq, u, v } => (seq.clone(), u.clone(), v.clone()),
        ReportSource::Product { seq, u1, v1, .. } => (seq.clone(), u1.clone(), v1.clone()),
    };
    let (u2, v2) = match &r2.source {
        ReportSource::Single { u, v, .. } => (u.clone(), v.clone()),
        ReportSource::Product { u1, v1, .. } => (u1.clone(), v1.clone()),
    };
    HitSetReport {
        hits,
        horizon: r1.horizon.min(r2.horizon),
        certificate,
        source: ReportSource::Product { seq, u1, v1, u2, v2 },
    }
}

/// Hit set of the self-product system on the rectangle pair
/// `(U1×U2, V1×V2)`: exactly the intersection of the component hit sets.
pub fn product_hit_set(
    seq: &MapSequence,
    u1: &IntervalSet,
    v1: &IntervalSet,
    u2: &IntervalSet,
    v2: &IntervalSet,
    horizon: usize,
) -> HitSetReport {
    let r1 = seq.hit_set(u1, v1, horizon);
    let r2 = seq.hit_set(u2, v2, horizon);
    combine_product(&r1, &r2)
}

/// F-mixing: F-transitivity of the self-product system over all rectangle
/// pairs built from grid cells.
pub fn classify_mixing(
    seq: &MapSequence,
    fam: &FamilyKind,
    grid: &OpenSetGrid,
    horizon: usize,
) -> ClassificationReport {
    classify_mixing_with(seq, fam, grid, horizon, &ClassifyOptions::default())
}

pub fn classify_mixing_with(
    seq: &MapSequence,
    fam: &FamilyKind,
    grid: &OpenSetGrid,
    horizon: usize,
    opts: &ClassifyOptions,
) -> ClassificationReport {
    let cells = grid.cells();
    let n = cells.len();
    let ids: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    // component reports once, then every rectangle pair is a cheap combination
    let base: Vec<HitSetReport> = map_indexed(
        &ids,
        |&(i, j)| seq.hit_set(&cells[i], &cells[j], horizon),
        opts.exec,
    );
    let at = |i: usize, j: usize| &base[i * n + j];
    let mut entries = Vec::with_capacity(n * n * n * n);
    for u1 in 0..n {
        for u2 in 0..n {
            for v1 in 0..n {
                for v2 in 0..n {
                    let report = combine_product(at(u1, v1), at(u2, v2));
                    let fv = fam.member(&report);
                    entries.push((
                        PairId::Rects(u1, u2, v1, v2),
                        WitnessPair::Rectangle {
                            u1: cells[u1].clone(),
                            u2: cells[u2].clone(),
                            v1: cells[v1].clone(),
                            v2: cells[v2].clone(),
                        },
                        report,
                        fv,
                    ));
                }
            }
        }
    }
    summarize(PropertyKind::FMixing(fam.clone()), grid.depth(), horizon, entries, None)
}

/// Topological ergodicity: positive upper density of every grid pair's hit
/// set, with min prefix-density evidence for horizon verdicts.
pub fn classify_ergodic(
    seq: &MapSequence,
    grid: &OpenSetGrid,
    horizon: usize,
    threshold: &Rat,
) -> ClassificationReport {
    classify_ergodic_with(seq, grid, horizon, threshold, &ClassifyOptions::default())
}

pub fn classify_ergodic_with(
    seq: &MapSequence,
    grid: &OpenSetGrid,
    horizon: usize,
    threshold: &Rat,
    opts: &ClassifyOptions,
) -> ClassificationReport {
    let fam = FamilyKind::PositiveUpperDensity { threshold: threshold.clone() };
    let cells = grid.cells();
    let n = cells.len();
    let ids: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let entries = map_indexed(
        &ids,
        |&(i, j)| {
            let report = seq.hit_set(&cells[i], &cells[j], horizon);
            let fv = fam.member(&report);
            (
                PairId::Cells(i, j),
                WitnessPair::Base { u: cells[i].clone(), v: cells[j].clone() },
                report,
                fv,
            )
        },
        opts.exec,
    );
    let min_density = entries
        .iter()
        .map(|(_, _, r, _)| crate::family::upper_density(r).estimate)
        .min();
    summarize(
        PropertyKind::TopologicallyErgodic,
        grid.depth(),
        horizon,
        entries,
        min_density,
    )
}

/// A sorted set of distinct points of `[0,1]` — the finite-subset stand-in
/// for the hyperspace of compact sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSubset {
    points: Vec<Rat>,
}

impl FiniteSubset {
    pub fn new(mut points: Vec<Rat>) -> Result<Self, ClassifyError> {
        if points.is_empty() {
            return Err(ClassifyError::BadFiniteSubset);
        }
        points.sort();
        points.dedup();
        if points.iter().any(|p| p.is_negative() || p > &Rat::one()) {
            return Err(ClassifyError::BadFiniteSubset);
        }
        Ok(FiniteSubset { points })
    }

    pub fn points(&self) -> &[Rat] {
        &self.points
    }

    pub fn to_interval_set(&self) -> IntervalSet {
        IntervalSet::from_parts(self.points.iter().cloned().map(Interval::point).collect())
    }
}

/// A basic Vietoris open `⟨U_1,…,U_k⟩`: membership of a finite set `K` means
/// `K ⊆ ∪U_i` and `K ∩ U_i ≠ ∅` for every `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VietorisOpen {
    parts: Vec<IntervalSet>,
}

impl VietorisOpen {
    pub fn new(parts: Vec<IntervalSet>) -> Result<Self, ClassifyError> {
        if parts.is_empty() || parts.iter().any(|p| p.is_empty()) {
            return Err(ClassifyError::BadVietorisOpen);
        }
        Ok(VietorisOpen { parts })
    }

    pub fn parts(&self) -> &[IntervalSet] {
        &self.parts
    }

    pub fn member(&self, k: &FiniteSubset) -> bool {
        let covered = k
            .points()
            .iter()
            .all(|p| self.parts.iter().any(|part| part.contains_point(p)));
        let meets_all = self
            .parts
            .iter()
            .all(|part| k.points().iter().any(|p| part.contains_point(p)));
        covered && meets_all
    }
}

/// Applies `f_1^n` pointwise to `K` and tests Vietoris membership of the image.
pub fn hyper_hit(seq: &MapSequence, k: &FiniteSubset, n: usize, v: &VietorisOpen) -> bool {
    assert!(n >= 1);
    let mut points: Vec<Rat> = k.points().to_vec();
    for step in 1..=n {
        let m = seq.resolve(step);
        for p in points.iter_mut() {
            *p = m.eval(p).expect("orbit stays in [0,1]");
        }
    }
    let image = FiniteSubset::new(points).expect("image of a finite set is finite");
    v.member(&image)
}

/// Report of the uniform-limit instance check: exact distance sum, the two
/// telescoped distance bounds on a grid, and classification agreement between
/// the sequence and the constant system of its limit map.
#[derive(Debug, Clone)]
pub struct UniformLimitReport {
    pub distance_sum: Rat,
    pub prop_bound_ok: bool,
    pub prop_violation: Option<(Rat, usize)>,
    pub cor_bound_ok: bool,
    pub cor_violation: Option<(Rat, usize, usize)>,
    pub seq_classification: ClassificationReport,
    pub limit_classification: ClassificationReport,
    pub verdicts_agree: bool,
}

/// Instance check for an eventually-constant sequence commuting with its
/// limit: verifies `d(f_1^k(x), f^k(x)) ≤ Σ_{i≤k} D(f_i,f)` and
/// `d(f_1^{n+k}(x), f^k(f_1^n(x))) ≤ Σ_{i≤k} D(f_{i+1},f)` pointwise on the
/// grid, and cross-checks transitivity classification of the sequence against
/// the constant-`f` system.
#[allow(clippy::too_many_arguments)]
pub fn check_thm31_instance(
    seq: &MapSequence,
    f: &PLMap,
    x_grid: &[Rat],
    k_max: usize,
    fam: &FamilyKind,
    grid: &OpenSetGrid,
    horizon: usize,
    opts: &ClassifyOptions,
) -> Result<UniformLimitReport, ClassifyError> {
    let prefix_len = match seq {
        MapSequence::EventuallyConstant { prefix, tail } if tail == f => prefix.len(),
        MapSequence::Explicit { prefix, tail: crate::ndsys::TailRule::Constant(t) } if t == f => {
            prefix.len()
        }
        _ => return Err(ClassifyError::NotEventuallyConstant),
    };
    for i in 1..=prefix_len + 1 {
        let fi = seq.resolve(i);
        if fi.compose(f) != f.compose(fi) {
            return Err(ClassifyError::NonCommuting { index: i });
        }
    }

    // D(f_i, f) vanishes beyond the prefix
    let dist: Vec<Rat> = (1..=prefix_len)
        .map(|i| seq.resolve(i).sup_distance(f))
        .collect();
    let distance_sum: Rat = dist.iter().fold(Rat::zero(), |a, d| a + d);
    let partial = |k: usize| -> Rat {
        dist.iter().take(k).fold(Rat::zero(), |a, d| a + d)
    };
    let partial_shifted = |k: usize| -> Rat {
        // Σ_{i=1}^k D(f_{i+1}, f): indices 2..=k+1
        (2..=k + 1)
            .filter(|&i| i <= prefix_len)
            .fold(Rat::zero(), |a, i| a + &dist[i - 1])
    };

    let mut prop_violation = None;
    let mut cor_violation = None;
    'outer: for x in x_grid {
        // forward orbit under the sequence, and under the constant limit map
        let n_max = prefix_len + 2;
        let mut seq_orbit = Vec::with_capacity(n_max + k_max + 1);
        seq_orbit.push(x.clone());
        for i in 1..=n_max + k_max {
            let prev = seq_orbit.last().unwrap();
            seq_orbit.push(seq.resolve(i).eval(prev).expect("in range"));
        }
        let mut f_orbit = Vec::with_capacity(k_max + 1);
        f_orbit.push(x.clone());
        for _ in 1..=k_max {
            let prev = f_orbit.last().unwrap();
            f_orbit.push(f.eval(prev).expect("in range"));
        }
        for k in 1..=k_max {
            if (&seq_orbit[k] - &f_orbit[k]).abs() > partial(k) {
                prop_violation = Some((x.clone(), k));
                break 'outer;
            }
        }
        for n in 1..=n_max {
            // f^k applied to f_1^n(x)
            let mut y = seq_orbit[n].clone();
            for k in 1..=k_max {
                y = f.eval(&y).expect("in range");
                if (&seq_orbit[n + k] - &y).abs() > partial_shifted(k) {
                    cor_violation = Some((x.clone(), n, k));
                    break 'outer;
                }
            }
        }
    }

    let seq_classification = classify_transitive_with(seq, fam, grid, horizon, opts);
    let limit_classification =
        classify_transitive_with(&MapSequence::constant(f.clone()), fam, grid, horizon, opts);
    let verdicts_agree =
        seq_classification.verdict.is_positive() == limit_classification.verdict.is_positive();

    Ok(UniformLimitReport {
        distance_sum,
        prop_bound_ok: prop_violation.is_none(),
        prop_violation,
        cor_bound_ok: cor_violation.is_none(),
        cor_violation,
        seq_classification,
        limit_classification,
        verdicts_agree,
    })
}

/// Outcome of the shift-relation instance check.
#[derive(Debug, Clone)]
pub enum ShiftRelation {
    /// `int(f_1^{k-1}(U))` is empty — the feeble-openness hypothesis fails.
    HypothesisFailure { image: IntervalSet },
    /// Every shifted hit `m` on `(U*, V)` was found again in the base system
    /// at `m + k - 1`; `violations` lists the exceptions (an implementation
    /// bug if non-empty, not a counterexample).
    Checked { u_star: IntervalSet, offset: usize, violations: Vec<usize> },
}

/// Verifies the hit-set relation between a system and its `k`-shift:
/// `m ∈ N_shifted(U*, V) ⇒ m + k - 1 ∈ N(U, V)` with
/// `U* = int(f_1^{k-1}(U))`.
pub fn check_shift_relation(
    seq: &MapSequence,
    u: &IntervalSet,
    v: &IntervalSet,
    k: usize,
    horizon: usize,
) -> Result<ShiftRelation, ClassifyError> {
    assert!(k >= 1);
    let head = seq.compose_prefix(k - 1, DEFAULT_NODE_CAP)?;
    let image = head.image(u);
    let u_star = image.interior();
    if u_star.is_empty() {
        return Ok(ShiftRelation::HypothesisFailure { image });
    }
    let offset = k - 1;
    let base = seq.hit_set(u, v, horizon);
    let shifted = seq.shifted(k).hit_set(&u_star, v, horizon.saturating_sub(offset));
    let violations = shifted
        .hits
        .iter()
        .filter(|&&m| !base.hits.contains(&(m + offset)))
        .copied()
        .collect();
    Ok(ShiftRelation::Checked { u_star, offset, violations })
}

/// Property selector for [`check_finite_family_prop`].
#[derive(Debug, Clone)]
pub enum PropertySelector {
    Transitive(FamilyKind),
    Mixing(FamilyKind),
    Ergodic { threshold: Rat },
}

/// Both classifications of a finite-family system plus the instance-level
/// implication evidence.
#[derive(Debug, Clone)]
pub struct FiniteFamilyReport {
    pub composition: ClassificationReport,
    pub cycle: ClassificationReport,
    /// composition-positive ⇒ cycle-positive, at the verdict level.
    pub implication_holds: bool,
    /// Pairs and indices where a composition hit at `n` had no cycle hit at
    /// `n·k` (empty unless something is wrong).
    pub embedding_violations: Vec<(PairId, usize)>,
}

/// Classifies the constant system generated by the full-cycle composition and
/// the cycle system itself, and checks the hit embedding
/// `n ∈ N_comp(U,V) ⇒ n·k ∈ N_cycle(U,V)` on every grid pair.
pub fn check_finite_family_prop(
    seq: &MapSequence,
    grid: &OpenSetGrid,
    horizon: usize,
    selector: &PropertySelector,
    opts: &ClassifyOptions,
) -> Result<FiniteFamilyReport, ClassifyError> {
    let k = match seq {
        MapSequence::Cycle(maps) => maps.len(),
        _ => return Err(ClassifyError::NotACycle),
    };
    let comp = seq.compose_prefix(k, DEFAULT_NODE_CAP)?;
    let comp_seq = MapSequence::constant(comp);

    let run = |s: &MapSequence, h: usize| -> ClassificationReport {
        match selector {
            PropertySelector::Transitive(fam) => classify_transitive_with(s, fam, grid, h, opts),
            PropertySelector::Mixing(fam) => classify_mixing_with(s, fam, grid, h, opts),
            PropertySelector::Ergodic { threshold } => {
                classify_ergodic_with(s, grid, h, threshold, opts)
            }
        }
    };
    let comp_horizon = (horizon / k).max(1);
    let composition = run(&comp_seq, comp_horizon);
    let cycle = run(seq, comp_horizon * k);

    let cells = grid.cells();
    let n_cells = cells.len();
    let ids: Vec<(usize, usize)> = (0..n_cells)
        .flat_map(|i| (0..n_cells).map(move |j| (i, j)))
        .collect();
    let violations: Vec<(PairId, usize)> = map_indexed(
        &ids,
        |&(i, j)| {
            let comp_hits = comp_seq.hit_set(&cells[i], &cells[j], comp_horizon).hits;
            let cycle_hits = seq.hit_set(&cells[i], &cells[j], comp_horizon * k).hits;
            comp_hits
                .iter()
                .filter(|&&m| !cycle_hits.contains(&(m * k)))
                .map(|&m| (PairId::Cells(i, j), m))
                .collect::<Vec<_>>()
        },
        opts.exec,
    )
    .into_iter()
    .flatten()
    .collect();

    let implication_holds =
        !composition.verdict.is_positive() || cycle.verdict.is_positive();

    Ok(FiniteFamilyReport { composition, cycle, implication_holds, embedding_violations: violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::rat;

    fn pl(nodes: &[(&str, &str)]) -> PLMap {
        PLMap::new(
            nodes
                .iter()
                .map(|(x, y)| (x.parse().unwrap(), y.parse().unwrap()))
                .collect(),
        )
        .unwrap()
    }

    fn tent() -> PLMap {
        pl(&[("0", "0"), ("1/2", "1"), ("1", "0")])
    }

    fn open(lo: (i64, i64), hi: (i64, i64)) -> IntervalSet {
        Interval::open(rat(lo.0, lo.1), rat(hi.0, hi.1)).unwrap().into()
    }

    #[test]
    fn grid_cells_are_lexicographic_dyadic_intervals() {
        let grid = OpenSetGrid::new(2).unwrap();
        let cells = grid.cells();
        assert_eq!(cells.len(), 4);
        assert_eq!(cells[0], open((0, 4), (1, 4)));
        assert_eq!(cells[3], open((3, 4), (4, 4)));
        assert!(OpenSetGrid::new(0).is_err());
    }

    #[test]
    fn identity_system_is_proven_not_transitive() {
        let seq = MapSequence::constant(PLMap::identity());
        let grid = OpenSetGrid::new(1).unwrap();
        let report = classify_transitive(&seq, &FamilyKind::Infinite, &grid, 50);
        match &report.verdict {
            ClassVerdict::ProvenNo { pair_id, pair, .. } => {
                assert_eq!(*pair_id, PairId::Cells(0, 1));
                match pair {
                    WitnessPair::Base { u, v } => {
                        assert_eq!(u, &open((0, 2), (1, 2)));
                        assert_eq!(v, &open((1, 2), (2, 2)));
                    }
                    _ => panic!("base witness expected"),
                }
            }
            other => panic!("expected proven-no, got {other:?}"),
        }
    }

    #[test]
    fn plateau_first_map_defeats_transitivity() {
        // first map sends everything in [0,1/3] to 1, tail fixes 0
        let g1 = pl(&[("0", "1"), ("1/3", "1"), ("1", "0")]);
        let g2 = pl(&[("0", "0"), ("1/3", "1"), ("1", "0")]);
        let seq = MapSequence::eventually_constant(vec![g1], g2);
        let grid = OpenSetGrid::new(3).unwrap();
        let report = classify_transitive(&seq, &FamilyKind::Infinite, &grid, 200);
        assert!(matches!(report.verdict, ClassVerdict::ProvenNo { .. }));
    }

    #[test]
    fn tent_system_is_positively_transitive_on_the_grid() {
        let seq = MapSequence::constant(tent());
        let grid = OpenSetGrid::new(3).unwrap();
        let report = classify_transitive(&seq, &FamilyKind::Infinite, &grid, 500);
        assert!(report.verdict.is_positive(), "got {}", report.verdict.label());
        assert!(report.pair_summaries.iter().all(|p| p.hit_count > 0));
    }

    #[test]
    fn tent_system_positive_on_a_depth_four_grid() {
        let seq = MapSequence::constant(tent());
        let grid = OpenSetGrid::new(4).unwrap();
        let report = classify_transitive(&seq, &FamilyKind::Infinite, &grid, 2000);
        assert!(report.verdict.is_positive(), "got {}", report.verdict.label());
        assert_eq!(report.pair_summaries.len(), 256);
        assert!(report.pair_summaries.iter().all(|p| p.hit_count > 0));
    }

    #[test]
    fn serial_and_parallel_reports_agree() {
        let seq = MapSequence::constant(tent());
        let grid = OpenSetGrid::new(2).unwrap();
        let serial = classify_transitive_with(
            &seq,
            &FamilyKind::Infinite,
            &grid,
            200,
            &ClassifyOptions { exec: Exec::Serial },
        );
        let parallel = classify_transitive_with(
            &seq,
            &FamilyKind::Infinite,
            &grid,
            200,
            &ClassifyOptions { exec: Exec::Parallel },
        );
        assert_eq!(serial.verdict.label(), parallel.verdict.label());
        assert_eq!(serial.pair_summaries.len(), parallel.pair_summaries.len());
        for (a, b) in serial.pair_summaries.iter().zip(&parallel.pair_summaries) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.hit_count, b.hit_count);
        }
    }

    #[test]
    fn product_hits_are_exactly_component_intersections() {
        let seq = MapSequence::constant(tent());
        let (u1, v1) = (open((0, 8), (1, 8)), open((3, 8), (4, 8)));
        let (u2, v2) = (open((2, 8), (3, 8)), open((6, 8), (7, 8)));
        let product = product_hit_set(&seq, &u1, &v1, &u2, &v2, 200);
        // independent recomputation: walk both orbits once
        let o1 = seq.orbit_images(&u1, 200);
        let o2 = seq.orbit_images(&u2, 200);
        let expect: std::collections::BTreeSet<usize> = (1..=200)
            .filter(|&n| o1[n - 1].intersects(&v1) && o2[n - 1].intersects(&v2))
            .collect();
        assert_eq!(product.hits, expect);
    }

    #[test]
    fn product_with_certified_empty_component_is_certified_empty() {
        let seq = MapSequence::constant(PLMap::identity());
        let product = product_hit_set(
            &seq,
            &open((0, 2), (1, 2)),
            &open((1, 2), (2, 2)), // never hit under the identity
            &open((0, 2), (1, 2)),
            &open((0, 2), (1, 2)),
            100,
        );
        assert!(product.hits.is_empty());
        assert!(matches!(product.certificate, TailCertificate::EventuallyEmpty { .. }));
    }

    #[test]
    fn full_product_on_full_range_map() {
        let seq = MapSequence::constant(tent());
        let u = open((0, 1), (1, 1));
        let product = product_hit_set(&seq, &u, &u, &u, &u, 100);
        assert_eq!(product.hits, (1..=100).collect());
        assert!(matches!(product.certificate, TailCertificate::EventuallyFull { .. }));
    }

    #[test]
    fn identity_system_is_not_mixing() {
        let seq = MapSequence::constant(PLMap::identity());
        let grid = OpenSetGrid::new(1).unwrap();
        let report = classify_mixing(&seq, &FamilyKind::Infinite, &grid, 50);
        assert!(matches!(report.verdict, ClassVerdict::ProvenNo { .. }));
    }

    #[test]
    fn crush_to_fixed_point_defeats_mixing_at_depths_two_and_three() {
        // variant with a zero plateau: crushed orbits stay at the fixed point 0
        let g1 = pl(&[("0", "0"), ("1/4", "0"), ("1", "1")]);
        let g2 = pl(&[("0", "0"), ("1/4", "1"), ("1", "0")]);
        let seq = MapSequence::eventually_constant(vec![g1], g2);
        for depth in [2u32, 3] {
            let grid = OpenSetGrid::new(depth).unwrap();
            let report = classify_mixing(&seq, &FamilyKind::Infinite, &grid, 300);
            assert!(
                matches!(report.verdict, ClassVerdict::ProvenNo { .. }),
                "depth {depth}: got {}",
                report.verdict.label()
            );
        }
    }

    #[test]
    fn tent_system_is_positively_mixing_on_a_coarse_grid() {
        let seq = MapSequence::constant(tent());
        let grid = OpenSetGrid::new(2).unwrap();
        let report = classify_mixing(&seq, &FamilyKind::Infinite, &grid, 300);
        assert!(report.verdict.is_positive());
    }

    #[test]
    fn ergodic_verdicts() {
        let threshold = crate::family::default_density_threshold();
        let grid = OpenSetGrid::new(3).unwrap();

        let id = MapSequence::constant(PLMap::identity());
        let report = classify_ergodic(&id, &grid, 100, &threshold);
        assert!(matches!(report.verdict, ClassVerdict::ProvenNo { .. }));

        // plateau first map, tent tail: crushed orbit locks at 0
        let g1 = pl(&[("0", "1/2"), ("1/2", "1/2"), ("1", "1")]);
        let seq = MapSequence::eventually_constant(vec![g1], tent());
        let report = classify_ergodic(&seq, &grid, 300, &threshold);
        assert!(matches!(report.verdict, ClassVerdict::ProvenNo { .. }));

        let t = MapSequence::constant(tent());
        let report = classify_ergodic(&t, &grid, 500, &threshold);
        assert!(report.verdict.is_positive());
        assert!(report.min_density.is_some());
    }

    #[test]
    fn hyper_hit_on_pairs_of_points() {
        let seq = MapSequence::constant(tent());
        let v = VietorisOpen::new(vec![IntervalSet::from(
            Interval::new(rat(1, 2), rat(1, 1), false, true).unwrap(),
        )])
        .unwrap();
        let k = FiniteSubset::new(vec![rat(0, 1), rat(1, 2)]).unwrap();
        assert!(!hyper_hit(&seq, &k, 1, &v)); // image {0,1} not inside (1/2,1]
        let k = FiniteSubset::new(vec![rat(3, 8), rat(1, 2)]).unwrap();
        assert!(hyper_hit(&seq, &k, 1, &v)); // image {3/4,1}
    }

    #[test]
    fn singleton_hyper_hit_implies_base_hit() {
        let seq = MapSequence::cycle(vec![tent(), pl(&[("0", "1/4"), ("1/4", "0"), ("1", "1")])])
            .unwrap();
        let u = open((1, 8), (2, 8));
        let v = open((5, 8), (6, 8));
        let vietoris = VietorisOpen::new(vec![v.clone()]).unwrap();
        let report = seq.hit_set(&u, &v, 12);
        for num in 1..16i64 {
            let x = rat(num, 16);
            if !u.contains_point(&x) {
                continue;
            }
            let k = FiniteSubset::new(vec![x]).unwrap();
            for n in 1..=12 {
                if hyper_hit(&seq, &k, n, &vietoris) {
                    assert!(report.hits.contains(&n), "n = {n}");
                }
            }
        }
    }

    #[test]
    fn thm31_instance_trivial_when_sequence_is_constant_at_f() {
        let f = tent();
        let seq = MapSequence::constant(f.clone());
        let grid = OpenSetGrid::new(2).unwrap();
        let xg: Vec<Rat> = (0..=10).map(|i| rat(i, 10)).collect();
        let report = check_thm31_instance(
            &seq,
            &f,
            &xg,
            6,
            &FamilyKind::Infinite,
            &grid,
            200,
            &ClassifyOptions::default(),
        )
        .unwrap();
        assert_eq!(report.distance_sum, rat(0, 1));
        assert!(report.prop_bound_ok && report.cor_bound_ok);
        assert!(report.verdicts_agree);
    }

    #[test]
    fn thm31_instance_with_tent_squared_prefix() {
        let f = tent();
        let f2 = f.compose(&f);
        let seq = MapSequence::eventually_constant(vec![f2], f.clone());
        let grid = OpenSetGrid::new(2).unwrap();
        let xg: Vec<Rat> = (0..=20).map(|i| rat(i, 20)).collect();
        let report = check_thm31_instance(
            &seq,
            &f,
            &xg,
            8,
            &FamilyKind::Infinite,
            &grid,
            300,
            &ClassifyOptions::default(),
        )
        .unwrap();
        assert_eq!(report.distance_sum, rat(1, 1)); // D(tent∘tent, tent) = 1
        assert!(report.prop_bound_ok && report.cor_bound_ok);
        assert!(report.verdicts_agree);
    }

    #[test]
    fn thm31_instance_rejects_non_commuting_prefix() {
        // plateau-then-identity map does not commute with the corrected valley map
        let f = pl(&[("0", "0"), ("1/4", "1/2"), ("1/2", "1/2"), ("1", "1")]);
        let g = pl(&[("0", "1/2"), ("1/4", "0"), ("1/2", "1"), ("1", "0")]);
        let seq = MapSequence::eventually_constant(vec![f], g.clone());
        let grid = OpenSetGrid::new(1).unwrap();
        let err = check_thm31_instance(
            &seq,
            &g,
            &[rat(0, 1)],
            2,
            &FamilyKind::Infinite,
            &grid,
            50,
            &ClassifyOptions::default(),
        )
        .unwrap_err();
        assert_eq!(err, ClassifyError::NonCommuting { index: 1 });
    }

    #[test]
    fn shift_relation_trivial_for_k_one() {
        let seq = MapSequence::constant(tent());
        let u = open((1, 4), (1, 2));
        let v = open((1, 2), (3, 4));
        match check_shift_relation(&seq, &u, &v, 1, 100).unwrap() {
            ShiftRelation::Checked { u_star, offset, violations } => {
                assert_eq!(u_star, u);
                assert_eq!(offset, 0);
                assert!(violations.is_empty());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn shift_relation_reports_hypothesis_failure_for_plateau_first_map() {
        let g1 = pl(&[("0", "1"), ("1/3", "1"), ("1", "0")]);
        let g2 = pl(&[("0", "0"), ("1/3", "1"), ("1", "0")]);
        let seq = MapSequence::eventually_constant(vec![g1], g2);
        let u = open((0, 1), (1, 6));
        let v = open((1, 2), (3, 4));
        match check_shift_relation(&seq, &u, &v, 2, 100).unwrap() {
            ShiftRelation::HypothesisFailure { image } => {
                assert_eq!(image, IntervalSet::point(rat(1, 1)));
            }
            other => panic!("expected hypothesis failure, got {other:?}"),
        }
    }

    #[test]
    fn shift_relation_holds_on_a_feeble_cycle() {
        let f1 = pl(&[("0", "0"), ("1/4", "1"), ("1", "1/4")]);
        let f2 = pl(&[("0", "1/4"), ("1/4", "0"), ("1", "1")]);
        let seq = MapSequence::cycle(vec![f1, f2]).unwrap();
        for k in 1..=3 {
            match check_shift_relation(&seq, &open((1, 8), (2, 8)), &open((5, 8), (7, 8)), k, 200)
                .unwrap()
            {
                ShiftRelation::Checked { violations, .. } => {
                    assert!(violations.is_empty(), "k = {k}")
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn finite_family_converse_fails_but_implication_holds() {
        // cycle whose two-step composite has the invariant interval [1/2,1]
        let f1 = pl(&[("0", "1/2"), ("1/4", "1"), ("3/4", "0"), ("1", "1/2")]);
        let f2 = pl(&[("0", "1/2"), ("1/2", "1"), ("2/3", "0"), ("1", "1")]);
        let seq = MapSequence::cycle(vec![f1, f2]).unwrap();
        let grid = OpenSetGrid::new(2).unwrap();
        let report = check_finite_family_prop(
            &seq,
            &grid,
            400,
            &PropertySelector::Transitive(FamilyKind::Infinite),
            &ClassifyOptions::default(),
        )
        .unwrap();
        assert!(matches!(report.composition.verdict, ClassVerdict::ProvenNo { .. }));
        assert!(report.cycle.verdict.is_positive());
        assert!(report.implication_holds);
        assert!(report.embedding_violations.is_empty());
    }

    #[test]
    fn finite_family_identity_cycle_is_negative_on_both_sides() {
        let seq = MapSequence::cycle(vec![PLMap::identity(), PLMap::identity()]).unwrap();
        let grid = OpenSetGrid::new(1).unwrap();
        let report = check_finite_family_prop(
            &seq,
            &grid,
            50,
            &PropertySelector::Transitive(FamilyKind::Infinite),
            &ClassifyOptions::default(),
        )
        .unwrap();
        assert!(matches!(report.composition.verdict, ClassVerdict::ProvenNo { .. }));
        assert!(matches!(report.cycle.verdict, ClassVerdict::ProvenNo { .. }));
        assert!(report.implication_holds);
    }

    #[test]
    fn cycle_classification_agrees_with_its_shift_when_feeble_open() {
        let f1 = pl(&[("0", "0"), ("1/4", "1"), ("1", "1/4")]);
        let f2 = pl(&[("0", "1/4"), ("1/4", "0"), ("1", "1")]);
        let seq = MapSequence::cycle(vec![f1, f2]).unwrap();
        let grid = OpenSetGrid::new(2).unwrap();
        let a = classify_transitive(&seq, &FamilyKind::Infinite, &grid, 300);
        let b = classify_transitive(&seq.shifted(2), &FamilyKind::Infinite, &grid, 300);
        assert_eq!(a.verdict.is_positive(), b.verdict.is_positive());
    }

    #[test]
    fn mixing_proven_no_is_stable_under_refinement() {
        let g1 = pl(&[("0", "0"), ("1/4", "0"), ("1", "1")]);
        let g2 = pl(&[("0", "0"), ("1/4", "1"), ("1", "0")]);
        let seq = MapSequence::eventually_constant(vec![g1], g2);
        let d2 = classify_mixing(&seq, &FamilyKind::Infinite, &OpenSetGrid::new(2).unwrap(), 200);
        let d3 = classify_mixing(&seq, &FamilyKind::Infinite, &OpenSetGrid::new(3).unwrap(), 200);
        assert!(matches!(d2.verdict, ClassVerdict::ProvenNo { .. }));
        assert!(matches!(d3.verdict, ClassVerdict::ProvenNo { .. }));
    }
}
