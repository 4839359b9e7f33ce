//! Furstenberg-family membership verdicts for hit sets.
//!
//! A verdict is *certified* only when the tail certificate logically forces the
//! answer for the infinite set: an eventually-empty tail makes the hit set
//! finite (hence in none of the built-in families), an eventually-full tail
//! makes it cofinite (hence in all of them). Without a certificate the verdict
//! is horizon-limited and carries numeric evidence, under declared conventions:
//!
//! - `Infinite`: yes-at-horizon iff any hit was seen (evidence: hit count);
//! - `Cofinite`: yes-at-horizon only for a gap-free prefix, otherwise
//!   inconclusive with the first missing index (a prefix can refute nothing);
//! - `Syndetic`: yes-at-horizon iff the unclosed tail gap does not exceed the
//!   largest gap already observed (evidence: max gap);
//! - `Thick`: yes-at-horizon iff the longest run strictly grew between
//!   `horizon/2` and `horizon` (evidence: longest run);
//! - `PositiveUpperDensity`: yes-at-horizon iff the prefix density stays at or
//!   above the threshold over the last half of the horizon.

use crate::interval::Rat;
use crate::ndsys::{HitSetReport, TailCertificate};
use num::{One, Zero};
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("dual_check supports only the Infinite/Cofinite pair, got {0}")]
    UnsupportedDual(String),
}

/// Horizon-limited verdict from the raw report.
pub type PrefixVerdictFn = Box<dyn Fn(&HitSetReport) -> FamilyVerdict + Send + Sync>;

/// Certified verdict when the handler can decide from the certificate.
pub type CertificateVerdictFn =
    Box<dyn Fn(&HitSetReport, &TailCertificate) -> Option<FamilyVerdict> + Send + Sync>;

/// Threshold convention for the positive-upper-density proxy.
pub fn default_density_threshold() -> Rat {
    Rat::new(1.into(), 100.into())
}

/// A user-supplied family: a prefix predicate plus a certificate handler. The
/// library never infers tail behaviour for custom families.
pub struct CustomFamily {
    pub name: String,
    pub prefix_verdict: PrefixVerdictFn,
    pub certificate_verdict: CertificateVerdictFn,
}

impl fmt::Debug for CustomFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFamily").field("name", &self.name).finish()
    }
}

/// The built-in Furstenberg families plus custom ones.
#[derive(Debug, Clone)]
pub enum FamilyKind {
    /// All infinite subsets of Z+.
    Infinite,
    /// All cofinite subsets of Z+.
    Cofinite,
    /// Sets with bounded gaps.
    Syndetic,
    /// Sets containing arbitrarily long runs.
    Thick,
    /// Sets whose prefix-counting upper density is positive; the threshold
    /// parametrizes the horizon proxy only.
    PositiveUpperDensity { threshold: Rat },
    Custom(Arc<CustomFamily>),
}

impl FamilyKind {
    pub fn positive_upper_density() -> Self {
        FamilyKind::PositiveUpperDensity { threshold: default_density_threshold() }
    }

    /// Hypothesis bookkeeping: whether `kF·kF ⊆ kF` holds. The infinite family
    /// qualifies (its dual, the cofinite sets, is intersection-closed), the
    /// cofinite family does not (disjoint infinite sets exist), nor do the
    /// syndetic or thick families (the evens and odds are disjoint and both
    /// syndetic); positive upper density qualifies (two lower-density-1 sets
    /// intersect in a lower-density-1 set).
    pub fn is_filterdual(&self) -> Option<bool> {
        match self {
            FamilyKind::Infinite => Some(true),
            FamilyKind::Cofinite => Some(false),
            FamilyKind::Syndetic => Some(false),
            FamilyKind::Thick => Some(false),
            FamilyKind::PositiveUpperDensity { .. } => Some(true),
            FamilyKind::Custom(_) => None,
        }
    }

    /// Hypothesis bookkeeping: closure under `F ↦ F±i` (with clamping to Z+).
    /// All five built-ins are translation invariant.
    pub fn is_translation_invariant(&self) -> Option<bool> {
        match self {
            FamilyKind::Custom(_) => None,
            _ => Some(true),
        }
    }

    pub fn name(&self) -> String {
        match self {
            FamilyKind::Infinite => "infinite".into(),
            FamilyKind::Cofinite => "cofinite".into(),
            FamilyKind::Syndetic => "syndetic".into(),
            FamilyKind::Thick => "thick".into(),
            FamilyKind::PositiveUpperDensity { .. } => "positive-upper-density".into(),
            FamilyKind::Custom(c) => format!("custom:{}", c.name),
        }
    }

    /// Membership verdict of the report's hit set in this family.
    pub fn member(&self, report: &HitSetReport) -> FamilyVerdict {
        if let FamilyKind::Custom(c) = self {
            if let Some(v) = (c.certificate_verdict)(report, &report.certificate) {
                return v;
            }
            return (c.prefix_verdict)(report);
        }
        match &report.certificate {
            TailCertificate::EventuallyEmpty { .. } => FamilyVerdict {
                decision: Decision::NoCertified,
                evidence: Evidence::HitCount(report.hits.len()),
            },
            TailCertificate::EventuallyFull { base, .. } => self.certified_full(report, *base),
            TailCertificate::Unknown => self.at_horizon(report),
        }
    }

    /// The hit set contains `[base, ∞)`: certified yes for every built-in,
    /// with family-specific evidence.
    fn certified_full(&self, report: &HitSetReport, base: usize) -> FamilyVerdict {
        let evidence = match self {
            FamilyKind::Infinite => Evidence::HitCount(report.hits.len()),
            FamilyKind::Cofinite => match (1..base).find(|n| !report.hits.contains(n)) {
                Some(m) => Evidence::FirstMiss(m),
                None => Evidence::FullPrefix,
            },
            FamilyKind::Syndetic => {
                // gap bound over hits ∪ [base, ∞): gaps live in [1, base]
                let mut prev = 0usize;
                let mut max_gap = 0usize;
                for &h in report.hits.iter().take_while(|&&h| h <= base).chain([&base]) {
                    max_gap = max_gap.max(h - prev);
                    prev = h;
                }
                Evidence::MaxGap(max_gap)
            }
            FamilyKind::Thick => Evidence::LongestRun(report.horizon.saturating_sub(base) + 1),
            FamilyKind::PositiveUpperDensity { .. } => Evidence::ExactDensity(Rat::one()),
            FamilyKind::Custom(_) => unreachable!("custom handled by caller"),
        };
        FamilyVerdict { decision: Decision::YesCertified, evidence }
    }

    fn at_horizon(&self, report: &HitSetReport) -> FamilyVerdict {
        let h = report.horizon;
        let hits = &report.hits;
        match self {
            FamilyKind::Infinite => {
                let k = hits.len();
                FamilyVerdict {
                    decision: if k > 0 { Decision::YesAtHorizon } else { Decision::NoAtHorizon },
                    evidence: Evidence::HitCount(k),
                }
            }
            FamilyKind::Cofinite => match (1..=h).find(|n| !hits.contains(n)) {
                None => FamilyVerdict {
                    decision: Decision::YesAtHorizon,
                    evidence: Evidence::FullPrefix,
                },
                Some(m) => FamilyVerdict {
                    decision: Decision::Inconclusive,
                    evidence: Evidence::FirstMiss(m),
                },
            },
            FamilyKind::Syndetic => {
                if hits.is_empty() {
                    return FamilyVerdict {
                        decision: Decision::NoAtHorizon,
                        evidence: Evidence::MaxGap(h),
                    };
                }
                let mut prev = 0usize;
                let mut max_closed = 0usize;
                for &n in hits {
                    max_closed = max_closed.max(n - prev);
                    prev = n;
                }
                let trailing = h + 1 - prev;
                if trailing <= max_closed {
                    FamilyVerdict {
                        decision: Decision::YesAtHorizon,
                        evidence: Evidence::MaxGap(max_closed),
                    }
                } else {
                    FamilyVerdict {
                        decision: Decision::NoAtHorizon,
                        evidence: Evidence::MaxGap(trailing),
                    }
                }
            }
            FamilyKind::Thick => {
                let run_at = |upto: usize| -> usize {
                    let mut best = 0usize;
                    let mut cur = 0usize;
                    let mut prev = 0usize;
                    for &n in hits.range(1..=upto.max(1)) {
                        cur = if n == prev + 1 { cur + 1 } else { 1 };
                        prev = n;
                        best = best.max(cur);
                    }
                    best
                };
                let full = run_at(h);
                let half = run_at(h / 2);
                FamilyVerdict {
                    decision: if full > half && full > 0 {
                        Decision::YesAtHorizon
                    } else {
                        Decision::NoAtHorizon
                    },
                    evidence: Evidence::LongestRun(full),
                }
            }
            FamilyKind::PositiveUpperDensity { threshold } => {
                let start = h / 2 + 1;
                let mut count = hits.range(1..start).count();
                let mut min_d: Option<Rat> = None;
                let mut max_d: Option<Rat> = None;
                for n in start..=h {
                    if hits.contains(&n) {
                        count += 1;
                    }
                    let d = Rat::new(count.into(), n.into());
                    if min_d.as_ref().is_none_or(|m| &d < m) {
                        min_d = Some(d.clone());
                    }
                    if max_d.as_ref().is_none_or(|m| &d > m) {
                        max_d = Some(d);
                    }
                }
                let min_d = min_d.unwrap_or_else(Rat::zero);
                let max_d = max_d.unwrap_or_else(Rat::zero);
                FamilyVerdict {
                    decision: if &min_d >= threshold {
                        Decision::YesAtHorizon
                    } else {
                        Decision::NoAtHorizon
                    },
                    evidence: Evidence::DensityWindow {
                        final_density: report.prefix_density(h.max(1)),
                        min_last_half: min_d,
                        max_last_half: max_d,
                    },
                }
            }
            FamilyKind::Custom(_) => unreachable!("custom handled by caller"),
        }
    }
}

/// Certified or horizon-limited membership decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    YesCertified,
    NoCertified,
    YesAtHorizon,
    NoAtHorizon,
    Inconclusive,
}

impl Decision {
    pub fn is_yes(&self) -> bool {
        matches!(self, Decision::YesCertified | Decision::YesAtHorizon)
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, Decision::YesCertified | Decision::NoCertified)
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Decision::YesCertified => "yes-certified",
            Decision::NoCertified => "no-certified",
            Decision::YesAtHorizon => "yes-at-horizon",
            Decision::NoAtHorizon => "no-at-horizon",
            Decision::Inconclusive => "inconclusive",
        };
        write!(f, "{s}")
    }
}

/// Family-specific numeric evidence attached to every verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evidence {
    HitCount(usize),
    MaxGap(usize),
    LongestRun(usize),
    FirstMiss(usize),
    FullPrefix,
    ExactDensity(Rat),
    DensityWindow { final_density: Rat, min_last_half: Rat, max_last_half: Rat },
    None,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyVerdict {
    pub decision: Decision,
    pub evidence: Evidence,
}

/// Upper-density summary of a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityEstimate {
    /// `max_{n ≤ horizon} |hits ∩ [1,n]| / n`.
    pub estimate: Rat,
    /// 0 for an eventually-empty tail, 1 for an eventually-full one.
    pub exact: Option<Rat>,
}

pub fn upper_density(report: &HitSetReport) -> DensityEstimate {
    let exact = match &report.certificate {
        TailCertificate::EventuallyEmpty { .. } => Some(Rat::zero()),
        TailCertificate::EventuallyFull { .. } => Some(Rat::one()),
        TailCertificate::Unknown => None,
    };
    DensityEstimate { estimate: report.max_prefix_density(), exact }
}

/// `{n + i : n ∈ hits, n + i ≥ 1}` (Z+ convention: indices below 1 are dropped).
pub fn translate(hits: &BTreeSet<usize>, i: i64) -> BTreeSet<usize> {
    hits.iter()
        .filter_map(|&n| {
            let m = n as i64 + i;
            (m >= 1).then_some(m as usize)
        })
        .collect()
}

/// Membership of the hit set in the dual family, for the decidable pair
/// `k(Infinite) = Cofinite` and `k(Cofinite) = Infinite`.
pub fn dual_check(fam: &FamilyKind, report: &HitSetReport) -> Result<FamilyVerdict, FamilyError> {
    match fam {
        FamilyKind::Infinite => Ok(FamilyKind::Cofinite.member(report)),
        FamilyKind::Cofinite => Ok(FamilyKind::Infinite.member(report)),
        other => Err(FamilyError::UnsupportedDual(other.name())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::{rat, Interval, IntervalSet};
    use crate::ndsys::{MapSequence, ReportSource, Witness};
    use crate::plmap::PLMap;

    fn synthetic(hits: &[usize], horizon: usize, certificate: TailCertificate) -> HitSetReport {
        let u: IntervalSet = Interval::open(rat(0, 1), rat(1, 2)).unwrap().into();
        HitSetReport {
            hits: hits.iter().copied().collect(),
            horizon,
            certificate,
            source: ReportSource::Single {
                seq: MapSequence::constant(PLMap::identity()),
                u: u.clone(),
                v: u,
            },
        }
    }

    fn empty_cert() -> TailCertificate {
        TailCertificate::EventuallyEmpty {
            base: 2,
            period: 1,
            witness: Witness::NestedWindow { images: vec![] },
        }
    }

    fn full_cert(base: usize) -> TailCertificate {
        TailCertificate::EventuallyFull {
            base,
            period: 1,
            witness: Witness::NestedWindow { images: vec![] },
        }
    }

    #[test]
    fn eventually_empty_is_certified_no_everywhere() {
        let report = synthetic(&[1], 100, empty_cert());
        for fam in [
            FamilyKind::Infinite,
            FamilyKind::Cofinite,
            FamilyKind::Syndetic,
            FamilyKind::Thick,
            FamilyKind::positive_upper_density(),
        ] {
            assert_eq!(fam.member(&report).decision, Decision::NoCertified, "{}", fam.name());
        }
    }

    #[test]
    fn eventually_full_from_one_is_syndetic_with_gap_bound_one() {
        let hits: Vec<usize> = (1..=100).collect();
        let report = synthetic(&hits, 100, full_cert(1));
        let v = FamilyKind::Syndetic.member(&report);
        assert_eq!(v.decision, Decision::YesCertified);
        assert_eq!(v.evidence, Evidence::MaxGap(1));
    }

    #[test]
    fn consistency_chain_on_certified_reports() {
        let hits: Vec<usize> = (3..=50).collect();
        let report = synthetic(&hits, 50, full_cert(3));
        let cof = FamilyKind::Cofinite.member(&report).decision;
        let syn = FamilyKind::Syndetic.member(&report).decision;
        let inf = FamilyKind::Infinite.member(&report).decision;
        assert_eq!(cof, Decision::YesCertified);
        assert_eq!(syn, Decision::YesCertified);
        assert_eq!(inf, Decision::YesCertified);
    }

    #[test]
    fn evens_are_syndetic_at_horizon_with_max_gap_two() {
        let evens: Vec<usize> = (1..=1000).map(|k| 2 * k).collect();
        let report = synthetic(&evens, 2000, TailCertificate::Unknown);
        let v = FamilyKind::Syndetic.member(&report);
        assert_eq!(v.decision, Decision::YesAtHorizon);
        assert_eq!(v.evidence, Evidence::MaxGap(2));
    }

    #[test]
    fn early_burst_is_not_syndetic_at_horizon() {
        let burst: Vec<usize> = (1..=100).collect();
        let report = synthetic(&burst, 2000, TailCertificate::Unknown);
        let v = FamilyKind::Syndetic.member(&report);
        assert_eq!(v.decision, Decision::NoAtHorizon);
        assert_eq!(v.evidence, Evidence::MaxGap(1901));
    }

    #[test]
    fn thick_requires_growing_runs() {
        // runs grow: suffix run of length > any in the first half
        let mut growing: Vec<usize> = vec![1, 5, 6, 20, 21, 22];
        growing.extend(90..=100);
        let report = synthetic(&growing, 100, TailCertificate::Unknown);
        assert_eq!(FamilyKind::Thick.member(&report).decision, Decision::YesAtHorizon);

        let evens: Vec<usize> = (1..=50).map(|k| 2 * k).collect();
        let report = synthetic(&evens, 100, TailCertificate::Unknown);
        let v = FamilyKind::Thick.member(&report);
        assert_eq!(v.decision, Decision::NoAtHorizon);
        assert_eq!(v.evidence, Evidence::LongestRun(1));
    }

    #[test]
    fn density_estimate_of_evens_is_one_half() {
        let evens: Vec<usize> = (1..=1000).map(|k| 2 * k).collect();
        let report = synthetic(&evens, 2000, TailCertificate::Unknown);
        let d = upper_density(&report);
        assert_eq!(d.estimate, rat(1, 2));
        assert_eq!(d.exact, None);
    }

    #[test]
    fn density_exact_values_from_certificates() {
        let report = synthetic(&[1], 100, empty_cert());
        assert_eq!(upper_density(&report).exact, Some(rat(0, 1)));
        let hits: Vec<usize> = (1..=100).collect();
        let report = synthetic(&hits, 100, full_cert(1));
        assert_eq!(upper_density(&report).exact, Some(rat(1, 1)));
    }

    #[test]
    fn translate_clamps_below_one() {
        let s: BTreeSet<usize> = [1, 2, 3].into();
        assert_eq!(translate(&s, 0), s);
        assert_eq!(translate(&s, 2), [3, 4, 5].into());
        assert_eq!(translate(&s, -2), [1].into());
    }

    #[test]
    fn translate_round_trip_on_surviving_range() {
        let s: BTreeSet<usize> = [1, 4, 9, 16, 25].into();
        for i in [-3i64, 0, 5] {
            let back = translate(&translate(&s, i), -i);
            // clamping drops exactly the elements below 1 - i
            let lo = 1i64.max(1 - i) as usize;
            let expect: BTreeSet<usize> = s.iter().copied().filter(|&n| n >= lo).collect();
            assert_eq!(back, expect, "i = {i}");
        }
    }

    #[test]
    fn dual_of_infinite_is_cofinite() {
        let hits: Vec<usize> = (1..=100).collect();
        let full = synthetic(&hits, 100, full_cert(1));
        assert_eq!(
            dual_check(&FamilyKind::Infinite, &full).unwrap().decision,
            Decision::YesCertified
        );
        let empty = synthetic(&[], 100, empty_cert());
        assert_eq!(
            dual_check(&FamilyKind::Cofinite, &empty).unwrap().decision,
            Decision::NoCertified
        );
        let evens: Vec<usize> = (1..=50).map(|k| 2 * k).collect();
        let report = synthetic(&evens, 100, TailCertificate::Unknown);
        let v = dual_check(&FamilyKind::Infinite, &report).unwrap();
        assert_eq!(v.decision, Decision::Inconclusive);
        assert_eq!(v.evidence, Evidence::FirstMiss(1));
        assert!(dual_check(&FamilyKind::Thick, &report).is_err());
    }

    #[test]
    fn heredity_on_grown_hit_sets() {
        // hits ⊆ hits' at equal horizon and certificate: a certified yes on the
        // smaller set never turns into a no on the larger
        let small: Vec<usize> = (5..=60).collect();
        let large: Vec<usize> = (2..=60).collect();
        let fams = [
            FamilyKind::Infinite,
            FamilyKind::Cofinite,
            FamilyKind::Syndetic,
            FamilyKind::Thick,
            FamilyKind::positive_upper_density(),
        ];
        let r_small = synthetic(&small, 60, full_cert(5));
        let r_large = synthetic(&large, 60, full_cert(2));
        for fam in &fams {
            if fam.member(&r_small).decision == Decision::YesCertified {
                let d = fam.member(&r_large).decision;
                assert!(
                    !matches!(d, Decision::NoCertified | Decision::NoAtHorizon),
                    "{} regressed",
                    fam.name()
                );
            }
        }
    }

    #[test]
    fn custom_family_uses_supplied_handlers() {
        let fam = FamilyKind::Custom(Arc::new(CustomFamily {
            name: "contains-42".into(),
            prefix_verdict: Box::new(|r| FamilyVerdict {
                decision: if r.hits.contains(&42) {
                    Decision::YesAtHorizon
                } else {
                    Decision::NoAtHorizon
                },
                evidence: Evidence::None,
            }),
            certificate_verdict: Box::new(|_, _| None),
        }));
        let report = synthetic(&[42], 100, TailCertificate::Unknown);
        assert_eq!(fam.member(&report).decision, Decision::YesAtHorizon);
    }
}
