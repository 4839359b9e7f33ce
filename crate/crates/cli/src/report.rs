//! Machine-readable reports: JSON (full payloads, structured certificates)
//! and CSV (flat rows; hit reports follow the `n,hit,prefix_density` column
//! contract). Output is byte-for-byte deterministic for identical input.

use pldyn::classify::{ClassVerdict, ClassificationReport, PairSummary};
use pldyn::family::{Evidence, FamilyVerdict};
use pldyn::ndsys::{HitSetReport, TailCertificate, Witness};
use pldyn::plmap::PLMap;
use serde::Serialize;
use std::fmt::Write as _;

#[derive(Debug, Clone, Serialize)]
pub struct CertificateOut {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessOut>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum WitnessOut {
    NestedWindow { images: Vec<String> },
    AbsorbingSet { phases: Vec<String> },
    Combined,
}

pub fn certificate_out(cert: &TailCertificate, with_witness: bool) -> CertificateOut {
    let witness = match (with_witness, cert) {
        (false, _) | (_, TailCertificate::Unknown) => None,
        (
            true,
            TailCertificate::EventuallyEmpty { witness, .. }
            | TailCertificate::EventuallyFull { witness, .. },
        ) => Some(match witness {
            Witness::NestedWindow { images } => WitnessOut::NestedWindow {
                images: images.iter().map(|s| s.to_string()).collect(),
            },
            Witness::AbsorbingSet { phases } => WitnessOut::AbsorbingSet {
                phases: phases.iter().map(|s| s.to_string()).collect(),
            },
            Witness::Combined => WitnessOut::Combined,
        }),
    };
    CertificateOut {
        kind: cert.kind_str().into(),
        base: cert.base(),
        period: cert.period(),
        witness,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EvidenceOut {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
}

pub fn evidence_out(e: &Evidence) -> EvidenceOut {
    let (kind, value) = match e {
        Evidence::HitCount(n) => ("hit_count", Some(n.to_string())),
        Evidence::MaxGap(n) => ("max_gap", Some(n.to_string())),
        Evidence::LongestRun(n) => ("longest_run", Some(n.to_string())),
        Evidence::FirstMiss(n) => ("first_miss", Some(n.to_string())),
        Evidence::FullPrefix => ("full_prefix", None),
        Evidence::ExactDensity(r) => ("exact_density", Some(r.to_string())),
        Evidence::DensityWindow { final_density, min_last_half, max_last_half } => (
            "density_window",
            Some(format!(
                "final={final_density} min_last_half={min_last_half} max_last_half={max_last_half}"
            )),
        ),
        Evidence::None => ("none", None),
    };
    EvidenceOut { kind: kind.into(), value }
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyVerdictOut {
    pub family: String,
    pub decision: String,
    pub evidence: EvidenceOut,
}

pub fn family_verdict_out(family: &str, v: &FamilyVerdict) -> FamilyVerdictOut {
    FamilyVerdictOut {
        family: family.into(),
        decision: v.decision.to_string(),
        evidence: evidence_out(&v.evidence),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairOut {
    pub pair: String,
    pub decision: String,
    pub evidence: EvidenceOut,
    pub certificate: CertificateOut,
    pub hit_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_hit: Option<usize>,
}

fn pair_out(p: &PairSummary) -> PairOut {
    PairOut {
        pair: p.id.to_string(),
        decision: p.verdict.decision.to_string(),
        evidence: evidence_out(&p.verdict.evidence),
        certificate: certificate_out(&p.certificate, false),
        hit_count: p.hit_count,
        first_hit: p.first_hit,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessPairOut {
    pub pair: String,
    pub description: String,
    pub certificate: CertificateOut,
}

#[derive(Debug, Clone, Serialize)]
pub struct PieceOut {
    pub from: String,
    pub to: String,
    pub slope: String,
    pub intercept: String,
}

pub fn pieces_out(map: &PLMap) -> Vec<PieceOut> {
    map.pieces()
        .into_iter()
        .map(|(lo, hi, slope, intercept)| PieceOut {
            from: lo.to_string(),
            to: hi.to_string(),
            slope: slope.to_string(),
            intercept: intercept.to_string(),
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct FixtureOut {
    pub id: String,
    pub status: String,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrataOut {
    pub id: String,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "query", rename_all = "snake_case")]
pub enum Report {
    Hitset {
        seq: String,
        u: String,
        v: String,
        horizon: usize,
        hit_count: usize,
        hits: Vec<usize>,
        certificate: CertificateOut,
        density_estimate: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        density_exact: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        family: Option<FamilyVerdictOut>,
    },
    Classify {
        kind: String,
        seq: String,
        family: String,
        depth: u32,
        horizon: usize,
        verdict: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        witness: Option<WitnessPairOut>,
        #[serde(skip_serializing_if = "Option::is_none")]
        min_density: Option<String>,
        pairs: Vec<PairOut>,
    },
    Compose {
        outer: String,
        inner: String,
        map: String,
        nodes: Vec<[String; 2]>,
        pieces: Vec<PieceOut>,
    },
    Invariant {
        map: String,
        interval: String,
        invariant: bool,
    },
    VerifyPaper {
        passed: usize,
        failed: usize,
        fixtures: Vec<FixtureOut>,
        errata: Vec<ErrataOut>,
    },
}

pub fn hitset_report(
    seq_name: &str,
    u_name: &str,
    v_name: &str,
    report: &HitSetReport,
    family: Option<FamilyVerdictOut>,
) -> Report {
    let density = pldyn::family::upper_density(report);
    Report::Hitset {
        seq: seq_name.into(),
        u: u_name.into(),
        v: v_name.into(),
        horizon: report.horizon,
        hit_count: report.hits.len(),
        hits: report.hits.iter().copied().collect(),
        certificate: certificate_out(&report.certificate, true),
        density_estimate: density.estimate.to_string(),
        density_exact: density.exact.map(|r| r.to_string()),
        family,
    }
}

pub fn classify_report(kind: &str, seq_name: &str, family: &str, cr: &ClassificationReport) -> Report {
    let witness = match &cr.verdict {
        ClassVerdict::ProvenNo { pair_id, pair, certificate } => Some(WitnessPairOut {
            pair: pair_id.to_string(),
            description: pair.to_string(),
            certificate: certificate_out(certificate, false),
        }),
        _ => None,
    };
    Report::Classify {
        kind: kind.into(),
        seq: seq_name.into(),
        family: family.into(),
        depth: cr.depth,
        horizon: cr.horizon,
        verdict: cr.verdict.label().into(),
        witness,
        min_density: cr.min_density.as_ref().map(|r| r.to_string()),
        pairs: cr.pair_summaries.iter().map(pair_out).collect(),
    }
}

pub fn to_json(reports: &[Report]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

/// Flat CSV per report, blocks separated by blank lines. Hit reports follow
/// the `n,hit,prefix_density` contract with one row per index.
pub fn to_csv(reports: &[Report]) -> String {
    let mut out = String::new();
    for (i, report) in reports.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match report {
            Report::Hitset { horizon, hits, .. } => {
                out.push_str("n,hit,prefix_density\n");
                let hitset: std::collections::BTreeSet<usize> = hits.iter().copied().collect();
                let mut count = 0usize;
                for n in 1..=*horizon {
                    if hitset.contains(&n) {
                        count += 1;
                    }
                    let density = pldyn::interval::Rat::new(count.into(), n.into());
                    let _ = writeln!(
                        out,
                        "{n},{},{density}",
                        if hitset.contains(&n) { 1 } else { 0 }
                    );
                }
            }
            Report::Classify { pairs, verdict, .. } => {
                out.push_str("pair,decision,evidence,certificate,hit_count,first_hit\n");
                for p in pairs {
                    let _ = writeln!(
                        out,
                        "{},{},{}{},{},{},{}",
                        p.pair,
                        p.decision,
                        p.evidence.kind,
                        p.evidence
                            .value
                            .as_ref()
                            .map(|v| format!("={v}"))
                            .unwrap_or_default(),
                        p.certificate.kind,
                        p.hit_count,
                        p.first_hit.map(|n| n.to_string()).unwrap_or_default()
                    );
                }
                let _ = writeln!(out, "# verdict,{verdict}");
            }
            Report::Compose { nodes, .. } => {
                out.push_str("x,y\n");
                for [x, y] in nodes {
                    let _ = writeln!(out, "{x},{y}");
                }
            }
            Report::Invariant { map, interval, invariant } => {
                out.push_str("map,interval,invariant\n");
                let _ = writeln!(out, "{map},\"{interval}\",{invariant}");
            }
            Report::VerifyPaper { fixtures, .. } => {
                out.push_str("fixture,status,detail\n");
                for f in fixtures {
                    let _ = writeln!(out, "{},{},\"{}\"", f.id, f.status, f.detail.replace('"', "'"));
                }
            }
        }
    }
    out
}
