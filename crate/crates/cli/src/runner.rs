//! Lowers a validated program to core objects and executes its queries in
//! order. Execution is deterministic: identical input and options produce
//! identical reports.

use crate::ast::*;
use crate::report::{
    classify_report, family_verdict_out, hitset_report, pieces_out, ErrataOut, FixtureOut, Report,
};
use pldyn::classify::{
    classify_ergodic_with, classify_mixing_with, classify_transitive_with, ClassifyOptions,
    OpenSetGrid,
};
use pldyn::family::FamilyKind;
use pldyn::interval::{Interval, IntervalSet, Rat};
use pldyn::ndsys::{MapSequence, TailRule, DEFAULT_CERT_SEARCH};
use pldyn::plmap::PLMap;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("query {query}: {message}")]
    Query { query: String, message: String },
}

/// Environment variable overriding the composition node-count cap.
pub const NODE_CAP_ENV: &str = "PLDYN_COMPOSE_NODE_CAP";

/// Defaults for options omitted on a query; the CLI flags feed these.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub horizon: usize,
    pub depth: u32,
    pub family: String,
    pub density_threshold: Rat,
    /// Composition node-count guard, overridable via [`NODE_CAP_ENV`].
    pub node_cap: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            horizon: 1000,
            depth: 3,
            family: "infinite".into(),
            density_threshold: pldyn::family::default_density_threshold(),
            node_cap: node_cap_from_env(),
        }
    }
}

pub fn node_cap_from_env() -> usize {
    std::env::var(NODE_CAP_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(pldyn::ndsys::DEFAULT_NODE_CAP)
}

pub struct Lowered {
    pub maps: BTreeMap<String, PLMap>,
    pub seqs: BTreeMap<String, MapSequence>,
    pub sets: BTreeMap<String, IntervalSet>,
}

/// Converts a validated AST to core objects.
pub fn lower(spec: &SystemSpec) -> Lowered {
    let maps: BTreeMap<String, PLMap> = spec
        .maps
        .iter()
        .map(|def| {
            let nodes = def
                .nodes
                .iter()
                .map(|(x, y)| (x.node.clone(), y.node.clone()))
                .collect();
            (def.name.node.clone(), PLMap::new(nodes).expect("validated map"))
        })
        .collect();
    let get = |n: &Sp<String>| maps[&n.node].clone();
    let seqs = spec
        .seqs
        .iter()
        .map(|def| {
            let seq = match &def.rule {
                SeqRuleAst::Cycle(names) => {
                    MapSequence::cycle(names.iter().map(get).collect()).expect("non-empty")
                }
                SeqRuleAst::Constant(n) => MapSequence::constant(get(n)),
                SeqRuleAst::Prefix { prefix, tail } => {
                    let prefix = prefix.iter().map(get).collect();
                    let tail = match tail {
                        TailAst::Cycle(names) => {
                            TailRule::Cycle(names.iter().map(get).collect())
                        }
                        TailAst::Constant(n) => TailRule::Constant(get(n)),
                    };
                    MapSequence::explicit(prefix, tail).expect("non-empty tail")
                }
            };
            (def.name.node.clone(), seq)
        })
        .collect();
    let sets = spec
        .sets
        .iter()
        .map(|def| {
            let parts = def
                .parts
                .iter()
                .map(|iv| {
                    Interval::new(
                        iv.lo.node.clone(),
                        iv.hi.node.clone(),
                        iv.lo_closed,
                        iv.hi_closed,
                    )
                    .expect("validated interval")
                })
                .collect();
            (def.name.node.clone(), IntervalSet::from_parts(parts))
        })
        .collect();
    Lowered { maps, seqs, sets }
}

fn family_kind(name: &str, threshold: &Rat) -> FamilyKind {
    match name {
        "infinite" => FamilyKind::Infinite,
        "cofinite" => FamilyKind::Cofinite,
        "syndetic" => FamilyKind::Syndetic,
        "thick" => FamilyKind::Thick,
        "density" => FamilyKind::PositiveUpperDensity { threshold: threshold.clone() },
        other => panic!("validated family name, got {other}"),
    }
}

struct Opts<'a> {
    horizon: usize,
    depth: u32,
    bound: Option<usize>,
    family: Option<&'a str>,
    threshold: Rat,
}

fn effective_opts<'a>(opts: &'a [OptAst], config: &RunConfig) -> Opts<'a> {
    let mut out = Opts {
        horizon: config.horizon,
        depth: config.depth,
        bound: None,
        family: None,
        threshold: config.density_threshold.clone(),
    };
    for opt in opts {
        match (opt.name.node.as_str(), &opt.value) {
            ("horizon", OptValue::Number(r)) => {
                out.horizon = r.node.to_integer().try_into().unwrap_or(usize::MAX)
            }
            ("depth", OptValue::Number(r)) => {
                out.depth = r.node.to_integer().try_into().unwrap_or(u32::MAX)
            }
            ("bound", OptValue::Number(r)) => {
                out.bound = Some(r.node.to_integer().try_into().unwrap_or(usize::MAX))
            }
            ("family", OptValue::Word(w)) => out.family = Some(&w.node),
            ("density_threshold", OptValue::Number(r)) => out.threshold = r.node.clone(),
            _ => {}
        }
    }
    out
}

pub fn run_query(lowered: &Lowered, q: &QueryAst, config: &RunConfig) -> Result<Report, RunError> {
    match q {
        QueryAst::HitSet { seq, u, v, opts } => {
            let o = effective_opts(opts, config);
            let sequence = &lowered.seqs[&seq.node];
            let uset = &lowered.sets[&u.node];
            let vset = &lowered.sets[&v.node];
            let bound = o.bound.unwrap_or_else(|| DEFAULT_CERT_SEARCH.min(o.horizon));
            let report = sequence.hit_set_with(uset, vset, o.horizon, bound);
            let family = o.family.map(|name| {
                let kind = family_kind(name, &o.threshold);
                family_verdict_out(name, &kind.member(&report))
            });
            Ok(hitset_report(&seq.node, &u.node, &v.node, &report, family))
        }
        QueryAst::Classify { kind, seq, opts } => {
            let o = effective_opts(opts, config);
            let sequence = &lowered.seqs[&seq.node];
            let grid = OpenSetGrid::new(o.depth).map_err(|e| RunError::Query {
                query: format!("classify {}", seq.node),
                message: e.to_string(),
            })?;
            let copts = ClassifyOptions::default();
            let family_name = o.family.unwrap_or(&config.family);
            let fam = family_kind(family_name, &o.threshold);
            let (kind_word, cr) = match kind {
                ClassifyKindAst::Transitive => (
                    "transitive",
                    classify_transitive_with(sequence, &fam, &grid, o.horizon, &copts),
                ),
                ClassifyKindAst::Mixing => (
                    "mixing",
                    classify_mixing_with(sequence, &fam, &grid, o.horizon, &copts),
                ),
                ClassifyKindAst::Ergodic => (
                    "ergodic",
                    classify_ergodic_with(sequence, &grid, o.horizon, &o.threshold, &copts),
                ),
            };
            let family_label = match kind {
                ClassifyKindAst::Ergodic => "positive-upper-density".to_string(),
                _ => family_name.to_string(),
            };
            Ok(classify_report(kind_word, &seq.node, &family_label, &cr))
        }
        QueryAst::Compose { outer, inner } => {
            let o = &lowered.maps[&outer.node];
            let i = &lowered.maps[&inner.node];
            let c = o.compose(i);
            if c.node_count() > config.node_cap {
                return Err(RunError::Query {
                    query: format!("compose {} {}", outer.node, inner.node),
                    message: format!(
                        "composition node count {} exceeds cap {} (override with {NODE_CAP_ENV})",
                        c.node_count(),
                        config.node_cap
                    ),
                });
            }
            Ok(Report::Compose {
                outer: outer.node.clone(),
                inner: inner.node.clone(),
                map: c.to_string(),
                nodes: c
                    .nodes()
                    .iter()
                    .map(|(x, y)| [x.to_string(), y.to_string()])
                    .collect(),
                pieces: pieces_out(&c),
            })
        }
        QueryAst::Invariant { map, interval } => {
            let m = &lowered.maps[&map.node];
            let iv = Interval::new(
                interval.lo.node.clone(),
                interval.hi.node.clone(),
                interval.lo_closed,
                interval.hi_closed,
            )
            .expect("validated interval");
            Ok(Report::Invariant {
                map: map.node.clone(),
                interval: iv.to_string(),
                invariant: m.is_invariant(&iv),
            })
        }
        QueryAst::VerifyPaper => Ok(suite_report()),
    }
}

/// Runs the bundled fixture audit and shapes it as a report.
pub fn suite_report() -> Report {
    let suite = crate::fixtures::run_suite();
    Report::VerifyPaper {
        passed: suite.passed(),
        failed: suite.failed(),
        fixtures: suite
            .fixtures
            .iter()
            .map(|f| FixtureOut {
                id: f.id.into(),
                status: if f.passed { "pass".into() } else { "fail".into() },
                detail: f.detail.clone(),
            })
            .collect(),
        errata: suite
            .errata()
            .into_iter()
            .map(|(id, note)| ErrataOut { id: id.into(), note })
            .collect(),
    }
}

/// Executes every query of a validated program, in order.
pub fn run(spec: &SystemSpec, config: &RunConfig) -> Result<Vec<Report>, RunError> {
    let lowered = lower(spec);
    spec.queries
        .iter()
        .map(|q| run_query(&lowered, q, config))
        .collect()
}
