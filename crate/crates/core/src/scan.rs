//! Batch driver: runs a set of checks over a sweep of instances and streams
//! the reports in sweep order.
//!
//! Instances are evaluated in parallel chunks; reports are handed to the sink
//! in instance order and, within an instance, in the order of the check list,
//! so the stream does not depend on the worker count. Checks whose hypothesis
//! does not apply to an instance are counted but not emitted.

use rayon::prelude::*;
use serde::Serialize;

use crate::bottleneck::{self, MAX_EXACT_N};
use crate::bounds::{self, Instance};
use crate::enumerate::{graph_from_mask, mask_range};
use crate::error::{Error, Result};
use crate::family::{build_family, connected_erdos_renyi, erdos_renyi, GraphFamilySpec};
use crate::graph::Graph;
use crate::report::{BoundReport, Param, TheoremId};
use crate::rng::split_seed;

/// Instances evaluated per parallel batch.
const CHUNK: usize = 4096;

/// Rejection-sampling budget for random instances.
pub const MAX_SAMPLE_TRIES: u64 = 100_000;

/// Checks that run on a single graph.
pub const GRAPH_CHECKS: [TheoremId; 7] = [
    TheoremId::Main1,
    TheoremId::Diam2,
    TheoremId::Diam3,
    TheoremId::LargeDegree,
    TheoremId::DegreeWindow,
    TheoremId::KemenySandwich,
    TheoremId::Cheeger,
];

#[derive(Clone, Debug, PartialEq)]
pub enum Sweep {
    /// Every labelled graph on each `n`.
    Enumerate { ns: Vec<usize> },
    /// Fixed family instances.
    Families(Vec<GraphFamilySpec>),
    /// `count` connected `G(n, p)` draws, `n` cycling through `n_min..=n_max`.
    Random { n_min: usize, n_max: usize, p: f64, count: usize },
    /// Like `Random`, but draws are also filtered into the degree window.
    DegreeWindow { n_min: usize, n_max: usize, p: f64, count: usize },
    /// `count` joins of two independent `G(n_i, p)` with `n1 + n2 <= max_n`.
    RandomJoins { max_n: usize, p: f64, count: usize },
    /// The `G_{r,m}` counterexample at each `n`.
    Counterexample { ns: Vec<usize> },
    /// The `G_{r,m}` checks at each `(r, m)`.
    Grm { pairs: Vec<(usize, usize)> },
}

impl Sweep {
    fn len(&self) -> Result<usize> {
        Ok(match self {
            Sweep::Enumerate { ns } => {
                let mut total = 0usize;
                for &n in ns {
                    total += mask_range(n)?.end as usize;
                }
                total
            }
            Sweep::Families(specs) => specs.len(),
            Sweep::Random { count, .. } | Sweep::DegreeWindow { count, .. } => *count,
            Sweep::RandomJoins { count, .. } => *count,
            Sweep::Counterexample { ns } => ns.len(),
            Sweep::Grm { pairs } => pairs.len(),
        })
    }

    fn runs_graph_checks(&self) -> bool {
        matches!(
            self,
            Sweep::Enumerate { .. } | Sweep::Families(_) | Sweep::Random { .. } | Sweep::DegreeWindow { .. }
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanConfig {
    pub sweep: Sweep,
    /// Checks for graph sweeps; ignored by the join, counterexample and
    /// `G_{r,m}` sweeps, which have a fixed check.
    pub checks: Vec<TheoremId>,
    pub seed: u64,
    pub l: f64,
    pub u: f64,
    /// `k_cap` for the large-degree check.
    pub k_cap: usize,
}

impl ScanConfig {
    pub fn new(sweep: Sweep, checks: Vec<TheoremId>) -> Self {
        ScanConfig {
            sweep,
            checks,
            seed: 0x5EED,
            l: 0.25,
            u: 0.75,
            k_cap: 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweep.runs_graph_checks() {
            if let Some(bad) = self.checks.iter().find(|c| !GRAPH_CHECKS.contains(c)) {
                return Err(Error::InvalidParameters(format!(
                    "check `{bad}` does not run on single graphs"
                )));
            }
            if self.checks.is_empty() {
                return Err(Error::InvalidParameters("no checks selected".into()));
            }
        }
        if self.checks.contains(&TheoremId::DegreeWindow) || matches!(self.sweep, Sweep::DegreeWindow { .. }) {
            bounds::verify_degree_window(&Graph::complete(2), self.l, self.u)?;
        }
        match &self.sweep {
            Sweep::Families(specs) => specs.iter().try_for_each(GraphFamilySpec::validate),
            Sweep::Random { n_min, n_max, p, .. } | Sweep::DegreeWindow { n_min, n_max, p, .. } => {
                if n_min > n_max || *n_min < 2 {
                    return Err(Error::InvalidParameters(format!("bad n range {n_min}..={n_max}")));
                }
                GraphFamilySpec::ErdosRenyi { n: *n_max, p: *p, seed: 0 }.validate()
            }
            Sweep::RandomJoins { max_n, p, .. } => {
                if *max_n < 2 {
                    return Err(Error::InvalidParameters("joins need max_n >= 2".into()));
                }
                GraphFamilySpec::ErdosRenyi { n: *max_n, p: *p, seed: 0 }.validate()
            }
            Sweep::Counterexample { ns } => ns.iter().try_for_each(|&n| bounds::counterexample_parameters(n).map(|_| ())),
            Sweep::Grm { pairs } => pairs.iter().try_for_each(|&(r, m)| {
                if r == 0 || m < 2 * r {
                    Err(Error::InvalidParameters(format!("need m >= 2r >= 2, got r={r}, m={m}")))
                } else {
                    Ok(())
                }
            }),
            Sweep::Enumerate { .. } => self.sweep.len().map(|_| ()),
        }
    }
}

/// Counts over one scan.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ScanSummary {
    pub instances: u64,
    pub reports: u64,
    pub holding: u64,
    pub failing: u64,
    pub not_applicable: u64,
}

impl ScanSummary {
    fn absorb(&mut self, other: &ScanSummary) {
        self.instances += other.instances;
        self.reports += other.reports;
        self.holding += other.holding;
        self.failing += other.failing;
        self.not_applicable += other.not_applicable;
    }

    pub fn all_hold(&self) -> bool {
        self.failing == 0
    }
}

struct Outcome {
    reports: Vec<BoundReport>,
    not_applicable: u64,
}

fn graph_instance(config: &ScanConfig, index: usize) -> Result<(Graph, Vec<(&'static str, Param)>)> {
    let seed = split_seed(config.seed, index as u64);
    match &config.sweep {
        Sweep::Enumerate { ns } => {
            let mut i = index as u64;
            for &n in ns {
                let count = mask_range(n)?.end;
                if i < count {
                    return Ok((graph_from_mask(n, i), vec![("mask", Param::from(i))]));
                }
                i -= count;
            }
            unreachable!("index within sweep length")
        }
        Sweep::Families(specs) => {
            let spec = &specs[index];
            Ok((build_family(spec)?, vec![("family", Param::from(spec.to_string().as_str()))]))
        }
        Sweep::Random { n_min, n_max, p, .. } => {
            let n = n_min + index % (n_max - n_min + 1);
            let (g, s) = connected_erdos_renyi(n, *p, seed, MAX_SAMPLE_TRIES)?;
            Ok((g, vec![("seed", Param::from(s)), ("p", Param::from(*p))]))
        }
        Sweep::DegreeWindow { n_min, n_max, p, .. } => {
            let n = n_min + index % (n_max - n_min + 1);
            let (g, s) = bounds::sample_degree_window(n, *p, config.l, config.u, seed, MAX_SAMPLE_TRIES)?;
            Ok((g, vec![("seed", Param::from(s)), ("p", Param::from(*p))]))
        }
        _ => unreachable!("graph sweeps only"),
    }
}

fn run_graph_checks(config: &ScanConfig, g: &Graph) -> Result<Outcome> {
    let inst = Instance::new(g);
    let mut out = Outcome { reports: Vec::new(), not_applicable: 0 };
    if g.n() < 2 {
        out.not_applicable = config.checks.len() as u64;
        return Ok(out);
    }
    for &check in &config.checks {
        let report = match check {
            TheoremId::Main1 => Some(bounds::main1_on(&inst)?),
            TheoremId::Diam2 => Some(bounds::diam2_on(&inst)?).filter(|r| r.hypothesis_ok),
            TheoremId::Diam3 => Some(bounds::diam3_on(&inst)?).filter(|r| r.hypothesis_ok),
            TheoremId::LargeDegree => Some(bounds::large_degree_on(&inst, config.k_cap)?).filter(|r| r.hypothesis_ok),
            TheoremId::DegreeWindow => {
                Some(bounds::degree_window_on(&inst, config.l, config.u)?).filter(|r| r.hypothesis_ok)
            }
            TheoremId::KemenySandwich => {
                if g.is_connected() {
                    Some(bounds::verify_kemeny_sandwich(g)?)
                } else {
                    None
                }
            }
            TheoremId::Cheeger => {
                if g.isolated_vertex().is_none() && g.n() <= MAX_EXACT_N {
                    Some(bottleneck::cheeger_check(g)?)
                } else {
                    None
                }
            }
            other => unreachable!("{other} rejected by validate"),
        };
        match report {
            Some(r) => out.reports.push(r),
            None => out.not_applicable += 1,
        }
    }
    Ok(out)
}

fn run_instance(config: &ScanConfig, index: usize) -> Result<Outcome> {
    let single = |r: BoundReport| Outcome { reports: vec![r], not_applicable: 0 };
    match &config.sweep {
        Sweep::Counterexample { ns } => Ok(single(bounds::verify_counterexample_family(ns[index])?)),
        Sweep::Grm { pairs } => {
            let (r, m) = pairs[index];
            Ok(single(bounds::verify_grm(r, m)?))
        }
        Sweep::RandomJoins { max_n, p, .. } => {
            let seed = split_seed(config.seed, index as u64);
            let total = 2 + (seed % (*max_n as u64 - 1)) as usize;
            let n1 = 1 + (split_seed(seed, 0) % (total as u64 - 1)) as usize;
            let (s1, s2) = (split_seed(seed, 1), split_seed(seed, 2));
            let g1 = erdos_renyi(n1, *p, s1);
            let g2 = erdos_renyi(total - n1, *p, s2);
            Ok(single(bounds::verify_join(&g1, &g2)?.with("seed", seed).with("p", *p)))
        }
        _ => {
            let (g, labels) = graph_instance(config, index)?;
            let mut out = run_graph_checks(config, &g)?;
            for r in &mut out.reports {
                for (k, v) in &labels {
                    r.context.insert(k.to_string(), v.clone());
                }
            }
            Ok(out)
        }
    }
}

/// Runs the scan, handing each applicable report to `sink` in sweep order.
pub fn scan(config: &ScanConfig, mut sink: impl FnMut(&BoundReport)) -> Result<ScanSummary> {
    config.validate()?;
    let total = config.sweep.len()?;
    let mut summary = ScanSummary::default();
    for start in (0..total).step_by(CHUNK) {
        let end = (start + CHUNK).min(total);
        let outcomes: Vec<Result<Outcome>> = (start..end)
            .into_par_iter()
            .map(|i| run_instance(config, i))
            .collect();
        for outcome in outcomes {
            let outcome = outcome?;
            let mut part = ScanSummary {
                instances: 1,
                not_applicable: outcome.not_applicable,
                ..ScanSummary::default()
            };
            for r in &outcome.reports {
                part.reports += 1;
                if r.holds {
                    part.holding += 1;
                } else {
                    part.failing += 1;
                }
                sink(r);
            }
            summary.absorb(&part);
        }
    }
    Ok(summary)
}

/// [`scan`] into a vector.
pub fn scan_collect(config: &ScanConfig) -> Result<(Vec<BoundReport>, ScanSummary)> {
    let mut reports = Vec::new();
    let summary = scan(config, |r| reports.push(r.clone()))?;
    Ok((reports, summary))
}
