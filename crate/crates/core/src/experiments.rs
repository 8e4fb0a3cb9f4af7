//! Monte-Carlo harness: repeated sampling of the largest component over
//! parameter sweeps.
//!
//! Trial `t` of sweep point `p` draws from ChaCha stream `t` keyed by
//! `point_seed(master_seed, p)`. Per-trial results are folded with integer
//! sums, minima and histograms only, so the aggregate is identical for every
//! thread count and schedule.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    heuristic_giant_lower_bound, theorem1_bound, theorem2_bound, theorem2_min_x,
};
use crate::components::connected_components;
use crate::error::{param, Error, Result};
use crate::graph::{self, construct_two_type, couple_extend, GraphParams, GraphView};
use crate::oracle::union_bound_sum;
use crate::rng::{point_seed, trial_rng};
use crate::union_find::UnionFind;

/// Trials handed to one worker at a time.
const BATCH: u64 = 64;

/// Which parameter varies across the sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "param", content = "values", rename_all = "lowercase")]
pub enum SweepAxis {
    Mu(Vec<f64>),
    K(Vec<usize>),
    D(Vec<usize>),
    N(Vec<usize>),
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Mu(_) => "mu",
            SweepAxis::K(_) => "K",
            SweepAxis::D(_) => "d",
            SweepAxis::N(_) => "n",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SweepAxis::Mu(v) => v.len(),
            SweepAxis::K(v) => v.len(),
            SweepAxis::D(v) => v.len(),
            SweepAxis::N(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Bound curves to attach to each sweep point in the JSON output.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Overlays {
    #[serde(default)]
    pub theorem1: bool,
    /// `ε` for the deleted-graph bound, when requested.
    #[serde(default)]
    pub theorem2_eps: Option<f64>,
    #[serde(default)]
    pub heuristic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub axis: SweepAxis,
    pub n: usize,
    pub mu: f64,
    pub k: usize,
    pub d: usize,
    pub trials: u64,
    pub seed: u64,
    /// CSV destination; the JSON mirror goes next to it with a `.json` extension.
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub overlays: Overlays,
    /// Worker pool size; `None` uses rayon's default.
    #[serde(default)]
    pub threads: Option<usize>,
}

/// One resolved sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub params: GraphParams,
    pub d: usize,
}

impl ExperimentConfig {
    /// Resolves and validates every sweep point.
    pub fn points(&self) -> Result<Vec<SweepPoint>> {
        if self.axis.is_empty() {
            return Err(param("sweep list is empty"));
        }
        if self.trials < 1 {
            return Err(param("trials must be at least 1"));
        }
        let mk = |n: usize, mu: f64, k: usize, d: usize, value: f64| -> Result<SweepPoint> {
            let params = GraphParams::two_type(n, mu, k)?;
            if d >= n {
                return Err(param(format!("d = {d} must be smaller than n = {n}")));
            }
            Ok(SweepPoint { value, params, d })
        };
        match &self.axis {
            SweepAxis::Mu(v) => v.iter().map(|&mu| mk(self.n, mu, self.k, self.d, mu)).collect(),
            SweepAxis::K(v) => v
                .iter()
                .map(|&k| mk(self.n, self.mu, k, self.d, k as f64))
                .collect(),
            SweepAxis::D(v) => v
                .iter()
                .map(|&d| mk(self.n, self.mu, self.k, d, d as f64))
                .collect(),
            SweepAxis::N(v) => v
                .iter()
                .map(|&n| mk(n, self.mu, self.k, self.d, n as f64))
                .collect(),
        }
    }
}

/// Counts of trials by largest-component size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmaxHistogram {
    counts: Vec<u64>,
}

impl CmaxHistogram {
    fn new(n_effective: usize) -> Self {
        CmaxHistogram {
            counts: vec![0; n_effective + 1],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self
    }

    pub fn n_effective(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn trials(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Number of trials with `cmax == size`.
    pub fn count(&self, size: usize) -> u64 {
        self.counts.get(size).copied().unwrap_or(0)
    }

    /// Number of trials with `cmax <= size`.
    pub fn count_at_most(&self, size: usize) -> u64 {
        self.counts[..=size.min(self.n_effective())].iter().sum()
    }

    pub fn min(&self) -> usize {
        self.counts.iter().position(|&c| c > 0).unwrap_or(0)
    }

    pub fn max(&self) -> usize {
        self.counts.iter().rposition(|&c| c > 0).unwrap_or(0)
    }

    pub fn sum(&self) -> u64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(s, &c)| s as u64 * c)
            .sum()
    }
}

/// Reusable buffers for one worker.
struct Workspace {
    types: Vec<u8>,
    offsets: Vec<usize>,
    selections: Vec<u32>,
    alive: Vec<bool>,
    uf: UnionFind,
}

impl Workspace {
    fn new() -> Self {
        Workspace {
            types: Vec::new(),
            offsets: Vec::new(),
            selections: Vec::new(),
            alive: Vec::new(),
            uf: UnionFind::new(0),
        }
    }

    /// Largest surviving component of one sampled graph. Draws from `rng` in
    /// the same order as `construct_r_type` followed by `delete_random_nodes`.
    fn trial<R: Rng + ?Sized>(&mut self, params: &GraphParams, d: usize, rng: &mut R) -> Result<usize> {
        let n = params.n();
        graph::sample_into(params, rng, &mut self.types, &mut self.offsets, &mut self.selections);
        self.alive.clear();
        self.alive.resize(n, true);
        if d > 0 {
            for v in graph::sample_deleted(n, d, rng)? {
                self.alive[v as usize] = false;
            }
        }
        self.uf.reset(n);
        for v in 0..n {
            if !self.alive[v] {
                continue;
            }
            for &j in &self.selections[self.offsets[v]..self.offsets[v + 1]] {
                if self.alive[j as usize] {
                    self.uf.union(v as u32, j);
                }
            }
        }
        Ok((0..n)
            .filter(|&v| self.alive[v] && self.uf.is_root(v as u32))
            .map(|v| self.uf.root_size(v as u32) as usize)
            .max()
            .unwrap_or(0))
    }
}

/// Largest-component size of trial `trial_index` at a point; the same value
/// `run_point` aggregates.
pub fn trial_cmax(params: &GraphParams, d: usize, seed: u64, trial_index: u64) -> Result<usize> {
    Workspace::new().trial(params, d, &mut trial_rng(seed, trial_index))
}

/// Histogram of the largest surviving component over `trials` independent
/// samples. Runs on the current rayon pool.
pub fn simulate_cmax_histogram(params: &GraphParams, d: usize, trials: u64, seed: u64) -> Result<CmaxHistogram> {
    if trials < 1 {
        return Err(param("trials must be at least 1"));
    }
    if d >= params.n() {
        return Err(param(format!("d = {d} must be smaller than n = {}", params.n())));
    }
    let n_eff = params.n() - d;
    let batches = trials.div_ceil(BATCH);
    (0..batches)
        .into_par_iter()
        .map_init(Workspace::new, |ws, b| {
            let mut hist = CmaxHistogram::new(n_eff);
            for t in b * BATCH..((b + 1) * BATCH).min(trials) {
                let cmax = ws.trial(params, d, &mut trial_rng(seed, t))?;
                hist.counts[cmax] += 1;
            }
            Ok(hist)
        })
        .try_reduce(|| CmaxHistogram::new(n_eff), |a, b| Ok(a.merge(b)))
}

/// Aggregate statistics for one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub value: f64,
    pub n: usize,
    pub mu: f64,
    pub k: usize,
    pub d: usize,
    pub n_effective: usize,
    pub trials: u64,
    pub avg_cmax: f64,
    pub min_cmax: usize,
    pub max_cmax: usize,
    /// `n_effective − min_cmax`.
    pub max_outside: usize,
    pub wall_time_secs: f64,
}

/// Runs `trials` independent samples of a two-class graph with `d` random
/// deletions and aggregates the largest-component sizes.
pub fn run_point(params: &GraphParams, d: usize, trials: u64, seed: u64) -> Result<TrialSummary> {
    run_point_with_value(params, d, trials, seed, f64::NAN)
}

fn run_point_with_value(params: &GraphParams, d: usize, trials: u64, seed: u64, value: f64) -> Result<TrialSummary> {
    let start = Instant::now();
    let hist = simulate_cmax_histogram(params, d, trials, seed)?;
    let n_eff = hist.n_effective();
    let min_cmax = hist.min();
    Ok(TrialSummary {
        value,
        n: params.n(),
        mu: params.mu(),
        k: params.k_max(),
        d,
        n_effective: n_eff,
        trials,
        avg_cmax: hist.sum() as f64 / trials as f64,
        min_cmax,
        max_cmax: hist.max(),
        max_outside: n_eff - min_cmax,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// Bound overlays for one sweep point. Predicted sizes are the largest
/// component size the bound guarantees with probability at least
/// `1 − 1/trials`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointOverlays {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heuristic_lower_bound: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem1_m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem1_predicted_min_cmax: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem2_x: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theorem2_predicted_min_cmax: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointReport {
    #[serde(flatten)]
    pub summary: TrialSummary,
    pub overlays: PointOverlays,
    /// Set when the observed minimum falls below the finite-n union bound's
    /// implied floor; a warning, not a failure.
    pub plausibility_flag: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub points: Vec<PointReport>,
}

impl SweepReport {
    pub fn summaries(&self) -> impl Iterator<Item = &TrialSummary> {
        self.points.iter().map(|p| &p.summary)
    }
}

/// Smallest `m ≥ 1` with `bound(m) ≤ target`, if any below `limit`.
fn first_below(limit: u64, target: f64, mut bound: impl FnMut(u64) -> Option<f64>) -> Option<u64> {
    // bounds here are nonincreasing in m: binary search
    let (mut lo, mut hi) = (1u64, limit);
    if bound(hi)? > target {
        return None;
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match bound(mid) {
            Some(v) if v <= target => hi = mid,
            _ => lo = mid + 1,
        }
    }
    Some(lo)
}

fn overlays_for(point: &SweepPoint, trials: u64, requested: &Overlays) -> PointOverlays {
    let (n, mu, k, d) = (point.params.n(), point.params.mu(), point.params.k_max(), point.d);
    let target = 1.0 / trials as f64;
    let mut out = PointOverlays {
        heuristic_lower_bound: None,
        theorem1_m: None,
        theorem1_predicted_min_cmax: None,
        theorem2_x: None,
        theorem2_predicted_min_cmax: None,
    };
    if requested.heuristic {
        out.heuristic_lower_bound = heuristic_giant_lower_bound(n, mu, k, d).ok();
    }
    if requested.theorem1 && d == 0 {
        out.theorem1_m = first_below(n as u64, target, |m| theorem1_bound(mu, k, m).ok().map(|b| b.value));
        out.theorem1_predicted_min_cmax = out.theorem1_m.map(|m| n.saturating_sub(m as usize));
    }
    if let Some(eps) = requested.theorem2_eps {
        if let Ok(min_x) = theorem2_min_x(mu, k, d as u64, eps) {
            let x = first_below(n as u64, target, |x| {
                theorem2_bound(mu, k, d as u64, x.max(min_x), eps).ok().map(|b| b.value)
            })
            .map(|x| x.max(min_x));
            out.theorem2_x = x;
            out.theorem2_predicted_min_cmax = x.map(|x| (n - d).saturating_sub(x as usize));
        }
    }
    out
}

/// Flags an observed minimum below `n − M*`, where `M*` is the smallest `M`
/// whose finite-n union bound is under `1/(10·trials)`. Only meaningful for
/// undeleted points with `M* ≤ n/3`.
pub fn plausibility_flag(summary: &TrialSummary) -> bool {
    if summary.d != 0 || summary.n < 6 {
        return false;
    }
    let (n, mu, k) = (summary.n, summary.mu, summary.k);
    let target = 0.1 / summary.trials as f64;
    let m_star = first_below((n / 2) as u64, target, |m| {
        union_bound_sum(n, mu, k, m as usize).ok().map(|b| b.raw_sum)
    });
    match m_star {
        Some(m) if m as usize <= n / 3 => summary.min_cmax < n - m as usize,
        _ => false,
    }
}

fn build_pool(threads: Option<usize>) -> Result<Option<rayon::ThreadPool>> {
    threads
        .map(|t| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| param(format!("cannot build worker pool: {e}")))
        })
        .transpose()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::Output {
            path: path.to_path_buf(),
            source,
        })
}

/// Path of the JSON mirror for a CSV output path.
pub fn json_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

/// Runs every sweep point and, when `config.out` is set, writes the CSV and
/// its JSON mirror. Output files are opened before any simulation starts.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepReport> {
    let points = config.points()?;
    let writers = match &config.out {
        Some(path) => Some((create(path)?, create(&json_path(path))?)),
        None => None,
    };
    let pool = build_pool(config.threads)?;
    let run = || -> Result<Vec<PointReport>> {
        points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let seed = point_seed(config.seed, i as u64);
                let summary = run_point_with_value(&p.params, p.d, config.trials, seed, p.value)?;
                let plausibility_flag = plausibility_flag(&summary);
                if plausibility_flag {
                    log::warn!(
                        "{} = {}: min_cmax {} is below the union-bound floor",
                        config.axis.name(),
                        p.value,
                        summary.min_cmax
                    );
                }
                Ok(PointReport {
                    overlays: overlays_for(p, config.trials, &config.overlays),
                    summary,
                    plausibility_flag,
                })
            })
            .collect()
    };
    let reports = match &pool {
        Some(pool) => pool.install(run)?,
        None => run()?,
    };
    let report = SweepReport {
        config: config.clone(),
        seed: config.seed,
        points: reports,
    };
    if let Some((csv_out, json_out)) = writers {
        write_csv(&report, csv_out)?;
        write_json(&report, json_out)?;
    }
    Ok(report)
}

pub const CSV_HEADER: [&str; 11] = [
    "sweep_param",
    "value",
    "n",
    "mu",
    "K",
    "d",
    "trials",
    "avg_cmax",
    "min_cmax",
    "max_outside",
    "seed",
];

pub fn write_csv<W: Write>(report: &SweepReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    let name = report.config.axis.name();
    for s in report.summaries() {
        w.write_record([
            name.to_string(),
            s.value.to_string(),
            s.n.to_string(),
            s.mu.to_string(),
            s.k.to_string(),
            s.d.to_string(),
            s.trials.to_string(),
            s.avg_cmax.to_string(),
            s.min_cmax.to_string(),
            s.max_outside.to_string(),
            report.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(report: &SweepReport, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, report)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

/// Outcome of the coupling experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingReport {
    pub trials: u64,
    pub edge_superset_violations: u64,
    pub cmax_violations: u64,
    pub avg_cmax_base: f64,
    pub avg_cmax_extended: f64,
}

/// Samples two-class graphs with parameters `(Σ_{i<r} μ_i, K_r)`, extends
/// each to the `r`-class target by coupling, and counts trials where the
/// extension lost an edge or shrank the largest component.
pub fn coupling_experiment(target: &GraphParams, trials: u64, seed: u64) -> Result<CouplingReport> {
    if trials < 1 {
        return Err(param("trials must be at least 1"));
    }
    let r = target.classes();
    let mu_tilde: f64 = target.type_probs()[..r - 1].iter().sum();
    let base = GraphParams::two_type(target.n(), mu_tilde, target.k_max())?;
    let (edges, cmax, sum_base, sum_ext) = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(u64, u64, u64, u64)> {
            let mut rng = trial_rng(seed, t);
            let g2 = construct_two_type(&base, &mut rng)?;
            let ext = couple_extend(&g2, target, &mut rng)?;
            let lost_edge = g2.edges().any(|(u, v)| !ext.has_edge(u as usize, v as usize));
            let c2 = connected_components(&g2)?.cmax as u64;
            let ce = connected_components(&ext)?.cmax as u64;
            Ok((lost_edge as u64, (ce < c2) as u64, c2, ce))
        })
        .try_reduce(
            || (0, 0, 0, 0),
            |a, b| Ok((a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3 + b.3)),
        )?;
    Ok(CouplingReport {
        trials,
        edge_superset_violations: edges,
        cmax_violations: cmax,
        avg_cmax_base: sum_base as f64 / trials as f64,
        avg_cmax_extended: sum_ext as f64 / trials as f64,
    })
}
