//! Self-check suites behind `koutlab validate`.
//!
//! `quick` runs the exhaustive small-n suites and a light Monte-Carlo
//! soundness check; `full` adds the larger statistical gates.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{heuristic_giant_lower_bound, mean_degree};
use crate::components::{connected_components, connected_components_bfs, lemma1_check, sizes_reach_range};
use crate::error::Result;
use crate::experiments::{coupling_experiment, run_point, simulate_cmax_histogram};
use crate::graph::{construct_r_type, construct_two_type, GraphParams, GraphView};
use crate::oracle::{exact_cut_probability_deleted, exhaustive_event_polynomial, union_bound_sum};
use crate::rng::{point_seed, trial_rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl SuiteOutcome {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        SuiteOutcome {
            name,
            passed,
            detail: detail.into(),
        }
    }
}

/// Signature of a cut-probability formula `(n, μ, K, d, r) -> P`.
pub type CutFormula = fn(usize, f64, usize, usize, usize) -> Result<f64>;

pub fn run(level: Level, seed: u64) -> Result<Vec<SuiteOutcome>> {
    let mut out = vec![
        oracle_suite(exact_cut_probability_deleted)?,
        subset_sum_suite(seed, 300)?,
        cut_implication_suite(seed, 2_000)?,
        coupling_suite(seed, 500)?,
        soundness_suite(seed, 100_000)?,
    ];
    if level == Level::Full {
        out.push(giant_size_gate(seed, 100_000)?);
        out.push(heuristic_gate(seed, 10_000)?);
        out.push(mean_degree_gate(seed, 200)?);
    }
    Ok(out)
}

/// Compares `formula` against brute-force enumeration for `n ∈ {4,5,6}`,
/// `K ∈ {2,3}`, `d ∈ {0,1}`, every admissible `r`, `μ ∈ {0.25,0.5,0.75}`.
pub fn oracle_suite(formula: CutFormula) -> Result<SuiteOutcome> {
    let mut worst = 0.0f64;
    let mut checked = 0;
    for n in 4..=6 {
        for k in 2..=3 {
            if k >= n {
                continue;
            }
            for d in 0..=1 {
                for r in 1..n - d {
                    let poly = exhaustive_event_polynomial(n, k, d, |g| {
                        let s = g.first_survivors(r);
                        let dead = g.deleted_mask();
                        (0..n).filter(|&v| !g.is_deleted(v)).all(|v| {
                            let sel = g.selection_mask(v);
                            if s >> v & 1 == 1 {
                                sel & !(s | dead) == 0
                            } else {
                                sel & s == 0
                            }
                        })
                    })?;
                    for mu in [0.25, 0.5, 0.75] {
                        let err = (formula(n, mu, k, d, r)? - poly.eval(mu)).abs();
                        worst = worst.max(err);
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(SuiteOutcome::new(
        "oracle-exactness",
        worst <= 1e-12,
        format!("{checked} cases, max abs error {worst:.3e} (tolerance 1e-12)"),
    ))
}

/// Subset-sum cut detection against enumeration of all vertex subsets.
pub fn subset_sum_suite(seed: u64, graphs: u64) -> Result<SuiteOutcome> {
    let ps = point_seed(seed, 101);
    let mut mismatches = 0;
    for t in 0..graphs {
        let mut rng = trial_rng(ps, t);
        let n = rng.random_range(4..=8);
        let mu = rng.random_range(0.05..0.95);
        let params = GraphParams::two_type(n, mu, 2)?;
        let g = construct_two_type(&params, &mut rng)?;
        let report = connected_components(&g)?;
        let mut cut_sizes = vec![false; n + 1];
        for mask in 1u32..(1 << n) - 1 {
            let inside = |v: u32| mask >> v & 1 == 1;
            let isolated = g
                .edges()
                .all(|(u, v)| inside(u) == inside(v));
            if isolated {
                cut_sizes[mask.count_ones() as usize] = true;
            }
        }
        for lo in 1..=n {
            for hi in lo..=n {
                let brute = cut_sizes[lo..=hi].iter().any(|&b| b);
                if brute != sizes_reach_range(&report.component_sizes, lo, hi) {
                    mismatches += 1;
                }
            }
        }
    }
    Ok(SuiteOutcome::new(
        "subset-sum-vs-enumeration",
        mismatches == 0,
        format!("{graphs} graphs with n <= 8, {mismatches} mismatches"),
    ))
}

/// No cut in `[x, n − x]` implies fewer than `x` nodes outside the giant.
pub fn cut_implication_suite(seed: u64, graphs: u64) -> Result<SuiteOutcome> {
    let params = GraphParams::two_type(30, 0.5, 2)?;
    let ps = point_seed(seed, 102);
    let (violations, disagreements) = (0..graphs)
        .into_par_iter()
        .map(|t| -> Result<(u64, u64)> {
            let g = construct_two_type(&params, &mut trial_rng(ps, t))?;
            let uf = connected_components(&g)?;
            let bfs = connected_components_bfs(&g)?;
            let mut bad = 0;
            for x in 1..=10 {
                let rec = lemma1_check(&g, x)?;
                if rec.no_mid_cut && uf.outside_count >= x {
                    bad += 1;
                }
            }
            Ok((bad, (uf != bfs) as u64))
        })
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    Ok(SuiteOutcome::new(
        "lemma1-and-dual-components",
        violations == 0 && disagreements == 0,
        format!(
            "{graphs} graphs (n=30, mu=0.5, K=2), x in 1..=10: {violations} implication violations, {disagreements} union-find/BFS disagreements"
        ),
    ))
}

pub fn coupling_suite(seed: u64, trials: u64) -> Result<SuiteOutcome> {
    let target = GraphParams::new(200, vec![0.5, 0.3, 0.2], vec![1, 2, 4])?;
    let rep = coupling_experiment(&target, trials, point_seed(seed, 103))?;
    Ok(SuiteOutcome::new(
        "coupling-monotonicity",
        rep.edge_superset_violations == 0 && rep.cmax_violations == 0,
        format!(
            "{trials} trials: {} lost edges, {} cmax decreases",
            rep.edge_superset_violations, rep.cmax_violations
        ),
    ))
}

/// Empirical `P[|C_max| ≤ n − M]` never exceeds the finite-n union bound by
/// more than four standard errors.
pub fn soundness_suite(seed: u64, trials: u64) -> Result<SuiteOutcome> {
    let (n, mu, k) = (30, 0.5, 2);
    let params = GraphParams::two_type(n, mu, k)?;
    let hist = simulate_cmax_histogram(&params, 0, trials, point_seed(seed, 104))?;
    let mut worst: Option<(usize, f64)> = None;
    let mut passed = true;
    for m in 2..=8 {
        let p_hat = hist.count_at_most(n - m) as f64 / trials as f64;
        let sigma = (p_hat * (1.0 - p_hat) / trials as f64).sqrt();
        let bound = union_bound_sum(n, mu, k, m)?.value;
        let slack = bound + 4.0 * sigma - p_hat;
        if slack < 0.0 {
            passed = false;
        }
        if worst.is_none_or(|(_, s)| slack < s) {
            worst = Some((m, slack));
        }
    }
    let (m, slack) = worst.expect("nonempty range");
    Ok(SuiteOutcome::new(
        "union-bound-soundness",
        passed,
        format!("n=30, mu=0.5, K=2, {trials} trials, M in 2..=8: tightest margin {slack:.3e} at M={m}"),
    ))
}

pub fn giant_size_gate(seed: u64, trials: u64) -> Result<SuiteOutcome> {
    let params = GraphParams::two_type(1000, 0.9, 2)?;
    let s = run_point(&params, 0, trials, point_seed(seed, 105))?;
    Ok(SuiteOutcome::new(
        "giant-size-n1000",
        s.max_outside <= 90,
        format!("n=1000, mu=0.9, K=2, {trials} trials: max outside {} (gate 90)", s.max_outside),
    ))
}

pub fn heuristic_gate(seed: u64, trials: u64) -> Result<SuiteOutcome> {
    let mut failures = Vec::new();
    for (i, mu) in (1..=9).map(|i| i as f64 / 10.0).enumerate() {
        let params = GraphParams::two_type(1000, mu, 2)?;
        let s = run_point(&params, 20, trials, point_seed(seed, 200 + i as u64))?;
        let floor = heuristic_giant_lower_bound(1000, mu, 2, 20)?;
        if s.min_cmax < floor {
            failures.push(format!("mu={mu}: {} < {floor}", s.min_cmax));
        }
    }
    Ok(SuiteOutcome::new(
        "heuristic-floor-after-deletion",
        failures.is_empty(),
        if failures.is_empty() {
            format!("n=1000, d=20, K=2, mu in 0.1..0.9, {trials} trials/point: all above heuristic")
        } else {
            failures.join("; ")
        },
    ))
}

pub fn mean_degree_gate(seed: u64, trials: u64) -> Result<SuiteOutcome> {
    let (n, mu, k) = (2000, 0.9, 2);
    let params = GraphParams::two_type(n, mu, k)?;
    let ps = point_seed(seed, 106);
    let total_degree: u64 = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<u64> {
            let g = construct_r_type(&params, &mut trial_rng(ps, t))?;
            Ok(2 * g.edge_count() as u64)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let empirical = total_degree as f64 / (trials as f64 * n as f64);
    let expected = mean_degree(n, mu, k)?;
    Ok(SuiteOutcome::new(
        "mean-degree",
        (empirical - expected).abs() <= 0.02,
        format!("empirical {empirical:.5} vs {expected:.5} (tolerance 0.02)"),
    ))
}
