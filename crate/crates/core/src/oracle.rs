//! Exact finite-n probabilities for cut events and the union bounds built
//! from them, plus a brute-force enumerator used to validate both.
//!
//! A fixed set `S` of `r` surviving nodes is a cut exactly when every node in
//! `S` selects only inside `S ∪ D` and every other survivor selects only
//! outside `S`. Node classes and selections are independent across nodes, so
//! the probability factors into per-node terms:
//!
//! ```text
//! P[E_{n,r}(d)] = A^r · B^(n−d−r)
//! A = μ (r+d−1)/(n−1) + (1−μ) C(r+d−1, K)/C(n−1, K)
//! B = μ (n−r−1)/(n−1) + (1−μ) C(n−r−1, K)/C(n−1, K)
//! ```
//!
//! with `C(a, b) = 0` for `a < b`. Summing `C(n−d, r) · P[E_{n,r}(d)]` over
//! `r ∈ [x, ⌊(n−d)/2⌋]` bounds the probability that some cut has size in
//! `[x, n−d−x]`, and therefore (for `x ≤ (n−d)/3`) the probability that at
//! least `x` survivors lie outside the largest component.

use serde::Serialize;
use statrs::function::factorial::ln_binomial;

use crate::error::{param, Error, Result};
use crate::graph::UndirectedGraph;

/// How products and binomials are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArithmeticMode {
    /// Plain `f64` products; overflows for large `n`.
    Float64,
    /// Sums of logarithms, exponentiated per term.
    LogDomain,
}

/// A union-bound sum with its individual terms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundEvaluation {
    /// `min(1, raw_sum)`.
    pub value: f64,
    /// Unclamped sum of `terms`.
    pub raw_sum: f64,
    /// Cut size of `terms[0]`.
    pub first_r: usize,
    /// `C(n−d, r) · P[E_{n,r}(d)]` for `r = first_r, first_r + 1, …`.
    pub terms: Vec<f64>,
    pub arithmetic_mode: ArithmeticMode,
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(param(format!("mu = {mu} must lie strictly inside (0, 1)")));
    }
    Ok(())
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k < 2 || k >= n {
        return Err(param(format!("K = {k} must satisfy 2 <= K < n = {n}")));
    }
    Ok(())
}

/// `C(a, k) / C(m, k)`, zero when `a < k`.
fn binomial_ratio(a: usize, k: usize, m: usize) -> f64 {
    if a < k {
        return 0.0;
    }
    (0..k).map(|j| (a - j) as f64 / (m - j) as f64).product()
}

/// Probability that one node selects only within a fixed set of `a` other nodes.
fn confined_selection(n: usize, mu: f64, k: usize, a: usize) -> f64 {
    mu * a as f64 / (n - 1) as f64 + (1.0 - mu) * binomial_ratio(a, k, n - 1)
}

/// `(A, B)` for the cut of size `r` with `d` deleted nodes.
fn cut_factors(n: usize, mu: f64, k: usize, d: usize, r: usize) -> (f64, f64) {
    let inside = confined_selection(n, mu, k, r + d - 1);
    let outside = confined_selection(n, mu, k, n - r - 1);
    (inside, outside)
}

fn cut_probability_in(mode: ArithmeticMode, n: usize, mu: f64, k: usize, d: usize, r: usize) -> f64 {
    let (a, b) = cut_factors(n, mu, k, d, r);
    let (ea, eb) = (r, n - d - r);
    match mode {
        ArithmeticMode::Float64 => a.powi(ea as i32) * b.powi(eb as i32),
        ArithmeticMode::LogDomain => {
            if a == 0.0 || b == 0.0 {
                return 0.0;
            }
            (ea as f64 * a.ln() + eb as f64 * b.ln()).exp()
        }
    }
}

/// Probability that a fixed set of `r` nodes is a cut.
pub fn exact_cut_probability(n: usize, mu: f64, k: usize, r: usize) -> Result<f64> {
    exact_cut_probability_deleted(n, mu, k, 0, r)
}

/// Probability that a fixed set of `r` surviving nodes is a cut after `d`
/// uniformly random deletions.
pub fn exact_cut_probability_deleted(n: usize, mu: f64, k: usize, d: usize, r: usize) -> Result<f64> {
    check_mu(mu)?;
    check_k(n, k)?;
    if d + 2 > n {
        return Err(param(format!("d = {d} leaves fewer than 2 of n = {n} nodes")));
    }
    if r < 1 || r > n - d - 1 {
        return Err(param(format!(
            "cut size r = {r} must satisfy 1 <= r <= n - d - 1 = {}",
            n - d - 1
        )));
    }
    Ok(cut_probability_in(ArithmeticMode::LogDomain, n, mu, k, d, r))
}

/// Same as [`exact_cut_probability_deleted`] with plain `f64` products.
pub fn exact_cut_probability_direct(n: usize, mu: f64, k: usize, d: usize, r: usize) -> Result<f64> {
    exact_cut_probability_deleted(n, mu, k, d, r)?;
    Ok(cut_probability_in(ArithmeticMode::Float64, n, mu, k, d, r))
}

/// `Σ_{r=m}^{⌊n/2⌋} C(n, r) P[E_{n,r}]`.
pub fn union_bound_sum(n: usize, mu: f64, k: usize, m: usize) -> Result<BoundEvaluation> {
    union_bound_sum_deleted(n, mu, k, 0, m)
}

/// `Σ_{r=x}^{⌊(n−d)/2⌋} C(n−d, r) P[E_{n,r}(d)]`.
pub fn union_bound_sum_deleted(n: usize, mu: f64, k: usize, d: usize, x: usize) -> Result<BoundEvaluation> {
    union_bound_sum_with(ArithmeticMode::LogDomain, n, mu, k, d, x)
}

pub fn union_bound_sum_with(
    mode: ArithmeticMode,
    n: usize,
    mu: f64,
    k: usize,
    d: usize,
    x: usize,
) -> Result<BoundEvaluation> {
    check_mu(mu)?;
    check_k(n, k)?;
    if d + 2 > n {
        return Err(param(format!("d = {d} leaves fewer than 2 of n = {n} nodes")));
    }
    let survivors = n - d;
    let last = survivors / 2;
    if x < 1 || x > last {
        return Err(param(format!(
            "lower summation limit {x} must satisfy 1 <= x <= floor((n - d)/2) = {last}"
        )));
    }
    let terms: Vec<f64> = (x..=last)
        .map(|r| match mode {
            ArithmeticMode::LogDomain => {
                let (a, b) = cut_factors(n, mu, k, d, r);
                if a == 0.0 || b == 0.0 {
                    return 0.0;
                }
                (ln_binomial(survivors as u64, r as u64)
                    + r as f64 * a.ln()
                    + (survivors - r) as f64 * b.ln())
                .exp()
            }
            ArithmeticMode::Float64 => {
                binomial_f64(survivors, r) * cut_probability_in(mode, n, mu, k, d, r)
            }
        })
        .collect();
    let raw_sum: f64 = terms.iter().sum();
    Ok(BoundEvaluation {
        value: raw_sum.min(1.0),
        raw_sum,
        first_r: x,
        terms,
        arithmetic_mode: mode,
    })
}

fn binomial_f64(n: usize, r: usize) -> f64 {
    let r = r.min(n - r);
    (1..=r).fold(1.0, |acc, j| acc * (n - r + j) as f64 / j as f64)
}

/// Largest state space the brute-force enumerator will walk.
pub const EXHAUSTIVE_BUDGET: u64 = 200_000_000;
pub const EXHAUSTIVE_MAX_N: usize = 7;

/// One fully specified outcome: classes, selections and deleted set.
pub struct Realization<'a> {
    n: usize,
    outcomes: &'a [Vec<NodeOutcome>],
    choice: &'a [usize],
    deleted_mask: u32,
}

struct NodeOutcome {
    class: u8,
    mask: u32,
    selection: Vec<u32>,
}

impl Realization<'_> {
    pub fn n(&self) -> usize {
        self.n
    }

    /// 0 for single-selection nodes, 1 for `K`-selection nodes.
    pub fn node_type(&self, v: usize) -> u8 {
        self.outcome(v).class
    }

    pub fn selection(&self, v: usize) -> &[u32] {
        &self.outcome(v).selection
    }

    /// Selection set as a bitmask over node ids.
    pub fn selection_mask(&self, v: usize) -> u32 {
        self.outcome(v).mask
    }

    pub fn deleted_mask(&self) -> u32 {
        self.deleted_mask
    }

    pub fn is_deleted(&self, v: usize) -> bool {
        self.deleted_mask >> v & 1 == 1
    }

    /// The `r` lowest-numbered surviving nodes, as a bitmask.
    pub fn first_survivors(&self, r: usize) -> u32 {
        let mut mask = 0;
        let mut taken = 0;
        for v in 0..self.n {
            if taken == r {
                break;
            }
            if !self.is_deleted(v) {
                mask |= 1 << v;
                taken += 1;
            }
        }
        mask
    }

    /// Undirected graph on all `n` nodes (deletion not applied).
    pub fn graph(&self) -> UndirectedGraph {
        let edges: Vec<(u32, u32)> = (0..self.n)
            .flat_map(|v| self.selection(v).iter().map(move |&j| (v as u32, j)))
            .collect();
        UndirectedGraph::from_edges(self.n, &edges).expect("selections are valid edges")
    }

    pub fn deleted(&self) -> Vec<u32> {
        (0..self.n as u32).filter(|&v| self.is_deleted(v as usize)).collect()
    }

    fn outcome(&self, v: usize) -> &NodeOutcome {
        &self.outcomes[v][self.choice[v]]
    }
}

/// Exact event probability as a function of `μ`: for each count `j` of
/// single-selection nodes, the number of favourable
/// (selection tuple, deletion set) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventPolynomial {
    n: usize,
    k: usize,
    d: usize,
    counts: Vec<u64>,
}

impl EventPolynomial {
    pub fn eval(&self, mu: f64) -> f64 {
        let n = self.n;
        let single = (n - 1) as f64;
        let multi = binomial_f64(n - 1, self.k);
        let deletions = binomial_f64(n, self.d);
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(j, &c)| {
                let w = (mu / single).powi(j as i32) * ((1.0 - mu) / multi).powi((n - j) as i32);
                c as f64 * w
            })
            .sum::<f64>()
            / deletions
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }
}

/// Probability of `predicate` under the two-class ensemble with `d` random
/// deletions, by enumerating every class assignment, selection tuple and
/// deletion set.
pub fn exhaustive_event_probability<F>(n: usize, mu: f64, k: usize, d: usize, predicate: F) -> Result<f64>
where
    F: FnMut(&Realization<'_>) -> bool,
{
    check_mu(mu)?;
    Ok(exhaustive_event_polynomial(n, k, d, predicate)?.eval(mu))
}

pub fn exhaustive_event_polynomial<F>(n: usize, k: usize, d: usize, mut predicate: F) -> Result<EventPolynomial>
where
    F: FnMut(&Realization<'_>) -> bool,
{
    check_k(n, k)?;
    if n > EXHAUSTIVE_MAX_N {
        return Err(Error::Budget(format!(
            "n = {n} exceeds the enumeration limit {EXHAUSTIVE_MAX_N}"
        )));
    }
    if d >= n {
        return Err(param(format!("d = {d} must be smaller than n = {n}")));
    }
    let per_node = (n - 1) as u64 + binomial_f64(n - 1, k).round() as u64;
    let deletion_sets: Vec<u32> = (0u32..1 << n).filter(|m| m.count_ones() as usize == d).collect();
    let states = per_node
        .checked_pow(n as u32)
        .and_then(|s| s.checked_mul(deletion_sets.len() as u64));
    match states {
        Some(s) if s <= EXHAUSTIVE_BUDGET => {}
        _ => {
            return Err(Error::Budget(format!(
                "n = {n}, K = {k}, d = {d} needs more than {EXHAUSTIVE_BUDGET} states"
            )))
        }
    }

    let outcomes: Vec<Vec<NodeOutcome>> = (0..n)
        .map(|v| {
            let others = ((1u32 << n) - 1) & !(1 << v);
            let mut list: Vec<NodeOutcome> = Vec::new();
            for size_class in [(0u8, 1usize), (1u8, k)] {
                let (class, size) = size_class;
                let mut sub = others;
                // all submasks of `others` with the right popcount
                loop {
                    if sub.count_ones() as usize == size {
                        list.push(NodeOutcome {
                            class,
                            mask: sub,
                            selection: (0..n as u32).filter(|&j| sub >> j & 1 == 1).collect(),
                        });
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & others;
                }
            }
            list
        })
        .collect();

    let mut counts = vec![0u64; n + 1];
    let mut choice = vec![0usize; n];
    loop {
        let singles = (0..n).filter(|&v| outcomes[v][choice[v]].class == 0).count();
        for &deleted_mask in &deletion_sets {
            let real = Realization {
                n,
                outcomes: &outcomes,
                choice: &choice,
                deleted_mask,
            };
            if predicate(&real) {
                counts[singles] += 1;
            }
        }
        // odometer
        let mut v = 0;
        loop {
            if v == n {
                return Ok(EventPolynomial { n, k, d, counts });
            }
            choice[v] += 1;
            if choice[v] < outcomes[v].len() {
                break;
            }
            choice[v] = 0;
            v += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::connected_components;

    #[test]
    fn single_node_cut_is_impossible() {
        for k in 2..6 {
            assert_eq!(exact_cut_probability(10, 0.4, k, 1).unwrap(), 0.0);
        }
    }

    #[test]
    fn argument_checks() {
        assert!(exact_cut_probability(10, 0.5, 2, 0).is_err());
        assert!(exact_cut_probability(10, 0.5, 2, 10).is_err());
        assert!(exact_cut_probability(10, 0.0, 2, 3).is_err());
        assert!(exact_cut_probability(10, 0.5, 1, 3).is_err());
        assert!(exact_cut_probability_deleted(10, 0.5, 2, 3, 7).is_err());
        assert!(exact_cut_probability_deleted(10, 0.5, 2, 3, 6).is_ok());
        assert!(union_bound_sum(30, 0.5, 2, 0).is_err());
        assert!(union_bound_sum(30, 0.5, 2, 16).is_err());
        assert!(union_bound_sum_deleted(30, 0.5, 2, 4, 14).is_err());
        assert!(exhaustive_event_probability(8, 0.5, 2, 0, |_| true).is_err());
    }

    #[test]
    fn deleted_reduces_to_plain() {
        for r in 1..20 {
            assert_eq!(
                exact_cut_probability_deleted(20, 0.3, 3, 0, r).unwrap(),
                exact_cut_probability(20, 0.3, 3, r).unwrap()
            );
        }
        let a = union_bound_sum(40, 0.6, 2, 3).unwrap();
        let b = union_bound_sum_deleted(40, 0.6, 2, 0, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn forced_connectivity_enumerated() {
        let p = exhaustive_event_probability(3, 0.37, 2, 0, |g| {
            connected_components(&g.graph()).unwrap().cmax == 3
        })
        .unwrap();
        assert!((p - 1.0).abs() < 1e-15);
    }

    #[test]
    fn polynomial_total_mass_is_one() {
        for (n, k, d) in [(4, 2, 0), (5, 3, 1), (5, 2, 2)] {
            let poly = exhaustive_event_polynomial(n, k, d, |_| true).unwrap();
            for mu in [0.1, 0.5, 0.9] {
                assert!((poly.eval(mu) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn clamping_keeps_raw_sum() {
        let b = union_bound_sum(30, 0.95, 2, 1).unwrap();
        assert!(b.value <= 1.0);
        assert!(b.value <= b.raw_sum);
        assert!(b.terms.iter().all(|&t| t >= 0.0));
        assert_eq!(b.terms.len(), 15);
    }
}
