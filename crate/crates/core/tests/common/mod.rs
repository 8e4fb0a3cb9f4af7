//! Test-side reference implementations, written without the library.

#![allow(dead_code)]

use std::collections::VecDeque;

/// `(type-1?, selection bitmask)` outcomes of one node `v`.
fn node_outcomes(n: usize, k: usize, v: usize) -> Vec<(bool, u32)> {
    let others: Vec<u32> = (0..n as u32).filter(|&u| u as usize != v).collect();
    let mut out: Vec<(bool, u32)> = others.iter().map(|&u| (true, 1 << u)).collect();
    for sub in 0u32..1 << others.len() {
        if sub.count_ones() as usize == k {
            let mask = others
                .iter()
                .enumerate()
                .filter(|(i, _)| sub >> i & 1 == 1)
                .fold(0, |m, (_, &u)| m | 1 << u);
            out.push((false, mask));
        }
    }
    out
}

/// Brute-force counts for the event "the first `r` survivors send no
/// selection to another survivor outside them and receive none from one".
///
/// Returns `counts[r][j]`: number of (outcome, deletion set) pairs with `j`
/// single-selection nodes on which the event holds, for `r = 1..=n−d−1`.
pub fn cut_event_counts(n: usize, k: usize, d: usize) -> Vec<Vec<u64>> {
    let per_node: Vec<Vec<(bool, u32)>> = (0..n).map(|v| node_outcomes(n, k, v)).collect();
    let deletions: Vec<u32> = (0u32..1 << n).filter(|m| m.count_ones() as usize == d).collect();
    let r_max = n - d - 1;
    let mut counts = vec![vec![0u64; n + 1]; r_max + 1];
    let mut idx = vec![0usize; n];
    loop {
        let sel: Vec<u32> = (0..n).map(|v| per_node[v][idx[v]].1).collect();
        let singles = (0..n).filter(|&v| per_node[v][idx[v]].0).count();
        for &dead in &deletions {
            let alive = !dead & ((1u32 << n) - 1);
            let mut s = 0u32;
            let mut order = (0..n).filter(|&v| alive >> v & 1 == 1);
            for row in counts.iter_mut().skip(1) {
                s |= 1 << order.next().unwrap();
                let rest = alive & !s;
                let isolated = (0..n).all(|v| {
                    if s >> v & 1 == 1 {
                        sel[v] & rest == 0
                    } else if rest >> v & 1 == 1 {
                        sel[v] & s == 0
                    } else {
                        true
                    }
                });
                if isolated {
                    row[singles] += 1;
                }
            }
        }
        let mut v = 0;
        loop {
            if v == n {
                return counts;
            }
            idx[v] += 1;
            if idx[v] < per_node[v].len() {
                break;
            }
            idx[v] = 0;
            v += 1;
        }
    }
}

pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Probability from event counts: each type-1 outcome has weight
/// `μ/(n−1)`, each type-2 outcome `(1−μ)/C(n−1,K)`, each deletion set
/// `1/C(n,d)`.
pub fn counts_to_probability(counts: &[u64], n: usize, k: usize, d: usize, mu: f64) -> f64 {
    let w1 = mu / (n - 1) as f64;
    let w2 = (1.0 - mu) / binomial(n as u64 - 1, k as u64);
    let del = binomial(n as u64, d as u64);
    counts
        .iter()
        .enumerate()
        .map(|(j, &c)| c as f64 * w1.powi(j as i32) * w2.powi((n - j) as i32))
        .sum::<f64>()
        / del
}

/// Component sizes (non-increasing) of the graph on `alive` nodes.
pub fn bfs_component_sizes(n: usize, edges: &[(u32, u32)], alive: &[bool]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        if alive[u as usize] && alive[v as usize] {
            adj[u as usize].push(v as usize);
            adj[v as usize].push(u as usize);
        }
    }
    let mut seen = vec![false; n];
    let mut sizes = Vec::new();
    for s in 0..n {
        if !alive[s] || seen[s] {
            continue;
        }
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        let mut size = 0;
        while let Some(u) = q.pop_front() {
            size += 1;
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
        sizes.push(size);
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

/// All sums of nonempty proper sub-multisets of `sizes`.
pub fn proper_subset_sums(sizes: &[usize]) -> Vec<bool> {
    let total: usize = sizes.iter().sum();
    let mut reach = vec![false; total + 1];
    reach[0] = true;
    for &s in sizes {
        for t in (s..=total).rev() {
            if reach[t - s] {
                reach[t] = true;
            }
        }
    }
    reach[0] = false;
    reach[total] = false;
    reach
}

/// Root of `β + e^{−βc} = 1` in `(0, 1)` by Newton's method, for `c > 1`.
pub fn er_root_newton(c: f64) -> f64 {
    let mut b = 1.0;
    for _ in 0..100 {
        let f = b + (-b * c).exp() - 1.0;
        let df = 1.0 - c * (-b * c).exp();
        b -= f / df;
    }
    b
}
