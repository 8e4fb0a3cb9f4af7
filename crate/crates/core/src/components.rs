//! Connected components, cuts, and the "no mid-range cut" event.
//!
//! A cut is a nonempty proper subset of the surviving nodes with no edge to its
//! complement. Every cut is a disjoint union of connected components, so the
//! existence of a cut of a given size reduces to subset-sum over component
//! sizes.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::graph::GraphView;
use crate::union_find::UnionFind;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentReport {
    /// Component sizes in non-increasing order.
    pub component_sizes: Vec<usize>,
    pub cmax: usize,
    /// Number of surviving nodes.
    pub n_effective: usize,
    /// `n_effective − cmax`.
    pub outside_count: usize,
}

impl ComponentReport {
    fn from_sizes(mut sizes: Vec<usize>) -> Self {
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        let n_effective = sizes.iter().sum();
        let cmax = sizes[0];
        ComponentReport {
            component_sizes: sizes,
            cmax,
            n_effective,
            outside_count: n_effective - cmax,
        }
    }

    pub fn component_count(&self) -> usize {
        self.component_sizes.len()
    }
}

/// Component partition via union-find.
pub fn connected_components<G: GraphView>(g: &G) -> Result<ComponentReport> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut uf = UnionFind::new(g.id_bound());
    for (u, v) in g.edges() {
        uf.union(u, v);
    }
    let sizes = g
        .nodes()
        .filter(|&v| uf.is_root(v as u32))
        .map(|v| uf.root_size(v as u32) as usize)
        .collect();
    Ok(ComponentReport::from_sizes(sizes))
}

/// Component partition via breadth-first search.
pub fn connected_components_bfs<G: GraphView>(g: &G) -> Result<ComponentReport> {
    Ok(ComponentReport::from_sizes(component_labels(g)?.1))
}

/// Per-node component label (`u32::MAX` for absent nodes) and the size of
/// each labelled component, in discovery order.
pub fn component_labels<G: GraphView>(g: &G) -> Result<(Vec<u32>, Vec<usize>)> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut label = vec![u32::MAX; g.id_bound()];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for s in g.nodes() {
        if label[s] != u32::MAX {
            continue;
        }
        let id = sizes.len() as u32;
        label[s] = id;
        queue.push_back(s);
        let mut size = 0;
        while let Some(u) = queue.pop_front() {
            size += 1;
            for &v in g.neighbors(u) {
                if label[v as usize] == u32::MAX {
                    label[v as usize] = id;
                    queue.push_back(v as usize);
                }
            }
        }
        sizes.push(size);
    }
    Ok((label, sizes))
}

/// Whether `subset` is isolated from the rest of the graph.
pub fn is_cut<G: GraphView>(g: &G, subset: &[u32]) -> Result<bool> {
    let n_eff = g.node_count();
    let mut inside = vec![false; g.id_bound()];
    for &v in subset {
        let v = v as usize;
        if !g.contains(v) {
            return Err(param(format!("node {v} is not in the graph")));
        }
        if inside[v] {
            return Err(param(format!("node {v} listed twice")));
        }
        inside[v] = true;
    }
    if subset.is_empty() || subset.len() == n_eff {
        return Err(param(format!(
            "a cut must be a nonempty proper subset; got {} of {n_eff} nodes",
            subset.len()
        )));
    }
    Ok(subset
        .iter()
        .all(|&u| g.neighbors(u as usize).iter().all(|&v| inside[v as usize])))
}

/// Whether some cut has size in `[lo, hi]`.
pub fn has_cut_in_range<G: GraphView>(g: &G, lo: usize, hi: usize) -> Result<bool> {
    let report = connected_components(g)?;
    check_range(lo, hi, report.n_effective)?;
    Ok(sizes_reach_range(&report.component_sizes, lo, hi))
}

fn check_range(lo: usize, hi: usize, n_eff: usize) -> Result<()> {
    if lo < 1 || lo > hi || hi > n_eff {
        return Err(param(format!(
            "cut size range [{lo}, {hi}] must satisfy 1 <= lo <= hi <= {n_eff}"
        )));
    }
    Ok(())
}

/// Subset-sum reachability: is there a union of components, neither empty nor
/// everything, whose total size falls in `[lo, hi]`?
pub fn sizes_reach_range(sizes: &[usize], lo: usize, hi: usize) -> bool {
    let total: usize = sizes.iter().sum();
    let hi = hi.min(total.saturating_sub(1));
    if lo > hi {
        return false;
    }
    let words = total / 64 + 1;
    let mut bits = vec![0u64; words];
    bits[0] = 1;
    for &s in sizes {
        shift_or(&mut bits, s);
    }
    (lo..=hi).any(|t| bits[t / 64] >> (t % 64) & 1 == 1)
}

fn shift_or(bits: &mut [u64], shift: usize) {
    let (word_shift, bit_shift) = (shift / 64, shift % 64);
    for i in (word_shift..bits.len()).rev() {
        let src = i - word_shift;
        let mut v = bits[src] << bit_shift;
        if bit_shift != 0 && src > 0 {
            v |= bits[src - 1] >> (64 - bit_shift);
        }
        bits[i] |= v;
    }
}

/// Both sides of the implication "no cut with size in `[x, n − x]` ⇒ the
/// largest component has more than `n − x` nodes".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Lemma1Record {
    pub x: usize,
    pub no_mid_cut: bool,
    pub giant_exceeds: bool,
}

impl Lemma1Record {
    pub fn holds(&self) -> bool {
        !self.no_mid_cut || self.giant_exceeds
    }
}

pub fn lemma1_check<G: GraphView>(g: &G, x: usize) -> Result<Lemma1Record> {
    let report = connected_components(g)?;
    let n = report.n_effective;
    if x < 1 || x > n / 3 {
        return Err(param(format!("x = {x} must satisfy 1 <= x <= floor(n/3) = {}", n / 3)));
    }
    let no_mid_cut = !sizes_reach_range(&report.component_sizes, x, n - x);
    Ok(Lemma1Record {
        x,
        no_mid_cut,
        giant_exceeds: report.cmax > n - x,
    })
}
