//! Inhomogeneous random K-out graphs.
//!
//! Each node is independently assigned a class `i` with probability `μ_i` and
//! then selects `K_i` distinct other nodes uniformly at random. Two nodes are
//! adjacent when at least one of them selected the other; orientation is
//! discarded. The two-class ensemble is the special case `K = (1, K_n)`,
//! `μ = (μ, 1 − μ)`.
//!
//! Node ids are dense and 0-based. Deleting nodes never re-indexes: the
//! induced subgraph keeps the original ids and marks the deleted ones absent.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

const PROB_SUM_TOLERANCE: f64 = 1e-12;

/// Ensemble parameters: node count, class probabilities and per-class
/// selection counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphParams {
    n: usize,
    type_probs: Vec<f64>,
    type_selections: Vec<usize>,
}

impl GraphParams {
    /// General `r`-class ensemble.
    pub fn new(n: usize, type_probs: Vec<f64>, type_selections: Vec<usize>) -> Result<Self> {
        let r = type_probs.len();
        if r < 2 {
            return Err(param(format!("need at least 2 node classes, got {r}")));
        }
        if type_selections.len() != r {
            return Err(param(format!(
                "class probability vector has {r} entries but selection vector has {}",
                type_selections.len()
            )));
        }
        for (i, &p) in type_probs.iter().enumerate() {
            if !(p > 0.0 && p < 1.0) {
                return Err(param(format!(
                    "class probability mu_{} = {p} must lie strictly inside (0, 1)",
                    i + 1
                )));
            }
        }
        let total: f64 = type_probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(param(format!("class probabilities sum to {total}, expected 1")));
        }
        if type_selections[0] < 1 {
            return Err(param("every class must select at least one node (K_1 >= 1)"));
        }
        if type_selections.windows(2).any(|w| w[0] >= w[1]) {
            return Err(param(format!(
                "selection counts must be strictly increasing, got {type_selections:?}"
            )));
        }
        let k_max = type_selections[r - 1];
        if k_max >= n {
            return Err(param(format!(
                "largest selection count K = {k_max} must be smaller than n = {n}"
            )));
        }
        Ok(GraphParams {
            n,
            type_probs,
            type_selections,
        })
    }

    /// Two-class ensemble: class 1 with probability `mu` selects one node,
    /// class 2 selects `k` nodes.
    pub fn two_type(n: usize, mu: f64, k: usize) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(param(format!("mu = {mu} must lie strictly inside (0, 1)")));
        }
        if k < 2 {
            return Err(param(format!("K = {k} must be at least 2")));
        }
        if k >= n {
            return Err(param(format!("K = {k} must be smaller than n = {n}")));
        }
        Self::new(n, vec![mu, 1.0 - mu], vec![1, k])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn type_probs(&self) -> &[f64] {
        &self.type_probs
    }

    pub fn type_selections(&self) -> &[usize] {
        &self.type_selections
    }

    /// Number of node classes `r`.
    pub fn classes(&self) -> usize {
        self.type_probs.len()
    }

    pub fn is_two_type(&self) -> bool {
        self.classes() == 2 && self.type_selections[0] == 1
    }

    /// Probability of the first (fewest-selection) class.
    pub fn mu(&self) -> f64 {
        self.type_probs[0]
    }

    /// Selection count of the last class.
    pub fn k_max(&self) -> usize {
        self.type_selections[self.classes() - 1]
    }

    /// Mean number of selections per node, `Σ μ_i K_i`.
    pub fn avg_selections(&self) -> f64 {
        self.type_probs
            .iter()
            .zip(&self.type_selections)
            .map(|(p, &k)| p * k as f64)
            .sum()
    }
}

/// Read-only access to an undirected graph whose nodes are a subset of
/// `0..id_bound()`.
pub trait GraphView {
    /// Exclusive upper bound on node ids.
    fn id_bound(&self) -> usize;
    fn contains(&self, v: usize) -> bool;
    /// Sorted, duplicate-free neighbors of a present node (all present).
    fn neighbors(&self, v: usize) -> &[u32];
    /// Number of present nodes.
    fn node_count(&self) -> usize;

    fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.id_bound()).filter(move |&v| self.contains(v))
    }

    fn has_edge(&self, u: usize, v: usize) -> bool {
        self.contains(u) && self.contains(v) && self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Each edge once, as `(u, v)` with `u < v`, in ascending order.
    fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.nodes().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&v| v as usize > u)
                .map(move |&v| (u as u32, v))
        })
    }

    fn edge_count(&self) -> usize {
        self.nodes().map(|u| self.neighbors(u).len()).sum::<usize>() / 2
    }
}

/// Undirected graph on `0..n` in compressed sparse row form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl UndirectedGraph {
    /// Builds from an edge list; self-loops are rejected, duplicates merged.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        for &(u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(param(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(param(format!("self-loop at node {u}")));
            }
        }
        Ok(Self::from_pairs_unchecked(n, edges.iter().copied()))
    }

    fn from_pairs_unchecked<I>(n: usize, pairs: I) -> Self
    where
        I: Iterator<Item = (u32, u32)> + Clone,
    {
        let mut offsets = vec![0usize; n + 1];
        for (u, v) in pairs.clone() {
            offsets[u as usize + 1] += 1;
            offsets[v as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut targets = vec![0u32; offsets[n]];
        for (u, v) in pairs {
            targets[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
            targets[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        // sort + dedup each list, compacting in place
        let mut write = 0;
        let mut start = 0;
        for i in 0..n {
            let end = offsets[i + 1];
            targets[start..end].sort_unstable();
            let list_start = write;
            for j in start..end {
                let t = targets[j];
                if write == list_start || targets[write - 1] != t {
                    targets[write] = t;
                    write += 1;
                }
            }
            start = end;
            offsets[i + 1] = write;
        }
        targets.truncate(write);
        UndirectedGraph { offsets, targets }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Subgraph induced by all nodes not in `deleted`, keeping original ids.
    pub fn induced(&self, deleted: &[u32]) -> Result<InducedSubgraph> {
        let n = self.n();
        let mut present = vec![true; n];
        for &v in deleted {
            let slot = present
                .get_mut(v as usize)
                .ok_or_else(|| param(format!("deleted node {v} out of range for n = {n}")))?;
            if !*slot {
                return Err(param(format!("node {v} deleted twice")));
            }
            *slot = false;
        }
        let survivors = n - deleted.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(self.targets.len());
        offsets.push(0);
        for v in 0..n {
            if present[v] {
                targets.extend(
                    self.neighbors(v)
                        .iter()
                        .copied()
                        .filter(|&u| present[u as usize]),
                );
            }
            offsets.push(targets.len());
        }
        Ok(InducedSubgraph {
            present,
            survivors,
            graph: UndirectedGraph { offsets, targets },
        })
    }
}

impl GraphView for UndirectedGraph {
    fn id_bound(&self) -> usize {
        self.n()
    }

    fn contains(&self, v: usize) -> bool {
        v < self.n()
    }

    fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    fn node_count(&self) -> usize {
        self.n()
    }
}

/// A graph restricted to the nodes that survived deletion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedSubgraph {
    present: Vec<bool>,
    survivors: usize,
    graph: UndirectedGraph,
}

impl GraphView for InducedSubgraph {
    fn id_bound(&self) -> usize {
        self.present.len()
    }

    fn contains(&self, v: usize) -> bool {
        self.present.get(v).copied().unwrap_or(false)
    }

    fn neighbors(&self, v: usize) -> &[u32] {
        self.graph.neighbors(v)
    }

    fn node_count(&self) -> usize {
        self.survivors
    }
}

/// A realized K-out graph: node classes, selection sets and the derived
/// undirected adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct KoutGraph {
    params: GraphParams,
    node_types: Vec<u8>,
    sel_offsets: Vec<usize>,
    selections: Vec<u32>,
    adjacency: UndirectedGraph,
}

impl KoutGraph {
    fn from_parts(
        params: GraphParams,
        node_types: Vec<u8>,
        sel_offsets: Vec<usize>,
        selections: Vec<u32>,
    ) -> Self {
        let n = params.n();
        let pairs = (0..n).flat_map(|i| {
            selections[sel_offsets[i]..sel_offsets[i + 1]]
                .iter()
                .map(move |&j| (i as u32, j))
        });
        let adjacency = UndirectedGraph::from_pairs_unchecked(n, pairs);
        KoutGraph {
            params,
            node_types,
            sel_offsets,
            selections,
            adjacency,
        }
    }

    pub fn params(&self) -> &GraphParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n()
    }

    /// 0-based class index of each node.
    pub fn node_types(&self) -> &[u8] {
        &self.node_types
    }

    /// Sorted selection set `Γ(v)`.
    pub fn selections(&self, v: usize) -> &[u32] {
        &self.selections[self.sel_offsets[v]..self.sel_offsets[v + 1]]
    }

    pub fn adjacency(&self) -> &UndirectedGraph {
        &self.adjacency
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency.degree(v)
    }
}

impl GraphView for KoutGraph {
    fn id_bound(&self) -> usize {
        self.n()
    }

    fn contains(&self, v: usize) -> bool {
        v < self.n()
    }

    fn neighbors(&self, v: usize) -> &[u32] {
        self.adjacency.neighbors(v)
    }

    fn node_count(&self) -> usize {
        self.n()
    }
}

/// A realized deletion: `d` nodes drawn uniformly among all size-`d` subsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeletionSpec {
    pub d: usize,
    /// Sorted deleted ids.
    pub deleted: Vec<u32>,
}

/// Draws an independent class for every node.
pub fn assign_types<R: Rng + ?Sized>(params: &GraphParams, rng: &mut R) -> Vec<u8> {
    let mut types = Vec::with_capacity(params.n());
    fill_types(params, rng, &mut types);
    types
}

pub(crate) fn fill_types<R: Rng + ?Sized>(params: &GraphParams, rng: &mut R, types: &mut Vec<u8>) {
    let probs = params.type_probs();
    let last = probs.len() - 1;
    types.clear();
    for _ in 0..params.n() {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut class = last;
        for (i, &p) in probs[..last].iter().enumerate() {
            acc += p;
            if u < acc {
                class = i;
                break;
            }
        }
        types.push(class as u8);
    }
}

/// `k` distinct uniform nodes from `0..n` excluding `v`, sorted.
pub(crate) fn push_selection<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    v: usize,
    k: usize,
    out: &mut Vec<u32>,
) {
    let start = out.len();
    for idx in index::sample(rng, n - 1, k) {
        let j = if idx >= v { idx + 1 } else { idx };
        out.push(j as u32);
    }
    out[start..].sort_unstable();
}

/// Shared sampling kernel: types first, then selection sets node by node.
pub(crate) fn sample_into<R: Rng + ?Sized>(
    params: &GraphParams,
    rng: &mut R,
    types: &mut Vec<u8>,
    sel_offsets: &mut Vec<usize>,
    selections: &mut Vec<u32>,
) {
    let n = params.n();
    fill_types(params, rng, types);
    sel_offsets.clear();
    selections.clear();
    sel_offsets.push(0);
    let ks = params.type_selections();
    for v in 0..n {
        push_selection(rng, n, v, ks[types[v] as usize], selections);
        sel_offsets.push(selections.len());
    }
}

/// Samples a two-class graph `(μ, K_n)`.
pub fn construct_two_type<R: Rng + ?Sized>(params: &GraphParams, rng: &mut R) -> Result<KoutGraph> {
    if !params.is_two_type() {
        return Err(param(format!(
            "two-class construction needs K = (1, K_n), got {:?}",
            params.type_selections()
        )));
    }
    construct_r_type(params, rng)
}

/// Samples an `r`-class graph.
pub fn construct_r_type<R: Rng + ?Sized>(params: &GraphParams, rng: &mut R) -> Result<KoutGraph> {
    let mut types = Vec::new();
    let mut offsets = Vec::new();
    let mut selections = Vec::new();
    sample_into(params, rng, &mut types, &mut offsets, &mut selections);
    Ok(KoutGraph::from_parts(params.clone(), types, offsets, selections))
}

/// Deletes `d` uniformly chosen nodes and returns the induced subgraph on the
/// survivors. `g` is left untouched.
pub fn delete_random_nodes<R: Rng + ?Sized>(
    g: &KoutGraph,
    d: usize,
    rng: &mut R,
) -> Result<(DeletionSpec, InducedSubgraph)> {
    let deleted = sample_deleted(g.n(), d, rng)?;
    let sub = g.adjacency().induced(&deleted)?;
    Ok((DeletionSpec { d, deleted }, sub))
}

pub(crate) fn sample_deleted<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<Vec<u32>> {
    if d >= n {
        return Err(param(format!(
            "cannot delete d = {d} nodes from n = {n}; need d < n"
        )));
    }
    let mut deleted: Vec<u32> = index::sample(rng, n, d).iter().map(|v| v as u32).collect();
    deleted.sort_unstable();
    Ok(deleted)
}

/// Extends a two-class graph with parameters `(Σ_{i<r} μ_i, K_r)` into an
/// `r`-class graph containing it as a spanning subgraph.
///
/// Each class-1 node of `g2` is moved to class `i < r` with probability
/// `μ_i / Σ_{j<r} μ_j` and then picks `K_i − 1` further neighbors it had not
/// already chosen. Class-2 nodes become class `r` unchanged.
pub fn couple_extend<R: Rng + ?Sized>(
    g2: &KoutGraph,
    target: &GraphParams,
    rng: &mut R,
) -> Result<KoutGraph> {
    let base = g2.params();
    if !base.is_two_type() {
        return Err(param("coupling input must be a two-class graph"));
    }
    if base.n() != target.n() {
        return Err(param(format!(
            "coupling input has n = {} but target has n = {}",
            base.n(),
            target.n()
        )));
    }
    let r = target.classes();
    let probs = target.type_probs();
    let ks = target.type_selections();
    let mu_tilde: f64 = probs[..r - 1].iter().sum();
    if (mu_tilde - base.mu()).abs() > PROB_SUM_TOLERANCE {
        return Err(param(format!(
            "coupling input has mu = {} but target's first r-1 classes sum to {mu_tilde}",
            base.mu()
        )));
    }
    if base.k_max() != target.k_max() {
        return Err(param(format!(
            "coupling input has K = {} but target has K_r = {}",
            base.k_max(),
            target.k_max()
        )));
    }

    let n = g2.n();
    let last = (r - 1) as u8;
    let mut types = Vec::with_capacity(n);
    let mut offsets = Vec::with_capacity(n + 1);
    let mut selections = Vec::with_capacity(g2.selections.len());
    offsets.push(0);
    for v in 0..n {
        let start = selections.len();
        selections.extend_from_slice(g2.selections(v));
        if g2.node_types()[v] == 0 {
            let u: f64 = rng.random::<f64>() * mu_tilde;
            let mut acc = 0.0;
            let mut class = r - 2;
            for (i, &p) in probs[..r - 1].iter().enumerate() {
                acc += p;
                if u < acc {
                    class = i;
                    break;
                }
            }
            let extra = ks[class] - 1;
            let mut added = 0;
            while added < extra {
                let cand = rng.random_range(0..n) as u32;
                if cand as usize == v || selections[start..].contains(&cand) {
                    continue;
                }
                selections.push(cand);
                added += 1;
            }
            selections[start..].sort_unstable();
            types.push(class as u8);
        } else {
            types.push(last);
        }
        offsets.push(selections.len());
    }
    Ok(KoutGraph::from_parts(target.clone(), types, offsets, selections))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn check_invariants(g: &KoutGraph) {
        let ks = g.params().type_selections();
        for v in 0..g.n() {
            let sel = g.selections(v);
            assert_eq!(sel.len(), ks[g.node_types()[v] as usize]);
            assert!(!sel.contains(&(v as u32)));
            assert!(sel.windows(2).all(|w| w[0] < w[1]));
            assert!(g.degree(v) >= 1);
            for &j in sel {
                assert!(g.has_edge(v, j as usize));
                assert!(g.has_edge(j as usize, v));
            }
        }
        for (u, v) in g.edges() {
            let u = u as usize;
            assert!(g.selections(u).contains(&v) || g.selections(v as usize).contains(&(u as u32)));
        }
    }

    #[test]
    fn params_validation() {
        assert!(GraphParams::two_type(10, 0.0, 2).is_err());
        assert!(GraphParams::two_type(10, 1.0, 2).is_err());
        assert!(GraphParams::two_type(10, 0.5, 1).is_err());
        assert!(GraphParams::two_type(10, 0.5, 10).is_err());
        assert!(GraphParams::new(10, vec![0.5, 0.5], vec![2, 2]).is_err());
        assert!(GraphParams::new(10, vec![0.5, 0.4], vec![1, 2]).is_err());
        assert!(GraphParams::new(10, vec![1.0], vec![1]).is_err());
        assert!(GraphParams::new(50, vec![0.5, 0.3, 0.2], vec![1, 2, 4]).is_ok());
        assert!(GraphParams::new(50, vec![0.5, 0.3, 0.2], vec![1, 4, 2]).is_err());
    }

    #[test]
    fn fig1_sized_graph() {
        let p = GraphParams::two_type(6, 0.5, 3).unwrap();
        for seed in 0..50 {
            let g = construct_two_type(&p, &mut seeded(seed)).unwrap();
            check_invariants(&g);
        }
    }

    #[test]
    fn forced_selection_with_three_nodes() {
        let p = GraphParams::two_type(3, 0.5, 2).unwrap();
        for seed in 0..100 {
            let g = construct_two_type(&p, &mut seeded(seed)).unwrap();
            check_invariants(&g);
            // any two edges on three nodes connect them
            assert!(g.edge_count() >= 2);
            for v in 0..3 {
                if g.node_types()[v] == 1 {
                    assert_eq!(g.degree(v), 2);
                }
            }
        }
    }

    #[test]
    fn r_type_selection_sizes() {
        let p = GraphParams::new(50, vec![0.5, 0.3, 0.2], vec![1, 2, 4]).unwrap();
        for seed in 0..50 {
            let g = construct_r_type(&p, &mut seeded(seed)).unwrap();
            check_invariants(&g);
        }
        assert!(construct_two_type(&p, &mut seeded(0)).is_err());
    }

    #[test]
    fn two_type_is_r_type_specialization() {
        let p = GraphParams::two_type(40, 0.3, 3).unwrap();
        let a = construct_two_type(&p, &mut seeded(11)).unwrap();
        let b = construct_r_type(&p, &mut seeded(11)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn deletion_edge_cases() {
        let p = GraphParams::two_type(30, 0.5, 2).unwrap();
        let g = construct_two_type(&p, &mut seeded(1)).unwrap();

        let (spec, sub) = delete_random_nodes(&g, 0, &mut seeded(2)).unwrap();
        assert!(spec.deleted.is_empty());
        assert_eq!(sub.node_count(), 30);
        assert_eq!(sub.edges().collect::<Vec<_>>(), g.edges().collect::<Vec<_>>());

        let (spec, sub) = delete_random_nodes(&g, 29, &mut seeded(3)).unwrap();
        assert_eq!(spec.deleted.len(), 29);
        assert_eq!(sub.node_count(), 1);
        assert_eq!(sub.edge_count(), 0);

        assert!(delete_random_nodes(&g, 30, &mut seeded(4)).is_err());

        let (spec, sub) = delete_random_nodes(&g, 7, &mut seeded(5)).unwrap();
        for &v in &spec.deleted {
            assert!(!sub.contains(v as usize));
        }
        for (u, v) in g.edges() {
            let alive = sub.contains(u as usize) && sub.contains(v as usize);
            assert_eq!(sub.has_edge(u as usize, v as usize), alive);
        }
        for (u, v) in sub.edges() {
            assert!(g.has_edge(u as usize, v as usize));
        }
    }

    #[test]
    fn coupling_identity_for_two_classes() {
        let p = GraphParams::two_type(60, 0.4, 3).unwrap();
        let g = construct_two_type(&p, &mut seeded(8)).unwrap();
        let out = couple_extend(&g, &p, &mut seeded(9)).unwrap();
        assert_eq!(out, g);
    }

    #[test]
    fn coupling_superset_and_mismatch() {
        let target = GraphParams::new(80, vec![0.5, 0.3, 0.2], vec![1, 2, 4]).unwrap();
        let base = GraphParams::two_type(80, 0.8, 4).unwrap();
        for seed in 0..30 {
            let g = construct_two_type(&base, &mut seeded(seed)).unwrap();
            let ext = couple_extend(&g, &target, &mut seeded(seed + 1000)).unwrap();
            check_invariants(&ext);
            for (u, v) in g.edges() {
                assert!(ext.has_edge(u as usize, v as usize));
            }
        }
        let wrong_mu = GraphParams::two_type(80, 0.7, 4).unwrap();
        let g = construct_two_type(&wrong_mu, &mut seeded(0)).unwrap();
        assert!(couple_extend(&g, &target, &mut seeded(0)).is_err());
        let wrong_k = GraphParams::two_type(80, 0.8, 3).unwrap();
        let g = construct_two_type(&wrong_k, &mut seeded(0)).unwrap();
        assert!(couple_extend(&g, &target, &mut seeded(0)).is_err());
    }

    #[test]
    fn hand_built_graph() {
        let g = UndirectedGraph::from_edges(6, &[(1, 2), (3, 4), (4, 5), (2, 1)]).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.neighbors(4), &[3, 5]);
        assert!(UndirectedGraph::from_edges(3, &[(0, 0)]).is_err());
        assert!(UndirectedGraph::from_edges(3, &[(0, 3)]).is_err());
    }
}
