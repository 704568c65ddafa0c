//! Random-walk embedding of the nodes around a seed set.
//!
//! A walk starts at a uniformly chosen seed and moves to a uniformly chosen
//! neighbor at every step. `p_t(v)` is the probability of being at `v` after
//! `t` steps, and each node is embedded as `(p_1(v), ..., p_T(v))`.
//!
//! Everything is sparse: only nodes with positive mass are stored, so the
//! cost of a step is the total degree of the current support.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, NodeSet};

/// Sparse walk distribution at a given step, sorted by node id.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkDistribution {
    step: usize,
    entries: Vec<(NodeId, f64)>,
}

impl WalkDistribution {
    /// Uniform distribution over `seeds` (step 0).
    pub fn uniform(seeds: &NodeSet) -> Self {
        let mass = 1.0 / seeds.len() as f64;
        WalkDistribution { step: 0, entries: seeds.iter().map(|v| (v, mass)).collect() }
    }

    /// Builds a distribution from arbitrary `(node, mass)` pairs. Zero masses
    /// are dropped; repeated nodes are summed.
    pub fn from_entries<I: IntoIterator<Item = (NodeId, f64)>>(step: usize, entries: I) -> Self {
        let mut entries: Vec<(NodeId, f64)> = entries.into_iter().collect();
        entries.sort_by_key(|&(v, _)| v);
        let mut merged: Vec<(NodeId, f64)> = Vec::with_capacity(entries.len());
        for (v, m) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += m,
                _ => merged.push((v, m)),
            }
        }
        merged.retain(|&(_, m)| m > 0.0);
        WalkDistribution { step, entries: merged }
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn entries(&self) -> &[(NodeId, f64)] {
        &self.entries
    }

    pub fn get(&self, v: NodeId) -> f64 {
        self.entries.binary_search_by_key(&v, |&(u, _)| u).map(|i| self.entries[i].1).unwrap_or(0.0)
    }

    pub fn support(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.entries.iter().map(|&(v, _)| v)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.iter().map(|&(_, m)| m).sum()
    }
}

/// Pushes every entry's mass evenly onto its neighbors. Sources are visited in
/// ascending order so the floating-point sums are reproducible.
pub(crate) fn push(g: &Graph, entries: &[(NodeId, f64)]) -> Result<Vec<(NodeId, f64)>> {
    let mut next: HashMap<NodeId, f64> = HashMap::with_capacity(entries.len() * 4);
    for &(u, mass) in entries {
        let degree = g.degree(u);
        if degree == 0 {
            return Err(Error::ZeroDegreeNode(u));
        }
        let share = mass / degree as f64;
        for &w in g.neighbors(u) {
            *next.entry(w).or_insert(0.0) += share;
        }
    }
    let mut out: Vec<(NodeId, f64)> = next.into_iter().collect();
    out.sort_unstable_by_key(|&(v, _)| v);
    Ok(out)
}

/// One step of the walk.
pub fn walk_step(g: &Graph, dist: &WalkDistribution) -> Result<WalkDistribution> {
    Ok(WalkDistribution { step: dist.step + 1, entries: push(g, &dist.entries)? })
}

pub(crate) fn check_seeds(g: &Graph, seeds: &NodeSet) -> Result<()> {
    if seeds.is_empty() {
        return Err(Error::EmptySeedSet);
    }
    for v in seeds {
        if v >= g.node_count() {
            return Err(Error::NodeOutOfRange(v, g.node_count()));
        }
        if g.degree(v) == 0 {
            return Err(Error::ZeroDegreeSeed(v));
        }
    }
    Ok(())
}

/// The distributions `p_0, ..., p_horizon`.
pub fn walk_distributions(g: &Graph, seeds: &NodeSet, horizon: usize) -> Result<Vec<WalkDistribution>> {
    check_seeds(g, seeds)?;
    let mut out = Vec::with_capacity(horizon + 1);
    out.push(WalkDistribution::uniform(seeds));
    for _ in 0..horizon {
        let next = walk_step(g, out.last().unwrap())?;
        out.push(next);
    }
    Ok(out)
}

/// A point of the embedding space, `(p_1, ..., p_T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector(pub Vec<f64>);

impl EmbeddingVector {
    pub fn zeros(len: usize) -> Self {
        EmbeddingVector(vec![0.0; len])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn distance(&self, other: &EmbeddingVector) -> f64 {
        euclidean(&self.0, &other.0)
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Lexicographic comparison: the first differing coordinate decides.
/// Coordinates are compared on a grid of 2^-40, so values that differ only
/// by summation-order rounding count as equal and the next coordinate
/// decides.
pub fn lex_compare(u: &[f64], v: &[f64]) -> Result<Ordering> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch(u.len(), v.len()));
    }
    Ok(lex_cmp_unchecked(u, v))
}

/// Grid for [`lex_compare`].
pub const LEX_RESOLUTION: f64 = 1.0 / (1u64 << 40) as f64;

fn snap(x: f64) -> f64 {
    (x / LEX_RESOLUTION).round()
}

pub(crate) fn lex_cmp_unchecked(u: &[f64], v: &[f64]) -> Ordering {
    for (a, b) in u.iter().zip(v) {
        match snap(*a).partial_cmp(&snap(*b)) {
            Some(Ordering::Equal) | None => continue,
            Some(order) => return order,
        }
    }
    Ordering::Equal
}

/// Embedding of every node reached within the horizon.
#[derive(Debug, Clone)]
pub struct Embedding {
    horizon: usize,
    seeds: NodeSet,
    nodes: Vec<NodeId>,
    coords: Vec<f64>,
}

impl Embedding {
    fn from_distributions(seeds: NodeSet, dists: &[WalkDistribution]) -> Self {
        let horizon = dists.len() - 1;
        let nodes: NodeSet = dists[1..].iter().flat_map(|d| d.support()).collect();
        let nodes = nodes.as_slice().to_vec();
        let mut coords = vec![0.0; nodes.len() * horizon];
        for (t, dist) in dists[1..].iter().enumerate() {
            for &(v, mass) in dist.entries() {
                let row = nodes.binary_search(&v).expect("support node indexed");
                coords[row * horizon + t] = mass;
            }
        }
        Embedding { horizon, seeds, nodes, coords }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn seeds(&self) -> &NodeSet {
        &self.seeds
    }

    /// Number of embedded nodes (those with a nonzero vector).
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Embedded nodes in ascending order.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn get(&self, v: NodeId) -> Option<&[f64]> {
        self.nodes.binary_search(&v).ok().map(|row| self.row(row))
    }

    /// The vector of `v`, all zeros if `v` was never reached.
    pub fn vector(&self, v: NodeId) -> EmbeddingVector {
        match self.get(v) {
            Some(p) => EmbeddingVector(p.to_vec()),
            None => EmbeddingVector::zeros(self.horizon),
        }
    }

    /// `p_t(v)` for `1 <= t <= horizon`.
    pub fn coordinate(&self, v: NodeId, t: usize) -> f64 {
        assert!((1..=self.horizon).contains(&t), "time index out of range");
        self.get(v).map_or(0.0, |p| p[t - 1])
    }

    pub(crate) fn row(&self, row: usize) -> &[f64] {
        &self.coords[row * self.horizon..(row + 1) * self.horizon]
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &[f64])> + '_ {
        self.nodes.iter().enumerate().map(|(row, &v)| (v, self.row(row)))
    }
}

/// Embeds every node reached from `seeds` within `horizon` steps.
pub fn compute_embedding(g: &Graph, seeds: &NodeSet, horizon: usize) -> Result<Embedding> {
    if horizon == 0 {
        return Err(Error::ZeroHorizon);
    }
    let dists = walk_distributions(g, seeds, horizon)?;
    Ok(Embedding::from_distributions(seeds.clone(), &dists))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ids: &[NodeId]) -> NodeSet {
        ids.iter().copied().collect()
    }

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn self_loop_is_fixed_point() {
        let g = Graph::from_edges(1, [(0, 0)]).unwrap();
        let d = WalkDistribution::uniform(&set(&[0]));
        let next = walk_step(&g, &d).unwrap();
        assert_eq!(next.entries(), &[(0, 1.0)]);
        let emb = compute_embedding(&g, &set(&[0]), 2).unwrap();
        assert_eq!(emb.get(0).unwrap(), &[1.0, 1.0]);
    }

    #[test]
    fn path_steps() {
        let g = path3();
        let d1 = walk_step(&g, &WalkDistribution::uniform(&set(&[0]))).unwrap();
        assert_eq!(d1.entries(), &[(1, 1.0)]);
        let d2 = walk_step(&g, &d1).unwrap();
        assert_eq!(d2.entries(), &[(0, 0.5), (2, 0.5)]);
        assert_eq!(d2.step(), 2);
    }

    #[test]
    fn triangle_step() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let d = walk_step(&g, &WalkDistribution::uniform(&set(&[0]))).unwrap();
        assert_eq!(d.entries(), &[(1, 0.5), (2, 0.5)]);
    }

    #[test]
    fn path_embedding() {
        let emb = compute_embedding(&path3(), &set(&[0]), 2).unwrap();
        assert_eq!(emb.get(0).unwrap(), &[0.0, 0.5]);
        assert_eq!(emb.get(1).unwrap(), &[1.0, 0.0]);
        assert_eq!(emb.get(2).unwrap(), &[0.0, 0.5]);
        assert_eq!(emb.coordinate(2, 2), 0.5);
    }

    #[test]
    fn unreached_nodes_absent() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let emb = compute_embedding(&g, &set(&[0]), 2).unwrap();
        assert_eq!(emb.nodes(), &[0, 1, 2]);
        assert!(emb.get(4).is_none());
        assert_eq!(emb.vector(4), EmbeddingVector::zeros(2));
    }

    #[test]
    fn zero_degree_support_rejected() {
        let g = Graph::from_edges(2, [(0, 0)]).unwrap();
        let d = WalkDistribution::from_entries(0, [(1, 1.0)]);
        assert!(matches!(walk_step(&g, &d), Err(Error::ZeroDegreeNode(1))));
    }

    #[test]
    fn embedding_errors() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        assert!(matches!(compute_embedding(&g, &NodeSet::new(), 2), Err(Error::EmptySeedSet)));
        assert!(matches!(compute_embedding(&g, &set(&[2]), 2), Err(Error::ZeroDegreeSeed(2))));
        assert!(matches!(compute_embedding(&g, &set(&[0]), 0), Err(Error::ZeroHorizon)));
        assert!(matches!(compute_embedding(&g, &set(&[7]), 1), Err(Error::NodeOutOfRange(7, 3))));
    }

    #[test]
    fn lex_order() {
        assert_eq!(lex_compare(&[0.2, 0.1], &[0.1, 0.9]).unwrap(), Ordering::Greater);
        assert_eq!(lex_compare(&[0.2, 0.16], &[0.2, 0.04]).unwrap(), Ordering::Greater);
        assert_eq!(lex_compare(&[0.3, 0.5], &[0.3, 0.5]).unwrap(), Ordering::Equal);
        assert_eq!(lex_compare(&[0.0, 0.04], &[0.2, 0.0]).unwrap(), Ordering::Less);
        // one ulp apart in the first coordinate
        assert_eq!(
            lex_compare(&[0.018750000000000003, 0.017], &[0.018749999999999996, 0.019]).unwrap(),
            Ordering::Less
        );
        assert!(matches!(lex_compare(&[0.1], &[0.1, 0.2]), Err(Error::LengthMismatch(1, 2))));
    }

    #[test]
    fn from_entries_merges() {
        let d = WalkDistribution::from_entries(3, [(2, 0.25), (0, 0.5), (2, 0.25), (5, 0.0)]);
        assert_eq!(d.entries(), &[(0, 0.5), (2, 0.5)]);
        assert_eq!(d.total_mass(), 1.0);
    }
}
