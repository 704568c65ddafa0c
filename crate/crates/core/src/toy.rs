//! Two overlapping cliques: generator, closed-form embedding and
//! perturbation bounds.
//!
//! Node layout: `C1 \ C2` first, then `C1 ∩ C2`, then `C2 \ C1`, then the
//! isolated background nodes. With self-loops on every clique node the degree
//! of a node equals the total size of the cliques containing it, which makes
//! the closed forms below exact. Closed-form vectors include the `1/(a+b)`
//! seed normalization, so they equal the computed embedding.

use rand::seq::index;

use crate::embedding::EmbeddingVector;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, NodeSet};
use crate::sampling::trial_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwoCliqueSpec {
    /// `|C1|`
    pub n1: usize,
    /// `|C2|`
    pub n2: usize,
    /// `|C1 ∩ C2|`
    pub overlap: usize,
    pub with_self_loops: bool,
    /// Isolated nodes outside both cliques.
    pub n_background: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    FirstOnly,
    Both,
    SecondOnly,
    Background,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::FirstOnly => "c1_only",
            Region::Both => "c1_and_c2",
            Region::SecondOnly => "c2_only",
            Region::Background => "background",
        }
    }
}

impl TwoCliqueSpec {
    pub fn new(n1: usize, n2: usize, overlap: usize) -> Self {
        TwoCliqueSpec { n1, n2, overlap, with_self_loops: true, n_background: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.overlap == 0 {
            return Err(Error::invalid("cliques must overlap"));
        }
        if self.overlap > self.n1.min(self.n2) {
            return Err(Error::invalid("overlap larger than a clique"));
        }
        if self.n1 == self.overlap {
            return Err(Error::invalid("C1 \\ C2 must be non-empty"));
        }
        Ok(())
    }

    pub fn first_only(&self) -> usize {
        self.n1 - self.overlap
    }

    pub fn second_only(&self) -> usize {
        self.n2 - self.overlap
    }

    /// `|C1 ∪ C2|`
    pub fn union_size(&self) -> usize {
        self.n1 + self.n2 - self.overlap
    }

    pub fn node_count(&self) -> usize {
        self.union_size() + self.n_background
    }

    pub fn region(&self, v: NodeId) -> Region {
        if v < self.first_only() {
            Region::FirstOnly
        } else if v < self.n1 {
            Region::Both
        } else if v < self.union_size() {
            Region::SecondOnly
        } else {
            Region::Background
        }
    }

    pub fn region_nodes(&self, region: Region) -> NodeSet {
        let range = match region {
            Region::FirstOnly => 0..self.first_only(),
            Region::Both => self.first_only()..self.n1,
            Region::SecondOnly => self.n1..self.union_size(),
            Region::Background => self.union_size()..self.node_count(),
        };
        range.collect()
    }

    pub fn c1(&self) -> NodeSet {
        (0..self.n1).collect()
    }

    pub fn c2(&self) -> NodeSet {
        (self.first_only()..self.union_size()).collect()
    }

    fn in_c1(&self, v: NodeId) -> bool {
        v < self.n1
    }

    fn in_c2(&self, v: NodeId) -> bool {
        v >= self.first_only() && v < self.union_size()
    }

    /// `α1 = |C1 \ C2| / |C1|`
    pub fn alpha1(&self) -> f64 {
        self.first_only() as f64 / self.n1 as f64
    }

    /// `α2 = |C2 \ C1| / |C2|`
    pub fn alpha2(&self) -> f64 {
        self.second_only() as f64 / self.n2 as f64
    }

    /// `β = |C1 ∩ C2| / |C1 ∪ C2|`
    pub fn beta(&self) -> f64 {
        self.overlap as f64 / self.union_size() as f64
    }
}

#[derive(Debug, Clone)]
pub struct ToyGraph {
    pub spec: TwoCliqueSpec,
    pub graph: Graph,
    pub regions: Vec<Region>,
}

pub fn generate_two_cliques(spec: &TwoCliqueSpec) -> Result<ToyGraph> {
    spec.validate()?;
    let mut edges = Vec::new();
    let union = spec.union_size();
    for u in 0..union {
        if spec.with_self_loops {
            edges.push((u, u));
        }
        for v in u + 1..union {
            if (spec.in_c1(u) && spec.in_c1(v)) || (spec.in_c2(u) && spec.in_c2(v)) {
                edges.push((u, v));
            }
        }
    }
    let graph = Graph::from_edges(spec.node_count(), edges)?;
    let regions = (0..spec.node_count()).map(|v| spec.region(v)).collect();
    Ok(ToyGraph { spec: *spec, graph, regions })
}

/// Seed counts per region: `a` in `C1 \ C2`, `b` in `C1 ∩ C2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedSplit {
    pub a: usize,
    pub b: usize,
}

impl SeedSplit {
    pub fn validate(&self, spec: &TwoCliqueSpec) -> Result<()> {
        spec.validate()?;
        if self.a + self.b == 0 {
            return Err(Error::invalid("seed split must contain at least one seed"));
        }
        if self.a > spec.first_only() || self.b > spec.overlap {
            return Err(Error::invalid("seed split exceeds region sizes"));
        }
        Ok(())
    }

    /// The first `a` nodes of `C1 \ C2` and the first `b` of `C1 ∩ C2`.
    pub fn seeds(&self, spec: &TwoCliqueSpec) -> NodeSet {
        let first = spec.first_only();
        (0..self.a).chain(first..first + self.b).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToyEmbedding {
    /// Vector of every node of `C1 ∩ C2`.
    pub vec_12: EmbeddingVector,
    /// Vector of every node of `C1 \ C2`.
    pub vec_1not2: EmbeddingVector,
    /// Vector of every node of `C2 \ C1`.
    pub vec_2not1: EmbeddingVector,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
}

impl ToyEmbedding {
    pub fn vector(&self, region: Region) -> Option<&EmbeddingVector> {
        match region {
            Region::FirstOnly => Some(&self.vec_1not2),
            Region::Both => Some(&self.vec_12),
            Region::SecondOnly => Some(&self.vec_2not1),
            Region::Background => None,
        }
    }
}

fn mix(a: f64, x: [f64; 2], b: f64, y: [f64; 2]) -> EmbeddingVector {
    let total = a + b;
    EmbeddingVector(vec![(a * x[0] + b * y[0]) / total, (a * x[1] + b * y[1]) / total])
}

/// Exact `T = 2` embedding of the self-loop two-clique graph.
pub fn closed_form_embedding(spec: &TwoCliqueSpec, split: &SeedSplit) -> Result<ToyEmbedding> {
    spec.validate()?;
    split.validate(spec)?;
    if !spec.with_self_loops {
        return Err(Error::invalid("closed forms require self-loops on clique nodes"));
    }
    let (alpha1, alpha2, beta) = (spec.alpha1(), spec.alpha2(), spec.beta());
    let n1 = spec.n1 as f64;
    let nu = spec.union_size() as f64;

    // single seed in C1 \ C2
    let p1 = [1.0 / n1, (alpha1 + beta) / n1];
    let p2 = [0.0, beta / n1];
    // single seed in C1 ∩ C2
    let pa = [1.0 / nu, (alpha1 + alpha2 + beta) / nu];
    let pb = [1.0 / nu, (alpha1 + beta) / nu];
    let pc = [1.0 / nu, (alpha2 + beta) / nu];

    let (a, b) = (split.a as f64, split.b as f64);
    Ok(ToyEmbedding {
        vec_12: mix(a, p1, b, pa),
        vec_1not2: mix(a, p1, b, pb),
        vec_2not1: mix(a, p2, b, pc),
        alpha1,
        alpha2,
        beta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationDistances {
    /// `‖p_{1\2} − p_{1∩2}‖`
    pub d1: f64,
    /// `min(‖p_{2\1} − p_{1\2}‖, ‖p_{2\1} − p_{1∩2}‖)`
    pub d2_exact: f64,
    /// Additive upper bound on `d2_exact` obtained from the triangle
    /// inequality, normalized by `a + b`.
    pub d2_bound: f64,
}

pub fn separation_distances(spec: &TwoCliqueSpec, split: &SeedSplit) -> Result<SeparationDistances> {
    let toy = closed_form_embedding(spec, split)?;
    Ok(distances_of(spec, split, &toy))
}

pub(crate) fn distances_of(spec: &TwoCliqueSpec, split: &SeedSplit, toy: &ToyEmbedding) -> SeparationDistances {
    let d1 = toy.vec_1not2.distance(&toy.vec_12);
    let d2_exact = toy.vec_2not1.distance(&toy.vec_1not2).min(toy.vec_2not1.distance(&toy.vec_12));
    let (a, b) = (split.a as f64, split.b as f64);
    let d2_bound = (a / spec.n1 as f64 * (1.0 + toy.alpha1 * toy.alpha1).sqrt()
        + b / spec.union_size() as f64 * (toy.alpha1 - toy.alpha2).abs())
        / (a + b);
    SeparationDistances { d1, d2_exact, d2_bound }
}

/// Removes `k` distinct intra-clique edges (self-loops excluded), chosen
/// uniformly from stream 0 of `rng_seed`.
pub fn perturb_remove_edges(g: &Graph, spec: &TwoCliqueSpec, k: usize, rng_seed: u64) -> Result<Graph> {
    spec.validate()?;
    let removable: Vec<(NodeId, NodeId)> = g
        .edges()
        .filter(|&(u, v)| u != v && ((spec.in_c1(u) && spec.in_c1(v)) || (spec.in_c2(u) && spec.in_c2(v))))
        .collect();
    if k > removable.len() {
        return Err(Error::invalid(format!(
            "cannot remove {k} edges, only {} intra-clique edges exist",
            removable.len()
        )));
    }
    let mut rng = trial_rng(rng_seed, 0);
    let mut drop = vec![false; removable.len()];
    for i in index::sample(&mut rng, removable.len(), k) {
        drop[i] = true;
    }
    let dropped: std::collections::HashSet<(NodeId, NodeId)> =
        removable.iter().zip(&drop).filter(|(_, &d)| d).map(|(&e, _)| e).collect();
    let out = g.with_edges(g.edges().filter(|e| !dropped.contains(e)))?;
    if let Some(v) = (0..spec.union_size()).find(|&v| out.degree(v) == 0) {
        return Err(Error::invalid(format!("removing {k} edges isolates node {v}")));
    }
    Ok(out)
}

/// Adds `l` distinct edges between clique nodes and background nodes, chosen
/// uniformly from stream 0 of `rng_seed`.
pub fn perturb_add_external(g: &Graph, spec: &TwoCliqueSpec, l: usize, rng_seed: u64) -> Result<Graph> {
    spec.validate()?;
    if spec.n_background == 0 {
        return Err(Error::invalid("external links need background nodes"));
    }
    let background: Vec<NodeId> = spec.region_nodes(Region::Background).iter().collect();
    let pairs: Vec<(NodeId, NodeId)> = (0..spec.union_size())
        .flat_map(|u| background.iter().map(move |&w| (u, w)))
        .filter(|&(u, w)| !g.has_edge(u, w))
        .collect();
    if l > pairs.len() {
        return Err(Error::invalid(format!("cannot add {l} external edges, only {} pairs free", pairs.len())));
    }
    let mut rng = trial_rng(rng_seed, 0);
    let added: Vec<(NodeId, NodeId)> = index::sample(&mut rng, pairs.len(), l).into_iter().map(|i| pairs[i]).collect();
    g.with_edges(g.edges().chain(added))
}

/// Worst-case perturbation bounds after removing `k` intra-clique edges, for
/// seeds in `C1 \ C2`.
///
/// Values are in the unnormalized scale where every seed carries unit mass;
/// divide by `|S|` for embedding units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemovalBounds {
    pub k: usize,
    pub eps1a_max: f64,
    pub eps2a: f64,
    pub eps2b_max: f64,
    /// `|S| / |C1| · sqrt(1 + α1²)`, the norm every `ε(v)` must stay below.
    pub d2: f64,
}

/// Worst-case perturbation bounds after adding `l` links to the background,
/// for seeds in `C1 \ C2`. Same unnormalized scale as [`RemovalBounds`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExternalBounds {
    pub l: usize,
    pub eps1_in_max: f64,
    pub eps1_out_max: f64,
    pub eps2_in: f64,
    pub eps2_out_max: f64,
    /// `|S| / |C1| · sqrt(1 + α1²)`
    pub d2: f64,
    /// Smallest second coordinate among the three region vectors.
    pub min_second_coordinate: f64,
}

impl ExternalBounds {
    /// Level that background second coordinates must stay below for a linking
    /// distance `d`.
    pub fn outside_threshold(&self, d: f64) -> f64 {
        self.min_second_coordinate - d
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PerturbationBounds {
    Removed(RemovalBounds),
    External(ExternalBounds),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbationMode {
    Removed,
    External,
}

pub fn perturbation_bounds(
    spec: &TwoCliqueSpec,
    seed_count: usize,
    count: usize,
    mode: PerturbationMode,
) -> Result<PerturbationBounds> {
    spec.validate()?;
    let s = seed_count as f64;
    let n1 = spec.n1 as f64;
    let nu = spec.union_size() as f64;
    let only1 = spec.first_only() as f64;
    let both = spec.overlap as f64;
    let c = count as f64;
    let alpha1 = spec.alpha1();
    let d2 = s / n1 * (1.0 + alpha1 * alpha1).sqrt();

    match mode {
        PerturbationMode::Removed => {
            if count >= spec.n1 || count >= spec.union_size() {
                return Err(Error::invalid(format!("k = {count} must be below |C1| = {}", spec.n1)));
            }
            let eps1a_max = c * s / (n1 * (n1 - c));
            let eps2a = s
                * (only1 * (1.0 / ((n1 - c) * (n1 - c)) - 1.0 / (n1 * n1))
                    + both * (1.0 / ((n1 - c) * (nu - c)) - 1.0 / (n1 * nu)));
            let eps2b_max = c / (n1 * n1);
            Ok(PerturbationBounds::Removed(RemovalBounds { k: count, eps1a_max, eps2a, eps2b_max, d2 }))
        }
        PerturbationMode::External => {
            let eps1_in_max = c * s / (n1 * (n1 + c));
            let eps1_out_max = c / n1;
            let eps2_in = s
                * (only1 * (1.0 / (n1 * n1) - 1.0 / ((n1 + c) * (n1 + c)))
                    + both * (1.0 / (n1 * nu) - 1.0 / ((n1 + c) * (nu + c))));
            let eps2_out_max = c / (n1 * n1);
            // a = |S| seeds in C1 \ C2, b = 0, in the same unit-mass scale
            let beta = spec.beta();
            let second = [(alpha1 + beta) / n1, (alpha1 + beta) / n1, beta / n1];
            let min_second_coordinate = s * second.into_iter().fold(f64::INFINITY, f64::min);
            Ok(PerturbationBounds::External(ExternalBounds {
                l: count,
                eps1_in_max,
                eps1_out_max,
                eps2_in,
                eps2_out_max,
                d2,
                min_second_coordinate,
            }))
        }
    }
}
