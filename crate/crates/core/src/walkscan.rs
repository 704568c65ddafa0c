//! WalkSCAN: density clustering of the random-walk embedding.
//!
//! Embedded nodes closer than `d` are linked; connected components with at
//! least two nodes are cores, the remaining nodes are outliers. Each core is
//! extended with the outliers adjacent to it in the original graph, and the
//! resulting communities are returned by decreasing (lexicographic) mean
//! embedding.

use std::collections::HashMap;

use petgraph::unionfind::UnionFind;

use crate::embedding::{compute_embedding, euclidean, lex_cmp_unchecked, Embedding, EmbeddingVector};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, NodeSet};
use crate::metrics::f1_score;

pub const DEFAULT_HORIZON: usize = 2;
pub const DEFAULT_EXPERT_K: usize = 2;
/// Smallest component kept as a core.
pub const MIN_CORE_SIZE: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkscanParams {
    pub horizon: usize,
    /// Linking distance in the embedding space.
    pub distance: f64,
    /// Score `Ĉ ∪ S` rather than `Ĉ` when evaluating against a target.
    pub include_seeds: bool,
}

impl WalkscanParams {
    pub fn new(distance: f64) -> Self {
        WalkscanParams { horizon: DEFAULT_HORIZON, distance, include_seeds: true }
    }

    pub fn validate(&self) -> Result<()> {
        if self.distance.is_nan() || self.distance <= 0.0 || self.distance.is_infinite() {
            return Err(Error::invalid(format!("distance {} must be positive", self.distance)));
        }
        if self.horizon == 0 {
            return Err(Error::ZeroHorizon);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClusterResult {
    pub cores: Vec<NodeSet>,
    pub outliers: NodeSet,
}

/// Groups of indices into `points` whose members are chained by links of
/// length at most `distance`, in order of their smallest index.
///
/// Candidate pairs come from a uniform grid, comparing each point against the
/// `3^dim` cells around it. The cell side is `distance` plus a relative slack
/// of 1e-9 so that floating-point rounding in the cell index can never push
/// two linked points more than one cell apart.
pub fn link_components(points: &[&[f64]], distance: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    if n == 0 {
        return Vec::new();
    }
    let dim = points[0].len();
    let side = distance * (1.0 + 1e-9);
    let cell_of = |p: &[f64]| -> Vec<i64> { p.iter().map(|&x| (x / side).floor() as i64).collect() };

    let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        grid.entry(cell_of(p)).or_default().push(i);
    }

    let offsets: Vec<Vec<i64>> = (0..3usize.pow(dim as u32))
        .map(|mut code| {
            (0..dim)
                .map(|_| {
                    let o = (code % 3) as i64 - 1;
                    code /= 3;
                    o
                })
                .collect()
        })
        .collect();

    let mut uf = UnionFind::<usize>::new(n);
    let mut neighbor = vec![0i64; dim];
    for (cell, members) in &grid {
        for offset in &offsets {
            for k in 0..dim {
                neighbor[k] = cell[k] + offset[k];
            }
            // each unordered pair of cells is visited from the smaller key
            if neighbor.as_slice() < cell.as_slice() {
                continue;
            }
            let Some(others) = grid.get(&neighbor) else { continue };
            let same = neighbor.as_slice() == cell.as_slice();
            for (a, &i) in members.iter().enumerate() {
                let candidates = if same { &others[a + 1..] } else { &others[..] };
                for &j in candidates {
                    if euclidean(points[i], points[j]) <= distance {
                        uf.union(i, j);
                    }
                }
            }
        }
    }

    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..n {
        groups.entry(uf.find(i)).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort_unstable_by_key(|g| g[0]);
    out
}

/// Splits the embedded nodes into cores (linked components of size >= 2) and
/// outliers.
pub fn cluster_points(emb: &Embedding, distance: f64) -> Result<ClusterResult> {
    if distance.is_nan() || distance <= 0.0 {
        return Err(Error::invalid(format!("distance {distance} must be positive")));
    }
    let points: Vec<&[f64]> = emb.iter().map(|(_, p)| p).collect();
    let nodes = emb.nodes();
    let mut result = ClusterResult::default();
    let mut outliers = Vec::new();
    for group in link_components(&points, distance) {
        if group.len() >= MIN_CORE_SIZE {
            result.cores.push(group.into_iter().map(|i| nodes[i]).collect());
        } else {
            outliers.push(nodes[group[0]]);
        }
    }
    result.outliers = outliers.into_iter().collect();
    Ok(result)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Community {
    pub members: NodeSet,
    /// Mean embedding of the members.
    pub mean: EmbeddingVector,
}

/// Communities in decreasing lexicographic order of their mean embedding.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CommunityList(pub Vec<Community>);

impl CommunityList {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Community> {
        self.0.iter()
    }

    pub fn get(&self, i: usize) -> Option<&Community> {
        self.0.get(i)
    }
}

fn mean_vector(emb: &Embedding, members: &NodeSet) -> EmbeddingVector {
    let mut sum = vec![0.0; emb.horizon()];
    for v in members {
        if let Some(p) = emb.get(v) {
            for (s, x) in sum.iter_mut().zip(p) {
                *s += x;
            }
        }
    }
    let n = members.len() as f64;
    EmbeddingVector(sum.into_iter().map(|s| s / n).collect())
}

/// Attaches each outlier to every core it touches in `g`, then orders the
/// communities by decreasing mean (ties by smallest member id).
pub fn build_communities(g: &Graph, emb: &Embedding, clusters: &ClusterResult) -> CommunityList {
    let core_of: HashMap<NodeId, usize> =
        clusters.cores.iter().enumerate().flat_map(|(j, core)| core.iter().map(move |v| (v, j))).collect();

    let mut attached: Vec<Vec<NodeId>> = vec![Vec::new(); clusters.cores.len()];
    for o in &clusters.outliers {
        let mut touched: Vec<usize> = g.neighbors(o).iter().filter_map(|w| core_of.get(w).copied()).collect();
        touched.sort_unstable();
        touched.dedup();
        for j in touched {
            attached[j].push(o);
        }
    }

    let mut list: Vec<Community> = clusters
        .cores
        .iter()
        .zip(attached)
        .map(|(core, extra)| {
            let members = core.union(&extra.into_iter().collect());
            let mean = mean_vector(emb, &members);
            Community { members, mean }
        })
        .collect();
    list.sort_by(|a, b| {
        lex_cmp_unchecked(b.mean.as_slice(), a.mean.as_slice()).then(a.members.first().cmp(&b.members.first()))
    });
    CommunityList(list)
}

/// Embeds, clusters and orders. An empty list means no core was found.
pub fn walkscan(g: &Graph, seeds: &NodeSet, params: &WalkscanParams) -> Result<CommunityList> {
    params.validate()?;
    let emb = compute_embedding(g, seeds, params.horizon)?;
    let clusters = cluster_points(&emb, params.distance)?;
    Ok(build_communities(g, &emb, &clusters))
}

/// Which communities produced the best score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    /// No community was available; the seed set itself was scored.
    Seeds,
    Single(usize),
    Merged(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub f1: f64,
    pub selection: Selection,
}

fn candidate(members: &NodeSet, seeds: &NodeSet, include_seeds: bool) -> NodeSet {
    if include_seeds {
        members.union(seeds)
    } else {
        members.clone()
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::invalid("expert K must be at least 1"));
    }
    Ok(())
}

/// Best F1 among the first `k` communities (first wins on ties). With no
/// communities the seed set is scored.
pub fn evaluate_expert(
    comms: &CommunityList,
    target: &NodeSet,
    k: usize,
    seeds: &NodeSet,
    include_seeds: bool,
) -> Result<Evaluation> {
    check_k(k)?;
    if comms.is_empty() {
        return Ok(Evaluation { f1: f1_score(seeds, target)?.f1, selection: Selection::Seeds });
    }
    let mut best: Option<Evaluation> = None;
    for (j, c) in comms.iter().take(k).enumerate() {
        let f1 = f1_score(&candidate(&c.members, seeds, include_seeds), target)?.f1;
        if best.is_none_or(|b| f1 > b.f1) {
            best = Some(Evaluation { f1, selection: Selection::Single(j) });
        }
    }
    Ok(best.unwrap())
}

/// Plain WalkSCAN score: the first community only.
pub fn evaluate_first(
    comms: &CommunityList,
    target: &NodeSet,
    seeds: &NodeSet,
    include_seeds: bool,
) -> Result<Evaluation> {
    evaluate_expert(comms, target, 1, seeds, include_seeds)
}

/// Like [`evaluate_expert`], additionally allowing the union of any two of
/// the first `k` communities.
pub fn evaluate_merge(
    comms: &CommunityList,
    target: &NodeSet,
    k: usize,
    seeds: &NodeSet,
    include_seeds: bool,
) -> Result<Evaluation> {
    let mut best = evaluate_expert(comms, target, k, seeds, include_seeds)?;
    let firsts: Vec<&Community> = comms.iter().take(k).collect();
    for i in 0..firsts.len() {
        for j in i + 1..firsts.len() {
            let merged = firsts[i].members.union(&firsts[j].members);
            let f1 = f1_score(&candidate(&merged, seeds, include_seeds), target)?.f1;
            if f1 > best.f1 {
                best = Evaluation { f1, selection: Selection::Merged(i, j) };
            }
        }
    }
    Ok(best)
}

/// Union of every community.
pub fn union_all(comms: &CommunityList) -> NodeSet {
    comms.iter().fold(NodeSet::new(), |acc, c| acc.union(&c.members))
}
