//! Slow, obviously-correct reference implementations.
//!
//! Nothing here shares code with the algorithms under test beyond the graph
//! type used to describe the input: walks are dense matrix-vector products,
//! sweeps evaluate every prefix from scratch, and clustering compares every
//! pair of points.

#![allow(clippy::needless_range_loop)]

use std::collections::HashSet;

use rand::Rng;
use walkscan::{Graph, NodeId, NodeSet};

/// Row-stochastic transition matrix `P[u][v] = A[u][v] / d(u)`.
pub fn transition_matrix(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let mut adjacency = vec![vec![0.0; n]; n];
    for u in 0..n {
        for v in 0..n {
            if g.has_edge(u, v) {
                adjacency[u][v] = 1.0;
            }
        }
    }
    adjacency
        .into_iter()
        .map(|row| {
            let degree: f64 = row.iter().sum();
            row.into_iter().map(|a| if degree > 0.0 { a / degree } else { 0.0 }).collect()
        })
        .collect()
}

/// `x P`
fn step(p: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n).map(|v| (0..n).map(|u| p[u][v] * x[u]).sum()).collect()
}

/// Dense walk distributions `p_0, ..., p_horizon`.
pub fn dense_walk(g: &Graph, seeds: &[NodeId], horizon: usize) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let p = transition_matrix(g);
    let mut x = vec![0.0; n];
    for &s in seeds {
        x[s] = 1.0 / seeds.len() as f64;
    }
    let mut out = vec![x.clone()];
    for _ in 0..horizon {
        x = step(&p, &x);
        out.push(x.clone());
    }
    out
}

/// Dense damped recursion `r <- (1 - alpha) r_0 + alpha r P`, `horizon` times.
pub fn dense_pagerank(g: &Graph, seeds: &[NodeId], alpha: f64, horizon: usize) -> Vec<f64> {
    let n = g.node_count();
    let p = transition_matrix(g);
    let mut r0 = vec![0.0; n];
    for &s in seeds {
        r0[s] = 1.0 / seeds.len() as f64;
    }
    let mut r = r0.clone();
    for _ in 0..horizon {
        let pushed = step(&p, &r);
        r = (0..n).map(|v| (1.0 - alpha) * r0[v] + alpha * pushed[v]).collect();
    }
    r
}

/// Conductance from scratch; `None` when a side of the cut has zero volume.
pub fn scratch_conductance(g: &Graph, members: &HashSet<NodeId>) -> Option<f64> {
    let mut cut = 0usize;
    let mut volume = 0usize;
    let mut total = 0usize;
    for u in 0..g.node_count() {
        total += g.degree(u);
        if members.contains(&u) {
            volume += g.degree(u);
            for &w in g.neighbors(u) {
                if !members.contains(&w) {
                    cut += 1;
                }
            }
        }
    }
    let denominator = volume.min(total - volume);
    (denominator > 0).then(|| cut as f64 / denominator as f64)
}

/// Evaluates every prefix `S ∪ {v_1..v_k}`, `k >= 1`, and returns the
/// smallest `k` with the lowest conductance (degenerate sets rank last),
/// together with the resulting set. An empty ranking returns `(0, S)`.
pub fn brute_force_sweep(g: &Graph, seeds: &NodeSet, ranked: &[NodeId]) -> (usize, NodeSet) {
    let mut best: Option<(usize, f64)> = None;
    for k in 1..=ranked.len() {
        let members: HashSet<NodeId> = seeds.iter().chain(ranked[..k].iter().copied()).collect();
        let score = match scratch_conductance(g, &members) {
            Some(c) => -c,
            None => f64::NEG_INFINITY,
        };
        if best.is_none() || score > best.unwrap().1 {
            best = Some((k, score));
        }
    }
    match best {
        None => (0, seeds.clone()),
        Some((k, _)) => (k, seeds.iter().chain(ranked[..k].iter().copied()).collect()),
    }
}

/// Connected components of the `distance`-threshold graph over `points`,
/// comparing all pairs. Components are listed by smallest index.
pub fn brute_force_components(points: &[Vec<f64>], distance: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            let d2: f64 = points[i].iter().zip(&points[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2.sqrt() <= distance {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(i);
    }
    groups
}

/// Erdős–Rényi graph with edge probability `p` and optional self-loops.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64, loop_p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        if rng.random::<f64>() < loop_p {
            edges.push((u, u));
        }
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).expect("ids in range")
}

/// Connected random graph: a random spanning tree plus `extra` random edges.
pub fn random_connected_graph<R: Rng>(rng: &mut R, n: usize, extra: usize) -> Graph {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.random_range(0..v), v));
    }
    for _ in 0..extra {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        edges.push((u, v));
    }
    Graph::from_edges(n, edges).expect("ids in range")
}

/// Uniform random non-empty subset of the positive-degree nodes.
pub fn random_seeds<R: Rng>(rng: &mut R, g: &Graph, max_size: usize) -> Vec<NodeId> {
    let pool: Vec<NodeId> = (0..g.node_count()).filter(|&v| g.degree(v) > 0).collect();
    assert!(!pool.is_empty(), "graph has no positive-degree node");
    let size = rng.random_range(1..=max_size.min(pool.len()));
    let mut picked: Vec<NodeId> =
        rand::seq::index::sample(rng, pool.len(), size).into_iter().map(|i| pool[i]).collect();
    picked.sort_unstable();
    picked
}

/// Clique edges over `nodes`, optionally with self-loops.
pub fn clique(nodes: impl IntoIterator<Item = NodeId>, loops: bool) -> Vec<(NodeId, NodeId)> {
    let nodes: Vec<NodeId> = nodes.into_iter().collect();
    let mut edges = Vec::new();
    for (i, &u) in nodes.iter().enumerate() {
        if loops {
            edges.push((u, u));
        }
        for &v in &nodes[i + 1..] {
            edges.push((u, v));
        }
    }
    edges
}
