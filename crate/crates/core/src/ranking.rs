//! PageRank-family rankings and the sweep.
//!
//! Personalized PageRank with horizon `T` is a fixed linear combination of the
//! walk embedding coordinates, so it ranks nodes by their position along one
//! direction of the embedding space. LexRank replaces that direction with the
//! lexicographic order. Both feed the same sweep, which returns the best
//! prefix of the ranking under an objective (conductance by default).

use std::cmp::Ordering;
use std::collections::HashSet;

use rayon::prelude::*;

use crate::embedding::{self, compute_embedding, lex_cmp_unchecked, push, Embedding};
use crate::error::{Error, Result};
use crate::graph::{CommunitySet, Graph, NodeId, NodeSet};
use crate::metrics::{f1_from_counts, Conductance};
use crate::sampling::{sample_seeds, trial_rng};

pub const DEFAULT_ALPHA: f64 = 0.85;
pub const DEFAULT_HORIZON: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankParams {
    /// Damping factor, in (0, 1).
    pub alpha: f64,
    pub horizon: usize,
    /// Rank by `r_T(v) / d(v)` instead of `r_T(v)`.
    pub degree_normalized: bool,
}

impl Default for PageRankParams {
    fn default() -> Self {
        PageRankParams { alpha: DEFAULT_ALPHA, horizon: DEFAULT_HORIZON, degree_normalized: false }
    }
}

impl PageRankParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid(format!("damping factor {} not in (0, 1)", self.alpha)));
        }
        if self.horizon == 0 {
            return Err(Error::ZeroHorizon);
        }
        Ok(())
    }
}

/// PageRank values of the nodes reached from a seed set. Absent nodes score 0.
#[derive(Debug, Clone)]
pub struct ScoreTable {
    seeds: NodeSet,
    params: PageRankParams,
    /// `r_T(v)`, sorted by node.
    raw: Vec<(NodeId, f64)>,
    /// Ranking score: `r_T(v)`, or `r_T(v) / d(v)` when degree-normalized.
    scores: Vec<(NodeId, f64)>,
}

fn lookup(entries: &[(NodeId, f64)], v: NodeId) -> f64 {
    entries.binary_search_by_key(&v, |&(u, _)| u).map(|i| entries[i].1).unwrap_or(0.0)
}

impl ScoreTable {
    pub fn seeds(&self) -> &NodeSet {
        &self.seeds
    }

    pub fn params(&self) -> &PageRankParams {
        &self.params
    }

    pub fn score(&self, v: NodeId) -> f64 {
        lookup(&self.scores, v)
    }

    pub fn raw(&self, v: NodeId) -> f64 {
        lookup(&self.raw, v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.scores.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Sum of the raw PageRank values.
    pub fn total_mass(&self) -> f64 {
        self.raw.iter().map(|&(_, r)| r).sum()
    }
}

/// `T` iterations of `r <- (1 - alpha) r_0 + alpha P r` from `r_0 = 1_S / |S|`.
pub fn pagerank_scores(g: &Graph, seeds: &NodeSet, params: &PageRankParams) -> Result<ScoreTable> {
    params.validate()?;
    embedding::check_seeds(g, seeds)?;
    let restart = 1.0 - params.alpha;
    let r0: Vec<(NodeId, f64)> = embedding::WalkDistribution::uniform(seeds).entries().to_vec();
    let mut r = r0.clone();
    for _ in 0..params.horizon {
        let pushed = push(g, &r)?;
        r = merge_scaled(&r0, restart, &pushed, params.alpha);
    }
    let scores = if params.degree_normalized {
        r.iter().map(|&(v, x)| (v, x / g.degree(v) as f64)).collect()
    } else {
        r.clone()
    };
    Ok(ScoreTable { seeds: seeds.clone(), params: *params, raw: r, scores })
}

/// `a * x + b * y` over two sorted sparse vectors.
fn merge_scaled(x: &[(NodeId, f64)], a: f64, y: &[(NodeId, f64)], b: f64) -> Vec<(NodeId, f64)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let next = match (x.get(i), y.get(j)) {
            (Some(&(u, xu)), Some(&(w, yw))) => match u.cmp(&w) {
                Ordering::Less => {
                    i += 1;
                    (u, a * xu)
                }
                Ordering::Greater => {
                    j += 1;
                    (w, b * yw)
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (u, a * xu + b * yw)
                }
            },
            (Some(&(u, xu)), None) => {
                i += 1;
                (u, a * xu)
            }
            (None, Some(&(w, yw))) => {
                j += 1;
                (w, b * yw)
            }
            (None, None) => unreachable!(),
        };
        out.push(next);
    }
    out
}

/// PageRank read directly off the embedding:
/// `r_T(v) = sum_{t<T} (1 - alpha) alpha^t p_t(v) + alpha^T p_T(v)`.
///
/// `p_0` vanishes outside the seed set; for seeds it is `1 / |S|`, which makes
/// the same sum equal the recursion value there too. The table is never
/// degree-normalized (the embedding carries no degrees).
pub fn pagerank_from_embedding(emb: &Embedding, seeds: &NodeSet, alpha: f64) -> Result<ScoreTable> {
    let params = PageRankParams { alpha, horizon: emb.horizon(), degree_normalized: false };
    params.validate()?;
    if emb.seeds() != seeds {
        return Err(Error::SeedMismatch);
    }
    let horizon = emb.horizon();
    let weights: Vec<f64> = (1..=horizon)
        .map(|t| {
            let damp = alpha.powi(t as i32);
            if t < horizon {
                (1.0 - alpha) * damp
            } else {
                damp
            }
        })
        .collect();
    let seed_term = (1.0 - alpha) / seeds.len() as f64;

    let mut entries: Vec<(NodeId, f64)> = emb
        .iter()
        .map(|(v, p)| {
            let mut r: f64 = p.iter().zip(&weights).map(|(x, w)| x * w).sum();
            if seeds.contains(v) {
                r += seed_term;
            }
            (v, r)
        })
        .collect();
    for v in seeds {
        if emb.get(v).is_none() {
            entries.push((v, seed_term));
        }
    }
    entries.sort_unstable_by_key(|&(v, _)| v);
    Ok(ScoreTable { seeds: seeds.clone(), params, raw: entries.clone(), scores: entries })
}

/// Non-seed nodes in decreasing order of preference.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RankedList(pub Vec<NodeId>);

impl RankedList {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.0
    }
}

/// Decreasing score, ties by ascending node id. Seeds and zero scores are left out.
pub fn rank_by_score(scores: &ScoreTable) -> RankedList {
    let mut ranked: Vec<(NodeId, f64)> =
        scores.iter().filter(|&(v, s)| s > 0.0 && !scores.seeds().contains(v)).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    RankedList(ranked.into_iter().map(|(v, _)| v).collect())
}

/// Decreasing lexicographic order of the embedding, ties by ascending node id.
pub fn rank_lexicographic(emb: &Embedding) -> RankedList {
    let mut ranked: Vec<(NodeId, &[f64])> = emb.iter().filter(|&(v, _)| !emb.seeds().contains(v)).collect();
    ranked.sort_by(|a, b| lex_cmp_unchecked(b.1, a.1).then(a.0.cmp(&b.0)));
    RankedList(ranked.into_iter().map(|(v, _)| v).collect())
}

/// Score of a growing node set; higher is better.
pub trait SweepObjective {
    /// Starts over from the seed set.
    fn reset(&mut self, g: &Graph, seeds: &NodeSet);
    /// Adds `v` (not yet in the set) and returns the score of the enlarged set.
    fn extend(&mut self, g: &Graph, v: NodeId) -> f64;
}

/// Negated conductance, updated incrementally in `O(d(v))` per added node.
/// Sets with a zero-volume side score negative infinity.
#[derive(Debug, Default)]
pub struct ConductanceObjective {
    members: HashSet<NodeId>,
    cut: usize,
    volume: usize,
}

impl ConductanceObjective {
    pub fn new() -> Self {
        Self::default()
    }

    fn add(&mut self, g: &Graph, v: NodeId) {
        debug_assert!(!self.members.contains(&v));
        self.volume += g.degree(v);
        for &w in g.neighbors(v) {
            if w == v {
                continue;
            }
            if self.members.contains(&w) {
                self.cut -= 1;
            } else {
                self.cut += 1;
            }
        }
        self.members.insert(v);
    }

    pub fn current(&self, g: &Graph) -> Conductance {
        Conductance::from_counts(self.cut, self.volume, g.volume())
    }
}

impl SweepObjective for ConductanceObjective {
    fn reset(&mut self, g: &Graph, seeds: &NodeSet) {
        self.members.clear();
        self.cut = 0;
        self.volume = 0;
        for v in seeds {
            self.add(g, v);
        }
    }

    fn extend(&mut self, g: &Graph, v: NodeId) -> f64 {
        self.add(g, v);
        let c = self.current(g);
        if c.degenerate {
            f64::NEG_INFINITY
        } else {
            -c.value
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub community: NodeSet,
    /// Length of the chosen prefix (0 only for an empty ranking).
    pub prefix_len: usize,
    pub score: f64,
}

/// Returns `S ∪ {v_1..v_k}` for the `k` maximizing the objective, smallest `k`
/// on ties.
pub fn sweep_with<O: SweepObjective>(
    g: &Graph,
    seeds: &NodeSet,
    ranked: &RankedList,
    objective: &mut O,
) -> SweepOutcome {
    objective.reset(g, seeds);
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in ranked.as_slice().iter().enumerate() {
        let score = objective.extend(g, v);
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((i + 1, score));
        }
    }
    match best {
        None => SweepOutcome { community: seeds.clone(), prefix_len: 0, score: f64::NEG_INFINITY },
        Some((k, score)) => SweepOutcome {
            community: seeds.union(&ranked.as_slice()[..k].iter().copied().collect()),
            prefix_len: k,
            score,
        },
    }
}

/// Conductance sweep.
pub fn sweep(g: &Graph, seeds: &NodeSet, ranked: &RankedList) -> NodeSet {
    sweep_with(g, seeds, ranked, &mut ConductanceObjective::new()).community
}

/// PageRank ranking followed by the conductance sweep.
pub fn pagerank_community(g: &Graph, seeds: &NodeSet, params: &PageRankParams) -> Result<NodeSet> {
    let scores = pagerank_scores(g, seeds, params)?;
    Ok(sweep(g, seeds, &rank_by_score(&scores)))
}

/// `S ∪ {v : score(v) > lambda}`.
pub fn pagerank_threshold(scores: &ScoreTable, seeds: &NodeSet, lambda: f64) -> NodeSet {
    let above: NodeSet = scores.iter().filter(|&(_, s)| s > lambda).map(|(v, _)| v).collect();
    seeds.union(&above)
}

/// Lexicographic ranking of the embedding followed by the conductance sweep.
pub fn lexrank_community(g: &Graph, seeds: &NodeSet, horizon: usize) -> Result<NodeSet> {
    let emb = compute_embedding(g, seeds, horizon)?;
    Ok(sweep(g, seeds, &rank_lexicographic(&emb)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub lambda: f64,
    /// Mean F1 over the training communities at `lambda`.
    pub mean_f1: f64,
    /// Training communities that had no positive-degree node to seed from.
    pub skipped: usize,
}

/// Mean-F1 differences below this are ties (resolved toward smaller lambda).
const CALIBRATION_TIE: f64 = 1e-12;

/// Seed count, community size and scored non-seed nodes of one training community.
type TrainingCase = (usize, usize, Vec<(f64, bool)>);

/// Picks the threshold maximizing mean F1 of [`pagerank_threshold`] over the
/// training communities.
///
/// Community `i` is seeded from stream `i` of `rng_seed`. Candidates are every
/// distinct non-seed score plus 0; ties go to the smaller threshold.
pub fn calibrate_threshold(
    g: &Graph,
    training: &CommunitySet,
    params: &PageRankParams,
    seed_fraction: f64,
    rng_seed: u64,
) -> Result<Calibration> {
    params.validate()?;
    if training.is_empty() {
        return Err(Error::EmptyTraining);
    }

    // (score, member of target) for every scored non-seed node
    let per_community: Vec<Option<TrainingCase>> = training
        .communities
        .par_iter()
        .enumerate()
        .map(|(i, community)| -> Result<_> {
            let mut rng = trial_rng(rng_seed, i as u64);
            let Some(seeds) = sample_seeds(g, community, seed_fraction, &mut rng) else {
                return Ok(None);
            };
            let scores = pagerank_scores(g, &seeds, params)?;
            let events = scores
                .iter()
                .filter(|&(v, s)| s > 0.0 && !seeds.contains(v))
                .map(|(v, s)| (s, community.contains(v)))
                .collect();
            Ok(Some((seeds.len(), community.len(), events)))
        })
        .collect::<Result<_>>()?;

    let skipped = per_community.iter().filter(|c| c.is_none()).count();
    let active: Vec<TrainingCase> = per_community.into_iter().flatten().collect();
    if active.is_empty() {
        return Err(Error::EmptyTraining);
    }

    let mut events: Vec<(f64, usize, bool)> = active
        .iter()
        .enumerate()
        .flat_map(|(c, (_, _, ev))| ev.iter().map(move |&(s, inside)| (s, c, inside)))
        .collect();
    events.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut candidates: Vec<f64> = events.iter().map(|e| e.0).collect();
    candidates.push(0.0);
    candidates.dedup();

    // seeds are drawn from the community, so they start as true positives
    let mut state: Vec<(usize, usize)> = active.iter().map(|&(s, _, _)| (s, s)).collect();
    let f1_of = |c: usize, (found, inter): (usize, usize)| f1_from_counts(found, active[c].1, inter).f1;
    let mut total: f64 = state.iter().enumerate().map(|(c, &st)| f1_of(c, st)).sum();
    let n = active.len() as f64;

    let mut next_event = 0;
    let mut best: Option<(f64, f64)> = None;
    for &lambda in &candidates {
        while next_event < events.len() && events[next_event].0 > lambda {
            let (_, c, inside) = events[next_event];
            let before = f1_of(c, state[c]);
            state[c].0 += 1;
            if inside {
                state[c].1 += 1;
            }
            total += f1_of(c, state[c]) - before;
            next_event += 1;
        }
        let mean = total / n;
        best = match best {
            None => Some((lambda, mean)),
            Some((_, b)) if mean > b + CALIBRATION_TIE => Some((lambda, mean)),
            Some((_, b)) if mean >= b - CALIBRATION_TIE => Some((lambda, b.max(mean))),
            keep => keep,
        };
    }
    let (lambda, mean_f1) = best.expect("candidate list contains 0");
    Ok(Calibration { lambda, mean_f1, skipped })
}
