//! Experiment protocols.
//!
//! Every trial draws its seeds from its own random stream, derived from the
//! master seed by [`stream_id`]`(point, index)`: `point` is the swept
//! parameter (`k` or `l`, 0 for single recovery and the d-sweep) and `index`
//! the community or run number. Trials run in parallel and are aggregated in
//! index order, so results do not depend on scheduling.

use anyhow::{anyhow, bail, ensure, Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use walkscan::ranking::{calibrate_threshold, rank_by_score, Calibration};
use walkscan::sampling::{sample_nodes, sample_seeds, seed_count, stream_id, trial_rng};
use walkscan::walkscan::{evaluate_first, CommunityList};
use walkscan::{
    build_communities, cluster_points, compute_embedding, evaluate_expert, evaluate_merge, f1_score, lexrank_community,
    load_communities, load_edge_list, nodes_within_distance, pagerank_scores, pagerank_threshold, sweep, union_all,
    CommunitySet, Embedding, Graph, NodeId, NodeSet,
};

use crate::config::{Algorithm, ExperimentConfig, ExperimentKind, ThresholdSource};
use crate::output::ResultRow;

/// A graph with its ground-truth communities.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub graph: Graph,
    pub communities: CommunitySet,
}

impl Dataset {
    pub fn load(cfg: &ExperimentConfig) -> Result<Self> {
        let graph_path = cfg.graph.as_ref().ok_or_else(|| anyhow!("--graph is required"))?;
        let comm_path = cfg.communities.as_ref().ok_or_else(|| anyhow!("--communities is required"))?;
        let graph = load_edge_list(graph_path).with_context(|| format!("loading graph {}", graph_path.display()))?;
        let communities = load_communities(comm_path, &graph, cfg.max_communities)
            .with_context(|| format!("loading communities {}", comm_path.display()))?;
        ensure!(!communities.is_empty(), "no community in {}", comm_path.display());
        Ok(Dataset { graph, communities })
    }
}

/// Rows plus the facts recorded in the metadata sidecar.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub rows: Vec<ResultRow>,
    pub calibration: Option<CalibrationInfo>,
    pub skipped: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationInfo {
    pub lambda: f64,
    pub training_mean_f1: f64,
    pub training_communities: usize,
    pub training_skipped: usize,
}

/// How the plain WS score is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WsScore {
    /// First community only.
    First,
    /// Union of every community.
    Union,
}

struct Scorer<'a> {
    cfg: &'a ExperimentConfig,
    graph: &'a Graph,
    lambda: Option<f64>,
    ws: WsScore,
}

impl Scorer<'_> {
    fn f1(&self, found: &NodeSet, target: &NodeSet) -> Result<f64> {
        Ok(f1_score(found, target)?.f1)
    }

    /// F1 of each algorithm in `algos` for one seed set. Entries are `None`
    /// for algorithms skipped in this trial.
    fn score(
        &self,
        algos: &[Algorithm],
        seeds: &NodeSet,
        target: &NodeSet,
        with_prt: bool,
    ) -> Result<Vec<Option<f64>>> {
        let g = self.graph;
        let needs_scores = algos.iter().any(|a| matches!(a, Algorithm::Pr) || (*a == Algorithm::Prt && with_prt));
        let scores = if needs_scores { Some(pagerank_scores(g, seeds, &self.cfg.params_pr())?) } else { None };
        let comms = if algos.iter().any(|a| a.is_walkscan()) {
            let emb = compute_embedding(g, seeds, self.cfg.ws_horizon)?;
            Some(self.communities(&emb, self.cfg.distance)?)
        } else {
            None
        };
        algos
            .iter()
            .map(|&a| match a {
                Algorithm::Pr => {
                    let found = sweep(g, seeds, &rank_by_score(scores.as_ref().unwrap()));
                    Ok(Some(self.f1(&found, target)?))
                }
                Algorithm::Prt if !with_prt => Ok(None),
                Algorithm::Prt => {
                    let lambda = self.lambda.expect("threshold resolved before scoring");
                    Ok(Some(self.f1(&pagerank_threshold(scores.as_ref().unwrap(), seeds, lambda), target)?))
                }
                Algorithm::Lr => Ok(Some(self.f1(&lexrank_community(g, seeds, self.cfg.rank_horizon)?, target)?)),
                _ => self.score_walkscan(a, comms.as_ref().unwrap(), seeds, target).map(Some),
            })
            .collect()
    }

    fn communities(&self, emb: &Embedding, distance: f64) -> Result<CommunityList> {
        self.cfg.params_ws(distance).validate()?;
        let clusters = cluster_points(emb, distance)?;
        Ok(build_communities(self.graph, emb, &clusters))
    }

    fn score_walkscan(&self, a: Algorithm, comms: &CommunityList, seeds: &NodeSet, target: &NodeSet) -> Result<f64> {
        let (k, inc) = (self.cfg.expert_k, self.cfg.include_seeds);
        Ok(match a {
            Algorithm::Ws if self.ws == WsScore::Union => {
                let found = if comms.is_empty() {
                    seeds.clone()
                } else if inc {
                    union_all(comms).union(seeds)
                } else {
                    union_all(comms)
                };
                self.f1(&found, target)?
            }
            Algorithm::Ws => evaluate_first(comms, target, seeds, inc)?.f1,
            Algorithm::WsExpert => evaluate_expert(comms, target, k, seeds, inc)?.f1,
            Algorithm::WsMerge => evaluate_merge(comms, target, k, seeds, inc)?.f1,
            _ => unreachable!("not a WalkSCAN variant"),
        })
    }
}

/// Even-index communities, the calibration half.
pub fn training_half(communities: &CommunitySet) -> CommunitySet {
    CommunitySet { communities: communities.communities.iter().step_by(2).cloned().collect(), skipped_empty: 0 }
}

fn resolve_threshold(cfg: &ExperimentConfig, data: &Dataset) -> Result<(Option<f64>, Option<CalibrationInfo>)> {
    if !cfg.algorithms.contains(&Algorithm::Prt) {
        return Ok((None, None));
    }
    match cfg.threshold {
        ThresholdSource::Fixed(lambda) => Ok((Some(lambda), None)),
        ThresholdSource::Calibrated => {
            ensure!(
                data.communities.len() >= 2,
                "calibrating prt needs at least two communities (even indices train, odd indices evaluate)"
            );
            let training = training_half(&data.communities);
            let cal = calibrate_threshold(&data.graph, &training, &cfg.params_pr(), cfg.seed_fraction, cfg.rng_seed)?;
            Ok((Some(cal.lambda), Some(info(&cal, training.len()))))
        }
    }
}

fn info(cal: &Calibration, training: usize) -> CalibrationInfo {
    CalibrationInfo {
        lambda: cal.lambda,
        training_mean_f1: cal.mean_f1,
        training_communities: training,
        training_skipped: cal.skipped,
    }
}

/// Averages per-trial scores (in trial order) into one row per algorithm.
fn aggregate(
    cfg: &ExperimentConfig,
    algos: &[Algorithm],
    trials: &[Option<Vec<Option<f64>>>],
    parameter: &'static str,
    value: String,
) -> Vec<ResultRow> {
    let skipped = trials.iter().filter(|t| t.is_none()).count();
    algos
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let values: Vec<f64> = trials.iter().flatten().filter_map(|t| t[j]).collect();
            let mean = if values.is_empty() { 0.0 } else { values.iter().sum::<f64>() / values.len() as f64 };
            ResultRow {
                experiment: cfg.kind.name(),
                algorithm: a.name(),
                parameter,
                value: value.clone(),
                mean_f1: mean,
                trials: values.len(),
                skipped,
                rng_seed: cfg.rng_seed,
            }
        })
        .collect()
}

fn per_community_rows(
    cfg: &ExperimentConfig,
    algos: &[Algorithm],
    trials: &[Option<Vec<Option<f64>>>],
) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    for (i, trial) in trials.iter().enumerate() {
        let Some(scores) = trial else { continue };
        for (a, s) in algos.iter().zip(scores) {
            if let Some(f1) = s {
                rows.push(ResultRow {
                    experiment: cfg.kind.name(),
                    algorithm: a.name(),
                    parameter: "community",
                    value: i.to_string(),
                    mean_f1: *f1,
                    trials: 1,
                    skipped: 0,
                    rng_seed: cfg.rng_seed,
                });
            }
        }
    }
    rows
}

/// Seeds `ceil(|C| * fraction)` nodes of each community and scores every
/// algorithm against it.
///
/// With a calibrated threshold, prt is fit on the even-index communities and
/// scored on the odd ones only; the other algorithms are scored on all.
pub fn run_single_recovery(cfg: &ExperimentConfig, data: &Dataset) -> Result<Outcome> {
    cfg.validate()?;
    let (lambda, calibration) = resolve_threshold(cfg, data)?;
    let scorer = Scorer { cfg, graph: &data.graph, lambda, ws: WsScore::First };
    let calibrated = calibration.is_some();

    let trials: Vec<Option<Vec<Option<f64>>>> = data
        .communities
        .communities
        .par_iter()
        .enumerate()
        .map(|(i, community)| {
            let mut rng = trial_rng(cfg.rng_seed, stream_id(0, i));
            let Some(seeds) = sample_seeds(&data.graph, community, cfg.seed_fraction, &mut rng) else {
                return Ok(None);
            };
            let with_prt = !calibrated || i % 2 == 1;
            scorer.score(&cfg.algorithms, &seeds, community, with_prt).map(Some)
        })
        .collect::<Result<_>>()?;

    let mut rows = aggregate(cfg, &cfg.algorithms, &trials, "", String::new());
    if cfg.per_community {
        rows.extend(per_community_rows(cfg, &cfg.algorithms, &trials));
    }
    let skipped = trials.iter().filter(|t| t.is_none()).count();
    Ok(Outcome { rows, calibration, skipped })
}

/// Positive-degree nodes that belong to at least one community, with the
/// communities of every node.
fn membership(data: &Dataset) -> (Vec<NodeId>, Vec<Vec<usize>>) {
    let mut of: Vec<Vec<usize>> = vec![Vec::new(); data.graph.node_count()];
    for (j, c) in data.communities.communities.iter().enumerate() {
        for v in c {
            of[v].push(j);
        }
    }
    let pool = (0..data.graph.node_count()).filter(|&v| !of[v].is_empty() && data.graph.degree(v) > 0).collect();
    (pool, of)
}

/// Random seed sets of size `k` drawn from community members; the target is
/// the union of every community of the seeds, and WS is scored on the union
/// of all its communities.
pub fn run_random_seed_bench(cfg: &ExperimentConfig, data: &Dataset) -> Result<Outcome> {
    cfg.validate()?;
    let (lambda, calibration) = resolve_threshold(cfg, data)?;
    let scorer = Scorer { cfg, graph: &data.graph, lambda, ws: WsScore::Union };
    let (pool, of) = membership(data);

    let mut rows = Vec::new();
    for &k in &cfg.k_range {
        ensure!(k >= 1, "seed set size k must be at least 1");
        ensure!(k <= pool.len(), "cannot sample {k} seeds from {} community members", pool.len());
        let trials: Vec<Option<Vec<Option<f64>>>> = (0..cfg.runs)
            .into_par_iter()
            .map(|run| {
                let mut rng = trial_rng(cfg.rng_seed, stream_id(k, run));
                let seeds = sample_nodes(&pool, k, &mut rng);
                let target: NodeSet = seeds
                    .iter()
                    .flat_map(|v| of[v].iter().flat_map(|&j| data.communities.communities[j].iter()))
                    .collect();
                scorer.score(&cfg.algorithms, &seeds, &target, true).map(Some)
            })
            .collect::<Result<_>>()?;
        rows.extend(aggregate(cfg, &cfg.algorithms, &trials, "k", k.to_string()));
    }
    Ok(Outcome { rows, calibration, skipped: 0 })
}

/// Seeds each community from the nodes within `l` hops of it, scoring
/// against the community itself. `l = 0` is single recovery.
pub fn run_local_seed_bench(cfg: &ExperimentConfig, data: &Dataset) -> Result<Outcome> {
    cfg.validate()?;
    let (lambda, calibration) = resolve_threshold(cfg, data)?;
    let scorer = Scorer { cfg, graph: &data.graph, lambda, ws: WsScore::First };
    let calibrated = calibration.is_some();
    let g = &data.graph;

    let mut rows = Vec::new();
    let mut skipped = 0;
    for &l in &cfg.l_range {
        let trials: Vec<Option<Vec<Option<f64>>>> = data
            .communities
            .communities
            .par_iter()
            .enumerate()
            .map(|(i, community)| {
                let ball = nodes_within_distance(g, community, l);
                let pool: Vec<NodeId> = ball.iter().filter(|&v| g.degree(v) > 0).collect();
                if pool.is_empty() {
                    return Ok(None);
                }
                let mut rng = trial_rng(cfg.rng_seed, stream_id(l, i));
                let seeds = sample_nodes(&pool, seed_count(community.len(), cfg.seed_fraction), &mut rng);
                let with_prt = !calibrated || i % 2 == 1;
                scorer.score(&cfg.algorithms, &seeds, community, with_prt).map(Some)
            })
            .collect::<Result<_>>()?;
        skipped = skipped.max(trials.iter().filter(|t| t.is_none()).count());
        rows.extend(aggregate(cfg, &cfg.algorithms, &trials, "l", l.to_string()));
    }
    Ok(Outcome { rows, calibration, skipped })
}

/// Single recovery for the WalkSCAN variants at every `d` of the grid. The
/// seeds of a community are the same at every `d`.
pub fn run_d_sweep(cfg: &ExperimentConfig, data: &Dataset) -> Result<Outcome> {
    cfg.validate()?;
    if let Some(a) = cfg.algorithms.iter().find(|a| !a.is_walkscan()) {
        bail!("d-sweep only runs WalkSCAN variants, got {a}");
    }
    let scorer = Scorer { cfg, graph: &data.graph, lambda: None, ws: WsScore::First };
    let algos = &cfg.algorithms;

    // per community: one score vector per grid point
    let per_community: Vec<Option<Vec<Vec<Option<f64>>>>> = data
        .communities
        .communities
        .par_iter()
        .enumerate()
        .map(|(i, community)| {
            let mut rng = trial_rng(cfg.rng_seed, stream_id(0, i));
            let Some(seeds) = sample_seeds(&data.graph, community, cfg.seed_fraction, &mut rng) else {
                return Ok(None);
            };
            let emb = compute_embedding(&data.graph, &seeds, cfg.ws_horizon)?;
            cfg.d_grid
                .iter()
                .map(|&d| {
                    let comms = scorer.communities(&emb, d)?;
                    algos.iter().map(|&a| scorer.score_walkscan(a, &comms, &seeds, community).map(Some)).collect()
                })
                .collect::<Result<Vec<_>>>()
                .map(Some)
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (j, &d) in cfg.d_grid.iter().enumerate() {
        let trials: Vec<Option<Vec<Option<f64>>>> =
            per_community.iter().map(|c| c.as_ref().map(|points| points[j].clone())).collect();
        rows.extend(aggregate(cfg, algos, &trials, "d", d.to_string()));
    }
    let skipped = per_community.iter().filter(|c| c.is_none()).count();
    Ok(Outcome { rows, calibration: None, skipped })
}

/// Fits the PageRankThreshold level on the even-index communities.
pub fn run_calibration(cfg: &ExperimentConfig, data: &Dataset) -> Result<Outcome> {
    cfg.validate()?;
    let training = training_half(&data.communities);
    let cal = calibrate_threshold(&data.graph, &training, &cfg.params_pr(), cfg.seed_fraction, cfg.rng_seed)?;
    let row = ResultRow {
        experiment: ExperimentKind::Calibrate.name(),
        algorithm: Algorithm::Prt.name(),
        parameter: "lambda",
        value: cal.lambda.to_string(),
        mean_f1: cal.mean_f1,
        trials: training.len() - cal.skipped,
        skipped: cal.skipped,
        rng_seed: cfg.rng_seed,
    };
    Ok(Outcome { rows: vec![row], calibration: Some(info(&cal, training.len())), skipped: cal.skipped })
}

/// Dispatches on the experiment kind.
pub fn run_experiment(cfg: &ExperimentConfig, data: &Dataset) -> Result<Outcome> {
    match cfg.kind {
        ExperimentKind::Single => run_single_recovery(cfg, data),
        ExperimentKind::RandomSeeds => run_random_seed_bench(cfg, data),
        ExperimentKind::LocalSeeds => run_local_seed_bench(cfg, data),
        ExperimentKind::DSweep => run_d_sweep(cfg, data),
        ExperimentKind::Calibrate => run_calibration(cfg, data),
        ExperimentKind::Toy | ExperimentKind::Embed => bail!("{} is not a benchmark", cfg.kind.name()),
    }
}
