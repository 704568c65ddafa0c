#![allow(clippy::needless_range_loop)]

use std::collections::HashSet;

use ::walkscan::ranking::{rank_by_score, rank_lexicographic, sweep_with, ConductanceObjective, SweepObjective};
use ::walkscan::sampling::{sample_seeds, trial_rng};
use ::walkscan::{
    calibrate_threshold, compute_embedding, conductance, f1_score, lexrank_community, nodes_within_distance,
    pagerank_community, pagerank_from_embedding, pagerank_scores, pagerank_threshold, sweep, CommunitySet, Graph,
    NodeSet, PageRankParams, RankedList,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use walkscan_oracles::{
    brute_force_sweep, clique, dense_pagerank, random_connected_graph, random_graph, random_seeds, scratch_conductance,
};

fn params(alpha: f64, horizon: usize) -> PageRankParams {
    PageRankParams { alpha, horizon, degree_normalized: false }
}

#[test]
fn recursion_matches_embedding_identity() {
    for case in 0..100u64 {
        let mut rng = trial_rng(11, case);
        let n = rng.random_range(2..=50);
        let extra = rng.random_range(0..2 * n);
        let g = random_connected_graph(&mut rng, n, extra);
        let seeds: NodeSet = random_seeds(&mut rng, &g, 4).into_iter().collect();
        let alpha = rng.random_range(0.05..0.95);
        let horizon = rng.random_range(1..=4);

        let recursion = pagerank_scores(&g, &seeds, &params(alpha, horizon)).unwrap();
        let emb = compute_embedding(&g, &seeds, horizon).unwrap();
        let identity = pagerank_from_embedding(&emb, &seeds, alpha).unwrap();
        let dense = dense_pagerank(&g, seeds.as_slice(), alpha, horizon);
        for v in 0..n {
            assert!((recursion.score(v) - dense[v]).abs() <= 1e-12, "case {case} node {v}: dense");
            if !seeds.contains(v) {
                let diff = (recursion.score(v) - identity.score(v)).abs();
                assert!(diff <= 1e-10, "case {case} node {v}: diff {diff}");
            }
        }
    }
}

#[test]
fn path_scores_by_hand() {
    let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
    let s: NodeSet = [0].into_iter().collect();
    let r = pagerank_scores(&g, &s, &params(0.5, 1)).unwrap();
    assert_eq!((r.score(0), r.score(1), r.score(2)), (0.5, 0.5, 0.0));
    assert_eq!(pagerank_threshold(&r, &s, 0.25).as_slice(), &[0, 1]);

    let emb = compute_embedding(&g, &s, 2).unwrap();
    let id = pagerank_from_embedding(&emb, &s, 0.5).unwrap();
    assert_eq!(id.score(1), 0.25);
    assert_eq!(id.score(2), 0.125);
    let rec = pagerank_scores(&g, &s, &params(0.5, 2)).unwrap();
    assert_eq!(rec.score(1), 0.25);
    assert_eq!(rec.score(2), 0.125);
}

#[test]
fn near_zero_damping_orders_by_first_step() {
    for case in 0..100u64 {
        let mut rng = trial_rng(12, case);
        let n = rng.random_range(2..=40);
        let g = random_connected_graph(&mut rng, n, n / 2);
        let seeds: NodeSet = random_seeds(&mut rng, &g, 3).into_iter().collect();
        let emb = compute_embedding(&g, &seeds, 3).unwrap();
        let ranked = rank_by_score(&pagerank_scores(&g, &seeds, &params(1e-6, 3)).unwrap());

        let mut by_p1: Vec<usize> = ranked.as_slice().to_vec();
        by_p1.sort_by(|&a, &b| emb.coordinate(b, 1).total_cmp(&emb.coordinate(a, 1)));
        // a stable sort by p1 alone leaves the list unchanged: p1 decides every
        // pair it can distinguish
        assert_eq!(by_p1, ranked.0, "case {case}");

        let top: Vec<usize> = ranked.as_slice().iter().copied().filter(|&v| emb.coordinate(v, 1) > 0.0).collect();
        let mut expected: Vec<usize> =
            emb.nodes().iter().copied().filter(|&v| !seeds.contains(v) && emb.coordinate(v, 1) > 0.0).collect();
        expected.sort_by(|&a, &b| emb.coordinate(b, 1).total_cmp(&emb.coordinate(a, 1)).then(a.cmp(&b)));
        let ties = expected.windows(2).any(|w| emb.coordinate(w[0], 1) == emb.coordinate(w[1], 1));
        if !ties {
            assert_eq!(top, expected, "case {case}");
        }
    }
}

proptest! {
    #[test]
    fn damped_mass_is_one(seed in any::<u64>(), n in 1usize..50, alpha in 0.01f64..0.99, horizon in 1usize..6) {
        let mut rng = trial_rng(seed, 0);
        let g = random_connected_graph(&mut rng, n, n);
        let seeds: NodeSet = random_seeds(&mut rng, &g, 4).into_iter().collect();
        for t in 1..=horizon {
            let r = pagerank_scores(&g, &seeds, &params(alpha, t)).unwrap();
            prop_assert!((r.total_mass() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn rankings_are_deterministic(seed in any::<u64>(), n in 1usize..50) {
        let mut rng = trial_rng(seed, 0);
        let g = random_graph(&mut rng, n, 0.2, 0.1);
        prop_assume!((0..n).any(|v| g.degree(v) > 0));
        let seeds: NodeSet = random_seeds(&mut rng, &g, 3).into_iter().collect();
        let p = PageRankParams::default();
        let a = rank_by_score(&pagerank_scores(&g, &seeds, &p).unwrap());
        let b = rank_by_score(&pagerank_scores(&g.clone(), &seeds, &p).unwrap());
        prop_assert_eq!(&a, &b);
        let emb = compute_embedding(&g, &seeds, 3).unwrap();
        prop_assert_eq!(rank_lexicographic(&emb), rank_lexicographic(&emb.clone()));
        for w in a.as_slice().windows(2) {
            let r = pagerank_scores(&g, &seeds, &p).unwrap();
            prop_assert!(r.score(w[0]) > r.score(w[1]) || (r.score(w[0]) == r.score(w[1]) && w[0] < w[1]));
        }
        prop_assert!(a.as_slice().iter().all(|&v| !seeds.contains(v)));
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn incremental_conductance_matches_scratch(seed in any::<u64>(), n in 2usize..200, p in 0.005f64..0.2) {
        let mut rng = trial_rng(seed, 0);
        let g = random_graph(&mut rng, n, p, 0.1);
        prop_assume!(g.volume() > 0);
        let seeds: NodeSet = random_seeds(&mut rng, &g, 3).into_iter().collect();
        let mut order: Vec<usize> = (0..n).filter(|&v| !seeds.contains(v)).collect();
        order.shuffle(&mut rng);

        let mut objective = ConductanceObjective::new();
        objective.reset(&g, &seeds);
        let mut members: HashSet<usize> = seeds.iter().collect();
        for &v in &order {
            let score = objective.extend(&g, v);
            members.insert(v);
            let set: NodeSet = members.iter().copied().collect();
            match scratch_conductance(&g, &members) {
                Some(c) => {
                    prop_assert!((score + c).abs() <= 1e-15);
                    prop_assert_eq!(conductance(&g, &set).value, c);
                    prop_assert!(!conductance(&g, &set).degenerate);
                }
                None => {
                    prop_assert_eq!(score, f64::NEG_INFINITY);
                    prop_assert!(conductance(&g, &set).degenerate);
                }
            }
        }
    }
}

#[test]
fn sweep_matches_exhaustive_prefixes() {
    for case in 0..200u64 {
        let mut rng = trial_rng(13, case);
        let n = rng.random_range(1..=12);
        let p = rng.random_range(0.1..0.7);
        let g = random_graph(&mut rng, n, p, 0.2);
        if g.volume() == 0 {
            continue;
        }
        let seeds: NodeSet = random_seeds(&mut rng, &g, 3).into_iter().collect();
        let emb = compute_embedding(&g, &seeds, 3).unwrap();
        let mut shuffled: Vec<usize> = (0..n).filter(|&v| !seeds.contains(v)).collect();
        shuffled.shuffle(&mut rng);
        let rankings = [
            rank_by_score(&pagerank_scores(&g, &seeds, &PageRankParams::default()).unwrap()),
            rank_lexicographic(&emb),
            RankedList(shuffled),
        ];
        for ranked in &rankings {
            let outcome = sweep_with(&g, &seeds, ranked, &mut ConductanceObjective::new());
            let (k, expected) = brute_force_sweep(&g, &seeds, ranked.as_slice());
            assert_eq!(outcome.prefix_len, k, "case {case}");
            assert_eq!(outcome.community, expected, "case {case}");
        }
    }
}

fn two_disjoint_cliques() -> Graph {
    let mut e = clique(0..4, false);
    e.extend(clique(4..8, false));
    Graph::from_edges(8, e).unwrap()
}

#[test]
fn disjoint_cliques_return_first_clique() {
    let g = two_disjoint_cliques();
    let s: NodeSet = [0].into_iter().collect();
    let clique1: NodeSet = (0..4).collect();
    assert_eq!(lexrank_community(&g, &s, 3).unwrap(), clique1);
    assert_eq!(pagerank_community(&g, &s, &PageRankParams::default()).unwrap(), clique1);
    assert_eq!(sweep(&g, &s, &RankedList(vec![])), s);
    let emb = compute_embedding(&g, &s, 3).unwrap();
    let ranked = rank_lexicographic(&emb);
    assert_eq!(brute_force_sweep(&g, &s, ranked.as_slice()).1, clique1);
}

#[test]
fn overlapping_cliques_with_separate_component() {
    let mut e = clique(0..5, true);
    e.extend(clique(3..10, true));
    e.extend(clique(10..14, false));
    let g = Graph::from_edges(14, e).unwrap();
    let union: NodeSet = (0..10).collect();
    for seeds in [vec![0], vec![0, 1], vec![2]] {
        let s: NodeSet = seeds.into_iter().collect();
        assert_eq!(pagerank_community(&g, &s, &PageRankParams::default()).unwrap(), union);
        assert_eq!(lexrank_community(&g, &s, 3).unwrap(), union);
        let emb = compute_embedding(&g, &s, 3).unwrap();
        assert_eq!(brute_force_sweep(&g, &s, rank_lexicographic(&emb).as_slice()).1, union);
    }
    // with T = 2 LexRank places C1 before C2 \ C1
    let s: NodeSet = [0].into_iter().collect();
    let ranked = rank_lexicographic(&compute_embedding(&g, &s, 2).unwrap());
    assert_eq!(ranked.as_slice(), &[1, 2, 3, 4, 5, 6, 7, 8, 9]);
}

#[test]
fn single_node_with_loop() {
    let g = Graph::from_edges(1, [(0, 0)]).unwrap();
    let s: NodeSet = [0].into_iter().collect();
    assert_eq!(pagerank_scores(&g, &s, &params(0.3, 3)).unwrap().score(0), 1.0);
    assert_eq!(pagerank_community(&g, &s, &PageRankParams::default()).unwrap(), s);
    assert_eq!(lexrank_community(&g, &s, 2).unwrap(), s);
}

/// Mean F1 of thresholding at `lambda`, recomputed from scratch.
fn mean_f1(g: &Graph, training: &CommunitySet, p: &PageRankParams, fraction: f64, rng_seed: u64, lambda: f64) -> f64 {
    let mut total = 0.0;
    let mut count = 0;
    for (i, c) in training.communities.iter().enumerate() {
        let mut rng = trial_rng(rng_seed, i as u64);
        let Some(seeds) = sample_seeds(g, c, fraction, &mut rng) else { continue };
        let scores = pagerank_scores(g, &seeds, p).unwrap();
        let found: NodeSet = (0..g.node_count()).filter(|&v| seeds.contains(v) || scores.score(v) > lambda).collect();
        total += f1_score(&found, c).unwrap().f1;
        count += 1;
    }
    total / count as f64
}

#[test]
fn calibration_matches_exhaustive_grid() {
    for case in 0..30u64 {
        let mut rng = trial_rng(14, case);
        let n = rng.random_range(8..=40);
        let g = random_connected_graph(&mut rng, n, n / 2);
        let count = rng.random_range(1..=4);
        let communities: Vec<NodeSet> = (0..count)
            .map(|_| {
                let center: NodeSet = [rng.random_range(0..n)].into_iter().collect();
                nodes_within_distance(&g, &center, rng.random_range(1..=2))
            })
            .collect();
        let training = CommunitySet { communities, skipped_empty: 0 };
        let p = PageRankParams::default();
        let fraction = rng.random_range(0.05..0.6);
        let rng_seed = case * 31 + 5;
        let cal = calibrate_threshold(&g, &training, &p, fraction, rng_seed).unwrap();

        let mut grid = vec![0.0];
        for (i, c) in training.communities.iter().enumerate() {
            let mut r = trial_rng(rng_seed, i as u64);
            let seeds = sample_seeds(&g, c, fraction, &mut r).unwrap();
            grid.extend(pagerank_scores(&g, &seeds, &p).unwrap().iter().map(|(_, s)| s));
        }
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let values: Vec<(f64, f64)> =
            grid.iter().map(|&l| (l, mean_f1(&g, &training, &p, fraction, rng_seed, l))).collect();
        let best = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);

        let at_lambda = mean_f1(&g, &training, &p, fraction, rng_seed, cal.lambda);
        assert!((at_lambda - cal.mean_f1).abs() <= 1e-12, "case {case}");
        assert!(at_lambda >= best - 1e-9, "case {case}: {at_lambda} < {best}");
        for &(l, m) in &values {
            if l < cal.lambda {
                assert!(m < best - 1e-12, "case {case}: smaller lambda {l} also optimal");
            }
        }
    }
}

#[test]
fn calibration_examples() {
    let g = two_disjoint_cliques();
    let clique1: NodeSet = (0..4).collect();
    let one = CommunitySet { communities: vec![clique1.clone()], skipped_empty: 0 };
    let cal = calibrate_threshold(&g, &one, &PageRankParams::default(), 0.25, 3).unwrap();
    assert_eq!(cal.mean_f1, 1.0);
    let seeds = sample_seeds(&g, &clique1, 0.25, &mut trial_rng(3, 0)).unwrap();
    let scores = pagerank_scores(&g, &seeds, &PageRankParams::default()).unwrap();
    assert_eq!(pagerank_threshold(&scores, &seeds, cal.lambda), clique1);

    let two = CommunitySet { communities: vec![clique1.clone(), clique1.clone()], skipped_empty: 0 };
    // both copies use their own streams; with a deterministic clique the
    // optimum is the same
    assert_eq!(calibrate_threshold(&g, &two, &PageRankParams::default(), 0.25, 3).unwrap().mean_f1, 1.0);

    let whole = CommunitySet { communities: vec![(0..8).collect()], skipped_empty: 0 };
    let g2 = random_connected_graph(&mut trial_rng(1, 1), 8, 4);
    assert_eq!(calibrate_threshold(&g2, &whole, &PageRankParams::default(), 0.2, 9).unwrap().lambda, 0.0);
    assert!(calibrate_threshold(&g, &CommunitySet::default(), &PageRankParams::default(), 0.1, 0).is_err());
}
