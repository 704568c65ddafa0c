//! Local community detection from a seed set.
//!
//! Nodes near the seeds are embedded by the probabilities of a short random
//! walk started at the seeds, `v -> (p_1(v), ..., p_T(v))`. On top of that
//! embedding the crate provides:
//!
//! * personalized PageRank with a conductance sweep, a fixed-threshold variant
//!   and LexRank (lexicographic ranking of the embedding), in [`ranking`];
//! * WalkSCAN, which clusters the embedding and can return several, possibly
//!   overlapping, communities, in [`walkscan`];
//! * the two-clique toy model with its closed-form embedding, in [`toy`].

pub mod embedding;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod ranking;
pub mod sampling;
pub mod toy;
pub mod walkscan;

pub use embedding::{compute_embedding, lex_compare, walk_step, Embedding, EmbeddingVector, WalkDistribution};
pub use error::{Error, Result};
pub use graph::{load_communities, load_edge_list, nodes_within_distance, CommunitySet, Graph, NodeId, NodeSet};
pub use metrics::{conductance, f1_score, F1Report};
pub use ranking::{
    calibrate_threshold, lexrank_community, pagerank_community, pagerank_from_embedding, pagerank_scores,
    pagerank_threshold, sweep, PageRankParams, RankedList, ScoreTable,
};
pub use walkscan::{
    build_communities, cluster_points, evaluate_expert, evaluate_merge, union_all, walkscan, ClusterResult,
    CommunityList, WalkscanParams,
};
