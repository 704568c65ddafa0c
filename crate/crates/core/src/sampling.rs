//! Deterministic random streams and seed-set sampling.
//!
//! Every trial draws from its own ChaCha8 stream: the generator is keyed by
//! the master seed and the stream id selects one of 2^64 independent
//! sequences. Callers pick stream ids from a counter (community index, or
//! `point << 32 | run`), so any single trial can be replayed on its own.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, NodeId, NodeSet};

pub fn trial_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Stream id for trial `run` at parameter point `point`.
pub fn stream_id(point: usize, run: usize) -> u64 {
    ((point as u64) << 32) | (run as u64 & 0xffff_ffff)
}

/// `ceil(size * fraction)`, at least 1. A relative slack of 1e-12 keeps
/// products such as `30 * 0.1` from rounding up past the exact integer.
pub fn seed_count(size: usize, fraction: f64) -> usize {
    let x = size as f64 * fraction;
    ((x - x * 1e-12).ceil() as usize).max(1)
}

/// Uniform sample without replacement of `count` nodes from `pool`,
/// returned as a set. Takes the whole pool if it is smaller than `count`.
pub fn sample_nodes<R: rand::Rng + ?Sized>(pool: &[NodeId], count: usize, rng: &mut R) -> NodeSet {
    if count >= pool.len() {
        return pool.iter().copied().collect();
    }
    index::sample(rng, pool.len(), count).into_iter().map(|i| pool[i]).collect()
}

/// Samples `ceil(|candidates| * fraction)` seeds among the positive-degree
/// nodes of `candidates`. Returns `None` when no candidate has positive degree.
pub fn sample_seeds<R: rand::Rng + ?Sized>(
    g: &Graph,
    candidates: &NodeSet,
    fraction: f64,
    rng: &mut R,
) -> Option<NodeSet> {
    let pool: Vec<NodeId> = candidates.iter().filter(|&v| g.degree(v) > 0).collect();
    if pool.is_empty() {
        return None;
    }
    Some(sample_nodes(&pool, seed_count(candidates.len(), fraction), rng))
}
