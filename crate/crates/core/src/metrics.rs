//! Set-recovery scores and conductance.

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F1Report {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub intersection: usize,
}

/// `2ab / (a + b)`, with `H(0, 0) = 0`.
pub fn harmonic_mean(a: f64, b: f64) -> f64 {
    if a + b == 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

/// Precision, recall and F1 of `found` against `target`. An empty `found`
/// has precision 0.
pub fn f1_score(found: &NodeSet, target: &NodeSet) -> Result<F1Report> {
    if target.is_empty() {
        return Err(Error::EmptyTarget);
    }
    let intersection = found.intersection_len(target);
    Ok(f1_from_counts(found.len(), target.len(), intersection))
}

pub(crate) fn f1_from_counts(found: usize, target: usize, intersection: usize) -> F1Report {
    let precision = if found == 0 { 0.0 } else { intersection as f64 / found as f64 };
    let recall = intersection as f64 / target as f64;
    F1Report { precision, recall, f1: harmonic_mean(precision, recall), intersection }
}

/// Conductance of a node set.
///
/// `degenerate` is set when either side of the cut has zero volume (this
/// includes the empty set and the whole node set); `value` is then 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conductance {
    pub value: f64,
    pub degenerate: bool,
}

impl Conductance {
    pub fn from_counts(cut: usize, volume: usize, total_volume: usize) -> Self {
        let denominator = volume.min(total_volume - volume);
        if denominator == 0 {
            Conductance { value: 1.0, degenerate: true }
        } else {
            Conductance { value: cut as f64 / denominator as f64, degenerate: false }
        }
    }
}

/// Number of edges leaving `x` and the degree sum of `x`. Self-loops count
/// toward the volume but never toward the cut.
pub fn cut_and_volume(g: &Graph, x: &NodeSet) -> (usize, usize) {
    let mut cut = 0;
    let mut volume = 0;
    for v in x {
        volume += g.degree(v);
        cut += g.neighbors(v).iter().filter(|&&w| !x.contains(w)).count();
    }
    (cut, volume)
}

/// `cut(x) / min(vol(x), vol(V \ x))`.
pub fn conductance(g: &Graph, x: &NodeSet) -> Conductance {
    let (cut, volume) = cut_and_volume(g, x);
    Conductance::from_counts(cut, volume, g.volume())
}
