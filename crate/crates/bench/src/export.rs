//! Embedding export and the two-clique report.

use std::io::Write;

use anyhow::Result;
use serde::Serialize;
use walkscan::graph::write_edge_list;
use walkscan::toy::{
    closed_form_embedding, generate_two_cliques, separation_distances, Region, SeedSplit, TwoCliqueSpec,
};
use walkscan::{compute_embedding, Graph, NodeSet};

/// Writes `node_id,p1,..,pT` for every embedded node, plus a `region` column
/// when labels are given (indexed by dense id).
pub fn export_embedding<W: Write>(
    g: &Graph,
    seeds: &NodeSet,
    horizon: usize,
    regions: Option<&[Region]>,
    out: W,
) -> Result<()> {
    let emb = compute_embedding(g, seeds, horizon)?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["node_id".to_string()];
    header.extend((1..=horizon).map(|t| format!("p{t}")));
    if regions.is_some() {
        header.push("region".into());
    }
    w.write_record(&header)?;
    for (v, p) in emb.iter() {
        let mut record = vec![g.external_id(v).to_string()];
        record.extend(p.iter().map(|x| x.to_string()));
        if let Some(labels) = regions {
            record.push(labels[v].label().to_string());
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct ToyVectors {
    pub c1_and_c2: Vec<f64>,
    pub c1_only: Vec<f64>,
    pub c2_only: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct ToyDistances {
    pub d1: f64,
    pub d2_exact: f64,
    pub d2_bound: f64,
}

#[derive(Debug, Serialize)]
pub struct ToyReport {
    pub n1: usize,
    pub n2: usize,
    pub overlap: usize,
    pub self_loops: bool,
    pub background: usize,
    pub a: usize,
    pub b: usize,
    pub seeds: Vec<usize>,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
    /// The generated graph in edge-list format.
    pub edge_list: String,
    pub regions: Vec<&'static str>,
    /// Closed-form vectors; absent without self-loops.
    pub vectors: Option<ToyVectors>,
    pub distances: Option<ToyDistances>,
}

pub fn toy_report(spec: &TwoCliqueSpec, split: &SeedSplit) -> Result<ToyReport> {
    split.validate(spec)?;
    let toy = generate_two_cliques(spec)?;
    let mut edges = Vec::new();
    write_edge_list(&toy.graph, &mut edges)?;
    let (vectors, distances) = if spec.with_self_loops {
        let e = closed_form_embedding(spec, split)?;
        let d = separation_distances(spec, split)?;
        (
            Some(ToyVectors { c1_and_c2: e.vec_12.0, c1_only: e.vec_1not2.0, c2_only: e.vec_2not1.0 }),
            Some(ToyDistances { d1: d.d1, d2_exact: d.d2_exact, d2_bound: d.d2_bound }),
        )
    } else {
        (None, None)
    };
    Ok(ToyReport {
        n1: spec.n1,
        n2: spec.n2,
        overlap: spec.overlap,
        self_loops: spec.with_self_loops,
        background: spec.n_background,
        a: split.a,
        b: split.b,
        seeds: split.seeds(spec).iter().collect(),
        alpha1: spec.alpha1(),
        alpha2: spec.alpha2(),
        beta: spec.beta(),
        edge_list: String::from_utf8(edges)?,
        regions: toy.regions.iter().map(|r| r.label()).collect(),
        vectors,
        distances,
    })
}
