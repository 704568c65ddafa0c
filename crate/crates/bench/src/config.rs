use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, ensure, Result};
use serde::Serialize;
use walkscan::ranking;

/// Linking distance used when none is given.
pub const DEFAULT_DISTANCE: f64 = 0.2;
pub const DEFAULT_MAX_COMMUNITIES: usize = 5000;
pub const DEFAULT_SEED_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Pr,
    Prt,
    Lr,
    Ws,
    WsExpert,
    WsMerge,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] =
        [Algorithm::Pr, Algorithm::Prt, Algorithm::Lr, Algorithm::Ws, Algorithm::WsExpert, Algorithm::WsMerge];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Pr => "pr",
            Algorithm::Prt => "prt",
            Algorithm::Lr => "lr",
            Algorithm::Ws => "ws",
            Algorithm::WsExpert => "ws-expert",
            Algorithm::WsMerge => "ws-merge",
        }
    }

    pub fn is_walkscan(self) -> bool {
        matches!(self, Algorithm::Ws | Algorithm::WsExpert | Algorithm::WsMerge)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match Algorithm::ALL.iter().find(|a| a.name() == s.trim()) {
            Some(&a) => Ok(a),
            None => bail!("unknown algorithm {s:?} (expected one of pr, prt, lr, ws, ws-expert, ws-merge)"),
        }
    }
}

/// Parses a comma-separated algorithm list, keeping the given order and
/// dropping repeats.
pub fn parse_algorithms(list: &str) -> Result<Vec<Algorithm>> {
    let mut out = Vec::new();
    for part in list.split(',').filter(|p| !p.trim().is_empty()) {
        let a: Algorithm = part.parse()?;
        if !out.contains(&a) {
            out.push(a);
        }
    }
    ensure!(!out.is_empty(), "empty algorithm list");
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Single,
    RandomSeeds,
    LocalSeeds,
    DSweep,
    Calibrate,
    Toy,
    Embed,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Single => "single",
            ExperimentKind::RandomSeeds => "random-seeds",
            ExperimentKind::LocalSeeds => "local-seeds",
            ExperimentKind::DSweep => "d-sweep",
            ExperimentKind::Calibrate => "calibrate",
            ExperimentKind::Toy => "toy",
            ExperimentKind::Embed => "embed",
        }
    }
}

/// Where the PageRankThreshold level comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdSource {
    Fixed(f64),
    /// Fit on the even-index communities, evaluate on the odd ones.
    Calibrated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub graph: Option<PathBuf>,
    pub communities: Option<PathBuf>,
    pub max_communities: usize,
    pub algorithms: Vec<Algorithm>,
    pub seed_fraction: f64,
    pub expert_k: usize,
    pub distance: f64,
    pub alpha: f64,
    /// Horizon of pr, prt and lr.
    pub rank_horizon: usize,
    /// Horizon of the WalkSCAN variants.
    pub ws_horizon: usize,
    pub degree_normalized: bool,
    pub include_seeds: bool,
    pub threshold: ThresholdSource,
    pub k_range: Vec<usize>,
    pub l_range: Vec<usize>,
    pub d_grid: Vec<f64>,
    pub runs: usize,
    pub rng_seed: u64,
    /// Also emit one row per community and algorithm.
    pub per_community: bool,
}

/// `points` values spaced evenly in log scale over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..points).map(|j| 10f64.powf(a + (b - a) * j as f64 / (points - 1) as f64)).collect()
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        let algorithms = match kind {
            ExperimentKind::RandomSeeds => vec![Algorithm::Pr, Algorithm::Ws],
            ExperimentKind::LocalSeeds => vec![Algorithm::Pr, Algorithm::WsExpert],
            ExperimentKind::DSweep => vec![Algorithm::Ws, Algorithm::WsExpert],
            ExperimentKind::Calibrate => vec![Algorithm::Prt],
            _ => vec![Algorithm::Pr, Algorithm::Lr, Algorithm::Ws, Algorithm::WsExpert, Algorithm::WsMerge],
        };
        ExperimentConfig {
            kind,
            graph: None,
            communities: None,
            max_communities: DEFAULT_MAX_COMMUNITIES,
            algorithms,
            seed_fraction: DEFAULT_SEED_FRACTION,
            expert_k: walkscan::walkscan::DEFAULT_EXPERT_K,
            distance: DEFAULT_DISTANCE,
            alpha: ranking::DEFAULT_ALPHA,
            rank_horizon: ranking::DEFAULT_HORIZON,
            ws_horizon: walkscan::walkscan::DEFAULT_HORIZON,
            degree_normalized: false,
            include_seeds: true,
            threshold: ThresholdSource::Calibrated,
            k_range: (1..=5).collect(),
            l_range: (1..=3).collect(),
            d_grid: log_grid(1e-3, 1.0, 13),
            runs: 1000,
            rng_seed: 0,
            per_community: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let needs_data = !matches!(self.kind, ExperimentKind::Toy | ExperimentKind::Embed);
        if needs_data {
            ensure!(self.graph.is_some(), "--graph is required for {}", self.kind.name());
            ensure!(self.communities.is_some(), "--communities is required for {}", self.kind.name());
        }
        ensure!(!self.algorithms.is_empty(), "no algorithm selected");
        ensure!(self.runs >= 1, "--runs must be at least 1");
        ensure!(self.max_communities >= 1, "--max-communities must be at least 1");
        ensure!(
            self.seed_fraction > 0.0 && self.seed_fraction <= 1.0,
            "--seed-fraction must lie in (0, 1], got {}",
            self.seed_fraction
        );
        ensure!(self.expert_k >= 1, "--expert-k must be at least 1");
        ensure!(self.distance > 0.0 && self.distance.is_finite(), "--distance must be positive");
        ensure!(self.alpha > 0.0 && self.alpha < 1.0, "--alpha must lie in (0, 1)");
        ensure!(self.rank_horizon >= 1 && self.ws_horizon >= 1, "horizons must be at least 1");
        if let ThresholdSource::Fixed(lambda) = self.threshold {
            ensure!(lambda >= 0.0, "--lambda must be non-negative");
        }
        match self.kind {
            ExperimentKind::RandomSeeds => ensure!(!self.k_range.is_empty(), "empty --k range"),
            ExperimentKind::LocalSeeds => ensure!(!self.l_range.is_empty(), "empty --l range"),
            ExperimentKind::DSweep => {
                ensure!(!self.d_grid.is_empty(), "empty d grid");
                ensure!(self.d_grid.iter().all(|&d| d > 0.0 && d.is_finite()), "d grid values must be positive");
            }
            _ => {}
        }
        Ok(())
    }

    pub fn params_pr(&self) -> ranking::PageRankParams {
        ranking::PageRankParams {
            alpha: self.alpha,
            horizon: self.rank_horizon,
            degree_normalized: self.degree_normalized,
        }
    }

    pub fn params_ws(&self, distance: f64) -> walkscan::WalkscanParams {
        walkscan::WalkscanParams { horizon: self.ws_horizon, distance, include_seeds: self.include_seeds }
    }
}

/// Parses `3`, `1..5` (inclusive) or `1,2,4`.
pub fn parse_range(s: &str) -> Result<Vec<usize>> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().trim_start_matches('=').parse()?);
        ensure!(a <= b, "empty range {s:?}");
        return Ok((a..=b).collect());
    }
    s.split(',').filter(|p| !p.trim().is_empty()).map(|p| Ok(p.trim().parse()?)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("pagerank".parse::<Algorithm>().is_err());
        assert_eq!(parse_algorithms("ws,pr,ws").unwrap(), vec![Algorithm::Ws, Algorithm::Pr]);
        assert!(parse_algorithms(",").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1..5").unwrap(), vec![1, 2, 3, 4, 5]);
        assert_eq!(parse_range("1..=2").unwrap(), vec![1, 2]);
        assert_eq!(parse_range("0,3").unwrap(), vec![0, 3]);
        assert_eq!(parse_range("4").unwrap(), vec![4]);
        assert!(parse_range("5..1").is_err());
    }

    #[test]
    fn default_d_grid() {
        let g = log_grid(1e-3, 1.0, 13);
        assert_eq!(g.len(), 13);
        assert!((g[0] - 1e-3).abs() < 1e-15 && (g[12] - 1.0).abs() < 1e-12);
        assert!((g[4] - 0.01).abs() < 1e-12);
        assert!((g[1] - 0.001778).abs() < 1e-6);
    }

    #[test]
    fn validation() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Single);
        assert!(cfg.validate().is_err());
        cfg.graph = Some("g".into());
        cfg.communities = Some("c".into());
        cfg.validate().unwrap();
        cfg.runs = 0;
        assert!(cfg.validate().is_err());
        assert!(ExperimentConfig::new(ExperimentKind::Toy).validate().is_ok());
    }
}
