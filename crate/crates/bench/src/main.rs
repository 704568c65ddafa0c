use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use walkscan::ranking::{rank_by_score, sweep};
use walkscan::toy::{generate_two_cliques, SeedSplit, TwoCliqueSpec};
use walkscan::{
    lexrank_community, load_edge_list, pagerank_scores, pagerank_threshold, walkscan as run_walkscan, Graph, NodeSet,
};
use walkscan_bench::config::{log_grid, parse_algorithms, parse_range};
use walkscan_bench::{
    export_embedding, run_experiment, toy_report, write_outcome, write_rows, Algorithm, Dataset, ExperimentConfig,
    ExperimentKind, ThresholdSource,
};

#[derive(Parser)]
#[command(name = "walkscan", version, about = "Local community detection from seed sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark over ground-truth communities.
    #[command(subcommand)]
    Bench(Bench),
    /// Fit the PageRankThreshold level on the even-index communities.
    Calibrate(Common),
    /// Two overlapping cliques: graph, regions, closed forms and distances as JSON.
    Toy(ToyArgs),
    /// Write the random-walk embedding as CSV.
    Embed(EmbedArgs),
    /// Run one algorithm from a seed set and print the result as JSON.
    Run(RunArgs),
}

#[derive(Subcommand)]
enum Bench {
    /// One seed set per community, sampled inside it.
    Single(Common),
    /// Random seed sets of size k; the target is the union of their communities.
    RandomSeeds {
        #[command(flatten)]
        common: Common,
        /// Seed set sizes, e.g. `1..5` or `1,2,4`.
        #[arg(long = "k", default_value = "1..5")]
        k_range: String,
    },
    /// Seeds sampled within l hops of each community.
    LocalSeeds {
        #[command(flatten)]
        common: Common,
        /// Hop distances, e.g. `1..3`.
        #[arg(long = "l", default_value = "1..3")]
        l_range: String,
    },
    /// WalkSCAN variants over a grid of linking distances.
    DSweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated distances; defaults to 13 log-spaced values in [0.001, 1].
        #[arg(long)]
        d_grid: Option<String>,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Edge list, one `u v` pair per line.
    #[arg(long)]
    graph: PathBuf,
    /// Ground-truth communities, one per line.
    #[arg(long)]
    communities: PathBuf,
    #[arg(long, default_value_t = walkscan_bench::config::DEFAULT_MAX_COMMUNITIES)]
    max_communities: usize,
    /// Comma-separated subset of pr,prt,lr,ws,ws-expert,ws-merge.
    #[arg(long)]
    algos: Option<String>,
    #[arg(long, default_value_t = walkscan::ranking::DEFAULT_ALPHA)]
    alpha: f64,
    /// Horizon for every algorithm (default 3 for pr/prt/lr, 2 for WalkSCAN).
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long, default_value_t = walkscan_bench::config::DEFAULT_DISTANCE)]
    distance: f64,
    /// Fixed PageRankThreshold level; calibrated on half the communities when absent.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = walkscan::walkscan::DEFAULT_EXPERT_K)]
    expert_k: usize,
    #[arg(long, default_value_t = walkscan_bench::config::DEFAULT_SEED_FRACTION)]
    seed_fraction: f64,
    /// Runs per parameter point (random-seeds).
    #[arg(long, default_value_t = 1000)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    /// Rank PageRank by r(v)/d(v).
    #[arg(long)]
    degree_normalized: bool,
    /// Score WalkSCAN communities without adding the seeds.
    #[arg(long)]
    exclude_seeds: bool,
    /// Also emit one row per community.
    #[arg(long)]
    per_community: bool,
    /// Output CSV; a `.meta.json` sidecar is written next to it. Stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ToyArgs {
    #[arg(long)]
    n1: usize,
    #[arg(long)]
    n2: usize,
    #[arg(long)]
    overlap: usize,
    /// Seeds in C1 \ C2.
    #[arg(long, default_value_t = 1)]
    a: usize,
    /// Seeds in C1 ∩ C2.
    #[arg(long, default_value_t = 0)]
    b: usize,
    #[arg(long)]
    no_loops: bool,
    #[arg(long, default_value_t = 0)]
    background: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedArgs {
    /// Edge list; omit to embed a two-clique graph given by --toy.
    #[arg(long, conflicts_with = "toy")]
    graph: Option<PathBuf>,
    /// Comma-separated seed ids (original ids).
    #[arg(long)]
    seeds: Option<String>,
    /// `n1,n2,overlap` of a self-loop two-clique graph; seeds come from --a/--b.
    #[arg(long)]
    toy: Option<String>,
    #[arg(long, default_value_t = 1)]
    a: usize,
    #[arg(long, default_value_t = 0)]
    b: usize,
    #[arg(long, default_value_t = walkscan::walkscan::DEFAULT_HORIZON)]
    horizon: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Comma-separated seed ids (original ids).
    #[arg(long)]
    seeds: String,
    /// One of pr, prt, lr, ws, ws-expert, ws-merge.
    #[arg(long)]
    algo: String,
    #[arg(long, default_value_t = walkscan::ranking::DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long, default_value_t = walkscan_bench::config::DEFAULT_DISTANCE)]
    distance: f64,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = walkscan::walkscan::DEFAULT_EXPERT_K)]
    expert_k: usize,
    #[arg(long)]
    degree_normalized: bool,
    #[arg(long)]
    exclude_seeds: bool,
}

fn config(kind: ExperimentKind, c: &Common) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::new(kind);
    cfg.graph = Some(c.graph.clone());
    cfg.communities = Some(c.communities.clone());
    cfg.max_communities = c.max_communities;
    if let Some(list) = &c.algos {
        cfg.algorithms = parse_algorithms(list)?;
    }
    cfg.alpha = c.alpha;
    if let Some(t) = c.horizon {
        cfg.rank_horizon = t;
        cfg.ws_horizon = t;
    }
    cfg.distance = c.distance;
    cfg.threshold = match c.lambda {
        Some(l) => ThresholdSource::Fixed(l),
        None => ThresholdSource::Calibrated,
    };
    cfg.expert_k = c.expert_k;
    cfg.seed_fraction = c.seed_fraction;
    cfg.runs = c.runs;
    cfg.rng_seed = c.rng_seed;
    cfg.degree_normalized = c.degree_normalized;
    cfg.include_seeds = !c.exclude_seeds;
    cfg.per_community = c.per_community;
    Ok(cfg)
}

fn bench(cfg: ExperimentConfig, out: Option<&Path>) -> Result<()> {
    cfg.validate()?;
    let data = Dataset::load(&cfg)?;
    let outcome = run_experiment(&cfg, &data)?;
    match out {
        Some(path) => write_outcome(path, &cfg, &outcome),
        None => write_rows(&outcome.rows, std::io::stdout().lock()),
    }
}

fn write_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => Ok(std::io::stdout().lock().write_all(text.as_bytes())?),
    }
}

fn parse_seeds(g: &Graph, list: &str) -> Result<NodeSet> {
    let mut out = Vec::new();
    for token in list.split(',').filter(|t| !t.trim().is_empty()) {
        let id: u64 = token.trim().parse().with_context(|| format!("invalid seed id {token:?}"))?;
        match g.dense_id(id) {
            Some(v) => out.push(v),
            None => bail!("seed {id} is not a node of the graph"),
        }
    }
    ensure!(!out.is_empty(), "empty seed set");
    Ok(out.into_iter().collect())
}

fn toy(args: &ToyArgs) -> Result<()> {
    let spec = TwoCliqueSpec {
        n1: args.n1,
        n2: args.n2,
        overlap: args.overlap,
        with_self_loops: !args.no_loops,
        n_background: args.background,
    };
    let report = toy_report(&spec, &SeedSplit { a: args.a, b: args.b })?;
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    write_text(args.out.as_deref(), &text)
}

fn embed(args: &EmbedArgs) -> Result<()> {
    let mut buf = Vec::new();
    match (&args.graph, &args.toy) {
        (Some(path), None) => {
            let g = load_edge_list(path)?;
            let seeds = parse_seeds(&g, args.seeds.as_deref().unwrap_or(""))?;
            export_embedding(&g, &seeds, args.horizon, None, &mut buf)?;
        }
        (None, Some(shape)) => {
            let parts = parse_range(shape)?;
            ensure!(parts.len() == 3, "--toy expects n1,n2,overlap");
            let spec = TwoCliqueSpec::new(parts[0], parts[1], parts[2]);
            let split = SeedSplit { a: args.a, b: args.b };
            split.validate(&spec)?;
            let toy = generate_two_cliques(&spec)?;
            export_embedding(&toy.graph, &split.seeds(&spec), args.horizon, Some(&toy.regions), &mut buf)?;
        }
        _ => bail!("give either --graph with --seeds, or --toy"),
    }
    write_text(args.out.as_deref(), std::str::from_utf8(&buf)?)
}

#[derive(Serialize)]
struct RunReport {
    algorithm: &'static str,
    seeds: Vec<u64>,
    /// Detected communities in output order (one for pr, prt, lr and ws).
    communities: Vec<Vec<u64>>,
}

fn run(args: &RunArgs) -> Result<()> {
    let algo: Algorithm = args.algo.parse()?;
    let g = load_edge_list(&args.graph)?;
    let seeds = parse_seeds(&g, &args.seeds)?;
    let horizon = args.horizon.unwrap_or(if algo.is_walkscan() {
        walkscan::walkscan::DEFAULT_HORIZON
    } else {
        walkscan::ranking::DEFAULT_HORIZON
    });
    let params = walkscan::PageRankParams { alpha: args.alpha, horizon, degree_normalized: args.degree_normalized };
    let include = !args.exclude_seeds;
    let sets: Vec<NodeSet> = match algo {
        Algorithm::Pr => vec![sweep(&g, &seeds, &rank_by_score(&pagerank_scores(&g, &seeds, &params)?))],
        Algorithm::Prt => {
            let Some(lambda) = args.lambda else { bail!("prt needs --lambda") };
            vec![pagerank_threshold(&pagerank_scores(&g, &seeds, &params)?, &seeds, lambda)]
        }
        Algorithm::Lr => vec![lexrank_community(&g, &seeds, horizon)?],
        _ => {
            let ws = walkscan::WalkscanParams { horizon, distance: args.distance, include_seeds: include };
            let comms = run_walkscan(&g, &seeds, &ws)?;
            let keep = if algo == Algorithm::Ws { 1 } else { args.expert_k.max(1) };
            let list: Vec<NodeSet> = comms
                .iter()
                .take(keep)
                .map(|c| if include { c.members.union(&seeds) } else { c.members.clone() })
                .collect();
            if list.is_empty() {
                vec![seeds.clone()]
            } else {
                list
            }
        }
    };
    let ids = |s: &NodeSet| s.iter().map(|v| g.external_id(v)).collect::<Vec<u64>>();
    let report = RunReport { algorithm: algo.name(), seeds: ids(&seeds), communities: sets.iter().map(ids).collect() };
    println!("{}", serde_json::to_string(&report)?);
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Bench(Bench::Single(c)) => bench(config(ExperimentKind::Single, &c)?, c.out.as_deref()),
        Command::Bench(Bench::RandomSeeds { common, k_range }) => {
            let mut cfg = config(ExperimentKind::RandomSeeds, &common)?;
            cfg.k_range = parse_range(&k_range)?;
            bench(cfg, common.out.as_deref())
        }
        Command::Bench(Bench::LocalSeeds { common, l_range }) => {
            let mut cfg = config(ExperimentKind::LocalSeeds, &common)?;
            cfg.l_range = parse_range(&l_range)?;
            bench(cfg, common.out.as_deref())
        }
        Command::Bench(Bench::DSweep { common, d_grid }) => {
            let mut cfg = config(ExperimentKind::DSweep, &common)?;
            cfg.d_grid = match d_grid {
                Some(list) => list
                    .split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| t.trim().parse::<f64>().with_context(|| format!("invalid distance {t:?}")))
                    .collect::<Result<_>>()?,
                None => log_grid(1e-3, 1.0, 13),
            };
            bench(cfg, common.out.as_deref())
        }
        Command::Calibrate(c) => bench(config(ExperimentKind::Calibrate, &c)?, c.out.as_deref()),
        Command::Toy(args) => toy(&args),
        Command::Embed(args) => embed(&args),
        Command::Run(args) => run(&args),
    }
}

#[derive(Serialize)]
struct ErrorLine {
    error: String,
    kind: &'static str,
}

fn fail(kind: &'static str, error: String, code: u8) -> ExitCode {
    let line = serde_json::to_string(&ErrorLine { error, kind }).expect("plain strings serialize");
    eprintln!("{line}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.to_string().trim().to_string(), 2),
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail("runtime", format!("{e:#}"), 1),
    }
}
