use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use tsw_core::pipeline::{alpha_sweep, default_alpha_grid, run_pipeline, PipelineConfig, Preset, WalkCount};
use tsw_core::Error;

/// Temporal-structural random walk embeddings for dynamic networks.
#[derive(Debug, Parser)]
#[command(name = "tsw", version)]
struct Cli {
    /// Edge list with `src dst t` lines.
    #[arg(long)]
    input: PathBuf,

    /// Node labels with `node class` lines; enables evaluation.
    #[arg(long)]
    labels: Option<PathBuf>,

    #[arg(long)]
    directed: bool,

    /// Dataset preset: hospital, workplace, enron, ppi-aging, brain.
    #[arg(long)]
    preset: Option<String>,

    #[arg(long, default_value_t = 32)]
    dims: usize,

    /// Maximum nodes per walk.
    #[arg(long)]
    walk_length: Option<usize>,

    /// Total number of walks (default 10 per node).
    #[arg(long, conflicts_with = "walks_per_node")]
    num_walks: Option<usize>,

    #[arg(long)]
    walks_per_node: Option<usize>,

    #[arg(long, default_value_t = 10)]
    window: usize,

    #[arg(long, default_value_t = 0.05)]
    alpha: f64,

    /// Sweep alpha; takes comma-separated values, or the 41-point default grid when given without a value.
    #[arg(long, num_args = 0..=1, default_missing_value = "default")]
    alpha_sweep: Option<String>,

    #[arg(long)]
    graphlet_nodes: Option<usize>,

    #[arg(long)]
    graphlet_events: Option<usize>,

    #[arg(long)]
    delta_t: Option<u64>,

    #[arg(long)]
    topk: Option<usize>,

    /// Add reverse similarity edges after top-k selection.
    #[arg(long)]
    symmetrize: bool,

    /// Temporal steps require t' > t instead of t' >= t.
    #[arg(long)]
    strict_time: bool,

    #[arg(long, default_value_t = 0.9)]
    variance_target: f64,

    /// Scale D-GDV columns to unit variance before PCA.
    #[arg(long)]
    unit_variance: bool,

    #[arg(long, default_value_t = 5)]
    negatives: usize,

    #[arg(long, default_value_t = 5)]
    epochs: usize,

    #[arg(long, default_value_t = 0.025)]
    learning_rate: f64,

    #[arg(long, default_value_t = 5)]
    folds: usize,

    #[arg(long, default_value_t = 1.0)]
    l2: f64,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long, env = "TSW_THREADS")]
    threads: Option<usize>,

    #[arg(long, default_value = "tsw-out")]
    out_dir: PathBuf,
}

fn parse_grid(s: &str) -> Result<Vec<f64>, Error> {
    if s == "default" {
        return Ok(default_alpha_grid());
    }
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad alpha value `{x}`")))
        })
        .collect()
}

fn build_config(cli: &Cli) -> Result<PipelineConfig, Error> {
    let mut cfg = PipelineConfig::new(&cli.input, &cli.out_dir);
    if let Some(name) = &cli.preset {
        let p = Preset::from_name(name).ok_or_else(|| Error::Config(format!("unknown preset `{name}`")))?;
        cfg.apply_preset(p);
    }
    cfg.labels = cli.labels.clone();
    cfg.directed = cli.directed;
    if let Some(v) = cli.walk_length {
        cfg.walk_length = v;
    }
    if let Some(v) = cli.graphlet_nodes {
        cfg.census.max_nodes = v;
    }
    if let Some(v) = cli.graphlet_events {
        cfg.census.max_events = v;
    }
    if let Some(v) = cli.delta_t {
        cfg.census.delta_t = v;
    }
    if let Some(v) = cli.topk {
        cfg.topk = v;
    }
    cfg.num_walks = match (cli.num_walks, cli.walks_per_node) {
        (Some(n), _) => WalkCount::Total(n),
        (None, Some(k)) => WalkCount::PerNode(k),
        (None, None) => WalkCount::PerNode(10),
    };
    cfg.alpha = cli.alpha;
    cfg.symmetrize = cli.symmetrize;
    cfg.strict_time = cli.strict_time;
    cfg.pca.variance_target = cli.variance_target;
    cfg.pca.unit_variance = cli.unit_variance;
    cfg.train.dims = cli.dims;
    cfg.train.window = cli.window;
    cfg.train.negatives = cli.negatives;
    cfg.train.epochs = cli.epochs;
    cfg.train.learning_rate = cli.learning_rate;
    cfg.cv.folds = cli.folds;
    cfg.cv.logreg.l2 = cli.l2;
    cfg.seed = cli.seed;
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), Error> {
    let cfg = build_config(cli)?;
    if let Some(grid) = &cli.alpha_sweep {
        let grid = parse_grid(grid)?;
        let rows = alpha_sweep(&cfg, &grid)?;
        println!("alpha\tmean_ap\tstd_ap\tmean_auroc\tstd_auroc");
        for r in rows {
            println!(
                "{:.3}\t{:.4}\t{:.4}\t{:.4}\t{:.4}",
                r.alpha, r.mean_ap, r.std_ap, r.mean_auroc, r.std_auroc
            );
        }
        println!("wrote {}", cfg.out_dir.join("alpha_sweep.tsv").display());
        return Ok(());
    }
    let out = run_pipeline(&cfg)?;
    println!("{}", out.graph_summary);
    println!("{}", out.census_summary);
    println!(
        "pca_components={} similarity_edges={} walks={}",
        out.pca_components, out.similarity_edges, out.num_walks
    );
    let c = out.counters;
    println!(
        "temporal_steps={} structural_steps={} early_terminations={}",
        c.temporal_steps, c.structural_steps, c.early_terminations
    );
    for (stage, reused) in &out.stages {
        println!("stage {stage}: {}", if *reused { "cached" } else { "ran" });
    }
    if let Some(r) = &out.report {
        print!("{}", r.table());
    } else if let Some(e) = out.eval {
        println!(
            "macro-AP {:.4} ± {:.4}  macro-AUROC {:.4} ± {:.4}",
            e.mean_ap, e.std_ap, e.mean_auroc, e.std_auroc
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
