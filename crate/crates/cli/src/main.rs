//! `albench` — command-line front end for the active-learning benchmark.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use albench::classifier::MlpConfig;
use albench::contrastive::{encode, train_encoder, EncoderTraining, NtXentConfig};
use albench::dataset::{self, apply_imbalance, gen_synthetic, load_pool, save_pool, SyntheticSpec};
use albench::orchestrator::{compare, probe, run_experiment, ExperimentConfig};
use albench::strategies::{StrategyKind, StrategyParams};
use albench::{Error, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "albench", version, about = "Deterministic active-learning benchmarks over embedding pools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a labeled synthetic Gaussian-blob pool.
    Gen(GenArgs),
    /// Subsample classes of a pool by per-class retention ratios.
    Imbalance(ImbalanceArgs),
    /// Run one active-learning experiment and write its per-round CSV.
    Run(RunArgs),
    /// Run a strategy × seed grid; write run CSVs, aggregates and an SVG plot.
    Compare(CompareArgs),
    /// Train on stratified random fractions and print `fraction,accuracy`.
    Probe(ProbeArgs),
    /// Train a toy contrastive encoder on a pool and write the encoded pool.
    SslToy(SslToyArgs),
}

#[derive(Args, Debug)]
struct SeedArg {
    /// Master seed; falls back to $ALBENCH_SEED.
    #[arg(long, env = "ALBENCH_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long, default_value_t = 10)]
    classes: usize,
    #[arg(long, default_value_t = 100)]
    per_class: usize,
    #[arg(long, default_value_t = 32)]
    dim: usize,
    /// Within-class standard deviation.
    #[arg(long, default_value_t = 1.0)]
    spread: f64,
    /// Distance between class centers.
    #[arg(long, default_value_t = 6.0)]
    separation: f64,
    /// Output AEMB file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ImbalanceArgs {
    #[command(flatten)]
    seed: SeedArg,
    /// Input AEMB file.
    #[arg(long)]
    data: PathBuf,
    /// Comma-separated retention ratio per class, each in (0, 1].
    #[arg(long, value_delimiter = ',', required = true)]
    retention: Vec<f64>,
    /// Output AEMB file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Hidden layer widths of the uncertainty MLP, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "128")]
    hidden: Vec<usize>,
    /// Dropout rate after each hidden layer.
    #[arg(long, default_value_t = 0.3)]
    dropout: f64,
    #[arg(long, default_value_t = 0.05)]
    lr: f64,
    #[arg(long, default_value_t = 100)]
    epochs: usize,
    #[arg(long, default_value_t = 32)]
    batch_size: usize,
    /// Fraction of each class held out for testing.
    #[arg(long, default_value_t = 0.2)]
    test_fraction: f64,
}

impl ModelArgs {
    fn mlp(&self) -> MlpConfig {
        MlpConfig {
            hidden_dims: self.hidden.clone(),
            dropout_rate: self.dropout,
            learning_rate: self.lr,
            epochs: self.epochs,
            batch_size: self.batch_size,
            ..MlpConfig::new(1, 2)
        }
    }
}

#[derive(Args, Debug)]
struct LoopArgs {
    /// Input AEMB file.
    #[arg(long)]
    data: PathBuf,
    /// Maximum labeling rounds.
    #[arg(long, default_value_t = 8)]
    rounds: usize,
    /// Labels queried per round.
    #[arg(long, default_value_t = 64)]
    budget: usize,
    /// Stop once test accuracy reaches this value.
    #[arg(long, default_value_t = 0.9)]
    target: f64,
    /// MCFPS skips a neighborhood when every member's certainty exceeds this.
    #[arg(long, default_value_t = 0.8)]
    skip_threshold: f64,
    /// MCFPS neighborhood size.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// MC-dropout forward passes.
    #[arg(long, default_value_t = 20)]
    t: usize,
    /// Draw extra FPS seeds to replace skipped neighborhoods.
    #[arg(long)]
    refill_on_skip: bool,
    /// Smallest k tried by OSAL's silhouette search.
    #[arg(long, default_value_t = 2)]
    osal_kmin: usize,
    /// Largest k tried by OSAL's silhouette search.
    #[arg(long, default_value_t = 10)]
    osal_kmax: usize,
    /// Continue training the previous round's model instead of a cold start.
    #[arg(long)]
    warm_start: bool,
    /// Record wall-clock time in `elapsed_ms` (otherwise 0, keeping outputs reproducible).
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    model: ModelArgs,
}

impl LoopArgs {
    fn config(&self, strategy: StrategyKind, seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            rounds_max: self.rounds,
            budget_per_round: self.budget,
            target_accuracy: self.target,
            test_fraction: self.model.test_fraction,
            mlp: self.model.mlp(),
            params: StrategyParams {
                neighborhood_k: self.k,
                passes_t: self.t,
                skip_threshold: self.skip_threshold,
                osal_k_range: (self.osal_kmin, self.osal_kmax),
                refill_on_skip: self.refill_on_skip,
                ..StrategyParams::default()
            },
            warm_start: self.warm_start,
            record_timing: self.timing,
            ..ExperimentConfig::new(strategy, seed)
        }
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    seed: SeedArg,
    /// One of: random, fps, osal, mcfps.
    #[arg(long, value_parser = parse_strategy)]
    strategy: StrategyKind,
    /// Output CSV; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write OSAL's per-cluster pick-class histogram CSV here.
    #[arg(long)]
    osal_histogram: Option<PathBuf>,
    #[command(flatten)]
    run: LoopArgs,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[command(flatten)]
    seed: SeedArg,
    /// Comma-separated strategy ids.
    #[arg(long, value_delimiter = ',', value_parser = parse_strategy, default_value = "random,fps,osal,mcfps")]
    strategies: Vec<StrategyKind>,
    /// Seeds as an inclusive range `a..b` or a comma list; defaults to five
    /// consecutive seeds starting at --seed.
    #[arg(long, value_parser = parse_seeds)]
    seeds: Option<SeedList>,
    /// Worker threads; outputs do not depend on this.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Output directory.
    #[arg(long)]
    out_dir: PathBuf,
    #[command(flatten)]
    run: LoopArgs,
}

#[derive(Args, Debug)]
struct ProbeArgs {
    #[command(flatten)]
    seed: SeedArg,
    /// Input AEMB file.
    #[arg(long)]
    data: PathBuf,
    /// Comma-separated training fractions, each in (0, 1).
    #[arg(long, value_delimiter = ',', default_value = "0.02,0.05,0.10")]
    fractions: Vec<f64>,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args, Debug)]
struct SslToyArgs {
    #[command(flatten)]
    seed: SeedArg,
    /// Input AEMB file (labels, if any, are carried over but not used).
    #[arg(long)]
    data: PathBuf,
    /// NT-Xent temperature.
    #[arg(long, default_value_t = 0.5)]
    tau: f64,
    #[arg(long, default_value_t = 50)]
    epochs: usize,
    /// Encoder output width.
    #[arg(long, default_value_t = 16)]
    out_dim: usize,
    /// Encoder hidden width.
    #[arg(long, default_value_t = 64)]
    width: usize,
    #[arg(long, default_value_t = 64)]
    batch_size: usize,
    #[arg(long, default_value_t = 0.05)]
    lr: f64,
    /// Standard deviation of the Gaussian view jitter.
    #[arg(long, default_value_t = 0.5)]
    jitter: f64,
    /// Fraction of coordinates zeroed per view.
    #[arg(long, default_value_t = 0.1)]
    mask_frac: f64,
    /// Output AEMB file with the encoded pool.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Debug)]
struct SeedList(Vec<u64>);

fn parse_strategy(s: &str) -> std::result::Result<StrategyKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_seeds(s: &str) -> std::result::Result<SeedList, String> {
    let bad = |t: &str| format!("invalid seed {t:?}");
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad(a))?;
        let b: u64 = b.trim().parse().map_err(|_| bad(b))?;
        if a > b {
            return Err(format!("empty seed range {s}"));
        }
        return Ok(SeedList((a..=b).collect()));
    }
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| bad(t)))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map(SeedList)
}

fn cmd_gen(a: &GenArgs) -> Result<()> {
    let spec = SyntheticSpec {
        classes: a.classes,
        dim: a.dim,
        per_class: a.per_class,
        spread: a.spread,
        separation: a.separation,
        seed: a.seed.seed,
    };
    let pool = gen_synthetic(&spec)?;
    save_pool(&pool, &a.out)?;
    println!(
        "{}: n={} dim={} classes={}",
        a.out.display(),
        pool.len(),
        pool.dim(),
        pool.num_classes()
    );
    Ok(())
}

fn cmd_imbalance(a: &ImbalanceArgs) -> Result<()> {
    let pool = load_pool(&a.data)?;
    let out = apply_imbalance(&pool, &a.retention, a.seed.seed)?;
    save_pool(&out, &a.out)?;
    let counts: Vec<String> = out.class_counts().iter().map(usize::to_string).collect();
    println!("{}: n={} per-class={}", a.out.display(), out.len(), counts.join(","));
    Ok(())
}

fn cmd_run(a: &RunArgs) -> Result<()> {
    let pool = load_pool(&a.run.data)?;
    let record = run_experiment(&a.run.config(a.strategy, a.seed.seed), &pool)?;
    match &a.out {
        Some(path) => {
            record.save_csv(path)?;
            let reached = record
                .labels_to_target(a.run.target)
                .map_or("not reached".to_string(), |n| format!("{n} labels"));
            println!(
                "{}: {} rounds, final accuracy {:.4}, target {}",
                path.display(),
                record.rows.len() - 1,
                record.rows.last().map_or(0.0, |r| r.test_accuracy),
                reached
            );
        }
        None => record.write_csv(io::stdout().lock())?,
    }
    if let Some(path) = &a.osal_histogram {
        let Some(h) = &record.cluster_histogram else {
            return Err(Error::Validation("--osal-histogram requires --strategy osal".into()));
        };
        h.write_csv(fs::File::create(path)?)?;
    }
    Ok(())
}

fn cmd_compare(a: &CompareArgs) -> Result<()> {
    let pool = load_pool(&a.run.data)?;
    let seeds = match &a.seeds {
        Some(SeedList(s)) => s.clone(),
        None => (0..5).map(|i| a.seed.seed + i).collect(),
    };
    let template = a.run.config(StrategyKind::Random, a.seed.seed);
    let cmp = compare(&template, &pool, &a.strategies, &seeds, a.jobs, Some(&a.out_dir))?;
    let mut out = io::stdout().lock();
    for &s in &a.strategies {
        let line = match cmp.mean_labels_to_target(s) {
            Some(m) => format!("{s}: mean labels-to-target {m:.1}"),
            None => format!("{s}: target not reached"),
        };
        writeln!(out, "{line}")?;
    }
    writeln!(out, "wrote {} runs to {}", cmp.runs.len(), display(&a.out_dir))?;
    Ok(())
}

fn cmd_probe(a: &ProbeArgs) -> Result<()> {
    let pool = load_pool(&a.data)?;
    let mlp = a.model.mlp();
    let mut out = io::stdout().lock();
    for &f in &a.fractions {
        let acc = probe(&pool, f, a.seed.seed, &mlp, a.model.test_fraction)?;
        writeln!(out, "{f},{acc:.6}")?;
    }
    Ok(())
}

fn cmd_ssl_toy(a: &SslToyArgs) -> Result<()> {
    let pool = load_pool(&a.data)?;
    let opts = EncoderTraining {
        batch_size: a.batch_size,
        learning_rate: a.lr,
        jitter: a.jitter,
        mask_frac: a.mask_frac,
    };
    let cfg = NtXentConfig { temperature: a.tau };
    let (encoder, report) = train_encoder::<f64>(&pool, a.width, a.out_dim, &cfg, a.epochs, a.seed.seed, &opts)?;
    let encoded = encode(&encoder, &pool)?;
    save_pool(&encoded, &a.out)?;
    if let Some(meta) = dataset::load_sidecar(&a.data)? {
        dataset::save_sidecar(&a.out, &meta)?;
    }
    println!(
        "{}: n={} dim={} nt-xent {:.4} -> {:.4}",
        a.out.display(),
        encoded.len(),
        encoded.dim(),
        report.initial_loss,
        report.final_loss
    );
    Ok(())
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Imbalance(a) => cmd_imbalance(a),
        Command::Run(a) => cmd_run(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Probe(a) => cmd_probe(a),
        Command::SslToy(a) => cmd_ssl_toy(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("albench: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
