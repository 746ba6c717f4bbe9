//! The iterative labeling loop, multi-run comparisons and the subset probe.
//!
//! One run: split the pool into unlabeled/test, then per round
//! train → evaluate → stop on target or round limit → query → label.
//! Round 0 evaluates the untrained model. Labels come from the pool's ground
//! truth. Every random draw is keyed by the master seed, so a run's CSV is a
//! pure function of its configuration and data.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::classifier::MlpConfig;
use crate::dataset::{split_pool, EmbeddingPool, PoolPartition};
use crate::error::{Error, Result};
use crate::plot;
use crate::rng::{self, round_half_up, tag, Rng};
use crate::strategies::{make_strategy, QueryBatch, QueryContext, StrategyKind, StrategyParams};
use crate::Mlp;

pub const RUN_CSV_HEADER: [&str; 7] = [
    "strategy",
    "seed",
    "round",
    "cumulative_labels",
    "test_accuracy",
    "skipped",
    "elapsed_ms",
];
pub const AGGREGATE_CSV_HEADER: [&str; 6] =
    ["strategy", "round", "mean_acc", "min_acc", "max_acc", "n_runs"];

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub strategy: StrategyKind,
    pub rounds_max: usize,
    pub budget_per_round: usize,
    pub target_accuracy: f64,
    pub test_fraction: f64,
    /// Template for the uncertainty model; input width, class count and
    /// init seed are filled in from the pool and master seed.
    pub mlp: MlpConfig,
    pub params: StrategyParams,
    pub master_seed: u64,
    /// Continue training the previous round's model instead of retraining
    /// from the seeded initialization.
    pub warm_start: bool,
    /// Record wall-clock milliseconds; otherwise `elapsed_ms` is written as 0
    /// so outputs stay byte-reproducible.
    pub record_timing: bool,
}

impl ExperimentConfig {
    /// Eight rounds of 64 labels, 90% target accuracy, 80/20 split.
    pub fn new(strategy: StrategyKind, master_seed: u64) -> Self {
        Self {
            strategy,
            rounds_max: 8,
            budget_per_round: 64,
            target_accuracy: 0.90,
            test_fraction: 0.2,
            mlp: MlpConfig::new(1, 2),
            params: StrategyParams::default(),
            master_seed,
            warm_start: false,
            record_timing: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds_max < 1 {
            return Err(Error::validation("rounds_max must be at least 1"));
        }
        if self.budget_per_round < 1 {
            return Err(Error::validation("budget_per_round must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.target_accuracy) {
            return Err(Error::validation("target_accuracy must lie in [0, 1]"));
        }
        self.params.validate()
    }

    fn model_config(&self, pool: &EmbeddingPool) -> MlpConfig {
        MlpConfig {
            input_dim: pool.dim(),
            num_classes: pool.num_classes(),
            weight_init_seed: rng::mix(self.master_seed, tag::INIT),
            ..self.mlp.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    TargetReached,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundRow {
    pub round: usize,
    pub cumulative_labels: usize,
    pub test_accuracy: f64,
    pub skipped: usize,
    pub elapsed_ms: u64,
}

/// Labels of one OSAL cluster's picks, accumulated over a run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClusterHistogram {
    /// `(cluster, class) → picks`.
    pub counts: BTreeMap<(usize, usize), usize>,
}

impl ClusterHistogram {
    pub fn record(&mut self, batch: &QueryBatch, pool: &EmbeddingPool) {
        for d in &batch.diagnostics {
            if let (Some(c), Some(label)) = (d.cluster, pool.label(d.index)) {
                *self.counts.entry((c, label)).or_default() += 1;
            }
        }
    }

    pub fn cluster_total(&self, cluster: usize) -> usize {
        self.counts
            .iter()
            .filter(|((c, _), _)| *c == cluster)
            .map(|(_, n)| n)
            .sum()
    }

    /// Share of a cluster's picks taken by its most frequent class.
    pub fn dominant_share(&self, cluster: usize) -> Option<(usize, f64)> {
        let total = self.cluster_total(cluster);
        self.counts
            .iter()
            .filter(|((c, _), _)| *c == cluster)
            .max_by(|a, b| a.1.cmp(b.1).then(b.0 .1.cmp(&a.0 .1)))
            .map(|((_, class), &n)| (*class, n as f64 / total as f64))
    }

    pub fn clusters(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self.counts.keys().map(|(c, _)| *c).collect();
        c.dedup();
        c
    }

    /// CSV with header `cluster,class,count`.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["cluster", "class", "count"])?;
        for ((c, class), n) in &self.counts {
            out.write_record([c.to_string(), class.to_string(), n.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub strategy: StrategyKind,
    pub seed: u64,
    pub rows: Vec<RoundRow>,
    pub status: Termination,
    /// Present for OSAL runs.
    pub cluster_histogram: Option<ClusterHistogram>,
}

impl RunRecord {
    /// Smallest cumulative label count whose accuracy reached `target`.
    pub fn labels_to_target(&self, target: f64) -> Option<usize> {
        self.rows
            .iter()
            .find(|r| r.test_accuracy >= target)
            .map(|r| r.cumulative_labels)
    }

    pub fn final_labels(&self) -> usize {
        self.rows.last().map_or(0, |r| r.cumulative_labels)
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(RUN_CSV_HEADER)?;
        for r in &self.rows {
            out.write_record([
                self.strategy.id().to_string(),
                self.seed.to_string(),
                r.round.to_string(),
                r.cumulative_labels.to_string(),
                format!("{:.6}", r.test_accuracy),
                r.skipped.to_string(),
                r.elapsed_ms.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(fs::File::create(path)?)
    }
}

/// State visible to an observer after each round.
pub struct RoundSnapshot<'a> {
    pub round: usize,
    pub partition: &'a PoolPartition,
    /// Query issued in this round (absent for round 0).
    pub batch: Option<&'a QueryBatch>,
    /// Indices the evaluated model was trained on.
    pub trained_on: &'a [usize],
}

pub fn run_experiment(cfg: &ExperimentConfig, pool: &EmbeddingPool) -> Result<RunRecord> {
    run_experiment_observed(cfg, pool, &mut |_| {})
}

/// [`run_experiment`] with a callback after every evaluated round.
pub fn run_experiment_observed(
    cfg: &ExperimentConfig,
    pool: &EmbeddingPool,
    observer: &mut dyn FnMut(&RoundSnapshot<'_>),
) -> Result<RunRecord> {
    cfg.validate()?;
    pool.require_labels()?;
    if pool.num_classes() < 2 {
        return Err(Error::validation("experiments need at least two classes"));
    }
    let seed = cfg.master_seed;
    let mut partition = split_pool(pool, cfg.test_fraction, rng::mix(seed, tag::SPLIT))?;
    let initial = Mlp::new(cfg.model_config(pool))?;
    let mut model = initial.clone();
    let mut strategy = make_strategy(cfg.strategy);
    let mut histogram = (cfg.strategy == StrategyKind::Osal).then(ClusterHistogram::default);
    let mut rows = Vec::with_capacity(cfg.rounds_max + 1);

    let start = Instant::now();
    let accuracy = model.evaluate_accuracy(pool, &partition.test)?;
    rows.push(RoundRow {
        round: 0,
        cumulative_labels: 0,
        test_accuracy: accuracy,
        skipped: 0,
        elapsed_ms: elapsed(cfg, start),
    });
    observer(&RoundSnapshot {
        round: 0,
        partition: &partition,
        batch: None,
        trained_on: &[],
    });
    if accuracy >= cfg.target_accuracy {
        return Ok(finish(cfg, rows, Termination::TargetReached, histogram));
    }

    for round in 1..=cfg.rounds_max {
        let start = Instant::now();
        if partition.unlabeled.is_empty() {
            return Ok(finish(cfg, rows, Termination::BudgetExhausted, histogram));
        }
        let budget = cfg.budget_per_round.min(partition.unlabeled.len());
        let batch = strategy.query(&QueryContext {
            pool,
            partition: &partition,
            model: &model,
            budget,
            params: &cfg.params,
            round_seed: rng::mix_all(seed, &[tag::QUERY, round as u64]),
        })?;
        if let Some(h) = histogram.as_mut() {
            h.record(&batch, pool);
        }
        partition.label(&batch.picks)?;
        partition.check(pool.len())?;

        if !partition.labeled.is_empty() {
            let base = if cfg.warm_start { &model } else { &initial };
            model = base.train(pool, &partition.labeled, rng::mix_all(seed, &[tag::TRAIN, round as u64]))?;
        }
        let accuracy = model.evaluate_accuracy(pool, &partition.test)?;
        rows.push(RoundRow {
            round,
            cumulative_labels: partition.labeled.len(),
            test_accuracy: accuracy,
            skipped: batch.skipped.len(),
            elapsed_ms: elapsed(cfg, start),
        });
        observer(&RoundSnapshot {
            round,
            partition: &partition,
            batch: Some(&batch),
            trained_on: &partition.labeled,
        });
        if accuracy >= cfg.target_accuracy {
            return Ok(finish(cfg, rows, Termination::TargetReached, histogram));
        }
    }
    Ok(finish(cfg, rows, Termination::BudgetExhausted, histogram))
}

fn elapsed(cfg: &ExperimentConfig, start: Instant) -> u64 {
    if cfg.record_timing {
        start.elapsed().as_millis() as u64
    } else {
        0
    }
}

fn finish(
    cfg: &ExperimentConfig,
    rows: Vec<RoundRow>,
    status: Termination,
    cluster_histogram: Option<ClusterHistogram>,
) -> RunRecord {
    RunRecord {
        strategy: cfg.strategy,
        seed: cfg.master_seed,
        rows,
        status,
        cluster_histogram,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub strategy: StrategyKind,
    pub round: usize,
    pub mean_acc: f64,
    pub min_acc: f64,
    pub max_acc: f64,
    pub n_runs: usize,
    /// Mean cumulative labels at this round; used as the plot abscissa.
    pub mean_labels: f64,
}

/// Per-strategy, per-round statistics over the runs that reached that round.
/// Strategies appear in first-seen order.
pub fn aggregate(runs: &[RunRecord]) -> Vec<AggregateRow> {
    let mut order: Vec<StrategyKind> = Vec::new();
    for r in runs {
        if !order.contains(&r.strategy) {
            order.push(r.strategy);
        }
    }
    let mut out = Vec::new();
    for s in order {
        let group: Vec<&RunRecord> = runs.iter().filter(|r| r.strategy == s).collect();
        let max_round = group.iter().flat_map(|r| r.rows.iter().map(|row| row.round)).max().unwrap_or(0);
        for round in 0..=max_round {
            let rows: Vec<&RoundRow> = group
                .iter()
                .filter_map(|r| r.rows.iter().find(|row| row.round == round))
                .collect();
            if rows.is_empty() {
                continue;
            }
            let n = rows.len() as f64;
            out.push(AggregateRow {
                strategy: s,
                round,
                mean_acc: rows.iter().map(|r| r.test_accuracy).sum::<f64>() / n,
                min_acc: rows.iter().map(|r| r.test_accuracy).fold(f64::INFINITY, f64::min),
                max_acc: rows.iter().map(|r| r.test_accuracy).fold(f64::NEG_INFINITY, f64::max),
                n_runs: rows.len(),
                mean_labels: rows.iter().map(|r| r.cumulative_labels as f64).sum::<f64>() / n,
            });
        }
    }
    out
}

pub fn write_aggregate_csv(rows: &[AggregateRow], w: impl Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(AGGREGATE_CSV_HEADER)?;
    for r in rows {
        out.write_record([
            r.strategy.id().to_string(),
            r.round.to_string(),
            format!("{:.6}", r.mean_acc),
            format!("{:.6}", r.min_acc),
            format!("{:.6}", r.max_acc),
            r.n_runs.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Result of a strategy × seed grid, runs in declared order.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub runs: Vec<RunRecord>,
    pub aggregate: Vec<AggregateRow>,
    pub target_accuracy: f64,
}

impl Comparison {
    /// Mean labels-to-target per strategy over runs that reached the target.
    pub fn mean_labels_to_target(&self, strategy: StrategyKind) -> Option<f64> {
        let hits: Vec<usize> = self
            .runs
            .iter()
            .filter(|r| r.strategy == strategy)
            .filter_map(|r| r.labels_to_target(self.target_accuracy))
            .collect();
        (!hits.is_empty()).then(|| hits.iter().sum::<usize>() as f64 / hits.len() as f64)
    }

    /// Mean labels-to-target counting unreached runs as `penalty`.
    pub fn mean_labels_to_target_or(&self, strategy: StrategyKind, penalty: usize) -> f64 {
        let vals: Vec<usize> = self
            .runs
            .iter()
            .filter(|r| r.strategy == strategy)
            .map(|r| r.labels_to_target(self.target_accuracy).unwrap_or(penalty))
            .collect();
        vals.iter().sum::<usize>() as f64 / vals.len().max(1) as f64
    }

    /// CSV `strategy,seed,labels_to_target,reached`; the count is empty when unreached.
    pub fn write_labels_to_target(&self, w: impl Write) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["strategy", "seed", "labels_to_target", "reached"])?;
        for r in &self.runs {
            let hit = r.labels_to_target(self.target_accuracy);
            out.write_record([
                r.strategy.id().to_string(),
                r.seed.to_string(),
                hit.map_or(String::new(), |h| h.to_string()),
                hit.is_some().to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn svg(&self) -> String {
        let markers: Vec<(StrategyKind, f64)> = self
            .aggregate
            .iter()
            .map(|r| r.strategy)
            .fold(Vec::new(), |mut acc, s| {
                if !acc.contains(&s) {
                    acc.push(s);
                }
                acc
            })
            .into_iter()
            .filter_map(|s| self.mean_labels_to_target(s).map(|m| (s, m)))
            .collect();
        plot::learning_curves(&self.aggregate, self.target_accuracy, &markers)
    }
}

pub fn run_file_name(strategy: StrategyKind, seed: u64) -> String {
    format!("run_{}_seed{}.csv", strategy.id(), seed)
}

/// Run every (strategy, seed) pair on up to `jobs` threads.
///
/// With `out_dir`, each finished run's CSV is written as it completes, then
/// `aggregate.csv`, `labels_to_target.csv`, `curves.svg` and, for OSAL runs,
/// `osal_clusters_seed<N>.csv`. A failing run aborts the grid after the
/// successful runs' files are written.
pub fn compare(
    template: &ExperimentConfig,
    pool: &EmbeddingPool,
    strategies: &[StrategyKind],
    seeds: &[u64],
    jobs: usize,
    out_dir: Option<&Path>,
) -> Result<Comparison> {
    if strategies.is_empty() || seeds.is_empty() {
        return Err(Error::validation("compare needs at least one strategy and one seed"));
    }
    template.validate()?;
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
    }
    let grid: Vec<(StrategyKind, u64)> = strategies
        .iter()
        .flat_map(|&s| seeds.iter().map(move |&seed| (s, seed)))
        .collect();
    let threads = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::validation(format!("thread pool: {e}")))?;
    let results: Vec<Result<RunRecord>> = threads.install(|| {
        grid.par_iter()
            .map(|&(strategy, seed)| {
                let cfg = ExperimentConfig {
                    strategy,
                    master_seed: seed,
                    ..template.clone()
                };
                let record = run_experiment(&cfg, pool)?;
                if let Some(dir) = out_dir {
                    record.save_csv(dir.join(run_file_name(strategy, seed)))?;
                    if let Some(h) = &record.cluster_histogram {
                        h.write_csv(fs::File::create(dir.join(format!("osal_clusters_seed{seed}.csv")))?)?;
                    }
                }
                Ok(record)
            })
            .collect()
    });
    let runs = results.into_iter().collect::<Result<Vec<_>>>()?;
    let comparison = Comparison {
        aggregate: aggregate(&runs),
        runs,
        target_accuracy: template.target_accuracy,
    };
    if let Some(dir) = out_dir {
        write_aggregate_csv(&comparison.aggregate, fs::File::create(dir.join("aggregate.csv"))?)?;
        comparison.write_labels_to_target(fs::File::create(dir.join("labels_to_target.csv"))?)?;
        fs::write(dir.join("curves.svg"), comparison.svg())?;
    }
    Ok(comparison)
}

/// Output paths written by [`compare`] for a given grid.
pub fn compare_outputs(dir: &Path, strategies: &[StrategyKind], seeds: &[u64]) -> Vec<PathBuf> {
    let mut paths: Vec<PathBuf> = strategies
        .iter()
        .flat_map(|&s| seeds.iter().map(move |&seed| dir.join(run_file_name(s, seed))))
        .collect();
    paths.push(dir.join("aggregate.csv"));
    paths.push(dir.join("labels_to_target.csv"));
    paths.push(dir.join("curves.svg"));
    paths
}

/// Train on a stratified `fraction` of the training split and report test
/// accuracy. Per class the training members are shuffled once per seed and a
/// prefix is taken, so larger fractions contain smaller ones.
pub fn probe(pool: &EmbeddingPool, fraction: f64, seed: u64, mlp: &MlpConfig, test_fraction: f64) -> Result<f64> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::validation(format!("probe fraction {fraction} outside (0, 1)")));
    }
    let labels = pool.require_labels()?;
    let split = split_pool(pool, test_fraction, rng::mix(seed, tag::SPLIT))?;
    let mut by_class = vec![Vec::new(); pool.num_classes()];
    for &i in &split.unlabeled {
        by_class[labels[i] as usize].push(i);
    }
    let mut train = Vec::new();
    for (c, mut members) in by_class.into_iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        let take = round_half_up(members.len() as f64 * fraction);
        if take < 1 {
            return Err(Error::validation(format!(
                "fraction {fraction} leaves class {c} without training samples"
            )));
        }
        Rng::new(rng::mix_all(seed, &[tag::PROBE, c as u64])).shuffle(&mut members);
        train.extend_from_slice(&members[..take]);
    }
    let cfg = MlpConfig {
        input_dim: pool.dim(),
        num_classes: pool.num_classes(),
        weight_init_seed: rng::mix(seed, tag::INIT),
        ..mlp.clone()
    };
    let model = Mlp::new(cfg)?.train(pool, &train, rng::mix(seed, tag::TRAIN))?;
    model.evaluate_accuracy(pool, &split.test)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{gen_synthetic, SyntheticSpec};

    fn pool() -> EmbeddingPool {
        gen_synthetic(&SyntheticSpec {
            classes: 3,
            dim: 4,
            per_class: 30,
            spread: 0.5,
            separation: 6.0,
            seed: 3,
        })
        .unwrap()
    }

    fn cfg(strategy: StrategyKind) -> ExperimentConfig {
        ExperimentConfig {
            budget_per_round: 4,
            rounds_max: 3,
            mlp: MlpConfig {
                hidden_dims: vec![16],
                epochs: 20,
                batch_size: 8,
                ..MlpConfig::new(1, 2)
            },
            params: StrategyParams {
                neighborhood_k: 3,
                passes_t: 4,
                osal_k_range: (2, 4),
                ..StrategyParams::default()
            },
            ..ExperimentConfig::new(strategy, 5)
        }
    }

    #[test]
    fn zero_target_stops_at_round_zero() {
        let c = ExperimentConfig {
            target_accuracy: 0.0,
            ..cfg(StrategyKind::Fps)
        };
        let rec = run_experiment(&c, &pool()).unwrap();
        assert_eq!(rec.rows.len(), 1);
        assert_eq!(rec.final_labels(), 0);
        assert_eq!(rec.status, Termination::TargetReached);
    }

    #[test]
    fn unreachable_target_spends_full_budget() {
        let c = ExperimentConfig {
            target_accuracy: 1.0 + f64::EPSILON,
            ..cfg(StrategyKind::Random)
        };
        assert!(c.validate().is_err());
        let c = ExperimentConfig {
            target_accuracy: 1.0,
            mlp: MlpConfig {
                epochs: 0,
                ..cfg(StrategyKind::Random).mlp
            },
            ..cfg(StrategyKind::Random)
        };
        let rec = run_experiment(&c, &pool()).unwrap();
        assert_eq!(rec.rows.len(), 4);
        assert_eq!(rec.final_labels(), 12);
        assert_eq!(rec.status, Termination::BudgetExhausted);
    }

    #[test]
    fn exhausting_the_pool_labels_what_remains() {
        let small = pool().select(&(0..15).chain(30..45).collect::<Vec<_>>()).unwrap();
        let c = ExperimentConfig {
            budget_per_round: 10,
            rounds_max: 5,
            target_accuracy: 1.0,
            mlp: MlpConfig {
                epochs: 0,
                ..cfg(StrategyKind::Fps).mlp
            },
            ..cfg(StrategyKind::Fps)
        };
        let rec = run_experiment(&c, &small).unwrap();
        // 30 samples, 6 in test, 24 labelable: 10 + 10 + 4.
        let labels: Vec<usize> = rec.rows.iter().map(|r| r.cumulative_labels).collect();
        assert_eq!(labels, vec![0, 10, 20, 24]);
        assert_eq!(rec.status, Termination::BudgetExhausted);
    }

    #[test]
    fn csv_is_reproducible() {
        let p = pool();
        for s in StrategyKind::ALL {
            let a = run_experiment(&cfg(s), &p).unwrap().to_csv_string();
            let b = run_experiment(&cfg(s), &p).unwrap().to_csv_string();
            assert_eq!(a, b);
            assert!(a.starts_with("strategy,seed,round,cumulative_labels,test_accuracy,skipped,elapsed_ms\n"));
        }
    }

    #[test]
    fn aggregate_is_arithmetic_mean() {
        let mk = |seed, accs: &[f64]| RunRecord {
            strategy: StrategyKind::Fps,
            seed,
            rows: accs
                .iter()
                .enumerate()
                .map(|(i, &a)| RoundRow {
                    round: i,
                    cumulative_labels: 4 * i,
                    test_accuracy: a,
                    skipped: 0,
                    elapsed_ms: 0,
                })
                .collect(),
            status: Termination::BudgetExhausted,
            cluster_histogram: None,
        };
        let agg = aggregate(&[mk(1, &[0.1, 0.5, 0.9]), mk(2, &[0.2, 0.7])]);
        assert_eq!(agg.len(), 3);
        assert!((agg[1].mean_acc - 0.6).abs() < 1e-12);
        assert_eq!((agg[1].min_acc, agg[1].max_acc, agg[1].n_runs), (0.5, 0.7, 2));
        assert_eq!(agg[2].n_runs, 1);
    }

    #[test]
    fn probe_validates_fraction() {
        let p = pool();
        let mlp = cfg(StrategyKind::Fps).mlp;
        assert!(probe(&p, 0.0, 1, &mlp, 0.2).is_err());
        assert!(probe(&p, 1.0, 1, &mlp, 0.2).is_err());
        // 24 training samples per class: 0.01 × 24 rounds to 0.
        assert!(matches!(probe(&p, 0.01, 1, &mlp, 0.2), Err(Error::Validation(_))));
        let a = probe(&p, 0.5, 1, &mlp, 0.2).unwrap();
        assert_eq!(a, probe(&p, 0.5, 1, &mlp, 0.2).unwrap());
    }
}
