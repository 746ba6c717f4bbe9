//! Worked examples whose expected values come from independent computations
//! in this file (brute-force 1-NN, blob membership, counting).

use albench::classifier::MlpConfig;
use albench::contrastive::{encode, train_encoder, EncoderTraining, NtXentConfig};
use albench::dataset::{gen_synthetic, split_pool, EmbeddingPool, SyntheticSpec};
use albench::geometry::{choose_k_by_silhouette, kmeans_pp, KMeansOptions};
use albench::orchestrator::{compare, probe, run_experiment, ExperimentConfig, Termination};
use albench::strategies::{StrategyKind, StrategyParams};

fn one_nn_accuracy(pool: &EmbeddingPool, train: &[usize], test: &[usize]) -> f64 {
    let d = |a: &[f32], b: &[f32]| -> f64 { a.iter().zip(b).map(|(x, y)| ((x - y) as f64).powi(2)).sum() };
    let hits = test
        .iter()
        .filter(|&&q| {
            let mut best = train[0];
            for &t in train {
                if d(pool.row(q), pool.row(t)) < d(pool.row(q), pool.row(best)) {
                    best = t;
                }
            }
            pool.label(best) == pool.label(q)
        })
        .count();
    hits as f64 / test.len() as f64
}

fn quick_mlp() -> MlpConfig {
    MlpConfig {
        hidden_dims: vec![32],
        epochs: 30,
        ..MlpConfig::new(1, 2)
    }
}

#[test]
fn tight_blobs_are_perfectly_nearest_neighbor_separable() {
    let pool = gen_synthetic(&SyntheticSpec {
        classes: 6,
        dim: 8,
        per_class: 50,
        spread: 0.01,
        separation: 10.0,
        seed: 4,
    })
    .unwrap();
    let split = split_pool(&pool, 0.2, 1).unwrap();
    assert_eq!(one_nn_accuracy(&pool, &split.unlabeled, &split.test), 1.0);
}

#[test]
fn kmeans_recovers_two_blobs() {
    let pool = gen_synthetic(&SyntheticSpec {
        classes: 2,
        dim: 3,
        per_class: 40,
        spread: 0.1,
        separation: 10.0,
        seed: 8,
    })
    .unwrap();
    let c = kmeans_pp(pool.points(), 2, 3, KMeansOptions::default()).unwrap();
    let flip = c.assignment[0] != pool.label(0).unwrap();
    for i in 0..pool.len() {
        assert_eq!(c.assignment[i] != pool.label(i).unwrap(), flip, "point {i}");
    }
    let (k, _) = choose_k_by_silhouette(pool.points(), 2, 6, 3, KMeansOptions::default()).unwrap();
    assert_eq!(k, 2);
}

#[test]
fn contrastive_encoding_beats_raw_nearest_neighbor_on_overlapping_classes() {
    // Class signal spans 4 of 32 dimensions; the other 28 carry only noise
    // that dominates raw distances. Jitter matching the within-class spread
    // teaches the encoder to discount those directions.
    let pool = gen_synthetic(&SyntheticSpec {
        classes: 4,
        dim: 32,
        per_class: 150,
        spread: 1.0,
        separation: 3.0,
        seed: 11,
    })
    .unwrap();
    let split = split_pool(&pool, 0.2, 5).unwrap();
    let opts = EncoderTraining {
        jitter: 1.0,
        ..EncoderTraining::default()
    };
    let (encoder, report) =
        train_encoder::<f64>(&pool, 64, 16, &NtXentConfig { temperature: 0.5 }, 300, 3, &opts).unwrap();
    assert!(report.final_loss < report.initial_loss);
    let encoded = encode(&encoder, &pool).unwrap();
    let raw = one_nn_accuracy(&pool, &split.unlabeled, &split.test);
    let enc = one_nn_accuracy(&encoded, &split.unlabeled, &split.test);
    assert!(enc >= raw, "encoded {enc} < raw {raw}");
}

#[test]
fn probe_accuracy_grows_with_fraction() {
    let pool = gen_synthetic(&SyntheticSpec {
        classes: 10,
        dim: 32,
        per_class: 300,
        spread: 1.0,
        separation: 6.0,
        seed: 7,
    })
    .unwrap();
    let mlp = MlpConfig::new(1, 2);
    let accs: Vec<f64> = [0.02, 0.05, 0.10]
        .iter()
        .map(|&f| probe(&pool, f, 1, &mlp, 0.2).unwrap())
        .collect();
    assert!(accs.windows(2).all(|w| w[0] <= w[1]), "{accs:?}");
}

#[test]
fn unreached_target_spends_the_full_label_budget() {
    let pool = gen_synthetic(&SyntheticSpec {
        classes: 4,
        dim: 8,
        per_class: 200,
        spread: 2.0,
        separation: 2.0,
        seed: 2,
    })
    .unwrap();
    let cfg = ExperimentConfig {
        target_accuracy: 1.0,
        mlp: MlpConfig {
            epochs: 5,
            ..quick_mlp()
        },
        ..ExperimentConfig::new(StrategyKind::Fps, 1)
    };
    let rec = run_experiment(&cfg, &pool).unwrap();
    assert_eq!(rec.status, Termination::BudgetExhausted);
    assert_eq!(rec.rows.len(), 9);
    assert_eq!(rec.final_labels(), 512);
    assert_eq!(rec.labels_to_target(1.0), None);
}

#[test]
fn compare_writes_the_full_grid() {
    let pool = gen_synthetic(&SyntheticSpec {
        classes: 3,
        dim: 6,
        per_class: 40,
        spread: 1.0,
        separation: 3.0,
        seed: 6,
    })
    .unwrap();
    let template = ExperimentConfig {
        budget_per_round: 6,
        rounds_max: 3,
        mlp: quick_mlp(),
        params: StrategyParams {
            neighborhood_k: 3,
            passes_t: 5,
            osal_k_range: (2, 4),
            ..StrategyParams::default()
        },
        ..ExperimentConfig::new(StrategyKind::Random, 0)
    };
    let dir = tempfile::tempdir().unwrap();
    let seeds = [1, 2, 3, 4, 5];
    let cmp = compare(&template, &pool, &StrategyKind::ALL, &seeds, 3, Some(dir.path())).unwrap();
    assert_eq!(cmp.runs.len(), 20);
    let runs = std::fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with("run_"))
        .count();
    assert_eq!(runs, 20);
    for f in ["aggregate.csv", "labels_to_target.csv", "curves.svg"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }

    let agg = std::fs::read_to_string(dir.path().join("aggregate.csv")).unwrap();
    let mut lines = agg.lines();
    assert_eq!(lines.next(), Some("strategy,round,mean_acc,min_acc,max_acc,n_runs"));
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let (mean, min, max): (f64, f64, f64) = (f[2].parse().unwrap(), f[3].parse().unwrap(), f[4].parse().unwrap());
        assert!(min <= mean && mean <= max, "{line}");
    }
    // Round-0 mean is the plain average of the per-run round-0 accuracies.
    for s in StrategyKind::ALL {
        let want = cmp
            .runs
            .iter()
            .filter(|r| r.strategy == s)
            .map(|r| r.rows[0].test_accuracy)
            .sum::<f64>()
            / 5.0;
        let got = cmp.aggregate.iter().find(|a| a.strategy == s && a.round == 0).unwrap();
        assert!((got.mean_acc - want).abs() < 1e-12);
    }

    let svg = std::fs::read_to_string(dir.path().join("curves.svg")).unwrap();
    assert_eq!(svg.matches("<polyline class=\"mean\"").count(), 4);
    assert_eq!(svg.matches("<polygon class=\"band\"").count(), 4);
    assert_eq!(svg.matches("class=\"target\"").count(), 1);
}
