//! Hybrid classifier: quantum layer oracles, full backward pass against
//! finite differences, training and evaluation bookkeeping.

use std::f64::consts::TAU;

use phaselearn::ansatz::build_checkerboard;
use phaselearn::dataset::{assign_label, SampleRecord};
use phaselearn::model::Model;
use phaselearn::qcnn::{
    evaluate, quantum_jacobian, quantum_layer_closed_form, quantum_layer_forward, train,
    train_samples, write_metrics_csv, QcnnModel, Sample, TrainConfig, OUTPUTS,
};
use phaselearn::threads::with_threads;
use phaselearn::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_samples(count: usize, len: usize, seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| Sample {
            features: (0..len).map(|_| rng.random_range(-1.0..1.0)).collect(),
            label: (i % 2) as u8,
            coupling: i as f64,
        })
        .collect()
}

/// Feature 0 equals the label mapped to ±1; the rest is noise.
fn separable(count: usize, seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let coupling = 0.2 + 1.6 * i as f64 / (count - 1) as f64;
            let label = u8::from(coupling > 1.0);
            let mut features: Vec<f64> = (0..6).map(|_| rng.random_range(-0.3..0.3)).collect();
            features[0] = if label == 1 { 1.0 } else { -1.0 };
            Sample {
                features,
                label,
                coupling,
            }
        })
        .collect()
}

#[test]
fn quantum_layer_normalization_and_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let x: [f64; 3] = std::array::from_fn(|_| rng.random_range(-10.0..10.0));
        let t: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0..TAU));
        let q = quantum_layer_forward(&x, &t);
        let phi: [f64; 3] = std::array::from_fn(|i| x[i] + t[i]);
        let closed = quantum_layer_closed_form(&phi);
        let total: f64 = q.iter().sum::<f64>() + closed[7];
        assert!((total - 1.0).abs() <= 1e-10);
        for j in 0..OUTPUTS {
            assert!((q[j] - closed[j]).abs() <= 1e-12);
            assert!((0.0..=1.0).contains(&q[j]));
        }
        let excluded: f64 = phi.iter().map(|p| (1.0 + p.sin()) / 2.0).product();
        assert!((q.iter().sum::<f64>() - (1.0 - excluded)).abs() <= 1e-12);
    }
}

#[test]
fn quantum_jacobian_matches_closed_form_derivative() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let phi: [f64; 3] = std::array::from_fn(|_| rng.random_range(-4.0..4.0));
        let jac = quantum_jacobian(&phi);
        for q in 0..3 {
            for (j, row) in jac.iter().enumerate() {
                // d/dφ_q of Π_r p_r(bit_r): only the q factor changes, with
                // derivative ±cos φ_q / 2.
                let mut d = if j >> q & 1 == 1 { 0.5 } else { -0.5 } * phi[q].cos();
                for r in (0..3).filter(|&r| r != q) {
                    let one = (1.0 + phi[r].sin()) / 2.0;
                    d *= if j >> r & 1 == 1 { one } else { 1.0 - one };
                }
                assert!((row[q] - d).abs() < 1e-12);
            }
        }
    }
}

fn check_full_gradient(model: &QcnnModel, batch: &[Sample], masks: Option<&[[f64; OUTPUTS]]>) {
    let (_, grad) = model.backward(batch, masks).unwrap();
    let params = model.params();
    assert_eq!(grad.len(), params.len());
    let batch_loss = |p: &[f64]| {
        let mut m = model.clone();
        m.set_params(p).unwrap();
        m.backward(batch, masks).unwrap().0
    };
    let h = 1e-5;
    for k in 0..params.len() {
        let mut plus = params.clone();
        let mut minus = params.clone();
        plus[k] += h;
        minus[k] -= h;
        let fd = (batch_loss(&plus) - batch_loss(&minus)) / (2.0 * h);
        let tol = f64::max(1e-5 * fd.abs(), 1e-9);
        assert!(
            (grad[k] - fd).abs() <= tol,
            "param {k}: backward {} vs fd {fd}",
            grad[k]
        );
    }
}

#[test]
fn backward_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let model = QcnnModel::new(8, 4, 0, 0.5, &mut rng).unwrap();
    let batch = random_samples(5, 8, 32);
    check_full_gradient(&model, &batch, None);
    let masks: Vec<[f64; OUTPUTS]> = batch.iter().map(|_| model.draw_mask(&mut rng)).collect();
    check_full_gradient(&model, &batch, Some(&masks));

    let deep = QcnnModel::new(8, 4, 2, 0.3, &mut rng).unwrap();
    check_full_gradient(&deep, &batch, None);
}

#[test]
fn separable_data_is_learned_perfectly() {
    let data = separable(60, 4);
    let config = TrainConfig {
        epochs: 150,
        learning_rate: 1e-2,
        ..Default::default()
    };
    let (model, report) = train_samples(&data, &data, &config).unwrap();
    assert_eq!(report.test_accuracy, 1.0);
    let eval = evaluate(&model, &data, 0.5).unwrap();
    assert_eq!(eval.accuracy, 1.0);
    let c = eval.crossing(0.5).unwrap();
    assert!((0.97..1.03).contains(&c), "{c}");
}

#[test]
fn evaluation_bookkeeping() {
    let data = random_samples(40, 5, 9);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let model = QcnnModel::new(5, 16, 0, 0.5, &mut rng).unwrap();
    let eval = evaluate(&model, &data, 0.5).unwrap();
    assert_eq!(eval.confusion.iter().flatten().sum::<usize>(), 40);
    assert!((0.0..=1.0).contains(&eval.accuracy));
    assert!(eval
        .curve
        .windows(2)
        .all(|w| w[0].coupling <= w[1].coupling));

    // a constant model above threshold on balanced data is at chance level
    let mut constant = model.zeros_like();
    constant.fc3.bias[0] = 1e-3;
    assert_eq!(evaluate(&constant, &data, 0.5).unwrap().accuracy, 0.5);

    assert!(matches!(
        evaluate(&model, &[], 0.5),
        Err(Error::Argument(_))
    ));
}

fn tiny_records(model: Model, labels: &[f64]) -> Vec<SampleRecord> {
    let a = build_checkerboard(3, 1).unwrap();
    labels
        .iter()
        .enumerate()
        .map(|(i, &c)| SampleRecord {
            model,
            n: 3,
            coupling: c,
            ansatz: a.descriptor(),
            theta: (0..a.n_params()).map(|k| 0.1 * (i + k) as f64).collect(),
            label: assign_label(model, c).unwrap(),
            seed: i as u64,
            augmentation: None,
        })
        .collect()
}

#[test]
fn training_rejects_bad_inputs() {
    let single_class = tiny_records(Model::Tfim, &[0.3, 0.4, 0.5, 0.6]);
    assert!(matches!(
        train(&single_class, &TrainConfig::default()),
        Err(Error::Argument(_))
    ));
    let cfg = TrainConfig {
        epochs: 0,
        ..Default::default()
    };
    let both = tiny_records(Model::Tfim, &[0.3, 1.4, 0.5, 1.6]);
    assert!(matches!(train(&both, &cfg), Err(Error::Config(_))));
}

#[test]
fn augmentation_only_grows_the_training_split() {
    let couplings: Vec<f64> = (0..10).map(|i| -1.8 + 0.16 * i as f64 + 0.01).collect();
    let records = tiny_records(Model::Xxz, &couplings);
    let cfg = TrainConfig {
        epochs: 2,
        augment: true,
        augment_rotations: 2,
        ..Default::default()
    };
    let (_, report) = train(&records, &cfg).unwrap();
    assert_eq!(report.raw_train_size, 8);
    assert_eq!(report.train_size, 8 * 5);
    assert_eq!(report.test_size, 2);
}

#[test]
fn training_is_deterministic_across_thread_counts() {
    let data = random_samples(48, 7, 5);
    let cfg = TrainConfig {
        epochs: 6,
        seed: 12,
        ..Default::default()
    };
    let run = |t| with_threads(t, || train_samples(&data, &data, &cfg).unwrap()).unwrap();
    let (m1, r1) = run(1);
    for t in [2, 4] {
        let (m, r) = run(t);
        assert_eq!(m, m1);
        assert_eq!(r, r1);
    }
    assert_eq!(r1.loss_history.len(), 6);
}

#[test]
fn checkpoint_and_metrics_round_trip() {
    let data = random_samples(20, 4, 6);
    let cfg = TrainConfig {
        epochs: 3,
        extra_blocks: 1,
        ..Default::default()
    };
    let (model, report) = train_samples(&data, &data, &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("model.json");
    model.save(&ckpt).unwrap();
    assert_eq!(QcnnModel::load(&ckpt).unwrap(), model);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&ckpt).unwrap()).unwrap();
    assert_eq!(doc["format_version"], 1);

    let bumped = std::fs::read_to_string(&ckpt)
        .unwrap()
        .replace("\"format_version\": 1", "\"format_version\": 99");
    std::fs::write(&ckpt, bumped).unwrap();
    assert!(matches!(QcnnModel::load(&ckpt), Err(Error::Config(_))));

    let csv = dir.path().join("metrics.csv");
    write_metrics_csv(&csv, &report).unwrap();
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "epoch,train_loss,train_acc");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("1,"));
}
