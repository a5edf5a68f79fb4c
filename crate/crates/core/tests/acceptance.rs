//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod support;

use std::collections::hash_map::DefaultHasher;
use std::fs;
use std::hash::{Hash, Hasher};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use fedtl::data::{Distribution, Stage};
use fedtl::error::{Error, Result};
use fedtl::fed::{
    derive_seed, federated_average, run_stage, run_two_stage, train_and_evaluate, train_centralized, DataSource,
    FedConfig, PipelineOptions,
};
use fedtl::lenet::{
    decode_weights, encode_weights, init_weights, load_weights, save_weights, Batch, BatchObjective, ModelWeights,
    PARAM_SPECS,
};
use fedtl::metrics::{auc, auc_pair_counting, roc_curve, ConfusionCounts};
use fedtl::tensor::{
    conv2d_backward, conv2d_forward, dense_backward, dense_forward, gradient_check, maxpool2x2_backward,
    maxpool2x2_forward, relu_backward, relu_forward, softmax_cross_entropy, GradCheckOptions, NamedTensors, Objective,
    Tensor,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::table::TABLE_ROWS;

type Check = fn() -> std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

// 1. Published confusion counts reproduce the published rates.
fn metric_regression() -> std::result::Result<String, String> {
    let mut worst = 0.0f64;
    for row in &TABLE_ROWS {
        let [tp, tn, fp, fn_] = row.counts;
        let c = ConfusionCounts::new(tp, tn, fp, fn_);
        let got = [ok(c.precision())?, ok(c.sensitivity())?, ok(c.specificity())?];
        for (name, (g, p)) in ["precision", "sensitivity", "specificity"]
            .iter()
            .zip(got.iter().zip(row.published))
        {
            let d = (g - p).abs();
            worst = worst.max(d);
            ensure!(d <= 5e-5, "{}: {name} {g:.6} vs published {p}", row.label);
        }
    }
    Ok(format!("{} rows, max deviation {worst:.2e}", TABLE_ROWS.len()))
}

// 2. One client, interval one: federated and centralized training agree bit for bit.
fn centralized_equivalence() -> std::result::Result<String, String> {
    let data = ok(DataSource::Synthetic { per_class: 100, seed: 11 }.load(Stage::StageOne))?;
    ensure!(data.len() == 200, "expected 200 examples, got {}", data.len());
    for rounds in [1, 3, 5] {
        let cfg = FedConfig {
            rounds,
            clients: 1,
            interval: 1,
            init_seed: 5,
            shuffle_seed_base: 6,
            ..FedConfig::new(Stage::StageOne)
        };
        let fed = ok(run_stage(&cfg, std::slice::from_ref(&data)))?;
        let central = ok(train_centralized(
            &init_weights(5),
            &data,
            rounds,
            cfg.lr,
            cfg.batch_size,
            cfg.shuffle_seed_base,
        ))?;
        ensure!(fed.weights.bit_eq(&central.weights), "t_e={rounds}: weights differ");
        ensure!(!fed.weights.bit_eq(&fed.initial), "t_e={rounds}: training did not move the weights");
    }
    Ok("t_e in {1,3,5} bit-identical".into())
}

// 3. Analytic gradients against 64-bit central differences.
enum Layer {
    Conv,
    Dense,
    Relu,
    Pool,
    Softmax(usize),
}

/// `sum(r * layer(params))` for a fixed random `r`, or cross-entropy for the softmax.
struct LayerObjective {
    layer: Layer,
    r: Tensor<f64>,
}

impl LayerObjective {
    fn forward(&self, p: &NamedTensors<f64>) -> Result<(Tensor<f64>, Option<u64>)> {
        let x = p.get("input").expect("input");
        Ok(match self.layer {
            Layer::Conv => (conv2d_forward(x, p.get("kernels").unwrap(), p.get("bias").unwrap())?, None),
            Layer::Dense => (dense_forward(x, p.get("weight").unwrap(), p.get("bias").unwrap())?, None),
            Layer::Relu => {
                let mut h = DefaultHasher::new();
                x.data().iter().map(|&v| v > 0.0).collect::<Vec<_>>().hash(&mut h);
                (relu_forward(x), Some(h.finish()))
            }
            Layer::Pool => {
                let (y, idx) = maxpool2x2_forward(x)?;
                let mut h = DefaultHasher::new();
                idx.hash(&mut h);
                (y, Some(h.finish()))
            }
            Layer::Softmax(_) => (x.clone(), None),
        })
    }
}

impl Objective for LayerObjective {
    fn loss(&self, p: &NamedTensors<f64>) -> Result<f64> {
        Ok(self.loss_with_regime(p)?.0)
    }

    fn loss_with_regime(&self, p: &NamedTensors<f64>) -> Result<(f64, Option<u64>)> {
        let (y, regime) = self.forward(p)?;
        let loss = match self.layer {
            Layer::Softmax(label) => softmax_cross_entropy(&y, label)?.loss,
            _ => y.data().iter().zip(self.r.data()).map(|(a, b)| a * b).sum(),
        };
        Ok((loss, regime))
    }

    fn gradient(&self, p: &NamedTensors<f64>) -> Result<NamedTensors<f64>> {
        let x = p.get("input").unwrap();
        let mut g = NamedTensors::new();
        match self.layer {
            Layer::Conv | Layer::Dense => {
                let grads = match self.layer {
                    Layer::Conv => conv2d_backward(x, p.get("kernels").unwrap(), &self.r)?,
                    _ => dense_backward(x, p.get("weight").unwrap(), &self.r)?,
                };
                g.push("input", grads.input.clone());
                for (name, t) in grads.params {
                    g.push(name, t);
                }
            }
            Layer::Relu => g.push("input", relu_backward(x, &self.r)?),
            Layer::Pool => g.push("input", maxpool2x2_backward(&maxpool2x2_forward(x)?.1, &self.r)?),
            Layer::Softmax(label) => g.push("input", softmax_cross_entropy(x, label)?.grad_logits),
        }
        Ok(g)
    }
}

fn random_tensor(rng: &mut ChaCha8Rng, shape: &[usize]) -> Tensor<f64> {
    let n = shape.iter().product();
    Tensor::new(shape.to_vec(), (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

fn layer_case(layer: Layer, seed: u64) -> (LayerObjective, NamedTensors<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = NamedTensors::new();
    let out_shape: Vec<usize> = match layer {
        Layer::Conv => {
            p.push("input", random_tensor(&mut rng, &[2, 8, 8]));
            p.push("kernels", random_tensor(&mut rng, &[3, 2, 3, 3]));
            p.push("bias", random_tensor(&mut rng, &[3]));
            vec![3, 6, 6]
        }
        Layer::Dense => {
            p.push("input", random_tensor(&mut rng, &[12]));
            p.push("weight", random_tensor(&mut rng, &[5, 12]));
            p.push("bias", random_tensor(&mut rng, &[5]));
            vec![5]
        }
        Layer::Relu => {
            p.push("input", random_tensor(&mut rng, &[60]));
            vec![60]
        }
        Layer::Pool => {
            p.push("input", random_tensor(&mut rng, &[2, 6, 6]));
            vec![2, 3, 3]
        }
        Layer::Softmax(_) => {
            p.push("input", random_tensor(&mut rng, &[2]).map(|v| 3.0 * v));
            vec![2]
        }
    };
    let r = random_tensor(&mut rng, &out_shape);
    (LayerObjective { layer, r }, p)
}

fn gradient_verification() -> std::result::Result<String, String> {
    let opts = |seed| GradCheckOptions {
        seed,
        ..GradCheckOptions::default()
    };
    let mut per_layer = Vec::new();
    for (name, make) in [
        ("conv", (|_| Layer::Conv) as fn(u64) -> Layer),
        ("dense", |_| Layer::Dense),
        ("relu", |_| Layer::Relu),
        ("pool", |_| Layer::Pool),
        ("softmax", |s| Layer::Softmax((s % 2) as usize)),
    ] {
        let mut worst = 0.0f64;
        for seed in 0..10 {
            let (obj, p) = layer_case(make(seed), 100 + seed);
            let r = ok(gradient_check(&obj, &p, opts(seed)))?;
            ensure!(r.checked > 0, "{name} seed {seed}: nothing checked");
            ensure!(r.max_relative_error <= 1e-3, "{name} seed {seed}: {r:?}");
            worst = worst.max(r.max_relative_error);
        }
        per_layer.push(format!("{name} {worst:.1e}"));
    }
    let mut worst = 0.0f64;
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let pixels = (0..2 * 784).map(|_| rng.gen_range(0.0f32..1.0)).collect();
        let labels = vec![rng.gen_range(0..2), rng.gen_range(0..2)];
        let batch = Batch::new(Tensor::new(vec![2, 1, 28, 28], pixels).unwrap(), labels).unwrap();
        let obj = BatchObjective::from_batch(&batch);
        let params = init_weights(seed).tensors().cast::<f64>();
        let r = ok(gradient_check(&obj, &params, opts(seed)))?;
        ensure!(r.checked >= 200, "LeNet seed {seed}: only {} entries checked", r.checked);
        ensure!(r.max_relative_error <= 1e-3, "LeNet seed {seed}: {r:?}");
        worst = worst.max(r.max_relative_error);
    }
    Ok(format!("LeNet over 10 seeds max {worst:.1e}; per layer {}", per_layer.join(", ")))
}

// 4. Weighted averaging algebra on random instances.
fn random_model(rng: &mut ChaCha8Rng) -> ModelWeights {
    let mut t = NamedTensors::new();
    for (name, shape) in PARAM_SPECS {
        let n = shape.iter().product();
        t.push(name, Tensor::new(shape.to_vec(), (0..n).map(|_| rng.gen_range(-1.0f32..1.0)).collect()).unwrap());
    }
    ModelWeights::from_tensors(t).unwrap()
}

fn pairs<'a>(a: &'a ModelWeights, b: &'a ModelWeights) -> impl Iterator<Item = (f32, f32)> + 'a {
    a.tensors()
        .iter()
        .zip(b.tensors().iter())
        .flat_map(|((_, x), (_, y))| x.data().iter().copied().zip(y.data().iter().copied()))
}

fn fedavg_algebra() -> std::result::Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..100 {
        let x = random_model(&mut rng);
        let y = random_model(&mut rng);
        let k = rng.gen_range(1..10_000);
        ensure!(ok(federated_average(std::slice::from_ref(&x), &[k]))?.bit_eq(&x), "case {case}: single-client identity");

        let mid = ok(federated_average(&[x.clone(), y.clone()], &[k, k]))?;
        for ((m, _), (a, b)) in pairs(&mid, &mid).zip(pairs(&x, &y)) {
            let expect = (a as f64 + b as f64) / 2.0;
            ensure!((m as f64 - expect).abs() <= 1e-7, "case {case}: mean {m} vs {expect}");
        }

        let weighted = ok(federated_average(&[x.clone(), y.clone()], &[3, 1]))?;
        for ((w, _), (a, b)) in pairs(&weighted, &weighted).zip(pairs(&x, &y)) {
            let expect = (3.0 * a as f64 + b as f64) / 4.0;
            ensure!((w as f64 - expect).abs() <= 1e-7, "case {case}: (3,1) weighting {w} vs {expect}");
        }

        let n = rng.gen_range(1..6);
        let models: Vec<ModelWeights> = (0..n).map(|_| random_model(&mut rng)).collect();
        let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(1..5000)).collect();
        let avg = ok(federated_average(&models, &sizes))?;
        for (name, t) in avg.tensors().iter() {
            for (j, &v) in t.data().iter().enumerate() {
                let vals = models.iter().map(|m| m.get(name).unwrap().data()[j]);
                let lo = vals.clone().fold(f32::INFINITY, f32::min);
                let hi = vals.fold(f32::NEG_INFINITY, f32::max);
                ensure!(v >= lo && v <= hi, "case {case}: {name}[{j}] = {v} outside [{lo}, {hi}]");
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.reverse();
        let permuted: Vec<ModelWeights> = order.iter().map(|&i| models[i].clone()).collect();
        let permuted_sizes: Vec<usize> = order.iter().map(|&i| sizes[i]).collect();
        let again = ok(federated_average(&permuted, &permuted_sizes))?;
        for (a, b) in pairs(&avg, &again) {
            ensure!((a - b).abs() <= f32::EPSILON * a.abs().max(b.abs()), "case {case}: permutation changed {a} to {b}");
        }
    }
    Ok("100 random instances".into())
}

// 5. Trapezoid AUC against the pair-counting statistic.
fn auc_cross_check() -> std::result::Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for case in 0..1000 {
        let n = rng.gen_range(2..300);
        let levels = rng.gen_range(2..50);
        let scores: Vec<f64> = (0..n).map(|_| rng.gen_range(0..levels) as f64 / levels as f64).collect();
        let mut labels: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        labels[0] = 0;
        labels[1] = 1;
        let a = ok(roc_curve(&scores, &labels).and_then(|r| auc(&r)))?;
        let b = ok(auc_pair_counting(&scores, &labels))?;
        worst = worst.max((a - b).abs());
        ensure!((a - b).abs() <= 1e-9, "case {case}: trapezoid {a} vs pairs {b}");
    }
    let exact = |s: &[f64], l: &[u8]| roc_curve(s, l).and_then(|r| auc(&r)).unwrap();
    ensure!(exact(&[0.9, 0.8, 0.3, 0.1], &[1, 1, 0, 0]) == 1.0, "perfect separation");
    ensure!(exact(&[0.5; 6], &[1, 0, 0, 1, 1, 0]) == 0.5, "all tied");
    ensure!(exact(&[0.8, 0.6, 0.4, 0.2], &[1, 0, 1, 0]) == 0.75, "four-point example");
    Ok(format!("1000 instances, max gap {worst:.1e}; analytic cases exact"))
}

// 6. Two-stage pipeline on synthetic data, with a random-init control for stage two.
const SYNTH_PER_CLASS: usize = 1500;

fn seeded(stage: Stage, seed: u64) -> FedConfig {
    FedConfig {
        init_seed: derive_seed(seed, 1),
        shuffle_seed_base: derive_seed(seed, 2),
        ..FedConfig::new(stage)
    }
}

fn synthetic_source(seed: u64) -> DataSource {
    DataSource::Synthetic {
        per_class: SYNTH_PER_CLASS,
        seed: derive_seed(seed, 4),
    }
}

fn options(seed: u64, distribution: Distribution) -> PipelineOptions {
    PipelineOptions {
        distribution,
        data_seed: derive_seed(seed, 3),
        ..PipelineOptions::default()
    }
}

fn end_to_end() -> std::result::Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut transfer = Vec::new();
    let mut control = Vec::new();
    let mut accuracies = Vec::new();
    for seed in 0..3u64 {
        let weights = dir.path().join(format!("stage_one_{seed}.fstw"));
        let one = FedConfig {
            save_to: Some(weights.clone()),
            ..seeded(Stage::StageOne, seed)
        };
        let two = FedConfig {
            pretrained: Some(weights),
            ..seeded(Stage::StageTwo, seed)
        };
        let (source, opts) = (synthetic_source(seed), options(seed, Distribution::Balanced));
        let out = ok(run_two_stage(&one, &two, &source, &opts))?;
        let (a1, a2) = (out.stage_one.report.accuracy, out.stage_two.report.accuracy);
        ensure!(a1 >= 0.9 && a2 >= 0.9, "seed {seed}: accuracies {a1:.4} / {a2:.4}");
        accuracies.push(format!("{a1:.3}/{a2:.3}"));
        transfer.push(out.stage_two.run.history[0].mean_client_loss());

        // same data, shards and seeds, but starting from a fresh init
        let fresh = dir.path().join(format!("fresh_{seed}.fstw"));
        ok(save_weights(&init_weights(two.init_seed), &fresh))?;
        let (train, _) = ok(opts.split(&ok(source.load(Stage::StageTwo))?))?;
        let shards = ok(opts.partition(&train, two.clients))?;
        let ctrl = ok(run_stage(
            &FedConfig {
                rounds: 1,
                pretrained: Some(fresh),
                ..two.clone()
            },
            &shards,
        ))?;
        control.push(ctrl.history[0].mean_client_loss());
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (t, c) = (mean(&transfer), mean(&control));
    ensure!(t <= c, "stage-two first-round loss {t:.4} with transfer vs {c:.4} from scratch");
    Ok(format!(
        "accuracy (stage one/two) {}; first-round loss {t:.4} transferred vs {c:.4} random init",
        accuracies.join(", ")
    ))
}

// 7. Balanced and unbalanced client shards reach similar AUC at interval 5.
fn distribution_robustness() -> std::result::Result<String, String> {
    let seed = 0;
    let data = ok(synthetic_source(seed).load(Stage::StageOne))?;
    let mut aucs = Vec::new();
    for distribution in [Distribution::Balanced, Distribution::Unbalanced] {
        let opts = options(seed, distribution);
        let (train, test) = ok(opts.split(&data))?;
        let cfg = FedConfig {
            interval: 5,
            ..seeded(Stage::StageOne, seed)
        };
        aucs.push(ok(train_and_evaluate(&cfg, &opts, &train, &test))?.report.auc);
    }
    let gap = (aucs[0] - aucs[1]).abs();
    ensure!(gap <= 0.05, "AUC balanced {:.4} vs unbalanced {:.4}", aucs[0], aucs[1]);
    Ok(format!("AUC balanced {:.4}, unbalanced {:.4}, gap {gap:.4}", aucs[0], aucs[1]))
}

// 8. Weight-file round trip and its failure modes.
fn hand_encoded(shape_override: Option<(&str, &[usize])>) -> Vec<u8> {
    let mut out = b"FSTW".to_vec();
    out.extend_from_slice(&1u32.to_le_bytes());
    out.extend_from_slice(&(PARAM_SPECS.len() as u32).to_le_bytes());
    for (name, shape) in PARAM_SPECS {
        let shape = match shape_override {
            Some((n, s)) if n == name => s,
            _ => shape,
        };
        out.extend_from_slice(&(name.len() as u16).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
        out.push(shape.len() as u8);
        for &e in shape {
            out.extend_from_slice(&(e as u32).to_le_bytes());
        }
        for i in 0..shape.iter().product::<usize>() {
            out.extend_from_slice(&(i as f32 * 1e-3).to_le_bytes());
        }
    }
    out
}

fn serialization() -> std::result::Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("w.fstw");
    let w = init_weights(8);
    ok(save_weights(&w, &path))?;
    let back = ok(load_weights(&path))?;
    ensure!(back.bit_eq(&w), "round trip changed the weights");
    ensure!(fs::read(&path).unwrap() == encode_weights(&w), "file bytes differ from the encoding");
    ensure!(ok(decode_weights(&hand_encoded(None)))?.get("fc2.bias").is_some(), "independent encoding rejected");

    let mut bad_magic = encode_weights(&w);
    bad_magic[..4].copy_from_slice(b"NOPE");
    ensure!(matches!(decode_weights(&bad_magic), Err(Error::BadMagic(_))), "corrupted magic");

    let full = encode_weights(&w);
    for cut in [2, 9, 40, full.len() / 2, full.len() - 1] {
        ensure!(
            matches!(decode_weights(&full[..cut]), Err(Error::Truncated(_))),
            "truncation at {cut} bytes"
        );
    }
    let wrong = hand_encoded(Some(("conv2.kernels", &[16, 6, 3, 3])));
    match decode_weights(&wrong) {
        Err(Error::WeightShape { name, .. }) => ensure!(name == "conv2.kernels", "wrong tensor named: {name}"),
        other => return Err(format!("wrong shape gave {other:?}")),
    }
    let mut trailing = encode_weights(&w);
    trailing.push(0);
    ensure!(matches!(decode_weights(&trailing), Err(Error::TrailingBytes(1))), "trailing bytes");
    ensure!(
        matches!(load_weights(dir.path().join("absent.fstw")), Err(Error::WeightFileMissing(_))),
        "missing file"
    );
    Ok("round trip exact; bad magic, truncation, wrong shape, trailing bytes, missing file distinct".into())
}

// 9. CLI reruns produce byte-identical outputs.
fn determinism() -> std::result::Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = |name: &str| dir.path().join(name).display().to_string();
    let (synth, two) = (d("synth"), d("two"));
    let stage_one_weights = Path::new(&two).join("stage_one/weights.fstw").display().to_string();
    let small = ["--synthetic", "40", "--seed", "9"];
    let runs: Vec<(String, Vec<String>)> = vec![
        ("synth".into(), vec!["synth", "--out", &synth, "--per-category", "6", "--side", "40"]),
        ("centralized".into(), vec!["centralized", "--rounds", "2", "--out", &d("central")]),
        ("federated".into(), vec!["federated", "--rounds", "2", "--out", &d("fed")]),
        ("federated --sequential".into(), vec!["federated", "--rounds", "2", "--sequential", "--out", &d("fed_seq")]),
        ("federated --data-dir".into(), vec!["federated", "--rounds", "1", "--clients", "2", "--batch", "4", "--data-dir", &synth, "--out", &d("fed_dir")]),
        ("sweep".into(), vec!["sweep", "--rounds", "1", "--sweep", "1..2", "--out", &d("sweep")]),
        ("two-stage".into(), vec!["two-stage", "--rounds", "2", "--rounds-two", "1", "--out", &two]),
        ("federated stage two".into(), vec!["federated", "--stage", "two", "--rounds", "1", "--pretrained", &stage_one_weights, "--out", &d("fed_two")]),
    ]
    .into_iter()
    .map(|(label, args)| (label, args.into_iter().map(String::from).collect()))
    .collect();
    let mut files = 0;
    let mut outputs = std::collections::BTreeMap::new();
    for (label, mut args) in runs {
        let out = args.iter().position(|a| a == "--out").map(|i| args[i + 1].clone()).unwrap();
        if args[0] != "synth" && !args.iter().any(|a| a == "--data-dir") {
            args.extend(small.iter().map(|s| s.to_string()));
        }
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let (status, a, b) = support::run_twice(&refs, Path::new(&out));
        ensure!(
            status.status.code() == Some(0),
            "{label} exited {:?}: {}",
            status.status.code(),
            String::from_utf8_lossy(&status.stderr)
        );
        ensure!(!a.is_empty(), "{label} wrote nothing");
        ensure!(a == b, "{label}: rerun outputs differ");
        files += a.len();
        outputs.insert(label, a);
    }
    ensure!(
        outputs["federated"] == outputs["federated --sequential"],
        "parallel and sequential client execution differ"
    );
    Ok(format!("8 invocations, {files} files byte-identical on rerun; parallel == sequential"))
}

fn main() {
    let criteria: [(&str, Duration, Check); 9] = [
        ("metric regression against the published tables", Duration::from_secs(1), metric_regression),
        ("centralized-equivalence oracle", Duration::from_secs(60), centralized_equivalence),
        ("gradient verification", Duration::from_secs(120), gradient_verification),
        ("federated averaging algebra", Duration::from_secs(10), fedavg_algebra),
        ("AUC cross-check", Duration::from_secs(10), auc_cross_check),
        ("desk-scale two-stage pipeline", Duration::from_secs(15 * 60), end_to_end),
        ("distribution robustness", Duration::from_secs(15 * 60), distribution_robustness),
        ("weight-file serialization", Duration::from_secs(10), serialization),
        ("CLI determinism", Duration::from_secs(5 * 60), determinism),
    ];
    let mut failures = 0;
    let mut shared_budget_used = Duration::ZERO;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        let started = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let elapsed = started.elapsed();
        // criteria 6 and 7 share one budget
        let (spent, limit) = if n == 6 || n == 7 {
            shared_budget_used += elapsed;
            (shared_budget_used, *budget)
        } else {
            (elapsed, *budget)
        };
        let result = result.and_then(|detail| {
            if spent > limit {
                Err(format!("{detail}; took {spent:.1?}, budget {limit:.0?}"))
            } else {
                Ok(detail)
            }
        });
        match result {
            Ok(detail) => println!("PASS criterion {n}: {name} ({elapsed:.2?}) {detail}"),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {n}: {name} ({elapsed:.2?}) {why}");
            }
        }
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 9 acceptance criteria passed");
}
