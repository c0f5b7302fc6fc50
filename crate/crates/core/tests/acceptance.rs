//! Acceptance checks. Prints one `[PASS]` or `[FAIL]` line per criterion and
//! exits non-zero if any fails.
//!
//! Pinned tolerances:
//! * parameter counts: exact
//! * micro-F1 of the published confusion matrix: |x - 0.92049| <= 5e-4;
//!   row percentages within 0.1 percentage points of the printed values
//! * gradients: 64-bit central differences, h = 1e-4, relative error < 1e-4
//!   with magnitudes floored at 1e-5; at most 2% of perturbations may be
//!   skipped for straddling a ReLU kink
//! * synthetic corpus: tiny_resnet test accuracy >= 0.95 within 100 epochs and
//!   600 s; mlp_2x64 < 0.60 under the same limits
//! * fuzzed pipeline: rotation endpoint |y| < 1e-9, pairwise distances within
//!   1e-9, normalized values in [0, 1], repeated builds byte-identical
//! * geo: grid answers within 1e-9 km of brute force; empty neighborhoods
//!   return exactly 20 km / 2500 km
//! * decoder: exact round trip; every single-bit corruption rejected
//! * imbalance: the MLP predicts one class for every test sample; tiny_resnet
//!   predicts at least two

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use aisq::ais::{
    decode_payload, decode_position_report, encode_payload, pack_position_report, parse_sentence, AisRecord,
    NmeaDecoder, NmeaSentence, PositionReport, VesselTrack,
};
use aisq::geo::{GeoGridIndex, GeoPoint, COAST_CELL_KM, HARBOR_CELL_KM};
use aisq::metrics::ConfusionMatrix;
use aisq::par;
use aisq::pipeline::{
    build_dataset, chunk, encode_shard, relative_to_first, rotate_to_zero, segment, ClassLabel, Dataset, GeoContext,
    NormMode, PipelineConfig, Split, Transform,
};
use aisq::synth::{fuzz_tracks, imbalanced_corpus, pattern_corpus, SynthCorpus};
use aisq::tsnet::layers::{BatchNorm1d, ChannelSplit, Conv1d, Dense, Layer, ResidualBlock, Sequential};
use aisq::tsnet::{predict_all, train, BlockSpec, Body, ModelConfig, Network, Tensor, TrainConfig, TrainData};

use common::{check_layer, check_network, FdReport};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("MLP parameter counts", mlp_parameter_counts),
        ("published confusion matrix metrics", published_confusion_matrix),
        ("analytic gradients match finite differences", gradient_checks),
        ("synthetic corpus: residual net learns, MLP does not", synthetic_classification),
        ("fuzzed pipeline invariants", fuzzed_pipeline),
        ("geo index matches brute force", geo_oracle),
        ("decoder round trip and corruption rejection", decoder_checks),
        ("imbalanced data: MLP collapses, residual net does not", imbalance_collapse),
    ];
    let only: Option<usize> = std::env::var("AISQ_ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let t0 = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {n}. {name} ({:.1}s): {}", t0.elapsed().as_secs_f64(), o.detail);
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

// 1 ------------------------------------------------------------------------

fn mlp_parameter_counts() -> Outcome {
    let count = |name: &str| ModelConfig::preset(name, 360).unwrap().parameter_count();
    // 3240 inputs -> 64 -> 64 (-> 64 -> 64) -> 5, weights plus biases
    let oracle2 = (3240 * 64 + 64) + (64 * 64 + 64) + (64 * 5 + 5);
    let oracle4 = (3240 * 64 + 64) + 3 * (64 * 64 + 64) + (64 * 5 + 5);
    let (a, b) = (count("mlp_2x64"), count("mlp_4x64"));
    let built = Network::<f32>::new(ModelConfig::preset("mlp_2x64", 360).unwrap(), 0)
        .unwrap()
        .param_count();
    // published counts, logged but not asserted for the residual presets
    for (name, published) in [
        ("tiny_resnet", 29_125),
        ("shallow_resnet", 440_837),
        ("deep_resnet", 1_327_877),
        ("stretched_deep_resnet", 3_280_645),
        ("split_resnet", 390_701),
        ("total_split_resnet", 364_461),
    ] {
        let cfg = ModelConfig::preset(name, 360).unwrap();
        println!(
            "    {name:<22} depth {:>2}  params {:>9} (published {published}, {:+.1}%)",
            cfg.depth(),
            cfg.parameter_count(),
            100.0 * (cfg.parameter_count() as f64 / published as f64 - 1.0)
        );
    }
    outcome(
        a == 211_909 && b == 220_229 && oracle2 == 211_909 && oracle4 == 220_229 && built == a,
        format!("mlp_2x64 {a}, mlp_4x64 {b} (expected 211909, 220229); built network {built}"),
    )
}

// 2 ------------------------------------------------------------------------

const PUBLISHED_COUNTS: [[u64; 5]; 5] = [
    [97636, 1250, 831, 832, 2135],
    [1669, 24074, 225, 343, 699],
    [1700, 289, 28284, 426, 374],
    [1148, 397, 356, 12296, 344],
    [3032, 637, 270, 284, 37301],
];

const PUBLISHED_ROW_PERCENT: [[f64; 5]; 5] = [
    [95.1, 1.2, 0.8, 0.8, 2.1],
    [6.2, 89.1, 0.8, 1.3, 2.6],
    [5.5, 0.9, 91.0, 1.4, 1.2],
    [7.9, 2.7, 2.4, 84.6, 2.4],
    [7.3, 1.5, 0.7, 0.7, 89.8],
];

fn published_confusion_matrix() -> Outcome {
    let cm = ConfusionMatrix::from_counts(PUBLISHED_COUNTS);
    let micro = cm.micro_f1().unwrap();

    // independent oracle: pooled TP / FP / FN over all classes
    let (mut tp, mut fp, mut fne) = (0u64, 0u64, 0u64);
    for c in 0..5 {
        tp += PUBLISHED_COUNTS[c][c];
        fp += (0..5).filter(|&r| r != c).map(|r| PUBLISHED_COUNTS[r][c]).sum::<u64>();
        fne += (0..5).filter(|&p| p != c).map(|p| PUBLISHED_COUNTS[c][p]).sum::<u64>();
    }
    let (p, r) = (tp as f64 / (tp + fp) as f64, tp as f64 / (tp + fne) as f64);
    let oracle = 2.0 * p * r / (p + r);

    let rows = cm.row_normalize().rows;
    let mut worst = 0.0f64;
    for (got, want) in rows.iter().zip(&PUBLISHED_ROW_PERCENT) {
        for (g, w) in got.iter().zip(want) {
            worst = worst.max((100.0 * g - w).abs());
        }
    }
    let pass = (micro - 0.92049).abs() <= 5e-4 && (micro - oracle).abs() < 1e-12 && worst <= 0.1;
    outcome(
        pass,
        format!("micro-F1 {micro:.5} (independent {oracle:.5}); worst row deviation {worst:.3} pp"),
    )
}

// 3 ------------------------------------------------------------------------

fn rand_tensor(shape: &[usize], rng: &mut ChaCha8Rng) -> Tensor<f64> {
    let n = shape.iter().product();
    Tensor::from_vec(shape, (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

fn rand_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Randomize batch-norm scale and shift so their gradients are not trivial.
fn jitter_params(layer: &mut dyn Layer<f64>, rng: &mut ChaCha8Rng) {
    layer.visit_params_mut(&mut |p, _| p.iter_mut().for_each(|v| *v += rng.random_range(-0.3..0.3)));
}

fn gradient_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut total = FdReport::default();
    let mut configs = Vec::new();
    for case in 0..24 {
        let kind = case % 8;
        let n = rng.random_range(2..4);
        let l = rng.random_range(4..11);
        let (rep, label) = match kind {
            0 => {
                let (cin, cout, k) = (rng.random_range(1..4), rng.random_range(1..4), rng.random_range(1..9));
                let mut layer = Conv1d::<f64>::new(cin, cout, k, &mut rng);
                jitter_params(&mut layer, &mut rng);
                let x = rand_tensor(&[n, cin, l], &mut rng);
                let proj = rand_vec(n * cout * l, &mut rng);
                (check_layer(&mut layer, &x, &proj), format!("conv {cin}->{cout} k{k} L{l}"))
            }
            1 => {
                let (nin, nout) = (rng.random_range(1..12), rng.random_range(1..6));
                let mut layer = Dense::<f64>::new(nin, nout, &mut rng);
                jitter_params(&mut layer, &mut rng);
                let x = rand_tensor(&[n, nin], &mut rng);
                let proj = rand_vec(n * nout, &mut rng);
                (check_layer(&mut layer, &x, &proj), format!("dense {nin}->{nout}"))
            }
            2 => {
                let c = rng.random_range(1..4);
                let mut layer = BatchNorm1d::<f64>::new(c);
                jitter_params(&mut layer, &mut rng);
                let x = rand_tensor(&[n, c, l], &mut rng);
                let proj = rand_vec(n * c * l, &mut rng);
                (check_layer(&mut layer, &x, &proj), format!("batchnorm c{c} L{l}"))
            }
            3 | 4 => {
                let bn = kind == 4;
                let cin = rng.random_range(1..4);
                let width = rng.random_range(1..4);
                let kernels: Vec<usize> = (0..rng.random_range(1..4)).map(|_| rng.random_range(1..9)).collect();
                let mut layer = ResidualBlock::<f64>::new(cin, width, &kernels, bn, &mut rng).unwrap();
                jitter_params(&mut layer, &mut rng);
                let x = rand_tensor(&[n, cin, l], &mut rng);
                let proj = rand_vec(n * width * l, &mut rng);
                (
                    check_layer(&mut layer, &x, &proj),
                    format!("residual {cin}->{width} k{kernels:?} bn={bn}"),
                )
            }
            5 => {
                let c = rng.random_range(2..4);
                let width = rng.random_range(1..3);
                let branches = (0..c)
                    .map(|_| {
                        let mut s = Sequential::new();
                        s.push(ResidualBlock::<f64>::new(1, width, &[3, 2], false, &mut rng).unwrap());
                        s
                    })
                    .collect();
                let mut layer = ChannelSplit::new((0..c).map(|i| (i, 1)).collect(), branches).unwrap();
                jitter_params(&mut layer, &mut rng);
                let x = rand_tensor(&[n, c, l], &mut rng);
                let proj = rand_vec(n * c * width * l, &mut rng);
                (check_layer(&mut layer, &x, &proj), format!("channel split {c}x{width}"))
            }
            _ => {
                let body = match case % 4 {
                    0 | 2 => Body::ResNet {
                        blocks: vec![BlockSpec::standard(3), BlockSpec::standard(3)],
                    },
                    1 => Body::Split {
                        stem: vec![BlockSpec { width: 2, kernels: vec![3, 2] }],
                        trunk: vec![BlockSpec { width: 3, kernels: vec![3] }],
                    },
                    _ => Body::TotalSplit {
                        branch: vec![BlockSpec { width: 2, kernels: vec![5, 3] }],
                    },
                };
                let model = ModelConfig {
                    preset: None,
                    seq_len: l,
                    channels: 3,
                    classes: 4,
                    batch_norm: rng.random_bool(0.5),
                    body,
                };
                let mut net = Network::<f64>::new(model.clone(), rng.random()).unwrap();
                let x = rand_tensor(&[n + 1, 3, l], &mut rng);
                let labels: Vec<usize> = (0..n + 1).map(|_| rng.random_range(0..4)).collect();
                (
                    check_network(&mut net, &x, &labels),
                    format!("network {:?} bn={}", std::mem::discriminant(&model.body), model.batch_norm),
                )
            }
        };
        if rep.max_rel >= 1e-4 {
            println!("    worst case: {label}: {rep:?}");
        }
        total.merge(&rep);
        configs.push(label);
    }
    // an MLP on top
    let mlp = ModelConfig {
        preset: None,
        seq_len: 5,
        channels: 3,
        classes: 3,
        batch_norm: true,
        body: Body::Mlp { hidden: vec![6, 4] },
    };
    let mut net = Network::<f64>::new(mlp, 9).unwrap();
    let x = rand_tensor(&[4, 3, 5], &mut rng);
    total.merge(&check_network(&mut net, &x, &[0, 1, 2, 1]));
    configs.push("mlp".into());

    let pass = configs.len() >= 20 && total.max_rel < 1e-4 && total.skipped_fraction() <= 0.02;
    outcome(
        pass,
        format!(
            "{} configurations, {} gradients checked, {} skipped at kinks ({:.2}%), max relative error {:.2e}",
            configs.len(),
            total.checked,
            total.skipped,
            100.0 * total.skipped_fraction(),
            total.max_rel
        ),
    )
}

// 4 and 8 ------------------------------------------------------------------

struct Splits {
    train: TrainData,
    val: TrainData,
    test: TrainData,
}

fn prepare(corpus: &SynthCorpus) -> Splits {
    let config = PipelineConfig::default();
    let geo = GeoContext::new(&corpus.coast, &corpus.harbors, None, &config).unwrap();
    let ds = build_dataset(&corpus.tracks, &geo, &config).unwrap();
    let data = |s: Split| TrainData::from_sequences(ds.split(s)).unwrap();
    Splits {
        train: data(Split::Train),
        val: data(Split::Val),
        test: data(Split::Test),
    }
}

struct Run {
    accuracy: f64,
    predicted: BTreeSet<usize>,
    epochs: usize,
    seconds: f64,
}

fn run(preset: &str, splits: &Splits, max_epochs: usize) -> Run {
    let model = ModelConfig::preset(preset, 360).unwrap();
    let cfg = TrainConfig {
        max_epochs,
        seed: 11,
        ..TrainConfig::default()
    };
    let t0 = Instant::now();
    let out = train(&model, &cfg, &splits.train, &splits.val).unwrap();
    let seconds = t0.elapsed().as_secs_f64();
    let pred = predict_all(&out.network, &splits.test, 64).unwrap();
    let correct = pred.iter().zip(&splits.test.labels).filter(|(p, y)| p == y).count();
    Run {
        accuracy: correct as f64 / pred.len() as f64,
        predicted: pred.into_iter().collect(),
        epochs: out.history.len(),
        seconds,
    }
}

fn synthetic_classification() -> Outcome {
    let splits = prepare(&pattern_corpus(600, 360, 7));
    let sizes = (splits.train.len(), splits.val.len(), splits.test.len());
    let resnet = run("tiny_resnet", &splits, 100);
    let mlp = run("mlp_2x64", &splits, 100);
    let pass = resnet.accuracy >= 0.95 && resnet.seconds < 600.0 && mlp.accuracy < 0.60 && mlp.seconds < 600.0;
    outcome(
        pass,
        format!(
            "splits {sizes:?}; tiny_resnet {:.3} ({} epochs, {:.0}s); mlp_2x64 {:.3} ({} epochs, {:.0}s)",
            resnet.accuracy, resnet.epochs, resnet.seconds, mlp.accuracy, mlp.epochs, mlp.seconds
        ),
    )
}

fn imbalance_collapse() -> Outcome {
    let splits = prepare(&imbalanced_corpus(300, 360, 0.7, 21));
    let majority = splits.test.labels.iter().filter(|&&y| y == ClassLabel::CargoTanker.index()).count() as f64
        / splits.test.len() as f64;
    let mlp = run("mlp_2x64", &splits, 100);
    let resnet = run("tiny_resnet", &splits, 100);
    let pass = mlp.predicted.len() == 1 && resnet.predicted.len() >= 2;
    outcome(
        pass,
        format!(
            "majority share {majority:.2}; mlp_2x64 predicts classes {:?} (acc {:.3}); tiny_resnet predicts {:?} (acc {:.3})",
            mlp.predicted, mlp.accuracy, resnet.predicted, resnet.accuracy
        ),
    )
}

// 5 ------------------------------------------------------------------------

fn fuzz_geo(rng: &mut ChaCha8Rng) -> (Vec<GeoPoint>, Vec<GeoPoint>) {
    let mut pt = |lat: f64| GeoPoint {
        lat: rng.random_range(-lat..lat),
        lon: rng.random_range(-180.0..180.0),
    };
    let coast = (0..5000).map(|_| pt(89.0)).collect();
    let harbors = (0..140).map(|_| pt(80.0)).collect();
    (coast, harbors)
}

fn dataset_bytes(ds: &Dataset) -> Vec<u8> {
    let mut out = serde_json::to_vec(&ds.manifest).unwrap();
    for s in Split::ALL {
        out.extend(encode_shard(ds.split(s)));
    }
    out
}

fn fuzzed_pipeline() -> Outcome {
    let tracks: Vec<VesselTrack> = fuzz_tracks(10_000, 99);
    let config = PipelineConfig {
        transform: Transform::Rtz,
        ..PipelineConfig::default()
    };
    let rules = config.thresholds.segment_rules();
    let l = config.seq_len;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut problems: Vec<String> = Vec::new();
    let (mut n_segments, mut n_chunks, mut n_rotated, mut n_pairs) = (0usize, 0usize, 0usize, 0usize);
    let mut worst_y = 0.0f64;
    let mut worst_pair = 0.0f64;

    for t in &tracks {
        let segs = segment(t, ClassLabel::CargoTanker, &rules);
        let seg_total: usize = segs.iter().map(|s| s.samples.len()).sum();
        if seg_total != t.records.len() {
            problems.push(format!("mmsi {}: segmentation lost samples", t.mmsi));
        }
        for s in &segs {
            if s.samples.windows(2).any(|w| rules.breaks_between(&w[0], &w[1])) {
                problems.push(format!("mmsi {}: threshold violated inside a segment", t.mmsi));
            }
        }
        for w in segs.windows(2) {
            let (a, b) = (w[0].samples.last().unwrap(), &w[1].samples[0]);
            if !rules.breaks_between(a, b) {
                problems.push(format!("mmsi {}: split without a threshold breach", t.mmsi));
            }
        }
        n_segments += segs.len();
        for s in &segs {
            let out = chunk(s, l, config.thresholds.min_leftover_fraction);
            let kept: usize = out.chunks.iter().map(|c| c.samples.len()).sum();
            if kept + out.discarded_samples != s.samples.len() || out.chunks.iter().any(|c| c.samples.len() > l) {
                problems.push(format!("mmsi {}: chunk conservation", t.mmsi));
            }
            n_chunks += out.chunks.len();
            for c in &out.chunks {
                if c.samples.len() < 2 {
                    continue;
                }
                let pts = relative_to_first(&c.samples);
                let Ok(rot) = rotate_to_zero(&pts) else {
                    continue;
                };
                n_rotated += 1;
                worst_y = worst_y.max(rot.points.last().unwrap().1.abs());
                let m = pts.len();
                let mut check = |i: usize, j: usize| {
                    let d0 = (pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1);
                    let d1 = (rot.points[i].0 - rot.points[j].0).hypot(rot.points[i].1 - rot.points[j].1);
                    worst_pair = worst_pair.max((d0 - d1).abs());
                    n_pairs += 1;
                };
                if m <= 40 {
                    for i in 0..m {
                        for j in i + 1..m {
                            check(i, j);
                        }
                    }
                } else {
                    for _ in 0..200 {
                        check(rng.random_range(0..m), rng.random_range(0..m));
                    }
                }
            }
        }
    }

    let (coast, harbors) = fuzz_geo(&mut rng);
    let geo = GeoContext::new(&coast, &harbors, None, &config).unwrap();
    let build = || build_dataset(&tracks, &geo, &config).unwrap();
    let first = build();
    let second = build();
    par::set_force_sequential(true);
    let sequential = build();
    par::set_force_sequential(false);
    let local_cfg = PipelineConfig {
        transform: Transform::Rtf,
        norm_mode: NormMode::Local,
        ..config.clone()
    };
    let local = build_dataset(&tracks, &geo, &local_cfg).unwrap();

    let mut out_of_range = 0usize;
    let mut values = 0usize;
    for ds in [&first, &local] {
        for s in Split::ALL {
            for seq in ds.split(s) {
                values += seq.values.len();
                out_of_range += seq.values.iter().filter(|v| !(0.0..=1.0).contains(*v)).count();
            }
        }
    }
    let bytes = dataset_bytes(&first);
    let identical = bytes == dataset_bytes(&second) && bytes == dataset_bytes(&sequential);

    let pass = problems.is_empty() && worst_y < 1e-9 && worst_pair < 1e-9 && out_of_range == 0 && identical;
    if let Some(p) = problems.first() {
        println!("    first problem: {p} ({} total)", problems.len());
    }
    outcome(
        pass,
        format!(
            "{} tracks, {n_segments} segments, {n_chunks} chunks, {} sequences kept; max |y_end| {worst_y:.1e}, \
             max pair drift {worst_pair:.1e} over {n_pairs} pairs ({n_rotated} rotations); \
             {out_of_range}/{values} values outside [0,1]; repeated and sequential builds identical: {identical}",
            tracks.len(),
            first.manifest.total_sequences()
        ),
    )
}

// 6 ------------------------------------------------------------------------

/// Haversine on a 6371 km sphere, written out independently of the crate.
fn oracle_km(a: GeoPoint, b: GeoPoint) -> f64 {
    let r = 6371.0f64;
    let (p1, p2) = (a.lat.to_radians(), b.lat.to_radians());
    let s1 = ((p2 - p1) / 2.0).sin();
    let s2 = ((b.lon - a.lon).to_radians() / 2.0).sin();
    2.0 * r * (s1 * s1 + p1.cos() * p2.cos() * s2 * s2).sqrt().min(1.0).asin()
}

fn oracle_min(points: &[GeoPoint], q: GeoPoint, cap: f64) -> f64 {
    points.iter().map(|&p| oracle_km(q, p)).filter(|&d| d <= cap).fold(cap, f64::min)
}

fn geo_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    // half spread over the globe, half clustered around a few centers
    let centers: Vec<GeoPoint> = (0..8)
        .map(|i| GeoPoint {
            lat: [-88.0, -60.0, -20.0, 0.0, 35.0, 62.0, 75.0, 89.0][i],
            lon: [-179.9, -120.0, -45.0, 0.0, 60.0, 120.0, 179.9, 10.0][i],
        })
        .collect();
    let jitter = |c: GeoPoint, spread: f64, rng: &mut ChaCha8Rng| {
        let lat = (c.lat + rng.random_range(-spread..spread)).clamp(-90.0, 90.0);
        let mut lon = c.lon + rng.random_range(-spread..spread);
        if lon > 180.0 {
            lon -= 360.0;
        }
        if lon < -180.0 {
            lon += 360.0;
        }
        GeoPoint { lat, lon }
    };
    let mut points = Vec::with_capacity(10_000);
    for i in 0..10_000 {
        points.push(if i % 2 == 0 {
            GeoPoint {
                lat: rng.random_range(-90.0..=90.0),
                lon: rng.random_range(-180.0..=180.0),
            }
        } else {
            jitter(centers[i % centers.len()], 1.0, &mut rng)
        });
    }
    let queries: Vec<GeoPoint> = (0..1000)
        .map(|i| {
            if i % 2 == 0 {
                jitter(centers[i % centers.len()], 1.5, &mut rng)
            } else {
                GeoPoint {
                    lat: rng.random_range(-90.0..=90.0),
                    lon: rng.random_range(-180.0..=180.0),
                }
            }
        })
        .collect();

    let mut worst = 0.0f64;
    let mut capped = [0usize; 2];
    for (k, cell) in [COAST_CELL_KM, HARBOR_CELL_KM].into_iter().enumerate() {
        let index = GeoGridIndex::build(&points, cell).unwrap();
        let cap = index.query_radius_km();
        let got = index.min_distances(&queries);
        for (q, g) in queries.iter().zip(got) {
            let want = oracle_min(&points, *q, cap);
            worst = worst.max((g - want).abs());
            capped[k] += usize::from(g == cap);
        }
    }

    // nothing within range: points packed near one spot, queries far away
    let cluster: Vec<GeoPoint> = (0..100).map(|_| jitter(GeoPoint { lat: 10.0, lon: 10.0 }, 0.5, &mut rng)).collect();
    let coast = GeoGridIndex::build(&cluster, COAST_CELL_KM).unwrap();
    let harbor = GeoGridIndex::build(&cluster, HARBOR_CELL_KM).unwrap();
    let far_coast = GeoPoint { lat: 12.0, lon: 12.0 };
    let far_harbor = GeoPoint { lat: -60.0, lon: -170.0 };
    let caps_exact = coast.min_distance_within(far_coast) == 20.0 && harbor.min_distance_within(far_harbor) == 2500.0;

    let pass = worst <= 1e-9 && caps_exact;
    outcome(
        pass,
        format!(
            "10000 points, 1000 queries x 2 indexes: max deviation {worst:.1e} km ({} / {} queries capped); \
             empty neighborhoods return 20 km / 2500 km exactly: {caps_exact}",
            capped[0], capped[1]
        ),
    )
}

// 7 ------------------------------------------------------------------------

fn random_report(rng: &mut ChaCha8Rng) -> PositionReport {
    PositionReport {
        message_type: rng.random_range(1..=3),
        mmsi: rng.random_range(0..1 << 30),
        sog: rng.random_range(0..=1022),
        lon: rng.random_range(-108_000_000i64..=108_000_000) as f64 / 600_000.0,
        lat: rng.random_range(-54_000_000i64..=54_000_000) as f64 / 600_000.0,
        cog: rng.random_range(0..3600) as f64 / 10.0,
    }
}

fn tagged_line(s: &NmeaSentence, ts: i64) -> String {
    let block = format!("c:{ts}");
    format!("\\{block}*{:02X}\\{s}", aisq::ais::checksum(&block))
}

fn decoder_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut mismatches = 0;
    let mut lines = Vec::new();
    for _ in 0..1000 {
        let r = random_report(&mut rng);
        let (payload, fill) = encode_payload(&pack_position_report(&r));
        let sentence = NmeaSentence::new("AIVDM", 1, 1, None, Some('B'), &payload, fill);
        let parsed = parse_sentence(&sentence.to_string()).unwrap();
        let back = decode_position_report(&decode_payload(&parsed.payload, parsed.fill_bits).unwrap()).unwrap();

        let ts = rng.random_range(1_000_000_000..2_000_000_000);
        let line = tagged_line(&sentence, ts);
        let rec = NmeaDecoder::default().push_line(&line);
        let expected = AisRecord::new(r.mmsi, ts, r.lat, r.lon, r.sog, r.cog, None).unwrap();
        if back != r || rec != Some(expected) {
            mismatches += 1;
        }
        lines.push(line);
    }

    let mut flips = 0usize;
    let mut accepted = 0usize;
    for line in &lines {
        let bytes = line.as_bytes();
        for i in 0..bytes.len() {
            for bit in 0..8 {
                let mut b = bytes.to_vec();
                b[i] ^= 1 << bit;
                flips += 1;
                // a byte that stops being valid UTF-8 never reaches the decoder
                let Ok(text) = String::from_utf8(b) else {
                    continue;
                };
                if NmeaDecoder::default().push_line(&text).is_some() {
                    accepted += 1;
                }
            }
        }
    }
    outcome(
        mismatches == 0 && accepted == 0,
        format!("1000 reports, {mismatches} round-trip mismatches; {flips} single-bit corruptions, {accepted} accepted"),
    )
}
