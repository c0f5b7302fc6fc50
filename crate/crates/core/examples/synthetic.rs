//! Build the three-pattern synthetic corpus, train a preset on it and print
//! the confusion matrix on the test split.
//!
//! cargo run --release -p aisq --example synthetic -- [preset] [epochs] [tracks] [bn|nobn]

use std::time::Instant;

use aisq::ais::VesselTrack;
use aisq::metrics::ConfusionMatrix;
use aisq::pipeline::{build_dataset, GeoContext, PipelineConfig};
use aisq::synth::pattern_corpus;
use aisq::tsnet::{predict_all, train_with, ModelConfig, TrainConfig, TrainData};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().collect();
    let preset = args.get(1).map_or("tiny_resnet", String::as_str);
    let epochs: usize = args.get(2).map_or(Ok(30), |s| s.parse())?;
    let n: usize = args.get(3).map_or(Ok(600), |s| s.parse())?;
    let batch_norm = args.get(4).map(|s| s == "bn");

    let corpus = pattern_corpus(n, 360, 7);
    let config = PipelineConfig::default();
    let geo = GeoContext::new(&corpus.coast, &corpus.harbors, None, &config)?;
    let tracks: Vec<VesselTrack> = corpus.tracks;
    let t0 = Instant::now();
    let ds = build_dataset(&tracks, &geo, &config)?;
    println!("dataset: {} sequences in {:.1?}", ds.manifest.total_sequences(), t0.elapsed());

    let train = TrainData::from_sequences(&ds.train)?;
    let val = TrainData::from_sequences(&ds.val)?;
    let test = TrainData::from_sequences(&ds.test)?;
    let mut model = ModelConfig::preset(preset, 360)?;
    if let Some(bn) = batch_norm {
        model = model.with_batch_norm(bn);
    }
    let cfg = TrainConfig {
        max_epochs: epochs,
        seed: 1,
        ..TrainConfig::default()
    };
    println!("{preset}: {} parameters", model.parameter_count());
    let t0 = Instant::now();
    let out = train_with(&model, &cfg, &train, &val, |r| {
        println!(
            "epoch {:>3}  loss {:.4}  acc {:.3}  val_loss {:.4}  val_acc {:.3}  lr {:.5}  {:.1?}",
            r.epoch,
            r.train_loss,
            r.train_acc,
            r.val_loss,
            r.val_acc,
            r.lr,
            t0.elapsed()
        );
        true
    })?;
    let pred = predict_all(&out.network, &test, 64)?;
    let cm = ConfusionMatrix::from_pairs(test.labels.iter().copied().zip(pred))?;
    println!("best epoch {} ({:?}), test accuracy {:.4}", out.best_epoch, out.stop, cm.accuracy()?);
    for row in cm.counts {
        println!("{row:?}");
    }
    Ok(())
}
