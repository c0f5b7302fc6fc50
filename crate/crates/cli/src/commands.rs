use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter};
use std::path::{Path, PathBuf};

use serde::Serialize;

use aisq::ais::{group_tracks, read_records_csv, write_records_csv, DecodeStats, NmeaDecoder, ReadStats};
use aisq::geo::{load_coastline, load_harbors, load_points};
use aisq::metrics::{render_report, ConfusionMatrix, EvalReport, ReportFormat};
use aisq::pipeline::{
    build_dataset, manifest_checksum, ClassLabel, Dataset, DatasetManifest, GeoContext, Split, MANIFEST_FILE,
};
use aisq::tsnet::{predict_all, train_with, Checkpoint, ModelConfig, NetError, TrainData};

use crate::config::{RunConfig, DATA_DIR_ENV, RUN_CONFIG_FILE};
use crate::error::{CliError, CliResult};
use crate::{BuildArgs, DecodeArgs, EvalArgs, InspectArgs, TrainArgs};

pub const CHECKPOINT_FILE: &str = "model.ckpt";
pub const HISTORY_FILE: &str = "history.csv";

fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// `211909` -> `211,909`.
fn grouped(n: usize) -> String {
    let s = n.to_string();
    let mut out = String::new();
    for (i, ch) in s.chars().enumerate() {
        if i > 0 && (s.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

#[derive(Serialize)]
struct DecodeSidecar<'a> {
    inputs: &'a [PathBuf],
    run_config: &'a RunConfig,
    stats: DecodeStats,
}

pub fn decode(mut cfg: RunConfig, args: DecodeArgs) -> CliResult<()> {
    if let Some(w) = args.window {
        cfg.fragment_window = w;
    }
    let mut decoder = NmeaDecoder::new(cfg.fragment_window);
    let mut records = Vec::new();
    for path in &args.inputs {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        for line in BufReader::new(file).split(b'\n') {
            let bytes = line.map_err(|e| CliError::io(path, e))?;
            // undecodable bytes turn into U+FFFD and fail the checksum
            let text = String::from_utf8_lossy(&bytes);
            if let Some(r) = decoder.push_line(text.trim_end_matches('\r')) {
                records.push(r);
            }
        }
    }
    let stats = decoder.finish();

    let out = File::create(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    write_records_csv(BufWriter::new(out), &records).map_err(|e| CliError::io(&args.out, e))?;
    let sidecar_path = PathBuf::from(format!("{}.stats.json", args.out.display()));
    let sidecar = DecodeSidecar {
        inputs: &args.inputs,
        run_config: &cfg,
        stats,
    };
    let json = serde_json::to_string_pretty(&sidecar).expect("stats serialize") + "\n";
    fs::write(&sidecar_path, json).map_err(|e| CliError::io(&sidecar_path, e))?;

    println!(
        "{} lines, {} records written to {}",
        stats.lines,
        records.len(),
        args.out.display()
    );
    println!(
        "rejected: {} malformed, {} checksum, {} unsupported type, {} sentinel, {} out of range, {} without timestamp",
        stats.malformed,
        stats.checksum_errors,
        stats.unsupported_type,
        stats.sentinel,
        stats.invalid_value,
        stats.missing_timestamp
    );
    Ok(())
}

pub fn build(mut cfg: RunConfig, args: BuildArgs) -> CliResult<()> {
    let p = &mut cfg.pipeline;
    if let Some(s) = args.seed {
        p.seed = s;
    }
    if let Some(l) = &args.seq_len {
        p.seq_len = l.parse().expect("validated by clap");
    }
    if let Some(t) = args.transform {
        p.transform = t;
    }
    if let Some(n) = args.norm {
        p.norm_mode = n;
    }
    if let Some(m) = args.split_mode {
        p.split_mode = m;
    }
    p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let g = &mut cfg.geo;
    for (slot, flag) in [(&mut g.coast, args.coast), (&mut g.harbors, args.harbors), (&mut g.rivers, args.rivers)] {
        if flag.is_some() {
            *slot = flag;
        }
    }
    if args.max_coast_points.is_some() {
        g.max_coast_points = args.max_coast_points;
    }
    cfg.resolve_geo(std::env::var_os(DATA_DIR_ENV).map(PathBuf::from))?;

    let (records, read_stats) = read_records_csv(&args.records)?;
    let tracks = group_tracks(records);
    let coast = load_coastline(cfg.geo.coast.as_ref().expect("resolved"), cfg.geo.max_coast_points)?;
    let harbors = load_harbors(cfg.geo.harbors.as_ref().expect("resolved"))?;
    let rivers = cfg.geo.rivers.as_ref().map(load_points).transpose()?;
    let geo = GeoContext::new(&coast, &harbors, rivers.as_deref(), &cfg.pipeline)?;
    let ds = build_dataset(&tracks, &geo, &cfg.pipeline)?;

    create_dir(&args.out)?;
    ds.write(&args.out)?;
    cfg.write(&args.out.join(RUN_CONFIG_FILE))?;

    print_read_stats(&read_stats, tracks.len());
    print_class_table(&ds.manifest);
    println!(
        "dataset {:08x}: {} sequences of length {} written to {}",
        manifest_checksum(&ds.manifest),
        ds.manifest.total_sequences(),
        ds.manifest.sequence_length,
        args.out.display()
    );
    Ok(())
}

fn print_read_stats(s: &ReadStats, vessels: usize) {
    println!(
        "records: {} rows, {} invalid, {} malformed, {} vessels",
        s.rows, s.skipped_invalid, s.skipped_malformed, vessels
    );
}

fn print_class_table(m: &DatasetManifest) {
    println!("{:<15}{:>10}{:>10}{:>10}{:>10}", "class", "train", "val", "test", "total");
    let mut totals = [0usize; 4];
    for (i, c) in ClassLabel::ALL.iter().enumerate() {
        let counts: Vec<usize> = Split::ALL
            .iter()
            .map(|s| m.split.class_counts.get(s).map_or(0, |row| row[i]))
            .collect();
        let total: usize = counts.iter().sum();
        for (t, v) in totals.iter_mut().zip(counts.iter().chain([&total])) {
            *t += v;
        }
        println!("{:<15}{:>10}{:>10}{:>10}{:>10}", c.name(), counts[0], counts[1], counts[2], total);
    }
    println!(
        "{:<15}{:>10}{:>10}{:>10}{:>10}",
        "all", totals[0], totals[1], totals[2], totals[3]
    );
}

fn resolve_model(cfg: &RunConfig, seq_len: usize, batch_norm: Option<bool>) -> CliResult<ModelConfig> {
    let model = ModelConfig::preset(&cfg.preset, seq_len).map_err(|e| match e {
        NetError::UnknownPreset { .. } => CliError::Usage(e.to_string()),
        other => other.into(),
    })?;
    Ok(match batch_norm {
        Some(bn) => model.with_batch_norm(bn),
        None => model,
    })
}

pub fn train(mut cfg: RunConfig, args: TrainArgs) -> CliResult<()> {
    if let Some(p) = args.preset {
        cfg.preset = p;
    }
    let t = &mut cfg.train;
    if let Some(s) = args.seed {
        t.seed = s;
    }
    if let Some(e) = args.max_epochs {
        t.max_epochs = e;
    }
    if args.lr.is_some() {
        t.learning_rate = args.lr;
    }
    if args.batch_size.is_some() {
        t.batch_size = args.batch_size;
    }
    if let Some(s) = args.noise_sigma {
        t.noise_sigma = s;
    }
    t.class_weights |= args.class_weights;
    t.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let ds = Dataset::load(&args.dataset)?;
    let model = resolve_model(&cfg, ds.manifest.sequence_length, args.batch_norm)?;
    println!(
        "{}: {} parameters, depth {}",
        model.name(),
        grouped(model.parameter_count()),
        model.depth()
    );
    let train = TrainData::from_sequences(&ds.train)?;
    let val = TrainData::from_sequences(&ds.val)?;
    println!("train {} / val {} sequences", train.len(), val.len());

    let outcome = train_with(&model, &cfg.train, &train, &val, |r| {
        println!(
            "epoch {:>3}  loss {:.4}  acc {:.3}  val_loss {:.4}  val_acc {:.3}  lr {:.2e}",
            r.epoch, r.train_loss, r.train_acc, r.val_loss, r.val_acc, r.lr
        );
        true
    })?;
    let mut ck = Checkpoint::from_outcome(&outcome, &cfg.train);
    ck.dataset_id = Some(format!("{:08x}", manifest_checksum(&ds.manifest)));

    create_dir(&args.out)?;
    ck.save(&args.out.join(CHECKPOINT_FILE))?;
    aisq::tsnet::write_history_csv(&outcome.history, &args.out.join(HISTORY_FILE))?;
    cfg.write(&args.out.join(RUN_CONFIG_FILE))?;
    println!(
        "best epoch {} ({:?}); checkpoint {} written to {}",
        outcome.best_epoch,
        outcome.stop,
        ck.id(),
        args.out.display()
    );
    Ok(())
}

pub fn eval(cfg: RunConfig, args: EvalArgs) -> CliResult<()> {
    let ck = Checkpoint::load(&args.checkpoint)?;
    let ds = Dataset::load(&args.dataset)?;
    if ck.model.seq_len != ds.manifest.sequence_length {
        return Err(NetError::ShapeMismatch(format!(
            "checkpoint expects sequences of length {}, dataset has {}",
            ck.model.seq_len, ds.manifest.sequence_length
        ))
        .into());
    }
    let seqs = ds.split(args.split);
    if seqs.is_empty() {
        return Err(NetError::EmptySplit(args.split.to_string()).into());
    }
    let net = ck.network()?;
    let data = TrainData::from_sequences(seqs)?;
    let pred = predict_all(&net, &data, 64)?;
    let cm = ConfusionMatrix::from_pairs(data.labels.iter().copied().zip(pred))?;
    let mut report = EvalReport::new(cm, args.split.name())?;
    report.dataset_id = Some(format!("{:08x}", manifest_checksum(&ds.manifest)));
    report.checkpoint_id = Some(ck.id());
    report.model = Some(ck.model.name().to_string());

    create_dir(&args.out)?;
    report.write_all(&args.out, &format!("eval_{}", args.split))?;
    cfg.write(&args.out.join(RUN_CONFIG_FILE))?;
    print!("{}", String::from_utf8_lossy(&render_report(&report, ReportFormat::Text)));
    Ok(())
}

pub fn inspect(args: InspectArgs) -> CliResult<()> {
    if args.path.is_dir() {
        if !args.path.join(MANIFEST_FILE).exists() {
            return Err(CliError::Data(format!("{} has no {MANIFEST_FILE}", args.path.display())));
        }
        inspect_dataset(&args.path)
    } else {
        inspect_checkpoint(&args.path)
    }
}

fn inspect_dataset(dir: &Path) -> CliResult<()> {
    let m = DatasetManifest::load(dir)?;
    println!("dataset {:08x} (format {})", manifest_checksum(&m), m.format_version);
    println!("sequence length {}, transform {}, seed {}", m.sequence_length, m.transform, m.seed);
    println!("features: {}", m.feature_schema.join(", "));
    let t = &m.thresholds;
    println!("thresholds:");
    println!("  max_gap_s              {}", t.max_gap_s);
    println!("  max_step_sq_deg        {}", t.max_step_sq_deg);
    println!("  stationary             {}", t.stationary);
    println!("  river_buffer_m         {}", t.river_buffer_m);
    println!("  river_max_fraction     {}", t.river_max_fraction);
    println!("  min_leftover_fraction  {}", t.min_leftover_fraction);
    println!("filter stage: {}", m.filter_stage);
    println!(
        "split: {} {:?}, {} shards of up to {}",
        m.split.mode,
        m.split.fractions,
        m.shards.len(),
        m.shard_size
    );
    let drops = serde_json::to_string(&m.drops).expect("counters serialize");
    println!("drops: {drops}");
    print_class_table(&m);
    Ok(())
}

fn inspect_checkpoint(path: &Path) -> CliResult<()> {
    let ck = Checkpoint::load(path)?;
    println!("checkpoint {}", ck.id());
    println!(
        "model {} (preset {}), L={}, {} channels, {} classes, batch norm {}",
        ck.model.name(),
        ck.model.preset.as_deref().unwrap_or("custom"),
        ck.model.seq_len,
        ck.model.channels,
        ck.model.classes,
        ck.model.batch_norm
    );
    println!("parameters {} (depth {})", grouped(ck.params.len()), ck.model.depth());
    println!(
        "trained {} epochs, best {} ({:?}), dataset {}",
        ck.history.len(),
        ck.best_epoch,
        ck.stop,
        ck.dataset_id.as_deref().unwrap_or("unknown")
    );
    if let Some(r) = ck.history.iter().find(|r| r.epoch == ck.best_epoch) {
        println!("best val_loss {:.4}, val_acc {:.3}", r.val_loss, r.val_acc);
    }
    Ok(())
}
