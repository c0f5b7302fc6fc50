use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::shard::{encode_shard, stored_crc};
use super::{
    chunk, compute_features, filter_river, filter_stationary, fit_global, map_class, mmsi_hash, normalize, read_shard,
    segment, ClassLabel, FeatureSequence, NormMode, NormalizationSpec, PipelineError, RawFeatures, SegmentRules,
    SequenceSource, Transform, FEATURE_SCHEMA,
};
use crate::ais::VesselTrack;
use crate::geo::{GeoGridIndex, GeoPoint, RiverMask, COAST_CELL_KM, HARBOR_CELL_KM};
use crate::par;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_FORMAT_VERSION: u32 = 1;
/// Size of the reference harbor list; recorded, not enforced.
pub const EXPECTED_HARBORS: usize = 140;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    /// Shuffle and cut the sequence list.
    Sequence,
    /// Keep every vessel's sequences inside one split.
    Vessel,
}

impl fmt::Display for SplitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SplitMode::Sequence => "sequence",
            SplitMode::Vessel => "vessel",
        })
    }
}

impl FromStr for SplitMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sequence" => Ok(SplitMode::Sequence),
            "vessel" => Ok(SplitMode::Vessel),
            other => Err(format!("unknown split mode `{other}` (expected sequence or vessel)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split `{other}` (expected train, val or test)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    pub max_gap_s: i64,
    pub max_step_sq_deg: f64,
    /// Degrees per sample; chunks moving less are dropped.
    pub stationary: f64,
    pub river_buffer_m: f64,
    pub river_max_fraction: f64,
    pub min_leftover_fraction: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        let rules = SegmentRules::default();
        Self {
            max_gap_s: rules.max_gap_s,
            max_step_sq_deg: rules.max_step_sq_deg,
            stationary: 2e-5,
            river_buffer_m: crate::geo::DEFAULT_RIVER_BUFFER_M,
            river_max_fraction: 0.5,
            min_leftover_fraction: 0.8,
        }
    }
}

impl Thresholds {
    pub fn segment_rules(&self) -> SegmentRules {
        SegmentRules {
            max_gap_s: self.max_gap_s,
            max_step_sq_deg: self.max_step_sq_deg,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub seq_len: usize,
    pub transform: Transform,
    pub norm_mode: NormMode,
    pub split_mode: SplitMode,
    pub seed: u64,
    pub thresholds: Thresholds,
    /// Train/val/test fractions.
    pub split_fractions: [f64; 3],
    pub shard_size: usize,
    pub coast_cell_km: f64,
    pub harbor_cell_km: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seq_len: 360,
            transform: Transform::Rtf,
            norm_mode: NormMode::Global,
            split_mode: SplitMode::Sequence,
            seed: 42,
            thresholds: Thresholds::default(),
            split_fractions: [0.64, 0.16, 0.20],
            shard_size: 4096,
            coast_cell_km: COAST_CELL_KM,
            harbor_cell_km: HARBOR_CELL_KM,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::InvalidConfig(m));
        if self.seq_len == 0 {
            return bad("seq_len must be positive".into());
        }
        if self.shard_size == 0 {
            return bad("shard_size must be positive".into());
        }
        let f = self.split_fractions;
        if f.iter().any(|x| !(0.0..=1.0).contains(x)) || (f.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return bad(format!("split fractions {f:?} must be in [0,1] and sum to 1"));
        }
        let t = &self.thresholds;
        if t.max_gap_s <= 0 || !(t.max_step_sq_deg > 0.0) || !(t.stationary >= 0.0) {
            return bad("segmentation and stationary thresholds must be positive".into());
        }
        if !(t.river_buffer_m > 0.0) || !(0.0..=1.0).contains(&t.river_max_fraction) {
            return bad("river buffer must be positive and fraction within [0,1]".into());
        }
        if !(0.0..=1.0).contains(&t.min_leftover_fraction) {
            return bad("min_leftover_fraction must be within [0,1]".into());
        }
        if !(self.coast_cell_km > 0.0 && self.harbor_cell_km > 0.0) {
            return bad("geo cell sizes must be positive".into());
        }
        Ok(())
    }
}

/// Geographic reference data used by the feature stage.
#[derive(Clone, Debug)]
pub struct GeoContext {
    pub coast: GeoGridIndex,
    pub harbors: GeoGridIndex,
    /// Without a mask the river filter keeps everything.
    pub rivers: Option<RiverMask>,
}

impl GeoContext {
    pub fn new(
        coast: &[GeoPoint],
        harbors: &[GeoPoint],
        rivers: Option<&[GeoPoint]>,
        config: &PipelineConfig,
    ) -> Result<Self, PipelineError> {
        Ok(Self {
            coast: GeoGridIndex::build(coast, config.coast_cell_km)?,
            harbors: GeoGridIndex::build(harbors, config.harbor_cell_km)?,
            rivers: rivers
                .map(|r| RiverMask::build(r, config.thresholds.river_buffer_m))
                .transpose()?,
        })
    }

    pub fn summary(&self) -> GeoSummary {
        GeoSummary {
            coast_points: self.coast.point_count(),
            coast_cell_km: self.coast.cell_size_km(),
            harbor_points: self.harbors.point_count(),
            harbor_cell_km: self.harbors.cell_size_km(),
            expected_harbors: EXPECTED_HARBORS,
            river_vertices: self.rivers.as_ref().map(RiverMask::vertex_count),
            river_buffer_m: self.rivers.as_ref().map(RiverMask::buffer_m),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeoSummary {
    pub coast_points: usize,
    pub coast_cell_km: f64,
    pub harbor_points: usize,
    pub harbor_cell_km: f64,
    pub expected_harbors: usize,
    pub river_vertices: Option<usize>,
    pub river_buffer_m: Option<f64>,
}

/// What each stage threw away.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropCounters {
    pub tracks: usize,
    pub missing_shiptype: usize,
    pub unmapped_shiptype: usize,
    pub segments: usize,
    pub chunks: usize,
    pub discarded_leftovers: usize,
    pub discarded_leftover_samples: usize,
    pub stationary_removed: usize,
    pub river_removed: usize,
    pub degenerate_rotations: usize,
    pub constant_channel_sequences: usize,
    pub kept: usize,
}

impl DropCounters {
    fn merge(&mut self, o: &DropCounters) {
        self.tracks += o.tracks;
        self.missing_shiptype += o.missing_shiptype;
        self.unmapped_shiptype += o.unmapped_shiptype;
        self.segments += o.segments;
        self.chunks += o.chunks;
        self.discarded_leftovers += o.discarded_leftovers;
        self.discarded_leftover_samples += o.discarded_leftover_samples;
        self.stationary_removed += o.stationary_removed;
        self.river_removed += o.river_removed;
        self.degenerate_rotations += o.degenerate_rotations;
        self.constant_channel_sequences += o.constant_channel_sequences;
        self.kept += o.kept;
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

impl SplitCounts {
    pub fn get(&self, s: Split) -> usize {
        match s {
            Split::Train => self.train,
            Split::Val => self.val,
            Split::Test => self.test,
        }
    }

    pub fn total(&self) -> usize {
        self.train + self.val + self.test
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitInfo {
    pub mode: SplitMode,
    pub fractions: [f64; 3],
    pub counts: SplitCounts,
    /// Per-split class counts in [`ClassLabel::ALL`] order.
    pub class_counts: BTreeMap<Split, [usize; 5]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardEntry {
    pub file: String,
    pub split: Split,
    pub count: usize,
    pub crc32: u32,
}

/// Where one sequence ended up and where it came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub split: Split,
    pub mmsi: u32,
    pub segment: u32,
    pub chunk: u32,
    pub label: ClassLabel,
    pub true_length: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub sequence_length: usize,
    pub transform: Transform,
    pub feature_schema: Vec<String>,
    pub normalization: NormalizationSpec,
    pub thresholds: Thresholds,
    /// Filters run on chunks, after the sequence-length cut.
    pub filter_stage: String,
    pub class_counts: BTreeMap<ClassLabel, usize>,
    pub split: SplitInfo,
    pub seed: u64,
    /// Maximum sequences per shard file.
    pub shard_size: usize,
    pub shards: Vec<ShardEntry>,
    pub drops: DropCounters,
    pub geo: GeoSummary,
    /// One entry per sequence, in shard order.
    pub assignments: Vec<Assignment>,
}

impl DatasetManifest {
    pub fn total_sequences(&self) -> usize {
        self.split.counts.total()
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let path = dir.as_ref().join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|e| PipelineError::io(&path, e))?;
        let m: DatasetManifest =
            serde_json::from_str(&text).map_err(|e| PipelineError::Manifest(format!("{}: {e}", path.display())))?;
        if m.format_version != MANIFEST_FORMAT_VERSION {
            return Err(PipelineError::Manifest(format!(
                "manifest format {} is not supported (expected {MANIFEST_FORMAT_VERSION})",
                m.format_version
            )));
        }
        Ok(m)
    }
}

/// CRC32 of the compact JSON form of a manifest.
pub fn manifest_checksum(manifest: &DatasetManifest) -> u32 {
    crc32fast::hash(&serde_json::to_vec(manifest).expect("manifest serializes"))
}

/// A built dataset held in memory, split into train/val/test.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub manifest: DatasetManifest,
    pub train: Vec<FeatureSequence>,
    pub val: Vec<FeatureSequence>,
    pub test: Vec<FeatureSequence>,
}

impl Dataset {
    pub fn split(&self, s: Split) -> &[FeatureSequence] {
        match s {
            Split::Train => &self.train,
            Split::Val => &self.val,
            Split::Test => &self.test,
        }
    }

    /// Write shards and `manifest.json` into `dir` (created if missing).
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<(), PipelineError> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
        let files = shard_bytes(&self.train, &self.val, &self.test, self.manifest.shard_size);
        for ((name, bytes), entry) in files.iter().zip(&self.manifest.shards) {
            debug_assert_eq!(name, &entry.file);
            let path = dir.join(name);
            fs::write(&path, bytes).map_err(|e| PipelineError::io(&path, e))?;
        }
        let path = dir.join(MANIFEST_FILE);
        let json = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        fs::write(&path, json).map_err(|e| PipelineError::io(&path, e))
    }

    /// Read a dataset directory, verifying every shard against the manifest.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let dir = dir.as_ref();
        let manifest = DatasetManifest::load(dir)?;
        let mut splits: BTreeMap<Split, Vec<FeatureSequence>> = BTreeMap::new();
        for entry in &manifest.shards {
            let path = dir.join(&entry.file);
            let bytes = fs::read(&path).map_err(|e| PipelineError::io(&path, e))?;
            if stored_crc(&bytes) != Some(entry.crc32) {
                return Err(PipelineError::ChecksumMismatch(format!(
                    "{} does not match the manifest",
                    entry.file
                )));
            }
            let seqs = read_shard(&path)?;
            if seqs.len() != entry.count {
                return Err(PipelineError::Manifest(format!(
                    "{} holds {} sequences, manifest says {}",
                    entry.file,
                    seqs.len(),
                    entry.count
                )));
            }
            splits.entry(entry.split).or_default().extend(seqs);
        }
        let mut ds = Dataset {
            train: splits.remove(&Split::Train).unwrap_or_default(),
            val: splits.remove(&Split::Val).unwrap_or_default(),
            test: splits.remove(&Split::Test).unwrap_or_default(),
            manifest,
        };
        ds.attach_sources()?;
        Ok(ds)
    }

    fn attach_sources(&mut self) -> Result<(), PipelineError> {
        let mut by_split: BTreeMap<Split, Vec<&Assignment>> = BTreeMap::new();
        for a in &self.manifest.assignments {
            by_split.entry(a.split).or_default().push(a);
        }
        for s in Split::ALL {
            let assigned = by_split.remove(&s).unwrap_or_default();
            let seqs = match s {
                Split::Train => &mut self.train,
                Split::Val => &mut self.val,
                Split::Test => &mut self.test,
            };
            if assigned.len() != seqs.len() {
                return Err(PipelineError::Manifest(format!(
                    "{s}: {} assignments for {} sequences",
                    assigned.len(),
                    seqs.len()
                )));
            }
            for (seq, a) in seqs.iter_mut().zip(assigned) {
                if seq.label != a.label || seq.mmsi_hash != mmsi_hash(a.mmsi) {
                    return Err(PipelineError::Manifest(format!("{s}: assignment does not match shard contents")));
                }
                seq.source = Some(SequenceSource {
                    mmsi: a.mmsi,
                    segment: a.segment,
                    chunk: a.chunk,
                });
            }
        }
        Ok(())
    }
}

fn shard_bytes(
    train: &[FeatureSequence],
    val: &[FeatureSequence],
    test: &[FeatureSequence],
    shard_size: usize,
) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for (split, seqs) in [(Split::Train, train), (Split::Val, val), (Split::Test, test)] {
        let pieces: Vec<&[FeatureSequence]> = if seqs.is_empty() {
            vec![&[]]
        } else {
            seqs.chunks(shard_size).collect()
        };
        for (i, piece) in pieces.into_iter().enumerate() {
            out.push((format!("{split}-{i:04}.aisq"), encode_shard(piece)));
        }
    }
    out
}

struct Candidate {
    source: SequenceSource,
    label: ClassLabel,
    raw: RawFeatures,
}

fn process_track(
    track: &VesselTrack,
    geo: &GeoContext,
    config: &PipelineConfig,
) -> (Vec<Candidate>, DropCounters) {
    let mut c = DropCounters {
        tracks: 1,
        ..Default::default()
    };
    let Some(code) = track.shiptype else {
        c.missing_shiptype = 1;
        return (Vec::new(), c);
    };
    let Ok(label) = map_class(code) else {
        c.unmapped_shiptype = 1;
        return (Vec::new(), c);
    };
    let t = &config.thresholds;
    let segments = segment(track, label, &t.segment_rules());
    c.segments = segments.len();
    let mut chunks = Vec::new();
    for s in &segments {
        let out = chunk(s, config.seq_len, t.min_leftover_fraction);
        c.discarded_leftovers += out.discarded_leftovers;
        c.discarded_leftover_samples += out.discarded_samples;
        chunks.extend(out.chunks);
    }
    c.chunks = chunks.len();
    let (chunks, removed) = filter_stationary(chunks, t.stationary);
    c.stationary_removed = removed;
    let mut out = Vec::with_capacity(chunks.len());
    for ch in chunks {
        if let Some(mask) = &geo.rivers {
            if !filter_river(&ch, mask, t.river_max_fraction) {
                c.river_removed += 1;
                continue;
            }
        }
        let raw = compute_features(&ch, &geo.coast, &geo.harbors, config.transform);
        c.degenerate_rotations += usize::from(raw.degenerate_rotation);
        out.push(Candidate {
            source: SequenceSource {
                mmsi: ch.mmsi,
                segment: ch.segment,
                chunk: ch.index,
            },
            label,
            raw,
        });
    }
    c.kept = out.len();
    (out, c)
}

/// Run the full pipeline over grouped tracks.
///
/// Per-vessel work runs in parallel; results are merged in mmsi order, so the
/// output depends only on the inputs and the seed.
pub fn build_dataset(tracks: &[VesselTrack], geo: &GeoContext, config: &PipelineConfig) -> Result<Dataset, PipelineError> {
    config.validate()?;
    let mut order: Vec<&VesselTrack> = tracks.iter().collect();
    order.sort_by_key(|t| t.mmsi);
    let per_vessel = par::map(&order, |t| process_track(t, geo, config));

    let mut drops = DropCounters::default();
    let mut candidates = Vec::new();
    for (cands, c) in per_vessel {
        drops.merge(&c);
        candidates.extend(cands);
    }
    if candidates.is_empty() {
        return Err(PipelineError::EmptyDataset);
    }

    let coast_r = geo.coast.query_radius_km();
    let harbor_r = geo.harbors.query_radius_km();
    let spec = match config.norm_mode {
        NormMode::Global => fit_global(candidates.iter().map(|c| &c.raw), coast_r, harbor_r),
        NormMode::Local => NormalizationSpec::fixed(NormMode::Local, coast_r, harbor_r),
    };
    let normalized = par::map(&candidates, |c| normalize(&c.raw, &spec, config.seq_len));
    let mut sequences = Vec::with_capacity(candidates.len());
    for (cand, n) in candidates.iter().zip(normalized) {
        let n = n?;
        drops.constant_channel_sequences += usize::from(!n.constant_channels.is_empty());
        sequences.push(FeatureSequence {
            seq_len: config.seq_len as u32,
            true_length: cand.raw.rows.len() as u32,
            label: cand.label,
            mmsi_hash: mmsi_hash(cand.source.mmsi),
            values: n.values,
            source: Some(cand.source),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut idx: Vec<usize> = (0..sequences.len()).collect();
    idx.shuffle(&mut rng);
    let assign = match config.split_mode {
        SplitMode::Sequence => split_by_sequence(&idx, config.split_fractions),
        SplitMode::Vessel => split_by_vessel(&idx, &sequences, config.split_fractions, &mut rng),
    };

    let mut parts: [Vec<FeatureSequence>; 3] = Default::default();
    let mut slots: Vec<Option<FeatureSequence>> = sequences.into_iter().map(Some).collect();
    for (i, split) in assign {
        let seq = slots[i].take().expect("each sequence assigned once");
        parts[split as usize].push(seq);
    }
    let [train, val, test] = parts;

    let mut class_counts: BTreeMap<ClassLabel, usize> = ClassLabel::ALL.iter().map(|&c| (c, 0)).collect();
    let mut split_class_counts = BTreeMap::new();
    let mut assignments = Vec::new();
    for (split, seqs) in [(Split::Train, &train), (Split::Val, &val), (Split::Test, &test)] {
        let mut counts = [0usize; 5];
        for s in seqs {
            counts[s.label.index()] += 1;
            *class_counts.get_mut(&s.label).unwrap() += 1;
            let src = s.source.expect("built sequences carry their source");
            assignments.push(Assignment {
                split,
                mmsi: src.mmsi,
                segment: src.segment,
                chunk: src.chunk,
                label: s.label,
                true_length: s.true_length,
            });
        }
        split_class_counts.insert(split, counts);
    }

    let shards = shard_bytes(&train, &val, &test, config.shard_size)
        .into_iter()
        .map(|(file, bytes)| {
            let split = file.split('-').next().unwrap().parse().unwrap();
            let count = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
            ShardEntry {
                file,
                split,
                count,
                crc32: stored_crc(&bytes).unwrap(),
            }
        })
        .collect();

    let manifest = DatasetManifest {
        format_version: MANIFEST_FORMAT_VERSION,
        sequence_length: config.seq_len,
        transform: config.transform,
        feature_schema: FEATURE_SCHEMA.iter().map(|s| s.to_string()).collect(),
        normalization: spec,
        thresholds: config.thresholds,
        filter_stage: "per_chunk".into(),
        class_counts,
        split: SplitInfo {
            mode: config.split_mode,
            fractions: config.split_fractions,
            counts: SplitCounts {
                train: train.len(),
                val: val.len(),
                test: test.len(),
            },
            class_counts: split_class_counts,
        },
        seed: config.seed,
        shard_size: config.shard_size,
        shards,
        drops,
        geo: geo.summary(),
        assignments,
    };
    Ok(Dataset {
        manifest,
        train,
        val,
        test,
    })
}

fn targets(n: usize, fractions: [f64; 3]) -> (usize, usize) {
    let train = ((fractions[0] * n as f64).round() as usize).min(n);
    let val = ((fractions[1] * n as f64).round() as usize).min(n - train);
    (train, val)
}

fn split_by_sequence(shuffled: &[usize], fractions: [f64; 3]) -> Vec<(usize, Split)> {
    let (n_train, n_val) = targets(shuffled.len(), fractions);
    shuffled
        .iter()
        .enumerate()
        .map(|(pos, &i)| {
            let s = if pos < n_train {
                Split::Train
            } else if pos < n_train + n_val {
                Split::Val
            } else {
                Split::Test
            };
            (i, s)
        })
        .collect()
}

/// Whole vessels go to one split, filled in a seeded vessel order until each
/// split reaches its target.
fn split_by_vessel(
    shuffled: &[usize],
    sequences: &[FeatureSequence],
    fractions: [f64; 3],
    rng: &mut ChaCha8Rng,
) -> Vec<(usize, Split)> {
    let mmsi_of = |i: usize| sequences[i].source.map_or(sequences[i].mmsi_hash, |s| s.mmsi);
    let mut by_vessel: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for &i in shuffled {
        by_vessel.entry(mmsi_of(i)).or_default().push(i);
    }
    let mut vessels: Vec<u32> = by_vessel.keys().copied().collect();
    vessels.shuffle(rng);
    let (n_train, n_val) = targets(shuffled.len(), fractions);
    let mut split_of = BTreeMap::new();
    let mut filled = 0;
    for v in vessels {
        let s = if filled < n_train {
            Split::Train
        } else if filled < n_train + n_val {
            Split::Val
        } else {
            Split::Test
        };
        filled += by_vessel[&v].len();
        split_of.insert(v, s);
    }
    shuffled.iter().map(|&i| (i, split_of[&mmsi_of(i)])).collect()
}
