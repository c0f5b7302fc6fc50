//! From vessel tracks to normalized, fixed-length, labelled feature sequences.
//!
//! Stages, in order: class mapping, segmentation on temporal/spatial gaps,
//! chunking to the sequence length, stationary and river filters, trajectory
//! and geographic features, min-max normalization, seeded shuffle and split.

mod class;
mod dataset;
mod features;
mod filter;
mod normalize;
mod segment;
mod shard;

pub use class::{map_class, ClassLabel, NUM_CLASSES};
pub use dataset::{
    build_dataset, manifest_checksum, Dataset, DatasetManifest, DropCounters, GeoContext, GeoSummary,
    PipelineConfig, ShardEntry, Split, SplitCounts, SplitInfo, SplitMode, Thresholds, MANIFEST_FILE,
    Assignment, EXPECTED_HARBORS, MANIFEST_FORMAT_VERSION,
};
pub use features::{
    compute_features, relative_to_first, rotate_to_zero, FeatureRow, RawFeatures, Rotation, Transform,
    FEATURE_SCHEMA, NUM_FEATURES,
};
pub use filter::{filter_river, filter_stationary, stationary_measure};
pub use normalize::{denormalize, fit_global, normalize, ChannelNorm, NormMode, Normalized, NormalizationSpec};
pub use segment::{chunk, segment, Chunk, ChunkOutcome, Sample, SegmentRules, TrackSegment};
pub use shard::{decode_shard, encode_shard, mmsi_hash, read_shard, write_shard, SHARD_MAGIC, SHARD_VERSION};

use serde::{Deserialize, Serialize};

/// One normalized, zero-padded `seq_len x 9` sequence (row-major, time first).
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureSequence {
    pub seq_len: u32,
    pub true_length: u32,
    pub label: ClassLabel,
    pub mmsi_hash: u32,
    pub values: Vec<f32>,
    /// Where the sequence came from. Not persisted in shards.
    pub source: Option<SequenceSource>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceSource {
    pub mmsi: u32,
    pub segment: u32,
    pub chunk: u32,
}

impl FeatureSequence {
    pub fn row(&self, t: usize) -> &[f32] {
        &self.values[t * NUM_FEATURES..(t + 1) * NUM_FEATURES]
    }

    pub fn channel(&self, c: usize) -> impl Iterator<Item = f32> + '_ {
        self.values.iter().skip(c).step_by(NUM_FEATURES).copied()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("sequence has {0} samples, need at least 2")]
    TooShort(usize),
    #[error("ship type {0} is not one of the modelled classes")]
    UnmappedShipType(u8),
    #[error("endpoint coincides with the start; rotation undefined")]
    DegenerateEndpoint,
    #[error("no sequences survived the pipeline")]
    EmptyDataset,
    #[error("bad magic: expected {expected:?}, found {found:?}")]
    MagicMismatch { expected: String, found: String },
    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { expected: u16, found: u16 },
    #[error("checksum mismatch: {0}")]
    ChecksumMismatch(String),
    #[error("corrupt shard: {0}")]
    CorruptShard(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("manifest error: {0}")]
    Manifest(String),
    #[error(transparent)]
    Geo(#[from] crate::geo::GeoError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl PipelineError {
    pub fn is_io(&self) -> bool {
        match self {
            PipelineError::Io { .. } => true,
            PipelineError::Geo(g) => g.is_io(),
            _ => false,
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        PipelineError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
