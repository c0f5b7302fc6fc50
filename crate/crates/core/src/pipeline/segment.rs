use serde::{Deserialize, Serialize};

use super::ClassLabel;
use crate::ais::{AisRecord, VesselTrack};

/// Kinematic sample carried through the pipeline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub timestamp: i64,
    pub lat: f64,
    pub lon: f64,
    pub sog: u16,
    pub cog: f64,
}

impl From<&AisRecord> for Sample {
    fn from(r: &AisRecord) -> Self {
        Sample {
            timestamp: r.timestamp,
            lat: r.lat,
            lon: r.lon,
            sog: r.sog,
            cog: r.cog,
        }
    }
}

/// Gap thresholds that split a track.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentRules {
    pub max_gap_s: i64,
    /// Squared euclidean step in degrees^2.
    pub max_step_sq_deg: f64,
}

impl Default for SegmentRules {
    fn default() -> Self {
        Self {
            max_gap_s: 7200,
            max_step_sq_deg: 1e-4,
        }
    }
}

impl SegmentRules {
    pub fn breaks_between(&self, a: &Sample, b: &Sample) -> bool {
        let dlat = b.lat - a.lat;
        let dlon = b.lon - a.lon;
        b.timestamp - a.timestamp > self.max_gap_s || dlat * dlat + dlon * dlon > self.max_step_sq_deg
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrackSegment {
    pub mmsi: u32,
    pub index: u32,
    pub label: ClassLabel,
    pub samples: Vec<Sample>,
}

/// Split a time-sorted track wherever the gap rules fire. No sample is dropped.
pub fn segment(track: &VesselTrack, label: ClassLabel, rules: &SegmentRules) -> Vec<TrackSegment> {
    let mut out: Vec<TrackSegment> = Vec::new();
    let mut current: Vec<Sample> = Vec::new();
    for r in &track.records {
        let s = Sample::from(r);
        if let Some(prev) = current.last() {
            if rules.breaks_between(prev, &s) {
                out.push(TrackSegment {
                    mmsi: track.mmsi,
                    index: out.len() as u32,
                    label,
                    samples: std::mem::take(&mut current),
                });
            }
        }
        current.push(s);
    }
    if !current.is_empty() {
        out.push(TrackSegment {
            mmsi: track.mmsi,
            index: out.len() as u32,
            label,
            samples: current,
        });
    }
    out
}

/// A window of at most `seq_len` true samples; padding happens after
/// normalization.
#[derive(Clone, Debug, PartialEq)]
pub struct Chunk {
    pub mmsi: u32,
    pub segment: u32,
    pub index: u32,
    pub label: ClassLabel,
    pub seq_len: usize,
    pub samples: Vec<Sample>,
}

impl Chunk {
    pub fn true_length(&self) -> usize {
        self.samples.len()
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ChunkOutcome {
    pub chunks: Vec<Chunk>,
    pub discarded_leftovers: usize,
    pub discarded_samples: usize,
}

/// Cut a segment into consecutive `seq_len` windows. The final leftover is
/// kept iff it holds at least `min_fraction * seq_len` samples.
pub fn chunk(segment: &TrackSegment, seq_len: usize, min_fraction: f64) -> ChunkOutcome {
    assert!(seq_len > 0, "sequence length must be positive");
    let min_keep = (min_fraction * seq_len as f64 - 1e-9).ceil().max(1.0) as usize;
    let mut out = ChunkOutcome::default();
    for (i, window) in segment.samples.chunks(seq_len).enumerate() {
        if window.len() < seq_len && window.len() < min_keep {
            out.discarded_leftovers += 1;
            out.discarded_samples += window.len();
            continue;
        }
        out.chunks.push(Chunk {
            mmsi: segment.mmsi,
            segment: segment.index,
            index: i as u32,
            label: segment.label,
            seq_len,
            samples: window.to_vec(),
        });
    }
    out
}
