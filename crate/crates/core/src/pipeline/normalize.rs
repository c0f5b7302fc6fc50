use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::features::{CH_COAST, CH_COG, CH_DT, CH_HARBOR, CH_SOG, CH_X_RTF, CH_Y_RTZ};
use super::{FeatureRow, PipelineError, RawFeatures, NUM_FEATURES};

const POSITIONAL: std::ops::RangeInclusive<usize> = CH_X_RTF..=CH_Y_RTZ;

/// Where the positional channel bounds come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMode {
    /// One min/max per channel over every kept sequence of a build.
    Global,
    /// Min/max taken from each sequence on its own.
    Local,
}

impl fmt::Display for NormMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormMode::Global => "global",
            NormMode::Local => "local",
        })
    }
}

impl FromStr for NormMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "global" => Ok(NormMode::Global),
            "local" => Ok(NormMode::Local),
            other => Err(format!("unknown normalization mode `{other}` (expected global or local)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelNorm {
    pub min: f64,
    pub max: f64,
}

impl ChannelNorm {
    pub fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub fn is_constant(&self) -> bool {
        self.max <= self.min
    }

    /// `(x - min) / (max - min)` clamped to `[0, 1]`; a constant channel maps to 0.
    pub fn apply(&self, x: f64) -> f64 {
        if self.is_constant() {
            return 0.0;
        }
        ((x - self.min) / (self.max - self.min)).clamp(0.0, 1.0)
    }

    pub fn invert(&self, y: f64) -> f64 {
        self.min + y * (self.max - self.min)
    }

    fn of<'a>(values: impl IntoIterator<Item = &'a f64>) -> Option<Self> {
        let mut it = values.into_iter().copied();
        let first = it.next()?;
        let (min, max) = it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v)));
        Some(Self { min, max })
    }
}

/// Per-channel bounds. Positional channels are `None` in local mode because
/// their bounds live with each sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationSpec {
    pub mode: NormMode,
    pub channels: Vec<Option<ChannelNorm>>,
}

impl NormalizationSpec {
    /// Fixed bounds for the non-positional channels; positional left unset.
    pub fn fixed(mode: NormMode, coast_radius_km: f64, harbor_radius_km: f64) -> Self {
        let mut channels = vec![None; NUM_FEATURES];
        channels[CH_DT] = Some(ChannelNorm::new(0.0, 7200.0));
        channels[CH_SOG] = Some(ChannelNorm::new(0.0, 1022.0));
        channels[CH_COG] = Some(ChannelNorm::new(0.0, 359.9));
        channels[CH_COAST] = Some(ChannelNorm::new(0.0, coast_radius_km));
        channels[CH_HARBOR] = Some(ChannelNorm::new(0.0, harbor_radius_km));
        Self { mode, channels }
    }

    pub fn is_positional(channel: usize) -> bool {
        POSITIONAL.contains(&channel)
    }

    /// Channels whose stored bounds are degenerate.
    pub fn constant_channels(&self) -> Vec<usize> {
        self.channels
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_some_and(|c| c.is_constant()))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Fit the positional bounds over all given sequences (true rows only).
pub fn fit_global<'a>(
    features: impl IntoIterator<Item = &'a RawFeatures>,
    coast_radius_km: f64,
    harbor_radius_km: f64,
) -> NormalizationSpec {
    let mut spec = NormalizationSpec::fixed(NormMode::Global, coast_radius_km, harbor_radius_km);
    let mut bounds: [Option<ChannelNorm>; NUM_FEATURES] = [None; NUM_FEATURES];
    for f in features {
        for row in &f.rows {
            for c in POSITIONAL {
                let v = row[c];
                bounds[c] = Some(match bounds[c] {
                    None => ChannelNorm::new(v, v),
                    Some(b) => ChannelNorm::new(b.min.min(v), b.max.max(v)),
                });
            }
        }
    }
    for c in POSITIONAL {
        spec.channels[c] = Some(bounds[c].unwrap_or(ChannelNorm::new(0.0, 0.0)));
    }
    spec
}

/// Normalized, zero-padded values of one sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct Normalized {
    /// `seq_len x NUM_FEATURES`, row-major.
    pub values: Vec<f32>,
    /// Channels that were constant and therefore written as 0.
    pub constant_channels: Vec<usize>,
}

pub fn normalize(raw: &RawFeatures, spec: &NormalizationSpec, seq_len: usize) -> Result<Normalized, PipelineError> {
    if raw.rows.len() > seq_len {
        return Err(PipelineError::InvalidConfig(format!(
            "{} rows do not fit a sequence of length {seq_len}",
            raw.rows.len()
        )));
    }
    if spec.channels.len() != NUM_FEATURES {
        return Err(PipelineError::InvalidConfig(format!(
            "normalization spec has {} channels, expected {NUM_FEATURES}",
            spec.channels.len()
        )));
    }
    let mut norms = [ChannelNorm::new(0.0, 0.0); NUM_FEATURES];
    for (c, slot) in norms.iter_mut().enumerate() {
        *slot = match (spec.channels[c], spec.mode) {
            (Some(n), _) => n,
            (None, NormMode::Local) if NormalizationSpec::is_positional(c) => {
                ChannelNorm::of(raw.rows.iter().map(|r| &r[c])).unwrap_or(ChannelNorm::new(0.0, 0.0))
            }
            (None, _) => {
                return Err(PipelineError::InvalidConfig(format!("no bounds for channel {c}")));
            }
        };
    }
    let constant_channels = (0..NUM_FEATURES).filter(|&c| norms[c].is_constant()).collect();
    let mut values = vec![0.0f32; seq_len * NUM_FEATURES];
    for (row, out) in raw.rows.iter().zip(values.chunks_exact_mut(NUM_FEATURES)) {
        for c in 0..NUM_FEATURES {
            out[c] = norms[c].apply(row[c]) as f32;
        }
    }
    Ok(Normalized {
        values,
        constant_channels,
    })
}

/// Invert [`normalize`] for the first `true_length` rows. Needs every channel
/// bound in the spec, so local-mode positional channels cannot be recovered.
pub fn denormalize(
    values: &[f32],
    true_length: usize,
    spec: &NormalizationSpec,
) -> Result<Vec<FeatureRow>, PipelineError> {
    let norms: Vec<ChannelNorm> = spec
        .channels
        .iter()
        .enumerate()
        .map(|(c, n)| n.ok_or_else(|| PipelineError::InvalidConfig(format!("channel {c} has per-sequence bounds"))))
        .collect::<Result<_, _>>()?;
    if norms.len() != NUM_FEATURES || values.len() < true_length * NUM_FEATURES {
        return Err(PipelineError::InvalidConfig("value matrix does not match the spec".into()));
    }
    Ok(values
        .chunks_exact(NUM_FEATURES)
        .take(true_length)
        .map(|row| {
            let mut out = [0.0; NUM_FEATURES];
            for c in 0..NUM_FEATURES {
                out[c] = norms[c].invert(f64::from(row[c]));
            }
            out
        })
        .collect())
}
