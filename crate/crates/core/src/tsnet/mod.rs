//! A small CPU tensor and training engine for 1D convolutional networks.
//!
//! Tensors are dense `N x C x L` (or `N x F`) arrays. Layers cache what
//! their backward pass needs during a training forward pass and accumulate
//! parameter gradients on backward. Everything is generic over [`Scalar`] so
//! gradient checks can run in `f64` while training runs in `f32`.

mod checkpoint;
mod config;
mod kernels;
pub mod layers;
mod loss;
mod network;
mod noise;
mod optim;
mod tensor;
mod train;

pub use checkpoint::{Checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use config::{BlockSpec, Body, ModelConfig, PRESETS};
pub use loss::{cross_entropy, softmax_rows};
pub use network::Network;
pub use noise::add_input_noise;
pub use optim::Adam;
pub use tensor::Tensor;
pub use train::{
    batch_size_for, evaluate, predict_all, train, train_with, write_history_csv, EpochRecord, StopReason, TrainConfig, TrainData, TrainOutcome,
};

use std::fmt::Debug;
use std::iter::Sum;
use std::ops::{AddAssign, MulAssign, SubAssign};

/// Floating-point element type of tensors.
pub trait Scalar:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + Sum
    + Default
    + Debug
    + Send
    + Sync
    + 'static
{
    fn of(v: f64) -> Self {
        <Self as num_traits::FromPrimitive>::from_f64(v).expect("finite value")
    }

    fn as_f64(self) -> f64 {
        <Self as num_traits::ToPrimitive>::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[derive(Debug, thiserror::Error)]
pub enum NetError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),
    #[error("batch normalization needs at least 2 values per channel, got {0}")]
    DegenerateBatch(usize),
    #[error("the {0} split is empty")]
    EmptySplit(String),
    #[error("loss diverged (non-finite) in epoch {epoch}")]
    DivergedLoss { epoch: usize },
    #[error("unknown preset `{name}`; available: {available}")]
    UnknownPreset { name: String, available: String },
    #[error("bad magic: expected {expected:?}, found {found:?}")]
    MagicMismatch { expected: String, found: String },
    #[error("unsupported checkpoint version {found} (expected {expected})")]
    VersionMismatch { expected: u16, found: u16 },
    #[error("checksum mismatch: {0}")]
    ChecksumMismatch(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl NetError {
    pub fn is_io(&self) -> bool {
        matches!(self, NetError::Io { .. })
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        NetError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type NetResult<T> = Result<T, NetError>;
