use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Adam, EpochRecord, ModelConfig, NetError, NetResult, Network, StopReason, TrainConfig, TrainOutcome};

pub const CHECKPOINT_MAGIC: [u8; 4] = *b"TSNC";
pub const CHECKPOINT_VERSION: u16 = 1;

/// A trained model with its optimizer state and training history.
///
/// File layout: magic, `u16` version, `u32` header length, JSON header,
/// little-endian `f32` payload (parameters, buffers, Adam first and second
/// moments), then a CRC32 of every preceding byte.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub history: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub stop: StopReason,
    pub dataset_id: Option<String>,
    pub params: Vec<f32>,
    pub buffers: Vec<f32>,
    pub adam_step: u64,
    pub adam_lr: f64,
    pub adam_m: Vec<f32>,
    pub adam_v: Vec<f32>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    model: ModelConfig,
    train: TrainConfig,
    history: Vec<EpochRecord>,
    best_epoch: usize,
    stop: StopReason,
    dataset_id: Option<String>,
    param_count: usize,
    buffer_count: usize,
    adam_step: u64,
    adam_lr: f64,
}

impl Checkpoint {
    pub fn from_outcome(outcome: &TrainOutcome, train: &TrainConfig) -> Self {
        let (m, v) = outcome.optimizer.moments();
        Self {
            model: outcome.network.config().clone(),
            train: train.clone(),
            history: outcome.history.clone(),
            best_epoch: outcome.best_epoch,
            stop: outcome.stop,
            dataset_id: None,
            params: outcome.network.params(),
            buffers: outcome.network.buffers(),
            adam_step: outcome.optimizer.step_count(),
            adam_lr: outcome.optimizer.lr,
            adam_m: m.to_vec(),
            adam_v: v.to_vec(),
        }
    }

    pub fn network(&self) -> NetResult<Network<f32>> {
        let expected = self.model.parameter_count();
        if self.params.len() != expected {
            return Err(NetError::InvalidConfig(format!(
                "checkpoint holds {} parameters, configuration needs {expected}",
                self.params.len()
            )));
        }
        let mut net = Network::new(self.model.clone(), 0)?;
        net.set_params(&self.params)?;
        net.set_buffers(&self.buffers)
            .map_err(|e| NetError::InvalidConfig(e.to_string()))?;
        Ok(net)
    }

    pub fn optimizer(&self) -> NetResult<Adam<f32>> {
        Adam::from_state(self.adam_lr, self.adam_step, self.adam_m.clone(), self.adam_v.clone())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let header = Header {
            model: self.model.clone(),
            train: self.train.clone(),
            history: self.history.clone(),
            best_epoch: self.best_epoch,
            stop: self.stop,
            dataset_id: self.dataset_id.clone(),
            param_count: self.params.len(),
            buffer_count: self.buffers.len(),
            adam_step: self.adam_step,
            adam_lr: self.adam_lr,
        };
        let json = serde_json::to_vec(&header).expect("header serializes");
        let floats = self.params.len() + self.buffers.len() + self.adam_m.len() + self.adam_v.len();
        let mut out = Vec::with_capacity(14 + json.len() + 4 * floats);
        out.extend_from_slice(&CHECKPOINT_MAGIC);
        out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
        out.extend_from_slice(&(json.len() as u32).to_le_bytes());
        out.extend_from_slice(&json);
        for v in [&self.params, &self.buffers, &self.adam_m, &self.adam_v] {
            for x in v.iter() {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        let crc = crc32fast::hash(&out);
        out.extend_from_slice(&crc.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> NetResult<Self> {
        if bytes.len() < 4 || bytes[..4] != CHECKPOINT_MAGIC {
            return Err(NetError::MagicMismatch {
                expected: String::from_utf8_lossy(&CHECKPOINT_MAGIC).into_owned(),
                found: String::from_utf8_lossy(&bytes[..bytes.len().min(4)]).into_owned(),
            });
        }
        if bytes.len() < 6 {
            return Err(NetError::ChecksumMismatch("truncated before version".into()));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != CHECKPOINT_VERSION {
            return Err(NetError::VersionMismatch {
                expected: CHECKPOINT_VERSION,
                found: version,
            });
        }
        if bytes.len() < 14 {
            return Err(NetError::ChecksumMismatch("file too short".into()));
        }
        let (body, tail) = bytes.split_at(bytes.len() - 4);
        let stored = u32::from_le_bytes(tail.try_into().expect("4 bytes"));
        let actual = crc32fast::hash(body);
        if stored != actual {
            return Err(NetError::ChecksumMismatch(format!("stored {stored:08x}, computed {actual:08x}")));
        }
        let corrupt = |m: &str| NetError::InvalidConfig(format!("malformed checkpoint: {m}"));
        let json_len = u32::from_le_bytes(body[6..10].try_into().expect("4 bytes")) as usize;
        let json = body.get(10..10 + json_len).ok_or_else(|| corrupt("header length"))?;
        let header: Header = serde_json::from_slice(json).map_err(|e| corrupt(&e.to_string()))?;
        let payload = &body[10 + json_len..];
        if payload.len() % 4 != 0 {
            return Err(corrupt("payload is not whole floats"));
        }
        let floats: Vec<f32> = payload
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect();
        let (p, b) = (header.param_count, header.buffer_count);
        let rest = floats
            .len()
            .checked_sub(p + b)
            .ok_or_else(|| corrupt("payload shorter than header counts"))?;
        if rest % 2 != 0 {
            return Err(corrupt("optimizer moments differ in length"));
        }
        let m = rest / 2;
        Ok(Self {
            model: header.model,
            train: header.train,
            history: header.history,
            best_epoch: header.best_epoch,
            stop: header.stop,
            dataset_id: header.dataset_id,
            params: floats[..p].to_vec(),
            buffers: floats[p..p + b].to_vec(),
            adam_step: header.adam_step,
            adam_lr: header.adam_lr,
            adam_m: floats[p + b..p + b + m].to_vec(),
            adam_v: floats[p + b + m..].to_vec(),
        })
    }

    /// Short identifier derived from the serialized bytes.
    pub fn id(&self) -> String {
        format!("{:08x}", crc32fast::hash(&self.to_bytes()))
    }

    pub fn save(&self, path: &Path) -> NetResult<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| NetError::io(path, e))
    }

    pub fn load(path: &Path) -> NetResult<Self> {
        let bytes = std::fs::read(path).map_err(|e| NetError::io(path, e))?;
        Self::from_bytes(&bytes)
    }

    /// Load and require the stored model to match `expected`.
    pub fn load_for(path: &Path, expected: &ModelConfig) -> NetResult<Self> {
        let ck = Self::load(path)?;
        if &ck.model != expected {
            return Err(NetError::InvalidConfig(format!(
                "checkpoint holds `{}` (L={}), expected `{}` (L={})",
                ck.model.name(),
                ck.model.seq_len,
                expected.name(),
                expected.seq_len
            )));
        }
        Ok(ck)
    }
}
