use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::network::argmax_rows;
use super::{add_input_noise, cross_entropy, Adam, ModelConfig, NetError, NetResult, Network, Tensor};
use crate::pipeline::{FeatureSequence, NUM_FEATURES};

/// Mini-batch size used for a sequence length when none is configured.
pub fn batch_size_for(seq_len: usize) -> usize {
    match seq_len {
        1080 => 128,
        1800 => 256,
        _ => 64,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    /// Initial learning rate; `None` picks 0.001, or 0.002 with batch norm.
    pub learning_rate: Option<f64>,
    /// Epochs without a new best validation loss before the rate is reduced.
    pub plateau_patience: usize,
    pub plateau_factor: f64,
    /// Epochs without a new best validation loss before training stops.
    pub early_stop_patience: usize,
    pub max_epochs: usize,
    pub batch_size: Option<usize>,
    /// Standard deviation of the Gaussian input noise added during training.
    pub noise_sigma: f64,
    pub seed: u64,
    /// Weight the loss by inverse class frequency of the training split.
    pub class_weights: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: None,
            plateau_patience: 10,
            plateau_factor: 0.5,
            early_stop_patience: 15,
            max_epochs: 600,
            batch_size: None,
            noise_sigma: 0.01,
            seed: 0,
            class_weights: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> NetResult<()> {
        let bad = |m: &str| Err(NetError::InvalidConfig(m.to_string()));
        if self.plateau_patience == 0 || self.early_stop_patience == 0 || self.max_epochs == 0 {
            return bad("patience and epoch limits must be positive");
        }
        if !(self.plateau_factor > 0.0 && self.plateau_factor <= 1.0) {
            return bad("plateau factor must be in (0, 1]");
        }
        if matches!(self.learning_rate, Some(lr) if !(lr > 0.0 && lr.is_finite())) {
            return bad("learning rate must be positive");
        }
        if self.batch_size == Some(0) {
            return bad("batch size must be positive");
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad("noise sigma must be non-negative");
        }
        Ok(())
    }

    pub fn initial_lr(&self, model: &ModelConfig) -> f64 {
        self.learning_rate
            .unwrap_or(if model.batch_norm { 0.002 } else { 0.001 })
    }

    pub fn effective_batch_size(&self, model: &ModelConfig) -> usize {
        self.batch_size.unwrap_or_else(|| batch_size_for(model.seq_len))
    }
}

/// Samples laid out as an `N x C x L` tensor with labels and unpadded lengths.
#[derive(Clone, Debug)]
pub struct TrainData {
    pub x: Tensor<f32>,
    pub labels: Vec<usize>,
    pub lengths: Vec<usize>,
}

impl TrainData {
    /// Transpose time-major pipeline sequences into channel-major samples.
    pub fn from_sequences(seqs: &[FeatureSequence]) -> NetResult<Self> {
        let l = seqs.first().map_or(0, |s| s.seq_len as usize);
        let c = NUM_FEATURES;
        let mut data = vec![0.0f32; seqs.len() * c * l];
        for (i, s) in seqs.iter().enumerate() {
            if s.seq_len as usize != l || s.values.len() != l * c {
                return Err(NetError::ShapeMismatch(format!(
                    "sequence {i} has length {} with {} values, expected {l}",
                    s.seq_len,
                    s.values.len()
                )));
            }
            let dst = &mut data[i * c * l..(i + 1) * c * l];
            for t in 0..l {
                for ch in 0..c {
                    dst[ch * l + t] = s.values[t * c + ch];
                }
            }
        }
        Ok(Self {
            x: Tensor::from_vec(&[seqs.len(), c, l], data)?,
            labels: seqs.iter().map(|s| s.label.index()).collect(),
            lengths: seqs.iter().map(|s| s.true_length as usize).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn subset(&self, idx: &[usize]) -> Self {
        Self {
            x: self.x.gather(idx),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            lengths: idx.iter().map(|&i| self.lengths[i]).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_acc: f64,
    pub val_loss: f64,
    pub val_acc: f64,
    pub lr: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxEpochs,
    EarlyStop,
    Interrupted,
}

pub struct TrainOutcome {
    /// Weights from the epoch with the lowest validation loss.
    pub network: Network<f32>,
    pub optimizer: Adam<f32>,
    pub history: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub stop: StopReason,
}

/// Mean loss and accuracy of `data` in inference mode.
pub fn evaluate(net: &Network<f32>, data: &TrainData, batch: usize) -> NetResult<(f64, f64)> {
    let mut loss = 0.0;
    let mut correct = 0usize;
    let n = data.len();
    let mut start = 0;
    while start < n {
        let end = (start + batch.max(1)).min(n);
        let logits = net.infer(&data.x.batch_range(start, end))?;
        let labels = &data.labels[start..end];
        let (l, _) = cross_entropy(&logits, labels)?;
        loss += l as f64 * (end - start) as f64;
        correct += argmax_rows(&logits).iter().zip(labels).filter(|(p, y)| p == y).count();
        start = end;
    }
    Ok((loss / n.max(1) as f64, correct as f64 / n.max(1) as f64))
}

/// Predicted class for every sample of `data`.
pub fn predict_all(net: &Network<f32>, data: &TrainData, batch: usize) -> NetResult<Vec<usize>> {
    let mut out = Vec::with_capacity(data.len());
    let mut start = 0;
    while start < data.len() {
        let end = (start + batch.max(1)).min(data.len());
        out.extend(net.predict(&data.x.batch_range(start, end))?);
        start = end;
    }
    Ok(out)
}

pub fn train(model: &ModelConfig, cfg: &TrainConfig, train: &TrainData, val: &TrainData) -> NetResult<TrainOutcome> {
    train_with(model, cfg, train, val, |_| true)
}

/// Train with a per-epoch callback; returning `false` stops after that epoch.
pub fn train_with(
    model: &ModelConfig,
    cfg: &TrainConfig,
    train: &TrainData,
    val: &TrainData,
    mut on_epoch: impl FnMut(&EpochRecord) -> bool,
) -> NetResult<TrainOutcome> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(NetError::EmptySplit("train".into()));
    }
    if val.is_empty() {
        return Err(NetError::EmptySplit("validation".into()));
    }
    let mut net = Network::<f32>::new(model.clone(), cfg.seed)?;
    let mut adam = Adam::new(net.param_count(), cfg.initial_lr(model));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x5eed));
    let batch = cfg.effective_batch_size(model);
    let weights = cfg.class_weights.then(|| inverse_frequency(&train.labels, model.classes));

    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut history = Vec::new();
    let mut best = (f64::INFINITY, 0usize, net.params(), net.buffers());
    let mut since_best = 0;
    let mut plateau_wait = 0;
    let mut stop = StopReason::MaxEpochs;

    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut correct = 0;
        for idx in batches(&order, batch) {
            let mut x = train.x.gather(idx);
            let lengths: Vec<usize> = idx.iter().map(|&i| train.lengths[i]).collect();
            let labels: Vec<usize> = idx.iter().map(|&i| train.labels[i]).collect();
            add_input_noise(&mut x, &lengths, cfg.noise_sigma, &mut rng)?;
            let logits = net.forward(x)?;
            let (loss, mut grad) = cross_entropy(&logits, &labels)?;
            if !loss.is_finite() {
                return Err(NetError::DivergedLoss { epoch });
            }
            if let Some(w) = &weights {
                let k = model.classes;
                for (row, &y) in grad.data_mut().chunks_exact_mut(k).zip(&labels) {
                    row.iter_mut().for_each(|v| *v *= w[y]);
                }
            }
            loss_sum += loss as f64 * idx.len() as f64;
            correct += argmax_rows(&logits).iter().zip(&labels).filter(|(p, y)| p == y).count();
            net.zero_grad();
            net.backward(grad)?;
            adam.step(&mut net)?;
        }
        let (val_loss, val_acc) = evaluate(&net, val, batch)?;
        if !val_loss.is_finite() {
            return Err(NetError::DivergedLoss { epoch });
        }
        let record = EpochRecord {
            epoch,
            train_loss: loss_sum / train.len() as f64,
            train_acc: correct as f64 / train.len() as f64,
            val_loss,
            val_acc,
            lr: adam.lr,
        };
        history.push(record.clone());

        if val_loss < best.0 {
            best = (val_loss, epoch, net.params(), net.buffers());
            since_best = 0;
            plateau_wait = 0;
        } else {
            since_best += 1;
            plateau_wait += 1;
            if plateau_wait >= cfg.plateau_patience {
                adam.lr *= cfg.plateau_factor;
                plateau_wait = 0;
            }
        }
        if !on_epoch(&record) {
            stop = StopReason::Interrupted;
            break;
        }
        if since_best >= cfg.early_stop_patience {
            stop = StopReason::EarlyStop;
            break;
        }
    }
    net.set_params(&best.2)?;
    net.set_buffers(&best.3)?;
    Ok(TrainOutcome {
        network: net,
        optimizer: adam,
        history,
        best_epoch: best.1,
        stop,
    })
}

/// Split `order` into batches of `size`; a trailing single sample joins the
/// previous batch so batch statistics stay defined.
fn batches(order: &[usize], size: usize) -> Vec<&[usize]> {
    let mut out: Vec<&[usize]> = order.chunks(size.max(1)).collect();
    if out.len() > 1 && out.last().is_some_and(|b| b.len() == 1) {
        out.pop();
        let start = (out.len() - 1) * size;
        *out.last_mut().expect("non-empty") = &order[start..];
    }
    out
}

fn inverse_frequency(labels: &[usize], classes: usize) -> Vec<f32> {
    let mut counts = vec![0usize; classes];
    labels.iter().for_each(|&y| counts[y] += 1);
    let present = counts.iter().filter(|&&c| c > 0).count().max(1);
    counts
        .iter()
        .map(|&c| if c == 0 { 0.0 } else { labels.len() as f32 / (present as f32 * c as f32) })
        .collect()
}

pub fn write_history_csv(history: &[EpochRecord], path: &Path) -> NetResult<()> {
    let mut out = String::from("epoch,train_loss,train_acc,val_loss,val_acc,lr\n");
    for r in history {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.epoch, r.train_loss, r.train_acc, r.val_loss, r.val_acc, r.lr
        ));
    }
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(out.as_bytes()))
        .map_err(|e| NetError::io(path, e))
}
