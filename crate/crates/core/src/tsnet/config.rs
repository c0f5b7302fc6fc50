use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::layers::{BatchNorm1d, ChannelSplit, Dense, Flatten, GlobalAvgPool, Relu, ResidualBlock, Sequential};
use super::{NetError, NetResult, Scalar};

/// Kernel sizes of the standard three-convolution residual block.
pub const RESNET_KERNELS: [usize; 3] = [8, 5, 3];

pub const PRESETS: [&str; 8] = [
    "tiny_resnet",
    "shallow_resnet",
    "deep_resnet",
    "stretched_deep_resnet",
    "split_resnet",
    "total_split_resnet",
    "mlp_2x64",
    "mlp_4x64",
];

/// One residual block: every convolution has `width` filters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub width: usize,
    pub kernels: Vec<usize>,
}

impl BlockSpec {
    pub fn standard(width: usize) -> Self {
        Self {
            width,
            kernels: RESNET_KERNELS.to_vec(),
        }
    }

    fn repeat(width: usize, n: usize) -> Vec<Self> {
        (0..n).map(|_| Self::standard(width)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Body {
    /// Flatten, hidden dense layers with ReLU, dense output.
    Mlp { hidden: Vec<usize> },
    /// Residual blocks, global average pooling, dense output.
    ResNet { blocks: Vec<BlockSpec> },
    /// A residual stem per input channel, concatenated, then a shared trunk.
    Split { stem: Vec<BlockSpec>, trunk: Vec<BlockSpec> },
    /// A residual branch and pooling per input channel, merged at the head.
    TotalSplit { branch: Vec<BlockSpec> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub preset: Option<String>,
    pub seq_len: usize,
    pub channels: usize,
    pub classes: usize,
    /// Batch norm before every ReLU (and on projection shortcuts). On for the
    /// residual presets, off for the MLPs.
    pub batch_norm: bool,
    pub body: Body,
}

fn conv_params(cin: usize, cout: usize, k: usize) -> usize {
    cout * cin * k + cout
}

fn dense_params(nin: usize, nout: usize) -> usize {
    nin * nout + nout
}

impl ModelConfig {
    /// A named architecture for the given sequence length, 9 channels and 5 classes.
    pub fn preset(name: &str, seq_len: usize) -> NetResult<Self> {
        let body = match name {
            "tiny_resnet" => Body::ResNet {
                blocks: BlockSpec::repeat(26, 3),
            },
            "shallow_resnet" => Body::ResNet {
                blocks: [BlockSpec::repeat(50, 3), BlockSpec::repeat(86, 3)].concat(),
            },
            "deep_resnet" => Body::ResNet {
                blocks: [BlockSpec::repeat(62, 7), BlockSpec::repeat(64, 14)].concat(),
            },
            "stretched_deep_resnet" => Body::ResNet {
                blocks: [BlockSpec::repeat(62, 7), BlockSpec::repeat(114, 14)].concat(),
            },
            "split_resnet" => Body::Split {
                stem: BlockSpec::repeat(7, 2),
                trunk: BlockSpec::repeat(63, 6),
            },
            "total_split_resnet" => Body::TotalSplit {
                branch: BlockSpec::repeat(18, 8),
            },
            "mlp_2x64" => Body::Mlp { hidden: vec![64; 2] },
            "mlp_4x64" => Body::Mlp { hidden: vec![64; 4] },
            other => {
                return Err(NetError::UnknownPreset {
                    name: other.to_string(),
                    available: PRESETS.join(", "),
                })
            }
        };
        // residual presets normalize before every ReLU; the MLP baselines are plain
        let batch_norm = !matches!(body, Body::Mlp { .. });
        Ok(Self {
            preset: Some(name.to_string()),
            seq_len,
            channels: 9,
            classes: 5,
            batch_norm,
            body,
        })
    }

    pub fn with_batch_norm(mut self, on: bool) -> Self {
        self.batch_norm = on;
        self
    }

    pub fn name(&self) -> &str {
        self.preset.as_deref().unwrap_or("custom")
    }

    pub fn validate(&self) -> NetResult<()> {
        let bad = |m: &str| Err(NetError::InvalidConfig(m.to_string()));
        if self.seq_len == 0 || self.channels == 0 || self.classes == 0 {
            return bad("sequence length, channels and classes must be positive");
        }
        let blocks_ok = |b: &[BlockSpec]| b.iter().all(|s| s.width > 0 && !s.kernels.is_empty() && s.kernels.iter().all(|&k| k > 0));
        match &self.body {
            Body::Mlp { hidden } if hidden.contains(&0) => bad("hidden widths must be positive"),
            Body::ResNet { blocks } if blocks.is_empty() || !blocks_ok(blocks) => bad("resnet needs valid blocks"),
            Body::Split { stem, trunk } if stem.is_empty() || !blocks_ok(stem) || !blocks_ok(trunk) => {
                bad("split model needs a valid stem")
            }
            Body::TotalSplit { branch } if branch.is_empty() || !blocks_ok(branch) => {
                bad("total split model needs valid branch blocks")
            }
            _ => Ok(()),
        }
    }

    /// Trainable scalars, batch-norm scale and shift included.
    pub fn parameter_count(&self) -> usize {
        let bn = |c: usize| if self.batch_norm { 2 * c } else { 0 };
        let blocks = |cin: usize, specs: &[BlockSpec]| -> (usize, usize) {
            let mut total = 0;
            let mut c = cin;
            for s in specs {
                let mut ci = c;
                for &k in &s.kernels {
                    total += conv_params(ci, s.width, k) + bn(s.width);
                    ci = s.width;
                }
                if c != s.width {
                    total += conv_params(c, s.width, 1) + bn(s.width);
                }
                c = s.width;
            }
            (total, c)
        };
        match &self.body {
            Body::Mlp { hidden } => {
                let mut total = 0;
                let mut n = self.seq_len * self.channels;
                for &h in hidden {
                    total += dense_params(n, h) + bn(h);
                    n = h;
                }
                total + dense_params(n, self.classes)
            }
            Body::ResNet { blocks: specs } => {
                let (p, c) = blocks(self.channels, specs);
                p + dense_params(c, self.classes)
            }
            Body::Split { stem, trunk } => {
                let (ps, cs) = blocks(1, stem);
                let merged = cs * self.channels;
                let (pt, ct) = blocks(merged, trunk);
                ps * self.channels + pt + dense_params(ct, self.classes)
            }
            Body::TotalSplit { branch } => {
                let (pb, cb) = blocks(1, branch);
                pb * self.channels + dense_params(cb * self.channels, self.classes)
            }
        }
    }

    /// Weighted layers along the longest input-to-output path.
    pub fn depth(&self) -> usize {
        let blocks = |cin: usize, specs: &[BlockSpec]| -> (usize, usize) {
            let mut d = 0;
            let mut c = cin;
            for s in specs {
                d += s.kernels.len() + usize::from(c != s.width);
                c = s.width;
            }
            (d, c)
        };
        match &self.body {
            Body::Mlp { hidden } => hidden.len() + 1,
            Body::ResNet { blocks: specs } => blocks(self.channels, specs).0 + 1,
            Body::Split { stem, trunk } => {
                let (ds, cs) = blocks(1, stem);
                ds + blocks(cs * self.channels, trunk).0 + 1
            }
            Body::TotalSplit { branch } => blocks(1, branch).0 + 1,
        }
    }

    /// Assemble the network with weights drawn from a generator seeded by `seed`.
    pub fn build<T: Scalar>(&self, seed: u64) -> NetResult<Sequential<T>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bn = self.batch_norm;
        let push_blocks = |seq: &mut Sequential<T>, cin: usize, specs: &[BlockSpec], rng: &mut ChaCha8Rng| -> NetResult<usize> {
            let mut c = cin;
            for s in specs {
                seq.push(ResidualBlock::new(c, s.width, &s.kernels, bn, rng)?);
                c = s.width;
            }
            Ok(c)
        };
        let mut root = Sequential::new();
        match &self.body {
            Body::Mlp { hidden } => {
                root.push(Flatten::new());
                let mut n = self.seq_len * self.channels;
                for &h in hidden {
                    root.push(Dense::new(n, h, &mut rng));
                    if bn {
                        root.push(BatchNorm1d::new(h));
                    }
                    root.push(Relu::new());
                    n = h;
                }
                root.push(Dense::new(n, self.classes, &mut rng));
            }
            Body::ResNet { blocks } => {
                let c = push_blocks(&mut root, self.channels, blocks, &mut rng)?;
                root.push(GlobalAvgPool::new());
                root.push(Dense::new(c, self.classes, &mut rng));
            }
            Body::Split { stem, trunk } => {
                let mut branches = Vec::with_capacity(self.channels);
                let mut cs = 1;
                for _ in 0..self.channels {
                    let mut b = Sequential::new();
                    cs = push_blocks(&mut b, 1, stem, &mut rng)?;
                    branches.push(b);
                }
                root.push(ChannelSplit::new((0..self.channels).map(|c| (c, 1)).collect(), branches)?);
                let c = push_blocks(&mut root, cs * self.channels, trunk, &mut rng)?;
                root.push(GlobalAvgPool::new());
                root.push(Dense::new(c, self.classes, &mut rng));
            }
            Body::TotalSplit { branch } => {
                let mut branches = Vec::with_capacity(self.channels);
                let mut cb = 1;
                for _ in 0..self.channels {
                    let mut b = Sequential::new();
                    cb = push_blocks(&mut b, 1, branch, &mut rng)?;
                    b.push(GlobalAvgPool::new());
                    branches.push(b);
                }
                root.push(ChannelSplit::new((0..self.channels).map(|c| (c, 1)).collect(), branches)?);
                root.push(Dense::new(cb * self.channels, self.classes, &mut rng));
            }
        }
        Ok(root)
    }
}
