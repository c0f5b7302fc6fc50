use super::layers::{Layer, Sequential};
use super::{softmax_rows, ModelConfig, NetError, NetResult, Scalar, Tensor};

/// A model built from a [`ModelConfig`]: takes `N x C x L` input and returns
/// `N x classes` logits.
pub struct Network<T: Scalar> {
    config: ModelConfig,
    root: Sequential<T>,
}

impl<T: Scalar> Network<T> {
    pub fn new(config: ModelConfig, seed: u64) -> NetResult<Self> {
        let root = config.build(seed)?;
        Ok(Self { config, root })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    fn check_input(&self, x: &Tensor<T>) -> NetResult<()> {
        let (_, c, l) = x.dims3()?;
        if c != self.config.channels || l != self.config.seq_len {
            return Err(NetError::ShapeMismatch(format!(
                "model expects {} x {} input, got {c} x {l}",
                self.config.channels, self.config.seq_len
            )));
        }
        Ok(())
    }

    /// Training-mode forward pass; batch norm uses batch statistics.
    pub fn forward(&mut self, x: Tensor<T>) -> NetResult<Tensor<T>> {
        self.check_input(&x)?;
        let y = self.root.forward(x)?;
        debug_assert!(y.all_finite(), "non-finite logits");
        Ok(y)
    }

    pub fn backward(&mut self, grad: Tensor<T>) -> NetResult<Tensor<T>> {
        self.root.backward(grad)
    }

    /// Inference-mode logits.
    pub fn infer(&self, x: &Tensor<T>) -> NetResult<Tensor<T>> {
        self.check_input(x)?;
        self.root.infer(x)
    }

    pub fn predict_proba(&self, x: &Tensor<T>) -> NetResult<Tensor<T>> {
        softmax_rows(&self.infer(x)?)
    }

    /// Arg-max class per sample; ties go to the lower index.
    pub fn predict(&self, x: &Tensor<T>) -> NetResult<Vec<usize>> {
        Ok(argmax_rows(&self.infer(x)?))
    }

    pub fn param_count(&self) -> usize {
        self.root.param_count()
    }

    pub fn params(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.param_count());
        self.root.visit_params(&mut |p| out.extend_from_slice(p));
        out
    }

    pub fn set_params(&mut self, values: &[T]) -> NetResult<()> {
        let n = self.param_count();
        if values.len() != n {
            return Err(NetError::ShapeMismatch(format!("{} parameters for a model with {n}", values.len())));
        }
        let mut off = 0;
        self.root.visit_params_mut(&mut |p, _| {
            p.copy_from_slice(&values[off..off + p.len()]);
            off += p.len();
        });
        Ok(())
    }

    pub fn grads(&mut self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.param_count());
        self.root.visit_params_mut(&mut |_, g| out.extend_from_slice(g));
        out
    }

    pub fn buffer_count(&self) -> usize {
        let mut n = 0;
        self.root.visit_buffers(&mut |b| n += b.len());
        n
    }

    pub fn buffers(&self) -> Vec<T> {
        let mut out = Vec::new();
        self.root.visit_buffers(&mut |b| out.extend_from_slice(b));
        out
    }

    pub fn set_buffers(&mut self, values: &[T]) -> NetResult<()> {
        let n = self.buffer_count();
        if values.len() != n {
            return Err(NetError::ShapeMismatch(format!("{} buffer values for a model with {n}", values.len())));
        }
        let mut off = 0;
        self.root.visit_buffers_mut(&mut |b| {
            b.copy_from_slice(&values[off..off + b.len()]);
            off += b.len();
        });
        Ok(())
    }

    pub fn zero_grad(&mut self) {
        self.root.zero_grad();
    }

    pub fn visit_params_mut(&mut self, f: &mut dyn FnMut(&mut [T], &mut [T])) {
        self.root.visit_params_mut(f);
    }

    pub fn activation_pattern(&self) -> Vec<bool> {
        let mut out = Vec::new();
        self.root.activation_pattern(&mut out);
        out
    }

    /// The same model with its weights converted to another scalar type.
    pub fn cast<U: Scalar>(&self) -> NetResult<Network<U>> {
        let mut other = Network::<U>::new(self.config.clone(), 0)?;
        let conv = |v: Vec<T>| v.into_iter().map(|x| U::of(x.as_f64())).collect::<Vec<U>>();
        other.set_params(&conv(self.params()))?;
        other.set_buffers(&conv(self.buffers()))?;
        Ok(other)
    }
}

pub(crate) fn argmax_rows<T: Scalar>(t: &Tensor<T>) -> Vec<usize> {
    let k = t.shape().get(1).copied().unwrap_or(1).max(1);
    t.data()
        .chunks_exact(k)
        .map(|row| {
            let mut best = 0;
            for (i, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = i;
                }
            }
            best
        })
        .collect()
}
