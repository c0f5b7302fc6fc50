//! Network building blocks.
//!
//! A layer's `forward` in training mode caches what `backward` needs;
//! `infer` is side-effect free and can run on a shared reference.

mod batchnorm;
mod conv;
mod dense;
mod residual;
mod sequential;
mod simple;
mod split;

pub use batchnorm::BatchNorm1d;
pub use conv::Conv1d;
pub use dense::Dense;
pub use residual::ResidualBlock;
pub use sequential::Sequential;
pub use simple::{Flatten, GlobalAvgPool, Relu};
pub use split::ChannelSplit;

use rand::Rng;

use super::{NetResult, Scalar, Tensor};

pub trait Layer<T: Scalar>: Send + Sync {
    fn name(&self) -> &'static str;

    /// Training-mode forward pass; caches activations for [`Layer::backward`].
    fn forward(&mut self, x: Tensor<T>) -> NetResult<Tensor<T>>;

    /// Inference-mode forward pass.
    fn infer(&self, x: &Tensor<T>) -> NetResult<Tensor<T>>;

    /// Gradient with respect to the input of the last `forward`. Parameter
    /// gradients are accumulated, not overwritten.
    fn backward(&mut self, grad: Tensor<T>) -> NetResult<Tensor<T>>;

    /// Visit every parameter tensor in a fixed order.
    fn visit_params(&self, _f: &mut dyn FnMut(&[T])) {}

    /// Visit `(values, gradients)` pairs in the same order as `visit_params`.
    fn visit_params_mut(&mut self, _f: &mut dyn FnMut(&mut [T], &mut [T])) {}

    /// Non-trainable state such as running statistics.
    fn visit_buffers(&self, _f: &mut dyn FnMut(&[T])) {}

    fn visit_buffers_mut(&mut self, _f: &mut dyn FnMut(&mut [T])) {}

    /// Gate pattern of every ReLU touched by the last `forward`, used to tell
    /// whether two evaluations lie on the same smooth piece.
    fn activation_pattern(&self, _out: &mut Vec<bool>) {}

    fn param_count(&self) -> usize {
        let mut n = 0;
        self.visit_params(&mut |p| n += p.len());
        n
    }

    fn zero_grad(&mut self) {
        self.visit_params_mut(&mut |_, g| g.iter_mut().for_each(|v| *v = T::zero()));
    }
}

/// He-uniform initializer: `U(-sqrt(6 / fan_in), sqrt(6 / fan_in))`.
pub(crate) fn he_uniform<T: Scalar>(n: usize, fan_in: usize, rng: &mut impl Rng) -> Vec<T> {
    let limit = (6.0 / fan_in.max(1) as f64).sqrt();
    (0..n).map(|_| T::of(rng.random_range(-limit..limit))).collect()
}
