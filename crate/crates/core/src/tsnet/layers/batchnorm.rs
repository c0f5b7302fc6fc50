use super::Layer;
use crate::tsnet::{NetError, NetResult, Scalar, Tensor};

pub const BN_MOMENTUM: f64 = 0.9;
pub const BN_EPS: f64 = 1e-5;

/// Per-channel batch normalization over `N x C x L` or `N x C`.
///
/// Training mode normalizes with the biased batch variance and updates the
/// running statistics as `r = m * r + (1 - m) * batch`.
#[derive(Clone, Debug)]
pub struct BatchNorm1d<T> {
    c: usize,
    gamma: Vec<T>,
    beta: Vec<T>,
    grad_gamma: Vec<T>,
    grad_beta: Vec<T>,
    running_mean: Vec<T>,
    running_var: Vec<T>,
    momentum: T,
    eps: T,
    cache: Option<Cache<T>>,
}

#[derive(Clone, Debug)]
struct Cache<T> {
    xhat: Tensor<T>,
    inv_std: Vec<T>,
}

/// `(N, C, L)`, treating a rank-2 input as `L = 1`.
fn dims<T: Scalar>(x: &Tensor<T>) -> NetResult<(usize, usize, usize)> {
    match x.shape() {
        &[n, c] => Ok((n, c, 1)),
        &[n, c, l] => Ok((n, c, l)),
        s => Err(NetError::ShapeMismatch(format!("batch norm expects rank 2 or 3, got {s:?}"))),
    }
}

impl<T: Scalar> BatchNorm1d<T> {
    pub fn new(c: usize) -> Self {
        Self {
            c,
            gamma: vec![T::one(); c],
            beta: vec![T::zero(); c],
            grad_gamma: vec![T::zero(); c],
            grad_beta: vec![T::zero(); c],
            running_mean: vec![T::zero(); c],
            running_var: vec![T::one(); c],
            momentum: T::of(BN_MOMENTUM),
            eps: T::of(BN_EPS),
            cache: None,
        }
    }

    pub fn channels(&self) -> usize {
        self.c
    }

    pub fn gamma_mut(&mut self) -> &mut [T] {
        &mut self.gamma
    }

    pub fn beta_mut(&mut self) -> &mut [T] {
        &mut self.beta
    }

    pub fn running_mean(&self) -> &[T] {
        &self.running_mean
    }

    pub fn running_var(&self) -> &[T] {
        &self.running_var
    }

    fn check(&self, x: &Tensor<T>) -> NetResult<(usize, usize)> {
        let (n, c, l) = dims(x)?;
        if c != self.c {
            return Err(NetError::ShapeMismatch(format!(
                "batch norm has {} channels, input has {c}",
                self.c
            )));
        }
        Ok((n, l))
    }

    fn for_channel(n: usize, c: usize, l: usize, ch: usize) -> impl Iterator<Item = std::ops::Range<usize>> {
        (0..n).map(move |s| (s * c + ch) * l..(s * c + ch + 1) * l)
    }
}

impl<T: Scalar> Layer<T> for BatchNorm1d<T> {
    fn name(&self) -> &'static str {
        "batch_norm"
    }

    fn forward(&mut self, x: Tensor<T>) -> NetResult<Tensor<T>> {
        let (n, l) = self.check(&x)?;
        let m = n * l;
        if m < 2 {
            return Err(NetError::DegenerateBatch(m));
        }
        let mf = T::of(m as f64);
        let c = self.c;
        let mut xhat = x;
        let mut out = Tensor::zeros(xhat.shape());
        let mut inv_std = vec![T::zero(); c];
        for ch in 0..c {
            let mut mean = T::zero();
            for r in Self::for_channel(n, c, l, ch) {
                mean += xhat.data()[r].iter().copied().sum::<T>();
            }
            mean = mean / mf;
            let mut var = T::zero();
            for r in Self::for_channel(n, c, l, ch) {
                var += xhat.data()[r].iter().map(|&v| (v - mean) * (v - mean)).sum::<T>();
            }
            var = var / mf;
            let istd = T::one() / (var + self.eps).sqrt();
            inv_std[ch] = istd;
            let (g, b) = (self.gamma[ch], self.beta[ch]);
            for r in Self::for_channel(n, c, l, ch) {
                for (xh, o) in xhat.data_mut()[r.clone()].iter_mut().zip(&mut out.data_mut()[r]) {
                    *xh = (*xh - mean) * istd;
                    *o = g * *xh + b;
                }
            }
            let keep = self.momentum;
            self.running_mean[ch] = keep * self.running_mean[ch] + (T::one() - keep) * mean;
            self.running_var[ch] = keep * self.running_var[ch] + (T::one() - keep) * var;
        }
        self.cache = Some(Cache { xhat, inv_std });
        Ok(out)
    }

    fn infer(&self, x: &Tensor<T>) -> NetResult<Tensor<T>> {
        let (n, l) = self.check(x)?;
        let c = self.c;
        let mut out = x.clone();
        for ch in 0..c {
            let istd = T::one() / (self.running_var[ch] + self.eps).sqrt();
            let scale = self.gamma[ch] * istd;
            let shift = self.beta[ch] - self.running_mean[ch] * scale;
            for r in Self::for_channel(n, c, l, ch) {
                out.data_mut()[r].iter_mut().for_each(|v| *v = *v * scale + shift);
            }
        }
        Ok(out)
    }

    fn backward(&mut self, grad: Tensor<T>) -> NetResult<Tensor<T>> {
        let cache = self
            .cache
            .take()
            .ok_or_else(|| NetError::ShapeMismatch("batch norm backward without forward".into()))?;
        if grad.shape() != cache.xhat.shape() {
            return Err(NetError::ShapeMismatch(format!(
                "batch norm upstream gradient {:?}, expected {:?}",
                grad.shape(),
                cache.xhat.shape()
            )));
        }
        let (n, c, l) = dims(&grad)?;
        let mf = T::of((n * l) as f64);
        let mut gx = grad;
        for ch in 0..c {
            let mut sum_g = T::zero();
            let mut sum_gx = T::zero();
            for r in Self::for_channel(n, c, l, ch) {
                for (g, xh) in gx.data()[r.clone()].iter().zip(&cache.xhat.data()[r]) {
                    sum_g += *g;
                    sum_gx += *g * *xh;
                }
            }
            self.grad_gamma[ch] += sum_gx;
            self.grad_beta[ch] += sum_g;
            let k = self.gamma[ch] * cache.inv_std[ch] / mf;
            for r in Self::for_channel(n, c, l, ch) {
                for (g, xh) in gx.data_mut()[r.clone()].iter_mut().zip(&cache.xhat.data()[r]) {
                    *g = k * (mf * *g - sum_g - *xh * sum_gx);
                }
            }
        }
        Ok(gx)
    }

    fn visit_params(&self, f: &mut dyn FnMut(&[T])) {
        f(&self.gamma);
        f(&self.beta);
    }

    fn visit_params_mut(&mut self, f: &mut dyn FnMut(&mut [T], &mut [T])) {
        f(&mut self.gamma, &mut self.grad_gamma);
        f(&mut self.beta, &mut self.grad_beta);
    }

    fn visit_buffers(&self, f: &mut dyn FnMut(&[T])) {
        f(&self.running_mean);
        f(&self.running_var);
    }

    fn visit_buffers_mut(&mut self, f: &mut dyn FnMut(&mut [T])) {
        f(&mut self.running_mean);
        f(&mut self.running_var);
    }
}
