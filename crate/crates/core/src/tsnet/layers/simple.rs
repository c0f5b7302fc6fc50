use super::Layer;
use crate::tsnet::{NetError, NetResult, Scalar, Tensor};

#[derive(Clone, Debug, Default)]
pub struct Relu {
    mask: Option<Vec<bool>>,
}

impl Relu {
    pub fn new() -> Self {
        Self::default()
    }
}

impl<T: Scalar> Layer<T> for Relu {
    fn name(&self) -> &'static str {
        "relu"
    }

    fn forward(&mut self, mut x: Tensor<T>) -> NetResult<Tensor<T>> {
        let mut mask = Vec::with_capacity(x.len());
        for v in x.data_mut() {
            let on = *v > T::zero();
            mask.push(on);
            if !on {
                *v = T::zero();
            }
        }
        self.mask = Some(mask);
        Ok(x)
    }

    fn infer(&self, x: &Tensor<T>) -> NetResult<Tensor<T>> {
        Ok(x.map(|v| if v > T::zero() { v } else { T::zero() }))
    }

    fn backward(&mut self, mut grad: Tensor<T>) -> NetResult<Tensor<T>> {
        let mask = self
            .mask
            .take()
            .ok_or_else(|| NetError::ShapeMismatch("relu backward without forward".into()))?;
        if mask.len() != grad.len() {
            return Err(NetError::ShapeMismatch("relu gradient size differs from its input".into()));
        }
        for (g, on) in grad.data_mut().iter_mut().zip(&mask) {
            if !on {
                *g = T::zero();
            }
        }
        Ok(grad)
    }

    fn activation_pattern(&self, out: &mut Vec<bool>) {
        if let Some(m) = &self.mask {
            out.extend_from_slice(m);
        }
    }
}

/// `N x C x L` to `N x (C * L)`, channel-major.
#[derive(Clone, Debug, Default)]
pub struct Flatten {
    shape: Option<Vec<usize>>,
}

impl Flatten {
    pub fn new() -> Self {
        Self::default()
    }

    fn flat<T: Scalar>(x: Tensor<T>) -> NetResult<Tensor<T>> {
        let n = x.batch();
        let f = if n == 0 { 0 } else { x.len() / n };
        x.reshape(&[n, f])
    }
}

impl<T: Scalar> Layer<T> for Flatten {
    fn name(&self) -> &'static str {
        "flatten"
    }

    fn forward(&mut self, x: Tensor<T>) -> NetResult<Tensor<T>> {
        self.shape = Some(x.shape().to_vec());
        Self::flat(x)
    }

    fn infer(&self, x: &Tensor<T>) -> NetResult<Tensor<T>> {
        Self::flat(x.clone())
    }

    fn backward(&mut self, grad: Tensor<T>) -> NetResult<Tensor<T>> {
        let shape = self
            .shape
            .take()
            .ok_or_else(|| NetError::ShapeMismatch("flatten backward without forward".into()))?;
        grad.reshape(&shape)
    }
}

/// Mean over the time axis: `N x C x L` to `N x C`.
#[derive(Clone, Debug, Default)]
pub struct GlobalAvgPool {
    len: Option<usize>,
}

impl GlobalAvgPool {
    pub fn new() -> Self {
        Self::default()
    }

    fn pool<T: Scalar>(x: &Tensor<T>) -> NetResult<Tensor<T>> {
        let (n, c, l) = x.dims3()?;
        if l == 0 {
            return Err(NetError::ShapeMismatch("cannot pool an empty time axis".into()));
        }
        let inv = T::one() / T::of(l as f64);
        let data = x
            .data()
            .chunks_exact(l)
            .map(|row| crate::tsnet::kernels::sum(row) * inv)
            .collect();
        Tensor::from_vec(&[n, c], data)
    }
}

impl<T: Scalar> Layer<T> for GlobalAvgPool {
    fn name(&self) -> &'static str {
        "global_avg_pool"
    }

    fn forward(&mut self, x: Tensor<T>) -> NetResult<Tensor<T>> {
        let y = Self::pool(&x)?;
        self.len = Some(x.dims3()?.2);
        Ok(y)
    }

    fn infer(&self, x: &Tensor<T>) -> NetResult<Tensor<T>> {
        Self::pool(x)
    }

    fn backward(&mut self, grad: Tensor<T>) -> NetResult<Tensor<T>> {
        let l = self
            .len
            .take()
            .ok_or_else(|| NetError::ShapeMismatch("pool backward without forward".into()))?;
        let (n, c) = grad.dims2()?;
        let inv = T::one() / T::of(l as f64);
        let mut data = Vec::with_capacity(n * c * l);
        for &g in grad.data() {
            data.extend(std::iter::repeat_n(g * inv, l));
        }
        Tensor::from_vec(&[n, c, l], data)
    }
}
