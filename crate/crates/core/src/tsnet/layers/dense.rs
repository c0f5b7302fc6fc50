use rand::Rng;

use super::{he_uniform, Layer};
use crate::par;
use crate::tsnet::kernels::{axpy, dot};
use crate::tsnet::{NetError, NetResult, Scalar, Tensor};

/// Fully connected layer over `N x F`.
#[derive(Clone, Debug)]
pub struct Dense<T> {
    nin: usize,
    nout: usize,
    /// `[nout][nin]`
    weight: Vec<T>,
    bias: Vec<T>,
    grad_w: Vec<T>,
    grad_b: Vec<T>,
    input: Option<Tensor<T>>,
}

impl<T: Scalar> Dense<T> {
    pub fn new(nin: usize, nout: usize, rng: &mut impl Rng) -> Self {
        let weight = he_uniform(nout * nin, nin, rng);
        Self::from_weights(nin, nout, weight, vec![T::zero(); nout]).expect("sizes agree")
    }

    pub fn from_weights(nin: usize, nout: usize, weight: Vec<T>, bias: Vec<T>) -> NetResult<Self> {
        if weight.len() != nin * nout || bias.len() != nout {
            return Err(NetError::ShapeMismatch(format!(
                "dense {nin}->{nout} given {} weights and {} biases",
                weight.len(),
                bias.len()
            )));
        }
        Ok(Self {
            nin,
            nout,
            grad_w: vec![T::zero(); weight.len()],
            grad_b: vec![T::zero(); nout],
            weight,
            bias,
            input: None,
        })
    }

    pub fn inputs(&self) -> usize {
        self.nin
    }

    pub fn outputs(&self) -> usize {
        self.nout
    }

    fn compute(&self, x: &Tensor<T>) -> NetResult<Tensor<T>> {
        let (n, f) = x.dims2()?;
        if f != self.nin {
            return Err(NetError::ShapeMismatch(format!("dense expects {} inputs, got {f}", self.nin)));
        }
        let mut out = Tensor::zeros(&[n, self.nout]);
        let (nin, xd) = (self.nin, x.data());
        par::for_each_chunk_mut(out.data_mut(), self.nout, |s, row| {
            let xs = &xd[s * nin..(s + 1) * nin];
            for (o, v) in row.iter_mut().enumerate() {
                *v = self.bias[o] + dot(&self.weight[o * nin..(o + 1) * nin], xs);
            }
        });
        Ok(out)
    }
}

impl<T: Scalar> Layer<T> for Dense<T> {
    fn name(&self) -> &'static str {
        "dense"
    }

    fn forward(&mut self, x: Tensor<T>) -> NetResult<Tensor<T>> {
        let y = self.compute(&x)?;
        self.input = Some(x);
        Ok(y)
    }

    fn infer(&self, x: &Tensor<T>) -> NetResult<Tensor<T>> {
        self.compute(x)
    }

    fn backward(&mut self, grad: Tensor<T>) -> NetResult<Tensor<T>> {
        let x = self
            .input
            .take()
            .ok_or_else(|| NetError::ShapeMismatch("dense backward without forward".into()))?;
        let (n, _) = x.dims2()?;
        if grad.shape() != [n, self.nout] {
            return Err(NetError::ShapeMismatch(format!(
                "dense upstream gradient {:?}, expected {:?}",
                grad.shape(),
                [n, self.nout]
            )));
        }
        let (nin, nout) = (self.nin, self.nout);
        let (xd, gd) = (x.data(), grad.data());
        for s in 0..n {
            for o in 0..nout {
                self.grad_b[o] += gd[s * nout + o];
            }
        }
        par::for_each_chunk_mut(&mut self.grad_w, nin, |o, gw| {
            for s in 0..n {
                axpy(gd[s * nout + o], &xd[s * nin..(s + 1) * nin], gw);
            }
        });
        let mut gx = Tensor::zeros(&[n, nin]);
        let weight = &self.weight;
        par::for_each_chunk_mut(gx.data_mut(), nin, |s, row| {
            for o in 0..nout {
                axpy(gd[s * nout + o], &weight[o * nin..(o + 1) * nin], row);
            }
        });
        Ok(gx)
    }

    fn visit_params(&self, f: &mut dyn FnMut(&[T])) {
        f(&self.weight);
        f(&self.bias);
    }

    fn visit_params_mut(&mut self, f: &mut dyn FnMut(&mut [T], &mut [T])) {
        f(&mut self.weight, &mut self.grad_w);
        f(&mut self.bias, &mut self.grad_b);
    }
}
