use rand::Rng;

use super::{he_uniform, Layer};
use crate::par;
use crate::tsnet::kernels::{axpy, dot, sum};
use crate::tsnet::{NetError, NetResult, Scalar, Tensor};

/// `same`-padded 1D cross-correlation over `N x C_in x L`.
///
/// Even kernels pad one more zero on the right than on the left.
#[derive(Clone, Debug)]
pub struct Conv1d<T> {
    cin: usize,
    cout: usize,
    k: usize,
    /// `[cout][cin][k]`
    weight: Vec<T>,
    bias: Vec<T>,
    grad_w: Vec<T>,
    grad_b: Vec<T>,
    input: Option<Tensor<T>>,
}

impl<T: Scalar> Conv1d<T> {
    pub fn new(cin: usize, cout: usize, k: usize, rng: &mut impl Rng) -> Self {
        let weight = he_uniform(cout * cin * k, cin * k, rng);
        Self::from_weights(cin, cout, k, weight, vec![T::zero(); cout]).expect("sizes agree")
    }

    pub fn from_weights(cin: usize, cout: usize, k: usize, weight: Vec<T>, bias: Vec<T>) -> NetResult<Self> {
        if k == 0 || weight.len() != cout * cin * k || bias.len() != cout {
            return Err(NetError::ShapeMismatch(format!(
                "conv {cin}->{cout} k={k} given {} weights and {} biases",
                weight.len(),
                bias.len()
            )));
        }
        Ok(Self {
            cin,
            cout,
            k,
            grad_w: vec![T::zero(); weight.len()],
            grad_b: vec![T::zero(); cout],
            weight,
            bias,
            input: None,
        })
    }

    pub fn in_channels(&self) -> usize {
        self.cin
    }

    pub fn out_channels(&self) -> usize {
        self.cout
    }

    pub fn kernel(&self) -> usize {
        self.k
    }

    pub fn weight(&self) -> &[T] {
        &self.weight
    }

    pub fn weight_mut(&mut self) -> &mut [T] {
        &mut self.weight
    }

    pub fn bias_mut(&mut self) -> &mut [T] {
        &mut self.bias
    }

    pub fn pad_left(&self) -> usize {
        (self.k - 1) / 2
    }

    /// Output positions `t` for which `t + offset` lies inside `0..l`.
    fn valid(offset: isize, l: usize) -> (usize, usize) {
        let lo = (-offset).max(0) as usize;
        let hi = (l as isize - offset).clamp(0, l as isize) as usize;
        (lo.min(hi), hi)
    }

    fn check_input(&self, x: &Tensor<T>) -> NetResult<(usize, usize)> {
        let (n, c, l) = x.dims3()?;
        if c != self.cin {
            return Err(NetError::ShapeMismatch(format!(
                "conv expects {} input channels, got {c}",
                self.cin
            )));
        }
        Ok((n, l))
    }

    fn compute(&self, x: &Tensor<T>) -> NetResult<Tensor<T>> {
        let (n, l) = self.check_input(x)?;
        let mut out = Tensor::zeros(&[n, self.cout, l]);
        let (cin, k, pad) = (self.cin, self.k, self.pad_left() as isize);
        let xd = x.data();
        par::for_each_chunk_mut(out.data_mut(), self.cout * l, |s, out_s| {
            let xs = &xd[s * cin * l..(s + 1) * cin * l];
            for (o, row) in out_s.chunks_exact_mut(l).enumerate() {
                row.iter_mut().for_each(|v| *v = self.bias[o]);
                for i in 0..cin {
                    let xi = &xs[i * l..(i + 1) * l];
                    let w = &self.weight[(o * cin + i) * k..(o * cin + i + 1) * k];
                    for (kk, &wk) in w.iter().enumerate() {
                        let off = kk as isize - pad;
                        let (lo, hi) = Self::valid(off, l);
                        if lo < hi {
                            let src = &xi[(lo as isize + off) as usize..(hi as isize + off) as usize];
                            axpy(wk, src, &mut row[lo..hi]);
                        }
                    }
                }
            }
        });
        Ok(out)
    }
}

impl<T: Scalar> Layer<T> for Conv1d<T> {
    fn name(&self) -> &'static str {
        "conv1d"
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
            .ok_or_else(|| NetError::ShapeMismatch("conv backward without forward".into()))?;
        let (n, l) = self.check_input(&x)?;
        if grad.shape() != [n, self.cout, l] {
            return Err(NetError::ShapeMismatch(format!(
                "conv upstream gradient {:?}, expected {:?}",
                grad.shape(),
                [n, self.cout, l]
            )));
        }
        let (cin, cout, k, pad) = (self.cin, self.cout, self.k, self.pad_left() as isize);
        let (xd, gd) = (x.data(), grad.data());

        for o in 0..cout {
            let mut acc = T::zero();
            for s in 0..n {
                acc += sum(&gd[(s * cout + o) * l..(s * cout + o + 1) * l]);
            }
            self.grad_b[o] += acc;
        }

        par::for_each_chunk_mut(&mut self.grad_w, cin * k, |o, gw_o| {
            for s in 0..n {
                let g = &gd[(s * cout + o) * l..(s * cout + o + 1) * l];
                for i in 0..cin {
                    let xi = &xd[(s * cin + i) * l..(s * cin + i + 1) * l];
                    for kk in 0..k {
                        let off = kk as isize - pad;
                        let (lo, hi) = Self::valid(off, l);
                        if lo < hi {
                            let src = &xi[(lo as isize + off) as usize..(hi as isize + off) as usize];
                            gw_o[i * k + kk] += dot(&g[lo..hi], src);
                        }
                    }
                }
            }
        });

        let mut gx = Tensor::zeros(&[n, cin, l]);
        let weight = &self.weight;
        par::for_each_chunk_mut(gx.data_mut(), cin * l, |s, gx_s| {
            for o in 0..cout {
                let g = &gd[(s * cout + o) * l..(s * cout + o + 1) * l];
                for i in 0..cin {
                    let dst = &mut gx_s[i * l..(i + 1) * l];
                    let w = &weight[(o * cin + i) * k..(o * cin + i + 1) * k];
                    for (kk, &wk) in w.iter().enumerate() {
                        let off = kk as isize - pad;
                        let (lo, hi) = Self::valid(off, l);
                        if lo < hi {
                            axpy(wk, &g[lo..hi], &mut dst[(lo as isize + off) as usize..(hi as isize + off) as usize]);
                        }
                    }
                }
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
