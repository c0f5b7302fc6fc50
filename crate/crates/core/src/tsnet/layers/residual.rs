use rand::Rng;

use super::{BatchNorm1d, Conv1d, Layer, Relu};
use crate::tsnet::{NetError, NetResult, Scalar, Tensor};

/// `relu(F(x) + shortcut(x))` where `F` is a stack of `same` convolutions
/// (each followed by optional batch norm, all but the last by ReLU) and the
/// shortcut is the identity, or a 1x1 convolution when channel counts differ.
pub struct ResidualBlock<T> {
    convs: Vec<Conv1d<T>>,
    norms: Vec<BatchNorm1d<T>>,
    relus: Vec<Relu>,
    projection: Option<(Conv1d<T>, Option<BatchNorm1d<T>>)>,
    out: Relu,
}

impl<T: Scalar> ResidualBlock<T> {
    pub fn new(cin: usize, width: usize, kernels: &[usize], batch_norm: bool, rng: &mut impl Rng) -> NetResult<Self> {
        if kernels.is_empty() || width == 0 {
            return Err(NetError::InvalidConfig("residual block needs a width and at least one kernel".into()));
        }
        let mut convs = Vec::with_capacity(kernels.len());
        let mut c = cin;
        for &k in kernels {
            if k == 0 {
                return Err(NetError::InvalidConfig("kernel size must be positive".into()));
            }
            convs.push(Conv1d::new(c, width, k, rng));
            c = width;
        }
        let norms = if batch_norm {
            kernels.iter().map(|_| BatchNorm1d::new(width)).collect()
        } else {
            Vec::new()
        };
        let projection = (cin != width).then(|| (Conv1d::new(cin, width, 1, rng), batch_norm.then(|| BatchNorm1d::new(width))));
        Ok(Self {
            relus: (1..kernels.len()).map(|_| Relu::new()).collect(),
            convs,
            norms,
            projection,
            out: Relu::new(),
        })
    }

    pub fn has_projection(&self) -> bool {
        self.projection.is_some()
    }

    /// Weighted layers on the longest path: the convolutions plus the projection.
    pub fn depth(&self) -> usize {
        self.convs.len() + usize::from(self.projection.is_some())
    }

    /// Zero the last convolution of the residual branch so the block reduces
    /// to `relu(shortcut(x))`.
    pub fn zero_residual_branch(&mut self) {
        if let Some(last) = self.convs.last_mut() {
            last.weight_mut().fill(T::zero());
            last.bias_mut().fill(T::zero());
        }
    }

    fn shortcut_infer(&self, x: &Tensor<T>) -> NetResult<Tensor<T>> {
        match &self.projection {
            None => Ok(x.clone()),
            Some((conv, bn)) => {
                let s = conv.infer(x)?;
                match bn {
                    Some(bn) => bn.infer(&s),
                    None => Ok(s),
                }
            }
        }
    }
}

impl<T: Scalar> Layer<T> for ResidualBlock<T> {
    fn name(&self) -> &'static str {
        "residual_block"
    }

    fn forward(&mut self, x: Tensor<T>) -> NetResult<Tensor<T>> {
        let last = self.convs.len() - 1;
        let mut h = x.clone();
        for j in 0..self.convs.len() {
            h = self.convs[j].forward(h)?;
            if let Some(bn) = self.norms.get_mut(j) {
                h = bn.forward(h)?;
            }
            if j < last {
                h = self.relus[j].forward(h)?;
            }
        }
        let s = match &mut self.projection {
            None => x,
            Some((conv, bn)) => {
                let s = conv.forward(x)?;
                match bn {
                    Some(bn) => bn.forward(s)?,
                    None => s,
                }
            }
        };
        h.add_assign(&s)?;
        self.out.forward(h)
    }

    fn infer(&self, x: &Tensor<T>) -> NetResult<Tensor<T>> {
        let last = self.convs.len() - 1;
        let mut h = self.convs[0].infer(x)?;
        for j in 0..self.convs.len() {
            if j > 0 {
                h = self.convs[j].infer(&h)?;
            }
            if let Some(bn) = self.norms.get(j) {
                h = bn.infer(&h)?;
            }
            if j < last {
                h = Layer::<T>::infer(&self.relus[j], &h)?;
            }
        }
        h.add_assign(&self.shortcut_infer(x)?)?;
        Layer::<T>::infer(&self.out, &h)
    }

    fn backward(&mut self, grad: Tensor<T>) -> NetResult<Tensor<T>> {
        let g = self.out.backward(grad)?;
        let last = self.convs.len() - 1;
        let mut gm = g.clone();
        for j in (0..self.convs.len()).rev() {
            if j < last {
                gm = self.relus[j].backward(gm)?;
            }
            if let Some(bn) = self.norms.get_mut(j) {
                gm = bn.backward(gm)?;
            }
            gm = self.convs[j].backward(gm)?;
        }
        let gs = match &mut self.projection {
            None => g,
            Some((conv, bn)) => {
                let g = match bn {
                    Some(bn) => bn.backward(g)?,
                    None => g,
                };
                conv.backward(g)?
            }
        };
        gm.add_assign(&gs)?;
        Ok(gm)
    }

    fn visit_params(&self, f: &mut dyn FnMut(&[T])) {
        for j in 0..self.convs.len() {
            self.convs[j].visit_params(f);
            if let Some(bn) = self.norms.get(j) {
                bn.visit_params(f);
            }
        }
        if let Some((conv, bn)) = &self.projection {
            conv.visit_params(f);
            if let Some(bn) = bn {
                bn.visit_params(f);
            }
        }
    }

    fn visit_params_mut(&mut self, f: &mut dyn FnMut(&mut [T], &mut [T])) {
        for j in 0..self.convs.len() {
            self.convs[j].visit_params_mut(f);
            if let Some(bn) = self.norms.get_mut(j) {
                bn.visit_params_mut(f);
            }
        }
        if let Some((conv, bn)) = &mut self.projection {
            conv.visit_params_mut(f);
            if let Some(bn) = bn {
                bn.visit_params_mut(f);
            }
        }
    }

    fn visit_buffers(&self, f: &mut dyn FnMut(&[T])) {
        self.norms.iter().for_each(|bn| bn.visit_buffers(f));
        if let Some((_, Some(bn))) = &self.projection {
            bn.visit_buffers(f);
        }
    }

    fn visit_buffers_mut(&mut self, f: &mut dyn FnMut(&mut [T])) {
        self.norms.iter_mut().for_each(|bn| bn.visit_buffers_mut(f));
        if let Some((_, Some(bn))) = &mut self.projection {
            bn.visit_buffers_mut(f);
        }
    }

    fn activation_pattern(&self, out: &mut Vec<bool>) {
        for r in &self.relus {
            Layer::<T>::activation_pattern(r, out);
        }
        Layer::<T>::activation_pattern(&self.out, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn input(n: usize, c: usize, l: usize, rng: &mut ChaCha8Rng) -> Tensor<f64> {
        Tensor::from_vec(&[n, c, l], (0..n * c * l).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
    }

    #[test]
    fn zero_branch_reduces_to_shortcut() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for bn in [false, true] {
            let mut identity = ResidualBlock::<f64>::new(4, 4, &[8, 5, 3], bn, &mut rng).unwrap();
            identity.zero_residual_branch();
            let x = input(2, 4, 9, &mut rng);
            let y = identity.forward(x.clone()).unwrap();
            assert!(!identity.has_projection());
            assert_eq!(y.shape(), x.shape());
            for (a, b) in y.data().iter().zip(x.data()) {
                assert!((a - b.max(0.0)).abs() < 1e-12);
            }
            assert_eq!(identity.infer(&x).unwrap(), y);
        }
    }

    #[test]
    fn projection_when_channels_differ() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut block = ResidualBlock::<f64>::new(3, 5, &[3, 3], false, &mut rng).unwrap();
        assert!(block.has_projection());
        assert_eq!(block.depth(), 3);
        block.zero_residual_branch();
        let x = input(1, 3, 6, &mut rng);
        let y = block.infer(&x).unwrap();
        let (conv, _) = block.projection.as_ref().unwrap();
        let s = conv.infer(&x).unwrap();
        for (a, b) in y.data().iter().zip(s.data()) {
            assert!((a - b.max(0.0)).abs() < 1e-12);
        }
        // 3->5 k3 + 5->5 k3 + 1x1 3->5
        assert_eq!(block.param_count(), (5 * 3 * 3 + 5) + (5 * 5 * 3 + 5) + (5 * 3 + 5));
    }
}
