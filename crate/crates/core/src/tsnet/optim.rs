use super::{NetError, NetResult, Network, Scalar};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

/// Adam with bias correction. Moment vectors are laid out in parameter
/// visiting order.
#[derive(Clone, Debug)]
pub struct Adam<T> {
    pub lr: f64,
    step: u64,
    m: Vec<T>,
    v: Vec<T>,
}

impl<T: Scalar> Adam<T> {
    pub fn new(param_count: usize, lr: f64) -> Self {
        Self {
            lr,
            step: 0,
            m: vec![T::zero(); param_count],
            v: vec![T::zero(); param_count],
        }
    }

    pub fn from_state(lr: f64, step: u64, m: Vec<T>, v: Vec<T>) -> NetResult<Self> {
        if m.len() != v.len() {
            return Err(NetError::ShapeMismatch("adam moment vectors differ in length".into()));
        }
        Ok(Self { lr, step, m, v })
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn moments(&self) -> (&[T], &[T]) {
        (&self.m, &self.v)
    }

    /// Apply one update using the gradients currently stored in `net`.
    pub fn step(&mut self, net: &mut Network<T>) -> NetResult<()> {
        if net.param_count() != self.m.len() {
            return Err(NetError::ShapeMismatch(format!(
                "optimizer sized for {} parameters, model has {}",
                self.m.len(),
                net.param_count()
            )));
        }
        self.step += 1;
        let t = self.step as i32;
        let b1 = T::of(ADAM_BETA1);
        let b2 = T::of(ADAM_BETA2);
        let one = T::one();
        let c1 = T::of(1.0 - ADAM_BETA1.powi(t));
        let c2 = T::of(1.0 - ADAM_BETA2.powi(t));
        let lr = T::of(self.lr);
        let eps = T::of(ADAM_EPS);
        let (m, v) = (&mut self.m, &mut self.v);
        let mut off = 0;
        net.visit_params_mut(&mut |p, g| {
            let m = &mut m[off..off + p.len()];
            let v = &mut v[off..off + p.len()];
            for i in 0..p.len() {
                m[i] = b1 * m[i] + (one - b1) * g[i];
                v[i] = b2 * v[i] + (one - b2) * g[i] * g[i];
                let mh = m[i] / c1;
                let vh = v[i] / c2;
                p[i] -= lr * mh / (vh.sqrt() + eps);
            }
            off += p.len();
        });
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tsnet::{cross_entropy, ModelConfig, Tensor};

    #[test]
    fn first_step_moves_each_weight_by_lr() {
        let cfg = ModelConfig::preset("mlp_2x64", 4).unwrap();
        let mut net = Network::<f64>::new(cfg, 1).unwrap();
        let x = Tensor::from_vec(&[2, 9, 4], (0..72).map(|i| (i as f64 * 0.37).sin()).collect()).unwrap();
        let logits = net.forward(x).unwrap();
        let (_, g) = cross_entropy(&logits, &[1, 3]).unwrap();
        net.zero_grad();
        net.backward(g).unwrap();
        let before = net.params();
        let grads = net.grads();
        let mut adam = Adam::new(net.param_count(), 0.01);
        adam.step(&mut net).unwrap();
        // bias-corrected first step is lr * g / (|g| + eps)
        for ((a, b), g) in before.iter().zip(net.params()).zip(grads) {
            let expected = a - 0.01 * g / (g.abs() + 1e-8);
            assert!((b - expected).abs() < 1e-12);
        }
        assert_eq!(adam.step_count(), 1);
    }

    #[test]
    fn size_mismatch() {
        let mut net = Network::<f32>::new(ModelConfig::preset("mlp_2x64", 4).unwrap(), 1).unwrap();
        assert!(Adam::new(3, 0.1).step(&mut net).is_err());
    }
}
