//! Shared test oracles.

#![allow(dead_code)]

use aisq::tsnet::layers::Layer;
use aisq::tsnet::{cross_entropy, Network, Tensor};

/// Central-difference step.
pub const FD_STEP: f64 = 1e-4;
/// Gradients smaller than this are compared as if they had this magnitude.
pub const FD_FLOOR: f64 = 1e-5;

#[derive(Clone, Copy, Debug, Default)]
pub struct FdReport {
    pub checked: usize,
    /// Perturbations that flipped some ReLU gate and so straddle a kink.
    pub skipped: usize,
    pub max_rel: f64,
}

impl FdReport {
    fn add(&mut self, analytic: f64, numeric: f64) {
        let denom = analytic.abs().max(numeric.abs()).max(FD_FLOOR);
        self.max_rel = self.max_rel.max((analytic - numeric).abs() / denom);
        self.checked += 1;
    }

    pub fn merge(&mut self, o: &FdReport) {
        self.checked += o.checked;
        self.skipped += o.skipped;
        self.max_rel = self.max_rel.max(o.max_rel);
    }

    pub fn skipped_fraction(&self) -> f64 {
        self.skipped as f64 / (self.checked + self.skipped).max(1) as f64
    }
}

fn pattern(layer: &dyn Layer<f64>) -> Vec<bool> {
    let mut p = Vec::new();
    layer.activation_pattern(&mut p);
    p
}

fn nudge(layer: &mut dyn Layer<f64>, index: usize, delta: f64) {
    let mut off = 0;
    layer.visit_params_mut(&mut |p, _| {
        if index >= off && index < off + p.len() {
            p[index - off] += delta;
        }
        off += p.len();
    });
}

/// Scalar objective `sum(forward(x) * proj)` and its training-mode gate pattern.
fn objective(layer: &mut dyn Layer<f64>, x: &Tensor<f64>, proj: &[f64]) -> (f64, Vec<bool>) {
    let y = layer.forward(x.clone()).expect("forward");
    let v = y.data().iter().zip(proj).map(|(a, b)| a * b).sum();
    (v, pattern(layer))
}

/// Compare the analytic parameter and input gradients of `layer` against
/// central differences of a random linear projection of its output.
pub fn check_layer(layer: &mut dyn Layer<f64>, x: &Tensor<f64>, proj: &[f64]) -> FdReport {
    layer.zero_grad();
    let y = layer.forward(x.clone()).expect("forward");
    assert_eq!(y.len(), proj.len(), "projection must match the output size");
    let base = pattern(layer);
    let gx = layer
        .backward(Tensor::from_vec(y.shape(), proj.to_vec()).expect("shape"))
        .expect("backward");
    let mut grads = Vec::new();
    layer.visit_params_mut(&mut |_, g| grads.extend_from_slice(g));

    let mut rep = FdReport::default();
    for (j, &analytic) in grads.iter().enumerate() {
        nudge(layer, j, FD_STEP);
        let (plus, pp) = objective(layer, x, proj);
        nudge(layer, j, -2.0 * FD_STEP);
        let (minus, pm) = objective(layer, x, proj);
        nudge(layer, j, FD_STEP);
        if pp != base || pm != base {
            rep.skipped += 1;
            continue;
        }
        rep.add(analytic, (plus - minus) / (2.0 * FD_STEP));
    }
    for j in 0..x.len() {
        let mut xp = x.clone();
        xp.data_mut()[j] += FD_STEP;
        let (plus, pp) = objective(layer, &xp, proj);
        xp.data_mut()[j] -= 2.0 * FD_STEP;
        let (minus, pm) = objective(layer, &xp, proj);
        if pp != base || pm != base {
            rep.skipped += 1;
            continue;
        }
        rep.add(gx.data()[j], (plus - minus) / (2.0 * FD_STEP));
    }
    rep
}

/// Same comparison for a whole network under softmax cross-entropy.
pub fn check_network(net: &mut Network<f64>, x: &Tensor<f64>, labels: &[usize]) -> FdReport {
    let loss = |net: &mut Network<f64>| {
        let logits = net.forward(x.clone()).expect("forward");
        (cross_entropy(&logits, labels).expect("loss").0, net.activation_pattern())
    };
    net.zero_grad();
    let logits = net.forward(x.clone()).expect("forward");
    let base = net.activation_pattern();
    let (_, g) = cross_entropy(&logits, labels).expect("loss");
    net.backward(g).expect("backward");
    let grads = net.grads();
    let mut params = net.params();

    let mut rep = FdReport::default();
    for j in 0..params.len() {
        let p0 = params[j];
        params[j] = p0 + FD_STEP;
        net.set_params(&params).unwrap();
        let (plus, pp) = loss(net);
        params[j] = p0 - FD_STEP;
        net.set_params(&params).unwrap();
        let (minus, pm) = loss(net);
        params[j] = p0;
        if pp != base || pm != base {
            rep.skipped += 1;
            continue;
        }
        rep.add(grads[j], (plus - minus) / (2.0 * FD_STEP));
    }
    net.set_params(&params).unwrap();
    rep
}
