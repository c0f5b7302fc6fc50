use super::Layer;
use crate::tsnet::{NetResult, Scalar, Tensor};

/// Layers applied in order.
pub struct Sequential<T> {
    layers: Vec<Box<dyn Layer<T>>>,
}

impl<T: Scalar> Default for Sequential<T> {
    fn default() -> Self {
        Self { layers: Vec::new() }
    }
}

impl<T: Scalar> Sequential<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, layer: impl Layer<T> + 'static) {
        self.layers.push(Box::new(layer));
    }

    pub fn push_boxed(&mut self, layer: Box<dyn Layer<T>>) {
        self.layers.push(layer);
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn layers(&self) -> &[Box<dyn Layer<T>>] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Box<dyn Layer<T>>] {
        &mut self.layers
    }
}

impl<T: Scalar> Layer<T> for Sequential<T> {
    fn name(&self) -> &'static str {
        "sequential"
    }

    fn forward(&mut self, mut x: Tensor<T>) -> NetResult<Tensor<T>> {
        for l in &mut self.layers {
            x = l.forward(x)?;
        }
        Ok(x)
    }

    fn infer(&self, x: &Tensor<T>) -> NetResult<Tensor<T>> {
        let mut it = self.layers.iter();
        let Some(first) = it.next() else {
            return Ok(x.clone());
        };
        let mut y = first.infer(x)?;
        for l in it {
            y = l.infer(&y)?;
        }
        Ok(y)
    }

    fn backward(&mut self, mut grad: Tensor<T>) -> NetResult<Tensor<T>> {
        for l in self.layers.iter_mut().rev() {
            grad = l.backward(grad)?;
        }
        Ok(grad)
    }

    fn visit_params(&self, f: &mut dyn FnMut(&[T])) {
        self.layers.iter().for_each(|l| l.visit_params(f));
    }

    fn visit_params_mut(&mut self, f: &mut dyn FnMut(&mut [T], &mut [T])) {
        self.layers.iter_mut().for_each(|l| l.visit_params_mut(f));
    }

    fn visit_buffers(&self, f: &mut dyn FnMut(&[T])) {
        self.layers.iter().for_each(|l| l.visit_buffers(f));
    }

    fn visit_buffers_mut(&mut self, f: &mut dyn FnMut(&mut [T])) {
        self.layers.iter_mut().for_each(|l| l.visit_buffers_mut(f));
    }

    fn activation_pattern(&self, out: &mut Vec<bool>) {
        self.layers.iter().for_each(|l| l.activation_pattern(out));
    }
}
