use super::{Layer, Sequential};
use crate::tsnet::{NetError, NetResult, Scalar, Tensor};

/// Route groups of input channels through separate branches and concatenate
/// the branch outputs along the channel axis.
pub struct ChannelSplit<T> {
    /// `(first channel, channel count)` per branch.
    groups: Vec<(usize, usize)>,
    branches: Vec<Sequential<T>>,
    /// Input channel count and branch output widths of the last forward.
    cache: Option<(usize, Vec<usize>)>,
}

impl<T: Scalar> ChannelSplit<T> {
    pub fn new(groups: Vec<(usize, usize)>, branches: Vec<Sequential<T>>) -> NetResult<Self> {
        if groups.len() != branches.len() || groups.is_empty() {
            return Err(NetError::InvalidConfig(format!(
                "{} channel groups for {} branches",
                groups.len(),
                branches.len()
            )));
        }
        Ok(Self {
            groups,
            branches,
            cache: None,
        })
    }

    pub fn branches(&self) -> &[Sequential<T>] {
        &self.branches
    }
}

impl<T: Scalar> Layer<T> for ChannelSplit<T> {
    fn name(&self) -> &'static str {
        "channel_split"
    }

    fn forward(&mut self, x: Tensor<T>) -> NetResult<Tensor<T>> {
        let mut outs = Vec::with_capacity(self.branches.len());
        for (&(start, count), b) in self.groups.iter().zip(&mut self.branches) {
            outs.push(b.forward(x.channel_slice(start, count)?)?);
        }
        self.cache = Some((x.shape()[1], outs.iter().map(|o| o.shape()[1]).collect()));
        Tensor::concat_channels(&outs)
    }

    fn infer(&self, x: &Tensor<T>) -> NetResult<Tensor<T>> {
        let outs = self
            .groups
            .iter()
            .zip(&self.branches)
            .map(|(&(start, count), b)| b.infer(&x.channel_slice(start, count)?))
            .collect::<NetResult<Vec<_>>>()?;
        Tensor::concat_channels(&outs)
    }

    fn backward(&mut self, grad: Tensor<T>) -> NetResult<Tensor<T>> {
        let (total, widths) = self
            .cache
            .take()
            .ok_or_else(|| NetError::ShapeMismatch("split backward without forward".into()))?;
        let mut input_grads = Vec::with_capacity(self.branches.len());
        let mut offset = 0;
        for (b, w) in self.branches.iter_mut().zip(widths) {
            input_grads.push(b.backward(grad.channel_slice(offset, w)?)?);
            offset += w;
        }
        let first = &input_grads[0];
        let mut shape = first.shape().to_vec();
        shape[1] = total;
        let mut gx = Tensor::zeros(&shape);
        let n = shape[0];
        let inner: usize = shape[2..].iter().product();
        for (&(start, count), g) in self.groups.iter().zip(&input_grads) {
            for s in 0..n {
                let src = &g.data()[s * count * inner..(s + 1) * count * inner];
                let dst = &mut gx.data_mut()[(s * total + start) * inner..(s * total + start + count) * inner];
                for (d, v) in dst.iter_mut().zip(src) {
                    *d += *v;
                }
            }
        }
        Ok(gx)
    }

    fn visit_params(&self, f: &mut dyn FnMut(&[T])) {
        self.branches.iter().for_each(|b| b.visit_params(f));
    }

    fn visit_params_mut(&mut self, f: &mut dyn FnMut(&mut [T], &mut [T])) {
        self.branches.iter_mut().for_each(|b| b.visit_params_mut(f));
    }

    fn visit_buffers(&self, f: &mut dyn FnMut(&[T])) {
        self.branches.iter().for_each(|b| b.visit_buffers(f));
    }

    fn visit_buffers_mut(&mut self, f: &mut dyn FnMut(&mut [T])) {
        self.branches.iter_mut().for_each(|b| b.visit_buffers_mut(f));
    }

    fn activation_pattern(&self, out: &mut Vec<bool>) {
        self.branches.iter().for_each(|b| b.activation_pattern(out));
    }
}
