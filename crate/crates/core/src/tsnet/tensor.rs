use super::{NetError, NetResult, Scalar};

/// Dense row-major tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<T> {
    shape: Vec<usize>,
    data: Vec<T>,
}

impl<T: Scalar> Tensor<T> {
    pub fn zeros(shape: &[usize]) -> Self {
        Self {
            shape: shape.to_vec(),
            data: vec![T::zero(); shape.iter().product()],
        }
    }

    pub fn from_vec(shape: &[usize], data: Vec<T>) -> NetResult<Self> {
        let n: usize = shape.iter().product();
        if n != data.len() {
            return Err(NetError::ShapeMismatch(format!(
                "shape {shape:?} needs {n} values, got {}",
                data.len()
            )));
        }
        Ok(Self {
            shape: shape.to_vec(),
            data,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Leading (batch) dimension.
    pub fn batch(&self) -> usize {
        self.shape.first().copied().unwrap_or(0)
    }

    /// `(N, C, L)` of a rank-3 tensor.
    pub fn dims3(&self) -> NetResult<(usize, usize, usize)> {
        match self.shape[..] {
            [n, c, l] => Ok((n, c, l)),
            _ => Err(NetError::ShapeMismatch(format!("expected N x C x L, got {:?}", self.shape))),
        }
    }

    /// `(N, F)` of a rank-2 tensor.
    pub fn dims2(&self) -> NetResult<(usize, usize)> {
        match self.shape[..] {
            [n, f] => Ok((n, f)),
            _ => Err(NetError::ShapeMismatch(format!("expected N x F, got {:?}", self.shape))),
        }
    }

    pub fn reshape(mut self, shape: &[usize]) -> NetResult<Self> {
        let n: usize = shape.iter().product();
        if n != self.data.len() {
            return Err(NetError::ShapeMismatch(format!(
                "cannot reshape {:?} into {shape:?}",
                self.shape
            )));
        }
        self.shape = shape.to_vec();
        Ok(self)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn add_assign(&mut self, other: &Tensor<T>) -> NetResult<()> {
        if self.shape != other.shape {
            return Err(NetError::ShapeMismatch(format!(
                "cannot add {:?} to {:?}",
                other.shape, self.shape
            )));
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += *b;
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Copy samples `idx` (along the batch axis) into a new tensor.
    pub fn gather(&self, idx: &[usize]) -> Self {
        let per = self.data.len() / self.batch().max(1);
        let mut data = Vec::with_capacity(idx.len() * per);
        for &i in idx {
            data.extend_from_slice(&self.data[i * per..(i + 1) * per]);
        }
        let mut shape = self.shape.clone();
        if let Some(b) = shape.first_mut() {
            *b = idx.len();
        }
        Self { shape, data }
    }

    /// Slice `[start, end)` of the batch axis.
    pub fn batch_range(&self, start: usize, end: usize) -> Self {
        let per = self.data.len() / self.batch().max(1);
        let mut shape = self.shape.clone();
        shape[0] = end - start;
        Self {
            shape,
            data: self.data[start * per..end * per].to_vec(),
        }
    }

    /// Take channels `[start, start + count)` of an `N x C x ...` tensor.
    pub fn channel_slice(&self, start: usize, count: usize) -> NetResult<Self> {
        if self.shape.len() < 2 || start + count > self.shape[1] {
            return Err(NetError::ShapeMismatch(format!(
                "channels {start}..{} out of range for {:?}",
                start + count,
                self.shape
            )));
        }
        let n = self.shape[0];
        let c = self.shape[1];
        let inner: usize = self.shape[2..].iter().product();
        let mut data = Vec::with_capacity(n * count * inner);
        for s in 0..n {
            let base = (s * c + start) * inner;
            data.extend_from_slice(&self.data[base..base + count * inner]);
        }
        let mut shape = self.shape.clone();
        shape[1] = count;
        Ok(Self { shape, data })
    }

    /// Concatenate along axis 1. All parts must agree on every other axis.
    pub fn concat_channels(parts: &[Tensor<T>]) -> NetResult<Self> {
        let first = parts
            .first()
            .ok_or_else(|| NetError::ShapeMismatch("nothing to concatenate".into()))?;
        let n = first.shape[0];
        let tail = &first.shape[2..];
        let inner: usize = tail.iter().product();
        let mut total_c = 0;
        for p in parts {
            if p.shape.len() != first.shape.len() || p.shape[0] != n || &p.shape[2..] != tail {
                return Err(NetError::ShapeMismatch(format!(
                    "cannot concatenate {:?} with {:?}",
                    p.shape, first.shape
                )));
            }
            total_c += p.shape[1];
        }
        let mut data = Vec::with_capacity(n * total_c * inner);
        for s in 0..n {
            for p in parts {
                let w = p.shape[1] * inner;
                data.extend_from_slice(&p.data[s * w..(s + 1) * w]);
            }
        }
        let mut shape = first.shape.clone();
        shape[1] = total_c;
        Ok(Self { shape, data })
    }

    pub fn cast<U: Scalar>(&self) -> Tensor<U> {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&v| U::of(v.as_f64())).collect(),
        }
    }
}
