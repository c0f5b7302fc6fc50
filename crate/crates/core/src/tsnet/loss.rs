use super::{NetError, NetResult, Scalar, Tensor};

/// Row-wise softmax of an `N x K` tensor, shifted by the row maximum.
pub fn softmax_rows<T: Scalar>(logits: &Tensor<T>) -> NetResult<Tensor<T>> {
    let (_, k) = logits.dims2()?;
    let mut out = logits.clone();
    for row in out.data_mut().chunks_exact_mut(k) {
        let m = row.iter().copied().fold(T::neg_infinity(), T::max);
        let mut z = T::zero();
        for v in row.iter_mut() {
            *v = (*v - m).exp();
            z += *v;
        }
        for v in row.iter_mut() {
            *v = *v / z;
        }
    }
    Ok(out)
}

/// Mean softmax cross-entropy and its gradient with respect to the logits.
pub fn cross_entropy<T: Scalar>(logits: &Tensor<T>, labels: &[usize]) -> NetResult<(T, Tensor<T>)> {
    let (n, k) = logits.dims2()?;
    if labels.len() != n {
        return Err(NetError::ShapeMismatch(format!("{} labels for {n} rows", labels.len())));
    }
    if let Some(&bad) = labels.iter().find(|&&y| y >= k) {
        return Err(NetError::ShapeMismatch(format!("label {bad} out of range for {k} classes")));
    }
    let mut grad = softmax_rows(logits)?;
    let inv_n = T::one() / T::of(n.max(1) as f64);
    let mut loss = T::zero();
    for ((row, logit_row), &y) in grad.data_mut().chunks_exact_mut(k).zip(logits.data().chunks_exact(k)).zip(labels) {
        // log-sum-exp form keeps the loss finite when p_y underflows
        let m = logit_row.iter().copied().fold(T::neg_infinity(), T::max);
        let lse = m + logit_row.iter().map(|&v| (v - m).exp()).sum::<T>().ln();
        loss += lse - logit_row[y];
        row[y] -= T::one();
        row.iter_mut().for_each(|v| *v = *v * inv_n);
    }
    Ok((loss * inv_n, grad))
}
