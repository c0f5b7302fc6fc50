use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{NetError, NetResult, Scalar, Tensor};

/// Add `N(0, sigma^2)` noise to the first `true_lengths[i]` time steps of each
/// `C x L` sample. Padding stays at zero.
pub fn add_input_noise<T: Scalar>(
    batch: &mut Tensor<T>,
    true_lengths: &[usize],
    sigma: f64,
    rng: &mut impl Rng,
) -> NetResult<()> {
    let (n, c, l) = batch.dims3()?;
    if true_lengths.len() != n {
        return Err(NetError::ShapeMismatch(format!("{} lengths for {n} samples", true_lengths.len())));
    }
    if sigma <= 0.0 {
        return Ok(());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| NetError::InvalidConfig(format!("noise sigma: {e}")))?;
    let data = batch.data_mut();
    for (s, &len) in true_lengths.iter().enumerate() {
        let len = len.min(l);
        for ch in 0..c {
            let row = &mut data[(s * c + ch) * l..(s * c + ch) * l + len];
            for v in row {
                *v += T::of(normal.sample(rng));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn padding_untouched_and_sigma_matches() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut t = Tensor::<f64>::zeros(&[2, 3, 1000]);
        add_input_noise(&mut t, &[1000, 400], 0.01, &mut rng).unwrap();
        let d = t.data();
        assert!(d[3000 + 400..3000 + 1000].iter().all(|&v| v == 0.0));
        let first = &d[..3000];
        let var = first.iter().map(|v| v * v).sum::<f64>() / first.len() as f64;
        assert!((var.sqrt() - 0.01).abs() < 0.001);
    }

    #[test]
    fn zero_sigma_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut t = Tensor::<f32>::zeros(&[1, 1, 4]);
        add_input_noise(&mut t, &[4], 0.0, &mut rng).unwrap();
        assert!(t.data().iter().all(|&v| v == 0.0));
        assert!(add_input_noise(&mut t, &[4, 4], 0.1, &mut rng).is_err());
    }
}
