use super::{Chunk, PipelineError, Sample};
use crate::geo::{GeoPoint, RiverMask};

/// Mean consecutive displacement in degrees: sum of step lengths over the
/// sample count `n` (not `n - 1`).
pub fn stationary_measure(samples: &[Sample]) -> Result<f64, PipelineError> {
    let n = samples.len();
    if n < 2 {
        return Err(PipelineError::TooShort(n));
    }
    let path: f64 = samples
        .windows(2)
        .map(|w| (w[1].lat - w[0].lat).hypot(w[1].lon - w[0].lon))
        .sum();
    Ok(path / n as f64)
}

/// Keep chunks whose stationary measure is at least `threshold`. Returns the
/// survivors and the number removed (chunks too short to measure count as
/// removed).
pub fn filter_stationary(chunks: Vec<Chunk>, threshold: f64) -> (Vec<Chunk>, usize) {
    let before = chunks.len();
    let kept: Vec<Chunk> = chunks
        .into_iter()
        .filter(|c| stationary_measure(&c.samples).is_ok_and(|a| a >= threshold))
        .collect();
    let removed = before - kept.len();
    (kept, removed)
}

/// `true` keeps the chunk: it is dropped only when strictly more than
/// `max_fraction` of its samples lie near a river.
pub fn filter_river(chunk: &Chunk, mask: &RiverMask, max_fraction: f64) -> bool {
    let n = chunk.samples.len();
    if n == 0 {
        return true;
    }
    let on_river = chunk
        .samples
        .iter()
        .filter(|s| mask.near_river(GeoPoint { lat: s.lat, lon: s.lon }))
        .count();
    (on_river as f64) <= max_fraction * n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::ClassLabel;

    fn samples(pts: &[(f64, f64)]) -> Vec<Sample> {
        pts.iter()
            .enumerate()
            .map(|(i, &(lat, lon))| Sample {
                timestamp: i as i64 * 10,
                lat,
                lon,
                sog: 0,
                cog: 0.0,
            })
            .collect()
    }

    fn chunk_of(pts: &[(f64, f64)]) -> Chunk {
        Chunk {
            mmsi: 1,
            segment: 0,
            index: 0,
            label: ClassLabel::Tug,
            seq_len: pts.len(),
            samples: samples(pts),
        }
    }

    #[test]
    fn measure_examples() {
        assert_eq!(stationary_measure(&samples(&[(1.0, 1.0); 5])).unwrap(), 0.0);
        let a = stationary_measure(&samples(&[(0.0, 0.0), (0.0, 0.01)])).unwrap();
        assert!((a - 0.005).abs() < 1e-15);
        let a = stationary_measure(&samples(&[(0.0, 0.0), (0.01, 0.0), (0.02, 0.0)])).unwrap();
        assert!((a - 0.02 / 3.0).abs() < 1e-15);
        assert!(matches!(
            stationary_measure(&samples(&[(0.0, 0.0)])),
            Err(PipelineError::TooShort(1))
        ));
    }

    #[test]
    fn stationary_threshold_rules() {
        let threshold = 0.005;
        let anchored = chunk_of(&[(1.0, 1.0); 4]);
        let exact = chunk_of(&[(0.0, 0.0), (0.0, 0.01)]);
        let moving = chunk_of(&[(0.0, 0.0), (0.0, 0.1)]);
        let (kept, removed) = filter_stationary(vec![anchored, exact.clone(), moving.clone()], threshold);
        assert_eq!(removed, 1);
        assert_eq!(kept, vec![exact, moving]);
    }

    #[test]
    fn river_fraction_rules() {
        let river = [GeoPoint { lat: 50.0, lon: 8.0 }];
        let mask = RiverMask::build(&river, 200.0).unwrap();
        let on = (50.0, 8.0);
        let off = (10.0, 8.0);
        assert!(!filter_river(&chunk_of(&[on, on, on]), &mask, 0.5));
        assert!(filter_river(&chunk_of(&[on, on, off, off]), &mask, 0.5));
        assert!(!filter_river(&chunk_of(&[on, on, on, off]), &mask, 0.5));
        assert!(filter_river(&chunk_of(&[off, off]), &mask, 0.5));
    }
}
