use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Chunk, PipelineError, Sample};
use crate::geo::{GeoGridIndex, GeoPoint};

pub const NUM_FEATURES: usize = 9;

/// Channel order of every feature matrix.
pub const FEATURE_SCHEMA: [&str; NUM_FEATURES] = [
    "dt", "sog", "cog", "x_rtf", "y_rtf", "x_rtz", "y_rtz", "d_coast", "d_harbor",
];

pub(crate) const CH_DT: usize = 0;
pub(crate) const CH_SOG: usize = 1;
pub(crate) const CH_COG: usize = 2;
pub(crate) const CH_X_RTF: usize = 3;
pub(crate) const CH_Y_RTF: usize = 4;
pub(crate) const CH_X_RTZ: usize = 5;
pub(crate) const CH_Y_RTZ: usize = 6;
pub(crate) const CH_COAST: usize = 7;
pub(crate) const CH_HARBOR: usize = 8;

pub type FeatureRow = [f64; NUM_FEATURES];

/// Positional transform family of a dataset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    /// Relative-to-first only; the rtz channels repeat the rtf channels.
    Rtf,
    /// Relative-to-first plus rotate-to-zero.
    Rtz,
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Transform::Rtf => "rtf",
            Transform::Rtz => "rtz",
        })
    }
}

impl FromStr for Transform {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rtf" => Ok(Transform::Rtf),
            "rtz" => Ok(Transform::Rtz),
            other => Err(format!("unknown transform `{other}` (expected rtf or rtz)")),
        }
    }
}

/// Unnormalized feature rows of one chunk (true samples only).
#[derive(Clone, Debug, PartialEq)]
pub struct RawFeatures {
    pub rows: Vec<FeatureRow>,
    pub degenerate_rotation: bool,
}

/// Shift positions so the first sample is the origin: `x = lon - lon0`,
/// `y = lat - lat0`, in degrees.
pub fn relative_to_first(samples: &[Sample]) -> Vec<(f64, f64)> {
    let Some(first) = samples.first() else {
        return Vec::new();
    };
    samples
        .iter()
        .map(|s| (s.lon - first.lon, s.lat - first.lat))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rotation {
    pub points: Vec<(f64, f64)>,
    /// Applied angle in radians.
    pub angle: f64,
}

/// Rotate about the origin so the last point lands on the positive x-axis.
pub fn rotate_to_zero(points: &[(f64, f64)]) -> Result<Rotation, PipelineError> {
    let &(xe, ye) = points.last().ok_or(PipelineError::TooShort(0))?;
    if xe.hypot(ye) < 1e-12 {
        return Err(PipelineError::DegenerateEndpoint);
    }
    let angle = -ye.atan2(xe);
    let (sin, cos) = angle.sin_cos();
    let points = points
        .iter()
        .map(|&(x, y)| (x * cos - y * sin, x * sin + y * cos))
        .collect();
    Ok(Rotation { points, angle })
}

/// Nine raw channels per true sample, in [`FEATURE_SCHEMA`] order.
pub fn compute_features(
    chunk: &Chunk,
    coast: &GeoGridIndex,
    harbors: &GeoGridIndex,
    transform: Transform,
) -> RawFeatures {
    let rtf = relative_to_first(&chunk.samples);
    let (rtz, degenerate_rotation) = match transform {
        Transform::Rtf => (rtf.clone(), false),
        Transform::Rtz => match rotate_to_zero(&rtf) {
            Ok(r) => (r.points, false),
            Err(_) => (rtf.clone(), true),
        },
    };
    let mut prev_t = chunk.samples.first().map_or(0, |s| s.timestamp);
    let rows = chunk
        .samples
        .iter()
        .zip(rtf.iter().zip(&rtz))
        .map(|(s, (&(xf, yf), &(xz, yz)))| {
            let dt = (s.timestamp - prev_t) as f64;
            prev_t = s.timestamp;
            let p = GeoPoint { lat: s.lat, lon: s.lon };
            let mut row = [0.0; NUM_FEATURES];
            row[CH_DT] = dt;
            row[CH_SOG] = f64::from(s.sog);
            row[CH_COG] = s.cog;
            row[CH_X_RTF] = xf;
            row[CH_Y_RTF] = yf;
            row[CH_X_RTZ] = xz;
            row[CH_Y_RTZ] = yz;
            row[CH_COAST] = coast.min_distance_within(p);
            row[CH_HARBOR] = harbors.min_distance_within(p);
            row
        })
        .collect();
    RawFeatures {
        rows,
        degenerate_rotation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::ClassLabel;
    use proptest::prelude::*;

    fn sample(t: i64, lat: f64, lon: f64) -> Sample {
        Sample {
            timestamp: t,
            lat,
            lon,
            sog: 42,
            cog: 12.5,
        }
    }

    #[test]
    fn rtf_starts_at_origin() {
        let s = [sample(0, 10.0, 20.0), sample(10, 10.5, 19.0)];
        let p = relative_to_first(&s);
        assert_eq!(p[0], (0.0, 0.0));
        assert_eq!(p[1], (-1.0, 0.5));
        let still = relative_to_first(&[sample(0, 3.0, 3.0); 4]);
        assert!(still.iter().all(|&q| q == (0.0, 0.0)));
    }

    #[test]
    fn rtz_examples() {
        let r = rotate_to_zero(&[(0.0, 0.0), (0.0, 5.0)]).unwrap();
        let (x, y) = *r.points.last().unwrap();
        assert!((x - 5.0).abs() < 1e-12 && y.abs() < 1e-12);
        let r = rotate_to_zero(&[(0.0, 0.0), (1.0, 1.0), (3.0, 4.0)]).unwrap();
        let (x, y) = *r.points.last().unwrap();
        assert!((x - 5.0).abs() < 1e-12 && y.abs() < 1e-12);
        assert!(matches!(
            rotate_to_zero(&[(0.0, 0.0), (1.0, 0.0), (0.0, 0.0)]),
            Err(PipelineError::DegenerateEndpoint)
        ));
    }

    #[test]
    fn feature_channels() {
        let coast = GeoGridIndex::build(&[GeoPoint { lat: 10.0, lon: 20.0 }], 40.0).unwrap();
        let harbors = GeoGridIndex::build(&[GeoPoint { lat: 10.0, lon: 20.0 }], 5000.0).unwrap();
        let chunk = Chunk {
            mmsi: 1,
            segment: 0,
            index: 0,
            label: ClassLabel::Tug,
            seq_len: 4,
            samples: vec![sample(100, 10.0, 20.0), sample(110, 10.0, 20.0), sample(120, 10.0, 20.0)],
        };
        let f = compute_features(&chunk, &coast, &harbors, Transform::Rtf);
        assert_eq!(f.rows.iter().map(|r| r[CH_DT]).collect::<Vec<_>>(), [0.0, 10.0, 10.0]);
        assert!(f.rows.iter().all(|r| r[CH_COAST] == 0.0 && r[CH_HARBOR] == 0.0));
        assert!(f.rows.iter().all(|r| r[CH_SOG] == 42.0 && r[CH_COG] == 12.5));

        let far = Chunk {
            samples: vec![sample(0, -40.0, -30.0), sample(10, -40.0, -29.999)],
            ..chunk.clone()
        };
        let f = compute_features(&far, &coast, &harbors, Transform::Rtz);
        assert_eq!(f.rows[0][CH_COAST], 20.0);
        assert_eq!(f.rows[0][CH_HARBOR], 2500.0);
        assert!(!f.degenerate_rotation);

        let f = compute_features(&chunk, &coast, &harbors, Transform::Rtz);
        assert!(f.degenerate_rotation);
        assert!(f.rows.iter().all(|r| r[CH_X_RTZ] == r[CH_X_RTF]));
    }

    proptest! {
        #[test]
        fn rtf_translation_invariant(
            pts in proptest::collection::vec((-60.0f64..60.0, -170.0f64..170.0), 1..50),
        ) {
            let a: Vec<Sample> = pts.iter().enumerate().map(|(i, &(la, lo))| sample(i as i64, la, lo)).collect();
            let b: Vec<Sample> = pts.iter().enumerate().map(|(i, &(la, lo))| sample(i as i64, la + 1.0, lo + 1.0)).collect();
            for (p, q) in relative_to_first(&a).iter().zip(relative_to_first(&b)) {
                prop_assert!((p.0 - q.0).abs() < 1e-9 && (p.1 - q.1).abs() < 1e-9);
            }
        }

        #[test]
        fn rtz_preserves_distances(
            pts in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..60),
        ) {
            prop_assume!(pts.last().unwrap().0.hypot(pts.last().unwrap().1) > 1e-6);
            let r = rotate_to_zero(&pts).unwrap();
            let (xe, ye) = *r.points.last().unwrap();
            prop_assert!(ye.abs() < 1e-9);
            prop_assert!(xe > 0.0);
            for i in 0..pts.len() {
                for j in (i + 1)..pts.len() {
                    let d0 = (pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1);
                    let d1 = (r.points[i].0 - r.points[j].0).hypot(r.points[i].1 - r.points[j].1);
                    prop_assert!((d0 - d1).abs() < 1e-9);
                }
            }
        }
    }
}
