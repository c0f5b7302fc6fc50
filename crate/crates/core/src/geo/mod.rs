//! Reference geometry and bounded nearest-distance queries.

mod index;
mod load;

pub use index::{GeoGridIndex, RiverMask, DEFAULT_RIVER_BUFFER_M, KM_PER_DEGREE_GRID, POLAR_CAP_LAT};
pub use load::{load_coastline, load_harbors, load_points, subsample};

use serde::{Deserialize, Serialize};

/// Mean Earth radius used for every distance in the crate.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Coastline index cell size; queries reach half of it.
pub const COAST_CELL_KM: f64 = 40.0;
/// Harbor index cell size; queries reach half of it.
pub const HARBOR_CELL_KM: f64 = 5000.0;

#[derive(Debug, thiserror::Error)]
pub enum GeoError {
    #[error("point set is empty")]
    EmptyPointSet,
    #[error("invalid coordinate lat={lat}, lon={lon}")]
    InvalidCoordinate { lat: f64, lon: f64 },
    #[error("cell size must be positive, got {0}")]
    InvalidCellSize(f64),
    #[error("{path}:{line}: {msg}")]
    Format { path: String, line: usize, msg: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl GeoError {
    pub fn is_io(&self) -> bool {
        matches!(self, GeoError::Io { .. })
    }
}

/// A WGS84 position in degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self, GeoError> {
        if lat.is_finite() && lon.is_finite() && lat.abs() <= 90.0 && lon.abs() <= 180.0 {
            Ok(Self { lat, lon })
        } else {
            Err(GeoError::InvalidCoordinate { lat, lon })
        }
    }
}

/// Great-circle distance on a sphere of radius [`EARTH_RADIUS_KM`].
pub fn haversine_km(a: GeoPoint, b: GeoPoint) -> f64 {
    let (lat1, lat2) = (a.lat.to_radians(), b.lat.to_radians());
    let dlat = lat2 - lat1;
    let dlon = (b.lon - a.lon).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn p(lat: f64, lon: f64) -> GeoPoint {
        GeoPoint::new(lat, lon).unwrap()
    }

    #[test]
    fn haversine_examples() {
        assert_eq!(haversine_km(p(12.0, 34.0), p(12.0, 34.0)), 0.0);
        assert!((haversine_km(p(0.0, 0.0), p(0.0, 180.0)) - PI * 6371.0).abs() < 1e-9);
        let arc = 6371.0 * PI / 180.0;
        assert!((haversine_km(p(0.0, 0.0), p(0.0, 1.0)) - arc).abs() < 1e-9);
        assert!((arc - 111.19).abs() < 0.01);
    }

    #[test]
    fn rejects_bad_points() {
        assert!(GeoPoint::new(90.5, 0.0).is_err());
        assert!(GeoPoint::new(0.0, -180.5).is_err());
        assert!(GeoPoint::new(f64::NAN, 0.0).is_err());
    }

    fn arb_point() -> impl Strategy<Value = GeoPoint> {
        (-90.0f64..=90.0, -180.0f64..=180.0).prop_map(|(lat, lon)| GeoPoint { lat, lon })
    }

    proptest! {
        #[test]
        fn symmetric_and_triangle(a in arb_point(), b in arb_point(), c in arb_point()) {
            let ab = haversine_km(a, b);
            prop_assert!(ab >= 0.0);
            prop_assert!((ab - haversine_km(b, a)).abs() <= 1e-9);
            prop_assert!(ab <= haversine_km(a, c) + haversine_km(c, b) + 1e-9);
        }
    }
}
