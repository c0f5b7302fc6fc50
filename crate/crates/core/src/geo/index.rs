use std::collections::HashMap;

use super::{haversine_km, GeoError, GeoPoint, EARTH_RADIUS_KM};
use crate::par;

/// Kilometers per degree used to size grid cells (equatorial degree).
pub const KM_PER_DEGREE_GRID: f64 = 111.32;
/// Above this absolute latitude queries scan every point.
pub const POLAR_CAP_LAT: f64 = 85.0;
pub const DEFAULT_RIVER_BUFFER_M: f64 = 200.0;

/// Uniform equirectangular grid over a static point set.
///
/// Cells are `cell_size_km / 111.32` degrees on a side and a query reaches
/// `cell_size_km / 2`. A query scans the cells overlapping the bounding box of
/// its search disc: 3x3 cells at low latitudes, more columns where meridians
/// converge. Discs that touch a pole or lie in the polar caps are answered by
/// a full scan.
#[derive(Clone, Debug)]
pub struct GeoGridIndex {
    cell_size_km: f64,
    cell_deg: f64,
    buckets: HashMap<(i64, i64), Vec<GeoPoint>>,
    points: Vec<GeoPoint>,
}

impl GeoGridIndex {
    pub fn build(points: &[GeoPoint], cell_size_km: f64) -> Result<Self, GeoError> {
        if !(cell_size_km.is_finite() && cell_size_km > 0.0) {
            return Err(GeoError::InvalidCellSize(cell_size_km));
        }
        if points.is_empty() {
            return Err(GeoError::EmptyPointSet);
        }
        let cell_deg = cell_size_km / KM_PER_DEGREE_GRID;
        let mut buckets: HashMap<(i64, i64), Vec<GeoPoint>> = HashMap::new();
        for &p in points {
            GeoPoint::new(p.lat, p.lon)?;
            buckets.entry(cell_of(p, cell_deg)).or_default().push(p);
        }
        Ok(Self {
            cell_size_km,
            cell_deg,
            buckets,
            points: points.to_vec(),
        })
    }

    pub fn cell_size_km(&self) -> f64 {
        self.cell_size_km
    }

    pub fn query_radius_km(&self) -> f64 {
        self.cell_size_km / 2.0
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }

    /// Cell coordinates a point is bucketed under.
    pub fn cell(&self, p: GeoPoint) -> (i64, i64) {
        cell_of(p, self.cell_deg)
    }

    /// Distance to the nearest indexed point, if one lies within the query radius.
    pub fn nearest_within(&self, p: GeoPoint) -> Option<f64> {
        let radius = self.query_radius_km();
        let delta_deg = (radius / EARTH_RADIUS_KM).to_degrees();
        if p.lat.abs() > POLAR_CAP_LAT || p.lat.abs() + delta_deg >= 90.0 {
            return self.scan(self.points.iter(), p, radius);
        }
        let ratio = (radius / EARTH_RADIUS_KM).sin() / p.lat.to_radians().cos();
        if ratio >= 1.0 {
            return self.scan(self.points.iter(), p, radius);
        }
        // Half-width in longitude of the disc, with a hair of slack.
        let half_lon = ratio.asin().to_degrees() * (1.0 + 1e-9) + 1e-9;
        let half_lat = delta_deg * (1.0 + 1e-9) + 1e-9;

        let cd = self.cell_deg;
        let row_lo = ((p.lat - half_lat) / cd).floor() as i64;
        let row_hi = ((p.lat + half_lat) / cd).floor() as i64;

        let (lo, hi) = (p.lon - half_lon, p.lon + half_lon);
        let mut spans = [(lo.max(-180.0), hi.min(180.0)), (f64::NAN, f64::NAN)];
        if lo < -180.0 {
            spans[1] = (lo + 360.0, 180.0);
        } else if hi > 180.0 {
            spans[1] = (-180.0, hi - 360.0);
        }

        let mut best: Option<f64> = None;
        for &(a, b) in spans.iter().filter(|s| !s.0.is_nan()) {
            let (col_lo, col_hi) = ((a / cd).floor() as i64, (b / cd).floor() as i64);
            for row in row_lo..=row_hi {
                for col in col_lo..=col_hi {
                    if let Some(bucket) = self.buckets.get(&(row, col)) {
                        if let Some(d) = self.scan(bucket.iter(), p, radius) {
                            best = Some(best.map_or(d, |b: f64| b.min(d)));
                        }
                    }
                }
            }
        }
        best
    }

    fn scan<'a>(&self, pts: impl Iterator<Item = &'a GeoPoint>, p: GeoPoint, radius: f64) -> Option<f64> {
        pts.map(|&q| haversine_km(p, q))
            .filter(|&d| d <= radius)
            .min_by(f64::total_cmp)
    }

    /// Nearest distance within the query radius, capped at the radius.
    pub fn min_distance_within(&self, p: GeoPoint) -> f64 {
        self.nearest_within(p).unwrap_or_else(|| self.query_radius_km())
    }

    /// Same as [`Self::min_distance_within`] over a batch of points.
    pub fn min_distances(&self, pts: &[GeoPoint]) -> Vec<f64> {
        par::map(pts, |&p| self.min_distance_within(p))
    }

    /// Reference answer: scan every point.
    pub fn brute_force_min_distance(&self, p: GeoPoint) -> f64 {
        self.scan(self.points.iter(), p, self.query_radius_km())
            .unwrap_or_else(|| self.query_radius_km())
    }
}

fn cell_of(p: GeoPoint, cell_deg: f64) -> (i64, i64) {
    (
        (p.lat / cell_deg).floor() as i64,
        (p.lon / cell_deg).floor() as i64,
    )
}

/// Proximity test against river polyline vertices.
#[derive(Clone, Debug)]
pub struct RiverMask {
    index: GeoGridIndex,
    buffer_m: f64,
}

impl RiverMask {
    pub fn build(vertices: &[GeoPoint], buffer_m: f64) -> Result<Self, GeoError> {
        if !(buffer_m.is_finite() && buffer_m > 0.0) {
            return Err(GeoError::InvalidCellSize(buffer_m));
        }
        // Slightly oversized so the exact comparison below decides ties.
        let cell_km = 2.0 * buffer_m / 1000.0 * (1.0 + 1e-6);
        Ok(Self {
            index: GeoGridIndex::build(vertices, cell_km)?,
            buffer_m,
        })
    }

    pub fn buffer_m(&self) -> f64 {
        self.buffer_m
    }

    pub fn vertex_count(&self) -> usize {
        self.index.point_count()
    }

    /// True iff some vertex lies within `buffer_m` meters (inclusive).
    pub fn near_river(&self, p: GeoPoint) -> bool {
        self.index
            .nearest_within(p)
            .is_some_and(|d| d * 1000.0 <= self.buffer_m)
    }
}
