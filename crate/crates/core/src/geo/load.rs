use std::path::Path;

use super::{GeoError, GeoPoint};

/// Read a point-list file: `lat,lon[,name]` rows, `#` comments, optional
/// `lat,lon` header line.
pub fn load_points(path: impl AsRef<Path>) -> Result<Vec<GeoPoint>, GeoError> {
    let path = path.as_ref();
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| GeoError::Io {
        path: shown.clone(),
        source,
    })?;
    parse_points(&text, &shown)
}

fn parse_points(text: &str, source: &str) -> Result<Vec<GeoPoint>, GeoError> {
    let mut out = Vec::new();
    let mut first = true;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.splitn(3, ',').map(str::trim);
        let (lat_s, lon_s) = (parts.next().unwrap_or(""), parts.next().unwrap_or(""));
        if first && lat_s.eq_ignore_ascii_case("lat") {
            first = false;
            continue;
        }
        first = false;
        let err = |msg: String| GeoError::Format {
            path: source.to_string(),
            line: i + 1,
            msg,
        };
        let lat: f64 = lat_s
            .parse()
            .map_err(|_| err(format!("bad latitude `{lat_s}`")))?;
        let lon: f64 = lon_s
            .parse()
            .map_err(|_| err(format!("bad longitude `{lon_s}`")))?;
        let p = GeoPoint::new(lat, lon).map_err(|_| err(format!("coordinate out of range: {lat},{lon}")))?;
        out.push(p);
    }
    Ok(out)
}

/// Evenly spaced subset of at most `max` points, keeping the first and last.
pub fn subsample(points: Vec<GeoPoint>, max: usize) -> Vec<GeoPoint> {
    let n = points.len();
    if max == 0 || n <= max {
        return points;
    }
    if max == 1 {
        return vec![points[0]];
    }
    (0..max).map(|i| points[i * (n - 1) / (max - 1)]).collect()
}

/// Coastline vertices, optionally thinned to `max_points`.
pub fn load_coastline(path: impl AsRef<Path>, max_points: Option<usize>) -> Result<Vec<GeoPoint>, GeoError> {
    let pts = load_points(path)?;
    Ok(match max_points {
        Some(m) => subsample(pts, m),
        None => pts,
    })
}

/// Harbor positions. Duplicates are kept.
pub fn load_harbors(path: impl AsRef<Path>) -> Result<Vec<GeoPoint>, GeoError> {
    load_points(path)
}
