//! Synthetic trajectories for tests, benchmarks and demos.
//!
//! Three movement patterns share one wide speed distribution, so neither a
//! single report nor the distance covered says much about the class. What
//! differs is how the course evolves: held, alternating, or wandering.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::ais::{AisRecord, VesselTrack};
use crate::geo::GeoPoint;

const METERS_PER_DEG: f64 = 111_320.0;
const KNOT_MPS: f64 = 0.514_444;

/// Movement pattern of a synthetic vessel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pattern {
    /// Holds a course; makes the most ground.
    Straight,
    /// Alternates between two courses either side of a base course.
    Zigzag,
    /// Meanders: the course performs a random walk.
    Loiter,
}

impl Pattern {
    pub const ALL: [Pattern; 3] = [Pattern::Straight, Pattern::Zigzag, Pattern::Loiter];

    /// Ship type code reported by vessels of this pattern.
    pub fn shiptype(self) -> u8 {
        match self {
            Pattern::Straight => 70,
            Pattern::Zigzag => 30,
            Pattern::Loiter => 52,
        }
    }
}

/// Tracks plus the coastline and harbor points they were generated against.
#[derive(Clone, Debug)]
pub struct SynthCorpus {
    pub tracks: Vec<VesselTrack>,
    pub coast: Vec<GeoPoint>,
    pub harbors: Vec<GeoPoint>,
}

/// A coastline along 54°N between 0°E and 10°E and 140 harbors scattered
/// over the surrounding sea area.
pub fn synthetic_geo(seed: u64) -> (Vec<GeoPoint>, Vec<GeoPoint>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6e0);
    let coast = (0..=650)
        .map(|i| GeoPoint {
            lat: 54.0 + 0.05 * (i as f64 * 0.07).sin(),
            lon: i as f64 * 10.0 / 650.0,
        })
        .collect();
    let harbors = (0..140)
        .map(|_| GeoPoint {
            lat: rng.random_range(50.0..60.0),
            lon: rng.random_range(-5.0..15.0),
        })
        .collect();
    (coast, harbors)
}

/// One track of exactly `len` reports sampled about every 10 s.
pub fn pattern_track(pattern: Pattern, mmsi: u32, len: usize, rng: &mut impl Rng) -> VesselTrack {
    // log-uniform over 2..20 kn, identical for every pattern
    let speed_kn: f64 = 2.0 * 10f64.powf(rng.random_range(0.0..1.0));
    let mut heading = rng.random_range(0.0..360.0f64).to_radians();
    let base = heading;
    let mut lat = rng.random_range(53.7..54.3);
    let mut lon = rng.random_range(1.0..9.0);
    let mut t: i64 = 1_600_000_000 + rng.random_range(0..86_400);
    let jitter = Normal::new(0.0, 0.02).expect("valid sigma");
    let wander = Normal::new(0.0, 0.12).expect("valid sigma");

    let zig_angle = rng.random_range(30.0..60.0f64).to_radians();
    let leg_s = rng.random_range(60.0..180.0);
    let phase_s = rng.random_range(0.0..leg_s);

    let mut elapsed = 0.0;
    let mut records = Vec::with_capacity(len);
    for i in 0..len {
        let dt = if i == 0 { 0 } else { rng.random_range(8..=12) };
        t += dt;
        elapsed += dt as f64;
        let course = match pattern {
            Pattern::Straight => base + jitter.sample(rng),
            Pattern::Zigzag => {
                let leg = ((elapsed + phase_s) / leg_s).floor() as i64;
                base + if leg % 2 == 0 { zig_angle } else { -zig_angle } + jitter.sample(rng)
            }
            Pattern::Loiter => {
                heading += wander.sample(rng);
                heading
            }
        };
        let d = dt as f64 * speed_kn * KNOT_MPS;
        lat += d * course.cos() / METERS_PER_DEG;
        lon += d * course.sin() / (METERS_PER_DEG * lat.to_radians().cos());
        let sog_kn = speed_kn * (1.0 + 1.5 * jitter.sample(rng));
        let cog = (course.to_degrees().rem_euclid(360.0) * 10.0).round() / 10.0;
        records.push(AisRecord {
            mmsi,
            timestamp: t,
            lat,
            lon,
            sog: (sog_kn * 10.0).round().clamp(0.0, 1022.0) as u16,
            cog: if cog >= 360.0 { 0.0 } else { cog },
            shiptype: Some(pattern.shiptype()),
        });
    }
    VesselTrack {
        mmsi,
        records,
        shiptype: Some(pattern.shiptype()),
    }
}

/// `n` tracks of length `len` with classes drawn by `pick`.
fn corpus_with(n: usize, len: usize, seed: u64, mut pick: impl FnMut(usize, &mut ChaCha8Rng) -> Pattern) -> SynthCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tracks = (0..n)
        .map(|i| {
            let p = pick(i, &mut rng);
            pattern_track(p, 100_000_000 + i as u32, len, &mut rng)
        })
        .collect();
    let (coast, harbors) = synthetic_geo(seed);
    SynthCorpus { tracks, coast, harbors }
}

/// Balanced three-pattern corpus, classes in rotation.
pub fn pattern_corpus(n: usize, len: usize, seed: u64) -> SynthCorpus {
    corpus_with(n, len, seed, |i, _| Pattern::ALL[i % 3])
}

/// Corpus where a `majority` fraction of tracks are [`Pattern::Straight`] and
/// the rest split evenly between the other two patterns.
pub fn imbalanced_corpus(n: usize, len: usize, majority: f64, seed: u64) -> SynthCorpus {
    let n_major = (majority * n as f64).round() as usize;
    corpus_with(n, len, seed, |i, _| {
        if i < n_major {
            Pattern::Straight
        } else if (i - n_major) % 2 == 0 {
            Pattern::Zigzag
        } else {
            Pattern::Loiter
        }
    })
}

/// An adversarial track: arbitrary length, long time gaps, position jumps,
/// stationary stretches, extreme coordinates and assorted ship types.
pub fn fuzz_track(mmsi: u32, rng: &mut impl Rng) -> VesselTrack {
    const TYPES: [Option<u8>; 9] = [Some(70), Some(84), Some(30), Some(60), Some(37), Some(52), Some(0), Some(99), None];
    let shiptype = TYPES[rng.random_range(0..TYPES.len())];
    let n = match rng.random_range(0..4) {
        0 => rng.random_range(1..20),
        1 => rng.random_range(20..400),
        _ => rng.random_range(400..1500),
    };
    let mut lat: f64 = rng.random_range(-85.0..85.0);
    let mut lon: f64 = rng.random_range(-180.0..180.0);
    let mut t: i64 = rng.random_range(0..2_000_000_000);
    let step_scale = 10f64.powf(rng.random_range(-6.0..-2.0));
    let mut records = Vec::with_capacity(n);
    let mut still = 0;
    for _ in 0..n {
        t += match rng.random_range(0..100) {
            0 => rng.random_range(7_201..50_000),
            1 => 7_200,
            _ => rng.random_range(1..120),
        };
        if still > 0 {
            still -= 1;
        } else if rng.random_range(0..200) == 0 {
            still = rng.random_range(5..400);
        } else if rng.random_range(0..150) == 0 {
            lat += rng.random_range(-0.5..0.5);
            lon += rng.random_range(-0.5..0.5);
        } else {
            lat += rng.random_range(-1.0..1.0) * step_scale;
            lon += rng.random_range(-1.0..1.0) * step_scale;
        }
        lat = lat.clamp(-89.9, 89.9);
        if lon > 180.0 {
            lon -= 360.0;
        } else if lon < -180.0 {
            lon += 360.0;
        }
        records.push(AisRecord {
            mmsi,
            timestamp: t,
            lat,
            lon,
            sog: rng.random_range(0..=1022),
            cog: (rng.random_range(0..3600) as f64) / 10.0,
            shiptype,
        });
    }
    VesselTrack { mmsi, records, shiptype }
}

pub fn fuzz_tracks(n: usize, seed: u64) -> Vec<VesselTrack> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|i| fuzz_track(1 + i as u32, &mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracks_are_valid_and_sized() {
        let c = pattern_corpus(9, 360, 1);
        assert_eq!(c.tracks.len(), 9);
        assert_eq!(c.harbors.len(), 140);
        for t in &c.tracks {
            assert_eq!(t.records.len(), 360);
            for w in t.records.windows(2) {
                assert!(w[1].timestamp > w[0].timestamp);
                let step = (w[1].lat - w[0].lat).powi(2) + (w[1].lon - w[0].lon).powi(2);
                assert!(step < 1e-4);
            }
            t.records.iter().for_each(|r| r.validate().unwrap());
        }
    }

    #[test]
    fn straightness_orders_the_patterns() {
        // net displacement over path length, averaged over tracks
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut straightness = |p: Pattern| {
            (0..20)
                .map(|_| {
                    let t = pattern_track(p, 1, 360, &mut rng);
                    let k = t.records[0].lat.to_radians().cos();
                    let d = |a: &AisRecord, b: &AisRecord| (b.lat - a.lat).hypot((b.lon - a.lon) * k);
                    let path: f64 = t.records.windows(2).map(|w| d(&w[0], &w[1])).sum();
                    d(&t.records[0], &t.records[359]) / path
                })
                .sum::<f64>()
                / 20.0
        };
        let (s, z, l) = (
            straightness(Pattern::Straight),
            straightness(Pattern::Zigzag),
            straightness(Pattern::Loiter),
        );
        assert!(s > 0.99 && s > z && z > l, "{s} {z} {l}");
    }

    #[test]
    fn imbalance_fraction() {
        let c = imbalanced_corpus(100, 10, 0.7, 2);
        let major = c.tracks.iter().filter(|t| t.shiptype == Some(70)).count();
        assert_eq!(major, 70);
    }

    #[test]
    fn fuzz_records_are_valid() {
        for t in fuzz_tracks(50, 3) {
            assert!(!t.records.is_empty());
            t.records.iter().for_each(|r| r.validate().unwrap());
        }
    }
}
