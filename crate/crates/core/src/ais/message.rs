use super::{AisError, BitBuffer, Field};

const POSITION_BITS: usize = 168;
const STATIC_BITS: usize = 424;
/// Shortest payload that still holds every field we read from a type 1/2/3 report.
const POSITION_MIN_BITS: usize = 128;
const STATIC_MIN_BITS: usize = 240;

const SOG_NA: u64 = 1023;
const COG_NA: u64 = 3600;
const UNITS_PER_DEGREE: f64 = 600_000.0;
const LON_NA: i64 = 181 * 600_000;
const LAT_NA: i64 = 91 * 600_000;

/// Kinematic part of a class A position report (message types 1, 2, 3).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PositionReport {
    pub message_type: u8,
    pub mmsi: u32,
    /// Speed over ground in tenths of a knot.
    pub sog: u16,
    pub lon: f64,
    pub lat: f64,
    /// Course over ground in degrees.
    pub cog: f64,
}

/// Ship type from a static and voyage report (message type 5).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StaticReport {
    pub mmsi: u32,
    pub shiptype: u8,
}

pub fn message_type(bits: &BitBuffer) -> Result<u8, AisError> {
    Ok(bits.uint(0, 6)? as u8)
}

fn require_len(bits: &BitBuffer, needed: usize) -> Result<(), AisError> {
    if bits.len() < needed {
        return Err(AisError::TruncatedPayload {
            needed,
            got: bits.len(),
        });
    }
    Ok(())
}

/// Decode a type 1/2/3 report. Reports carrying a "not available" sentinel
/// or an out-of-range value are rejected.
pub fn decode_position_report(bits: &BitBuffer) -> Result<PositionReport, AisError> {
    let message_type = message_type(bits)?;
    if !(1..=3).contains(&message_type) {
        return Err(AisError::UnsupportedMessageType(message_type));
    }
    require_len(bits, POSITION_MIN_BITS)?;
    let mmsi = bits.uint(8, 30)? as u32;
    let sog = bits.uint(50, 10)?;
    let lon = bits.int(61, 28)?;
    let lat = bits.int(89, 27)?;
    let cog = bits.uint(116, 12)?;

    if sog == SOG_NA {
        return Err(AisError::SentinelValue(Field::Sog));
    }
    if lon == LON_NA {
        return Err(AisError::SentinelValue(Field::Lon));
    }
    if lat == LAT_NA {
        return Err(AisError::SentinelValue(Field::Lat));
    }
    if cog == COG_NA {
        return Err(AisError::SentinelValue(Field::Cog));
    }
    if lon.abs() > 180 * 600_000 {
        return Err(AisError::InvalidValue(Field::Lon));
    }
    if lat.abs() > 90 * 600_000 {
        return Err(AisError::InvalidValue(Field::Lat));
    }
    if cog > COG_NA {
        return Err(AisError::InvalidValue(Field::Cog));
    }
    Ok(PositionReport {
        message_type,
        mmsi,
        sog: sog as u16,
        lon: lon as f64 / UNITS_PER_DEGREE,
        lat: lat as f64 / UNITS_PER_DEGREE,
        cog: cog as f64 / 10.0,
    })
}

/// Decode the MMSI and type-of-ship code of a type 5 report.
pub fn decode_static_report(bits: &BitBuffer) -> Result<StaticReport, AisError> {
    let t = message_type(bits)?;
    if t != 5 {
        return Err(AisError::UnsupportedMessageType(t));
    }
    require_len(bits, STATIC_MIN_BITS)?;
    Ok(StaticReport {
        mmsi: bits.uint(8, 30)? as u32,
        shiptype: bits.uint(232, 8)? as u8,
    })
}

/// Pack a full 168-bit type 1/2/3 report. Fields not modelled by
/// [`PositionReport`] are written as their "not available" defaults.
pub fn pack_position_report(r: &PositionReport) -> BitBuffer {
    let mut b = BitBuffer::new();
    b.push_uint(u64::from(r.message_type), 6);
    b.push_uint(0, 2); // repeat indicator
    b.push_uint(u64::from(r.mmsi), 30);
    b.push_uint(15, 4); // navigation status: undefined
    b.push_int(-128, 8); // rate of turn: not available
    b.push_uint(u64::from(r.sog), 10);
    b.push_uint(0, 1); // position accuracy
    b.push_int((r.lon * UNITS_PER_DEGREE).round() as i64, 28);
    b.push_int((r.lat * UNITS_PER_DEGREE).round() as i64, 27);
    b.push_uint((r.cog * 10.0).round() as u64, 12);
    b.push_uint(511, 9); // true heading: not available
    b.push_uint(60, 6); // time stamp: not available
    b.push_uint(0, 2);
    b.push_uint(0, 3);
    b.push_uint(0, 1);
    b.push_uint(0, 19);
    debug_assert_eq!(b.len(), POSITION_BITS);
    b
}

/// Pack a 424-bit type 5 report with the given MMSI and ship type; other
/// fields are zero.
pub fn pack_static_report(mmsi: u32, shiptype: u8) -> BitBuffer {
    let mut b = BitBuffer::new();
    b.push_uint(5, 6);
    b.push_uint(0, 2);
    b.push_uint(u64::from(mmsi), 30);
    b.push_uint(0, 232 - 38);
    b.push_uint(u64::from(shiptype), 8);
    b.push_uint(0, STATIC_BITS - 240);
    debug_assert_eq!(b.len(), STATIC_BITS);
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ais::decode_payload;
    use proptest::prelude::*;

    fn report(mmsi: u32, sog: u16, lat: f64, lon: f64, cog: f64) -> PositionReport {
        PositionReport {
            message_type: 1,
            mmsi,
            sog,
            lon,
            lat,
            cog,
        }
    }

    #[test]
    fn hand_packed_minimal_report() {
        // Build the bit string field by field, independent of pack_position_report.
        let mut bits = vec![false; 168];
        bits[5] = true; // type 1
        bits[37] = true; // mmsi = 1
        let r = decode_position_report(&BitBuffer::from_bits(bits)).unwrap();
        assert_eq!(r.message_type, 1);
        assert_eq!(r.mmsi, 1);
        assert_eq!(r.sog, 0);
        assert_eq!(r.lat, 0.0);
        assert_eq!(r.lon, 0.0);
        assert_eq!(r.cog, 0.0);
    }

    #[test]
    fn all_sentinels_rejected() {
        let mut r = pack_position_report(&report(5, 0, 0.0, 0.0, 0.0));
        let mut bits = r.bits().to_vec();
        let set = |bits: &mut Vec<bool>, start: usize, width: usize, v: u64| {
            for i in 0..width {
                bits[start + i] = (v >> (width - 1 - i)) & 1 == 1;
            }
        };
        set(&mut bits, 50, 10, 1023);
        set(&mut bits, 61, 28, LON_NA as u64);
        set(&mut bits, 89, 27, LAT_NA as u64);
        set(&mut bits, 116, 12, 3600);
        r = BitBuffer::from_bits(bits);
        assert!(matches!(
            decode_position_report(&r),
            Err(AisError::SentinelValue(_))
        ));
    }

    #[test]
    fn individual_sentinels() {
        let base = report(5, 10, 10.0, 10.0, 10.0);
        let cog_na = PositionReport { cog: 360.0, ..base };
        assert!(matches!(
            decode_position_report(&pack_position_report(&cog_na)),
            Err(AisError::SentinelValue(Field::Cog))
        ));
        let lat_na = PositionReport { lat: 91.0, ..base };
        assert!(matches!(
            decode_position_report(&pack_position_report(&lat_na)),
            Err(AisError::SentinelValue(Field::Lat))
        ));
        let lat_bad = PositionReport { lat: 95.0, ..base };
        assert!(matches!(
            decode_position_report(&pack_position_report(&lat_bad)),
            Err(AisError::InvalidValue(Field::Lat))
        ));
    }

    #[test]
    fn type_4_unsupported() {
        let mut b = BitBuffer::new();
        b.push_uint(4, 6);
        b.push_uint(0, 162);
        assert!(matches!(
            decode_position_report(&b),
            Err(AisError::UnsupportedMessageType(4))
        ));
    }

    #[test]
    fn known_sentence_decodes() {
        // Widely used type 1 example sentence.
        let b = decode_payload("177KQJ5000G?tO`K>RA1wUbN0TKH", 0).unwrap();
        let r = decode_position_report(&b).unwrap();
        assert_eq!(r.mmsi, 477553000);
        assert_eq!(r.sog, 0);
        assert!((r.lon - -122.345832).abs() < 1e-5, "{}", r.lon);
        assert!((r.lat - 47.582833).abs() < 1e-5, "{}", r.lat);
        assert!((r.cog - 51.0).abs() < 1e-9);
    }

    #[test]
    fn static_report_fields() {
        let b = pack_static_report(123456789, 70);
        assert_eq!(
            decode_static_report(&b).unwrap(),
            StaticReport {
                mmsi: 123456789,
                shiptype: 70
            }
        );
        assert_eq!(decode_static_report(&pack_static_report(1, 0)).unwrap().shiptype, 0);

        let mut short = BitBuffer::new();
        short.push_uint(5, 6);
        short.push_uint(0, 94);
        assert!(matches!(
            decode_static_report(&short),
            Err(AisError::TruncatedPayload { got: 100, .. })
        ));
    }

    #[test]
    fn hand_packed_static_type() {
        let mut bits = vec![false; 424];
        // type 5 = 000101
        bits[3] = true;
        bits[5] = true;
        // shiptype 70 = 0100_0110 at bits 232..240
        for (i, b) in [false, true, false, false, false, true, true, false]
            .into_iter()
            .enumerate()
        {
            bits[232 + i] = b;
        }
        let r = decode_static_report(&BitBuffer::from_bits(bits)).unwrap();
        assert_eq!(r.shiptype, 70);
    }

    proptest! {
        #[test]
        fn pack_decode_round_trip(
            t in 1u8..=3,
            mmsi in 0u32..(1 << 30),
            sog in 0u16..=1022,
            lat in -90.0f64..=90.0,
            lon in -180.0f64..=180.0,
            cog_tenths in 0u16..3600,
        ) {
            let r = PositionReport { message_type: t, mmsi, sog, lat, lon, cog: f64::from(cog_tenths) / 10.0 };
            let d = decode_position_report(&pack_position_report(&r)).unwrap();
            prop_assert_eq!(d.message_type, t);
            prop_assert_eq!(d.mmsi, mmsi);
            prop_assert_eq!(d.sog, sog);
            prop_assert_eq!(d.cog, r.cog);
            prop_assert!((d.lat - lat).abs() <= 1.0 / 600_000.0);
            prop_assert!((d.lon - lon).abs() <= 1.0 / 600_000.0);
        }
    }
}
