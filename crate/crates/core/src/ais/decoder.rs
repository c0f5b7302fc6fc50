use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{
    checksum, decode_payload, decode_position_report, decode_static_report, message_type, parse_hex_checksum, parse_sentence,
    AisError, AisRecord, AssemblyStats, FragmentAssembler,
};

/// Counters kept by [`NmeaDecoder`]. Nothing in a line stream is fatal; every
/// rejected input lands in exactly one bucket.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeStats {
    pub lines: u64,
    pub blank: u64,
    /// Lines that are not `!xxVDM` / `!xxVDO` sentences.
    pub non_ais: u64,
    pub malformed: u64,
    pub checksum_errors: u64,
    pub invalid_fill: u64,
    pub invalid_armor: u64,
    pub truncated: u64,
    pub unsupported_type: u64,
    pub sentinel: u64,
    pub invalid_value: u64,
    pub missing_timestamp: u64,
    pub static_reports: u64,
    pub position_reports: u64,
    pub records: u64,
    pub assembly: AssemblyStats,
}

/// Split a log line into its receive time and the bare sentence.
///
/// Two timestamp conventions are understood: an NMEA 4.0 tag block
/// (`\c:1538000000*hh\!AIVDM,...`) and a trailing field after the checksum
/// (`!AIVDM,...*hh,1538000000`). Millisecond values are scaled to seconds.
pub fn split_line(line: &str) -> (Option<i64>, &str) {
    let mut line = line.trim();
    let mut ts = None;
    if let Some(rest) = line.strip_prefix('\\') {
        if let Some((block, sentence)) = rest.split_once('\\') {
            // the block's own checksum must verify before its time is trusted
            ts = block
                .split_once('*')
                .filter(|(content, sum)| parse_hex_checksum(sum) == Some(checksum(content)))
                .and_then(|(content, _)| {
                    content
                        .split(',')
                        .find_map(|kv| kv.strip_prefix("c:"))
                        .and_then(|v| v.parse::<i64>().ok())
                });
            line = sentence;
        }
    }
    if let Some(star) = line.find('*') {
        let tail_start = (star + 3).min(line.len());
        if let Some(extra) = line.get(tail_start..).and_then(|t| t.strip_prefix(',')) {
            if ts.is_none() {
                ts = extra.trim().parse::<i64>().ok();
            }
            line = &line[..tail_start];
        }
    }
    let ts = ts.map(|t| if t > 100_000_000_000 { t / 1000 } else { t });
    (ts, line)
}

/// Streaming AIVDM decoder producing [`AisRecord`]s from type 1/2/3 reports,
/// labelled with the most recent type 5 ship type seen for the vessel.
#[derive(Debug)]
pub struct NmeaDecoder {
    assembler: FragmentAssembler,
    shiptypes: HashMap<u32, u8>,
    stats: DecodeStats,
}

impl Default for NmeaDecoder {
    fn default() -> Self {
        Self::new(super::DEFAULT_FRAGMENT_WINDOW)
    }
}

impl NmeaDecoder {
    pub fn new(window: u64) -> Self {
        Self {
            assembler: FragmentAssembler::new(window),
            shiptypes: HashMap::new(),
            stats: DecodeStats::default(),
        }
    }

    pub fn stats(&self) -> DecodeStats {
        DecodeStats {
            assembly: self.assembler.stats(),
            ..self.stats
        }
    }

    fn count_error(&mut self, e: &AisError) {
        let s = &mut self.stats;
        match e {
            AisError::MalformedSentence(_) => s.malformed += 1,
            AisError::ChecksumMismatch { .. } => s.checksum_errors += 1,
            AisError::InvalidFillBits(_) => s.invalid_fill += 1,
            AisError::InvalidArmorCharacter(_) => s.invalid_armor += 1,
            AisError::TruncatedPayload { .. } => s.truncated += 1,
            AisError::UnsupportedMessageType(_) => s.unsupported_type += 1,
            AisError::SentinelValue(_) => s.sentinel += 1,
            AisError::InvalidValue(_) => s.invalid_value += 1,
            AisError::HeaderMismatch { .. } | AisError::Io { .. } => s.malformed += 1,
        }
    }

    /// Feed one line of input. Returns a record when the line completes a
    /// valid position report.
    pub fn push_line(&mut self, line: &str) -> Option<AisRecord> {
        self.stats.lines += 1;
        if line.trim().is_empty() {
            self.stats.blank += 1;
            return None;
        }
        let (ts, sentence) = split_line(line);
        let is_ais = sentence
            .strip_prefix('!')
            .and_then(|s| s.get(2..5))
            .is_some_and(|f| f == "VDM" || f == "VDO");
        if !is_ais {
            self.stats.non_ais += 1;
            return None;
        }
        let parsed = match parse_sentence(sentence) {
            Ok(p) => p,
            Err(e) => {
                self.count_error(&e);
                return None;
            }
        };
        let assembled = self.assembler.push(&parsed)?;
        match self.decode(&assembled.payload, assembled.fill_bits, ts) {
            Ok(r) => r,
            Err(e) => {
                self.count_error(&e);
                None
            }
        }
    }

    fn decode(&mut self, payload: &str, fill: u8, ts: Option<i64>) -> Result<Option<AisRecord>, AisError> {
        let bits = decode_payload(payload, fill)?;
        match message_type(&bits)? {
            1..=3 => {
                let p = decode_position_report(&bits)?;
                self.stats.position_reports += 1;
                let Some(timestamp) = ts else {
                    self.stats.missing_timestamp += 1;
                    return Ok(None);
                };
                let shiptype = self.shiptypes.get(&p.mmsi).copied().filter(|&t| t <= 99);
                // cog 359.95 rounds to a legal value, but reject anything
                // that still breaks the record invariants.
                let r = AisRecord::new(p.mmsi, timestamp, p.lat, p.lon, p.sog, p.cog, shiptype)?;
                self.stats.records += 1;
                Ok(Some(r))
            }
            5 => {
                let s = decode_static_report(&bits)?;
                self.stats.static_reports += 1;
                self.shiptypes.insert(s.mmsi, s.shiptype);
                Ok(None)
            }
            t => Err(AisError::UnsupportedMessageType(t)),
        }
    }

    /// Flush pending fragments and return the final counters.
    pub fn finish(&mut self) -> DecodeStats {
        self.assembler.finish();
        self.stats()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ais::{encode_payload, pack_position_report, pack_static_report, NmeaSentence, PositionReport};
    use proptest::prelude::*;

    fn position_line(mmsi: u32, ts: i64) -> String {
        let bits = pack_position_report(&PositionReport {
            message_type: 1,
            mmsi,
            sog: 123,
            lon: 4.5,
            lat: 52.25,
            cog: 87.5,
        });
        let (payload, fill) = encode_payload(&bits);
        format!("{},{ts}", NmeaSentence::new("AIVDM", 1, 1, None, Some('A'), &payload, fill))
    }

    #[test]
    fn tag_block_and_trailing_timestamps() {
        assert_eq!(
            split_line("\\c:1538000000*56\\!AIVDM,1,1,,A,0,0*00"),
            (Some(1538000000), "!AIVDM,1,1,,A,0,0*00")
        );
        // a tag block whose checksum fails, or is missing, yields no time
        assert_eq!(split_line("\\c:1538000000*55\\!AIVDM,1,1,,A,0,0*00").0, None);
        assert_eq!(split_line("\\c:1538000000\\!AIVDM,1,1,,A,0,0*00").0, None);
        assert_eq!(
            split_line("!AIVDM,1,1,,A,0,0*00,1538000000123"),
            (Some(1538000000), "!AIVDM,1,1,,A,0,0*00")
        );
        assert_eq!(split_line("!AIVDM,1,1,,A,0,0*00"), (None, "!AIVDM,1,1,,A,0,0*00"));
    }

    #[test]
    fn static_then_position() {
        let mut d = NmeaDecoder::default();
        let (payload, fill) = encode_payload(&pack_static_report(99, 70));
        // a 424 bit payload spans two fragments in practice
        let (a, b) = payload.split_at(60);
        assert!(d
            .push_line(&NmeaSentence::new("AIVDM", 2, 1, Some(1), Some('A'), a, 0).to_string())
            .is_none());
        assert!(d
            .push_line(&NmeaSentence::new("AIVDM", 2, 2, Some(1), Some('A'), b, fill).to_string())
            .is_none());
        let r = d.push_line(&position_line(99, 1000)).unwrap();
        assert_eq!(r.shiptype, Some(70));
        assert_eq!(r.timestamp, 1000);
        assert_eq!(r.sog, 123);
        let s = d.finish();
        assert_eq!(s.static_reports, 1);
        assert_eq!(s.records, 1);
        assert_eq!(s.assembly.assembled, 2);
    }

    #[test]
    fn counters_for_bad_lines() {
        let mut d = NmeaDecoder::default();
        d.push_line("$GPGGA,whatever*00");
        d.push_line("");
        let good = position_line(1, 5);
        let bad = good.replacen("*", "x*", 1);
        d.push_line(&bad);
        d.push_line(good.split(',').take(7).collect::<Vec<_>>().join(",").as_str());
        let s = d.finish();
        assert_eq!(s.non_ais, 1);
        assert_eq!(s.blank, 1);
        assert_eq!(s.checksum_errors, 1);
        assert_eq!(s.missing_timestamp, 1);
        assert_eq!(s.records, 0);
    }

    proptest! {
        #[test]
        fn fuzzed_input_never_yields_invalid_records(
            lines in proptest::collection::vec("[!\\\\A-Za-z0-9,*:`?<>=;@]{0,90}", 0..40),
            bytes in proptest::collection::vec(any::<u8>(), 0..300),
        ) {
            let mut d = NmeaDecoder::default();
            for l in &lines {
                if let Some(r) = d.push_line(l) {
                    prop_assert!(r.validate().is_ok());
                }
            }
            let text = String::from_utf8_lossy(&bytes);
            for l in text.lines() {
                if let Some(r) = d.push_line(l) {
                    prop_assert!(r.validate().is_ok());
                }
            }
        }

        #[test]
        fn random_payload_bits_never_yield_invalid_records(
            bits in proptest::collection::vec(any::<bool>(), 0..200),
            ty in 1u64..=3,
        ) {
            let mut b = crate::ais::BitBuffer::new();
            b.push_uint(ty, 6);
            b.extend(&crate::ais::BitBuffer::from_bits(bits));
            let (payload, fill) = encode_payload(&b);
            let line = format!("{},42", NmeaSentence::new("AIVDM", 1, 1, None, Some('B'), &payload, fill));
            let mut d = NmeaDecoder::default();
            if let Some(r) = d.push_line(&line) {
                prop_assert!(r.validate().is_ok());
            }
        }
    }
}
