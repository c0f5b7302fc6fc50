//! AIS ingest: NMEA AIVDM decoding and the pre-decoded CSV record format.
//!
//! The CSV path is the canonical input. The AIVDM decoder is a front end that
//! produces the same [`AisRecord`]s from raw sentences.

mod assemble;
mod bits;
mod decoder;
mod message;
mod nmea;
mod record;

pub use assemble::{assemble_multipart, AssembledPayload, AssemblyStats, FragmentAssembler};
pub use bits::{decode_payload, encode_payload, BitBuffer};
pub use decoder::{split_line, DecodeStats, NmeaDecoder};
pub use message::{
    decode_position_report, decode_static_report, message_type, pack_position_report,
    pack_static_report, PositionReport, StaticReport,
};
pub use nmea::{checksum, parse_hex_checksum, parse_sentence, NmeaSentence};
pub use record::{
    group_tracks, read_records_csv, write_records_csv, AisRecord, ReadStats, RecordReader,
    VesselTrack, CSV_HEADER,
};

use std::fmt;

/// Default reassembly window, in sentences, for multipart messages.
pub const DEFAULT_FRAGMENT_WINDOW: u64 = 64;

/// Kinematic or identity field of a report, used in rejection reasons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Mmsi,
    Timestamp,
    Lat,
    Lon,
    Sog,
    Cog,
    ShipType,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Field::Mmsi => "mmsi",
            Field::Timestamp => "timestamp",
            Field::Lat => "lat",
            Field::Lon => "lon",
            Field::Sog => "sog",
            Field::Cog => "cog",
            Field::ShipType => "shiptype",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AisError {
    #[error("malformed sentence: {0}")]
    MalformedSentence(String),
    #[error("checksum mismatch: sentence says {expected:02X}, computed {computed:02X}")]
    ChecksumMismatch { expected: u8, computed: u8 },
    #[error("invalid fill bits {0}")]
    InvalidFillBits(String),
    #[error("invalid armor character {0:?}")]
    InvalidArmorCharacter(char),
    #[error("unsupported message type {0}")]
    UnsupportedMessageType(u8),
    #[error("payload truncated: need {needed} bits, have {got}")]
    TruncatedPayload { needed: usize, got: usize },
    #[error("{0} carries the 'not available' sentinel")]
    SentinelValue(Field),
    #[error("{0} out of range")]
    InvalidValue(Field),
    #[error("CSV header mismatch: expected `{expected}`, found `{found}`")]
    HeaderMismatch { expected: String, found: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl AisError {
    pub fn is_io(&self) -> bool {
        matches!(self, AisError::Io { .. })
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        AisError::Io {
            path: path.into(),
            source,
        }
    }
}
