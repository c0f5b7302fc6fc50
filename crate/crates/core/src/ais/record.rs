use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AisError, Field};

/// Required header of the record CSV, in this exact order.
pub const CSV_HEADER: [&str; 7] = ["mmsi", "timestamp", "lat", "lon", "sog", "cog", "shiptype"];

/// One validated position sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AisRecord {
    pub mmsi: u32,
    /// Seconds since the Unix epoch, UTC.
    pub timestamp: i64,
    pub lat: f64,
    pub lon: f64,
    /// Speed over ground in tenths of a knot, 0..=1022.
    pub sog: u16,
    /// Course over ground in degrees, [0, 360).
    pub cog: f64,
    /// Type-of-ship code 0..=99, `None` when unknown.
    pub shiptype: Option<u8>,
}

impl AisRecord {
    /// Construct a record, rejecting sentinels and out-of-range values.
    pub fn new(
        mmsi: u32,
        timestamp: i64,
        lat: f64,
        lon: f64,
        sog: u16,
        cog: f64,
        shiptype: Option<u8>,
    ) -> Result<Self, AisError> {
        let r = AisRecord {
            mmsi,
            timestamp,
            lat,
            lon,
            sog,
            cog,
            shiptype,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<(), AisError> {
        if self.mmsi >= 1 << 30 {
            return Err(AisError::InvalidValue(Field::Mmsi));
        }
        if self.sog == 1023 {
            return Err(AisError::SentinelValue(Field::Sog));
        }
        if self.sog > 1022 {
            return Err(AisError::InvalidValue(Field::Sog));
        }
        if self.cog == 360.0 {
            return Err(AisError::SentinelValue(Field::Cog));
        }
        if !(0.0..360.0).contains(&self.cog) {
            return Err(AisError::InvalidValue(Field::Cog));
        }
        if self.lat == 91.0 {
            return Err(AisError::SentinelValue(Field::Lat));
        }
        if !(-90.0..=90.0).contains(&self.lat) {
            return Err(AisError::InvalidValue(Field::Lat));
        }
        if self.lon == 181.0 {
            return Err(AisError::SentinelValue(Field::Lon));
        }
        if !(-180.0..=180.0).contains(&self.lon) {
            return Err(AisError::InvalidValue(Field::Lon));
        }
        if matches!(self.shiptype, Some(t) if t > 99) {
            return Err(AisError::InvalidValue(Field::ShipType));
        }
        Ok(())
    }
}

/// All samples of one vessel, time-sorted with duplicate timestamps removed.
#[derive(Clone, Debug, PartialEq)]
pub struct VesselTrack {
    pub mmsi: u32,
    pub records: Vec<AisRecord>,
    /// Majority static type over the track's known codes.
    pub shiptype: Option<u8>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadStats {
    pub rows: u64,
    /// Rows that parsed but broke a record invariant (sentinels, ranges).
    pub skipped_invalid: u64,
    /// Rows that did not parse.
    pub skipped_malformed: u64,
}

/// Streaming reader over the record CSV.
pub struct RecordReader<R: Read> {
    inner: csv::Reader<R>,
    row: csv::StringRecord,
    stats: ReadStats,
    source: String,
}

impl RecordReader<File> {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, AisError> {
        let path = path.as_ref();
        let f = File::open(path).map_err(|e| AisError::io(path.display().to_string(), e))?;
        Self::with_source(f, path.display().to_string())
    }
}

impl<R: Read> RecordReader<R> {
    pub fn from_reader(reader: R) -> Result<Self, AisError> {
        Self::with_source(reader, "<stream>".to_string())
    }

    fn with_source(reader: R, source: String) -> Result<Self, AisError> {
        let mut inner = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = inner.headers().map_err(|e| csv_error(&source, e))?.clone();
        let found: Vec<&str> = header.iter().collect();
        if found != CSV_HEADER {
            return Err(AisError::HeaderMismatch {
                expected: CSV_HEADER.join(","),
                found: found.join(","),
            });
        }
        Ok(Self {
            inner,
            row: csv::StringRecord::new(),
            stats: ReadStats::default(),
            source,
        })
    }

    pub fn stats(&self) -> ReadStats {
        self.stats
    }
}

fn csv_error(source: &str, e: csv::Error) -> AisError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => AisError::io(source, io),
        other => AisError::io(
            source,
            std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{other:?}")),
        ),
    }
}

enum RowOutcome {
    Ok(AisRecord),
    Malformed,
    Invalid,
}

fn parse_row(row: &csv::StringRecord) -> RowOutcome {
    if row.len() != CSV_HEADER.len() {
        return RowOutcome::Malformed;
    }
    let parsed = (|| {
        let mmsi: u32 = row[0].parse().ok()?;
        let timestamp: i64 = row[1].parse().ok()?;
        let lat: f64 = row[2].parse().ok()?;
        let lon: f64 = row[3].parse().ok()?;
        let sog: u16 = row[4].parse().ok()?;
        let cog: f64 = row[5].parse().ok()?;
        let shiptype = match &row[6] {
            "" => None,
            s => Some(s.parse::<u8>().ok()?),
        };
        Some((mmsi, timestamp, lat, lon, sog, cog, shiptype))
    })();
    match parsed {
        None => RowOutcome::Malformed,
        Some((mmsi, ts, lat, lon, sog, cog, st)) => match AisRecord::new(mmsi, ts, lat, lon, sog, cog, st) {
            Ok(r) => RowOutcome::Ok(r),
            Err(_) => RowOutcome::Invalid,
        },
    }
}

impl<R: Read> Iterator for RecordReader<R> {
    type Item = Result<AisRecord, AisError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            match self.inner.read_record(&mut self.row) {
                Ok(false) => return None,
                Ok(true) => {}
                Err(e) => {
                    if matches!(e.kind(), csv::ErrorKind::Io(_)) {
                        return Some(Err(csv_error(&self.source, e)));
                    }
                    self.stats.rows += 1;
                    self.stats.skipped_malformed += 1;
                    continue;
                }
            }
            self.stats.rows += 1;
            match parse_row(&self.row) {
                RowOutcome::Ok(r) => return Some(Ok(r)),
                RowOutcome::Malformed => self.stats.skipped_malformed += 1,
                RowOutcome::Invalid => self.stats.skipped_invalid += 1,
            }
        }
    }
}

/// Read every valid record of a CSV file.
pub fn read_records_csv(path: impl AsRef<Path>) -> Result<(Vec<AisRecord>, ReadStats), AisError> {
    let mut reader = RecordReader::open(path)?;
    let records = reader.by_ref().collect::<Result<Vec<_>, _>>()?;
    Ok((records, reader.stats()))
}

/// Write records in the canonical CSV schema.
pub fn write_records_csv<'a, W, I>(writer: W, records: I) -> std::io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a AisRecord>,
{
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for r in records {
        let st = r.shiptype.map(|s| s.to_string()).unwrap_or_default();
        w.write_record([
            r.mmsi.to_string(),
            r.timestamp.to_string(),
            r.lat.to_string(),
            r.lon.to_string(),
            r.sog.to_string(),
            r.cog.to_string(),
            st,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Partition records by MMSI (ascending), time-sort each vessel, drop repeated
/// timestamps (first occurrence wins) and resolve the vessel's ship type.
pub fn group_tracks<I>(records: I) -> Vec<VesselTrack>
where
    I: IntoIterator<Item = AisRecord>,
{
    let mut by_mmsi: BTreeMap<u32, Vec<AisRecord>> = BTreeMap::new();
    for r in records {
        by_mmsi.entry(r.mmsi).or_default().push(r);
    }
    by_mmsi
        .into_iter()
        .map(|(mmsi, mut recs)| {
            // stable: equal timestamps keep input order
            recs.sort_by_key(|r| r.timestamp);
            recs.dedup_by_key(|r| r.timestamp);
            let shiptype = resolve_shiptype(&recs);
            VesselTrack {
                mmsi,
                records: recs,
                shiptype,
            }
        })
        .collect()
}

/// Most frequent known code; ties go to the code reported most recently.
/// Code 0 means "not available" and does not vote.
fn resolve_shiptype(recs: &[AisRecord]) -> Option<u8> {
    // code -> (count, position of latest report)
    let mut votes: BTreeMap<u8, (usize, usize)> = BTreeMap::new();
    for (i, r) in recs.iter().enumerate() {
        if let Some(code) = r.shiptype.filter(|&c| c != 0) {
            let e = votes.entry(code).or_insert((0, 0));
            e.0 += 1;
            e.1 = i;
        }
    }
    votes
        .into_iter()
        .max_by_key(|&(_, (count, latest))| (count, latest))
        .map(|(code, _)| code)
}
