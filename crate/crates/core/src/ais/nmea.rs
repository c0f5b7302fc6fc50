use std::fmt;

use super::AisError;

/// One NMEA 0183 encapsulation sentence (`!AIVDM` / `!AIVDO`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NmeaSentence {
    /// Talker and sentence formatter, e.g. `AIVDM`.
    pub tag: String,
    pub fragment_count: u8,
    pub fragment_index: u8,
    pub message_id: Option<u8>,
    pub channel: Option<char>,
    pub payload: String,
    pub fill_bits: u8,
    pub checksum: u8,
}

impl NmeaSentence {
    /// Build a sentence and compute its checksum.
    pub fn new(
        tag: &str,
        fragment_count: u8,
        fragment_index: u8,
        message_id: Option<u8>,
        channel: Option<char>,
        payload: &str,
        fill_bits: u8,
    ) -> Self {
        let mut s = NmeaSentence {
            tag: tag.to_string(),
            fragment_count,
            fragment_index,
            message_id,
            channel,
            payload: payload.to_string(),
            fill_bits,
            checksum: 0,
        };
        s.checksum = checksum(&s.body());
        s
    }

    /// The text between `!` and `*`.
    pub fn body(&self) -> String {
        let id = self.message_id.map(|m| m.to_string()).unwrap_or_default();
        let ch = self.channel.map(String::from).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            self.tag, self.fragment_count, self.fragment_index, id, ch, self.payload, self.fill_bits
        )
    }

    pub fn is_own_ship(&self) -> bool {
        self.tag.ends_with("VDO")
    }
}

impl fmt::Display for NmeaSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "!{}*{:02X}", self.body(), self.checksum)
    }
}

/// XOR of every byte of `body`.
pub fn checksum(body: &str) -> u8 {
    body.bytes().fold(0, |acc, b| acc ^ b)
}

fn malformed(msg: impl Into<String>) -> AisError {
    AisError::MalformedSentence(msg.into())
}

/// Parse and checksum-verify a single sentence.
/// Two uppercase hex digits. Lowercase is refused so that every single-bit
/// change to a sentence is detectable.
pub fn parse_hex_checksum(s: &str) -> Option<u8> {
    let b = s.as_bytes();
    if b.len() != 2 || !b.iter().all(|c| matches!(c, b'0'..=b'9' | b'A'..=b'F')) {
        return None;
    }
    u8::from_str_radix(s, 16).ok()
}

pub fn parse_sentence(line: &str) -> Result<NmeaSentence, AisError> {
    let line = line.trim();
    let rest = line
        .strip_prefix('!')
        .ok_or_else(|| malformed("missing leading '!'"))?;
    let (body, sum) = rest
        .split_once('*')
        .ok_or_else(|| malformed("missing '*' checksum delimiter"))?;
    let expected = parse_hex_checksum(sum)
        .ok_or_else(|| malformed(format!("checksum field `{sum}` is not two uppercase hex digits")))?;
    let computed = checksum(body);
    if expected != computed {
        return Err(AisError::ChecksumMismatch { expected, computed });
    }

    let fields: Vec<&str> = body.split(',').collect();
    if fields.len() != 7 {
        return Err(malformed(format!("expected 7 fields, found {}", fields.len())));
    }
    let tag = fields[0];
    if tag.is_empty() || !tag.chars().all(|c| c.is_ascii_alphanumeric()) {
        return Err(malformed(format!("bad tag `{tag}`")));
    }
    let fragment_count: u8 = fields[1]
        .parse()
        .map_err(|_| malformed(format!("bad fragment count `{}`", fields[1])))?;
    let fragment_index: u8 = fields[2]
        .parse()
        .map_err(|_| malformed(format!("bad fragment index `{}`", fields[2])))?;
    if fragment_count == 0 || fragment_index == 0 || fragment_index > fragment_count {
        return Err(malformed(format!(
            "fragment {fragment_index} of {fragment_count}"
        )));
    }
    let message_id = match fields[3] {
        "" => None,
        s => Some(
            s.parse()
                .map_err(|_| malformed(format!("bad message id `{s}`")))?,
        ),
    };
    let mut ch = fields[4].chars();
    let channel = match (ch.next(), ch.next()) {
        (None, _) => None,
        (Some(c), None) => Some(c),
        _ => return Err(malformed(format!("bad channel `{}`", fields[4]))),
    };
    let fill_bits = match fields[6].parse::<u8>() {
        Ok(f) if f <= 5 => f,
        _ => return Err(AisError::InvalidFillBits(fields[6].to_string())),
    };
    Ok(NmeaSentence {
        tag: tag.to_string(),
        fragment_count,
        fragment_index,
        message_id,
        channel,
        payload: fields[5].to_string(),
        fill_bits,
        checksum: expected,
    })
}
