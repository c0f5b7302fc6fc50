use super::AisError;

/// MSB-first bit string decoded from a 6-bit armored payload.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitBuffer {
    bits: Vec<bool>,
}

impl BitBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Unsigned field of `width` bits starting at `start`.
    pub fn uint(&self, start: usize, width: usize) -> Result<u64, AisError> {
        debug_assert!(width <= 64);
        let end = start + width;
        if end > self.bits.len() {
            return Err(AisError::TruncatedPayload {
                needed: end,
                got: self.bits.len(),
            });
        }
        Ok(self.bits[start..end]
            .iter()
            .fold(0u64, |acc, &b| (acc << 1) | u64::from(b)))
    }

    /// Two's-complement signed field of `width` bits starting at `start`.
    pub fn int(&self, start: usize, width: usize) -> Result<i64, AisError> {
        let raw = self.uint(start, width)?;
        let shift = 64 - width as u32;
        Ok(((raw << shift) as i64) >> shift)
    }

    /// Append the low `width` bits of `value`, MSB first.
    pub fn push_uint(&mut self, value: u64, width: usize) {
        for i in (0..width).rev() {
            self.bits.push(i < 64 && (value >> i) & 1 == 1);
        }
    }

    pub fn push_int(&mut self, value: i64, width: usize) {
        let mask = if width == 64 {
            u64::MAX
        } else {
            (1u64 << width) - 1
        };
        self.push_uint(value as u64 & mask, width);
    }

    pub fn extend(&mut self, other: &BitBuffer) {
        self.bits.extend_from_slice(&other.bits);
    }
}

fn armor_value(c: char) -> Result<u8, AisError> {
    let a = c as u32;
    if !(48..=87).contains(&a) && !(96..=119).contains(&a) {
        return Err(AisError::InvalidArmorCharacter(c));
    }
    let mut v = a - 48;
    if v > 40 {
        v -= 8;
    }
    Ok(v as u8)
}

fn armor_char(v: u8) -> char {
    debug_assert!(v < 64);
    if v < 40 {
        (v + 48) as char
    } else {
        (v + 56) as char
    }
}

/// Unpack a 6-bit armored payload into bits, dropping `fill_bits` trailing pad bits.
pub fn decode_payload(payload: &str, fill_bits: u8) -> Result<BitBuffer, AisError> {
    if fill_bits > 5 {
        return Err(AisError::InvalidFillBits(fill_bits.to_string()));
    }
    let mut out = BitBuffer {
        bits: Vec::with_capacity(payload.len() * 6),
    };
    for c in payload.chars() {
        out.push_uint(u64::from(armor_value(c)?), 6);
    }
    let fill = usize::from(fill_bits);
    if fill > out.bits.len() {
        return Err(AisError::InvalidFillBits(fill_bits.to_string()));
    }
    out.bits.truncate(out.bits.len() - fill);
    Ok(out)
}

/// Armor `bits` into payload characters, returning the payload and the fill count.
pub fn encode_payload(bits: &BitBuffer) -> (String, u8) {
    let fill = (6 - bits.len() % 6) % 6;
    let mut padded = bits.bits.clone();
    padded.extend(std::iter::repeat_n(false, fill));
    let payload = padded
        .chunks(6)
        .map(|c| armor_char(c.iter().fold(0u8, |acc, &b| (acc << 1) | u8::from(b))))
        .collect();
    (payload, fill as u8)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_char_is_zero_bits() {
        let b = decode_payload("0", 0).unwrap();
        assert_eq!(b.bits(), &[false; 6]);
    }

    #[test]
    fn w_is_all_ones() {
        // 'w' = 119 -> 71 -> 63
        let b = decode_payload("w", 0).unwrap();
        assert_eq!(b.uint(0, 6).unwrap(), 63);
        assert_eq!(b.bits(), &[true; 6]);
    }

    #[test]
    fn fill_bits_are_dropped() {
        let b = decode_payload("00", 2).unwrap();
        assert_eq!(b.len(), 10);
        assert!(b.bits().iter().all(|&x| !x));
    }

    #[test]
    fn armor_boundaries() {
        assert_eq!(armor_value('W').unwrap(), 39);
        assert_eq!(armor_value('`').unwrap(), 40);
        assert!(matches!(
            armor_value('X'),
            Err(AisError::InvalidArmorCharacter('X'))
        ));
        assert!(matches!(
            decode_payload("x", 0),
            Err(AisError::InvalidArmorCharacter('x'))
        ));
        assert!(matches!(
            decode_payload("0", 6),
            Err(AisError::InvalidFillBits(_))
        ));
    }

    #[test]
    fn signed_fields() {
        let mut b = BitBuffer::new();
        b.push_int(-5, 8);
        b.push_int(7, 4);
        assert_eq!(b.int(0, 8).unwrap(), -5);
        assert_eq!(b.int(8, 4).unwrap(), 7);
        assert!(matches!(
            b.uint(10, 4),
            Err(AisError::TruncatedPayload { needed: 14, got: 12 })
        ));
    }

    proptest! {
        #[test]
        fn armor_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..400)) {
            let buf = BitBuffer::from_bits(bits);
            let (payload, fill) = encode_payload(&buf);
            prop_assert_eq!(decode_payload(&payload, fill).unwrap(), buf);
        }
    }
}
