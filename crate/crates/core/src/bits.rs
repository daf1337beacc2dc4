//! Bit-vector helpers shared across the crate.
//!
//! Bit vectors are plain `Vec<bool>` / `&[bool]` in APIs. For serialization
//! they are hex-encoded most-significant-bit first: bit 0 of the vector is
//! the high bit of the first hex digit. When the length is not a multiple of
//! four, the low bits of the final digit are zero padding.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BitsError {
    #[error("hex string has {got} digits but {expected} are required for {len} bits")]
    HexLength { len: usize, expected: usize, got: usize },
    #[error("invalid hex digit {0:?}")]
    InvalidHexDigit(char),
    #[error("padding bits beyond the declared length must be zero")]
    NonZeroPadding,
    #[error("bit vectors have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
}

/// Hex-encodes a bit vector, MSB first.
pub fn bits_to_hex(bits: &[bool]) -> String {
    let mut out = String::with_capacity(bits.len().div_ceil(4));
    for chunk in bits.chunks(4) {
        let mut nibble = 0u8;
        for (i, &b) in chunk.iter().enumerate() {
            if b {
                nibble |= 1 << (3 - i);
            }
        }
        out.push(char::from_digit(u32::from(nibble), 16).expect("nibble < 16"));
    }
    out
}

/// Decodes a hex string into exactly `len` bits (MSB first).
///
/// The string must have `ceil(len / 4)` digits and any padding bits in the
/// final digit must be zero.
pub fn hex_to_bits(hex: &str, len: usize) -> Result<Vec<bool>, BitsError> {
    let expected = len.div_ceil(4);
    let digits: Vec<char> = hex.chars().collect();
    if digits.len() != expected {
        return Err(BitsError::HexLength { len, expected, got: digits.len() });
    }
    let mut bits = Vec::with_capacity(expected * 4);
    for c in digits {
        let nibble = c.to_digit(16).ok_or(BitsError::InvalidHexDigit(c))? as u8;
        for i in 0..4 {
            bits.push(nibble & (1 << (3 - i)) != 0);
        }
    }
    if bits[len..].iter().any(|&b| b) {
        return Err(BitsError::NonZeroPadding);
    }
    bits.truncate(len);
    Ok(bits)
}

pub fn hamming_weight(bits: &[bool]) -> u64 {
    bits.iter().filter(|&&b| b).count() as u64
}

pub fn hamming_distance(a: &[bool], b: &[bool]) -> Result<u64, BitsError> {
    if a.len() != b.len() {
        return Err(BitsError::LengthMismatch(a.len(), b.len()));
    }
    Ok(a.iter().zip(b).filter(|(x, y)| x != y).count() as u64)
}

/// Hamming distance divided by length; errors on length mismatch or empty input.
pub fn relative_distance(a: &[bool], b: &[bool]) -> Result<f64, BitsError> {
    if a.is_empty() {
        return Err(BitsError::LengthMismatch(a.len(), b.len()));
    }
    Ok(hamming_distance(a, b)? as f64 / a.len() as f64)
}

pub fn xor(a: &[bool], b: &[bool]) -> Result<Vec<bool>, BitsError> {
    if a.len() != b.len() {
        return Err(BitsError::LengthMismatch(a.len(), b.len()));
    }
    Ok(a.iter().zip(b).map(|(x, y)| x ^ y).collect())
}

/// Bit vector with a `{len, hex}` JSON form (hex is MSB-first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitString(pub Vec<bool>);

impl BitString {
    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        BitString(bits)
    }
}

impl std::ops::Deref for BitString {
    type Target = [bool];

    fn deref(&self) -> &[bool] {
        &self.0
    }
}

#[derive(Serialize, Deserialize)]
struct BitStringRepr {
    len: usize,
    hex: String,
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        BitStringRepr { len: self.0.len(), hex: bits_to_hex(&self.0) }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = BitStringRepr::deserialize(deserializer)?;
        hex_to_bits(&repr.hex, repr.len).map(BitString).map_err(D::Error::custom)
    }
}
