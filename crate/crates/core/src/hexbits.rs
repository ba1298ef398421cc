//! Hex encoding of bit strings.
//!
//! A bit string of length `len` is read as an integer whose bit `j` is entry
//! `j`; the hex text is that integer, most significant digit first, padded
//! to `ceil(len / 4)` digits. Strings shorter than four bits still occupy one
//! digit.

use crate::{Error, Result};

/// Number of hex digits used for `len` bits.
pub fn digits_for(len: usize) -> usize {
    len.div_ceil(4).max(1)
}

/// Encode `len` bits stored little-endian in 64-bit words.
pub fn encode_words(words: &[u64], len: usize) -> String {
    let digits = digits_for(len);
    let mut out = String::with_capacity(digits);
    for d in (0..digits).rev() {
        let bit = d * 4;
        let word = words.get(bit / 64).copied().unwrap_or(0);
        let mut nibble = (word >> (bit % 64)) & 0xf;
        if len < bit + 4 {
            let keep = len.saturating_sub(bit);
            nibble &= (1u64 << keep) - 1;
        }
        out.push(char::from_digit(nibble as u32, 16).unwrap().to_ascii_uppercase());
    }
    out
}

/// Decode a hex string into `len` bits packed in 64-bit words.
///
/// Rejects strings of the wrong length and strings that set bits at or above
/// `len`.
pub fn decode_words(text: &str, len: usize) -> Result<Vec<u64>> {
    let text = text.trim();
    let text = text.strip_prefix("0x").unwrap_or(text);
    let digits = digits_for(len);
    if text.len() != digits {
        return Err(Error::Parse(format!(
            "expected {digits} hex digits for {len} bits, got {}",
            text.len()
        )));
    }
    let mut words = vec![0u64; len.div_ceil(64).max(1)];
    for (pos, ch) in text.chars().rev().enumerate() {
        let nibble = ch
            .to_digit(16)
            .ok_or_else(|| Error::Parse(format!("invalid hex digit {ch:?}")))? as u64;
        let bit = pos * 4;
        if bit + 4 > len && nibble >> len.saturating_sub(bit).min(4) != 0 {
            return Err(Error::Parse(format!("bits set beyond length {len}")));
        }
        words[bit / 64] |= nibble << (bit % 64);
    }
    Ok(words)
}

pub fn encode_bools(bits: &[bool]) -> String {
    let mut words = vec![0u64; bits.len().div_ceil(64).max(1)];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            words[i / 64] |= 1 << (i % 64);
        }
    }
    encode_words(&words, bits.len())
}

pub fn decode_bools(text: &str, len: usize) -> Result<Vec<bool>> {
    let words = decode_words(text, len)?;
    Ok((0..len).map(|i| words[i / 64] >> (i % 64) & 1 == 1).collect())
}
