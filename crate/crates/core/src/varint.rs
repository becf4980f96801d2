//! Unsigned LEB128 variable-length integers.
//!
//! Seven payload bits per byte, least significant group first; the high bit
//! marks a continuation byte. Values below 128 take a single byte.

use std::io::{self, Read};

use thiserror::Error;

/// Longest encoding of a `u64`.
pub const MAX_LEN: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum VarintError {
    #[error("input ended inside a varint")]
    Truncated,
    #[error("varint does not fit in 64 bits")]
    Overflow,
}

pub fn write_u64(out: &mut Vec<u8>, mut value: u64) {
    while value >= 0x80 {
        out.push((value as u8 & 0x7f) | 0x80);
        value >>= 7;
    }
    out.push(value as u8);
}

pub fn encoded_len(value: u64) -> usize {
    let bits = 64 - value.leading_zeros() as usize;
    bits.max(1).div_ceil(7)
}

/// Reads one varint from the front of `buf`, advancing it.
pub fn read_u64(buf: &mut &[u8]) -> Result<u64, VarintError> {
    let mut result = 0u64;
    for (i, &byte) in buf.iter().enumerate() {
        if i == MAX_LEN - 1 && byte > 0x01 {
            return Err(VarintError::Overflow);
        }
        result |= u64::from(byte & 0x7f) << (7 * i);
        if byte & 0x80 == 0 {
            *buf = &buf[i + 1..];
            return Ok(result);
        }
    }
    Err(if buf.len() >= MAX_LEN {
        VarintError::Overflow
    } else {
        VarintError::Truncated
    })
}

/// Streaming variant of [`read_u64`]. `Ok(None)` means the reader was at a
/// clean end of input before the first byte.
pub fn read_u64_from<R: Read>(reader: &mut R) -> io::Result<Option<u64>> {
    let mut result = 0u64;
    let mut byte = [0u8; 1];
    for i in 0..MAX_LEN {
        if reader.read(&mut byte)? == 0 {
            if i == 0 {
                return Ok(None);
            }
            return Err(io::Error::new(io::ErrorKind::UnexpectedEof, VarintError::Truncated));
        }
        if i == MAX_LEN - 1 && byte[0] > 0x01 {
            return Err(io::Error::new(io::ErrorKind::InvalidData, VarintError::Overflow));
        }
        result |= u64::from(byte[0] & 0x7f) << (7 * i);
        if byte[0] & 0x80 == 0 {
            return Ok(Some(result));
        }
    }
    Err(io::Error::new(io::ErrorKind::InvalidData, VarintError::Overflow))
}
