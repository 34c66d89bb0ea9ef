//! LSB-first bit packing shared by the ring encoding and the wire codec.

use crate::error::{Error, Result};

#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    bytes: Vec<u8>,
    bits: usize,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends the low `width` bits of `value`, least significant bit first.
    pub fn write(&mut self, value: u64, width: usize) {
        debug_assert!(width <= 64);
        debug_assert!(width == 64 || value >> width == 0, "value wider than field");
        for i in 0..width {
            let bit = ((value >> i) & 1) as u8;
            let offset = self.bits % 8;
            if offset == 0 {
                self.bytes.push(0);
            }
            *self.bytes.last_mut().expect("byte pushed above") |= bit << offset;
            self.bits += 1;
        }
    }

    /// Number of payload bits written so far (before padding).
    pub fn bit_len(&self) -> usize {
        self.bits
    }

    pub fn finish(self) -> Vec<u8> {
        self.bytes
    }
}

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    pub fn read(&mut self, width: usize) -> Result<u64> {
        if self.pos + width > self.bytes.len() * 8 {
            return Err(Error::EncodedLengthMismatch {
                expected: (self.pos + width).div_ceil(8),
                actual: self.bytes.len(),
            });
        }
        let mut value = 0u64;
        for i in 0..width {
            let p = self.pos + i;
            let bit = (self.bytes[p / 8] >> (p % 8)) & 1;
            value |= (bit as u64) << i;
        }
        self.pos += width;
        Ok(value)
    }

    pub fn bit_pos(&self) -> usize {
        self.pos
    }

    /// Requires that everything after the current position is zero padding
    /// inside the final byte, with no extra bytes.
    pub fn finish(self) -> Result<()> {
        let expected = self.pos.div_ceil(8);
        if self.bytes.len() != expected {
            return Err(Error::EncodedLengthMismatch {
                expected,
                actual: self.bytes.len(),
            });
        }
        for p in self.pos..expected * 8 {
            if (self.bytes[p / 8] >> (p % 8)) & 1 != 0 {
                return Err(Error::CoefficientOutOfRange("non-zero padding bits".into()));
            }
        }
        Ok(())
    }
}
