//! MSB-first bit streams.

use crate::{EntropyError, Result};

/// Destination of bits.  Every sink counts what it receives.
pub trait BitWrite {
    fn put_bit(&mut self, bit: bool);

    /// Writes the low `n` bits of `v`, most significant first.
    fn put_bits(&mut self, v: u64, n: u32) {
        for i in (0..n).rev() {
            self.put_bit(v >> i & 1 == 1);
        }
    }

    /// Bits written so far.
    fn written(&self) -> u64;
}

/// Sink that only counts.
#[derive(Debug, Default, Clone)]
pub struct BitCounter {
    n: u64,
}

impl BitCounter {
    pub fn new() -> Self {
        Self::default()
    }
}

impl BitWrite for BitCounter {
    #[inline]
    fn put_bit(&mut self, _bit: bool) {
        self.n += 1;
    }
    #[inline]
    fn put_bits(&mut self, _v: u64, n: u32) {
        self.n += n as u64;
    }
    fn written(&self) -> u64 {
        self.n
    }
}

/// Sink that stores bits into bytes; the last byte is zero-padded.
#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    bytes: Vec<u8>,
    n: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Pads with zero bits up to the next byte boundary.
    pub fn align(&mut self) {
        while !self.n.is_multiple_of(8) {
            self.put_bit(false);
        }
    }
}

impl BitWrite for BitWriter {
    #[inline]
    fn put_bit(&mut self, bit: bool) {
        let off = (self.n % 8) as u8;
        if off == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().expect("byte allocated") |= 0x80 >> off;
        }
        self.n += 1;
    }
    fn written(&self) -> u64 {
        self.n
    }
}

/// Reader over an MSB-first byte buffer.
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        BitReader { bytes, pos: 0 }
    }

    #[inline]
    pub fn read_bit(&mut self) -> Result<bool> {
        let byte = (self.pos / 8) as usize;
        let b = *self.bytes.get(byte).ok_or(EntropyError::UnexpectedEnd)?;
        let bit = b >> (7 - self.pos % 8) & 1 == 1;
        self.pos += 1;
        Ok(bit)
    }

    pub fn read_bits(&mut self, n: u32) -> Result<u64> {
        let mut v = 0u64;
        for _ in 0..n {
            v = v << 1 | self.read_bit()? as u64;
        }
        Ok(v)
    }

    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn align(&mut self) {
        self.pos = self.pos.div_ceil(8) * 8;
    }

    pub fn remaining(&self) -> u64 {
        (self.bytes.len() as u64 * 8).saturating_sub(self.pos)
    }
}
