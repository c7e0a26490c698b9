//! Symbol-level coders shared by model, string and patch serialization.
//!
//! Two adaptive Huffman coders run side by side: one for integers (29-bit escape
//! literals) and one for parselet references (escape width sized to the id bound).
//! Bits are written raw and constants use the omega code.

use crate::bits::{BitReader, BitWrite};
use crate::omega::{read_omega, write_omega};
use crate::vitter::Vitter;
use crate::Result;

/// Escape width for integers: every value storable in a string slot fits.
pub const INT_WIDTH: u32 = 29;

/// Escape width for references with ids in `0..bound`.
pub fn ref_width(bound: u32) -> u32 {
    (32 - bound.saturating_sub(1).leading_zeros()).max(1)
}

pub struct Encoder<W: BitWrite> {
    out: W,
    ints: Vitter,
    refs: Vitter,
}

impl<W: BitWrite> Encoder<W> {
    pub fn new(out: W, ref_bound: u32) -> Self {
        Encoder { out, ints: Vitter::new(INT_WIDTH), refs: Vitter::new(ref_width(ref_bound)) }
    }

    /// Resets both adaptive coders, e.g. at a string boundary.
    pub fn reset(&mut self, ref_bound: u32) {
        self.ints.reset();
        if self.refs.width() == ref_width(ref_bound) {
            self.refs.reset();
        } else {
            self.refs = Vitter::new(ref_width(ref_bound));
        }
    }

    pub fn write_int(&mut self, v: u32) {
        self.ints.encode(v, &mut self.out);
    }

    pub fn write_ref(&mut self, id: u32) {
        self.refs.encode(id, &mut self.out);
    }

    pub fn write_bit(&mut self, b: bool) {
        self.out.put_bit(b);
    }

    pub fn write_const(&mut self, n: u64) {
        write_omega(&mut self.out, n);
    }

    pub fn written(&self) -> u64 {
        self.out.written()
    }

    pub fn sink(&mut self) -> &mut W {
        &mut self.out
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

pub struct Decoder<'a> {
    input: BitReader<'a>,
    ints: Vitter,
    refs: Vitter,
}

impl<'a> Decoder<'a> {
    pub fn new(input: BitReader<'a>, ref_bound: u32) -> Self {
        Decoder { input, ints: Vitter::new(INT_WIDTH), refs: Vitter::new(ref_width(ref_bound)) }
    }

    pub fn reset(&mut self, ref_bound: u32) {
        self.ints.reset();
        if self.refs.width() == ref_width(ref_bound) {
            self.refs.reset();
        } else {
            self.refs = Vitter::new(ref_width(ref_bound));
        }
    }

    pub fn read_int(&mut self) -> Result<u32> {
        self.ints.decode(&mut self.input)
    }

    pub fn read_ref(&mut self) -> Result<u32> {
        self.refs.decode(&mut self.input)
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        self.input.read_bit()
    }

    pub fn read_const(&mut self) -> Result<u64> {
        read_omega(&mut self.input)
    }

    pub fn reader(&mut self) -> &mut BitReader<'a> {
        &mut self.input
    }

    pub fn position(&self) -> u64 {
        self.input.position()
    }
}
