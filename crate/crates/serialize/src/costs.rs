//! Rate and idealised patch cost of a rate-distortion state.
//!
//! The rate is measured by counting the bits of a simulated serialization; the patch is
//! priced in an idealised domain: one indicator bit per letter plus, for every differing
//! letter, the first-order entropy of the letter differences.

use std::collections::BTreeMap;

use parselet_core::{Dictionary, StringData, ALPHABET};
use parselet_deflate::expand;
use parselet_entropy::BitCounter;

use crate::flush::flush;
use crate::model::{write_model, Layout, ModelBits};
use crate::patch::build_patch;
use crate::sink::{Coded, Part, Sink};
use crate::stream::{write_string, TopBits};
use crate::{Result, SerializeError};

#[derive(Debug, Clone, PartialEq)]
pub struct Costs {
    /// Model bits (regular and flushed).
    pub model: ModelBits,
    /// Bits of the string data given the model.
    pub string_bits: u64,
    /// Idealised patch cost in bits.
    pub ideal_patch: f64,
    /// Letters that differ from the original.
    pub n_diffs: u64,
    /// Counts of `lossy - lossless` over differing letters.
    pub histogram: BTreeMap<i32, u64>,
    /// Letters in the expansion.
    pub len: u64,
}

impl Costs {
    /// Rate: model plus string data.
    pub fn rate(&self) -> u64 {
        self.model.total() + self.string_bits
    }

    /// Rate plus idealised patch.
    pub fn codelength(&self) -> f64 {
        self.rate() as f64 + self.ideal_patch
    }
}

/// Idealised patch cost from a difference histogram over `len` letters.
pub fn ideal_patch(histogram: &BTreeMap<i32, u64>, len: u64) -> f64 {
    if len == 0 {
        return 0.0;
    }
    let n_diffs: u64 = histogram.values().sum();
    let h: f64 = histogram
        .values()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let f = c as f64 / len as f64;
            -f * f.log2()
        })
        .sum();
    len as f64 + n_diffs as f64 * h
}

/// Evaluates the costs of describing `lossless` with `(d, x)`.
pub fn write_costs(d: &Dictionary, x: &StringData, lossless: &[u8]) -> Result<Costs> {
    let lossy = expand(x, d)?.letters;
    if lossy.len() != lossless.len() {
        return Err(SerializeError::LengthMismatch { lossy: lossy.len(), lossless: lossless.len() });
    }
    let mut histogram = BTreeMap::new();
    for (&a, &b) in lossy.iter().zip(lossless) {
        if a != b {
            *histogram.entry(a as i32 - b as i32).or_insert(0) += 1;
        }
    }
    let n_diffs = histogram.values().sum();
    let (model, string_bits) = rate_bits(d, x)?;
    Ok(Costs {
        model,
        string_bits,
        ideal_patch: ideal_patch(&histogram, lossy.len() as u64),
        n_diffs,
        histogram,
        len: lossy.len() as u64,
    })
}

/// Bits of the model alone, written in canonical order without any string.  The empty
/// model costs nothing.
pub fn model_bits(d: &Dictionary) -> u64 {
    let eos = ALPHABET + d.len() as u32;
    let mut sink = Coded::new(BitCounter::new(), eos + 1);
    write_model(&mut sink, d, |s, p| s.bits(p)).1.total()
}

/// Model and string bits of `(d, x)` as they would be written for a single string.
pub fn rate_bits(d: &Dictionary, x: &StringData) -> Result<(ModelBits, u64)> {
    let mut fd = d.clone();
    let mut xs = [x.clone()];
    flush(&mut fd, &mut xs);
    let eos = ALPHABET + fd.len() as u32;
    let mut sink = Coded::new(BitCounter::new(), eos + 1);
    let (layout, model): (Layout, ModelBits) = write_model(&mut sink, &fd, |s, p| s.bits(p));
    sink.reset(eos + 1);
    write_string(&mut sink, &xs[0], &fd, &layout, None, TopBits::Omit, 0, eos)?;
    Ok((model, sink.bits(Part::String)))
}

/// Bits the patch of `(d, x)` against `lossless` takes on disk, top-level runs included
/// except the first.
pub fn patch_bits(d: &Dictionary, x: &StringData, lossless: &[u8]) -> Result<u64> {
    let mut fd = d.clone();
    let mut xs = [x.clone()];
    flush(&mut fd, &mut xs);
    let patch = build_patch(&xs[0], &fd, lossless)?;
    let eos = ALPHABET + fd.len() as u32;
    let layout = Layout::new(&fd);
    let mut sink = Coded::new(BitCounter::new(), eos + 1);
    write_string(&mut sink, &xs[0], &fd, &layout, Some(&patch), TopBits::Runs, patch.min_delta(), eos)?;
    Ok(sink.bits(Part::Patch))
}
