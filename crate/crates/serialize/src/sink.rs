//! Symbol sinks with per-part bit accounting.
//!
//! Every symbol is tagged with the part of the three-part code it belongs to, so a single
//! pass yields the model, string and patch sizes separately.

use parselet_entropy::{BitWrite, Encoder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Part {
    /// Regular model entries.
    Model,
    /// Flushed operator entries.
    Flushed,
    /// Rate of the string data: references, operator parameters, selector bits.
    String,
    /// Patch: diff bits, letter differences and zero-run lengths.
    Patch,
    /// Container framing and the discarded first zero run; never accounted.
    Framing,
}

pub const PARTS: usize = 5;

impl Part {
    fn index(self) -> usize {
        self as usize
    }
}

pub trait Sink {
    fn int(&mut self, v: u32, part: Part);
    fn reference(&mut self, id: u32, part: Part);
    fn bit(&mut self, b: bool, part: Part);
    fn constant(&mut self, n: u64, part: Part);
    /// Letter difference coded as an offset from the string's minimum.
    fn delta(&mut self, d: i32, min: i32) {
        self.int((d - min) as u32, Part::Patch);
    }
    /// Resets adaptive coders (string boundary).
    fn reset(&mut self, ref_bound: u32);
}

/// Entropy-coding sink that tallies bits per part.
pub struct Coded<W: BitWrite> {
    enc: Encoder<W>,
    bits: [u64; PARTS],
}

impl<W: BitWrite> Coded<W> {
    pub fn new(out: W, ref_bound: u32) -> Self {
        Coded { enc: Encoder::new(out, ref_bound), bits: [0; PARTS] }
    }

    #[inline]
    fn account(&mut self, part: Part, before: u64) {
        self.bits[part.index()] += self.enc.written() - before;
    }

    pub fn bits(&self, part: Part) -> u64 {
        self.bits[part.index()]
    }

    pub fn tallies(&self) -> [u64; PARTS] {
        self.bits
    }

    pub fn written(&self) -> u64 {
        self.enc.written()
    }

    pub fn into_inner(self) -> W {
        self.enc.into_inner()
    }
}

impl<W: BitWrite> Sink for Coded<W> {
    fn int(&mut self, v: u32, part: Part) {
        let b = self.enc.written();
        self.enc.write_int(v);
        self.account(part, b);
    }
    fn reference(&mut self, id: u32, part: Part) {
        let b = self.enc.written();
        self.enc.write_ref(id);
        self.account(part, b);
    }
    fn bit(&mut self, v: bool, part: Part) {
        let b = self.enc.written();
        self.enc.write_bit(v);
        self.account(part, b);
    }
    fn constant(&mut self, n: u64, part: Part) {
        let b = self.enc.written();
        self.enc.write_const(n);
        self.account(part, b);
    }
    fn reset(&mut self, ref_bound: u32) {
        self.enc.reset(ref_bound);
    }
}

/// Symbols as emitted, for inspection and tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Token {
    Int(u32),
    Ref(u32),
    Bit(bool),
    Const(u64),
    Delta(i32),
}

impl std::fmt::Display for Token {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Token::Int(v) | Token::Ref(v) => write!(f, "{v}"),
            Token::Bit(b) => write!(f, "{}", *b as u8),
            Token::Const(n) => write!(f, "{n}"),
            Token::Delta(d) => write!(f, "({d:+})"),
        }
    }
}

/// Records the symbol stream with its parts.
#[derive(Debug, Default, Clone)]
pub struct Trace {
    pub tokens: Vec<(Part, Token)>,
}

impl Trace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Tokens of the given parts, rendered and space separated.
    pub fn render(&self, parts: &[Part]) -> String {
        self.tokens
            .iter()
            .filter(|(p, _)| parts.contains(p))
            .map(|(_, t)| t.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl Sink for Trace {
    fn int(&mut self, v: u32, part: Part) {
        self.tokens.push((part, Token::Int(v)));
    }
    fn reference(&mut self, id: u32, part: Part) {
        self.tokens.push((part, Token::Ref(id)));
    }
    fn bit(&mut self, b: bool, part: Part) {
        self.tokens.push((part, Token::Bit(b)));
    }
    fn constant(&mut self, n: u64, part: Part) {
        self.tokens.push((part, Token::Const(n)));
    }
    fn delta(&mut self, d: i32, _min: i32) {
        self.tokens.push((Part::Patch, Token::Delta(d)));
    }
    fn reset(&mut self, _ref_bound: u32) {}
}
