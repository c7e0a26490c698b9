//! Patched string streams.
//!
//! A stream is a sequence of top-level references closed by the end-of-string id.  After
//! each reference come its operator parameters and selector bits (string part), interleaved
//! with diff bits and letter differences where the enclosing diff bit is set (patch part).
//! Top-level diff bits are either written inline, run-length coded as the lengths of zero
//! runs, or omitted altogether when only the rate is of interest.

use parselet_core::string::Cursor;
use parselet_core::{Id, Kind, Op, RefKey, Slot, StringData, ALPHABET};
use parselet_deflate::expand::occurrences;
use parselet_entropy::Decoder;

use crate::model::Layout;
use crate::patch::Patch;
use crate::sink::{Part, Sink};
use crate::{Grammar, Result, SerializeError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopBits {
    /// One bit per top-level occurrence.
    Inline,
    /// Lengths of zero runs: the first one as framing, then one after every set bit.
    Runs,
    /// Not written (rate evaluation).
    Omit,
}

struct Writer<'a, S, G> {
    sink: &'a mut S,
    g: &'a G,
    cur: Cursor<'a>,
    bits: std::slice::Iter<'a, bool>,
    deltas: std::slice::Iter<'a, i32>,
    min_delta: i32,
}

impl<S: Sink, G: Grammar> Writer<'_, S, G> {
    fn params(&mut self, op: Op) -> Result<u32> {
        let n = occurrences(&mut self.cur, op)?;
        match op {
            Op::Once => {}
            Op::Optional => self.sink.bit(n == 1, Part::String),
            Op::Repeat => self.sink.int(n, Part::String),
        }
        Ok(n)
    }

    fn next_bit(&mut self) -> Result<bool> {
        self.bits.next().copied().ok_or_else(|| SerializeError::Format("patch does not match string".into()))
    }

    fn child_loop(&mut self, k: RefKey, has_diff: bool) -> Result<()> {
        for _ in 0..self.params(k.op)? {
            let bit = has_diff && {
                let b = self.next_bit()?;
                self.sink.bit(b, Part::Patch);
                b
            };
            self.occurrence(k.id, bit)?;
        }
        Ok(())
    }

    fn occurrence(&mut self, id: Id, bit: bool) -> Result<()> {
        if id < ALPHABET {
            if bit {
                let d = *self.deltas.next().ok_or_else(|| SerializeError::Format("patch does not match string".into()))?;
                self.sink.delta(d, self.min_delta);
            }
            return Ok(());
        }
        let (kind, l, r) = self.g.node(id)?;
        match kind {
            Kind::Disjunction => {
                let alt = self.cur.next_bit()?;
                self.sink.bit(alt, Part::String);
                let chosen = if alt { r } else { l };
                if chosen.op == Op::Once {
                    self.occurrence(chosen.id, bit)
                } else {
                    self.child_loop(chosen, bit)
                }
            }
            Kind::Conjunction => {
                self.child_loop(l, bit)?;
                self.child_loop(r, bit)
            }
            Kind::Flushed => self.child_loop(l, bit),
        }
    }
}

/// Writes flushed string data `x` (every top-level reference is `once`).  Without a patch
/// all diff bits are zero.  `eos` is the end-of-string id.
#[allow(clippy::too_many_arguments)]
pub fn write_string<S: Sink, G: Grammar>(
    sink: &mut S,
    x: &StringData,
    g: &G,
    layout: &Layout,
    patch: Option<&Patch>,
    mode: TopBits,
    min_delta: i32,
    eos: u32,
) -> Result<()> {
    let tops: Vec<bool> = match patch {
        Some(p) => p.refs.iter().map(|r| r.bits.first().copied().unwrap_or(false)).collect(),
        None => vec![false; x.ref_len()],
    };
    if tops.len() != x.ref_len() {
        return Err(SerializeError::Format("patch does not match string".into()));
    }
    if mode == TopBits::Runs {
        let first = tops.iter().take_while(|b| !**b).count();
        sink.constant(first as u64, Part::Framing);
    }
    let mut w = Writer { sink, g, cur: x.cursor(), bits: [].iter(), deltas: [].iter(), min_delta };
    let mut i = 0;
    while let Some(k) = w.cur.next_ref()? {
        if k.op != Op::Once {
            return Err(SerializeError::Format("top-level reference with operator; flush first".into()));
        }
        w.sink.reference(layout.canon(k.id), Part::String);
        if let Some(p) = patch {
            w.bits = p.refs[i].bits.get(1..).unwrap_or(&[]).iter();
            w.deltas = p.refs[i].deltas.iter();
        }
        let top = tops[i];
        match mode {
            TopBits::Inline => w.sink.bit(top, Part::Patch),
            TopBits::Runs if top => {
                let run = tops[i + 1..].iter().take_while(|b| !**b).count();
                w.sink.constant(run as u64, Part::Patch);
            }
            _ => {}
        }
        w.occurrence(k.id, top)?;
        i += 1;
    }
    let sink = w.sink;
    sink.reference(eos, Part::String);
    Ok(())
}

/// Stream of a string that is a marginal common string: a single reference to its entry.
pub fn write_mcs_member<S: Sink>(sink: &mut S, mcs_id: u32, mode: TopBits, eos: u32) {
    if mode == TopBits::Runs {
        sink.constant(1, Part::Framing);
    }
    sink.reference(mcs_id, Part::String);
    sink.reference(eos, Part::String);
}

/// A string stream as read: slots with on-disk ids and both decodings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReadString {
    Content { slots: StringData, lossy: Vec<u8>, lossless: Vec<u8> },
    /// Reference to marginal common string number `n`.
    Mcs(usize),
}

struct Reader<'a, 'b, G> {
    dec: &'a mut Decoder<'b>,
    g: &'a G,
    slots: StringData,
    lossy: Vec<u8>,
    lossless: Vec<u8>,
    min_delta: i32,
}

impl<G: Grammar> Reader<'_, '_, G> {
    fn params(&mut self, op: Op) -> Result<u32> {
        Ok(match op {
            Op::Once => 1,
            Op::Optional => {
                let b = self.dec.read_bit()?;
                self.slots.push_back(Slot::bit(b));
                b as u32
            }
            Op::Repeat => {
                let n = self.dec.read_int()?;
                self.slots.push_back(Slot::uint(n));
                n
            }
        })
    }

    fn child_loop(&mut self, k: RefKey, has_diff: bool) -> Result<()> {
        for _ in 0..self.params(k.op)? {
            let bit = has_diff && self.dec.read_bit()?;
            self.occurrence(k.id, bit)?;
        }
        Ok(())
    }

    fn occurrence(&mut self, id: Id, bit: bool) -> Result<()> {
        if id < ALPHABET {
            self.lossy.push(id as u8);
            let d = if bit { self.dec.read_int()? as i64 + self.min_delta as i64 } else { 0 };
            let v = id as i64 + d;
            if !(0..ALPHABET as i64).contains(&v) || (bit && d == 0) {
                return Err(SerializeError::Format(format!("letter difference {d} invalid for {id}")));
            }
            self.lossless.push(v as u8);
            return Ok(());
        }
        let (kind, l, r) = self.g.node(id)?;
        match kind {
            Kind::Disjunction => {
                let alt = self.dec.read_bit()?;
                self.slots.push_back(Slot::bit(alt));
                let chosen = if alt { r } else { l };
                if chosen.op == Op::Once {
                    self.occurrence(chosen.id, bit)
                } else {
                    self.child_loop(chosen, bit)
                }
            }
            Kind::Conjunction => {
                self.child_loop(l, bit)?;
                self.child_loop(r, bit)
            }
            Kind::Flushed => self.child_loop(l, bit),
        }
    }
}

/// Reads one string stream.  Ids at or above `ALPHABET + model size` and below `eos` refer
/// to marginal common strings.
pub fn read_string<G: Grammar>(
    dec: &mut Decoder<'_>,
    g: &G,
    model_bound: u32,
    mode: TopBits,
    min_delta: i32,
    eos: u32,
) -> Result<ReadString> {
    if mode == TopBits::Omit {
        return Err(SerializeError::Format("streams without top-level diff bits cannot be read".into()));
    }
    let mut zeros_left = if mode == TopBits::Runs { dec.read_const()? } else { 0 };
    let mut r = Reader { dec, g, slots: StringData::new(), lossy: Vec::new(), lossless: Vec::new(), min_delta };
    loop {
        let id = r.dec.read_ref()?;
        if id == eos {
            break;
        }
        if id > eos {
            return Err(SerializeError::Format(format!("reference {id} beyond end of string")));
        }
        if id >= model_bound {
            if !r.slots.is_empty() || r.dec.read_ref()? != eos {
                return Err(SerializeError::Format("common-string reference inside a string".into()));
            }
            return Ok(ReadString::Mcs((id - model_bound) as usize));
        }
        r.slots.push_back(Slot::reference(id, Op::Once));
        let top = match mode {
            TopBits::Inline => r.dec.read_bit()?,
            _ if zeros_left > 0 => {
                zeros_left -= 1;
                false
            }
            _ => {
                zeros_left = r.dec.read_const()?;
                true
            }
        };
        r.occurrence(id, top)?;
    }
    Ok(ReadString::Content { slots: r.slots, lossy: r.lossy, lossless: r.lossless })
}
