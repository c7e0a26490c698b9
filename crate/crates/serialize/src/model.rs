//! Model coding in canonical order.
//!
//! Entries are written sorted by the canonical comparison, so ids on disk are positions in
//! that order.  Conjunctions then disjunctions are listed as nine groups each, one per
//! (left operator, right operator) pair, every group as an omega-coded size followed by
//! its child ids.  Flushed entries follow in two groups (`?` then `*`).  The empty model
//! writes 20 bits for the regular part and 3 for the flushed part; both are subtracted so
//! that it costs nothing.

use parselet_core::canonical::canonical_order;
use parselet_core::{Dictionary, Id, Kind, Op, RefKey, ALPHABET};
use parselet_entropy::Decoder;

use crate::sink::{Part, Sink};
use crate::{Result, SerializeError};

/// Bits spent on an empty regular model: two zero counts and eighteen empty groups.
pub const EMPTY_MODEL_BITS: u64 = 20;
/// Bits spent on no flushed entries: a zero count and two empty groups.
pub const EMPTY_FLUSHED_BITS: u64 = 3;

const OPS: [Op; 3] = [Op::Once, Op::Optional, Op::Repeat];
const FLUSH_OPS: [Op; 2] = [Op::Optional, Op::Repeat];

/// Canonical numbering of a dictionary.
#[derive(Debug, Clone)]
pub struct Layout {
    /// Entry ids in canonical order.
    pub order: Vec<Id>,
    canon: Vec<u32>,
}

impl Layout {
    pub fn new(d: &Dictionary) -> Self {
        let order = canonical_order(d);
        let mut canon = vec![0; d.len()];
        for (i, &id) in order.iter().enumerate() {
            canon[(id - ALPHABET) as usize] = ALPHABET + i as u32;
        }
        Layout { order, canon }
    }

    /// On-disk id of a letter or entry.
    #[inline]
    pub fn canon(&self, id: Id) -> u32 {
        if id < ALPHABET {
            id
        } else {
            self.canon[(id - ALPHABET) as usize]
        }
    }
}

/// Sizes of the model parts in bits.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ModelBits {
    /// Regular entries, with the empty-model adjustment applied.
    pub regular: u64,
    /// Flushed entries.
    pub flushed: u64,
}

impl ModelBits {
    pub fn total(&self) -> u64 {
        self.regular + self.flushed
    }
}

/// Writes the model; returns its canonical layout and sizes.
pub fn write_model<S: Sink>(sink: &mut S, d: &Dictionary, tally: impl Fn(&S, Part) -> u64) -> (Layout, ModelBits) {
    let layout = Layout::new(d);
    let entries: Vec<_> = layout.order.iter().map(|&id| *d.get(id)).collect();
    let start = tally(sink, Part::Model);
    let mut i = 0;
    for kind in [Kind::Conjunction, Kind::Disjunction] {
        let n = entries.iter().filter(|p| p.kind == kind).count();
        sink.constant(n as u64, Part::Model);
        for lop in OPS {
            for rop in OPS {
                let j = i + entries[i..].iter().take_while(|p| p.kind == kind && p.left.op == lop && p.right.op == rop).count();
                sink.constant((j - i) as u64, Part::Model);
                for p in &entries[i..j] {
                    sink.int(layout.canon(p.left.id), Part::Model);
                    sink.int(layout.canon(p.right.id), Part::Model);
                }
                i = j;
            }
        }
    }
    let regular = tally(sink, Part::Model) - start - EMPTY_MODEL_BITS;
    let fstart = tally(sink, Part::Flushed);
    sink.constant((entries.len() - i) as u64, Part::Flushed);
    for op in FLUSH_OPS {
        let j = i + entries[i..].iter().take_while(|p| p.left.op == op).count();
        sink.constant((j - i) as u64, Part::Flushed);
        for p in &entries[i..j] {
            sink.int(layout.canon(p.left.id), Part::Flushed);
        }
        i = j;
    }
    debug_assert_eq!(i, entries.len(), "canonical order keeps groups contiguous");
    let flushed = tally(sink, Part::Flushed) - fstart - EMPTY_FLUSHED_BITS;
    (layout, ModelBits { regular, flushed })
}

/// A model as read: entries in canonical order, possibly referring forward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawModel {
    pub entries: Vec<(Kind, RefKey, RefKey)>,
}

impl RawModel {
    pub fn bound(&self) -> u32 {
        ALPHABET + self.entries.len() as u32
    }

    /// Builds an in-memory dictionary with topological ids; returns it with the map from
    /// on-disk ids to dictionary ids.
    pub fn into_dictionary(&self) -> Result<(Dictionary, Vec<Id>)> {
        let n = self.entries.len();
        let mut map: Vec<Option<Id>> = vec![None; n];
        let mut active = vec![false; n];
        let mut d = Dictionary::new();
        let bound = self.bound();
        for root in 0..n {
            if map[root].is_some() {
                continue;
            }
            let mut stack = vec![root];
            while let Some(&top) = stack.last() {
                if map[top].is_some() {
                    stack.pop();
                    continue;
                }
                active[top] = true;
                let (kind, l, r) = self.entries[top];
                let mut pending = false;
                let kids: &[RefKey] = if kind.is_regular() { &[l, r] } else { &[l] };
                for c in kids {
                    if c.id >= bound {
                        return Err(SerializeError::Format(format!("child id {} out of range", c.id)));
                    }
                    if c.id >= ALPHABET {
                        let ci = (c.id - ALPHABET) as usize;
                        if map[ci].is_none() {
                            if active[ci] {
                                return Err(SerializeError::Format("cyclic model".into()));
                            }
                            stack.push(ci);
                            pending = true;
                        }
                    }
                }
                if pending {
                    continue;
                }
                let m = |k: RefKey| if k.id < ALPHABET { k } else { RefKey::new(map[(k.id - ALPHABET) as usize].unwrap(), k.op) };
                let (id, _) = d.intern(kind, m(l), if kind.is_regular() { m(r) } else { RefKey::once(0) }, 0);
                map[top] = Some(id);
                active[top] = false;
                stack.pop();
            }
        }
        Ok((d, map.into_iter().map(|m| m.expect("all entries mapped")).collect()))
    }
}

pub fn read_model(dec: &mut Decoder<'_>) -> Result<RawModel> {
    let mut entries = Vec::new();
    for kind in [Kind::Conjunction, Kind::Disjunction] {
        let n = dec.read_const()?;
        let mut seen = 0u64;
        for lop in OPS {
            for rop in OPS {
                let g = dec.read_const()?;
                seen += g;
                if seen > n {
                    return Err(SerializeError::Format("group sizes exceed entry count".into()));
                }
                for _ in 0..g {
                    let l = dec.read_int()?;
                    let r = dec.read_int()?;
                    entries.push((kind, RefKey::new(l, lop), RefKey::new(r, rop)));
                }
            }
        }
        if seen != n {
            return Err(SerializeError::Format("group sizes disagree with entry count".into()));
        }
    }
    let n = dec.read_const()?;
    let mut seen = 0;
    for op in FLUSH_OPS {
        let g = dec.read_const()?;
        seen += g;
        if seen > n {
            return Err(SerializeError::Format("flushed group sizes exceed count".into()));
        }
        for _ in 0..g {
            let l = dec.read_int()?;
            entries.push((Kind::Flushed, RefKey::new(l, op), RefKey::once(0)));
        }
    }
    if seen != n {
        return Err(SerializeError::Format("flushed group sizes disagree with count".into()));
    }
    Ok(RawModel { entries })
}
