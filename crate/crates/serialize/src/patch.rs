//! Patch construction.
//!
//! Every occurrence traversed while decoding a reference is labelled with a bit telling
//! whether any letter below it differs from the original.  Bits below a zero bit are
//! implicit and not stored, so an unchanged subtree costs one bit.  Disjunctions and
//! once-alternatives share the bit of the occurrence that selected them.

use parselet_core::string::Cursor;
use parselet_core::{Kind, Op, RefKey, StringData, ALPHABET};
use parselet_deflate::expand::occurrences;

use crate::{Grammar, Result, SerializeError};

/// Patch of one top-level reference: explicit diff bits in traversal order (its own bits
/// first) and `lossless - lossy` letter differences.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RefPatch {
    pub bits: Vec<bool>,
    pub deltas: Vec<i32>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Patch {
    pub refs: Vec<RefPatch>,
}

impl Patch {
    pub fn n_diffs(&self) -> usize {
        self.refs.iter().map(|r| r.deltas.len()).sum()
    }

    pub fn is_lossless(&self) -> bool {
        self.n_diffs() == 0
    }

    /// Smallest letter difference, `0` without differences.
    pub fn min_delta(&self) -> i32 {
        self.refs.iter().flat_map(|r| r.deltas.iter().copied()).min().unwrap_or(0)
    }
}

struct Builder<'a, G> {
    g: &'a G,
    cur: Cursor<'a>,
    lossless: &'a [u8],
    pos: usize,
    bits: Vec<bool>,
    deltas: Vec<i32>,
}

impl<G: Grammar> Builder<'_, G> {
    fn child_loop(&mut self, k: RefKey) -> Result<bool> {
        let mut any = false;
        for _ in 0..occurrences(&mut self.cur, k.op)? {
            let idx = self.bits.len();
            let mark = self.deltas.len();
            self.bits.push(false);
            if self.occurrence(k.id)? {
                self.bits[idx] = true;
                any = true;
            } else {
                self.bits.truncate(idx + 1);
                self.deltas.truncate(mark);
            }
        }
        Ok(any)
    }

    fn occurrence(&mut self, id: u32) -> Result<bool> {
        if id < ALPHABET {
            let Some(&orig) = self.lossless.get(self.pos) else {
                return Err(SerializeError::LengthMismatch { lossy: self.pos + 1, lossless: self.lossless.len() });
            };
            self.pos += 1;
            let d = orig as i32 - id as i32;
            if d != 0 {
                self.deltas.push(d);
            }
            return Ok(d != 0);
        }
        let (kind, l, r) = self.g.node(id)?;
        match kind {
            Kind::Disjunction => {
                let chosen = if self.cur.next_bit()? { r } else { l };
                if chosen.op == Op::Once {
                    self.occurrence(chosen.id)
                } else {
                    self.child_loop(chosen)
                }
            }
            Kind::Conjunction => {
                let a = self.child_loop(l)?;
                let b = self.child_loop(r)?;
                Ok(a | b)
            }
            Kind::Flushed => self.child_loop(l),
        }
    }
}

/// Builds the patch turning the expansion of `x` into `lossless`.
pub fn build_patch<G: Grammar>(x: &StringData, g: &G, lossless: &[u8]) -> Result<Patch> {
    let mut b = Builder { g, cur: x.cursor(), lossless, pos: 0, bits: Vec::new(), deltas: Vec::new() };
    let mut refs = Vec::new();
    while let Some(k) = b.cur.next_ref()? {
        b.child_loop(k)?;
        refs.push(RefPatch { bits: std::mem::take(&mut b.bits), deltas: std::mem::take(&mut b.deltas) });
    }
    if b.pos != lossless.len() {
        return Err(SerializeError::LengthMismatch { lossy: b.pos, lossless: lossless.len() });
    }
    Ok(Patch { refs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use parselet_core::{Dictionary, Slot};

    #[test]
    fn identical_strings_give_zero_bits() {
        let d = Dictionary::new();
        let x = StringData::from_bytes(b"abc");
        let p = build_patch(&x, &d, b"abc").unwrap();
        assert_eq!(p.refs.len(), 3);
        assert!(p.refs.iter().all(|r| r.bits == [false] && r.deltas.is_empty()));
        assert!(p.is_lossless());
    }

    #[test]
    fn letter_difference() {
        let d = Dictionary::new();
        let x = StringData::from_slots([Slot::reference('a' as u32, Op::Repeat), Slot::uint(3)]);
        let p = build_patch(&x, &d, b"aca").unwrap();
        assert_eq!(p.refs[0].bits, [false, true, false]);
        assert_eq!(p.refs[0].deltas, [2]);
        assert_eq!(p.min_delta(), 2);
    }

    #[test]
    fn length_mismatch() {
        let d = Dictionary::new();
        let x = StringData::from_bytes(b"abc");
        assert!(matches!(build_patch(&x, &d, b"ab"), Err(SerializeError::LengthMismatch { .. })));
        assert!(matches!(build_patch(&x, &d, b"abcd"), Err(SerializeError::LengthMismatch { .. })));
    }
}
