//! 32-bit string-data slots.
//!
//! Layout: bit 31 is always clear, bits 30..29 hold the operator, the low 29 bits hold a
//! parselet id or a value.  Operator `11` marks value slots: `2^29-1` is an erased
//! (empty) slot, `2^29-2`/`2^29-3` are the two bit values, anything below `2^29-4` is an
//! unsigned integer.

use std::fmt;

/// Parselet identifier. Ids below [`crate::ALPHABET`] are atomic letters.
pub type Id = u32;

/// Unary operator attached to a parselet reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Once,
    Repeat,
    Optional,
}

impl Op {
    /// Rank used by the canonical order: once < option < repetition.
    #[inline]
    pub fn rank(self) -> u8 {
        match self {
            Op::Once => 0,
            Op::Optional => 1,
            Op::Repeat => 2,
        }
    }

    #[inline]
    pub fn from_rank(r: u8) -> Op {
        match r {
            0 => Op::Once,
            1 => Op::Optional,
            _ => Op::Repeat,
        }
    }

    #[inline]
    fn bits(self) -> u32 {
        match self {
            Op::Once => 0,
            Op::Repeat => 1,
            Op::Optional => 2,
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            Op::Once => "",
            Op::Repeat => "*",
            Op::Optional => "?",
        }
    }
}

const VAL_BITS: u32 = 29;
const VAL_MASK: u32 = (1 << VAL_BITS) - 1;
const VALUE_OP: u32 = 3 << VAL_BITS;
const EMPTY_VAL: u32 = VAL_MASK;
const BIT_ONE_VAL: u32 = VAL_MASK - 1;
const BIT_ZERO_VAL: u32 = VAL_MASK - 2;

/// Largest integer storable in a slot.
pub const MAX_UINT: u32 = VAL_MASK - 4;
/// Largest parselet id storable in a reference slot.
pub const MAX_ID: Id = VAL_MASK;

/// A parselet reference as seen in string data: id plus operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RefKey {
    pub id: Id,
    pub op: Op,
}

impl RefKey {
    pub const fn new(id: Id, op: Op) -> Self {
        RefKey { id, op }
    }
    pub const fn once(id: Id) -> Self {
        RefKey { id, op: Op::Once }
    }
}

/// Decoded view of a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotValue {
    Ref(RefKey),
    UInt(u32),
    Bit(bool),
    Empty,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slot(u32);

impl Slot {
    pub const EMPTY: Slot = Slot(VALUE_OP | EMPTY_VAL);

    #[inline]
    pub fn reference(id: Id, op: Op) -> Slot {
        debug_assert!(id <= MAX_ID);
        Slot((op.bits() << VAL_BITS) | id)
    }

    #[inline]
    pub fn from_key(k: RefKey) -> Slot {
        Slot::reference(k.id, k.op)
    }

    #[inline]
    pub fn uint(v: u32) -> Slot {
        assert!(v <= MAX_UINT, "integer {v} does not fit a slot");
        Slot(VALUE_OP | v)
    }

    #[inline]
    pub fn bit(b: bool) -> Slot {
        Slot(VALUE_OP | if b { BIT_ONE_VAL } else { BIT_ZERO_VAL })
    }

    #[inline]
    pub fn raw(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn from_raw(v: u32) -> Option<Slot> {
        (v >> 31 == 0).then_some(Slot(v))
    }

    #[inline]
    pub fn value(self) -> SlotValue {
        let op = self.0 >> VAL_BITS;
        let v = self.0 & VAL_MASK;
        match op {
            0 => SlotValue::Ref(RefKey::new(v, Op::Once)),
            1 => SlotValue::Ref(RefKey::new(v, Op::Repeat)),
            2 => SlotValue::Ref(RefKey::new(v, Op::Optional)),
            _ => match v {
                EMPTY_VAL => SlotValue::Empty,
                BIT_ONE_VAL => SlotValue::Bit(true),
                BIT_ZERO_VAL => SlotValue::Bit(false),
                _ => SlotValue::UInt(v),
            },
        }
    }

    #[inline]
    pub fn is_ref(self) -> bool {
        self.0 >> VAL_BITS != 3
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self == Slot::EMPTY
    }

    /// Reference key if this is a reference slot.
    #[inline]
    pub fn key(self) -> Option<RefKey> {
        match self.value() {
            SlotValue::Ref(k) => Some(k),
            _ => None,
        }
    }
}

impl fmt::Debug for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            SlotValue::Ref(k) => write!(f, "#{}{}", k.id, k.op.suffix()),
            SlotValue::UInt(v) => write!(f, "{v}"),
            SlotValue::Bit(b) => write!(f, "b{}", b as u8),
            SlotValue::Empty => write!(f, "_"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn special_values_are_distinct() {
        let all = [Slot::EMPTY, Slot::bit(false), Slot::bit(true), Slot::uint(MAX_UINT), Slot::uint(0)];
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                assert_ne!(a, b);
            }
        }
        assert_eq!(Slot::EMPTY.value(), SlotValue::Empty);
        assert_eq!(Slot::bit(true).value(), SlotValue::Bit(true));
        assert_eq!(Slot::bit(false).value(), SlotValue::Bit(false));
    }

    #[test]
    #[should_panic]
    fn oversized_integer_rejected() {
        Slot::uint(MAX_UINT + 1);
    }

    proptest! {
        #[test]
        fn reference_roundtrip(id in 0u32..=MAX_ID, op in 0u8..3) {
            let op = Op::from_rank(op);
            let s = Slot::reference(id, op);
            prop_assert!(s.is_ref());
            prop_assert_eq!(s.value(), SlotValue::Ref(RefKey::new(id, op)));
            prop_assert_eq!(s.raw() >> 31, 0);
        }

        #[test]
        fn uint_roundtrip(v in 0u32..=MAX_UINT) {
            let s = Slot::uint(v);
            prop_assert!(!s.is_ref());
            prop_assert_eq!(s.value(), SlotValue::UInt(v));
        }
    }
}
