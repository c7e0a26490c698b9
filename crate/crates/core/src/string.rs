//! String data: a doubly linked list of slots stored in an arena.
//!
//! Locations are arena indices and stay valid across insertions and erasures.  Erasing a
//! slot only marks it empty; [`StringData::purge_empty`] unlinks the empties later.

use crate::slot::{Op, RefKey, Slot, SlotValue};
use crate::{CoreError, Result, ALPHABET};

/// Arena index of a slot.
pub type Loc = u32;
pub const NIL: Loc = u32::MAX;

#[derive(Clone, Default)]
pub struct StringData {
    slots: Vec<Slot>,
    prev: Vec<Loc>,
    next: Vec<Loc>,
    head: Loc,
    tail: Loc,
}

impl StringData {
    pub fn new() -> Self {
        StringData { slots: Vec::new(), prev: Vec::new(), next: Vec::new(), head: NIL, tail: NIL }
    }

    pub fn from_slots<I: IntoIterator<Item = Slot>>(it: I) -> Self {
        let mut s = StringData::new();
        for slot in it {
            s.push_back(slot);
        }
        s
    }

    /// One `once` reference per byte, no run-length coding.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        Self::from_slots(bytes.iter().map(|&b| Slot::reference(b as u32, Op::Once)))
    }

    pub fn push_back(&mut self, slot: Slot) -> Loc {
        let loc = self.alloc(slot);
        self.prev[loc as usize] = self.tail;
        if self.tail == NIL {
            self.head = loc;
        } else {
            self.next[self.tail as usize] = loc;
        }
        self.tail = loc;
        loc
    }

    fn alloc(&mut self, slot: Slot) -> Loc {
        let loc = self.slots.len();
        assert!(loc < NIL as usize, "string data too long");
        self.slots.push(slot);
        self.prev.push(NIL);
        self.next.push(NIL);
        loc as Loc
    }

    #[inline]
    pub fn get(&self, loc: Loc) -> Slot {
        self.slots[loc as usize]
    }

    /// Overwrites a slot in place.
    #[inline]
    pub fn set(&mut self, loc: Loc, slot: Slot) {
        self.slots[loc as usize] = slot;
    }

    #[inline]
    pub fn erase(&mut self, loc: Loc) {
        self.slots[loc as usize] = Slot::EMPTY;
    }

    pub fn insert_after(&mut self, loc: Loc, slot: Slot) -> Loc {
        let n = self.alloc(slot);
        let after = self.next[loc as usize];
        self.prev[n as usize] = loc;
        self.next[n as usize] = after;
        self.next[loc as usize] = n;
        if after == NIL {
            self.tail = n;
        } else {
            self.prev[after as usize] = n;
        }
        n
    }

    pub fn insert_before(&mut self, loc: Loc, slot: Slot) -> Loc {
        let n = self.alloc(slot);
        let before = self.prev[loc as usize];
        self.next[n as usize] = loc;
        self.prev[n as usize] = before;
        self.prev[loc as usize] = n;
        if before == NIL {
            self.head = n;
        } else {
            self.next[before as usize] = n;
        }
        n
    }

    /// Unlinks every empty slot.  Locations of live slots are unchanged.
    pub fn purge_empty(&mut self) {
        let mut loc = self.head;
        while loc != NIL {
            let nx = self.next[loc as usize];
            if self.slots[loc as usize].is_empty() {
                let p = self.prev[loc as usize];
                if p == NIL {
                    self.head = nx;
                } else {
                    self.next[p as usize] = nx;
                }
                if nx == NIL {
                    self.tail = p;
                } else {
                    self.prev[nx as usize] = p;
                }
                self.prev[loc as usize] = NIL;
                self.next[loc as usize] = NIL;
            }
            loc = nx;
        }
    }

    /// Rebuilds the arena with live slots only (invalidates locations).
    pub fn compacted(&self) -> StringData {
        StringData::from_slots(self.values())
    }

    #[inline]
    pub fn head_raw(&self) -> Loc {
        self.head
    }
    #[inline]
    pub fn next_raw(&self, loc: Loc) -> Loc {
        self.next[loc as usize]
    }
    #[inline]
    pub fn prev_raw(&self, loc: Loc) -> Loc {
        self.prev[loc as usize]
    }

    /// First non-empty slot.
    pub fn first(&self) -> Loc {
        self.skip_fwd(self.head)
    }

    /// Next non-empty slot after `loc`.
    #[inline]
    pub fn next(&self, loc: Loc) -> Loc {
        self.skip_fwd(self.next[loc as usize])
    }

    #[inline]
    pub fn prev(&self, loc: Loc) -> Loc {
        let mut l = self.prev[loc as usize];
        while l != NIL && self.slots[l as usize].is_empty() {
            l = self.prev[l as usize];
        }
        l
    }

    #[inline]
    fn skip_fwd(&self, mut l: Loc) -> Loc {
        while l != NIL && self.slots[l as usize].is_empty() {
            l = self.next[l as usize];
        }
        l
    }

    /// Next reference slot strictly after `loc`, skipping values and empties.
    #[inline]
    pub fn next_ref(&self, loc: Loc) -> Loc {
        let mut l = self.next[loc as usize];
        while l != NIL && !self.slots[l as usize].is_ref() {
            l = self.next[l as usize];
        }
        l
    }

    #[inline]
    pub fn prev_ref(&self, loc: Loc) -> Loc {
        let mut l = self.prev[loc as usize];
        while l != NIL && !self.slots[l as usize].is_ref() {
            l = self.prev[l as usize];
        }
        l
    }

    pub fn first_ref(&self) -> Loc {
        let mut l = self.head;
        while l != NIL && !self.slots[l as usize].is_ref() {
            l = self.next[l as usize];
        }
        l
    }

    /// Live slots with their locations.
    pub fn iter(&self) -> Iter<'_> {
        Iter { data: self, loc: self.first(), raw: false }
    }

    /// All linked slots including erased ones.
    pub fn iter_raw(&self) -> Iter<'_> {
        Iter { data: self, loc: self.head, raw: true }
    }

    pub fn values(&self) -> Vec<Slot> {
        self.iter().map(|(_, s)| s).collect()
    }

    pub fn raw_values(&self) -> Vec<Slot> {
        self.iter_raw().map(|(_, s)| s).collect()
    }

    /// Number of reference slots (the string length in the compressed alphabet).
    pub fn ref_len(&self) -> usize {
        self.iter().filter(|(_, s)| s.is_ref()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.first() == NIL
    }

    pub fn cursor(&self) -> Cursor<'_> {
        Cursor { data: self, loc: self.first() }
    }

    /// Replaces every reference id through `map` (operators are kept).
    pub fn transcode(&mut self, map: impl Fn(u32) -> u32) {
        for s in self.slots.iter_mut() {
            if let SlotValue::Ref(k) = s.value() {
                *s = Slot::reference(map(k.id), k.op);
            }
        }
    }

    /// Human-readable rendering: printable letters as characters, others as `#id`.
    pub fn render(&self) -> String {
        let mut out = Vec::new();
        for (_, s) in self.iter() {
            out.push(match s.value() {
                SlotValue::Ref(k) if k.id < ALPHABET => {
                    let c = k.id as u8;
                    let l = if c.is_ascii_graphic() { (c as char).to_string() } else { format!("\\x{c:02x}") };
                    format!("{l}{}", k.op.suffix())
                }
                _ => format!("{s:?}"),
            });
        }
        out.join(" ")
    }
}

impl std::fmt::Debug for StringData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.iter().map(|(_, s)| s)).finish()
    }
}

impl PartialEq for StringData {
    fn eq(&self, other: &Self) -> bool {
        self.iter().map(|(_, s)| s).eq(other.iter().map(|(_, s)| s))
    }
}
impl Eq for StringData {}

pub struct Iter<'a> {
    data: &'a StringData,
    loc: Loc,
    raw: bool,
}

impl Iterator for Iter<'_> {
    type Item = (Loc, Slot);
    fn next(&mut self) -> Option<(Loc, Slot)> {
        if self.loc == NIL {
            return None;
        }
        let l = self.loc;
        self.loc = if self.raw { self.data.next_raw(l) } else { self.data.next(l) };
        Some((l, self.data.get(l)))
    }
}

/// Sequential reader over live slots with type checking.
pub struct Cursor<'a> {
    data: &'a StringData,
    loc: Loc,
}

impl Cursor<'_> {
    pub fn at_end(&self) -> bool {
        self.loc == NIL
    }

    pub fn position(&self) -> Loc {
        self.loc
    }

    fn advance(&mut self) -> Option<Slot> {
        if self.loc == NIL {
            return None;
        }
        let s = self.data.get(self.loc);
        self.loc = self.data.next(self.loc);
        Some(s)
    }

    /// Next reference, or `None` at the end of the string.
    pub fn next_ref(&mut self) -> Result<Option<RefKey>> {
        match self.advance().map(Slot::value) {
            None => Ok(None),
            Some(SlotValue::Ref(k)) => Ok(Some(k)),
            Some(v) => Err(CoreError::Corrupt(format!("expected reference, found {v:?}"))),
        }
    }

    pub fn next_uint(&mut self) -> Result<u32> {
        match self.advance().map(Slot::value) {
            Some(SlotValue::UInt(v)) => Ok(v),
            v => Err(CoreError::Corrupt(format!("expected integer, found {v:?}"))),
        }
    }

    pub fn next_bit(&mut self) -> Result<bool> {
        match self.advance().map(Slot::value) {
            Some(SlotValue::Bit(b)) => Ok(b),
            v => Err(CoreError::Corrupt(format!("expected bit, found {v:?}"))),
        }
    }
}
