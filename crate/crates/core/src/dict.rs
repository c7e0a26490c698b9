//! Parselet dictionaries.
//!
//! Entries are hash-consed on `(kind, left, right)`: with children already unique, two
//! entries with the same structure and leaves always share an id.  Children always have
//! smaller ids than their parents.

use rustc_hash::FxHashMap;

use crate::letters::LetterSet;
use crate::slot::{Id, Op, RefKey};
use crate::{CoreError, Result, ALPHABET};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Conjunction,
    Disjunction,
    /// Irregular entry created at serialization time to carry a top-level operator.
    Flushed,
}

impl Kind {
    pub fn rank(self) -> u8 {
        match self {
            Kind::Conjunction => 0,
            Kind::Disjunction => 1,
            Kind::Flushed => 2,
        }
    }
    pub fn is_regular(self) -> bool {
        self != Kind::Flushed
    }
}

/// A non-atomic parselet. Flushed entries only use `left`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Parselet {
    pub kind: Kind,
    pub left: RefKey,
    pub right: RefKey,
    pub count: u64,
}

impl Parselet {
    pub fn node_key(&self) -> NodeKey {
        NodeKey::new(self.kind, self.left, self.right)
    }

    /// Option parselet `L C?` as produced by the Epicurus search.
    pub fn is_option(&self) -> bool {
        self.kind == Kind::Conjunction && self.right.op == Op::Optional
    }

    pub fn children(&self) -> impl Iterator<Item = RefKey> {
        let right = if self.kind.is_regular() { Some(self.right) } else { None };
        std::iter::once(self.left).chain(right)
    }
}

/// Structural identity of an entry given its children ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeKey {
    pub kind: Kind,
    pub left: RefKey,
    pub right: RefKey,
}

impl NodeKey {
    pub fn new(kind: Kind, left: RefKey, right: RefKey) -> Self {
        let right = if kind.is_regular() { right } else { RefKey::once(0) };
        NodeKey { kind, left, right }
    }
}

#[derive(Clone, Default)]
pub struct Dictionary {
    entries: Vec<Parselet>,
    leaves: Vec<LetterSet>,
    lookup: FxHashMap<NodeKey, Id>,
}

impl Dictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of non-atomic entries.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// One past the largest valid id.
    pub fn id_bound(&self) -> Id {
        ALPHABET + self.entries.len() as Id
    }

    pub fn ids(&self) -> std::ops::Range<Id> {
        ALPHABET..self.id_bound()
    }

    #[inline]
    pub fn is_atomic(id: Id) -> bool {
        id < ALPHABET
    }

    pub fn contains(&self, id: Id) -> bool {
        id < self.id_bound()
    }

    /// Entry for a non-atomic id. Panics on atomic or unknown ids.
    #[inline]
    pub fn get(&self, id: Id) -> &Parselet {
        &self.entries[(id - ALPHABET) as usize]
    }

    pub fn try_get(&self, id: Id) -> Result<&Parselet> {
        if id < ALPHABET {
            return Err(CoreError::Corrupt(format!("id {id} is atomic")));
        }
        self.entries.get((id - ALPHABET) as usize).ok_or(CoreError::UnknownId(id))
    }

    pub fn entries(&self) -> impl Iterator<Item = (Id, &Parselet)> {
        self.entries.iter().enumerate().map(|(i, p)| (ALPHABET + i as Id, p))
    }

    pub fn set_count(&mut self, id: Id, count: u64) {
        self.entries[(id - ALPHABET) as usize].count = count;
    }

    pub fn add_count(&mut self, id: Id, count: u64) {
        self.entries[(id - ALPHABET) as usize].count += count;
    }

    pub fn find(&self, kind: Kind, left: RefKey, right: RefKey) -> Option<Id> {
        self.lookup.get(&NodeKey::new(kind, left, right)).copied()
    }

    /// Letters reachable from `id`.
    pub fn leaves(&self, id: Id) -> LetterSet {
        if id < ALPHABET {
            LetterSet::single(id as u8)
        } else {
            self.leaves[(id - ALPHABET) as usize]
        }
    }

    /// Returns the id of `(kind, left, right)`, creating it if needed; `count` is added to
    /// the entry's count either way.  The bool tells whether a new entry was created.
    pub fn intern(&mut self, kind: Kind, left: RefKey, right: RefKey, count: u64) -> (Id, bool) {
        if let Some(id) = self.find(kind, left, right) {
            self.add_count(id, count);
            return (id, false);
        }
        (self.push_unchecked(kind, left, right, count), true)
    }

    fn push_unchecked(&mut self, kind: Kind, left: RefKey, right: RefKey, count: u64) -> Id {
        let id = self.id_bound();
        assert!(left.id < id, "child {} must precede parent {id}", left.id);
        let mut leaves = self.leaves(left.id);
        let right = if kind.is_regular() {
            assert!(right.id < id, "child {} must precede parent {id}", right.id);
            leaves = leaves.union(&self.leaves(right.id));
            right
        } else {
            RefKey::once(0)
        };
        let p = Parselet { kind, left, right, count };
        self.lookup.insert(p.node_key(), id);
        self.entries.push(p);
        self.leaves.push(leaves);
        id
    }

    /// Rebuilds the dictionary keeping entries for which `keep` holds, after redirecting
    /// child references through `redirect`.  The result is deduplicated and topologically
    /// numbered; the returned map sends old ids to new ids (`None` for dropped entries).
    /// Counts of merged duplicates are summed.
    pub fn rebuild(
        &self,
        redirect: impl Fn(Id) -> Id,
        keep: impl Fn(Id) -> bool,
    ) -> Result<(Dictionary, Vec<Option<Id>>)> {
        self.rebuild_in_order(self.ids(), redirect, keep)
    }

    /// Like [`Dictionary::rebuild`] but visits roots in the given order, which then fixes
    /// the numbering of the result.
    pub fn rebuild_in_order(
        &self,
        order: impl IntoIterator<Item = Id>,
        redirect: impl Fn(Id) -> Id,
        keep: impl Fn(Id) -> bool,
    ) -> Result<(Dictionary, Vec<Option<Id>>)> {
        const UNSEEN: u8 = 0;
        const ACTIVE: u8 = 1;
        const DONE: u8 = 2;
        let n = self.entries.len();
        let mut out = Dictionary::new();
        let mut map: Vec<Option<Id>> = vec![None; n];
        let mut state = vec![UNSEEN; n];
        let resolve = |id: Id| -> Result<Id> {
            let r = redirect(id);
            if !self.contains(r) {
                return Err(CoreError::UnknownId(r));
            }
            Ok(r)
        };
        for root in order {
            if root < ALPHABET || !keep(root) {
                continue;
            }
            let root = resolve(root)?;
            if root < ALPHABET || state[(root - ALPHABET) as usize] == DONE {
                continue;
            }
            let mut stack = vec![root];
            while let Some(&top) = stack.last() {
                let ti = (top - ALPHABET) as usize;
                if state[ti] == DONE {
                    stack.pop();
                    continue;
                }
                state[ti] = ACTIVE;
                let p = self.entries[ti];
                let mut pending = false;
                for c in p.children() {
                    let c = resolve(c.id)?;
                    if c >= ALPHABET {
                        match state[(c - ALPHABET) as usize] {
                            DONE => {}
                            ACTIVE => return Err(CoreError::Corrupt(format!("cycle through id {c}"))),
                            _ => {
                                stack.push(c);
                                pending = true;
                            }
                        }
                    }
                }
                if pending {
                    continue;
                }
                let m = |k: RefKey| -> Result<RefKey> {
                    let c = resolve(k.id)?;
                    let id = if c < ALPHABET { c } else { map[(c - ALPHABET) as usize].expect("child mapped") };
                    Ok(RefKey::new(id, k.op))
                };
                let left = m(p.left)?;
                let right = if p.kind.is_regular() { m(p.right)? } else { RefKey::once(0) };
                let (nid, _) = out.intern(p.kind, left, right, p.count);
                map[ti] = Some(nid);
                state[ti] = DONE;
                stack.pop();
            }
        }
        // Redirected-away entries map to their target.
        for old in self.ids() {
            let oi = (old - ALPHABET) as usize;
            if map[oi].is_none() && keep(old) {
                let r = resolve(old)?;
                map[oi] = if r < ALPHABET { Some(r) } else { map[(r - ALPHABET) as usize] };
            }
        }
        Ok((out, map))
    }

    /// Parenthesised structure, leaves shown as `.`.
    pub fn structure_string(&self, id: Id) -> String {
        let mut s = String::new();
        self.render(id, false, &mut s);
        s
    }

    /// Parenthesised structure with the letters shown.
    pub fn expansion_string(&self, id: Id) -> String {
        let mut s = String::new();
        self.render(id, true, &mut s);
        s
    }

    fn render(&self, id: Id, letters: bool, out: &mut String) {
        if id < ALPHABET {
            if letters {
                let c = id as u8;
                if c.is_ascii_alphanumeric() {
                    out.push(c as char);
                } else {
                    out.push_str(&format!("\\x{c:02x}"));
                }
            } else {
                out.push('.');
            }
            return;
        }
        let p = *self.get(id);
        let (open, sep, close) = match p.kind {
            Kind::Conjunction => ('(', "", ')'),
            Kind::Disjunction => ('(', "|", ')'),
            Kind::Flushed => ('[', "", ']'),
        };
        out.push(open);
        self.render(p.left.id, letters, out);
        out.push_str(p.left.op.suffix());
        if p.kind.is_regular() {
            if !sep.is_empty() {
                out.push_str(sep);
            } else {
                out.push(' ');
            }
            self.render(p.right.id, letters, out);
            out.push_str(p.right.op.suffix());
        }
        out.push(close);
    }
}

impl std::fmt::Debug for Dictionary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut m = f.debug_map();
        for (id, _) in self.entries() {
            m.entry(&id, &self.expansion_string(id));
        }
        m.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(c: char) -> RefKey {
        RefKey::once(c as u32)
    }

    #[test]
    fn intern_deduplicates() {
        let mut d = Dictionary::new();
        let (a, new_a) = d.intern(Kind::Conjunction, k('a'), k('b'), 2);
        let (b, new_b) = d.intern(Kind::Conjunction, k('a'), k('b'), 3);
        assert!(new_a && !new_b);
        assert_eq!(a, b);
        assert_eq!(d.get(a).count, 5);
        assert_eq!(d.len(), 1);
        assert_eq!(d.expansion_string(a), "(a b)");
        assert_eq!(d.structure_string(a), "(. .)");
    }

    #[test]
    fn leaves_accumulate() {
        let mut d = Dictionary::new();
        let (p, _) = d.intern(Kind::Conjunction, RefKey::new('a' as u32, Op::Repeat), k('b'), 1);
        let (q, _) = d.intern(Kind::Disjunction, RefKey::once(p), k('z'), 1);
        assert_eq!(d.leaves(q), LetterSet::from_bytes(b"abz"));
    }

    #[test]
    fn rebuild_merges_duplicates_after_redirect() {
        let mut d = Dictionary::new();
        let (ab, _) = d.intern(Kind::Conjunction, k('a'), k('b'), 4);
        let (cb, _) = d.intern(Kind::Conjunction, k('c'), k('b'), 1);
        let (x1, _) = d.intern(Kind::Conjunction, RefKey::once(ab), k('d'), 2);
        let (x2, _) = d.intern(Kind::Conjunction, RefKey::once(cb), k('d'), 3);
        // Rename cb -> ab: x2 becomes a duplicate of x1.
        let (nd, map) = d.rebuild(|id| if id == cb { ab } else { id }, |id| id != cb).unwrap();
        assert_eq!(nd.len(), 2);
        assert_eq!(map[(x1 - ALPHABET) as usize], map[(x2 - ALPHABET) as usize]);
        let nx = map[(x1 - ALPHABET) as usize].unwrap();
        assert_eq!(nd.get(nx).count, 5);
        assert_eq!(nd.expansion_string(nx), "((a b) d)");
    }

    #[test]
    fn rebuild_topologically_orders_forward_references() {
        // Build a dictionary whose root visit order puts parents first.
        let mut d = Dictionary::new();
        let (ab, _) = d.intern(Kind::Conjunction, k('a'), k('b'), 1);
        let (top, _) = d.intern(Kind::Conjunction, RefKey::once(ab), RefKey::new(ab, Op::Repeat), 1);
        let (nd, map) = d.rebuild_in_order([top, ab], |i| i, |_| true).unwrap();
        let nab = map[(ab - ALPHABET) as usize].unwrap();
        let ntop = map[(top - ALPHABET) as usize].unwrap();
        assert!(nab < ntop);
        assert_eq!(nd.expansion_string(ntop), "((a b) (a b)*)");
    }
}
