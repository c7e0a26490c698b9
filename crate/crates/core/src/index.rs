//! Digram index over the reference slots of a string.
//!
//! Maps `(left key, right key)` to the set of locations of the left slot, keeps a
//! count-ordered directory to find the most frequent pair, and live tallies of references
//! per id.  [`Indexed`] wraps a [`StringData`] and keeps the index in sync with edits.

use std::collections::{BTreeMap, BTreeSet};

use rustc_hash::{FxHashMap, FxHashSet};

use crate::slot::{Id, RefKey, Slot};
use crate::string::{Loc, StringData, NIL};

pub type Pair = (RefKey, RefKey);

#[derive(Default, Clone)]
pub struct PairIndex {
    rows: FxHashMap<RefKey, FxHashMap<RefKey, FxHashSet<Loc>>>,
    buckets: BTreeMap<u32, BTreeSet<Pair>>,
    id_counts: FxHashMap<Id, u32>,
    ref_len: usize,
}

impl PairIndex {
    pub fn build(data: &StringData) -> Self {
        let mut ix = PairIndex::default();
        let mut prev: Option<(Loc, RefKey)> = None;
        for (loc, s) in data.iter() {
            if let Some(k) = s.key() {
                ix.ref_len += 1;
                *ix.id_counts.entry(k.id).or_default() += 1;
                if let Some((pl, pk)) = prev {
                    ix.rows.entry(pk).or_default().entry(k).or_default().insert(pl);
                }
                prev = Some((loc, k));
            }
        }
        for (&l, row) in &ix.rows {
            for (&r, locs) in row {
                ix.buckets.entry(locs.len() as u32).or_default().insert((l, r));
            }
        }
        ix
    }

    fn move_bucket(&mut self, pair: Pair, from: u32, to: u32) {
        if from > 0 {
            if let Some(b) = self.buckets.get_mut(&from) {
                b.remove(&pair);
                if b.is_empty() {
                    self.buckets.remove(&from);
                }
            }
        }
        if to > 0 {
            self.buckets.entry(to).or_default().insert(pair);
        }
    }

    pub fn add(&mut self, l: RefKey, r: RefKey, loc: Loc) {
        let set = self.rows.entry(l).or_default().entry(r).or_default();
        if set.insert(loc) {
            let n = set.len() as u32;
            self.move_bucket((l, r), n - 1, n);
        }
    }

    pub fn remove(&mut self, l: RefKey, r: RefKey, loc: Loc) {
        let Some(row) = self.rows.get_mut(&l) else { return };
        let Some(set) = row.get_mut(&r) else { return };
        if set.remove(&loc) {
            let n = set.len() as u32;
            if n == 0 {
                row.remove(&r);
                if row.is_empty() {
                    self.rows.remove(&l);
                }
            }
            self.move_bucket((l, r), n + 1, n);
        }
    }

    fn tally(&mut self, id: Id, delta: i64) {
        let c = self.id_counts.entry(id).or_default();
        *c = (*c as i64 + delta) as u32;
        if *c == 0 {
            self.id_counts.remove(&id);
        }
        self.ref_len = (self.ref_len as i64 + delta) as usize;
    }

    /// Left-slot locations of the pair.
    pub fn occurrences(&self, l: RefKey, r: RefKey) -> Option<&FxHashSet<Loc>> {
        self.rows.get(&l).and_then(|row| row.get(&r))
    }

    pub fn pair_count(&self, l: RefKey, r: RefKey) -> usize {
        self.occurrences(l, r).map_or(0, |s| s.len())
    }

    pub fn row(&self, l: RefKey) -> Option<&FxHashMap<RefKey, FxHashSet<Loc>>> {
        self.rows.get(&l)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&RefKey, &FxHashMap<RefKey, FxHashSet<Loc>>)> {
        self.rows.iter()
    }

    /// Pairs by decreasing count, ties by increasing `(left, right)` key.
    pub fn by_count(&self) -> impl Iterator<Item = (u32, Pair)> + '_ {
        self.buckets.iter().rev().flat_map(|(&c, set)| set.iter().map(move |&p| (c, p)))
    }

    /// Live number of references to `id` (any operator).
    pub fn id_count(&self, id: Id) -> u32 {
        self.id_counts.get(&id).copied().unwrap_or(0)
    }

    /// Live number of reference slots.
    pub fn ref_len(&self) -> usize {
        self.ref_len
    }

    pub fn distinct_pairs(&self) -> usize {
        self.buckets.values().map(|b| b.len()).sum()
    }

    /// Deterministic snapshot used to compare an incrementally maintained index with a
    /// rebuilt one.
    pub fn snapshot(&self) -> BTreeMap<Pair, BTreeSet<Loc>> {
        let mut out = BTreeMap::new();
        for (&l, row) in &self.rows {
            for (&r, locs) in row {
                out.insert((l, r), locs.iter().copied().collect());
            }
        }
        out
    }

    pub fn tallies(&self) -> BTreeMap<Id, u32> {
        self.id_counts.iter().map(|(&k, &v)| (k, v)).collect()
    }
}

/// String data with a synchronised pair index.
#[derive(Clone)]
pub struct Indexed {
    data: StringData,
    index: PairIndex,
}

impl Indexed {
    pub fn new(data: StringData) -> Self {
        let index = PairIndex::build(&data);
        Indexed { data, index }
    }

    pub fn data(&self) -> &StringData {
        &self.data
    }

    pub fn index(&self) -> &PairIndex {
        &self.index
    }

    pub fn into_data(self) -> StringData {
        self.data
    }

    /// Unlinks erased slots; the index only refers to live reference slots so it is
    /// unaffected.
    pub fn purge_empty(&mut self) {
        self.data.purge_empty();
    }

    /// Replaces the slot at `loc`, updating affected pairs.
    pub fn assign(&mut self, loc: Loc, slot: Slot) {
        let old = self.data.get(loc);
        let (ok, nk) = (old.key(), slot.key());
        if ok.is_none() && nk.is_none() {
            self.data.set(loc, slot);
            return;
        }
        let p = self.data.prev_ref(loc);
        let n = self.data.next_ref(loc);
        let pk = (p != NIL).then(|| self.data.get(p).key().expect("ref"));
        let nxk = (n != NIL).then(|| self.data.get(n).key().expect("ref"));
        match ok {
            Some(k) => {
                if let Some(pk) = pk {
                    self.index.remove(pk, k, p);
                }
                if let Some(nxk) = nxk {
                    self.index.remove(k, nxk, loc);
                }
                self.index.tally(k.id, -1);
            }
            None => {
                if let (Some(pk), Some(nxk)) = (pk, nxk) {
                    self.index.remove(pk, nxk, p);
                }
            }
        }
        self.data.set(loc, slot);
        match nk {
            Some(k) => {
                if let Some(pk) = pk {
                    self.index.add(pk, k, p);
                }
                if let Some(nxk) = nxk {
                    self.index.add(k, nxk, loc);
                }
                self.index.tally(k.id, 1);
            }
            None => {
                if let (Some(pk), Some(nxk)) = (pk, nxk) {
                    self.index.add(pk, nxk, p);
                }
            }
        }
    }

    pub fn erase(&mut self, loc: Loc) {
        self.assign(loc, Slot::EMPTY);
    }

    pub fn insert_after(&mut self, loc: Loc, slot: Slot) -> Loc {
        let n = self.data.insert_after(loc, Slot::EMPTY);
        self.assign(n, slot);
        n
    }

    pub fn insert_before(&mut self, loc: Loc, slot: Slot) -> Loc {
        let n = self.data.insert_before(loc, Slot::EMPTY);
        self.assign(n, slot);
        n
    }
}
