//! Canonical order of dictionary entries.
//!
//! Entries compare by kind (regular before flushed, conjunction before disjunction), then
//! by the left and right operators (once < option < repetition), then by their subtrees:
//! an atomic child sorts before a non-atomic one, atomic children compare by letter when
//! `lex` is set, non-atomic children compare recursively.  Sorting by kind and operators
//! first keeps each serialization group contiguous.

use std::cmp::Ordering;

use rustc_hash::FxHashMap;

use crate::dict::{Dictionary, Kind};
use crate::slot::{Id, RefKey};
use crate::ALPHABET;

/// Compares two non-atomic entries of `d`.
pub fn compare(d: &Dictionary, a: Id, b: Id, lex: bool) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let (p, q) = (d.get(a), d.get(b));
    p.kind
        .rank()
        .cmp(&q.kind.rank())
        .then(p.left.op.rank().cmp(&q.left.op.rank()))
        .then_with(|| {
            if p.kind.is_regular() {
                p.right.op.rank().cmp(&q.right.op.rank())
            } else {
                Ordering::Equal
            }
        })
        .then_with(|| compare_child(d, p.left, q.left, lex))
        .then_with(|| {
            if p.kind.is_regular() {
                compare_child(d, p.right, q.right, lex)
            } else {
                Ordering::Equal
            }
        })
}

fn compare_child(d: &Dictionary, a: RefKey, b: RefKey, lex: bool) -> Ordering {
    match (a.id < ALPHABET, b.id < ALPHABET) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (true, true) => {
            if lex {
                a.id.cmp(&b.id)
            } else {
                Ordering::Equal
            }
        }
        (false, false) => compare(d, a.id, b.id, lex),
    }
}

/// Entry ids sorted in canonical (lexicographic) order.
pub fn canonical_order(d: &Dictionary) -> Vec<Id> {
    let mut ids: Vec<Id> = d.ids().collect();
    ids.sort_by(|&a, &b| compare(d, a, b, true));
    ids
}

/// The canonical representative of a dictionary: entries renumbered topologically while
/// visiting roots in canonical order.  Two dictionaries holding the same set of parselets
/// have identical canonical forms.
pub fn canonical_form(d: &Dictionary) -> (Dictionary, Vec<Id>) {
    let order = canonical_order(d);
    let (nd, map) = d.rebuild_in_order(order, |i| i, |_| true).expect("dictionary is acyclic");
    (nd, map.into_iter().map(|m| m.expect("all entries kept")).collect())
}

/// Structural equivalence classes ignoring letters: entries with equal shape ids have the
/// same structure.  Atomic letters all share shape 0.
pub fn shape_ids(d: &Dictionary) -> Vec<u32> {
    let mut table: FxHashMap<(Kind, u8, u8, u32, u32), u32> = FxHashMap::default();
    let mut shapes = Vec::with_capacity(d.len());
    let shape_of = |shapes: &Vec<u32>, id: Id| if id < ALPHABET { 0 } else { shapes[(id - ALPHABET) as usize] };
    for (_, p) in d.entries() {
        let (rop, rs) = if p.kind.is_regular() { (p.right.op.rank(), shape_of(&shapes, p.right.id)) } else { (0, 0) };
        let key = (p.kind, p.left.op.rank(), rop, shape_of(&shapes, p.left.id), rs);
        let next = table.len() as u32 + 1;
        let s = *table.entry(key).or_insert(next);
        shapes.push(s);
    }
    shapes
}

/// True when both dictionaries hold the same parselets (counts ignored).
pub fn same_set(a: &Dictionary, b: &Dictionary) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let (ca, _) = canonical_form(a);
    let (cb, _) = canonical_form(b);
    let same = ca.entries().zip(cb.entries()).all(|((_, p), (_, q))| p.node_key() == q.node_key());
    same
}
