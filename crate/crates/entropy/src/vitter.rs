//! Vitter's adaptive Huffman code (algorithm Λ).
//!
//! Tree positions are stored by decreasing implicit number: slot 0 is the root and the
//! zero-weight escape leaf (NYT) always occupies the last slot.  Siblings occupy slot pairs
//! `(c, c+1)` with `c` odd; `c` is the higher-numbered child and is reached by a `1` bit.
//! Walking the slots upward, weights never increase and, among equal weights, internal
//! nodes come before leaves.  Unseen symbols are sent as the NYT code followed by a
//! fixed-width literal.  The escape leaf is kept even when the alphabet is exhausted.

use rustc_hash::FxHashMap;

use crate::bits::{BitReader, BitWrite};
use crate::{EntropyError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    Leaf(u32),
    Nyt,
    /// First (odd) child slot.
    Internal(u32),
}

#[derive(Debug, Clone)]
pub struct Vitter {
    width: u32,
    node: Vec<Node>,
    weight: Vec<u64>,
    parent: Vec<u32>,
    slot_of: FxHashMap<u32, u32>,
    path: Vec<bool>,
}

impl Vitter {
    /// `width` is the literal size used for first occurrences; symbols must fit in it.
    pub fn new(width: u32) -> Self {
        assert!((1..=32).contains(&width));
        Vitter {
            width,
            node: vec![Node::Nyt],
            weight: vec![0],
            parent: vec![u32::MAX],
            slot_of: FxHashMap::default(),
            path: Vec::with_capacity(64),
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn reset(&mut self) {
        self.node.clear();
        self.node.push(Node::Nyt);
        self.weight.clear();
        self.weight.push(0);
        self.parent.clear();
        self.parent.push(u32::MAX);
        self.slot_of.clear();
    }

    #[inline]
    fn nyt(&self) -> u32 {
        (self.node.len() - 1) as u32
    }

    /// Number of distinct symbols seen.
    pub fn distinct(&self) -> usize {
        self.slot_of.len()
    }

    pub fn encode<W: BitWrite + ?Sized>(&mut self, sym: u32, w: &mut W) {
        assert!(self.width == 32 || sym >> self.width == 0, "symbol {sym} exceeds literal width {}", self.width);
        match self.slot_of.get(&sym) {
            Some(&s) => self.emit_path(s, w),
            None => {
                self.emit_path(self.nyt(), w);
                w.put_bits(sym as u64, self.width);
            }
        }
        self.update(sym);
    }

    /// Code length the next encode of `sym` would take, without updating.
    pub fn cost(&self, sym: u32) -> u64 {
        let (slot, extra) = match self.slot_of.get(&sym) {
            Some(&s) => (s, 0),
            None => (self.nyt(), self.width as u64),
        };
        let mut d = 0;
        let mut s = slot;
        while s != 0 {
            d += 1;
            s = self.parent[s as usize];
        }
        d + extra
    }

    pub fn decode(&mut self, r: &mut BitReader<'_>) -> Result<u32> {
        let mut s = 0usize;
        let sym = loop {
            match self.node[s] {
                Node::Internal(c) => s = if r.read_bit()? { c as usize } else { c as usize + 1 },
                Node::Leaf(sym) => break sym,
                Node::Nyt => {
                    let v = r.read_bits(self.width)? as u32;
                    if self.slot_of.contains_key(&v) {
                        return Err(EntropyError::Malformed("escaped symbol already known"));
                    }
                    break v;
                }
            }
        };
        self.update(sym);
        Ok(sym)
    }

    fn emit_path<W: BitWrite + ?Sized>(&mut self, slot: u32, w: &mut W) {
        self.path.clear();
        let mut s = slot;
        while s != 0 {
            self.path.push(s % 2 == 1);
            s = self.parent[s as usize];
        }
        for &b in self.path.iter().rev() {
            w.put_bit(b);
        }
    }

    #[inline]
    fn is_leaf(&self, s: u32) -> bool {
        !matches!(self.node[s as usize], Node::Internal(_))
    }

    #[inline]
    fn sibling(s: u32) -> u32 {
        if s % 2 == 1 {
            s + 1
        } else {
            s - 1
        }
    }

    /// Lowest slot of the block (same weight, same leafness) containing `s`.
    fn leader(&self, s: u32) -> u32 {
        let (w, leaf) = (self.weight[s as usize], self.is_leaf(s));
        let mut l = s;
        while l > 0 && self.weight[l as usize - 1] == w && self.is_leaf(l - 1) == leaf {
            l -= 1;
        }
        l
    }

    fn relink(&mut self, s: u32) {
        match self.node[s as usize] {
            Node::Leaf(sym) => {
                self.slot_of.insert(sym, s);
            }
            Node::Nyt => {}
            Node::Internal(c) => {
                self.parent[c as usize] = s;
                self.parent[c as usize + 1] = s;
            }
        }
    }

    fn swap_slots(&mut self, a: u32, b: u32) {
        if a == b {
            return;
        }
        self.node.swap(a as usize, b as usize);
        self.weight.swap(a as usize, b as usize);
        self.relink(a);
        self.relink(b);
    }

    fn update(&mut self, sym: u32) {
        let mut leaf_to_increment = None;
        let mut q;
        match self.slot_of.get(&sym) {
            None => {
                // The escape leaf becomes an internal node over (new leaf, new escape).
                let z = self.nyt();
                let c = self.node.len() as u32;
                self.node[z as usize] = Node::Internal(c);
                self.node.push(Node::Leaf(sym));
                self.node.push(Node::Nyt);
                self.weight.push(0);
                self.weight.push(0);
                self.parent.push(z);
                self.parent.push(z);
                self.slot_of.insert(sym, c);
                q = z;
                leaf_to_increment = Some(c);
            }
            Some(&s) => {
                let l = self.leader(s);
                self.swap_slots(s, l);
                q = l;
                if Self::sibling(q) == self.nyt() {
                    leaf_to_increment = Some(q);
                    q = self.parent[q as usize];
                }
            }
        }
        while q != 0 {
            q = self.slide_and_increment(q);
        }
        self.weight[0] += 1;
        if let Some(l) = leaf_to_increment {
            self.slide_and_increment(l);
        }
    }

    /// Moves `p` past the block that must precede it once its weight grows, increments it,
    /// and returns the next node to process.
    fn slide_and_increment(&mut self, p: u32) -> u32 {
        let wt = self.weight[p as usize];
        let leaf = self.is_leaf(p);
        let former_parent = self.parent[p as usize];
        debug_assert_eq!(self.leader(p), p, "slid node must lead its block");
        let (bw, bleaf) = if leaf { (wt, false) } else { (wt + 1, true) };
        let mut q = p;
        while q > 0 && self.weight[q as usize - 1] == bw && self.is_leaf(q - 1) == bleaf {
            q -= 1;
        }
        if q < p {
            let (lo, hi) = (q as usize, p as usize);
            self.node[lo..=hi].rotate_right(1);
            self.weight[lo..=hi].rotate_right(1);
            for s in q..=p {
                self.relink(s);
            }
        }
        self.weight[q as usize] = wt + 1;
        if leaf {
            self.parent[q as usize]
        } else {
            former_parent
        }
    }

    /// Checks the sibling/ordering invariants; used by tests.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.node.len();
        for s in 1..n {
            let (a, b) = (self.weight[s - 1], self.weight[s]);
            if a < b || (a == b && self.is_leaf(s as u32 - 1) && !self.is_leaf(s as u32)) {
                return Err(format!("order violated at slot {s}"));
            }
        }
        for s in 0..n {
            if let Node::Internal(c) = self.node[s] {
                let (c, d) = (c as usize, c as usize + 1);
                if self.parent[c] != s as u32 || self.parent[d] != s as u32 {
                    return Err(format!("parent link broken under {s}"));
                }
                if self.weight[s] != self.weight[c] + self.weight[d] {
                    return Err(format!("weight of {s} is not the sum of its children"));
                }
            }
        }
        if self.node[n - 1] != Node::Nyt {
            return Err("escape leaf not last".into());
        }
        for (&sym, &s) in &self.slot_of {
            if self.node[s as usize] != Node::Leaf(sym) {
                return Err(format!("symbol map stale for {sym}"));
            }
        }
        Ok(())
    }

    /// Weighted external path length `sum(w * depth)` over symbol leaves.
    pub fn weighted_path_length(&self) -> u64 {
        self.slot_of
            .values()
            .map(|&s| {
                let mut d = 0;
                let mut x = s;
                while x != 0 {
                    d += 1;
                    x = self.parent[x as usize];
                }
                self.weight[s as usize] * d
            })
            .sum()
    }

    pub fn symbol_weights(&self) -> Vec<u64> {
        self.slot_of.values().map(|&s| self.weight[s as usize]).collect()
    }
}
