//! Decoding of string data against a dictionary.

use parselet_core::string::Cursor;
use parselet_core::{Dictionary, Id, Kind, Op, RefKey, Result, StringData, ALPHABET};

/// Result of expanding string data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    pub letters: Vec<u8>,
    /// Number of decode steps (logical depth).
    pub depth: u64,
    /// Times each dictionary entry was decoded, indexed by `id - ALPHABET`.
    pub activations: Vec<u64>,
}

struct Expander<'a> {
    dict: &'a Dictionary,
    cur: Cursor<'a>,
    out: Vec<u8>,
    depth: u64,
    act: Vec<u64>,
}

/// Number of occurrences selected by an operator, read from the parameters.
pub fn occurrences(cur: &mut Cursor<'_>, op: Op) -> Result<u32> {
    Ok(match op {
        Op::Once => 1,
        Op::Optional => cur.next_bit()? as u32,
        Op::Repeat => cur.next_uint()?,
    })
}

impl Expander<'_> {
    fn reference(&mut self, k: RefKey) -> Result<()> {
        for _ in 0..occurrences(&mut self.cur, k.op)? {
            self.depth += 1;
            self.node(k.id)?;
        }
        Ok(())
    }

    fn node(&mut self, id: Id) -> Result<()> {
        if id < ALPHABET {
            self.out.push(id as u8);
            return Ok(());
        }
        let p = *self.dict.try_get(id)?;
        self.act[(id - ALPHABET) as usize] += 1;
        match p.kind {
            Kind::Disjunction => {
                self.depth += 1;
                let chosen = if self.cur.next_bit()? { p.right } else { p.left };
                // A once-alternative is decoded in place; otherwise its operator applies.
                if chosen.op == Op::Once {
                    self.node(chosen.id)
                } else {
                    self.reference(chosen)
                }
            }
            Kind::Conjunction => {
                self.reference(p.left)?;
                self.reference(p.right)
            }
            Kind::Flushed => self.reference(p.left),
        }
    }
}

pub fn expand(x: &StringData, dict: &Dictionary) -> Result<Expansion> {
    let mut e = Expander { dict, cur: x.cursor(), out: Vec::new(), depth: 0, act: vec![0; dict.len()] };
    while let Some(k) = e.cur.next_ref()? {
        e.reference(k)?;
    }
    Ok(Expansion { letters: e.out, depth: e.depth, activations: e.act })
}

/// Letters of a parselet built only from plain conjunctions (no operators, no
/// alternatives); `None` otherwise.
pub fn expand_plain(dict: &Dictionary, id: Id) -> Option<Vec<u8>> {
    fn go(d: &Dictionary, k: RefKey, out: &mut Vec<u8>) -> bool {
        if k.op != Op::Once {
            return false;
        }
        if k.id < ALPHABET {
            out.push(k.id as u8);
            return true;
        }
        let p = d.get(k.id);
        p.kind == Kind::Conjunction && go(d, p.left, out) && go(d, p.right, out)
    }
    let mut out = Vec::new();
    go(dict, RefKey::once(id), &mut out).then_some(out)
}
