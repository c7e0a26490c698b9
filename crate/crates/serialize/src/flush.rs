//! Operator flushing.
//!
//! String data may reference parselets with a `?` or `*` operator.  Before writing, every
//! such `(id, op)` becomes an irregular entry of the dictionary so that references in the
//! stream are plain ids; after reading, those entries are folded back into the slots.

use parselet_core::{Dictionary, Kind, Op, RefKey, Result, Slot, StringData, ALPHABET};

/// Adds a flushed entry for every operator reference found in `strings` and rewrites the
/// slots to plain references.  Parameters are left untouched.
pub fn flush(dict: &mut Dictionary, strings: &mut [StringData]) {
    for x in strings.iter_mut() {
        let locs: Vec<_> = x.iter().filter(|(_, s)| s.key().is_some_and(|k| k.op != Op::Once)).map(|(l, _)| l).collect();
        for loc in locs {
            let k = x.get(loc).key().expect("reference");
            let (f, _) = dict.intern(Kind::Flushed, k, RefKey::once(0), 0);
            x.set(loc, Slot::reference(f, Op::Once));
        }
    }
}

/// Inverse of [`flush`]: rewrites references to flushed entries and drops them.  The
/// returned dictionary is renumbered; `strings` are transcoded accordingly.
pub fn unflush(dict: &Dictionary, strings: &mut [StringData]) -> Result<Dictionary> {
    let has_flushed = dict.entries().any(|(_, p)| p.kind == Kind::Flushed);
    for x in strings.iter_mut() {
        if has_flushed {
            let locs: Vec<_> = x.iter().filter(|(_, s)| s.is_ref()).map(|(l, _)| l).collect();
            for loc in locs {
                let k = x.get(loc).key().expect("reference");
                if k.id >= ALPHABET {
                    let p = dict.try_get(k.id)?;
                    if p.kind == Kind::Flushed {
                        x.set(loc, Slot::from_key(p.left));
                    }
                }
            }
        }
    }
    let (nd, map) = dict.rebuild(|i| i, |i| dict.get(i).kind != Kind::Flushed)?;
    for x in strings.iter_mut() {
        x.transcode(|id| if id < ALPHABET { id } else { map[(id - ALPHABET) as usize].expect("regular entry kept") });
    }
    Ok(nd)
}
