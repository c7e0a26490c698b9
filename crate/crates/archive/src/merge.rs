//! Dictionary merging and multiset union.
//!
//! Entries of the incoming dictionary are visited children first (ids are topological),
//! their children mapped, and the result interned into the target: structurally equal
//! parselets collapse onto one entry, everything else is appended.  Union of many models
//! runs as a bottom-up tree of pairwise merges, one level at a time.

use parselet_core::{Dictionary, Exec, Id, RefKey, StringData, ALPHABET};

/// Old id to merged id for one source dictionary.  Atomic ids map to themselves.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IdMapping(pub Vec<Id>);

impl IdMapping {
    pub fn identity(d: &Dictionary) -> Self {
        IdMapping(d.ids().collect())
    }

    pub fn map(&self, id: Id) -> Id {
        if id < ALPHABET {
            id
        } else {
            self.0[(id - ALPHABET) as usize]
        }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &IdMapping) -> IdMapping {
        IdMapping(self.0.iter().map(|&id| other.map(id)).collect())
    }

    pub fn transcode(&self, x: &mut StringData) {
        x.transcode(|id| self.map(id));
    }
}

/// Interns every entry of `dy` into `dx` and returns where they went.  Counts add up.
pub fn merge(dx: &mut Dictionary, dy: &Dictionary) -> IdMapping {
    let mut m = IdMapping(Vec::with_capacity(dy.len()));
    for (_, p) in dy.entries() {
        let l = RefKey::new(m.map(p.left.id), p.left.op);
        let r = if p.kind.is_regular() { RefKey::new(m.map(p.right.id), p.right.op) } else { p.right };
        let (id, _) = dx.intern(p.kind, l, r, p.count);
        m.0.push(id);
    }
    m
}

/// Merges `dy` into `dx` and rewrites `y` to the merged ids.
pub fn merge_transcode(dx: &mut Dictionary, dy: &Dictionary, y: &mut StringData) -> IdMapping {
    let m = merge(dx, dy);
    m.transcode(y);
    m
}

/// Union of many models with the mapping of each input into the result.
pub fn union(models: &[Dictionary], exec: Exec) -> (Dictionary, Vec<IdMapping>) {
    if models.is_empty() {
        return (Dictionary::new(), Vec::new());
    }
    // Each node: merged dictionary and the mappings of the inputs it covers.
    let mut level: Vec<(Dictionary, Vec<IdMapping>)> =
        models.iter().map(|d| (d.clone(), vec![IdMapping::identity(d)])).collect();
    while level.len() > 1 {
        let pairs: Vec<&[(Dictionary, Vec<IdMapping>)]> = level.chunks(2).collect();
        level = exec.map(&pairs, |pair| match pair {
            [(a, ma), (b, mb)] => {
                let mut d = a.clone();
                let m = merge(&mut d, b);
                let mut maps = ma.clone();
                maps.extend(mb.iter().map(|x| x.then(&m)));
                (d, maps)
            }
            [single] => single.clone(),
            _ => unreachable!(),
        });
    }
    level.pop().expect("one node left")
}

/// Union over the models, rewriting each string to the merged ids.
pub fn union_transcode(models: &[Dictionary], strings: &mut [StringData], exec: Exec) -> Dictionary {
    assert_eq!(models.len(), strings.len());
    let (d, maps) = union(models, exec);
    for (m, x) in maps.iter().zip(strings.iter_mut()) {
        m.transcode(x);
    }
    d
}
