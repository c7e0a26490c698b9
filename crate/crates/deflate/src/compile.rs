//! In-place compilation primitives.  Each one rewrites a single occurrence located by the
//! slot of its left (or only) element and returns whether the occurrence was still valid.

use parselet_core::index::Indexed;
use parselet_core::{Id, Loc, Op, RefKey, Slot, NIL};

fn key_at(x: &Indexed, loc: Loc) -> Option<RefKey> {
    (loc != NIL).then(|| x.data().get(loc).key()).flatten()
}

/// `L R` at `loc` becomes `p`; the parameters of both stay in order.
pub fn compile_conjunction(x: &mut Indexed, loc: Loc, l: RefKey, r: RefKey, p: Id) -> bool {
    if key_at(x, loc) != Some(l) {
        return false;
    }
    let rl = x.data().next_ref(loc);
    if key_at(x, rl) != Some(r) {
        return false;
    }
    x.assign(loc, Slot::reference(p, Op::Once));
    x.erase(rl);
    true
}

/// `L C R` becomes `p 1 R` and `L R` becomes `p 0 R`, with `p = L C?`.  The location is
/// the slot of `L`.  Returns false when neither pattern is present.
pub fn compile_option(x: &mut Indexed, loc: Loc, l: RefKey, c: RefKey, r: RefKey, p: Id) -> bool {
    if key_at(x, loc) != Some(l) {
        return false;
    }
    let next = x.data().next_ref(loc);
    let nk = key_at(x, next);
    if nk == Some(c) && key_at(x, x.data().next_ref(next)) == Some(r) {
        x.assign(loc, Slot::reference(p, Op::Once));
        x.assign(next, Slot::bit(true));
    } else if nk == Some(r) {
        x.assign(loc, Slot::reference(p, Op::Once));
        x.insert_before(next, Slot::bit(false));
    } else {
        return false;
    }
    true
}

/// The alternative at `loc` becomes `p` followed by the selector bit (1 for `right`).
pub fn compile_disjunction(x: &mut Indexed, loc: Loc, left: RefKey, right: RefKey, p: Id) -> bool {
    let k = key_at(x, loc);
    if k != Some(left) && k != Some(right) {
        return false;
    }
    x.insert_after(loc, Slot::bit(k == Some(right)));
    x.assign(loc, Slot::reference(p, Op::Once));
    true
}

/// Run-length codes consecutive `p` references among `locs`: a run of `k > 1` becomes
/// `p* k` followed by the parameters of each occurrence.
pub fn rlc(x: &mut Indexed, locs: &[Loc], p: Id) -> usize {
    let once = RefKey::once(p);
    let mut runs = 0;
    for &loc in locs {
        if key_at(x, loc) != Some(once) {
            continue;
        }
        if key_at(x, x.data().prev_ref(loc)) == Some(once) {
            continue;
        }
        let mut members = Vec::new();
        let mut n = x.data().next_ref(loc);
        while key_at(x, n) == Some(once) {
            members.push(n);
            n = x.data().next_ref(n);
        }
        if members.is_empty() {
            continue;
        }
        x.assign(loc, Slot::reference(p, Op::Repeat));
        x.insert_after(loc, Slot::uint(members.len() as u32 + 1));
        for m in members {
            x.erase(m);
        }
        runs += 1;
    }
    runs
}

#[cfg(test)]
mod tests {
    use super::*;
    use parselet_core::StringData;

    fn k(c: char) -> RefKey {
        RefKey::once(c as u32)
    }

    #[test]
    fn option_compiles_both_forms() {
        let mut x = Indexed::new(StringData::from_bytes(b"acrar"));
        let locs: Vec<Loc> = x.data().iter().map(|(l, _)| l).collect();
        assert!(compile_option(&mut x, locs[0], k('a'), k('c'), k('r'), 300));
        assert!(compile_option(&mut x, locs[3], k('a'), k('c'), k('r'), 300));
        assert_eq!(
            x.data().values(),
            vec![
                Slot::reference(300, Op::Once),
                Slot::bit(true),
                Slot::reference('r' as u32, Op::Once),
                Slot::reference(300, Op::Once),
                Slot::bit(false),
                Slot::reference('r' as u32, Op::Once),
            ]
        );
    }

    #[test]
    fn disjunction_inserts_selector() {
        let mut x = Indexed::new(StringData::from_bytes(b"xy"));
        let locs: Vec<Loc> = x.data().iter().map(|(l, _)| l).collect();
        assert!(compile_disjunction(&mut x, locs[1], k('z'), k('y'), 300));
        assert!(!compile_disjunction(&mut x, locs[0], k('z'), k('y'), 300));
        assert_eq!(x.data().values()[1..], [Slot::reference(300, Op::Once), Slot::bit(true)]);
    }

    #[test]
    fn rlc_keeps_parameters_in_order() {
        // p 1 p 2 p 3 q  ->  p* 3 1 2 3 q
        let p = 300;
        let mut x = Indexed::new(StringData::from_slots([
            Slot::reference(p, Op::Once),
            Slot::uint(1),
            Slot::reference(p, Op::Once),
            Slot::uint(2),
            Slot::reference(p, Op::Once),
            Slot::uint(3),
            Slot::reference('q' as u32, Op::Once),
        ]));
        let locs: Vec<Loc> = x.data().iter().filter(|(_, s)| s.is_ref()).map(|(l, _)| l).collect();
        assert_eq!(rlc(&mut x, &locs, p), 1);
        assert_eq!(
            x.data().values(),
            vec![
                Slot::reference(p, Op::Repeat),
                Slot::uint(3),
                Slot::uint(1),
                Slot::uint(2),
                Slot::uint(3),
                Slot::reference('q' as u32, Op::Once),
            ]
        );
    }
}
