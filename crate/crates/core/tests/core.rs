use parselet_core::index::{Indexed, PairIndex};
use parselet_core::{Dictionary, Exec, Kind, Op, RefKey, Slot, StringData, ALPHABET, NIL};
use proptest::prelude::*;

fn key(c: u8) -> RefKey {
    RefKey::once(c as u32)
}

#[test]
fn interning_is_hash_consing() {
    let mut d = Dictionary::new();
    let (a, fresh) = d.intern(Kind::Conjunction, key(b'a'), key(b'b'), 2);
    assert!(fresh);
    let (b, fresh) = d.intern(Kind::Conjunction, key(b'a'), key(b'b'), 3);
    assert!(!fresh);
    assert_eq!(a, b);
    assert_eq!(a, ALPHABET);
    assert_eq!(d.len(), 1);
    let (c, _) = d.intern(Kind::Disjunction, key(b'a'), key(b'b'), 1);
    assert_ne!(a, c);
    assert_eq!(d.find(Kind::Disjunction, key(b'a'), key(b'b')), Some(c));
}

#[test]
fn rebuild_keeps_children_and_numbers_topologically() {
    let mut d = Dictionary::new();
    let (ab, _) = d.intern(Kind::Conjunction, key(b'a'), key(b'b'), 1);
    let (cd, _) = d.intern(Kind::Conjunction, key(b'c'), key(b'd'), 1);
    let (top, _) = d.intern(Kind::Conjunction, RefKey::new(ab, Op::Repeat), RefKey::once(cd), 1);
    let (lone, _) = d.intern(Kind::Conjunction, key(b'x'), key(b'y'), 1);
    let (r, map) = d.rebuild(|id| id, |id| id == top).unwrap();
    assert_eq!(r.len(), 3);
    assert_eq!(map[(lone - ALPHABET) as usize], None);
    let t = map[(top - ALPHABET) as usize].unwrap();
    assert_eq!(r.expansion_string(t), d.expansion_string(top));
    for (id, p) in r.entries() {
        assert!(p.children().all(|k| k.id < id));
    }
    // Redirecting cd to ab merges the two shapes' references.
    let (m, _) = d.rebuild(|id| if id == cd { ab } else { id }, |id| id == top).unwrap();
    assert_eq!(m.len(), 2);
}

proptest! {
    #[test]
    fn exec_strategies_agree(v in prop::collection::vec(any::<u32>(), 0..500)) {
        let f = |x: &u32| x.wrapping_mul(2654435761) >> 7;
        prop_assert_eq!(Exec::Sequential.map(&v, f), Exec::Parallel.map(&v, f));
        prop_assert_eq!(Exec::Sequential.map_range(v.len(), |i| i * i), Exec::Parallel.map_range(v.len(), |i| i * i));
    }

    #[test]
    fn indexed_edits_match_a_fresh_index(
        bytes in prop::collection::vec(0u8..4, 1..60),
        edits in prop::collection::vec((0usize..200, 0u8..6, 0u8..4), 0..60),
    ) {
        let mut ix = Indexed::new(StringData::from_bytes(&bytes));
        for (at, what, c) in edits {
            let live: Vec<_> = ix.data().iter().map(|(l, _)| l).collect();
            if live.is_empty() {
                break;
            }
            let loc = live[at % live.len()];
            match what {
                0 => ix.erase(loc),
                1 => { ix.insert_after(loc, Slot::reference(c as u32, Op::Once)); }
                2 => { ix.insert_before(loc, Slot::reference(c as u32, Op::Repeat)); }
                3 => ix.assign(loc, Slot::uint(c as u32)),
                4 => ix.purge_empty(),
                _ => ix.assign(loc, Slot::reference(c as u32, Op::Once)),
            }
            let fresh = PairIndex::build(ix.data());
            prop_assert_eq!(ix.index().snapshot(), fresh.snapshot());
            prop_assert_eq!(ix.index().tallies().into_iter().filter(|&(_, n)| n > 0).collect::<Vec<_>>(),
                fresh.tallies().into_iter().collect::<Vec<_>>());
            prop_assert_eq!(ix.index().ref_len(), fresh.ref_len());
        }
        let data = ix.into_data();
        prop_assert_eq!(data.compacted().values(), data.values());
        // Links are consistent in both directions.
        let mut loc = data.first_ref();
        let mut prev = NIL;
        while loc != NIL {
            prop_assert_eq!(data.prev_ref(loc), prev);
            prev = loc;
            loc = data.next_ref(loc);
        }
    }
}
