use std::collections::BTreeMap;

use parselet_core::index::PairIndex;
use parselet_core::{Dictionary, Kind, Op, RefKey, StringData, ALPHABET};
use parselet_deflate::search::{
    disjunction_cost, most_frequent_conjunction, most_promising_disjunction, most_promising_option,
};
use parselet_deflate::{deflate, deflate_bytes, expand, load_rlc, DeflateParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn refs(x: &StringData) -> Vec<RefKey> {
    x.iter().filter_map(|(_, s)| s.key()).collect()
}

fn check_ids(d: &Dictionary) {
    for (id, p) in d.entries() {
        for c in p.children() {
            assert!(c.id < id, "child {} of {id}", c.id);
        }
    }
}

#[test]
fn conjunction_search_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let n = rng.gen_range(2..1000);
        let bytes: Vec<u8> = (0..n).map(|_| b"abcd"[rng.gen_range(0..4)]).collect();
        let x = load_rlc(&bytes);
        let r = refs(&x);
        let mut counts: BTreeMap<(RefKey, RefKey), usize> = BTreeMap::new();
        for w in r.windows(2) {
            *counts.entry((w[0], w[1])).or_default() += 1;
        }
        let best = counts.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).unwrap();
        let ix = PairIndex::build(&x);
        let got = most_frequent_conjunction(&ix, &Dictionary::new(), None, 1).unwrap();
        assert_eq!(((got.left, got.right), got.locs.len()), (*best.0, *best.1));
    }
}

#[test]
fn option_search_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let bytes: Vec<u8> = (0..30).map(|_| b"abcxyz"[rng.gen_range(0..6)]).collect();
        let x = StringData::from_bytes(&bytes);
        let r = refs(&x);
        let mut best: Option<(usize, (RefKey, RefKey, RefKey))> = None;
        let keys: std::collections::BTreeSet<RefKey> = r.iter().copied().collect();
        for &l in &keys {
            for &c in &keys {
                for &rr in &keys {
                    if c == rr {
                        continue;
                    }
                    let with = r.windows(3).filter(|w| w[0] == l && w[1] == c && w[2] == rr).count();
                    let without = r.windows(2).filter(|w| w[0] == l && w[1] == rr).count();
                    if with == 0 || without == 0 {
                        continue;
                    }
                    let key = (with + without, (l, c, rr));
                    let better = match best {
                        None => true,
                        Some((n, t)) => key.0 > n || (key.0 == n && key.1 < t),
                    };
                    if better {
                        best = Some(key);
                    }
                }
            }
        }
        let ix = PairIndex::build(&x);
        let got = most_promising_option(&x, &ix, &Dictionary::new(), None);
        match best {
            None => assert!(got.is_none()),
            Some((n, (l, c, rr))) => {
                let g = got.unwrap();
                assert_eq!((g.left, g.optional, g.next), (l, c, rr));
                assert_eq!(g.with + g.without, n);
            }
        }
    }
}

#[test]
fn option_example_counts() {
    // three "a c b" and two "a b"
    let x = StringData::from_bytes(b"acbqacbracbsabtabu");
    let ix = PairIndex::build(&x);
    let c = most_promising_option(&x, &ix, &Dictionary::new(), None).unwrap();
    assert_eq!((c.left.id, c.optional.id, c.next.id), ('a' as u32, 'c' as u32, 'b' as u32));
    assert_eq!((c.with, c.without), (3, 2));
}

#[test]
fn repetitive_option_context_is_a_gain() {
    let x = StringData::from_bytes(&b"acbab".repeat(40));
    let ix = PairIndex::build(&x);
    let c = most_promising_option(&x, &ix, &Dictionary::new(), None).unwrap();
    assert!(c.cost < 0.0, "cost {}", c.cost);
}

#[test]
fn disjunction_example_and_cost() {
    let x = StringData::from_bytes(b"xaxaxaxaxbxbxbxb");
    let ix = PairIndex::build(&x);
    let c = most_promising_disjunction(&x, &ix, &Dictionary::new(), None).unwrap();
    assert_eq!((c.context.id, c.left.id, c.right.id), ('x' as u32, 'a' as u32, 'b' as u32));
    assert_eq!((c.n_left, c.n_right), (4, 4));
    // n = 8 over 16 references, counts 4/4/8: 8(1 + 1) - 4*2 - 4*2 + 8(0 - 1 - 1) = -16
    assert!((c.cost - disjunction_cost(4.0, 4.0, 4.0, 4.0, 8.0, 16.0)).abs() < 1e-12);
    assert!((c.cost + 16.0).abs() < 1e-9);
}

#[test]
fn single_alternative_is_rejected() {
    let x = StringData::from_bytes(b"xaxaxaxa");
    let ix = PairIndex::build(&x);
    assert!(most_promising_disjunction(&x, &ix, &Dictionary::new(), None).is_none());
}

#[test]
fn random_bytes_give_empty_model() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let bytes: Vec<u8> = (0..4000).map(|_| rng.gen()).collect();
    let (d, x) = deflate_bytes(&bytes, &DeflateParams::default());
    assert!(d.is_empty());
    assert_eq!(x, load_rlc(&bytes));
}

#[test]
fn pathological_inputs_halt_and_roundtrip() {
    let distinct: Vec<u8> = (0..=255).collect();
    let cases: Vec<Vec<u8>> = vec![
        b"ab".repeat(5000),
        vec![b'z'; 70000],
        distinct.clone(),
        distinct.repeat(20),
        b"abcabcabd".repeat(300),
        vec![b'q'],
    ];
    for params in [
        DeflateParams::default(),
        DeflateParams::default().with_t_sig(1),
        DeflateParams::default().with_t_sig(2).generalize().tokenized(),
    ] {
        for s in &cases {
            let (d, x) = deflate_bytes(s, &params);
            check_ids(&d);
            assert_eq!(&expand(&x, &d).unwrap().letters, s);
        }
    }
}

#[test]
fn t_sig_one_absorbs_the_string() {
    let s = b"the quick brown fox";
    let (d, x) = deflate_bytes(s, &DeflateParams::default().with_t_sig(1));
    assert_eq!(x.ref_len(), 1);
    assert_eq!(expand(&x, &d).unwrap().letters, s);
}

#[test]
fn tokenized_pass_keeps_words_apart_first() {
    let s = b"alpha beta alpha beta alpha beta alpha beta alpha beta alpha beta alpha beta";
    let params = DeflateParams::default().tokenized();
    let (d, x) = deflate_bytes(s, &params);
    assert_eq!(expand(&x, &d).unwrap().letters, s.to_vec());
    let words: Vec<String> = d.ids().map(|id| d.expansion_string(id)).collect();
    assert!(words.iter().any(|w| !w.contains("\\x20") && w.contains('l') && w.contains('h')), "{words:?}");
}

fn grammar_string(rng: &mut ChaCha8Rng, len: usize) -> Vec<u8> {
    let words: [&[u8]; 6] = [b"lorem", b"ipsum", b"dolor", b"sit", b"amet", b"consectetur"];
    let mut s = Vec::new();
    while s.len() < len {
        s.extend_from_slice(words[rng.gen_range(0..words.len())]);
        s.push(if rng.gen_bool(0.8) { b' ' } else { b',' });
    }
    s.truncate(len);
    s
}

#[test]
fn epicurus_off_means_conjunctions_only() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s = grammar_string(&mut rng, 3000);
    let (d, _) = deflate_bytes(&s, &DeflateParams::default());
    assert!(d.entries().all(|(_, p)| p.kind == Kind::Conjunction && p.right.op != Op::Optional));
    let (g, x) = deflate_bytes(&s, &DeflateParams::default().generalize());
    check_ids(&g);
    assert_eq!(expand(&x, &g).unwrap().letters, s);
}

#[test]
fn compressible_input_shrinks() {
    let s = b"ab".repeat(100);
    let (d, x) = deflate_bytes(&s, &DeflateParams::default());
    assert!(d.len() < 10 && x.ref_len() < 5);
    assert!(d.ids().all(|id| id >= ALPHABET));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn lossless_on_random_strings(s in proptest::collection::vec(prop_oneof![Just(b'a'), Just(b'b'), Just(b'c'), any::<u8>()], 0..600),
                                  t_sig in 1u32..8, gen in any::<bool>(), tok in any::<bool>()) {
        let mut params = DeflateParams::default().with_t_sig(t_sig);
        if gen { params = params.generalize(); }
        if tok { params = params.tokenized(); }
        let (d, x) = deflate(load_rlc(&s), &params);
        check_ids(&d);
        prop_assert_eq!(expand(&x, &d).unwrap().letters, s);
    }

    #[test]
    fn lossless_on_grammar_strings(seed in any::<u64>(), len in 1usize..3000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = grammar_string(&mut rng, len);
        let (d, x) = deflate_bytes(&s, &DeflateParams::default().with_t_sig(2).generalize().tokenized());
        check_ids(&d);
        prop_assert_eq!(expand(&x, &d).unwrap().letters, s);
    }
}
