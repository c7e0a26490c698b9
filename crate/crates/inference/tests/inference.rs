use std::collections::BTreeSet;

use parselet_archive::{compress_one, merge, Item};
use parselet_core::{Dictionary, Kind, RefKey, ALPHABET};
use parselet_deflate::expand::expand_plain;
use parselet_deflate::{deflate_bytes, expand, load_rlc, DeflateParams};
use parselet_inference::{deflate_cond, model_from_prior, score_hypothesis, score_letters};
use parselet_rd::RdParams;
use parselet_serialize::costs::rate_bits;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sentences over a small vocabulary.
fn grammar(seed: u64, vocab: &[&str], len: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = String::new();
    while s.len() < len {
        let n = rng.gen_range(3..7);
        for i in 0..n {
            if i > 0 {
                s.push(' ');
            }
            s.push_str(vocab[rng.gen_range(0..vocab.len())]);
        }
        s.push_str(". ");
    }
    s.truncate(len);
    s.into_bytes()
}

const A: [&str; 6] = ["the", "cat", "sat", "on", "mat", "and"];
const B: [&str; 6] = ["une", "souris", "verte", "qui", "courait", "dans"];
const UPPER: [&str; 4] = ["XYZ", "QQW", "ZZX", "WWQ"];

fn rd() -> RdParams {
    RdParams { patience: Some(30), ..Default::default() }
}

fn as_set(d: &Dictionary) -> BTreeSet<String> {
    d.ids().map(|id| d.expansion_string(id)).collect()
}

fn empty_score(x_hat: &[u8]) -> u64 {
    let (m, s) = rate_bits(&Dictionary::new(), &load_rlc(x_hat)).unwrap();
    m.total() + s
}

#[test]
fn self_hypothesis_is_close_to_own_compression() {
    let x = grammar(1, &A, 8000);
    let (c, _) = compress_one(&Item::bytes(x.clone()), &rd(), None).unwrap();
    let own = rate_bits(&c.dict, &c.data).unwrap();
    let own = own.0.total() + own.1;
    let s = score_hypothesis(&x, &c.dict, &rd(), None).unwrap();
    assert!(s.bits() as f64 <= 1.15 * own as f64, "{} vs {own}", s.bits());
    assert!(s.reuse > 0.5, "reuse {}", s.reuse);
    assert!(s.sweeps <= 6);
    let empty = score_hypothesis(&x, &Dictionary::new(), &rd(), None).unwrap();
    assert!(empty.bits() > s.bits());
}

#[test]
fn empty_hypothesis_is_entropy_coding_only() {
    let x_hat = grammar(2, &A, 3000);
    let c = deflate_cond(load_rlc(&x_hat), &Dictionary::new(), 6);
    assert!(c.dict.is_empty());
    assert_eq!(c.data.values(), load_rlc(&x_hat).values());
    let s = score_letters(&x_hat, &Dictionary::new(), 6).unwrap();
    assert_eq!(s.bits(), empty_score(&x_hat));
    assert_eq!((s.entries, s.reuse), (0, 0.0));
}

#[test]
fn unrelated_alphabet_reuses_nothing() {
    let x_hat = grammar(3, &A, 3000);
    let model = model_from_prior(&grammar(4, &UPPER, 2000), &DeflateParams::default());
    assert!(!model.is_empty());
    let s = score_letters(&x_hat, &model, 6).unwrap();
    assert_eq!(s.entries, 0);
    assert_eq!(s.bits(), empty_score(&x_hat));
}

#[test]
fn strings_prefer_their_own_grammar() {
    let ma = model_from_prior(&grammar(5, &A, 4000), &DeflateParams::default());
    let mb = model_from_prior(&grammar(6, &B, 4000), &DeflateParams::default());
    for seed in 10..14 {
        let xa = grammar(seed, &A, 3000);
        let xb = grammar(seed + 100, &B, 3000);
        let (sa_a, sa_b) = (score_letters(&xa, &ma, 6).unwrap(), score_letters(&xa, &mb, 6).unwrap());
        let (sb_a, sb_b) = (score_letters(&xb, &ma, 6).unwrap(), score_letters(&xb, &mb, 6).unwrap());
        assert!(sa_a.bits() < sa_b.bits(), "{} vs {}", sa_a.bits(), sa_b.bits());
        assert!(sb_b.bits() < sb_a.bits(), "{} vs {}", sb_b.bits(), sb_a.bits());
        assert!(sa_a.bits() < empty_score(&xa));
    }
}

#[test]
fn prior_model_covers_the_prior() {
    let d = model_from_prior(b"abcd", &DeflateParams::default());
    let top = d.ids().last().unwrap();
    assert_eq!(expand_plain(&d, top).unwrap(), b"abcd");
    // The same model serves many strings.
    let d = model_from_prior(&grammar(7, &A, 2000), &DeflateParams::default());
    for seed in 20..23 {
        let x = grammar(seed, &A, 1500);
        let s = score_letters(&x, &d, 2).unwrap();
        assert!(s.bits() < empty_score(&x));
    }
}

#[test]
fn unused_entries_cost_nothing() {
    let x_hat = grammar(8, &A, 3000);
    let d = model_from_prior(&grammar(9, &A, 3000), &DeflateParams::default());
    let base = score_letters(&x_hat, &d, 6).unwrap();
    let mut bigger = d.clone();
    merge(&mut bigger, &model_from_prior(&grammar(10, &UPPER, 3000), &DeflateParams::default()));
    assert!(bigger.len() > d.len());
    let s = score_letters(&x_hat, &bigger, 6).unwrap();
    assert_eq!(s.bits(), base.bits());
    assert_eq!(s.entries, base.entries);
}

#[test]
fn options_and_disjunctions_are_reused_in_context() {
    let o = |c: char| RefKey::once(c as u32);
    let mut d = Dictionary::new();
    let (alt, _) = d.intern(Kind::Disjunction, o('x'), o('y'), 0);
    let (q, _) = d.intern(Kind::Conjunction, o('a'), RefKey::once(alt), 0);
    let (opt, _) = d.intern(Kind::Conjunction, o('b'), RefKey::new('c' as u32, parselet_core::Op::Optional), 0);
    let (r, _) = d.intern(Kind::Conjunction, RefKey::once(opt), o('d'), 0);
    // A disjunction without a parent is never reused.
    d.intern(Kind::Disjunction, o('m'), o('n'), 0);
    let x = b"ax ay bcd bd ax m n ay x".to_vec();
    let c = deflate_cond(load_rlc(&x), &d, 2);
    assert_eq!(expand(&c.data, &c.dict).unwrap().letters, x);
    assert_eq!(c.dict.len(), 4);
    for id in [alt, q, opt, r] {
        assert!(c.map[(id - ALPHABET) as usize].is_some());
    }
    let qn = c.map[(q - ALPHABET) as usize].unwrap();
    assert_eq!(c.dict.get(qn).count, 4);
    // The lone `x` has no context and stays a letter.
    assert_eq!(c.data.iter().filter_map(|(_, s)| s.key()).filter(|k| *k == o('x')).count(), 1);
}

#[test]
fn generalised_models_transfer() {
    let params = DeflateParams::default().with_t_sig(2).generalize();
    let (d, _) = deflate_bytes(&grammar(11, &A, 4000), &params);
    let x = grammar(12, &A, 4000);
    let c = deflate_cond(load_rlc(&x), &d, 2);
    assert_eq!(expand(&c.data, &c.dict).unwrap().letters, x);
    assert!(as_set(&c.dict).is_subset(&as_set(&d)));
    assert!(c.sweeps <= 6, "{} sweeps", c.sweeps);
    if d.entries().any(|(_, p)| p.kind == Kind::Disjunction || p.is_option()) {
        assert!(c.dict.entries().any(|(_, p)| p.kind == Kind::Disjunction || p.is_option()));
    }
}

fn random_text(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
    let alpha = b"abcde ";
    (0..n).map(|_| alpha[rng.gen_range(0..alpha.len())]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conditional_deflation_is_lossless_and_a_subset(seed in any::<u64>(), t_sig in 1u32..4, generalize: bool) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (ln, lz) = (rng.gen_range(0..400), rng.gen_range(1..400));
        let x = random_text(&mut rng, ln);
        let z = random_text(&mut rng, lz);
        let mut params = DeflateParams::default().with_t_sig(2);
        if generalize {
            params = params.generalize();
        }
        let (d, _) = deflate_bytes(&z, &params);
        let c = deflate_cond(load_rlc(&x), &d, t_sig);
        prop_assert_eq!(&expand(&c.data, &c.dict).unwrap().letters, &x);
        prop_assert!(as_set(&c.dict).is_subset(&as_set(&d)));
        prop_assert!(c.data.ref_len() <= load_rlc(&x).ref_len());
        let used: Vec<bool> = c.data.iter().filter_map(|(_, s)| s.key()).map(|k| k.id >= ALPHABET).collect();
        prop_assert!(c.dict.is_empty() || used.iter().any(|&u| u));
    }
}
