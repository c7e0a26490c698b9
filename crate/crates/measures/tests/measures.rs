use std::collections::BTreeSet;

use parselet_archive::union;
use parselet_core::{Dictionary, Exec};
use parselet_deflate::{deflate_bytes, DeflateParams};
use parselet_measures::{distance, distance_matrix, ncd, ncd_matrix, pc_skeleton, Corpus, Denom, Distance, Measure, MeasureError, Universe};
use parselet_serialize::costs::model_bits;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn text(seed: u64, vocab: &[&str], len: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = String::new();
    while s.len() < len {
        s.push_str(vocab[rng.gen_range(0..vocab.len())]);
        s.push(' ');
    }
    s.truncate(len);
    s.into_bytes()
}

const A: [&str; 6] = ["alpha", "beta", "gamma", "delta", "omega", "sigma"];
const B: [&str; 6] = ["ROUGE", "VERT", "BLEU", "JAUNE", "NOIR", "BLANC"];
const C: [&str; 6] = ["12-34", "56-78", "90-12", "34-56", "78-90", "13-57"];
const MIX: [&str; 6] = ["alpha", "beta", "gamma", "ROUGE", "VERT", "BLEU"];

fn params() -> DeflateParams {
    DeflateParams::default().with_t_sig(4)
}

fn model(s: &[u8]) -> Dictionary {
    deflate_bytes(s, &params()).0
}

fn corpus(strings: &[Vec<u8>]) -> (Corpus, Vec<Dictionary>) {
    let models: Vec<Dictionary> = strings.iter().map(|s| model(s)).collect();
    let names = (0..strings.len()).map(|i| format!("s{i}")).collect();
    (Corpus::new(names, &models, &params().fingerprint(), Exec::Parallel), models)
}

/// Entries identified by their letters and structure.
fn keys(d: &Dictionary) -> BTreeSet<String> {
    d.ids().map(|id| d.expansion_string(id)).collect()
}

fn oracle(models: &[Dictionary], xs: &[usize]) -> BTreeSet<String> {
    xs.iter().flat_map(|&i| keys(&models[i])).collect()
}

fn subsets(n: usize) -> Vec<Vec<usize>> {
    (0..1usize << n).map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect()
}

fn five() -> Vec<Vec<u8>> {
    vec![text(1, &A, 3000), text(2, &B, 4000), text(3, &MIX, 5000), text(4, &A, 2500), text(5, &C, 3500)]
}

#[test]
fn kstar_matches_brute_force_and_axioms() {
    let strings = five();
    let (c, models) = corpus(&strings);
    assert_eq!(c.k(&[], Measure::Kstar), 0);
    assert_eq!(c.k(&[], Measure::KD), 0);
    let all: Vec<usize> = (0..5).collect();
    let k_all = c.k(&all, Measure::Kstar);
    for x in subsets(5) {
        let k = c.k(&x, Measure::Kstar);
        assert_eq!(k as usize, oracle(&models, &x).len(), "{x:?}");
        assert!(k <= k_all);
    }
    for i in 0..5 {
        assert_eq!(c.k(&[i], Measure::Kstar) as usize, models[i].len());
    }
    // Submodularity over every pair of sub-multisets.
    for x in subsets(5) {
        for y in subsets(5) {
            let both: Vec<usize> = x.iter().copied().filter(|i| y.contains(i)).collect();
            let lhs = c.k(&x, Measure::Kstar) + c.k(&y, Measure::Kstar);
            let rhs = c.k_of(&[&x, &y], Measure::Kstar) + c.k(&both, Measure::Kstar);
            assert!(lhs >= rhs, "{x:?} {y:?}");
        }
    }
}

#[test]
fn mutual_information_is_positive_symmetric_and_a_set_count() {
    let strings = five();
    let (c, models) = corpus(&strings);
    let subs = subsets(5);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let (x, y, z) = (&subs[rng.gen_range(0..32)], &subs[rng.gen_range(0..32)], &subs[rng.gen_range(0..32)]);
        let i = c.cond_mutual(x, y, z, Measure::Kstar);
        assert!(i >= 0.0);
        assert_eq!(i, c.cond_mutual(y, x, z, Measure::Kstar));
        // Entries shared by X and Y that Z does not already have.
        let (ox, oy, oz) = (oracle(&models, x), oracle(&models, y), oracle(&models, z));
        let shared = ox.intersection(&oy).filter(|k| !oz.contains(*k)).count();
        assert_eq!(i as usize, shared);
        assert_eq!(c.syntactic_independent(x, y, z), shared == 0);
    }
    let x = [0usize, 3];
    assert_eq!(c.cond_mutual(&x, &x, &[], Measure::Kstar), c.k(&x, Measure::Kstar) as f64);
    // Disjoint alphabets share nothing; a string shares with itself.
    assert!(c.syntactic_independent(&[0], &[1], &[]));
    assert!(!c.syntactic_independent(&[0], &[0], &[]));
    // Conditioning on a superset of the shared structure removes the dependence.
    assert!(!c.syntactic_independent(&[0], &[2], &[]));
    assert!(c.syntactic_independent(&[0], &[2], &[0]));
    assert!(c.syntactic_independent(&[0], &[2], &[3, 2]));
}

#[test]
fn kd_is_symmetric_and_nearly_positive() {
    let strings = five();
    let (c, models) = corpus(&strings);
    for x in 0..5 {
        for y in 0..5 {
            // Independent of the order the union is built in.
            let xy = model_bits(&union(&[models[x].clone(), models[y].clone()], Exec::Sequential).0);
            let yx = model_bits(&union(&[models[y].clone(), models[x].clone()], Exec::Sequential).0);
            assert_eq!(xy, yx);
            assert_eq!(c.k(&[x, y], Measure::KD), xy);
        }
    }
    let subs = subsets(5);
    let mut worst = 0.0f64;
    for x in &subs {
        for z in &subs {
            let raw = c.k_of(&[x, z], Measure::KD) as f64 - c.k(z, Measure::KD) as f64;
            if raw < 0.0 {
                worst = worst.max(-raw / c.k(x, Measure::KD).max(1) as f64);
            }
            assert!(c.relative(x, z, Measure::KD) >= 0.0);
        }
    }
    assert!(worst < 0.01, "relative violation {worst}");
}

#[test]
fn probabilities() {
    let strings = vec![text(1, &A, 3000), text(2, &B, 3000), text(3, &MIX, 3000), b"q".to_vec()];
    let (c, models) = corpus(&strings);
    assert!(models[3].is_empty());
    let u = Universe::new(&c, &[0, 1, 2]).unwrap();
    assert_eq!(u.p(&[]), 1.0);
    assert_eq!(u.p(&[3]), 0.0);
    for x in subsets(4) {
        assert!((0.0..=1.0).contains(&u.p(&x)));
    }
    let single = Universe::new(&c, &[2]).unwrap();
    assert_eq!(single.p(&[2]), 1.0);
    // The union mass is additive on syntactically independent members.
    assert!(c.syntactic_independent(&[0], &[1], &[]));
    assert_eq!(u.mass(&[0, 1]), u.mass(&[0]) + u.mass(&[1]));
    assert_eq!(u.mass(&[0, 1, 2]), 1.0);
    // Conditional probability.
    let p = u.p_given(&[0], &[2]).unwrap();
    assert_eq!(p, u.p(&[0, 2]) / u.p(&[2]));
    assert!(matches!(u.p_given(&[0], &[3]), Err(MeasureError::ZeroProbability)));
    assert!(matches!(Universe::new(&c, &[3]), Err(MeasureError::Incompressible)));
}

#[test]
fn distances() {
    let strings = five();
    let (c, _) = corpus(&strings);
    for i in 0..5 {
        assert_eq!(distance(&c, &[i], &[i], Distance::Nid, Measure::Kstar).unwrap(), 0.0);
        for j in 0..5 {
            let s = distance(&c, &[i], &[j], Distance::Shannon, Measure::Kstar).unwrap();
            assert!(s >= 0.0);
            assert_eq!(s, distance(&c, &[j], &[i], Distance::Shannon, Measure::Kstar).unwrap());
        }
    }
    for which in [Distance::Shannon, Distance::Id, Distance::Nid] {
        for m in [Measure::Kstar, Measure::KD] {
            let mat = distance_matrix(&c, which, m, Exec::Parallel).unwrap();
            assert!(mat.is_symmetric());
            assert_eq!(mat, distance_matrix(&c, which, m, Exec::Sequential).unwrap());
            for i in 0..5 {
                for j in 0..5 {
                    assert_eq!(mat.values[i][j], distance(&c, &[i], &[j], which, m).unwrap());
                }
            }
        }
    }
    let nid = distance_matrix(&c, Distance::Nid, Measure::Kstar, Exec::Parallel).unwrap();
    assert!(nid.values.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
    assert!(nid.values[0][3] < nid.values[0][1]);
    assert!(nid.to_csv().starts_with("name,s0,s1"));
    // Two incompressible strings have no normalised distance.
    let (z, _) = corpus(&[b"q".to_vec(), b"r".to_vec()]);
    assert!(matches!(distance(&z, &[0], &[1], Distance::Nid, Measure::Kstar), Err(MeasureError::Undefined)));
}

#[test]
fn ncd_orders_and_matrix() {
    let strings = vec![text(1, &A, 2000), text(2, &A, 2000), text(3, &B, 2000)];
    let p = DeflateParams::default();
    let m = ncd_matrix(vec!["a".into(), "b".into(), "c".into()], &strings, &p, Exec::Parallel);
    assert_eq!(m.values[0][1], ncd(&strings[0], &strings[1], &p));
    assert_eq!(m.values[1][0], ncd(&strings[1], &strings[0], &p));
    assert!(m.values[0][1] < m.values[0][2]);
}

#[test]
fn independence_statistics() {
    let strings = five();
    let (c, _) = corpus(&strings);
    let (x, y, z) = ([0usize], [2usize], [1usize]);
    let i = c.cond_mutual(&x, &y, &z, Measure::Kstar);
    assert!(i > 0.0);
    let (kx, ky) = (c.k(&x, Measure::Kstar) as f64, c.k(&y, Measure::Kstar) as f64);
    let kxy = c.k_of(&[&x, &y], Measure::Kstar) as f64;
    let stat = |d| c.i_nd(&x, &y, &z, Measure::Kstar, d);
    assert_eq!(stat(Denom::Sum), i / (kx + ky));
    assert_eq!(stat(Denom::Joint), i / kxy);
    assert_eq!(stat(Denom::Min), i / kx.min(ky));
    assert_eq!(stat(Denom::SqrtSum), i / (kx + ky).sqrt());
    // Joint and min denominators are never larger than the sum.
    assert!(stat(Denom::Joint) >= stat(Denom::Sum) && stat(Denom::Min) >= stat(Denom::Sum));
    for d in [Denom::Joint, Denom::Sum, Denom::Min, Denom::SqrtSum] {
        assert_eq!(c.i_nd(&[0], &[1], &[], Measure::Kstar, d), 0.0);
    }
}

#[test]
fn pc_separates_families_and_respects_thresholds() {
    let strings: Vec<Vec<u8>> = (0..3).map(|i| text(20 + i, &A, 2500)).chain((0..3).map(|i| text(30 + i, &B, 2500))).collect();
    let (c, _) = corpus(&strings);
    let g = pc_skeleton(&c, 1e-9, Measure::Kstar, Denom::SqrtSum, Exec::Parallel);
    for &(a, b) in &g.edges {
        assert_eq!(a < 3, b < 3, "cross edge {a}-{b}");
    }
    assert!(g.edges.iter().any(|&(a, _)| a < 3) && g.edges.iter().any(|&(a, _)| a >= 3));
    assert_eq!(g, pc_skeleton(&c, 1e-9, Measure::Kstar, Denom::SqrtSum, Exec::Sequential));
    assert!(g.to_dot().contains("--"));
    // Within one family, no threshold keeps everything and nothing survives a huge one.
    let fam: Vec<Vec<u8>> = (0..4).map(|i| text(40 + i, &MIX, 2000)).collect();
    let (f, _) = corpus(&fam);
    assert_eq!(pc_skeleton(&f, 0.0, Measure::Kstar, Denom::SqrtSum, Exec::Parallel).edges.len(), 6);
    assert!(pc_skeleton(&f, f64::INFINITY, Measure::KD, Denom::Sum, Exec::Parallel).edges.is_empty());
}

#[test]
fn mixed_parameters_are_rejected() {
    let d = model(&text(1, &A, 1000));
    let r = Corpus::from_models(vec!["a".into(), "b".into()], vec![(d.clone(), "t=4".into()), (d, "t=6".into())], Exec::Sequential);
    assert!(matches!(r, Err(MeasureError::MixedParams(..))));
}

mod props {
    use super::*;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn kstar_axioms_on_random_corpora(seed in any::<u64>(), n in 2usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let vocabs = [&A[..], &B[..], &C[..], &MIX[..]];
            let strings: Vec<Vec<u8>> = (0..n)
                .map(|_| {
                    let (v, len) = (rng.gen_range(0..4), rng.gen_range(100..1500));
                    text(rng.gen(), vocabs[v], len)
                })
                .collect();
            let (c, models) = corpus(&strings);
            let subs = subsets(n);
            for x in &subs {
                prop_assert_eq!(c.k(x, Measure::Kstar) as usize, oracle(&models, x).len());
                for y in &subs {
                    let both: Vec<usize> = x.iter().copied().filter(|i| y.contains(i)).collect();
                    prop_assert!(c.k(x, Measure::Kstar) + c.k(y, Measure::Kstar)
                        >= c.k_of(&[x, y], Measure::Kstar) + c.k(&both, Measure::Kstar));
                    prop_assert_eq!(c.cond_mutual(x, y, &[], Measure::Kstar), c.cond_mutual(y, x, &[], Measure::Kstar));
                }
            }
        }
    }
}
