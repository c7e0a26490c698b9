//! Candidate searches over the pair index.
//!
//! Costs are in bits and compare the description before and after introducing the
//! candidate (replacement) plus the expected saving for later occurrences (incentive).
//! Counts are live tallies from the index; `len` is the current number of references.

use parselet_core::index::PairIndex;
use parselet_core::{Dictionary, Kind, LetterSet, Loc, Op, RefKey, StringData, ALPHABET, NIL};
use rustc_hash::FxHashMap;

/// `-log2 f`, infinite for `f <= 0`.
#[inline]
pub fn l(f: f64) -> f64 {
    if f <= 0.0 {
        f64::INFINITY
    } else {
        -f.log2()
    }
}

/// Cost of the option parselet `L C?` over `n_c` occurrences of `L C R` and `n_cb`
/// occurrences of `L R`.
pub fn option_cost(n_c: f64, n_cb: f64, c_l: f64, c_c: f64, c_r: f64, len: f64) -> f64 {
    let n = n_c + n_cb;
    let replacement = n * (1.0 + l(n / (len - n_c)) - l(c_l / len)) - n_c * l(c_c / len);
    let incentive = n * (l(n / (len - n_c + n)) - l(n / (len - n_c)) - l(c_r / (len - n_c)));
    replacement + incentive
}

/// Cost of the disjunction `A0 | A1` after `L`, with `n0`/`n1` occurrences.
pub fn disjunction_cost(n0: f64, n1: f64, c0: f64, c1: f64, c_l: f64, len: f64) -> f64 {
    let n = n0 + n1;
    let replacement = n * (1.0 + l(n / len)) - n0 * l(c0 / len) - n1 * l(c1 / len);
    let incentive = n * (l(n / (len - n)) - l(n / len) - l(c_l / len));
    replacement + incentive
}

fn leaves(d: &Dictionary, k: RefKey) -> LetterSet {
    d.leaves(k.id)
}

fn forbidden(d: &Dictionary, seps: Option<&LetterSet>, keys: &[RefKey]) -> bool {
    match seps {
        None => false,
        Some(s) => keys.iter().any(|&k| leaves(d, k).intersects(s)),
    }
}

fn sorted(set: impl IntoIterator<Item = Loc>) -> Vec<Loc> {
    let mut v: Vec<Loc> = set.into_iter().collect();
    v.sort_unstable();
    v
}

#[derive(Debug, Clone)]
pub struct ConjunctionCandidate {
    pub left: RefKey,
    pub right: RefKey,
    pub locs: Vec<Loc>,
}

/// Most frequent admissible pair, ties broken by the lowest `(left, right)` keys.
pub fn most_frequent_conjunction(
    ix: &PairIndex,
    d: &Dictionary,
    seps: Option<&LetterSet>,
    min_count: u32,
) -> Option<ConjunctionCandidate> {
    for (count, (l, r)) in ix.by_count() {
        if count < min_count.max(1) {
            return None;
        }
        if forbidden(d, seps, &[l, r]) {
            continue;
        }
        let locs = sorted(ix.occurrences(l, r)?.iter().copied());
        return Some(ConjunctionCandidate { left: l, right: r, locs });
    }
    None
}

#[derive(Debug, Clone)]
pub struct OptionCandidate {
    pub left: RefKey,
    pub optional: RefKey,
    pub next: RefKey,
    pub with: usize,
    pub without: usize,
    pub cost: f64,
    /// Left-slot locations of both `L C R` and `L R` occurrences.
    pub locs: Vec<Loc>,
}

/// Option candidate covering the most occurrences of `L C R` and `L R` together.
pub fn most_promising_option(
    x: &StringData,
    ix: &PairIndex,
    d: &Dictionary,
    seps: Option<&LetterSet>,
) -> Option<OptionCandidate> {
    let mut triples: FxHashMap<(RefKey, RefKey, RefKey), Vec<Loc>> = FxHashMap::default();
    for (&lk, row) in ix.rows() {
        for (&ck, locs) in row {
            if ck.op != Op::Once {
                continue;
            }
            for &loc in locs {
                let cl = x.next_ref(loc);
                if cl == NIL {
                    continue;
                }
                let rl = x.next_ref(cl);
                if rl == NIL {
                    continue;
                }
                let rk = x.get(rl).key().expect("reference");
                if rk == ck || ix.pair_count(lk, rk) == 0 {
                    continue;
                }
                triples.entry((lk, ck, rk)).or_default().push(loc);
            }
        }
    }
    let mut best: Option<((usize, std::cmp::Reverse<(RefKey, RefKey, RefKey)>), (RefKey, RefKey, RefKey))> = None;
    for (&(lk, ck, rk), locs) in &triples {
        if lk.id >= ALPHABET {
            let p = d.get(lk.id);
            if p.is_option() && p.right.id == ck.id {
                continue;
            }
        }
        if forbidden(d, seps, &[lk, ck]) {
            continue;
        }
        let n = locs.len() + ix.pair_count(lk, rk);
        let key = (n, std::cmp::Reverse((lk, ck, rk)));
        if best.as_ref().is_none_or(|(b, _)| key > *b) {
            best = Some((key, (lk, ck, rk)));
        }
    }
    let (_, (lk, ck, rk)) = best?;
    let with = triples[&(lk, ck, rk)].len();
    let without = ix.pair_count(lk, rk);
    let len = ix.ref_len() as f64;
    let cost = option_cost(
        with as f64,
        without as f64,
        ix.id_count(lk.id) as f64,
        ix.id_count(ck.id) as f64,
        ix.id_count(rk.id) as f64,
        len,
    );
    let locs = sorted(triples[&(lk, ck, rk)].iter().copied().chain(ix.occurrences(lk, rk).into_iter().flatten().copied()));
    Some(OptionCandidate { left: lk, optional: ck, next: rk, with, without, cost, locs })
}

#[derive(Debug, Clone)]
pub struct DisjunctionCandidate {
    pub context: RefKey,
    pub left: RefKey,
    pub right: RefKey,
    pub n_left: usize,
    pub n_right: usize,
    pub cost: f64,
    /// Locations of the alternatives themselves (the right slot of each pair).
    pub locs: Vec<Loc>,
}

/// Imbalance tolerated between the two alternatives.
pub const MAX_IMBALANCE: f64 = 0.1;

/// For every left context, the two most frequent right neighbours forming a balanced pair;
/// the best total over all contexts wins, ties by lowest keys.
pub fn most_promising_disjunction(
    x: &StringData,
    ix: &PairIndex,
    d: &Dictionary,
    seps: Option<&LetterSet>,
) -> Option<DisjunctionCandidate> {
    type Key = (usize, std::cmp::Reverse<(RefKey, RefKey, RefKey)>);
    let mut best: Option<(Key, RefKey, RefKey, RefKey, usize, usize)> = None;
    for (&lk, row) in ix.rows() {
        let mut entries: Vec<(usize, RefKey)> = row
            .iter()
            .filter(|(&rk, _)| !forbidden(d, seps, &[rk]))
            .map(|(&rk, locs)| (locs.len(), rk))
            .collect();
        if entries.len() < 2 {
            continue;
        }
        entries.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for w in entries.windows(2) {
            let ((n0, a0), (n1, a1)) = (w[0], w[1]);
            if a0.id == a1.id {
                continue;
            }
            if (n0 - n1) as f64 > MAX_IMBALANCE * n0 as f64 {
                continue;
            }
            let (lo, hi, nlo, nhi) = if a0 < a1 { (a0, a1, n0, n1) } else { (a1, a0, n1, n0) };
            let key = (n0 + n1, std::cmp::Reverse((lk, lo, hi)));
            if best.as_ref().is_none_or(|b| key > b.0) {
                best = Some((key, lk, lo, hi, nlo, nhi));
            }
            break;
        }
    }
    let (_, lk, a0, a1, n0, n1) = best?;
    let len = ix.ref_len() as f64;
    let cost = disjunction_cost(
        n0 as f64,
        n1 as f64,
        ix.id_count(a0.id) as f64,
        ix.id_count(a1.id) as f64,
        ix.id_count(lk.id) as f64,
        len,
    );
    let locs = sorted(
        ix.occurrences(lk, a0)
            .into_iter()
            .flatten()
            .chain(ix.occurrences(lk, a1).into_iter().flatten())
            .map(|&l| x.next_ref(l)),
    );
    Some(DisjunctionCandidate { context: lk, left: a0, right: a1, n_left: n0, n_right: n1, cost, locs })
}

/// Kind used when registering a candidate in the dictionary.
pub fn option_node(c: &OptionCandidate) -> (Kind, RefKey, RefKey) {
    (Kind::Conjunction, c.left, RefKey::new(c.optional.id, Op::Optional))
}

pub fn disjunction_node(c: &DisjunctionCandidate) -> (Kind, RefKey, RefKey) {
    (Kind::Disjunction, c.left, c.right)
}
