//! Single-string grammar inference.
//!
//! [`deflate`] repeatedly replaces the most frequent adjacent pair of references by a new
//! conjunction parselet (Occam), optionally preceded by cheap generalisations into options
//! and disjunctions (Epicurus).  [`expand`](expand::expand) is the inverse.

pub mod compile;
pub mod expand;
pub mod search;

use parselet_core::index::Indexed;
use parselet_core::{Dictionary, Kind, LetterSet, Loc, Op, RefKey, Slot, StringData};

pub use expand::{expand, Expansion};

#[derive(Debug, Clone, PartialEq)]
pub struct DeflateParams {
    /// Minimum number of occurrences for a conjunction.
    pub t_sig: u32,
    /// Options are accepted when their cost is below this; `0` disables them.
    pub t_opt: f64,
    /// Disjunctions are accepted when their cost is below this; `0` disables them.
    pub t_alt: f64,
    /// Tokenizer separators: a first pass forbids these letters as leaves, a second pass
    /// lifts the restriction.
    pub separators: Option<LetterSet>,
}

impl Default for DeflateParams {
    fn default() -> Self {
        DeflateParams { t_sig: 6, t_opt: 0.0, t_alt: 0.0, separators: None }
    }
}

impl DeflateParams {
    pub fn with_t_sig(mut self, t_sig: u32) -> Self {
        assert!(t_sig >= 1, "t_sig must be at least 1");
        self.t_sig = t_sig;
        self
    }

    /// Enables options and disjunctions with the usual thresholds of 2 bits.
    pub fn generalize(mut self) -> Self {
        self.t_opt = 2.0;
        self.t_alt = 2.0;
        self
    }

    /// Tokenizes on every non-alphanumeric byte.
    pub fn tokenized(mut self) -> Self {
        self.separators = Some(LetterSet::non_alphanumeric());
        self
    }

    /// Short stable description, used to key caches.
    pub fn fingerprint(&self) -> String {
        let seps = match &self.separators {
            None => "none".to_string(),
            Some(s) => s.iter().map(|c| format!("{c:02x}")).collect(),
        };
        format!("tsig={};topt={};talt={};seps={}", self.t_sig, self.t_opt, self.t_alt, seps)
    }
}

/// Loads bytes as string data with runs of equal letters run-length coded.
pub fn load_rlc(bytes: &[u8]) -> StringData {
    let mut x = StringData::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let mut j = i + 1;
        while j < bytes.len() && bytes[j] == c {
            j += 1;
        }
        if j - i > 1 {
            x.push_back(Slot::reference(c as u32, Op::Repeat));
            x.push_back(Slot::uint((j - i) as u32));
        } else {
            x.push_back(Slot::reference(c as u32, Op::Once));
        }
        i = j;
    }
    x
}

/// Counters describing what a deflation did.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DeflateStats {
    pub conjunctions: usize,
    pub options: usize,
    pub disjunctions: usize,
    pub iterations: usize,
}

/// Deflates RLC-loaded string data into a dictionary and compiled string data.
pub fn deflate(x: StringData, params: &DeflateParams) -> (Dictionary, StringData) {
    let (d, x, _) = deflate_with_stats(Dictionary::new(), x, params);
    (d, x)
}

/// Deflation continuing from an existing dictionary whose ids `x` may already reference.
pub fn deflate_with_stats(
    mut dict: Dictionary,
    x: StringData,
    params: &DeflateParams,
) -> (Dictionary, StringData, DeflateStats) {
    assert!(params.t_sig >= 1, "t_sig must be at least 1");
    let mut ix = Indexed::new(x);
    let mut stats = DeflateStats::default();
    if let Some(s) = &params.separators {
        run_pass(&mut dict, &mut ix, params, Some(s), &mut stats);
    }
    run_pass(&mut dict, &mut ix, params, None, &mut stats);
    (dict, ix.into_data().compacted(), stats)
}

struct Purger {
    erased: usize,
}

impl Purger {
    fn note(&mut self, ix: &mut Indexed, erased: usize) {
        self.erased += erased;
        if self.erased > ix.index().ref_len().max(64) {
            ix.purge_empty();
            self.erased = 0;
        }
    }
}

fn run_pass(
    dict: &mut Dictionary,
    ix: &mut Indexed,
    params: &DeflateParams,
    seps: Option<&LetterSet>,
    stats: &mut DeflateStats,
) {
    let mut purger = Purger { erased: 0 };
    // Generalisations do not shrink the string, so they get a finite budget.
    let mut budget = ix.index().ref_len();
    loop {
        stats.iterations += 1;
        if params.t_opt > 0.0 && budget > 0 {
            if let Some(c) = search::most_promising_option(ix.data(), ix.index(), dict, seps) {
                if c.cost < params.t_opt {
                    budget -= 1;
                    let (kind, l, r) = search::option_node(&c);
                    let (p, _) = dict.intern(kind, l, r, 0);
                    let mut n = 0;
                    for &loc in &c.locs {
                        n += compile::compile_option(ix, loc, c.left, c.optional, c.next, p) as u64;
                    }
                    dict.add_count(p, n);
                    finish(ix, &c.locs, p, &mut purger, c.with);
                    stats.options += 1;
                }
            }
        }
        if params.t_alt > 0.0 && budget > 0 {
            if let Some(c) = search::most_promising_disjunction(ix.data(), ix.index(), dict, seps) {
                if c.cost < params.t_alt {
                    budget -= 1;
                    let (kind, l, r) = search::disjunction_node(&c);
                    let (p, _) = dict.intern(kind, l, r, 0);
                    let mut n = 0;
                    for &loc in &c.locs {
                        n += compile::compile_disjunction(ix, loc, c.left, c.right, p) as u64;
                    }
                    dict.add_count(p, n);
                    finish(ix, &c.locs, p, &mut purger, 0);
                    stats.disjunctions += 1;
                }
            }
        }
        let Some(c) = search::most_frequent_conjunction(ix.index(), dict, seps, params.t_sig) else {
            break;
        };
        let (p, _) = dict.intern(Kind::Conjunction, c.left, c.right, 0);
        let mut n = 0;
        for &loc in &c.locs {
            n += compile::compile_conjunction(ix, loc, c.left, c.right, p) as usize;
        }
        dict.add_count(p, n as u64);
        finish(ix, &c.locs, p, &mut purger, n);
        stats.conjunctions += 1;
    }
    ix.purge_empty();
}

fn finish(ix: &mut Indexed, locs: &[Loc], p: u32, purger: &mut Purger, erased: usize) {
    let live: Vec<Loc> = locs.iter().copied().filter(|&l| ix.data().get(l).key() == Some(RefKey::once(p))).collect();
    let before = ix.index().ref_len();
    compile::rlc(ix, &live, p);
    purger.note(ix, erased + before - ix.index().ref_len());
}

/// Compresses bytes losslessly: load with RLC, then deflate.
pub fn deflate_bytes(bytes: &[u8], params: &DeflateParams) -> (Dictionary, StringData) {
    deflate(load_rlc(bytes), params)
}
