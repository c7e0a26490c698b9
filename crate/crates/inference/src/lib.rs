//! Arbitrary models applied to new data.
//!
//! [`deflate_cond`] describes a string with parselets taken from a given dictionary only:
//! no new parselet is ever learnt.  Conjunctions are reused when frequent enough;
//! options and disjunctions are reused wherever another entry of the dictionary puts them
//! in context.  The unused part of the dictionary is then trimmed away, so a hypothesis
//! is only charged for what it actually explains.  [`score_hypothesis`] turns this into
//! a codelength, [`model_from_prior`] builds hypotheses from example strings.

use parselet_archive::{compress_one, ArchiveError, Cache, Item};
use parselet_core::index::Indexed;
use parselet_core::{Dictionary, Exec, Id, Kind, Loc, Op, RefKey, StringData, ALPHABET};
use parselet_deflate::compile::{compile_conjunction, compile_disjunction, compile_option, rlc};
use parselet_deflate::{deflate_bytes, load_rlc, DeflateParams};
use parselet_rd::RdParams;
use parselet_serialize::costs::rate_bits;

pub type Result<T> = std::result::Result<T, ArchiveError>;

/// Output of a conditional deflation.
#[derive(Debug, Clone)]
pub struct CondDeflation {
    /// Entries actually used, renumbered densely.
    pub dict: Dictionary,
    pub data: StringData,
    /// Given-model id to `dict` id, `None` for unused entries.
    pub map: Vec<Option<Id>>,
    /// Sweeps over the model that reused at least one entry.
    pub sweeps: usize,
}

impl CondDeflation {
    /// Fraction of the given model that was reused.
    pub fn reuse(&self, model: &Dictionary) -> f64 {
        if model.is_empty() {
            0.0
        } else {
            self.dict.len() as f64 / model.len() as f64
        }
    }
}

/// Where an option or disjunction sits inside its parents: the sibling on the other side.
#[derive(Debug, Clone, Copy)]
enum Context {
    /// Parent is `(sibling, p)`.
    After(RefKey),
    /// Parent is `(p, sibling)`.
    Before(RefKey),
}

fn contexts(d: &Dictionary) -> Vec<Vec<Context>> {
    let mut out = vec![Vec::new(); d.len()];
    for (_, q) in d.entries() {
        if q.kind != Kind::Conjunction || q.is_option() {
            continue;
        }
        if q.right.id >= ALPHABET && q.right.op == Op::Once {
            out[(q.right.id - ALPHABET) as usize].push(Context::After(q.left));
        }
        if q.left.id >= ALPHABET && q.left.op == Op::Once {
            out[(q.left.id - ALPHABET) as usize].push(Context::Before(q.right));
        }
    }
    out
}

fn key_at(ix: &Indexed, loc: Loc) -> Option<RefKey> {
    (loc != parselet_core::NIL).then(|| ix.data().get(loc).key()).flatten()
}

fn sorted(mut v: Vec<Loc>) -> Vec<Loc> {
    v.sort_unstable();
    v.dedup();
    v
}

/// Left-slot locations of `l r` pairs.
fn pairs(ix: &Indexed, l: RefKey, r: RefKey) -> Vec<Loc> {
    ix.index().occurrences(l, r).map(|s| s.iter().copied().collect()).unwrap_or_default()
}

fn find_disjunction(ix: &Indexed, p: &parselet_core::Parselet, ctx: &[Context]) -> Vec<Loc> {
    let mut locs = Vec::new();
    for &c in ctx {
        for alt in [p.left, p.right] {
            match c {
                Context::After(s) => locs.extend(pairs(ix, s, alt).into_iter().map(|l| ix.data().next_ref(l))),
                Context::Before(s) => locs.extend(pairs(ix, alt, s)),
            }
        }
    }
    sorted(locs)
}

/// Occurrences of `L C R` and `L R` for every right context `R`, with that context.
fn find_option(ix: &Indexed, p: &parselet_core::Parselet, ctx: &[Context]) -> Vec<(Loc, RefKey)> {
    let c = RefKey::once(p.right.id);
    let mut out = Vec::new();
    for &cx in ctx {
        let Context::Before(r) = cx else { continue };
        for loc in pairs(ix, p.left, c) {
            if key_at(ix, ix.data().next_ref(ix.data().next_ref(loc))) == Some(r) {
                out.push((loc, r));
            }
        }
        out.extend(pairs(ix, p.left, r).into_iter().map(|l| (l, r)));
    }
    out.sort_unstable_by_key(|&(l, _)| l);
    out.dedup_by_key(|&mut (l, _)| l);
    out
}

/// Describes `x` (run-length loaded letters) with entries of `model` only.
///
/// Entries are visited in id order, which is topological, so children are always tried
/// before their parents.  Sweeps repeat until one reuses nothing.
pub fn deflate_cond(x: StringData, model: &Dictionary, t_sig: u32) -> CondDeflation {
    let t_sig = t_sig.max(1);
    let ctx = contexts(model);
    let mut used = vec![0u64; model.len()];
    let mut ix = Indexed::new(x);
    let mut sweeps = 0;
    loop {
        let mut reused = 0;
        for (id, p) in model.entries() {
            let i = (id - ALPHABET) as usize;
            if used[i] > 0 || !p.kind.is_regular() {
                continue;
            }
            let mut landed = Vec::new();
            if p.kind == Kind::Disjunction {
                for loc in find_disjunction(&ix, p, &ctx[i]) {
                    if compile_disjunction(&mut ix, loc, p.left, p.right, id) {
                        landed.push(loc);
                    }
                }
            } else if p.is_option() {
                for (loc, r) in find_option(&ix, p, &ctx[i]) {
                    if compile_option(&mut ix, loc, p.left, RefKey::once(p.right.id), r, id) {
                        landed.push(loc);
                    }
                }
            } else {
                let locs = sorted(pairs(&ix, p.left, p.right));
                if locs.len() < t_sig as usize {
                    continue;
                }
                for loc in locs {
                    if compile_conjunction(&mut ix, loc, p.left, p.right, id) {
                        landed.push(loc);
                    }
                }
            }
            if landed.is_empty() {
                continue;
            }
            used[i] = landed.len() as u64;
            reused += 1;
            let live: Vec<Loc> = landed.into_iter().filter(|&l| key_at(&ix, l) == Some(RefKey::once(id))).collect();
            rlc(&mut ix, &live, id);
        }
        ix.purge_empty();
        if reused == 0 {
            break;
        }
        sweeps += 1;
    }
    trim(model, ix.into_data().compacted(), &used, sweeps)
}

/// Keeps the used entries (and their children), renumbers them densely from the alphabet
/// size and transcodes the string.
fn trim(model: &Dictionary, mut data: StringData, used: &[u64], sweeps: usize) -> CondDeflation {
    let mut counted = model.clone();
    for id in model.ids() {
        counted.set_count(id, used[(id - ALPHABET) as usize]);
    }
    let (dict, map) = counted
        .rebuild(|id| id, |id| used[(id - ALPHABET) as usize] > 0)
        .expect("model is well formed");
    data.transcode(|id| if id < ALPHABET { id } else { map[(id - ALPHABET) as usize].expect("used entry is kept") });
    CondDeflation { dict, data, map, sweeps }
}

/// A model absorbing all of `z`: lossless deflation with a significance threshold of one.
/// No rate-distortion search is run, since it could rename parts of the prior away.
pub fn model_from_prior(z: &[u8], params: &DeflateParams) -> Dictionary {
    deflate_bytes(z, &params.clone().with_t_sig(1)).0
}

/// Codelength of a string under a hypothesis.
#[derive(Debug, Clone)]
pub struct Score {
    pub model_bits: u64,
    pub string_bits: u64,
    /// Entries of the hypothesis that were used.
    pub entries: usize,
    /// Fraction of the hypothesis that was used.
    pub reuse: f64,
    pub sweeps: usize,
}

impl Score {
    pub fn bits(&self) -> u64 {
        self.model_bits + self.string_bits
    }
}

/// Scores already denoised letters against `model`.
pub fn score_letters(x_hat: &[u8], model: &Dictionary, t_sig: u32) -> Result<Score> {
    let c = deflate_cond(load_rlc(x_hat), model, t_sig);
    let (m, s) = rate_bits(&c.dict, &c.data)?;
    Ok(Score { model_bits: m.total(), string_bits: s, entries: c.dict.len(), reuse: c.reuse(model), sweeps: c.sweeps })
}

/// Scores `x` against `model`.  The string is first denoised by the usual compression
/// (through the cache when given), then described with the model.
pub fn score_hypothesis(x: &[u8], model: &Dictionary, params: &RdParams, cache: Option<&Cache>) -> Result<Score> {
    let (c, _) = compress_one(&Item::bytes(x), params, cache)?;
    score_letters(&c.lossy(), model, params.deflate.t_sig)
}

/// Scores `x` against every hypothesis, one worker per hypothesis.
pub fn score_all(
    x: &[u8],
    models: &[Dictionary],
    params: &RdParams,
    cache: Option<&Cache>,
    exec: Exec,
) -> Result<Vec<Score>> {
    let (c, _) = compress_one(&Item::bytes(x), params, cache)?;
    let x_hat = c.lossy();
    exec.map(models, |m| score_letters(&x_hat, m, params.deflate.t_sig)).into_iter().collect()
}
