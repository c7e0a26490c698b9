//! Lossy compression by parselet contraction.
//!
//! Starting from the lossless model, each step replaces the parselet whose replacement by
//! a structurally identical one distorts the string least, re-deflates the lossy
//! expansion and evaluates the codelength (rate plus idealised patch).  The state with
//! the smallest codelength is the minimal sufficient model; the search carries on for a
//! number of steps past the running minimum to escape local minima.

use std::fmt::Write as _;

use parselet_core::canonical::shape_ids;
use parselet_core::{Dictionary, Id, StringData, ALPHABET};
use parselet_deflate::{deflate, expand, load_rlc, DeflateParams};
use parselet_serialize::costs::{patch_bits, rate_bits};
use parselet_serialize::{write_costs, Costs, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Norm {
    /// Sum of absolute letter differences.
    #[default]
    L1,
    /// Euclidean norm of letter differences.
    L2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RdParams {
    pub deflate: DeflateParams,
    /// Steps explored past the last codelength minimum; `Some(0)` is lossless, `None`
    /// explores every reachable state.
    pub patience: Option<usize>,
    pub norm: Norm,
    /// Hard cap on contraction steps.  Unbounded exploration stops after as many steps as
    /// the input has letters.
    pub max_steps: Option<usize>,
}

impl Default for RdParams {
    fn default() -> Self {
        RdParams { deflate: DeflateParams::default(), patience: Some(250), norm: Norm::L1, max_steps: None }
    }
}

impl RdParams {
    pub fn lossless(deflate: DeflateParams) -> Self {
        RdParams { deflate, patience: Some(0), ..Default::default() }
    }

    /// Stable text identifying every parameter that affects the result.
    pub fn fingerprint(&self) -> String {
        let opt = |v: Option<usize>| v.map_or("inf".to_string(), |v| v.to_string());
        format!(
            "{};patience={};norm={:?};max_steps={}",
            self.deflate.fingerprint(),
            opt(self.patience),
            self.norm,
            opt(self.max_steps)
        )
    }
}

/// Letters at the leaves of a parselet, left to right.
pub fn leaf_letters(d: &Dictionary, id: Id) -> Vec<u8> {
    let mut out = Vec::new();
    let mut stack = vec![id];
    while let Some(id) = stack.pop() {
        if id < ALPHABET {
            out.push(id as u8);
            continue;
        }
        let p = d.get(id);
        if p.kind.is_regular() {
            stack.push(p.right.id);
        }
        stack.push(p.left.id);
    }
    out
}

pub fn distortion(a: &[u8], b: &[u8], norm: Norm) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let diffs = a.iter().zip(b).map(|(&x, &y)| (x as f64 - y as f64).abs());
    match norm {
        Norm::L1 => diffs.sum(),
        Norm::L2 => diffs.map(|v| v * v).sum::<f64>().sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Replacement {
    pub from: Id,
    pub to: Id,
    /// `from.count * d(from, to)`.
    pub cost: f64,
}

/// The parselet referenced alone by the whole string, if any.
pub fn axiom(x: &StringData) -> Option<Id> {
    if x.ref_len() != 1 {
        return None;
    }
    x.iter().find_map(|(_, s)| s.key()).map(|k| k.id).filter(|&id| id >= ALPHABET)
}

/// Cheapest replacement among pairs of distinct parselets of identical structure, the
/// axiom excluded from being replaced; ties go to the lower ids.
pub fn select_replacement(d: &Dictionary, axiom: Option<Id>, norm: Norm) -> Option<Replacement> {
    let shapes = shape_ids(d);
    let mut groups: std::collections::BTreeMap<u32, Vec<Id>> = Default::default();
    for id in d.ids() {
        groups.entry(shapes[(id - ALPHABET) as usize]).or_default().push(id);
    }
    let mut best: Option<Replacement> = None;
    for ids in groups.values().filter(|g| g.len() > 1) {
        let leaves: Vec<Vec<u8>> = ids.iter().map(|&id| leaf_letters(d, id)).collect();
        for (i, &p) in ids.iter().enumerate() {
            if Some(p) == axiom {
                continue;
            }
            let count = d.get(p).count as f64;
            for (j, &q) in ids.iter().enumerate() {
                if i == j {
                    continue;
                }
                let cost = count * distortion(&leaves[i], &leaves[j], norm);
                let better = match best {
                    None => true,
                    Some(b) => cost < b.cost || (cost == b.cost && (p, q) < (b.from, b.to)),
                };
                if better {
                    best = Some(Replacement { from: p, to: q, cost });
                }
            }
        }
    }
    best
}

/// Replaces every use of `from` by `to` in the dictionary and the string data.
pub fn rename(d: &Dictionary, x: &StringData, from: Id, to: Id) -> Result<(Dictionary, StringData)> {
    let (nd, map) = d.rebuild(|id| if id == from { to } else { id }, |id| id != from)?;
    let mut y = x.clone();
    y.transcode(|id| {
        if id < ALPHABET {
            id
        } else {
            let id = if id == from { to } else { id };
            map[(id - ALPHABET) as usize].expect("kept entry")
        }
    });
    Ok((nd, y))
}

/// Decode steps of compressed string data.
pub fn logical_depth(x: &StringData, d: &Dictionary) -> Result<u64> {
    Ok(expand(x, d)?.depth)
}

/// A point of the rate-distortion profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfilePoint {
    pub step: usize,
    /// Model and string bits.
    pub rate: u64,
    pub codelength: f64,
    /// Rate plus the patch bits actually written.
    pub disk_bits: u64,
    /// Letters differing from the input.
    pub distortion: u64,
    pub depth: u64,
    pub entries: usize,
    /// Rate of the state the contraction started from.
    pub rate_before: Option<u64>,
    pub replaced: Option<Replacement>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Profile {
    pub points: Vec<ProfilePoint>,
    /// Index of the codelength minimum.
    pub best: usize,
}

impl Profile {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("step,rate,codelength,disk_size,distortion,depth,entries\n");
        for p in &self.points {
            let _ = writeln!(
                s,
                "{},{},{:.3},{},{},{},{}",
                p.step, p.rate, p.codelength, p.disk_bits, p.distortion, p.depth, p.entries
            );
        }
        s
    }

    pub fn best_point(&self) -> &ProfilePoint {
        &self.points[self.best]
    }
}

/// A rate-distortion state with its costs.
#[derive(Debug, Clone)]
pub struct RdState {
    pub dict: Dictionary,
    pub data: StringData,
    pub costs: Costs,
}

impl RdState {
    pub fn lossy(&self) -> Vec<u8> {
        expand(&self.data, &self.dict).expect("state decodes").letters
    }
}

fn point(step: usize, s: &RdState, original: &[u8], rate_before: Option<u64>, replaced: Option<Replacement>) -> Result<ProfilePoint> {
    let patch = if s.costs.n_diffs == 0 { 0 } else { patch_bits(&s.dict, &s.data, original)? };
    Ok(ProfilePoint {
        step,
        rate: s.costs.rate(),
        codelength: s.costs.codelength(),
        disk_bits: s.costs.rate() + patch,
        distortion: s.costs.n_diffs,
        depth: logical_depth(&s.data, &s.dict)?,
        entries: s.dict.len(),
        rate_before,
        replaced,
    })
}

/// Compresses `x`, returning the state of minimal codelength and the profile visited.
pub fn compress(x: &[u8], params: &RdParams) -> Result<(RdState, Profile)> {
    let (dict, data) = deflate(load_rlc(x), &params.deflate);
    let costs = write_costs(&dict, &data, x)?;
    let mut best = RdState { dict, data, costs };
    let mut profile = Profile { points: vec![point(0, &best, x, None, None)?], best: 0 };
    if params.patience == Some(0) {
        return Ok((best, profile));
    }
    let max_steps = params.max_steps.unwrap_or(x.len().max(1));
    let (mut cd, mut cx) = (best.dict.clone(), best.data.clone());
    let mut rate_before = best.costs.rate();
    let mut since_best = 0;
    for step in 1..=max_steps {
        let Some(r) = select_replacement(&cd, axiom(&cx), params.norm) else { break };
        let (nd, nx) = rename(&cd, &cx, r.from, r.to)?;
        let costs = write_costs(&nd, &nx, x)?;
        let state = RdState { dict: nd, data: nx, costs };
        let p = point(step, &state, x, Some(rate_before), Some(r))?;
        let improved = p.codelength < profile.best_point().codelength;
        profile.points.push(p);
        // Re-deflating the lossy expansion exposes new structure; the greedy deflation
        // can also describe it worse than the contracted model, so keep the cheaper one.
        let (dd, dx) = deflate(load_rlc(&state.lossy()), &params.deflate);
        let (m, b) = rate_bits(&dd, &dx)?;
        let fresh = m.total() + b;
        let next = if fresh <= state.costs.rate() {
            rate_before = fresh;
            (dd, dx)
        } else {
            rate_before = state.costs.rate();
            (state.dict.clone(), state.data.clone())
        };
        if improved {
            profile.best = profile.points.len() - 1;
            best = state;
            since_best = 0;
        } else {
            since_best += 1;
            if params.patience.is_some_and(|l| since_best >= l) {
                break;
            }
        }
        (cd, cx) = next;
    }
    Ok((best, profile))
}
