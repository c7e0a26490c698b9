//! Information calculus on string multisets.
//!
//! A multiset is described by the union of the models of its members.  Two measures are
//! provided: [`Measure::Kstar`] counts the entries of that union, [`Measure::KD`] counts
//! the bits needed to write it.  Everything else (relative and mutual information,
//! distances, independence statistics, probabilities, PC skeletons) derives from them.
//!
//! A [`Corpus`] merges all models once; members are then plain indices and every entry
//! has one id shared by all members, so unions and intersections are set operations.

pub mod dist;
pub mod pc;
pub mod prob;

use std::collections::HashMap;
use std::str::FromStr;
use std::sync::Mutex;

use parselet_archive::{kompress, union, Cache, Item};
use parselet_core::{Dictionary, Exec, Id, ALPHABET};
use parselet_rd::RdParams;
use parselet_serialize::costs::model_bits;

pub use dist::{distance, distance_matrix, ncd, ncd_matrix, Distance, Matrix};
pub use pc::{pc_skeleton, Skeleton};
pub use prob::Universe;

#[derive(Debug, thiserror::Error)]
pub enum MeasureError {
    #[error("models were built with different parameters: {0} vs {1}")]
    MixedParams(String, String),
    #[error("the universe is incompressible")]
    Incompressible,
    #[error("conditioning on a multiset of probability zero")]
    ZeroProbability,
    #[error("both strings are incompressible, the normalised distance is undefined")]
    Undefined,
    #[error("unknown {0}: {1}")]
    Unknown(&'static str, String),
    #[error(transparent)]
    Archive(#[from] parselet_archive::ArchiveError),
}

pub type Result<T> = std::result::Result<T, MeasureError>;

/// Which quantity stands for the information in a multiset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Measure {
    /// Number of entries in the union of the models.
    #[default]
    Kstar,
    /// Bits of the union of the models written in canonical order.
    KD,
}

impl FromStr for Measure {
    type Err = MeasureError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kstar" | "k*" | "card" => Ok(Measure::Kstar),
            "kd" | "bits" => Ok(Measure::KD),
            _ => Err(MeasureError::Unknown("measure", s.into())),
        }
    }
}

/// Normalisation of the conditional independence statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Denom {
    /// `K(X,Y)`: dual correlation.
    Joint,
    /// `K(X)+K(Y)`: Pearson-like correlation.
    Sum,
    /// `min(K(X),K(Y))`: total correlation.
    Min,
    /// `sqrt(K(X)+K(Y))`: redundancy.
    #[default]
    SqrtSum,
}

impl FromStr for Denom {
    type Err = MeasureError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "joint" => Ok(Denom::Joint),
            "sum" => Ok(Denom::Sum),
            "min" => Ok(Denom::Min),
            "sqrtsum" | "sqrt" => Ok(Denom::SqrtSum),
            _ => Err(MeasureError::Unknown("denominator", s.into())),
        }
    }
}

/// Models of many strings with entries identified across strings.
#[derive(Debug)]
pub struct Corpus {
    pub names: Vec<String>,
    /// Union of every model.
    dict: Dictionary,
    /// Sorted ids in `dict` of each string's own model.
    keys: Vec<Vec<Id>>,
    params: String,
    kd_memo: Mutex<HashMap<Vec<usize>, u64>>,
}

impl Corpus {
    /// Builds a corpus from models computed with the parameters described by `params`.
    pub fn new(names: Vec<String>, models: &[Dictionary], params: &str, exec: Exec) -> Self {
        assert_eq!(names.len(), models.len());
        let (dict, maps) = union(models, exec);
        let keys = maps
            .iter()
            .map(|m| {
                let mut k = m.0.clone();
                k.sort_unstable();
                k.dedup();
                k
            })
            .collect();
        Corpus { names, dict, keys, params: params.to_string(), kd_memo: Mutex::new(HashMap::new()) }
    }

    /// Builds a corpus from `(model, parameter fingerprint)` pairs, rejecting mixtures.
    pub fn from_models(names: Vec<String>, models: Vec<(Dictionary, String)>, exec: Exec) -> Result<Self> {
        let params = models.first().map(|m| m.1.clone()).unwrap_or_default();
        if let Some((_, p)) = models.iter().find(|(_, p)| *p != params) {
            return Err(MeasureError::MixedParams(params, p.clone()));
        }
        let dicts: Vec<Dictionary> = models.into_iter().map(|m| m.0).collect();
        Ok(Corpus::new(names, &dicts, &params, exec))
    }

    /// Compresses every item (through the cache) and builds the corpus.
    pub fn compress(
        names: Vec<String>,
        items: &[Item],
        params: &RdParams,
        cache: Option<&Cache>,
        exec: Exec,
    ) -> Result<Self> {
        let k = kompress(items, params, cache, exec)?;
        let models: Vec<Dictionary> = k.singles.into_iter().map(|c| c.dict).collect();
        Ok(Corpus::new(names, &models, &params.fingerprint(), exec))
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn params(&self) -> &str {
        &self.params
    }

    /// Union of all models.
    pub fn dictionary(&self) -> &Dictionary {
        &self.dict
    }

    /// Entry ids of one member's model.
    pub fn keys(&self, i: usize) -> &[Id] {
        &self.keys[i]
    }

    fn members(xs: &[&[usize]]) -> Vec<usize> {
        let mut m: Vec<usize> = xs.iter().flat_map(|x| x.iter().copied()).collect();
        m.sort_unstable();
        m.dedup();
        m
    }

    fn mask(&self, members: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.dict.len()];
        for &i in members {
            for &id in &self.keys[i] {
                mask[(id - ALPHABET) as usize] = true;
            }
        }
        mask
    }

    /// Ids of the union of the members' models.
    pub fn union_keys(&self, xs: &[usize]) -> Vec<Id> {
        let mask = self.mask(&Self::members(&[xs]));
        self.dict.ids().filter(|&id| mask[(id - ALPHABET) as usize]).collect()
    }

    /// Union of the members' models as a dictionary of its own.
    pub fn union_model(&self, xs: &[usize]) -> Dictionary {
        let mask = self.mask(&Self::members(&[xs]));
        self.dict.rebuild(|id| id, |id| mask[(id - ALPHABET) as usize]).expect("union is well formed").0
    }

    fn k_members(&self, members: &[usize], m: Measure) -> u64 {
        match m {
            Measure::Kstar => self.mask(members).into_iter().filter(|&b| b).count() as u64,
            Measure::KD => {
                if let Some(&v) = self.kd_memo.lock().expect("memo").get(members) {
                    return v;
                }
                let v = model_bits(&self.union_model(members));
                self.kd_memo.lock().expect("memo").insert(members.to_vec(), v);
                v
            }
        }
    }

    /// `K(X)`; duplicates in the multiset do not change the union.
    pub fn k(&self, xs: &[usize], m: Measure) -> u64 {
        self.k_members(&Self::members(&[xs]), m)
    }

    /// `K` of the union of several multisets.
    pub fn k_of(&self, xs: &[&[usize]], m: Measure) -> u64 {
        self.k_members(&Self::members(xs), m)
    }

    /// `K(X|Z) = K(X,Z) - K(Z)`, in absolute value for the bit measure.
    pub fn relative(&self, x: &[usize], z: &[usize], m: Measure) -> f64 {
        let v = self.k_of(&[x, z], m) as i64 - self.k(z, m) as i64;
        match m {
            Measure::Kstar => {
                debug_assert!(v >= 0);
                v as f64
            }
            Measure::KD => v.abs() as f64,
        }
    }

    /// `I(X:Y|Z) = K(X|Z) - K(X|Y,Z)`, in absolute value for the bit measure.
    pub fn cond_mutual(&self, x: &[usize], y: &[usize], z: &[usize], m: Measure) -> f64 {
        let yz: Vec<usize> = y.iter().chain(z).copied().collect();
        let v = self.relative(x, z, m) - self.relative(x, &yz, m);
        match m {
            Measure::Kstar => v,
            Measure::KD => v.abs(),
        }
    }

    /// Syntactic conditional independence: zero mutual information in entry counts.
    pub fn syntactic_independent(&self, x: &[usize], y: &[usize], z: &[usize]) -> bool {
        let k = |a: &[&[usize]]| self.k_of(a, Measure::Kstar) as i64;
        k(&[x, z]) - k(&[z]) - k(&[x, y, z]) + k(&[y, z]) == 0
    }

    /// Normalised conditional independence statistic; zero when the denominator is.
    pub fn i_nd(&self, x: &[usize], y: &[usize], z: &[usize], m: Measure, denom: Denom) -> f64 {
        let i = self.cond_mutual(x, y, z, m);
        let (kx, ky) = (self.k(x, m) as f64, self.k(y, m) as f64);
        let d = match denom {
            Denom::Joint => self.k_of(&[x, y], m) as f64,
            Denom::Sum => kx + ky,
            Denom::Min => kx.min(ky),
            Denom::SqrtSum => (kx + ky).sqrt(),
        };
        if d == 0.0 {
            0.0
        } else {
            i / d
        }
    }
}
