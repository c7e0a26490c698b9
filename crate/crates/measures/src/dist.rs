//! Information distances and distance matrices.
//!
//! Shannon, ID and NID are symmetric by construction, so matrices only compute the upper
//! half and each marginal once.  NCD compresses concatenations losslessly and is not
//! symmetric in general: both orders are computed.

use std::fmt::Write as _;
use std::str::FromStr;

use parselet_core::Exec;
use parselet_deflate::{deflate_bytes, DeflateParams};
use parselet_serialize::costs::rate_bits;

use crate::{Corpus, Measure, MeasureError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Distance {
    /// `2K(X,Y) - K(X) - K(Y)`.
    Shannon,
    /// `max(K(X|Y), K(Y|X))`.
    Id,
    /// ID over `max(K(X), K(Y))`.
    #[default]
    Nid,
    /// Compression distance of concatenations.
    Ncd,
}

impl FromStr for Distance {
    type Err = MeasureError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "shannon" => Ok(Distance::Shannon),
            "id" => Ok(Distance::Id),
            "nid" => Ok(Distance::Nid),
            "ncd" => Ok(Distance::Ncd),
            _ => Err(MeasureError::Unknown("distance", s.into())),
        }
    }
}

fn from_marginals(c: &Corpus, x: &[usize], y: &[usize], kx: u64, ky: u64, which: Distance, m: Measure) -> Result<f64> {
    let kxy = c.k_of(&[x, y], m) as i64;
    let (kx, ky) = (kx as i64, ky as i64);
    let rel = |a: i64| match m {
        Measure::Kstar => a as f64,
        Measure::KD => a.abs() as f64,
    };
    let id = rel(kxy - ky).max(rel(kxy - kx));
    Ok(match which {
        Distance::Shannon => rel(2 * kxy - kx - ky),
        Distance::Id => id,
        Distance::Nid => {
            let d = kx.max(ky);
            if d == 0 {
                return Err(MeasureError::Undefined);
            }
            id / d as f64
        }
        Distance::Ncd => unreachable!("NCD works on raw strings"),
    })
}

/// Distance between two multisets of the corpus (not NCD, see [`ncd`]).
pub fn distance(c: &Corpus, x: &[usize], y: &[usize], which: Distance, m: Measure) -> Result<f64> {
    if which == Distance::Ncd {
        return Err(MeasureError::Unknown("distance over models", "ncd".into()));
    }
    from_marginals(c, x, y, c.k(x, m), c.k(y, m), which, m)
}

/// A labelled square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub names: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl Matrix {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("name");
        for n in &self.names {
            let _ = write!(s, ",{n}");
        }
        s.push('\n');
        for (n, row) in self.names.iter().zip(&self.values) {
            s.push_str(n);
            for v in row {
                let _ = write!(s, ",{v}");
            }
            s.push('\n');
        }
        s
    }

    /// One `name_i name_j value` line per ordered pair.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (i, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let _ = writeln!(s, "{}\t{}\t{v:.6}", self.names[i], self.names[j]);
            }
        }
        s
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.values.len()).all(|i| (0..i).all(|j| self.values[i][j] == self.values[j][i]))
    }
}

/// Pairwise distances between the corpus members.
pub fn distance_matrix(c: &Corpus, which: Distance, m: Measure, exec: Exec) -> Result<Matrix> {
    let n = c.len();
    let marg = exec.map_range(n, |i| c.k(&[i], m));
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let vals = exec.map(&pairs, |&(i, j)| from_marginals(c, &[i], &[j], marg[i], marg[j], which, m));
    let mut values = vec![vec![0.0; n]; n];
    for (&(i, j), v) in pairs.iter().zip(vals) {
        let v = v?;
        values[i][j] = v;
        values[j][i] = v;
    }
    for i in 0..n {
        values[i][i] = match which {
            Distance::Nid if marg[i] == 0 => return Err(MeasureError::Undefined),
            _ => 0.0,
        };
    }
    Ok(Matrix { names: c.names.clone(), values })
}

/// Size of a lossless compression: model plus string bits.
pub fn lossless_bits(s: &[u8], params: &DeflateParams) -> u64 {
    let (d, x) = deflate_bytes(s, params);
    let (m, b) = rate_bits(&d, &x).expect("fresh deflation serializes");
    m.total() + b
}

fn ncd_from(cx: u64, cy: u64, cxy: u64) -> f64 {
    let (lo, hi) = (cx.min(cy) as f64, cx.max(cy) as f64);
    if hi == 0.0 {
        0.0
    } else {
        (cxy as f64 - lo) / hi
    }
}

/// Compression distance of `x` then `y` on lossless models.
pub fn ncd(x: &[u8], y: &[u8], params: &DeflateParams) -> f64 {
    let xy: Vec<u8> = x.iter().chain(y).copied().collect();
    ncd_from(lossless_bits(x, params), lossless_bits(y, params), lossless_bits(&xy, params))
}

/// NCD between every ordered pair of strings; row `i`, column `j` concatenates `x_i x_j`.
pub fn ncd_matrix(names: Vec<String>, strings: &[Vec<u8>], params: &DeflateParams, exec: Exec) -> Matrix {
    let n = strings.len();
    let marg = exec.map(strings, |s| lossless_bits(s, params));
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let vals = exec.map(&pairs, |&(i, j)| {
        let xy: Vec<u8> = strings[i].iter().chain(&strings[j]).copied().collect();
        ncd_from(marg[i], marg[j], lossless_bits(&xy, params))
    });
    let mut values = vec![vec![0.0; n]; n];
    for (&(i, j), v) in pairs.iter().zip(vals) {
        values[i][j] = v;
    }
    Matrix { names, values }
}
