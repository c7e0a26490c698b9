//! Skeleton phase of the PC algorithm.
//!
//! Starts from the complete graph over the corpus members and removes edge `i - j` as
//! soon as some conditioning set `Z` drawn from the neighbours of `i` (or of `j`) makes
//! the independence statistic fall below the threshold.  Conditioning sets grow one
//! member at a time and are enumerated lexicographically.  Adjacencies are frozen at the
//! start of each size, so the result does not depend on the order edges are tested in,
//! and all tests of one size run in parallel.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use parselet_core::Exec;

use crate::{Corpus, Denom, Measure};

#[derive(Debug, Clone, PartialEq)]
pub struct Skeleton {
    pub names: Vec<String>,
    /// Remaining edges `(i, j)` with `i < j`.
    pub edges: BTreeSet<(usize, usize)>,
    /// Conditioning set that removed each deleted edge.
    pub sepsets: BTreeMap<(usize, usize), Vec<usize>>,
    /// Independence tests performed.
    pub tests: usize,
}

impl Skeleton {
    pub fn neighbours(&self, i: usize) -> Vec<usize> {
        self.edges.iter().filter_map(|&(a, b)| if a == i { Some(b) } else if b == i { Some(a) } else { None }).collect()
    }

    /// Undirected graph in DOT syntax.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph skeleton {\n");
        for (i, n) in self.names.iter().enumerate() {
            let _ = writeln!(s, "  n{i} [label=\"{}\"];", n.replace('"', "\\\""));
        }
        for &(a, b) in &self.edges {
            let _ = writeln!(s, "  n{a} -- n{b};");
        }
        s.push_str("}\n");
        s
    }
}

/// Calls `f` on each `k`-subset of `items` in lexicographic order until it returns true.
fn subsets(items: &[usize], k: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            if rec(items, k, i + 1, cur, f) {
                return true;
            }
            cur.pop();
        }
        false
    }
    rec(items, k, 0, &mut Vec::with_capacity(k), f)
}

/// Skeleton over all members of the corpus.
pub fn pc_skeleton(c: &Corpus, eta: f64, m: Measure, denom: Denom, exec: Exec) -> Skeleton {
    let n = c.len();
    let mut edges: BTreeSet<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut sepsets = BTreeMap::new();
    let mut tests = 0;
    let mut size = 0;
    loop {
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|i| edges.iter().filter_map(|&(a, b)| if a == i { Some(b) } else if b == i { Some(a) } else { None }).collect())
            .collect();
        let current: Vec<(usize, usize)> = edges.iter().copied().collect();
        if !current.iter().any(|&(i, j)| adj[i].len() > size || adj[j].len() > size) {
            break;
        }
        let results = exec.map(&current, |&(i, j)| {
            let mut done = 0;
            let mut found = None;
            for (a, b) in [(i, j), (j, i)] {
                let others: Vec<usize> = adj[a].iter().copied().filter(|&v| v != b).collect();
                if others.len() < size {
                    continue;
                }
                let hit = subsets(&others, size, &mut |z| {
                    done += 1;
                    if c.i_nd(&[i], &[j], z, m, denom) < eta {
                        found = Some(z.to_vec());
                        true
                    } else {
                        false
                    }
                });
                if hit {
                    break;
                }
            }
            (found, done)
        });
        for (&e, (found, done)) in current.iter().zip(results) {
            tests += done;
            if let Some(z) = found {
                edges.remove(&e);
                sepsets.insert(e, z);
            }
        }
        size += 1;
    }
    Skeleton { names: c.names.clone(), edges, sepsets, tests }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_are_lexicographic() {
        let mut seen = Vec::new();
        subsets(&[1, 4, 7, 9], 2, &mut |s| {
            seen.push(s.to_vec());
            false
        });
        assert_eq!(seen, vec![vec![1, 4], vec![1, 7], vec![1, 9], vec![4, 7], vec![4, 9], vec![7, 9]]);
        let mut empty = 0;
        subsets(&[1, 2], 0, &mut |s| {
            empty += s.is_empty() as usize;
            false
        });
        assert_eq!(empty, 1);
    }
}
