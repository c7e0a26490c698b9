//! Probabilities against a universe of strings.
//!
//! The probability of a collection is the share of the universe's model made of entries
//! common to every member of the collection.

use crate::{Corpus, MeasureError, Result};
use parselet_core::ALPHABET;

#[derive(Debug)]
pub struct Universe<'a> {
    corpus: &'a Corpus,
    mask: Vec<bool>,
    size: usize,
}

impl<'a> Universe<'a> {
    /// The universe made of the given corpus members; it must be compressible.
    pub fn new(corpus: &'a Corpus, omega: &[usize]) -> Result<Self> {
        let mut mask = vec![false; corpus.dictionary().len()];
        for id in corpus.union_keys(omega) {
            mask[(id - ALPHABET) as usize] = true;
        }
        let size = mask.iter().filter(|&&b| b).count();
        if size == 0 {
            return Err(MeasureError::Incompressible);
        }
        Ok(Universe { corpus, mask, size })
    }

    /// Entries of the universe's model.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Entries shared by every member of `xs` and the universe.  The empty collection
    /// shares the whole universe.
    pub fn common(&self, xs: &[usize]) -> usize {
        let mut common = self.mask.clone();
        for &x in xs {
            let mut own = vec![false; common.len()];
            for &id in self.corpus.keys(x) {
                own[(id - ALPHABET) as usize] = true;
            }
            for (c, o) in common.iter_mut().zip(own) {
                *c &= o;
            }
        }
        common.into_iter().filter(|&b| b).count()
    }

    pub fn p(&self, xs: &[usize]) -> f64 {
        self.common(xs) as f64 / self.size as f64
    }

    /// Share of the universe's model covered by the union of the members' models.  For a
    /// single member this equals [`Universe::p`]; unlike `p`, it adds up over
    /// syntactically independent members.
    pub fn mass(&self, xs: &[usize]) -> f64 {
        let n = self.corpus.union_keys(xs).into_iter().filter(|&id| self.mask[(id - ALPHABET) as usize]).count();
        n as f64 / self.size as f64
    }

    /// `p(X,Y) / p(Y)`.
    pub fn p_given(&self, xs: &[usize], ys: &[usize]) -> Result<f64> {
        let py = self.common(ys);
        if py == 0 {
            return Err(MeasureError::ZeroProbability);
        }
        let both: Vec<usize> = xs.iter().chain(ys).copied().collect();
        Ok(self.common(&both) as f64 / py as f64)
    }
}
