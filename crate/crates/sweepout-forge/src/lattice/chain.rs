//! Cellular chains indexed by global cells.

use crate::homology::Ring;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A formal sum of global cells of a fixed dimension. Coefficients are kept
/// in {0,1} when the ring is Z/2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainVector {
    pub degree: usize,
    pub ring: Ring,
    pub coeffs: BTreeMap<usize, i64>,
}

impl ChainVector {
    pub fn zero(degree: usize, ring: Ring) -> Self {
        ChainVector {
            degree,
            ring,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_support(degree: usize, support: &[usize]) -> Self {
        ChainVector {
            degree,
            ring: Ring::Z2,
            coeffs: support.iter().map(|&i| (i, 1)).collect(),
        }
    }

    pub fn support(&self) -> Vec<usize> {
        self.coeffs
            .iter()
            .filter(|(_, &c)| c != 0)
            .map(|(&i, _)| i)
            .collect()
    }

    pub fn add_term(&mut self, cell: usize, coeff: i64) {
        let e = self.coeffs.entry(cell).or_insert(0);
        *e += coeff;
        if self.ring == Ring::Z2 {
            *e = e.rem_euclid(2);
        }
        if *e == 0 {
            self.coeffs.remove(&cell);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|&c| c == 0)
    }

    /// Dense coefficient vector of the given length.
    pub fn dense(&self, len: usize) -> Vec<i64> {
        let mut v = vec![0; len];
        for (&i, &c) in &self.coeffs {
            v[i] = c;
        }
        v
    }
}
