//! Axis-aligned cubical cells given by one closed interval per axis.

use crate::rat::{rat_str, Rat};
use serde::{Deserialize, Serialize};

/// A product of closed intervals `[lo, hi]` (lo <= hi), one per chart axis.
/// Degenerate intervals (lo == hi) pin the cell to a hyperplane; the cell
/// dimension is the number of nondegenerate intervals.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CubicalCell {
    pub chart: usize,
    pub intervals: Vec<(Rat, Rat)>,
}

impl std::fmt::Debug for CubicalCell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "c{}:", self.chart)?;
        for (i, (lo, hi)) in self.intervals.iter().enumerate() {
            if i > 0 {
                write!(f, "x")?;
            }
            if lo == hi {
                write!(f, "{{{}}}", rat_str(*lo))?;
            } else {
                write!(f, "[{},{}]", rat_str(*lo), rat_str(*hi))?;
            }
        }
        Ok(())
    }
}

impl CubicalCell {
    pub fn new(chart: usize, intervals: Vec<(Rat, Rat)>) -> Self {
        debug_assert!(intervals.iter().all(|(lo, hi)| lo <= hi));
        CubicalCell { chart, intervals }
    }

    /// Vertex (0-cell) from a coordinate vector.
    pub fn vertex(chart: usize, coords: &[Rat]) -> Self {
        CubicalCell {
            chart,
            intervals: coords.iter().map(|&c| (c, c)).collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn dim(&self) -> usize {
        self.intervals.iter().filter(|(lo, hi)| lo != hi).count()
    }

    pub fn is_vertex(&self) -> bool {
        self.dim() == 0
    }

    /// Indices of nondegenerate axes, in increasing order.
    pub fn free_axes(&self) -> Vec<usize> {
        self.intervals
            .iter()
            .enumerate()
            .filter(|(_, (lo, hi))| lo != hi)
            .map(|(i, _)| i)
            .collect()
    }

    /// Point coordinates, for vertices only.
    pub fn point(&self) -> Vec<Rat> {
        debug_assert!(self.is_vertex());
        self.intervals.iter().map(|&(lo, _)| lo).collect()
    }

    /// All 2^dim vertices of the cell.
    pub fn vertices(&self) -> Vec<CubicalCell> {
        let free = self.free_axes();
        let mut out = Vec::with_capacity(1 << free.len());
        let mut coords: Vec<Rat> = self.intervals.iter().map(|&(lo, _)| lo).collect();
        for mask in 0u32..(1 << free.len()) {
            for (bit, &ax) in free.iter().enumerate() {
                coords[ax] = if mask >> bit & 1 == 1 {
                    self.intervals[ax].1
                } else {
                    self.intervals[ax].0
                };
            }
            out.push(CubicalCell::vertex(self.chart, &coords));
        }
        out
    }

    /// Codimension-1 faces together with their incidence signs.
    ///
    /// Setting the k-th nondegenerate interval to its upper endpoint carries
    /// sign (-1)^k, to its lower endpoint -(-1)^k; this convention makes the
    /// square of the boundary operator vanish.
    pub fn facets_signed(&self) -> Vec<(CubicalCell, i64)> {
        let free = self.free_axes();
        let mut out = Vec::with_capacity(2 * free.len());
        for (k, &ax) in free.iter().enumerate() {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let (lo, hi) = self.intervals[ax];
            let mut upper = self.clone();
            upper.intervals[ax] = (hi, hi);
            out.push((upper, sign));
            let mut lower = self.clone();
            lower.intervals[ax] = (lo, lo);
            out.push((lower, -sign));
        }
        out
    }

    /// All faces of the given codimension (each chosen axis degenerates to
    /// one of its two endpoints).
    pub fn faces(&self, codim: usize) -> Vec<CubicalCell> {
        let free = self.free_axes();
        if codim > free.len() {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        fn rec(
            cell: &CubicalCell,
            free: &[usize],
            start: usize,
            left: usize,
            chosen: &mut Vec<usize>,
            out: &mut Vec<CubicalCell>,
        ) {
            if left == 0 {
                // 2^|chosen| endpoint assignments
                for mask in 0u32..(1 << chosen.len()) {
                    let mut c = cell.clone();
                    for (bit, &ax) in chosen.iter().enumerate() {
                        let (lo, hi) = c.intervals[ax];
                        c.intervals[ax] = if mask >> bit & 1 == 1 { (hi, hi) } else { (lo, lo) };
                    }
                    out.push(c);
                }
                return;
            }
            for i in start..free.len() {
                chosen.push(free[i]);
                rec(cell, free, i + 1, left - 1, chosen, out);
                chosen.pop();
            }
        }
        rec(self, &free, 0, codim, &mut chosen, &mut out);
        out
    }

    /// Full closure: the cell and all of its iterated faces, deduplicated.
    pub fn closure(&self) -> Vec<CubicalCell> {
        let mut out = std::collections::BTreeSet::new();
        let mut stack = vec![self.clone()];
        while let Some(c) = stack.pop() {
            if out.insert(c.clone()) {
                for (f, _) in c.facets_signed() {
                    stack.push(f);
                }
            }
        }
        out.into_iter().collect()
    }

    /// Pointwise containment of another cell inside this one.
    pub fn contains_cell(&self, other: &CubicalCell) -> bool {
        self.chart == other.chart
            && self.intervals.len() == other.intervals.len()
            && self
                .intervals
                .iter()
                .zip(&other.intervals)
                .all(|((lo, hi), (olo, ohi))| lo <= olo && ohi <= hi)
    }

    pub fn contains_point(&self, p: &[Rat]) -> bool {
        self.intervals.len() == p.len()
            && self
                .intervals
                .iter()
                .zip(p)
                .all(|((lo, hi), x)| lo <= x && x <= hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_int;

    fn cube(d: usize) -> CubicalCell {
        CubicalCell::new(0, vec![(rat_int(-1), rat_int(1)); d])
    }

    #[test]
    fn face_counts_match_binomials() {
        // a d-cube has 2^(d-p) * C(d,p) faces of dimension p
        fn binom(n: usize, k: usize) -> usize {
            if k > n {
                return 0;
            }
            let mut r = 1usize;
            for i in 0..k {
                r = r * (n - i) / (i + 1);
            }
            r
        }
        for d in 1..=5 {
            let c = cube(d);
            for p in 0..=d {
                let codim = d - p;
                assert_eq!(c.faces(codim).len(), (1 << codim) * binom(d, codim));
            }
        }
    }

    #[test]
    fn boundary_squares_to_zero() {
        // formal check of the sign convention on a single cube
        use std::collections::BTreeMap;
        for d in 2..=4 {
            let c = cube(d);
            let mut acc: BTreeMap<CubicalCell, i64> = BTreeMap::new();
            for (f, s) in c.facets_signed() {
                for (g, t) in f.facets_signed() {
                    *acc.entry(g).or_insert(0) += s * t;
                }
            }
            assert!(acc.values().all(|&v| v == 0));
        }
    }

    #[test]
    fn closure_of_square() {
        let sq = CubicalCell::new(0, vec![(rat_int(0), rat_int(1)), (rat_int(0), rat_int(1))]);
        let cl = sq.closure();
        assert_eq!(cl.len(), 9); // 1 square + 4 edges + 4 vertices
        assert_eq!(sq.vertices().len(), 4);
    }
}
