//! Cellular homology over Z and Z/2, pseudomanifold diagnostics, degrees of
//! cellular maps and homologous-cycle witnesses.

pub mod linalg;
pub mod pseudo;
pub mod samples;

use crate::lattice::complex::{ComplexError, GluedComplex};
use linalg::{smith_normal_form, solve_integer, symm_diff, Z2Matrix, ZMatrix};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ring {
    Z2,
    Z,
}

/// Boundary matrices of a finite complex, one per degree. Degree 0 has an
/// empty boundary. Integral matrices may be absent when an orientation is
/// ambiguous (self-identified cells).
pub struct ChainComplexData {
    pub counts: Vec<usize>,
    pub bnd: Vec<Z2Matrix>,
    pub bnd_z: Vec<Option<ZMatrix>>,
}

impl ChainComplexData {
    pub fn top_dim(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    pub fn from_glued(gc: &GluedComplex) -> Result<Self, ComplexError> {
        let g = gc.global()?;
        let top = g.top_dim();
        let mut counts = Vec::new();
        let mut bnd = Vec::new();
        let mut bnd_z = Vec::new();
        for k in 0..=top {
            counts.push(g.count(k));
            bnd.push(gc.boundary_matrix_z2(&g, k));
            bnd_z.push(gc.boundary_matrix_z(&g, k).ok());
        }
        Ok(ChainComplexData { counts, bnd, bnd_z })
    }

    /// Mod-2 boundary of a chain given by its support in degree k.
    pub fn boundary_z2(&self, k: usize, support: &[usize]) -> Vec<usize> {
        if k == 0 || k > self.top_dim() {
            return Vec::new();
        }
        self.bnd[k].apply(support)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HomologyResult {
    pub degree: usize,
    pub ring: Ring,
    pub rank: usize,
    /// Nontrivial invariant factors of the next boundary map (empty over Z2).
    pub torsion: Vec<i64>,
    /// Supports of representative cycles (independent modulo boundaries,
    /// computed mod 2; over Z these generate the rank and 2-torsion classes).
    pub representatives: Vec<Vec<usize>>,
}

pub fn homology(data: &ChainComplexData, k: usize, ring: Ring) -> HomologyResult {
    let nk = *data.counts.get(k).unwrap_or(&0);
    let zero = HomologyResult {
        degree: k,
        ring,
        rank: 0,
        torsion: Vec::new(),
        representatives: Vec::new(),
    };
    if nk == 0 {
        return zero;
    }
    let rank_lower; // rank of boundary out of degree k
    let rank_upper; // rank of boundary into degree k
    let mut torsion: Vec<i64> = Vec::new();
    match ring {
        Ring::Z2 => {
            rank_lower = if k == 0 { 0 } else { data.bnd[k].rank() };
            rank_upper = data
                .bnd
                .get(k + 1)
                .map(|m| m.rank())
                .unwrap_or(0);
        }
        Ring::Z => {
            rank_lower = if k == 0 {
                0
            } else {
                data.bnd_z[k]
                    .as_ref()
                    .map(|m| smith_normal_form(m).rank)
                    .unwrap_or_else(|| data.bnd[k].rank())
            };
            if let Some(Some(up)) = data.bnd_z.get(k + 1) {
                let snf = smith_normal_form(up);
                rank_upper = snf.rank;
                torsion = snf
                    .diag
                    .iter()
                    .filter(|&&d| d.abs() > 1)
                    .map(|&d| d.unsigned_abs() as i64)
                    .collect();
            } else {
                rank_upper = data.bnd.get(k + 1).map(|m| m.rank()).unwrap_or(0);
            }
        }
    }
    let rank = nk - rank_lower - rank_upper;

    // representatives: kernel vectors independent modulo the image, mod 2
    let mut reps: Vec<Vec<usize>> = Vec::new();
    // over GF(2) a kernel combination of columns of the boundary is exactly
    // a cycle support in degree k
    let kernel_supports: Vec<Vec<usize>> = if k == 0 {
        (0..nk).map(|i| vec![i]).collect()
    } else {
        data.bnd[k].reduce().kernel_basis()
    };
    let cols: Vec<Vec<usize>> = data
        .bnd
        .get(k + 1)
        .map(|m| m.cols.clone())
        .unwrap_or_default();
    let seeded = Z2Matrix { rows: nk, cols };
    let mut red = seeded.reduce();
    for kv in kernel_supports {
        // reduce the candidate against everything accepted so far
        let mut c = kv.clone();
        while let Some(&low) = c.last() {
            match red.pivot_of_row.get(&low) {
                Some(&idx) => c = symm_diff(&c, &red.reduced[idx]),
                None => break,
            }
        }
        if let Some(&low) = c.last() {
            red.pivot_of_row.insert(low, red.reduced.len());
            red.reduced.push(c);
            red.combo.push(Vec::new());
            reps.push(kv);
        }
    }
    HomologyResult {
        degree: k,
        ring,
        rank,
        torsion,
        representatives: reps,
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ChainError {
    #[error("input chain in degree {degree} is not a cycle")]
    NotACycle { degree: usize },
    #[error("degree {0} out of range")]
    Degree(usize),
    #[error("integral boundary unavailable (orientation ambiguity)")]
    NoIntegralBoundary,
}

/// Decide whether two mod-2 cycles are homologous; on success, returns a
/// witness chain w (support in degree k+1) with boundary a + b.
pub fn homologous_z2(
    data: &ChainComplexData,
    k: usize,
    a: &[usize],
    b: &[usize],
) -> Result<Option<Vec<usize>>, ChainError> {
    if k > data.top_dim() {
        return Err(ChainError::Degree(k));
    }
    for c in [a, b] {
        if !data.boundary_z2(k, c).is_empty() {
            return Err(ChainError::NotACycle { degree: k });
        }
    }
    let diff = symm_diff(a, b);
    if diff.is_empty() {
        return Ok(Some(Vec::new()));
    }
    let Some(up) = data.bnd.get(k + 1) else {
        return Ok(None);
    };
    Ok(up.reduce().solve(&diff))
}

/// Integral version; chains are coefficient vectors indexed by cells.
pub fn homologous_z(
    data: &ChainComplexData,
    k: usize,
    a: &[i64],
    b: &[i64],
) -> Result<Option<Vec<i128>>, ChainError> {
    if k > data.top_dim() {
        return Err(ChainError::Degree(k));
    }
    let bk = if k == 0 {
        None
    } else {
        Some(
            data.bnd_z[k]
                .as_ref()
                .ok_or(ChainError::NoIntegralBoundary)?,
        )
    };
    if let Some(m) = bk {
        for c in [a, b] {
            let mut out = vec![0i128; m.rows];
            for (j, col) in m.cols.iter().enumerate() {
                if c[j] != 0 {
                    for &(i, v) in col {
                        out[i] += i128::from(v) * i128::from(c[j]);
                    }
                }
            }
            if out.iter().any(|&v| v != 0) {
                return Err(ChainError::NotACycle { degree: k });
            }
        }
    }
    let diff: Vec<i64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if diff.iter().all(|&v| v == 0) {
        return Ok(Some(Vec::new()));
    }
    if k + 1 > data.top_dim() {
        return Ok(None);
    }
    let up = data.bnd_z[k + 1]
        .as_ref()
        .ok_or(ChainError::NoIntegralBoundary)?;
    Ok(solve_integer(up, &diff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use samples::octahedron;

    #[test]
    fn octahedron_homology() {
        let data = octahedron();
        let h0 = homology(&data, 0, Ring::Z);
        let h1 = homology(&data, 1, Ring::Z);
        let h2 = homology(&data, 2, Ring::Z);
        assert_eq!((h0.rank, h1.rank, h2.rank), (1, 0, 1));
        assert!(h1.torsion.is_empty() && h2.torsion.is_empty());
        assert_eq!(h2.representatives.len(), 1);
        assert_eq!(h2.representatives[0].len(), 8); // the whole sphere
    }

    #[test]
    fn octahedron_cycle_filling_witness() {
        let data = octahedron();
        // equator cycle: edges among vertices 0..3
        let equator: Vec<usize> = samples::octahedron_equator();
        let w = homologous_z2(&data, 1, &equator, &[]).unwrap().unwrap();
        assert_eq!(data.bnd[2].apply(&w), equator);
        assert_eq!(w.len(), 4); // a hemisphere
    }

    #[test]
    fn non_cycle_is_rejected() {
        let data = octahedron();
        assert!(matches!(
            homologous_z2(&data, 1, &[0], &[]),
            Err(ChainError::NotACycle { .. })
        ));
    }
}
