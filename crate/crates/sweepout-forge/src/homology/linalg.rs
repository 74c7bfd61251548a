//! Sparse mod-2 column algebra and a dense integer Smith normal form.

use std::collections::HashMap;

/// Symmetric difference of two sorted index lists.
pub fn symm_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Columns of sorted row indices over GF(2).
#[derive(Clone, Debug, Default)]
pub struct Z2Matrix {
    pub rows: usize,
    pub cols: Vec<Vec<usize>>,
}

impl Z2Matrix {
    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn reduce(&self) -> Z2Reduction {
        let mut reduced: Vec<Vec<usize>> = Vec::with_capacity(self.cols.len());
        let mut combo: Vec<Vec<usize>> = Vec::with_capacity(self.cols.len());
        let mut pivot_of_row: HashMap<usize, usize> = HashMap::new();
        for (j, col) in self.cols.iter().enumerate() {
            let mut c = col.clone();
            let mut cb = vec![j];
            while let Some(&low) = c.last() {
                match pivot_of_row.get(&low) {
                    Some(&k) => {
                        c = symm_diff(&c, &reduced[k]);
                        cb = symm_diff(&cb, &combo[k]);
                    }
                    None => break,
                }
            }
            if let Some(&low) = c.last() {
                pivot_of_row.insert(low, j);
            }
            reduced.push(c);
            combo.push(cb);
        }
        Z2Reduction {
            reduced,
            combo,
            pivot_of_row,
        }
    }

    pub fn rank(&self) -> usize {
        self.reduce().rank()
    }

    /// Column-index multiplication: image of the sum of the given columns.
    pub fn apply(&self, support: &[usize]) -> Vec<usize> {
        let mut acc: Vec<usize> = Vec::new();
        for &j in support {
            acc = symm_diff(&acc, &self.cols[j]);
        }
        acc
    }
}

/// Left-to-right column reduction with recorded combinations.
pub struct Z2Reduction {
    pub reduced: Vec<Vec<usize>>,
    pub combo: Vec<Vec<usize>>,
    pub pivot_of_row: HashMap<usize, usize>,
}

impl Z2Reduction {
    pub fn rank(&self) -> usize {
        self.reduced.iter().filter(|c| !c.is_empty()).count()
    }

    /// Solve M x = b; returns the sorted set of original column indices
    /// forming a solution, or None when b is outside the column span.
    pub fn solve(&self, b: &[usize]) -> Option<Vec<usize>> {
        let mut c = b.to_vec();
        let mut cb: Vec<usize> = Vec::new();
        while let Some(&low) = c.last() {
            let &k = self.pivot_of_row.get(&low)?;
            c = symm_diff(&c, &self.reduced[k]);
            cb = symm_diff(&cb, &self.combo[k]);
        }
        Some(cb)
    }

    /// Basis of the kernel, as sorted sets of original column indices.
    pub fn kernel_basis(&self) -> Vec<Vec<usize>> {
        self.reduced
            .iter()
            .zip(&self.combo)
            .filter(|(c, _)| c.is_empty())
            .map(|(_, cb)| cb.clone())
            .collect()
    }
}

/// Sparse integer matrix (columns of (row, coefficient) pairs).
#[derive(Clone, Debug, Default)]
pub struct ZMatrix {
    pub rows: usize,
    pub cols: Vec<Vec<(usize, i64)>>,
}

impl ZMatrix {
    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn to_dense(&self) -> Vec<Vec<i128>> {
        let mut m = vec![vec![0i128; self.cols.len()]; self.rows];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                m[i][j] = v as i128;
            }
        }
        m
    }
}

/// Smith normal form D = U * A * V with unimodular U, V.
pub struct Snf {
    pub diag: Vec<i128>,
    pub rank: usize,
    pub u: Vec<Vec<i128>>,
    pub v: Vec<Vec<i128>>,
    pub rows: usize,
    pub cols: usize,
}

pub fn smith_normal_form(a: &ZMatrix) -> Snf {
    let rows = a.rows;
    let cols = a.ncols();
    let mut m = a.to_dense();
    let mut u: Vec<Vec<i128>> = (0..rows)
        .map(|i| (0..rows).map(|j| i128::from(i == j)).collect())
        .collect();
    let mut v: Vec<Vec<i128>> = (0..cols)
        .map(|i| (0..cols).map(|j| i128::from(i == j)).collect())
        .collect();

    let n = rows.min(cols);
    let mut t = 0usize;
    while t < n {
        // locate a pivot of minimal absolute value in the remaining block
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if m[i][j] != 0
                    && pivot.map_or(true, |(pi, pj)| m[i][j].abs() < m[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        u.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        v.swap(t, pj); // v is stored row-wise as V^T acting on columns; see below

        // clear row and column t
        let mut again = true;
        while again {
            again = false;
            for i in t + 1..rows {
                if m[i][t] != 0 {
                    let q = div_round(m[i][t], m[t][t]);
                    if q != 0 {
                        for j in 0..cols {
                            m[i][j] -= q * m[t][j];
                        }
                        for j in 0..rows {
                            u[i][j] -= q * u[t][j];
                        }
                    }
                    if m[i][t] != 0 {
                        m.swap(t, i);
                        u.swap(t, i);
                        again = true;
                    }
                }
            }
            for j in t + 1..cols {
                if m[t][j] != 0 {
                    let q = div_round(m[t][j], m[t][t]);
                    if q != 0 {
                        for i in 0..rows {
                            m[i][j] -= q * m[i][t];
                        }
                        for i in 0..cols {
                            v[j][i] -= q * v[t][i];
                        }
                    }
                    if m[t][j] != 0 {
                        for row in m.iter_mut() {
                            row.swap(t, j);
                        }
                        v.swap(t, j);
                        again = true;
                    }
                }
            }
        }
        // enforce divisibility of later entries by the pivot
        let mut fixed = true;
        for i in t + 1..rows {
            for j in t + 1..cols {
                if m[i][j] % m[t][t] != 0 {
                    for jj in 0..cols {
                        m[t][jj] += m[i][jj];
                    }
                    for jj in 0..rows {
                        u[t][jj] += u[i][jj];
                    }
                    fixed = false;
                    break;
                }
            }
            if !fixed {
                break;
            }
        }
        if fixed {
            if m[t][t] < 0 {
                for j in 0..cols {
                    m[t][j] = -m[t][j];
                }
                for j in 0..rows {
                    u[t][j] = -u[t][j];
                }
            }
            t += 1;
        }
    }
    let mut diag: Vec<i128> = (0..n).map(|i| m[i][i]).filter(|&d| d != 0).collect();
    diag.sort();
    let rank = diag.len();
    // v was maintained row-wise as the transpose of the accumulated column ops
    let vt: Vec<Vec<i128>> = (0..cols)
        .map(|i| (0..cols).map(|j| v[j][i]).collect())
        .collect();
    Snf {
        diag,
        rank,
        u,
        v: vt,
        rows,
        cols,
    }
}

fn div_round(a: i128, b: i128) -> i128 {
    // quotient with remainder of minimal absolute value
    let q = a / b;
    let r = a - q * b;
    if 2 * r.abs() > b.abs() {
        q + if (a < 0) == (b < 0) { 1 } else { -1 }
    } else {
        q
    }
}

/// Solve A x = b over the integers using the Smith form; returns None when
/// no integral solution exists.
pub fn solve_integer(a: &ZMatrix, b: &[i64]) -> Option<Vec<i128>> {
    let snf = smith_normal_form(a);
    // recompute the diagonal in position order (diag above is sorted)
    let dense = a.to_dense();
    // D = U A V; y solves D y = U b, then x = V y
    let ub: Vec<i128> = (0..snf.rows)
        .map(|i| {
            (0..snf.rows)
                .map(|j| snf.u[i][j] * i128::from(b[j]))
                .sum::<i128>()
        })
        .collect();
    // reconstruct D's diagonal directly: D = U A V
    let n = snf.rows.min(snf.cols);
    let mut y = vec![0i128; snf.cols];
    for i in 0..snf.rows {
        let d = if i < n {
            // (U A V)[i][i]: row i of U*A dotted with column i of V
            let mut s = 0i128;
            let mut ua = vec![0i128; snf.cols];
            for (kk, row) in dense.iter().enumerate() {
                let coef = snf.u[i][kk];
                if coef != 0 {
                    for (jj, &val) in row.iter().enumerate() {
                        ua[jj] += coef * val;
                    }
                }
            }
            for (kk, uak) in ua.iter().enumerate() {
                s += uak * snf.v[kk][i];
            }
            s
        } else {
            0
        };
        if d == 0 {
            if ub[i] != 0 {
                return None;
            }
        } else {
            if ub[i] % d != 0 {
                return None;
            }
            y[i] = ub[i] / d;
        }
    }
    let x: Vec<i128> = (0..snf.cols)
        .map(|i| (0..snf.cols).map(|j| snf.v[i][j] * y[j]).sum())
        .collect();
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_rank_and_kernel() {
        // columns: e1+e2, e2+e3, e1+e3 (rank 2, kernel dim 1)
        let m = Z2Matrix {
            rows: 3,
            cols: vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        };
        let red = m.reduce();
        assert_eq!(red.rank(), 2);
        let ker = red.kernel_basis();
        assert_eq!(ker.len(), 1);
        assert!(m.apply(&ker[0]).is_empty());
        let sol = red.solve(&[0, 2]).unwrap();
        assert_eq!(m.apply(&sol), vec![0, 2]);
        assert!(red.solve(&[0]).is_none());
    }

    #[test]
    fn snf_of_klein_style_matrix() {
        // boundary with invariant factors 1, 2
        let a = ZMatrix {
            rows: 2,
            cols: vec![vec![(0, 2)], vec![(0, 1), (1, 1)], vec![(1, 2)]],
        };
        let snf = smith_normal_form(&a);
        assert_eq!(snf.rank, 2);
        assert_eq!(snf.diag, vec![1, 2]);
    }

    #[test]
    fn integer_solve() {
        // x + 2y = 5, 3y = 3
        let a = ZMatrix {
            rows: 2,
            cols: vec![vec![(0, 1)], vec![(0, 2), (1, 3)]],
        };
        let x = solve_integer(&a, &[5, 3]).unwrap();
        assert_eq!(x[0] + 2 * x[1], 5);
        assert_eq!(3 * x[1], 3);
        assert!(solve_integer(&a, &[0, 1]).is_none());
    }
}
