//! Pseudomanifold diagnostics, orientations and degrees of cellular maps.

use crate::lattice::complex::{orientation_between, ComplexError, GlobalCells, GluedComplex};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, VecDeque};

/// Outcome of the pseudomanifold check on the top-dimensional part of a
/// complex: pure, every codimension-one cell on at most two top cells, and
/// a connected dual graph. The boundary is the set of codimension-one cells
/// with exactly one top coface.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PseudomanifoldReport {
    pub dimension: usize,
    pub top_cells: usize,
    pub pure: bool,
    pub max_cofaces: usize,
    pub offending_faces: Vec<String>,
    pub dual_connected: bool,
    pub boundary_faces: usize,
    pub closed: bool,
    pub orientable: Option<bool>,
    pub is_pseudomanifold: bool,
    pub failures: Vec<String>,
}

/// Per-top-cell orientation signs (indexed like the global top cells).
#[derive(Clone, Debug)]
pub struct TopOrientation {
    pub dim: usize,
    pub signs: Vec<i64>,
}

/// Coface incidences of every codimension-one global cell:
/// facet index -> list of (top cell index, integral incidence or 0 when
/// orientation-ambiguous).
pub fn facet_incidences(
    g: &GlobalCells,
    dim: usize,
) -> BTreeMap<usize, Vec<(usize, i64)>> {
    let mut inc: BTreeMap<usize, Vec<(usize, i64)>> = BTreeMap::new();
    if dim == 0 {
        return inc;
    }
    for (ti, top) in g.cells[dim].iter().enumerate() {
        for (f, s) in top.rep.facets_signed() {
            let (fd, fi) = g.locate(&f).expect("closed complex");
            debug_assert_eq!(fd, dim - 1);
            let rel = orientation_between(&f, &g.cells[dim - 1][fi].rep, g).unwrap_or(0);
            inc.entry(fi).or_default().push((ti, s * rel));
        }
    }
    inc
}

pub fn check_pseudomanifold(gc: &GluedComplex) -> Result<PseudomanifoldReport, ComplexError> {
    let g = gc.global()?;
    let dim = g.top_dim();
    let tops = g.count(dim);
    let mut failures = Vec::new();

    // purity: every global cell must occur in the closure of a top cell
    let mut covered = vec![false; g.total()];
    let offset = |d: usize, i: usize| -> usize {
        g.cells[..d].iter().map(|v| v.len()).sum::<usize>() + i
    };
    for top in &g.cells[dim] {
        for c in top.rep.closure() {
            let (d, i) = g.locate(&c).expect("closed complex");
            covered[offset(d, i)] = true;
        }
    }
    let pure = covered.iter().all(|&b| b);
    if !pure {
        failures.push("not pure: some cell is not a face of a top cell".into());
    }

    let inc = facet_incidences(&g, dim);
    let mut max_cofaces = 0usize;
    let mut offending = Vec::new();
    let mut boundary_faces = 0usize;
    for (fi, cof) in &inc {
        max_cofaces = max_cofaces.max(cof.len());
        match cof.len() {
            1 => boundary_faces += 1,
            2 => {}
            n if n > 2 => {
                if offending.len() < 8 {
                    offending.push(format!("{:?} has {} cofaces", g.cells[dim - 1][*fi].rep, n));
                }
            }
            _ => {}
        }
    }
    if !offending.is_empty() {
        failures.push(format!(
            "{} codimension-one cells have more than two cofaces",
            offending.len()
        ));
    }

    // dual-graph connectivity through shared codimension-one faces
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); tops];
    for cof in inc.values() {
        if cof.len() == 2 {
            adj[cof[0].0].push(cof[1].0);
            adj[cof[1].0].push(cof[0].0);
        }
    }
    let dual_connected = if tops == 0 {
        false
    } else {
        let mut seen = vec![false; tops];
        let mut q = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(t) = q.pop_front() {
            for &u in &adj[t] {
                if !seen[u] {
                    seen[u] = true;
                    q.push_back(u);
                }
            }
        }
        seen.iter().all(|&b| b)
    };
    if !dual_connected {
        failures.push("dual graph is not connected".into());
    }

    let orientable = orient_top(&g).map(|_| true).or({
        if dim == 0 {
            Some(true)
        } else {
            Some(false)
        }
    });
    let is_pseudomanifold = pure && max_cofaces <= 2 && dual_connected && tops > 0;
    Ok(PseudomanifoldReport {
        dimension: dim,
        top_cells: tops,
        pure,
        max_cofaces,
        offending_faces: offending,
        dual_connected,
        boundary_faces,
        closed: boundary_faces == 0,
        orientable,
        is_pseudomanifold,
        failures,
    })
}

/// Propagate a coherent integral orientation over the top cells; `None`
/// when the complex is non-orientable (or has an orientation-ambiguous
/// identification).
pub fn orient_top(g: &GlobalCells) -> Option<TopOrientation> {
    let dim = g.top_dim();
    let tops = g.count(dim);
    if tops == 0 {
        return None;
    }
    if dim == 0 {
        return Some(TopOrientation {
            dim,
            signs: vec![1; tops],
        });
    }
    let inc = facet_incidences(g, dim);
    let mut signs = vec![0i64; tops];
    for start in 0..tops {
        if signs[start] != 0 {
            continue;
        }
        signs[start] = 1;
        let mut q = VecDeque::from([start]);
        while let Some(t) = q.pop_front() {
            for cof in inc.values() {
                // coherence across a shared facet: the two induced
                // incidences must cancel
                if cof.len() == 2 {
                    let (a, sa) = cof[0];
                    let (b, sb) = cof[1];
                    if sa == 0 || sb == 0 {
                        return None;
                    }
                    let (from, to, sf, st) = if a == t && signs[b] == 0 {
                        (a, b, sa, sb)
                    } else if b == t && signs[a] == 0 {
                        (b, a, sb, sa)
                    } else {
                        continue;
                    };
                    signs[to] = -signs[from] * sf * st;
                    q.push_back(to);
                } else if cof.len() == 1 {
                    // boundary facet: no constraint
                }
            }
        }
    }
    // verify every two-coface constraint
    for cof in inc.values() {
        if cof.len() == 2 {
            let (a, sa) = cof[0];
            let (b, sb) = cof[1];
            if sa == 0 || sb == 0 || signs[a] * sa + signs[b] * sb != 0 {
                return None;
            }
        }
    }
    // a facet shared twice by the same top cell shows up as two entries with
    // the same index; the constraint above covers it
    Some(TopOrientation { dim, signs })
}

#[derive(Debug, thiserror::Error)]
pub enum DegreeError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("vertex map is not defined on vertex class {0}")]
    Unmapped(usize),
    #[error("source and target have different top dimensions ({0} vs {1})")]
    DimMismatch(usize, usize),
    #[error("no regular cell: every target top cell has an irregular preimage; a finer common subdivision is needed")]
    NoRegularCell,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DegreeResult {
    /// Index of the regular top cell of the target the degree was read at.
    pub regular_cell: usize,
    pub mod2: u8,
    /// Signed degree; absent when either side is non-orientable.
    pub integer: Option<i64>,
    /// Whether every regular cell reports the same values.
    pub consistent: bool,
}

/// Degree of a cellular vertex map between two complexes of equal top
/// dimension. `vertex_map` sends vertex classes of the source to vertex
/// classes of the target.
pub fn degree(
    source: &GluedComplex,
    target: &GluedComplex,
    vertex_map: &HashMap<usize, usize>,
) -> Result<DegreeResult, DegreeError> {
    let gs = source.global()?;
    let gt = target.global()?;
    let ds = gs.top_dim();
    let dt = gt.top_dim();
    if ds != dt {
        return Err(DegreeError::DimMismatch(ds, dt));
    }
    let dim = ds;
    let or_s = orient_top(&gs);
    let or_t = orient_top(&gt);

    // index target top cells by key
    let mut tkey: HashMap<Vec<usize>, usize> = HashMap::new();
    for (i, c) in gt.cells[dim].iter().enumerate() {
        tkey.insert(c.key.clone(), i);
    }

    #[derive(Clone, Copy)]
    enum Hit {
        Degenerate,
        Onto(usize, Option<i64>),
        Irregular(usize),
    }

    let mut hits: Vec<Hit> = Vec::with_capacity(gs.count(dim));
    for (si, sc) in gs.cells[dim].iter().enumerate() {
        // map the representative's vertices through the vertex map
        let verts = sc.rep.vertices();
        let mut classes = Vec::with_capacity(verts.len());
        for v in &verts {
            let c = gs
                .vertex_class(sc.rep.chart, &v.point())
                .expect("vertex of a cell");
            let img = *vertex_map.get(&c).ok_or(DegreeError::Unmapped(c))?;
            classes.push(img);
        }
        let mut key = classes.clone();
        key.sort_unstable();
        key.dedup();
        if key.len() < verts.len() {
            // at least two vertices collapse: the image has smaller dimension
            hits.push(Hit::Degenerate);
            continue;
        }
        let mut full_key = classes.clone();
        full_key.sort_unstable();
        match tkey.get(&full_key) {
            None => hits.push(Hit::Degenerate),
            Some(&ti) => {
                // signed-permutation comparison against the target cell
                let sign = signed_perm_class_sign(
                    &classes,
                    &cell_class_table(&gt, &gt.cells[dim][ti].rep),
                );
                match sign {
                    None => hits.push(Hit::Irregular(ti)),
                    Some(s) => {
                        let int = match (&or_s, &or_t) {
                            (Some(os), Some(ot)) => Some(s * os.signs[si] * ot.signs[ti]),
                            _ => None,
                        };
                        hits.push(Hit::Onto(ti, int));
                    }
                }
            }
        }
    }

    // accumulate per target cell
    let nt = gt.count(dim);
    let mut mod2 = vec![0u8; nt];
    let mut int: Vec<Option<i64>> = vec![Some(0); nt];
    let mut irregular = vec![false; nt];
    for h in &hits {
        match *h {
            Hit::Degenerate => {}
            Hit::Irregular(ti) => irregular[ti] = true,
            Hit::Onto(ti, s) => {
                mod2[ti] ^= 1;
                int[ti] = match (int[ti], s) {
                    (Some(acc), Some(v)) => Some(acc + v),
                    _ => None,
                };
            }
        }
    }
    let regular: Vec<usize> = (0..nt).filter(|&i| !irregular[i]).collect();
    let &first = regular.first().ok_or(DegreeError::NoRegularCell)?;
    let consistent = regular
        .iter()
        .all(|&i| mod2[i] == mod2[first] && int[i].map(i64::abs) == int[first].map(i64::abs));
    Ok(DegreeResult {
        regular_cell: first,
        mod2: mod2[first],
        integer: int[first],
        consistent,
    })
}

fn cell_class_table(g: &GlobalCells, cell: &crate::lattice::cell::CubicalCell) -> Vec<usize> {
    cell.vertices()
        .iter()
        .map(|v| g.vertex_class(cell.chart, &v.point()).expect("vertex"))
        .collect()
}

/// Sign of the unique signed axis permutation matching two vertex-class
/// tables of k-cells (tables indexed by the {0,1}^k corner masks).
fn signed_perm_class_sign(ca: &[usize], cb: &[usize]) -> Option<i64> {
    let k = ca.len().trailing_zeros() as usize;
    if ca.len() != (1 << k) || cb.len() != (1 << k) {
        return None;
    }
    let mut inv: HashMap<usize, u32> = HashMap::new();
    for (m, &c) in cb.iter().enumerate() {
        if inv.insert(c, m as u32).is_some() {
            return None;
        }
    }
    let b0 = *inv.get(&ca[0])?;
    let mut perm = vec![0usize; k];
    for alpha in 0..k {
        let m = *inv.get(&ca[1 << alpha])?;
        let diff = m ^ b0;
        if diff.count_ones() != 1 {
            return None;
        }
        perm[alpha] = diff.trailing_zeros() as usize;
    }
    for mask in 0u32..(1 << k) {
        let mut img = b0;
        for alpha in 0..k {
            if mask >> alpha & 1 == 1 {
                img ^= 1 << perm[alpha];
            }
        }
        if cb[img as usize] != ca[mask as usize] {
            return None;
        }
    }
    let mut seen = vec![false; k];
    for &p in &perm {
        if seen[p] {
            return None;
        }
        seen[p] = true;
    }
    let mut sign = 1i64;
    for i in 0..k {
        for j in i + 1..k {
            if perm[i] > perm[j] {
                sign = -sign;
            }
        }
    }
    Some(sign * if b0.count_ones() % 2 == 0 { 1 } else { -1 })
}
