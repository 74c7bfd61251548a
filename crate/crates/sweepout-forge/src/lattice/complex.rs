//! Charts of cubical cells glued along facets.
//!
//! A `GluedComplex` is a list of charts (each a grid plus a face-closed cell
//! set) together with facet identifications. Identifications are affine maps
//! that pin one axis on each side and carry the remaining axes onto each
//! other by a signed permutation, so grid points go to grid points.
//!
//! Cells from different charts are considered equal exactly when their
//! vertex classes (the orbits of the identification maps on vertices)
//! coincide; all global bookkeeping (boundary matrices, Euler counts) runs
//! over these deduplicated cells.

use crate::homology::linalg::{Z2Matrix, ZMatrix};
use crate::lattice::cell::CubicalCell;
use crate::lattice::grid::{AxisGrid, GridError};
use crate::rat::{rat_str, Rat};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Chart {
    pub grid: AxisGrid,
    pub cells: BTreeSet<CubicalCell>,
}

impl Chart {
    pub fn new(grid: AxisGrid) -> Self {
        Chart {
            grid,
            cells: BTreeSet::new(),
        }
    }

    /// Insert a cell together with its full face closure.
    pub fn insert_closed(&mut self, cell: CubicalCell) {
        for c in cell.closure() {
            self.cells.insert(c);
        }
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }
}

/// Where each target-chart axis gets its coordinate from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisImage {
    /// The axis is pinned to a constant (the identified facet's level).
    Fixed(Rat),
    /// Copied (up to sign) from a source-chart axis.
    Axis { from: usize, sign: i8 },
}

/// Point map from one chart into another, defined on a facet.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetMap {
    /// One entry per axis of the target chart.
    pub out: Vec<AxisImage>,
}

impl FacetMap {
    pub fn apply_point(&self, x: &[Rat]) -> Vec<Rat> {
        self.out
            .iter()
            .map(|img| match img {
                AxisImage::Fixed(v) => *v,
                AxisImage::Axis { from, sign } => {
                    if *sign < 0 {
                        -x[*from]
                    } else {
                        x[*from]
                    }
                }
            })
            .collect()
    }

    /// Image of a cell contained in the source facet.
    pub fn apply_cell(&self, target_chart: usize, cell: &CubicalCell) -> CubicalCell {
        let intervals = self
            .out
            .iter()
            .map(|img| match img {
                AxisImage::Fixed(v) => (*v, *v),
                AxisImage::Axis { from, sign } => {
                    let (lo, hi) = cell.intervals[*from];
                    if *sign < 0 {
                        (-hi, -lo)
                    } else {
                        (lo, hi)
                    }
                }
            })
            .collect();
        CubicalCell::new(target_chart, intervals)
    }

    /// Source axes actually consumed by the map.
    pub fn used_axes(&self) -> Vec<usize> {
        self.out
            .iter()
            .filter_map(|img| match img {
                AxisImage::Axis { from, .. } => Some(*from),
                AxisImage::Fixed(_) => None,
            })
            .collect()
    }
}

/// Identification of a facet of one chart with a facet of another (or the
/// same) chart.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Identification {
    pub chart_a: usize,
    pub facet_a: CubicalCell,
    pub chart_b: usize,
    pub facet_b: CubicalCell,
    pub map: FacetMap,
}

#[derive(Debug, thiserror::Error)]
pub enum ComplexError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("chart {chart}: cell endpoint {value} on axis {axis} is off the grid")]
    OffGrid {
        chart: usize,
        axis: usize,
        value: String,
    },
    #[error("chart {chart}: cell set not closed under faces (missing {missing})")]
    NotClosed { chart: usize, missing: String },
    #[error("identification {index}: {reason}")]
    BadIdentification { index: usize, reason: String },
    #[error("orientation is ambiguous on a self-identified cell; integral boundary undefined ({cell})")]
    OrientationAmbiguous { cell: String },
    #[error("chart index {0} out of range")]
    ChartIndex(usize),
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct GlueReport {
    pub chart_cells: usize,
    pub global_cells: usize,
    pub merged: usize,
    pub vertex_classes: usize,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct GluedComplex {
    pub charts: Vec<Chart>,
    pub identifications: Vec<Identification>,
}

/// One deduplicated cell of the glued complex.
#[derive(Clone, Debug)]
pub struct GlobalCell {
    /// Sorted vertex-class ids (duplicates kept).
    pub key: Vec<usize>,
    /// Deterministic chart representative (first occurrence).
    pub rep: CubicalCell,
    /// How many chart cells share this identity.
    pub occurrences: usize,
}

/// Deduplicated cell table of a `GluedComplex`.
pub struct GlobalCells {
    pub vertex_class_count: usize,
    vertex_class: HashMap<(usize, Vec<Rat>), usize>,
    /// cells[d] = global d-cells, in deterministic order
    pub cells: Vec<Vec<GlobalCell>>,
    index: HashMap<Vec<usize>, (usize, usize)>,
}

impl GlobalCells {
    pub fn vertex_class(&self, chart: usize, coords: &[Rat]) -> Option<usize> {
        self.vertex_class.get(&(chart, coords.to_vec())).copied()
    }

    pub fn cell_key(&self, cell: &CubicalCell) -> Option<Vec<usize>> {
        let mut key = Vec::new();
        for v in cell.vertices() {
            key.push(self.vertex_class(cell.chart, &v.point())?);
        }
        key.sort_unstable();
        Some(key)
    }

    /// (dimension, index) of the global cell a chart cell belongs to.
    pub fn locate(&self, cell: &CubicalCell) -> Option<(usize, usize)> {
        let key = self.cell_key(cell)?;
        self.index.get(&key).copied()
    }

    pub fn top_dim(&self) -> usize {
        self.cells.len().saturating_sub(1)
    }

    pub fn count(&self, dim: usize) -> usize {
        self.cells.get(dim).map_or(0, |v| v.len())
    }

    pub fn total(&self) -> usize {
        self.cells.iter().map(|v| v.len()).sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells
            .iter()
            .enumerate()
            .map(|(d, v)| if d % 2 == 0 { v.len() as i64 } else { -(v.len() as i64) })
            .sum()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins, keeps numbering deterministic
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

impl GluedComplex {
    pub fn single_chart(grid: AxisGrid) -> Self {
        GluedComplex {
            charts: vec![Chart::new(grid)],
            identifications: Vec::new(),
        }
    }

    pub fn top_dim(&self) -> usize {
        self.charts
            .iter()
            .flat_map(|ch| ch.cells.iter().map(|c| c.dim()))
            .max()
            .unwrap_or(0)
    }

    pub fn validate(&self) -> Result<(), ComplexError> {
        for (ci, chart) in self.charts.iter().enumerate() {
            chart.grid.validate()?;
            for cell in &chart.cells {
                if cell.chart != ci {
                    return Err(ComplexError::NotClosed {
                        chart: ci,
                        missing: format!("{cell:?} carries wrong chart id"),
                    });
                }
                for (axis, (lo, hi)) in cell.intervals.iter().enumerate() {
                    for v in [lo, hi] {
                        if !chart.grid.on_grid(axis, *v) {
                            return Err(ComplexError::OffGrid {
                                chart: ci,
                                axis,
                                value: rat_str(*v),
                            });
                        }
                    }
                }
                for (f, _) in cell.facets_signed() {
                    if !chart.cells.contains(&f) {
                        return Err(ComplexError::NotClosed {
                            chart: ci,
                            missing: format!("{f:?}"),
                        });
                    }
                }
            }
        }
        for (index, id) in self.identifications.iter().enumerate() {
            self.validate_identification(index, id)?;
        }
        Ok(())
    }

    fn validate_identification(&self, index: usize, id: &Identification) -> Result<(), ComplexError> {
        let bad = |reason: String| ComplexError::BadIdentification { index, reason };
        let ca = self
            .charts
            .get(id.chart_a)
            .ok_or(ComplexError::ChartIndex(id.chart_a))?;
        let cb = self
            .charts
            .get(id.chart_b)
            .ok_or(ComplexError::ChartIndex(id.chart_b))?;
        if id.facet_a.intervals.len() != ca.dim() || id.facet_b.intervals.len() != cb.dim() {
            return Err(bad("facet ambient dimension mismatch".into()));
        }
        if id.map.out.len() != cb.dim() {
            return Err(bad("map arity does not match target chart".into()));
        }
        let mut used = BTreeSet::new();
        for ax in id.map.used_axes() {
            if ax >= ca.dim() {
                return Err(bad(format!("map references axis {ax} out of range")));
            }
            if !used.insert(ax) {
                return Err(bad(format!("map references source axis {ax} twice")));
            }
        }
        // unreferenced source axes must be pinned in facet_a
        for ax in 0..ca.dim() {
            if !used.contains(&ax) {
                let (lo, hi) = id.facet_a.intervals[ax];
                if lo != hi {
                    return Err(bad(format!(
                        "source axis {ax} is free on the facet but unused by the map"
                    )));
                }
            }
        }
        let image = id.map.apply_cell(id.chart_b, &id.facet_a);
        if image != id.facet_b {
            return Err(bad(format!(
                "map does not carry the facet onto its partner (image {image:?}, expected {:?})",
                id.facet_b
            )));
        }
        // grid compatibility on the identified region
        for (to, img) in id.map.out.iter().enumerate() {
            if let AxisImage::Axis { from, sign } = img {
                let (lo, hi) = id.facet_a.intervals[*from];
                for &bp in &ca.grid.axes[*from] {
                    if bp >= lo && bp <= hi {
                        let v = if *sign < 0 { -bp } else { bp };
                        if !cb.grid.on_grid(to, v) {
                            return Err(bad(format!(
                                "breakpoint {} maps off the target grid on axis {to}",
                                rat_str(bp)
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Append identifications, re-validate, and report how many cells merged.
    pub fn glue(mut self, ids: Vec<Identification>) -> Result<(Self, GlueReport), ComplexError> {
        self.identifications.extend(ids);
        self.validate()?;
        let g = self.global()?;
        let chart_cells: usize = self.charts.iter().map(|c| c.cells.len()).sum();
        let report = GlueReport {
            chart_cells,
            global_cells: g.total(),
            merged: chart_cells - g.total(),
            vertex_classes: g.vertex_class_count,
        };
        Ok((self, report))
    }

    /// Compute vertex classes and the deduplicated cell table.
    pub fn global(&self) -> Result<GlobalCells, ComplexError> {
        // gather vertices in deterministic order
        let mut vlist: Vec<(usize, Vec<Rat>)> = Vec::new();
        let mut vidx: HashMap<(usize, Vec<Rat>), usize> = HashMap::new();
        for (ci, chart) in self.charts.iter().enumerate() {
            for cell in &chart.cells {
                if cell.is_vertex() {
                    let key = (ci, cell.point());
                    if !vidx.contains_key(&key) {
                        vidx.insert(key.clone(), vlist.len());
                        vlist.push(key);
                    }
                }
            }
        }
        let mut uf = UnionFind::new(vlist.len());
        for id in &self.identifications {
            for (vi, (chart, coords)) in vlist.iter().enumerate() {
                if *chart != id.chart_a || !id.facet_a.contains_point(coords) {
                    continue;
                }
                let img = id.map.apply_point(coords);
                if let Some(&wi) = vidx.get(&(id.chart_b, img)) {
                    uf.union(vi, wi);
                }
            }
        }
        // dense class ids in order of first appearance
        let mut class_of_root: HashMap<usize, usize> = HashMap::new();
        let mut vertex_class: HashMap<(usize, Vec<Rat>), usize> = HashMap::new();
        let mut next = 0usize;
        for vi in 0..vlist.len() {
            let root = uf.find(vi);
            let class = *class_of_root.entry(root).or_insert_with(|| {
                let c = next;
                next += 1;
                c
            });
            vertex_class.insert(vlist[vi].clone(), class);
        }

        // deduplicate cells by sorted vertex-class key
        let top = self.top_dim();
        let mut cells: Vec<Vec<GlobalCell>> = vec![Vec::new(); top + 1];
        let mut index: HashMap<Vec<usize>, (usize, usize)> = HashMap::new();
        for chart in &self.charts {
            for cell in &chart.cells {
                let mut key: Vec<usize> = cell
                    .vertices()
                    .iter()
                    .map(|v| vertex_class[&(cell.chart, v.point())])
                    .collect();
                key.sort_unstable();
                let d = cell.dim();
                match index.get(&key) {
                    Some(&(gd, gi)) => {
                        if gd != d {
                            return Err(ComplexError::BadIdentification {
                                index: usize::MAX,
                                reason: format!(
                                    "cells of dimensions {gd} and {d} share a vertex-class key"
                                ),
                            });
                        }
                        cells[gd][gi].occurrences += 1;
                    }
                    None => {
                        index.insert(key.clone(), (d, cells[d].len()));
                        cells[d].push(GlobalCell {
                            key,
                            rep: cell.clone(),
                            occurrences: 1,
                        });
                    }
                }
            }
        }
        Ok(GlobalCells {
            vertex_class_count: next,
            vertex_class: vidx
                .keys()
                .map(|k| (k.clone(), vertex_class[k]))
                .collect(),
            cells,
            index,
        })
    }

    /// Subcomplex of all cells of dimension <= p (identifications kept, so
    /// vertex classes are unchanged).
    pub fn skeleton(&self, p: usize) -> GluedComplex {
        let charts = self
            .charts
            .iter()
            .map(|ch| Chart {
                grid: ch.grid.clone(),
                cells: ch.cells.iter().filter(|c| c.dim() <= p).cloned().collect(),
            })
            .collect();
        GluedComplex {
            charts,
            identifications: self.identifications.clone(),
        }
    }

    /// Mod-2 boundary operator from k-cells to (k-1)-cells.
    pub fn boundary_matrix_z2(&self, g: &GlobalCells, k: usize) -> Z2Matrix {
        let rows = if k == 0 { 0 } else { g.count(k - 1) };
        let ncols = g.count(k);
        let mut cols = Vec::with_capacity(ncols);
        for gc in g.cells.get(k).map(|v| v.as_slice()).unwrap_or(&[]) {
            let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
            if k > 0 {
                for (f, _) in gc.rep.facets_signed() {
                    let (fd, fi) = g.locate(&f).expect("face of a cell must be present");
                    debug_assert_eq!(fd, k - 1);
                    *counts.entry(fi).or_insert(0) += 1;
                }
            }
            let col: Vec<usize> = counts
                .into_iter()
                .filter(|(_, c)| c % 2 == 1)
                .map(|(r, _)| r)
                .collect();
            cols.push(col);
        }
        Z2Matrix { rows, cols }
    }

    /// Integral boundary operator; errors when a cell is identified with
    /// itself in an orientation-ambiguous way.
    pub fn boundary_matrix_z(&self, g: &GlobalCells, k: usize) -> Result<ZMatrix, ComplexError> {
        let rows = if k == 0 { 0 } else { g.count(k - 1) };
        let ncols = g.count(k);
        let mut cols = Vec::with_capacity(ncols);
        for gc in g.cells.get(k).map(|v| v.as_slice()).unwrap_or(&[]) {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            if k > 0 {
                for (f, s) in gc.rep.facets_signed() {
                    let (_, fi) = g.locate(&f).expect("face of a cell must be present");
                    let frep = &g.cells[k - 1][fi].rep;
                    let cmp = orientation_between(&f, frep, g).ok_or_else(|| {
                        ComplexError::OrientationAmbiguous {
                            cell: format!("{f:?}"),
                        }
                    })?;
                    *acc.entry(fi).or_insert(0) += s * cmp;
                }
            }
            let col: Vec<(usize, i64)> = acc.into_iter().filter(|(_, c)| *c != 0).collect();
            cols.push(col);
        }
        Ok(ZMatrix { rows, cols })
    }
}

/// Relative orientation of two chart cells representing the same global
/// cell: +1/-1 for the sign of the induced signed axis permutation, `None`
/// when no unambiguous signed permutation matches the vertex classes.
pub fn orientation_between(a: &CubicalCell, b: &CubicalCell, g: &GlobalCells) -> Option<i64> {
    let fa = a.free_axes();
    let fb = b.free_axes();
    let k = fa.len();
    if fb.len() != k {
        return None;
    }
    if k == 0 {
        return Some(1);
    }
    let class_table = |cell: &CubicalCell, free: &[usize]| -> Option<Vec<usize>> {
        let mut coords: Vec<Rat> = cell.intervals.iter().map(|&(lo, _)| lo).collect();
        let mut out = Vec::with_capacity(1 << k);
        for mask in 0u32..(1 << k) {
            for (bit, &ax) in free.iter().enumerate() {
                coords[ax] = if mask >> bit & 1 == 1 {
                    cell.intervals[ax].1
                } else {
                    cell.intervals[ax].0
                };
            }
            out.push(g.vertex_class(cell.chart, &coords)?);
        }
        Some(out)
    };
    let ca = class_table(a, &fa)?;
    let cb = class_table(b, &fb)?;

    // fast path: distinct classes on b
    let mut inv: HashMap<usize, u32> = HashMap::new();
    let mut distinct = true;
    for (m, &c) in cb.iter().enumerate() {
        if inv.insert(c, m as u32).is_some() {
            distinct = false;
            break;
        }
    }
    if distinct {
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
        // verify the whole table is xor-affine with this permutation
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
        return Some(perm_sign(&perm) * if b0.count_ones() % 2 == 0 { 1 } else { -1 });
    }

    // slow path: search all signed permutations, demand a unique sign
    let mut found_sign: Option<i64> = None;
    let mut perm: Vec<usize> = (0..k).collect();
    loop {
        'signs: for smask in 0u32..(1 << k) {
            for mask in 0u32..(1 << k) {
                let mut img = 0u32;
                for alpha in 0..k {
                    let bit = (mask >> alpha & 1) ^ (smask >> alpha & 1);
                    img |= bit << perm[alpha];
                }
                if cb[img as usize] != ca[mask as usize] {
                    continue 'signs;
                }
            }
            let sign = perm_sign(&perm) * if smask.count_ones() % 2 == 0 { 1 } else { -1 };
            match found_sign {
                None => found_sign = Some(sign),
                Some(s) if s != sign => return None,
                _ => {}
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    found_sign
}

fn perm_sign(perm: &[usize]) -> i64 {
    let mut sign = 1i64;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                sign = -sign;
            }
        }
    }
    sign
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
