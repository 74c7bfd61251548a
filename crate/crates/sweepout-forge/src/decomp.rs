//! Standard decompositions of the cube C^{n+1} = [-1,1]^{n+1}.
//!
//! For a parameter eps in (0,1) and a codimension parameter p <= n the cube
//! splits along the hyperplanes x_i = +-eps into
//!
//! * `x1`: points with at most p coordinates of absolute value < eps,
//! * `x2`: points with at least p+1 coordinates of absolute value <= eps,
//! * `y` = x1 ∩ x2, an n-dimensional pseudomanifold,
//! * `z`: points with at least p+1 vanishing coordinates,
//! * `skeleton`: points with all but at most p coordinates equal to +-1.
//!
//! X1/X2/Y cells live on the breakpoints {-1, -eps, eps, 1}; Z cells on
//! {-1, 0, 1}. The chart grid carries all five values so both coexist.

use crate::homology::pseudo::{check_pseudomanifold, PseudomanifoldReport};
use crate::lattice::cell::CubicalCell;
use crate::lattice::complex::{Chart, ComplexError, GluedComplex};
use crate::lattice::grid::AxisGrid;
use crate::rat::{rat_int, rat_str, Rat};
use num_traits::{Signed, Zero};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum DecompError {
    #[error("eps must lie strictly between 0 and 1, got {0}")]
    BadEps(String),
    #[error("need 0 <= p <= n, got p = {p}, n = {n}")]
    BadProfile { p: usize, n: usize },
    #[error("point {0} is outside the expected domain")]
    OutOfDomain(String),
    #[error("point {0} has fewer zero coordinates than the fiber construction needs")]
    TooFewZeros(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

fn fmt_point(x: &[Rat]) -> String {
    let parts: Vec<String> = x.iter().map(|&v| rat_str(v)).collect();
    format!("({})", parts.join(", "))
}

fn check_eps(eps: Rat) -> Result<(), DecompError> {
    if eps <= Rat::zero() || eps >= rat_int(1) {
        return Err(DecompError::BadEps(rat_str(eps)));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// profile maps

/// Outer profile: collapses [-eps, eps] to 0 and rescales the outer bands
/// onto [-1, 0] and [0, 1].
pub fn lambda(eps: Rat, t: Rat) -> Rat {
    let one = rat_int(1);
    if t.abs() <= eps {
        Rat::zero()
    } else if t > Rat::zero() {
        (t - eps) / (one - eps)
    } else {
        (t + eps) / (one - eps)
    }
}

/// Inverse of the outer profile away from 0 (the positive/negative branch is
/// picked by the sign of v).
pub fn lambda_inv(eps: Rat, v: Rat) -> Rat {
    let one = rat_int(1);
    if v.is_zero() {
        Rat::zero()
    } else if v > Rat::zero() {
        v * (one - eps) + eps
    } else {
        v * (one - eps) - eps
    }
}

/// Inner profile: stretches [-eps, eps] over [-1, 1] and saturates outside.
pub fn mu(eps: Rat, t: Rat) -> Rat {
    debug_assert!(eps > Rat::zero());
    if t >= eps {
        rat_int(1)
    } else if t <= -eps {
        rat_int(-1)
    } else {
        t / eps
    }
}

/// Coordinatewise outer profile.
pub fn theta(eps: Rat, x: &[Rat]) -> Vec<Rat> {
    x.iter().map(|&t| lambda(eps, t)).collect()
}

/// Coordinatewise outer profile with a domain check against Y.
pub fn theta_on_y(n: usize, p: usize, eps: Rat, x: &[Rat]) -> Result<Vec<Rat>, DecompError> {
    check_eps(eps)?;
    if x.len() != n + 1 || !point_in_y(p, eps, x) {
        return Err(DecompError::OutOfDomain(fmt_point(x)));
    }
    Ok(theta(eps, x))
}

/// Coordinatewise inner profile, restricted to X1.
pub fn rho(n: usize, p: usize, eps: Rat, x: &[Rat]) -> Result<Vec<Rat>, DecompError> {
    check_eps(eps)?;
    if x.len() != n + 1 || !point_in_x1(p, eps, x) {
        return Err(DecompError::OutOfDomain(fmt_point(x)));
    }
    Ok(x.iter().map(|&t| mu(eps, t)).collect())
}

/// Coordinatewise inner profile on the whole cube (the degree-one
/// extension of `rho`).
pub fn rho_bar(eps: Rat, x: &[Rat]) -> Vec<Rat> {
    x.iter().map(|&t| mu(eps, t)).collect()
}

// pointwise region predicates -----------------------------------------------

pub fn point_in_x1(p: usize, eps: Rat, x: &[Rat]) -> bool {
    x.iter().filter(|t| t.abs() < eps).count() <= p
}

pub fn point_in_x2(p: usize, eps: Rat, x: &[Rat]) -> bool {
    x.iter().filter(|t| t.abs() <= eps).count() >= p + 1
}

pub fn point_in_y(p: usize, eps: Rat, x: &[Rat]) -> bool {
    point_in_x1(p, eps, x) && point_in_x2(p, eps, x)
}

pub fn point_in_z(p: usize, x: &[Rat]) -> bool {
    x.iter().filter(|t| t.is_zero()).count() >= p + 1
}

// ---------------------------------------------------------------------------
// the decomposition itself

#[derive(Serialize)]
pub struct DecompositionSummary {
    pub n: usize,
    pub p: usize,
    pub eps: String,
    pub x1_top_cells: usize,
    pub x2_top_cells: usize,
    pub y_top_cells: usize,
    pub z_top_cells: usize,
    pub skeleton_cells: usize,
}

pub struct DecompositionSet {
    pub n: usize,
    pub p: usize,
    pub eps: Rat,
    pub skeleton: GluedComplex,
    pub z: GluedComplex,
    pub x1: GluedComplex,
    pub x2: GluedComplex,
    pub y: GluedComplex,
}

/// The three band intervals on one axis: [-1,-eps], [-eps,eps], [eps,1].
fn bands(eps: Rat) -> [(Rat, Rat); 3] {
    [
        (rat_int(-1), -eps),
        (-eps, eps),
        (eps, rat_int(1)),
    ]
}

fn chart_complex(dim: usize, eps: Rat, cells: Vec<CubicalCell>) -> GluedComplex {
    let mut chart = Chart::new(AxisGrid::standard(dim, eps));
    for c in cells {
        chart.insert_closed(c);
    }
    GluedComplex {
        charts: vec![chart],
        identifications: Vec::new(),
    }
}

pub fn build_decomposition(n: usize, p: usize, eps: Rat) -> Result<DecompositionSet, DecompError> {
    check_eps(eps)?;
    if p > n {
        return Err(DecompError::BadProfile { p, n });
    }
    let d = n + 1;
    let b = bands(eps);

    // X1 / X2: band products filtered by how many middle bands they use
    let mut x1_cells = Vec::new();
    let mut x2_cells = Vec::new();
    let mut pattern = vec![0usize; d];
    loop {
        let middle = pattern.iter().filter(|&&i| i == 1).count();
        let cell = CubicalCell::new(0, pattern.iter().map(|&i| b[i]).collect());
        if middle <= p {
            x1_cells.push(cell.clone());
        }
        if middle >= p + 1 {
            x2_cells.push(cell);
        }
        // increment base-3 counter
        let mut i = 0;
        loop {
            if i == d {
                break;
            }
            pattern[i] += 1;
            if pattern[i] < 3 {
                break;
            }
            pattern[i] = 0;
            i += 1;
        }
        if i == d {
            break;
        }
    }

    // Y: exactly p middle bands, one axis pinned at +-eps, the rest outer
    let mut y_cells = Vec::new();
    enumerate_y_cells(d, p, eps, &mut y_cells);

    // Z: p+1 zero coordinates and unit intervals elsewhere
    let mut z_cells = Vec::new();
    enumerate_z_cells(d, p + 1, &mut z_cells);

    // skeleton: p free [-1,1] axes, the rest pinned at +-1
    let mut skel_cells = Vec::new();
    enumerate_skeleton_cells(d, p, &mut skel_cells);

    Ok(DecompositionSet {
        n,
        p,
        eps,
        skeleton: chart_complex(d, eps, skel_cells),
        z: chart_complex(d, eps, z_cells),
        x1: chart_complex(d, eps, x1_cells),
        x2: chart_complex(d, eps, x2_cells),
        y: chart_complex(d, eps, y_cells),
    })
}

/// Top cells of Y in ambient dimension d with profile p: products with
/// exactly p middle bands, exactly one coordinate pinned at +-eps, and
/// outer bands elsewhere.
fn enumerate_y_cells(d: usize, p: usize, eps: Rat, out: &mut Vec<CubicalCell>) {
    let outer = [(rat_int(-1), -eps), (eps, rat_int(1))];
    // choose the p middle axes, then the pinned axis among the rest
    let axes: Vec<usize> = (0..d).collect();
    for middle_set in combinations(&axes, p) {
        for &pin in axes.iter().filter(|a| !middle_set.contains(a)) {
            // sign choices for the pinned axis and the outer axes
            let free_outer: Vec<usize> = axes
                .iter()
                .copied()
                .filter(|a| !middle_set.contains(a) && *a != pin)
                .collect();
            for signs in 0u32..(1 << (free_outer.len() + 1)) {
                let mut intervals = vec![(Rat::zero(), Rat::zero()); d];
                for &m in &middle_set {
                    intervals[m] = (-eps, eps);
                }
                let pin_sign = signs & 1 == 1;
                intervals[pin] = if pin_sign { (eps, eps) } else { (-eps, -eps) };
                for (k, &a) in free_outer.iter().enumerate() {
                    intervals[a] = outer[(signs >> (k + 1) & 1) as usize];
                }
                out.push(CubicalCell::new(0, intervals));
            }
        }
    }
}

fn enumerate_z_cells(d: usize, zeros: usize, out: &mut Vec<CubicalCell>) {
    let units = [(rat_int(-1), Rat::zero()), (Rat::zero(), rat_int(1))];
    let axes: Vec<usize> = (0..d).collect();
    for zero_set in combinations(&axes, zeros) {
        let free: Vec<usize> = axes.iter().copied().filter(|a| !zero_set.contains(a)).collect();
        for signs in 0u32..(1 << free.len()) {
            let mut intervals = vec![(Rat::zero(), Rat::zero()); d];
            for (k, &a) in free.iter().enumerate() {
                intervals[a] = units[(signs >> k & 1) as usize];
            }
            out.push(CubicalCell::new(0, intervals));
        }
    }
}

fn enumerate_skeleton_cells(d: usize, p: usize, out: &mut Vec<CubicalCell>) {
    let axes: Vec<usize> = (0..d).collect();
    for free_set in combinations(&axes, p) {
        let pinned: Vec<usize> = axes.iter().copied().filter(|a| !free_set.contains(a)).collect();
        for signs in 0u32..(1 << pinned.len()) {
            let mut intervals = vec![(rat_int(-1), rat_int(1)); d];
            for (k, &a) in pinned.iter().enumerate() {
                let v = if signs >> k & 1 == 1 { rat_int(1) } else { rat_int(-1) };
                intervals[a] = (v, v);
            }
            out.push(CubicalCell::new(0, intervals));
        }
    }
}

pub fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(items: &[usize], start: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, i + 1, k, cur, out);
            cur.pop();
        }
    }
    rec(items, 0, k, &mut cur, &mut out);
    out
}

impl DecompositionSet {
    pub fn summary(&self) -> DecompositionSummary {
        let tops = |gc: &GluedComplex, d: usize| {
            gc.charts[0].cells.iter().filter(|c| c.dim() == d).count()
        };
        DecompositionSummary {
            n: self.n,
            p: self.p,
            eps: rat_str(self.eps),
            x1_top_cells: tops(&self.x1, self.n + 1),
            x2_top_cells: tops(&self.x2, self.n + 1),
            y_top_cells: tops(&self.y, self.n),
            z_top_cells: tops(&self.z, self.n - self.p),
            skeleton_cells: self.skeleton.charts[0].cells.len(),
        }
    }

    /// Structural coherence: the band top cells are partitioned between X1
    /// and X2, their common closed cells are exactly Y, the zero locus sits
    /// inside X2 and the skeleton inside X1.
    pub fn check_coherence(&self) -> Result<(), String> {
        let d = self.n + 1;
        let x1 = &self.x1.charts[0].cells;
        let x2 = &self.x2.charts[0].cells;
        let tops_union = x1.iter().chain(x2.iter()).filter(|c| c.dim() == d).count();
        if tops_union != 3usize.pow(d as u32) {
            return Err(format!(
                "X1 and X2 top cells do not cover the cube: {tops_union} vs {}",
                3usize.pow(d as u32)
            ));
        }
        let common: std::collections::BTreeSet<_> = x1.intersection(x2).cloned().collect();
        let y: std::collections::BTreeSet<_> = self.y.charts[0].cells.iter().cloned().collect();
        if common != y {
            return Err(format!(
                "X1 ∩ X2 has {} cells but Y has {}",
                common.len(),
                y.len()
            ));
        }
        // pointwise inclusions via cell vertices and band structure
        for c in &self.z.charts[0].cells {
            if !cell_in_region(c, |x| point_in_x2(self.p, self.eps, x)) {
                return Err(format!("Z cell {c:?} leaves X2"));
            }
        }
        for c in &self.skeleton.charts[0].cells {
            if !cell_in_region(c, |x| point_in_x1(self.p, self.eps, x)) {
                return Err(format!("skeleton cell {c:?} leaves X1"));
            }
        }
        Ok(())
    }

    /// Pseudomanifold check for Y, plus the boundary-location check: every
    /// boundary face of Y must sit inside the boundary of the cube.
    pub fn validate_y(&self) -> Result<YReport, DecompError> {
        let report = check_pseudomanifold(&self.y)?;
        let g = self.y.global()?;
        let inc = crate::homology::pseudo::facet_incidences(&g, self.n);
        let mut boundary_ok = true;
        for (fi, cof) in &inc {
            if cof.len() == 1 {
                let rep = &g.cells[self.n - 1][*fi].rep;
                let on_cube_boundary = rep
                    .intervals
                    .iter()
                    .any(|&(lo, hi)| lo == hi && lo.abs() == rat_int(1));
                if !on_cube_boundary {
                    boundary_ok = false;
                }
            }
        }
        Ok(YReport {
            pseudomanifold: report,
            boundary_in_cube_boundary: boundary_ok,
        })
    }
}

#[derive(Debug, Serialize)]
pub struct YReport {
    pub pseudomanifold: PseudomanifoldReport,
    pub boundary_in_cube_boundary: bool,
}

/// A closed cell lies in a region when a sample of each open face does; for
/// the band-linear predicates used here it is enough to test the cell's
/// barycenter together with its vertices.
fn cell_in_region(cell: &CubicalCell, pred: impl Fn(&[Rat]) -> bool) -> bool {
    let two = rat_int(2);
    let bary: Vec<Rat> = cell.intervals.iter().map(|&(lo, hi)| (lo + hi) / two).collect();
    if !pred(&bary) {
        return false;
    }
    cell.vertices().iter().all(|v| pred(&v.point()))
}

// ---------------------------------------------------------------------------
// fibers of the outer profile

/// Fiber of theta over a point z with zero set of size k: the sub-cube
/// skeleton spanned by the zero axes at height eps, positioned at
/// lambda^{-1}(z_j) on the nonzero axes. Materialized on a refined grid.
pub fn theta_fiber(p: usize, eps: Rat, z: &[Rat]) -> Result<GluedComplex, DecompError> {
    check_eps(eps)?;
    let d = z.len();
    let zeros: Vec<usize> = (0..d).filter(|&j| z[j].is_zero()).collect();
    if zeros.len() < p + 1 {
        return Err(DecompError::TooFewZeros(fmt_point(z)));
    }
    if z.iter().any(|t| t.abs() > rat_int(1)) {
        return Err(DecompError::OutOfDomain(fmt_point(z)));
    }
    let fixed: Vec<(usize, Rat)> = (0..d)
        .filter(|j| !z[*j].is_zero())
        .map(|j| (j, lambda_inv(eps, z[j])))
        .collect();
    let mut grid = AxisGrid::standard(d, eps);
    for ax in 0..d {
        grid.refine(ax, &fixed.iter().map(|&(_, v)| v).collect::<Vec<_>>());
    }
    let mut chart = Chart::new(grid);
    for free_set in combinations(&zeros, p.min(zeros.len())) {
        let others: Vec<usize> = zeros.iter().copied().filter(|a| !free_set.contains(a)).collect();
        for signs in 0u32..(1 << others.len()) {
            let mut intervals = vec![(Rat::zero(), Rat::zero()); d];
            for &(j, v) in &fixed {
                intervals[j] = (v, v);
            }
            for &a in &free_set {
                intervals[a] = (-eps, eps);
            }
            for (k, &a) in others.iter().enumerate() {
                let v = if signs >> k & 1 == 1 { eps } else { -eps };
                intervals[a] = (v, v);
            }
            chart.insert_closed(CubicalCell::new(0, intervals));
        }
    }
    Ok(GluedComplex {
        charts: vec![chart],
        identifications: Vec::new(),
    })
}

/// Canonical-form comparison against the p-skeleton of the k-cube: drop the
/// constant axes, rescale {-eps, eps} to {-1, 1}, and compare cell sets.
pub fn fiber_is_cube_skeleton(fiber: &GluedComplex, k: usize, p: usize) -> bool {
    let cells = &fiber.charts[0].cells;
    if cells.is_empty() {
        return k == 0;
    }
    let d = cells.iter().next().unwrap().ambient_dim();
    // an axis is active when some cell is nondegenerate on it
    let mut active = vec![false; d];
    for c in cells {
        for (ax, (lo, hi)) in c.intervals.iter().enumerate() {
            if lo != hi {
                active[ax] = true;
            }
        }
    }
    let axes: Vec<usize> = (0..d).filter(|&a| active[a]).collect();
    if axes.len() != k {
        return false;
    }
    // each active axis must use exactly the symmetric pair {-v, v}
    let mut scale = vec![Rat::zero(); d];
    for &a in &axes {
        let mut vals = std::collections::BTreeSet::new();
        for c in cells {
            vals.insert(c.intervals[a].0);
            vals.insert(c.intervals[a].1);
        }
        if vals.len() != 2 {
            return false;
        }
        let mut it = vals.into_iter();
        let lo = it.next().unwrap();
        let hi = it.next().unwrap();
        if lo != -hi || hi <= Rat::zero() {
            return false;
        }
        scale[a] = hi;
    }
    let normalized: std::collections::BTreeSet<Vec<(Rat, Rat)>> = cells
        .iter()
        .map(|c| {
            axes.iter()
                .map(|&a| {
                    let (lo, hi) = c.intervals[a];
                    (lo / scale[a], hi / scale[a])
                })
                .collect()
        })
        .collect();
    // model: p-skeleton of [-1,1]^k
    let model_top = CubicalCell::new(0, vec![(rat_int(-1), rat_int(1)); k]);
    let mut model = std::collections::BTreeSet::new();
    let mut stack: Vec<CubicalCell> = model_top
        .faces(k.saturating_sub(p))
        .into_iter()
        .collect();
    if p >= k {
        stack = vec![model_top];
    }
    while let Some(c) = stack.pop() {
        if model.insert(c.intervals.clone()) {
            for (f, _) in c.facets_signed() {
                stack.push(f);
            }
        }
    }
    normalized == model
}

/// Number of 1-cells of a complex (single chart or glued).
pub fn edge_count(gc: &GluedComplex) -> usize {
    match gc.global() {
        Ok(g) => g.count(1),
        Err(_) => 0,
    }
}

// ---------------------------------------------------------------------------
// degree of the inner profile on the cube boundary

/// Boundary sphere of the d-cube subdivided along the given breakpoints:
/// one axis pinned at +-1, adjacent-breakpoint intervals elsewhere.
pub fn subdivided_cube_boundary(d: usize, breaks: &[Rat]) -> GluedComplex {
    let grid = AxisGrid::uniform(d, breaks.to_vec());
    let mut chart = Chart::new(grid);
    let m = breaks.len() - 1;
    for pin_axis in 0..d {
        for pin_sign in [rat_int(-1), rat_int(1)] {
            let free: Vec<usize> = (0..d).filter(|&a| a != pin_axis).collect();
            let mut idx = vec![0usize; free.len()];
            loop {
                let mut intervals = vec![(Rat::zero(), Rat::zero()); d];
                intervals[pin_axis] = (pin_sign, pin_sign);
                for (k, &a) in free.iter().enumerate() {
                    intervals[a] = (breaks[idx[k]], breaks[idx[k] + 1]);
                }
                chart.insert_closed(CubicalCell::new(0, intervals));
                let mut i = 0;
                while i < idx.len() {
                    idx[i] += 1;
                    if idx[i] < m {
                        break;
                    }
                    idx[i] = 0;
                    i += 1;
                }
                if i == idx.len() {
                    break;
                }
            }
        }
    }
    GluedComplex {
        charts: vec![chart],
        identifications: Vec::new(),
    }
}

/// Degree of the inner profile restricted to the boundary sphere of the
/// d-cube, computed as a cellular vertex map from the band-subdivided
/// boundary onto the unit-subdivided boundary.
pub fn rho_bar_boundary_degree(
    d: usize,
    eps: Rat,
) -> Result<crate::homology::pseudo::DegreeResult, DecompError> {
    check_eps(eps)?;
    let source = subdivided_cube_boundary(d, &[rat_int(-1), -eps, Rat::zero(), eps, rat_int(1)]);
    let target = subdivided_cube_boundary(d, &[rat_int(-1), Rat::zero(), rat_int(1)]);
    degree_via_mu(&source, &target, eps)
}

/// Same computation on a finer pair of subdivisions; the degree must agree.
pub fn rho_bar_boundary_degree_refined(
    d: usize,
    eps: Rat,
) -> Result<crate::homology::pseudo::DegreeResult, DecompError> {
    check_eps(eps)?;
    let half = eps / rat_int(2);
    let source = subdivided_cube_boundary(
        d,
        &[rat_int(-1), -eps, -half, Rat::zero(), half, eps, rat_int(1)],
    );
    let target = subdivided_cube_boundary(
        d,
        &[rat_int(-1), crate::rat::rat(-1, 2), Rat::zero(), crate::rat::rat(1, 2), rat_int(1)],
    );
    degree_via_mu(&source, &target, eps)
}

fn degree_via_mu(
    source: &GluedComplex,
    target: &GluedComplex,
    eps: Rat,
) -> Result<crate::homology::pseudo::DegreeResult, DecompError> {
    let gs = source.global()?;
    let gt = target.global()?;
    let mut vmap = std::collections::HashMap::new();
    for cell in &gs.cells[0] {
        let pt = cell.rep.point();
        let sclass = gs.vertex_class(cell.rep.chart, &pt).expect("global vertex");
        let image: Vec<Rat> = pt.iter().map(|&t| mu(eps, t)).collect();
        let tclass = gt
            .vertex_class(0, &image)
            .ok_or_else(|| DecompError::OutOfDomain(fmt_point(&image)))?;
        vmap.insert(sclass, tclass);
    }
    crate::homology::pseudo::degree(source, target, &vmap)
        .map_err(|e| DecompError::OutOfDomain(e.to_string()))
}

// ---------------------------------------------------------------------------
// the cone-indexed sweepout

/// Value of the cone map on a point of the cube: either the cone point (on
/// the skeleton) or a pair (base point, level).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConeValue {
    Star,
    Point { z: Vec<Rat>, level: Rat },
}

/// Cone map C^m -> Cone(Z): the level is the (p+1)-st smallest absolute
/// coordinate, the base point the outer profile at that level.
pub fn big_theta(p: usize, x: &[Rat]) -> Result<ConeValue, DecompError> {
    let m = x.len();
    if p + 1 > m {
        return Err(DecompError::BadProfile { p, n: m });
    }
    if x.iter().any(|t| t.abs() > rat_int(1)) {
        return Err(DecompError::OutOfDomain(fmt_point(x)));
    }
    let mut sorted: Vec<Rat> = x.iter().map(|t| t.abs()).collect();
    sorted.sort();
    let level = sorted[p];
    if level == rat_int(1) {
        return Ok(ConeValue::Star);
    }
    let z = if level.is_zero() {
        x.to_vec()
    } else {
        theta(level, x)
    };
    Ok(ConeValue::Point { z, level })
}

/// A cell of the cone over the zero locus: the apex, a base cell at level
/// zero, or the open cone over a base cell.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConeCell {
    Apex,
    Base(CubicalCell),
    Side(CubicalCell),
}

pub struct SweepFiber {
    pub cell: ConeCell,
    /// Generic sample (base point, level) the fiber was computed at.
    pub sample: Option<(Vec<Rat>, Rat)>,
    pub fiber: GluedComplex,
    pub edge_count: usize,
    /// Size of the zero set at the sample (the k of the k-cube skeleton).
    pub zero_count: usize,
}

/// Deterministic interior sample of a cell: distinct non-special values on
/// the free axes.
pub fn generic_sample(cell: &CubicalCell) -> Vec<Rat> {
    let mut out = Vec::with_capacity(cell.intervals.len());
    let mut salt = 0i64;
    for &(lo, hi) in &cell.intervals {
        if lo == hi {
            out.push(lo);
        } else {
            // a point strictly inside (lo, hi), varying with the axis
            let w = hi - lo;
            let f = crate::rat::rat(2 * salt + 5, 4 * (cell.intervals.len() as i64) + 16);
            out.push(lo + w * f);
            salt += 1;
        }
    }
    out
}

/// The fiber family of the cone map over C^n with profile p: one record per
/// cone cell over the zero locus Z^{n-p-1} in C^n, plus the apex.
pub fn natural_sweepout(n: usize, p: usize) -> Result<Vec<SweepFiber>, DecompError> {
    if p + 1 > n {
        return Err(DecompError::BadProfile { p, n });
    }
    let mut base_cells = Vec::new();
    enumerate_z_cells(n, p + 1, &mut base_cells);
    let mut all = std::collections::BTreeSet::new();
    for c in &base_cells {
        for f in c.closure() {
            all.insert(f);
        }
    }
    let eps_level = crate::rat::rat(1, 2);
    let mut out = Vec::new();
    // apex: the p-skeleton of C^n
    let mut skel_cells = Vec::new();
    enumerate_skeleton_cells(n, p, &mut skel_cells);
    let apex_fiber = chart_complex(n, eps_level, skel_cells);
    out.push(SweepFiber {
        edge_count: edge_count(&apex_fiber),
        zero_count: n,
        cell: ConeCell::Apex,
        sample: None,
        fiber: apex_fiber,
    });
    for c in all {
        let z = generic_sample(&c);
        // base cell at level zero: the fiber degenerates to the point itself
        let mut grid = AxisGrid::standard(n, eps_level);
        for ax in 0..n {
            grid.refine(ax, &z);
        }
        let mut chart = Chart::new(grid);
        chart.insert_closed(CubicalCell::vertex(0, &z));
        out.push(SweepFiber {
            cell: ConeCell::Base(c.clone()),
            sample: Some((z.clone(), Rat::zero())),
            fiber: GluedComplex {
                charts: vec![chart],
                identifications: Vec::new(),
            },
            edge_count: 0,
            zero_count: z.iter().filter(|t| t.is_zero()).count(),
        });
        // open cone over the cell, sampled at a generic level
        let fiber = theta_fiber(p, eps_level, &z)?;
        out.push(SweepFiber {
            edge_count: edge_count(&fiber),
            zero_count: z.iter().filter(|t| t.is_zero()).count(),
            cell: ConeCell::Side(c),
            sample: Some((z, eps_level)),
            fiber,
        });
    }
    Ok(out)
}

/// Equivariance of the fiber construction under a signed axis permutation:
/// the fiber over the transformed point is the transformed fiber.
pub fn fiber_equivariant_under(
    p: usize,
    eps: Rat,
    z: &[Rat],
    perm: &[usize],
    signs: &[i8],
) -> Result<bool, DecompError> {
    let zt: Vec<Rat> = (0..z.len())
        .map(|i| {
            let v = z[perm[i]];
            if signs[i] < 0 {
                -v
            } else {
                v
            }
        })
        .collect();
    let f = theta_fiber(p, eps, z)?;
    let ft = theta_fiber(p, eps, &zt)?;
    let transformed: std::collections::BTreeSet<Vec<(Rat, Rat)>> = f.charts[0]
        .cells
        .iter()
        .map(|c| {
            (0..c.intervals.len())
                .map(|i| {
                    let (lo, hi) = c.intervals[perm[i]];
                    if signs[i] < 0 {
                        (-hi, -lo)
                    } else {
                        (lo, hi)
                    }
                })
                .collect()
        })
        .collect();
    let target: std::collections::BTreeSet<Vec<(Rat, Rat)>> = ft.charts[0]
        .cells
        .iter()
        .map(|c| c.intervals.clone())
        .collect();
    Ok(transformed == target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn profile_map_values() {
        let e = rat(1, 2);
        assert_eq!(lambda(e, rat(3, 4)), rat(1, 2));
        assert_eq!(lambda(e, rat(1, 4)), rat_int(0));
        assert_eq!(lambda(e, rat(-3, 4)), rat(-1, 2));
        assert_eq!(lambda(e, e), rat_int(0));
        assert_eq!(mu(e, rat(3, 4)), rat_int(1));
        assert_eq!(mu(e, rat(1, 4)), rat(1, 2));
        assert_eq!(mu(e, rat(-3, 4)), rat_int(-1));
        // lambda_inv inverts lambda on the outer bands
        for v in [rat(1, 3), rat(-2, 3), rat_int(1)] {
            assert_eq!(lambda(e, lambda_inv(e, v)), v);
        }
    }

    #[test]
    fn theta_example() {
        let x = [rat(1, 4), rat(1, 2), rat(3, 4)];
        let th = theta_on_y(2, 1, rat(1, 2), &x).unwrap();
        assert_eq!(th, vec![rat_int(0), rat_int(0), rat(1, 2)]);
    }

    #[test]
    fn decomposition_counts_n2_p1() {
        let ds = build_decomposition(2, 1, rat(1, 2)).unwrap();
        ds.check_coherence().unwrap();
        let s = ds.summary();
        // 27 band cells split by middle-band count (<=1 vs >=2)
        assert_eq!(s.x1_top_cells + s.x2_top_cells, 27);
        assert_eq!(s.x2_top_cells, 7); // 3 axes choose >=2 middles: 3*2 + 1
        // Z^1: three coordinate segments through 0, six unit cells
        assert_eq!(s.z_top_cells, 6);
    }

    #[test]
    fn y_is_a_pseudomanifold_n2() {
        let ds = build_decomposition(2, 1, rat(1, 2)).unwrap();
        let rep = ds.validate_y().unwrap();
        assert!(rep.pseudomanifold.is_pseudomanifold);
        assert!(rep.boundary_in_cube_boundary);
        assert_eq!(rep.pseudomanifold.dimension, 2);
    }

    #[test]
    fn fiber_over_edge_point_is_square_loop() {
        // z with two zeros: the fiber is the 1-skeleton of the 2-cube
        let z = [rat(1, 2), rat_int(0), rat_int(0)];
        let f = theta_fiber(1, rat(1, 2), &z).unwrap();
        assert!(fiber_is_cube_skeleton(&f, 2, 1));
        assert_eq!(edge_count(&f), 4);
    }

    #[test]
    fn fiber_over_center_is_cube_skeleton() {
        let z = [rat_int(0), rat_int(0), rat_int(0)];
        let f = theta_fiber(1, rat(1, 2), &z).unwrap();
        assert!(fiber_is_cube_skeleton(&f, 3, 1));
        assert_eq!(edge_count(&f), 12); // (n+1) * 2^n at the center, n = 2
    }

    #[test]
    fn big_theta_examples() {
        let v = big_theta(1, &[rat(1, 4), rat(1, 8)]).unwrap();
        assert_eq!(
            v,
            ConeValue::Point {
                z: vec![rat_int(0), rat_int(0)],
                level: rat(1, 4)
            }
        );
        assert_eq!(
            big_theta(1, &[rat_int(0), rat_int(0)]).unwrap(),
            ConeValue::Point {
                z: vec![rat_int(0), rat_int(0)],
                level: rat_int(0)
            }
        );
        assert_eq!(big_theta(1, &[rat_int(1), rat_int(1)]).unwrap(), ConeValue::Star);
    }

    #[test]
    fn inner_profile_boundary_degree_is_one() {
        let res = rho_bar_boundary_degree(3, rat(1, 2)).unwrap();
        assert_eq!(res.mod2, 1);
        assert_eq!(res.integer.map(i64::abs), Some(1));
        assert!(res.consistent);
        let fine = rho_bar_boundary_degree_refined(3, rat(1, 2)).unwrap();
        assert_eq!(fine.mod2, res.mod2);
        assert_eq!(fine.integer.map(i64::abs), res.integer.map(i64::abs));
    }

    #[test]
    fn sweepout_fibers_n3_p1() {
        // over C^3 the generic cone fibers are square loops; the apex fiber
        // is the 1-skeleton of C^3
        let fam = natural_sweepout(3, 1).unwrap();
        for f in &fam {
            match &f.cell {
                ConeCell::Apex => assert_eq!(f.edge_count, 12),
                ConeCell::Side(_) => {
                    assert!(fiber_is_cube_skeleton(&f.fiber, f.zero_count, 1));
                }
                ConeCell::Base(_) => assert_eq!(f.edge_count, 0),
            }
        }
    }

    #[test]
    fn fibers_are_equivariant() {
        let z = [rat(5, 11), rat_int(0), rat_int(0)];
        assert!(fiber_equivariant_under(1, rat(1, 2), &z, &[1, 0, 2], &[1, -1, 1]).unwrap());
        assert!(fiber_equivariant_under(1, rat(1, 2), &z, &[2, 1, 0], &[-1, 1, 1]).unwrap());
    }
}
