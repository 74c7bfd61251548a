//! The sweepout bundle of a filling P: a closed glued pseudomanifold N of
//! codimension one in P, a parameter complex T, and the cell-level sweep map
//! h between them, together with fiber extraction and length accounting.
//!
//! For each chart (one (n+1)-cube) of P the bundle takes the cells of the
//! standard decomposition at profile one:
//!
//! * N collects the Y top n-cells (one middle band, one coordinate pinned at
//!   +-eps, outer bands elsewhere) of every chart, plus — for every boundary
//!   facet of P — the facet n-cells carrying at least two middle bands.
//!   Glued along the identifications of P this is a closed pseudomanifold.
//! * T collects, per chart, the cells with exactly two zero coordinates and
//!   unit intervals elsewhere (the "core" pieces), plus one "band" chart per
//!   boundary facet: products of the facet's two-zero cells with a height
//!   interval [0, eps]. The band is glued to the core at height eps and to
//!   neighboring bands along ridges.
//!
//! The fiber over a generic point of a core cell with zero set S is the set
//! of edges {x_i in [-eps,eps], x_j = +-eps (j in S), x_k pinned} for i in S;
//! over a band point at height u the same picture at scale u, pinned into
//! the boundary facet. Each fiber edge is projected to an edge of the
//! 1-skeleton of P (free axis kept, every other coordinate sent to its
//! sign), and its length is the metric distance between the images of the
//! two endpoints. The waist of the sweep — the largest total fiber length —
//! is bounded by (n+1) 2^n times the longest skeleton edge.

use crate::decomp::{generic_sample, lambda_inv};
use crate::homology::pseudo::{check_pseudomanifold, orient_top, TopOrientation};
use crate::homology::{homologous_z2, ChainComplexData};
use crate::lattice::cell::CubicalCell;
use crate::lattice::complex::{
    orientation_between, AxisImage, Chart, FacetMap, GluedComplex, GlobalCells, Identification,
};
use crate::lattice::grid::AxisGrid;
use crate::rat::{rat, rat_int, Rat};
use crate::sweepout::input::{FillingInput, SweepError};
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// Construction switches for `build_bundle`.
#[derive(Clone, Debug, Default)]
pub struct BuildOptions {
    /// Refuse charts whose cube touches the boundary in more than one
    /// facet. Coarse fillings are accepted by default; strict mode forces
    /// the caller to subdivide first.
    pub require_subdivided: bool,
}

/// One chart of the parameter complex T.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TPiece {
    /// The two-zero cells of a chart of P, in that chart's coordinates.
    Core { chart: usize },
    /// The collar over one boundary facet of P. Chart axes are the facet
    /// axes in ascending order followed by the height axis; cells live in
    /// height range [0, eps].
    Band { chart: usize, axis: usize, side: i8 },
}

/// A sweepout bundle over a filling.
pub struct SweepoutBundle {
    /// Dimension of the swept manifold (P is (n+1)-dimensional).
    pub n: usize,
    pub eps: Rat,
    pub input: FillingInput,
    /// The closed pseudomanifold N, one chart per chart of P.
    pub n_complex: GluedComplex,
    pub n_global: GlobalCells,
    /// Coherent orientation of the top cells of N, when one exists.
    pub orientation: Option<TopOrientation>,
    /// The parameter complex T: core charts first (aligned with the charts
    /// of P), then one band chart per boundary facet.
    pub t_complex: GluedComplex,
    pub t_pieces: Vec<TPiece>,
    /// (chart, axis, side) of every unglued facet of P.
    pub boundary_facets: Vec<(usize, usize, i8)>,
    /// Sweep map on top cells: each top cell of N lies over these T cells.
    pub h_map: BTreeMap<CubicalCell, Vec<(usize, CubicalCell)>>,
    pub p_global: GlobalCells,
    /// Longest image length over the edges of the 1-skeleton of P.
    pub delta: Rat,
}

/// One edge of a fiber, with its skeleton image and image length.
#[derive(Clone, Debug)]
pub struct FiberEdge {
    /// Chart of P the edge lives in.
    pub chart: usize,
    /// The edge in chart coordinates (endpoints need not be grid points).
    pub cell: CubicalCell,
    pub free_axis: usize,
    /// Orientation sign inherited from the containing top cell of N.
    pub orientation: i64,
    /// Image edge in the 1-skeleton of P.
    pub image: CubicalCell,
    pub length: Rat,
}

/// The fiber over (a generic sample of) one cell of T.
#[derive(Clone, Debug)]
pub struct FiberRecord {
    pub t_chart: usize,
    pub t_cell: CubicalCell,
    pub sample: Vec<Rat>,
    pub edges: Vec<FiberEdge>,
    /// Connected components, as lists of edge indices.
    pub components: Vec<Vec<usize>>,
    /// Total image length of all edges.
    pub total: Rat,
    /// Largest total image length of a single component.
    pub max_component: Rat,
}

/// Result of scanning every cell of T for the longest fiber.
#[derive(Clone, Debug)]
pub struct WaistReport {
    pub delta: Rat,
    /// Largest total fiber length found.
    pub waist: Rat,
    /// The guaranteed ceiling (n+1) 2^n delta.
    pub bound: Rat,
    pub within_bound: bool,
    pub attained_chart: usize,
    pub attained_cell: CubicalCell,
    pub fibers_checked: usize,
    pub threads: usize,
}

/// Mod-2 certificate that N is homologous to the boundary of P.
#[derive(Clone, Debug, serde::Serialize)]
pub struct HomologyAudit {
    pub n_cells: usize,
    pub boundary_cells: usize,
    /// Both chains have empty mod-2 boundary in the ambient band complex.
    pub n_is_cycle: bool,
    pub boundary_is_cycle: bool,
    /// The boundary of the inner-region witness chain equals N + boundary
    /// of P exactly.
    pub boundary_matches: bool,
    pub homologous: bool,
    pub witness_cells: usize,
}

/// Number of worker threads: `SWEEPOUT_FORGE_THREADS` when set, otherwise
/// the machine's available parallelism.
pub fn thread_count() -> usize {
    std::env::var("SWEEPOUT_FORGE_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|p| p.get())
                .unwrap_or(1)
        })
}

fn full_cube_facet(chart: usize, d: usize, axis: usize, side: i8) -> CubicalCell {
    let one = rat_int(1);
    let mut intervals = vec![(-one, one); d];
    let v = if side > 0 { one } else { -one };
    intervals[axis] = (v, v);
    CubicalCell::new(chart, intervals)
}

/// Facet axes of a band chart, ascending, mapped to positions 0..n-1.
fn facet_axes(d: usize, axis: usize) -> Vec<usize> {
    (0..d).filter(|&k| k != axis).collect()
}

fn is_interior_facet(complex: &GluedComplex, chart: usize, axis: usize, side: i8) -> bool {
    let d = complex.charts[chart].dim();
    let facet = full_cube_facet(chart, d, axis, side);
    complex.identifications.iter().any(|id| {
        (id.chart_a == chart && id.facet_a == facet) || (id.chart_b == chart && id.facet_b == facet)
    })
}

/// Band-product top cells of one chart with middle count in `range`,
/// optionally pinned into a facet.
fn band_cells(
    chart: usize,
    d: usize,
    eps: Rat,
    pin: Option<(usize, i8)>,
    keep: impl Fn(usize) -> bool,
) -> Vec<CubicalCell> {
    let one = rat_int(1);
    let bands = [(-one, -eps), (-eps, eps), (eps, one)];
    let free: Vec<usize> = (0..d).filter(|&k| Some(k) != pin.map(|(a, _)| a)).collect();
    let mut out = Vec::new();
    let mut pattern = vec![0usize; free.len()];
    loop {
        let middles = pattern.iter().filter(|&&b| b == 1).count();
        if keep(middles) {
            let mut intervals = vec![(Rat::zero(), Rat::zero()); d];
            if let Some((a, s)) = pin {
                let v = if s > 0 { one } else { -one };
                intervals[a] = (v, v);
            }
            for (q, &k) in free.iter().enumerate() {
                intervals[k] = bands[pattern[q]];
            }
            out.push(CubicalCell::new(chart, intervals));
        }
        let mut i = 0;
        while i < pattern.len() {
            pattern[i] += 1;
            if pattern[i] < 3 {
                break;
            }
            pattern[i] = 0;
            i += 1;
        }
        if i == pattern.len() {
            break;
        }
    }
    out
}

/// Y top cells of one chart at profile one: one middle band, one coordinate
/// pinned at +-eps, outer bands elsewhere.
fn y_cells(chart: usize, d: usize, eps: Rat) -> Vec<CubicalCell> {
    let one = rat_int(1);
    let outer = [(-one, -eps), (eps, one)];
    let mut out = Vec::new();
    for middle in 0..d {
        for pin in (0..d).filter(|&j| j != middle) {
            let rest: Vec<usize> = (0..d).filter(|&k| k != middle && k != pin).collect();
            for signs in 0u32..(1 << (rest.len() + 1)) {
                let mut intervals = vec![(Rat::zero(), Rat::zero()); d];
                intervals[middle] = (-eps, eps);
                let pv = if signs & 1 == 1 { eps } else { -eps };
                intervals[pin] = (pv, pv);
                for (q, &k) in rest.iter().enumerate() {
                    intervals[k] = outer[(signs >> (q + 1) & 1) as usize];
                }
                out.push(CubicalCell::new(chart, intervals));
            }
        }
    }
    out
}

/// Two-zero cells of one chart: |S| = 2 zero coordinates, signed unit
/// intervals elsewhere. With `dims` axes drawn from `axes`.
fn two_zero_cells(chart: usize, d: usize) -> Vec<CubicalCell> {
    let one = rat_int(1);
    let units = [(-one, Rat::zero()), (Rat::zero(), one)];
    let mut out = Vec::new();
    for i in 0..d {
        for j in (i + 1)..d {
            let rest: Vec<usize> = (0..d).filter(|&k| k != i && k != j).collect();
            for signs in 0u32..(1 << rest.len()) {
                let mut intervals = vec![(Rat::zero(), Rat::zero()); d];
                for (q, &k) in rest.iter().enumerate() {
                    intervals[k] = units[(signs >> q & 1) as usize];
                }
                out.push(CubicalCell::new(chart, intervals));
            }
        }
    }
    out
}

pub fn build_bundle(
    input: &FillingInput,
    options: &BuildOptions,
) -> Result<SweepoutBundle, SweepError> {
    input.validate()?;
    let d = input.complex.top_dim();
    let n = d - 1;
    if n < 2 {
        return Err(SweepError::Invalid(format!(
            "sweepouts at profile one need a filling of dimension >= 3 (got {d})"
        )));
    }
    let eps = rat(1, 2);
    let one = rat_int(1);

    let p_report = check_pseudomanifold(&input.complex)?;
    if !p_report.is_pseudomanifold {
        return Err(SweepError::NotPseudomanifold(
            p_report.failures.join("; "),
        ));
    }

    // boundary facets
    let mut boundary_facets = Vec::new();
    for c in 0..input.complex.charts.len() {
        let mut count = 0usize;
        for axis in 0..d {
            for side in [-1i8, 1] {
                if !is_interior_facet(&input.complex, c, axis, side) {
                    boundary_facets.push((c, axis, side));
                    count += 1;
                }
            }
        }
        if options.require_subdivided && count > 1 {
            return Err(SweepError::SubdivisionRequired { chart: c, faces: count });
        }
    }
    if boundary_facets.is_empty() {
        return Err(SweepError::Invalid(
            "the filling is closed; a sweepout needs a nonempty boundary".into(),
        ));
    }

    // ---- N ----
    let nc = input.complex.charts.len();
    let mut n_charts = Vec::with_capacity(nc);
    for c in 0..nc {
        let mut chart = Chart::new(AxisGrid::standard(d, eps));
        for cell in y_cells(c, d, eps) {
            chart.insert_closed(cell);
        }
        n_charts.push(chart);
    }
    for &(c, axis, side) in &boundary_facets {
        for cell in band_cells(c, d, eps, Some((axis, side)), |m| m >= 2) {
            n_charts[c].insert_closed(cell);
        }
    }
    let n_complex = GluedComplex {
        charts: n_charts,
        identifications: input.complex.identifications.clone(),
    };
    n_complex.validate()?;
    let n_global = n_complex.global()?;
    let n_report = check_pseudomanifold(&n_complex)?;
    if !(n_report.is_pseudomanifold && n_report.closed) {
        return Err(SweepError::NotPseudomanifold(format!(
            "swept hypersurface is not a closed pseudomanifold: {}",
            n_report.failures.join("; ")
        )));
    }
    let orientation = orient_top(&n_global);

    // ---- T ----
    let mut t_charts = Vec::new();
    let mut t_pieces = Vec::new();
    for c in 0..nc {
        let mut chart = Chart::new(AxisGrid::standard(d, eps));
        for cell in two_zero_cells(c, d) {
            chart.insert_closed(cell);
        }
        t_charts.push(chart);
        t_pieces.push(TPiece::Core { chart: c });
    }
    let mut band_index: BTreeMap<(usize, usize, i8), usize> = BTreeMap::new();
    for &(c, axis, side) in &boundary_facets {
        let tc = t_charts.len();
        band_index.insert((c, axis, side), tc);
        let mut chart = Chart::new(AxisGrid::standard(d, eps));
        // facet-axis zero pairs times the height interval [0, eps]
        for base in two_zero_cells(tc, n) {
            let mut intervals = base.intervals;
            intervals.push((Rat::zero(), eps));
            chart.insert_closed(CubicalCell::new(tc, intervals));
        }
        t_charts.push(chart);
        t_pieces.push(TPiece::Band { chart: c, axis, side });
    }

    // core charts inherit the gluing of P
    let mut t_ids: Vec<Identification> = input.complex.identifications.clone();

    // band -> core at height eps
    for (&(c, axis, side), &tc) in &band_index {
        let axes = facet_axes(d, axis);
        let mut facet_a = vec![(-one, one); d];
        facet_a[n] = (eps, eps);
        let mut out = vec![AxisImage::Fixed(Rat::zero()); d];
        out[axis] = AxisImage::Fixed(if side > 0 { one } else { -one });
        for (q, &k) in axes.iter().enumerate() {
            out[k] = AxisImage::Axis { from: q, sign: 1 };
        }
        let map = FacetMap { out };
        let facet_a = CubicalCell::new(tc, facet_a);
        let facet_b = map.apply_cell(c, &facet_a);
        t_ids.push(Identification {
            chart_a: tc,
            facet_a,
            chart_b: c,
            facet_b,
            map,
        });
    }

    // band <-> band along ridges inside one chart
    for (&(c, a, s), &ta) in &band_index {
        for (&(c2, b, sb), &tb) in &band_index {
            if c2 != c || tb <= ta || b == a {
                continue;
            }
            let axes_a = facet_axes(d, a);
            let axes_b = facet_axes(d, b);
            let pos_a = |k: usize| axes_a.iter().position(|&x| x == k).unwrap();
            let pos_b = |k: usize| axes_b.iter().position(|&x| x == k).unwrap();
            let sv = |side: i8| if side > 0 { one } else { -one };
            // subfacet of band ta where the b coordinate sits on side sb
            let mut fa = vec![(-one, one); d];
            fa[n] = (Rat::zero(), eps);
            fa[pos_a(b)] = (sv(sb), sv(sb));
            let mut out = vec![AxisImage::Fixed(Rat::zero()); d];
            out[n] = AxisImage::Axis { from: n, sign: 1 };
            for &k in &axes_b {
                if k == a {
                    out[pos_b(a)] = AxisImage::Fixed(sv(s));
                } else {
                    out[pos_b(k)] = AxisImage::Axis { from: pos_a(k), sign: 1 };
                }
            }
            let map = FacetMap { out };
            let facet_a = CubicalCell::new(ta, fa);
            let facet_b = map.apply_cell(tb, &facet_a);
            t_ids.push(Identification {
                chart_a: ta,
                facet_a,
                chart_b: tb,
                facet_b,
                map,
            });
        }
    }

    // band <-> band along ridges through an interior facet of P
    for id in &input.complex.identifications {
        // the pinned (image) axis of the target chart
        let fixed_axis = id.map.out.iter().position(|img| {
            matches!(img, AxisImage::Fixed(v) if v.abs() == one)
        });
        let Some(_a2) = fixed_axis else { continue };
        for (&(c, b, sb), &ta) in &band_index {
            if c != id.chart_a || !id.map.used_axes().contains(&b) {
                continue;
            }
            let a = (0..d)
                .find(|&k| id.facet_a.intervals[k].0 == id.facet_a.intervals[k].1)
                .expect("facet pins one axis");
            if b == a {
                continue;
            }
            // image of the boundary facet across the identification
            let (b2, sgn_b) = id
                .map
                .out
                .iter()
                .enumerate()
                .find_map(|(m, img)| match img {
                    AxisImage::Axis { from, sign } if *from == b => Some((m, *sign)),
                    _ => None,
                })
                .expect("used axis has an image");
            let sb2 = if sgn_b < 0 { -sb } else { sb };
            let Some(&tb) = band_index.get(&(id.chart_b, b2, sb2)) else {
                continue;
            };
            let axes_a = facet_axes(d, b);
            let axes_b = facet_axes(d, b2);
            let pos_a = |k: usize| axes_a.iter().position(|&x| x == k).unwrap();
            let pos_b = |k: usize| axes_b.iter().position(|&x| x == k).unwrap();
            let sv = |side: i8| if side > 0 { one } else { -one };
            // subfacet of band ta over the ridge with the interior facet
            let s_i = id.facet_a.intervals[a].0;
            let mut fa = vec![(-one, one); d];
            fa[n] = (Rat::zero(), eps);
            fa[pos_a(a)] = (s_i, s_i);
            let mut out = vec![AxisImage::Fixed(Rat::zero()); d];
            out[n] = AxisImage::Axis { from: n, sign: 1 };
            for (m, img) in id.map.out.iter().enumerate() {
                if m == b2 {
                    continue;
                }
                match img {
                    AxisImage::Fixed(v) => out[pos_b(m)] = AxisImage::Fixed(*v),
                    AxisImage::Axis { from, sign } => {
                        out[pos_b(m)] = AxisImage::Axis { from: pos_a(*from), sign: *sign };
                    }
                }
            }
            let map = FacetMap { out };
            let facet_a = CubicalCell::new(ta, fa);
            let facet_b = map.apply_cell(tb, &facet_a);
            t_ids.push(Identification {
                chart_a: ta,
                facet_a,
                chart_b: tb,
                facet_b,
                map,
            });
            let _ = sv; // sides already folded into s_i
        }
    }

    let t_complex = GluedComplex {
        charts: t_charts,
        identifications: t_ids,
    };
    t_complex.validate()?;

    // ---- h ----
    let mut h_map: BTreeMap<CubicalCell, Vec<(usize, CubicalCell)>> = BTreeMap::new();
    for c in 0..nc {
        for cell in y_cells(c, d, eps) {
            let mut intervals = vec![(Rat::zero(), Rat::zero()); d];
            let mut zeros = Vec::new();
            for (k, &(lo, hi)) in cell.intervals.iter().enumerate() {
                if lo == -eps && hi == eps {
                    zeros.push(k); // middle band
                } else if lo == hi {
                    zeros.push(k); // pin at +-eps
                } else if lo == eps {
                    intervals[k] = (Rat::zero(), one);
                } else {
                    intervals[k] = (-one, Rat::zero());
                }
            }
            let _ = zeros;
            h_map.insert(cell.clone(), vec![(c, CubicalCell::new(c, intervals))]);
        }
    }
    for &(c, axis, side) in &boundary_facets {
        let tc = band_index[&(c, axis, side)];
        let axes = facet_axes(d, axis);
        for cell in band_cells(c, d, eps, Some((axis, side)), |m| m >= 2) {
            let mut middles = Vec::new();
            let mut outer_sign: BTreeMap<usize, bool> = BTreeMap::new();
            for &k in &axes {
                let (lo, hi) = cell.intervals[k];
                if lo == -eps && hi == eps {
                    middles.push(k);
                } else {
                    outer_sign.insert(k, lo == eps);
                }
            }
            let mut targets = Vec::new();
            for i in 0..middles.len() {
                for j in (i + 1)..middles.len() {
                    let rest: Vec<usize> = middles
                        .iter()
                        .copied()
                        .filter(|&k| k != middles[i] && k != middles[j])
                        .collect();
                    for signs in 0u32..(1 << rest.len()) {
                        let mut intervals = vec![(Rat::zero(), Rat::zero()); d];
                        intervals[n] = (Rat::zero(), eps);
                        for (q, &k) in axes.iter().enumerate() {
                            if k == middles[i] || k == middles[j] {
                                intervals[q] = (Rat::zero(), Rat::zero());
                            } else if let Some(&pos) = outer_sign.get(&k) {
                                intervals[q] = if pos { (Rat::zero(), one) } else { (-one, Rat::zero()) };
                            } else {
                                let r = rest.iter().position(|&x| x == k).unwrap();
                                intervals[q] = if signs >> r & 1 == 1 {
                                    (Rat::zero(), one)
                                } else {
                                    (-one, Rat::zero())
                                };
                            }
                        }
                        targets.push((tc, CubicalCell::new(tc, intervals)));
                    }
                }
            }
            h_map.insert(cell, targets);
        }
    }

    // ---- skeleton edge lengths ----
    let p_global = input.complex.global()?;
    let mut delta = Rat::zero();
    for e in p_global.cells.get(1).map(|v| v.as_slice()).unwrap_or(&[]) {
        let vs = e.rep.vertices();
        let a = p_global
            .vertex_class(e.rep.chart, &vs[0].point())
            .ok_or_else(|| SweepError::Invalid("edge endpoint missing from vertex table".into()))?;
        let b = p_global
            .vertex_class(e.rep.chart, &vs[1].point())
            .ok_or_else(|| SweepError::Invalid("edge endpoint missing from vertex table".into()))?;
        let len = input.metric.dist[input.vertex_images[&a]][input.vertex_images[&b]];
        if len > delta {
            delta = len;
        }
    }

    Ok(SweepoutBundle {
        n,
        eps,
        input: input.clone(),
        n_complex,
        n_global,
        orientation,
        t_complex,
        t_pieces,
        boundary_facets,
        h_map,
        p_global,
        delta,
    })
}

impl SweepoutBundle {
    /// Orientation sign a chart top cell of N inherits from the coherent
    /// global orientation (1 when N is non-orientable).
    pub fn top_cell_sign(&self, cell: &CubicalCell) -> i64 {
        let Some(orient) = &self.orientation else { return 1 };
        let Some((dim, idx)) = self.n_global.locate(cell) else { return 1 };
        if dim != orient.dim {
            return 1;
        }
        let rel = orientation_between(cell, &self.n_global.cells[dim][idx].rep, &self.n_global)
            .unwrap_or(1);
        orient.signs[idx] * rel
    }

    /// Metric length of the skeleton edge `image` (free axis + corner).
    pub fn image_length(&self, image: &CubicalCell) -> Result<Rat, SweepError> {
        let vs = image.vertices();
        let a = self
            .p_global
            .vertex_class(image.chart, &vs[0].point())
            .ok_or_else(|| SweepError::Invalid("image edge endpoint is not a vertex of P".into()))?;
        let b = self
            .p_global
            .vertex_class(image.chart, &vs[1].point())
            .ok_or_else(|| SweepError::Invalid("image edge endpoint is not a vertex of P".into()))?;
        Ok(self.input.metric.dist[self.input.vertex_images[&a]][self.input.vertex_images[&b]])
    }

    /// Metric diameter of the image of a fiber (max distance between
    /// endpoint images of its edges).
    pub fn fiber_image_diameter(&self, rec: &FiberRecord) -> Rat {
        let mut points = std::collections::BTreeSet::new();
        for e in &rec.edges {
            for v in e.image.vertices() {
                if let Some(c) = self.p_global.vertex_class(e.image.chart, &v.point()) {
                    points.insert(self.input.vertex_images[&c]);
                }
            }
        }
        let mut diam = Rat::zero();
        for &a in &points {
            for &b in &points {
                diam = diam.max(self.input.metric.dist[a][b]);
            }
        }
        diam
    }

    /// Every cell of T paired with its chart, in deterministic order.
    pub fn t_cells(&self) -> Vec<(usize, CubicalCell)> {
        let mut out = Vec::new();
        for (tc, chart) in self.t_complex.charts.iter().enumerate() {
            for cell in &chart.cells {
                out.push((tc, cell.clone()));
            }
        }
        out
    }
}

/// Fiber edges over an explicit point of a core chart of T, in P-chart
/// coordinates: one edge per zero axis and sign pattern on the remaining
/// zeros, scaled by `scale`, with `pin` (a boundary facet) optionally added.
fn point_fiber_edges(
    chart: usize,
    z: &[Rat],
    zero_axes: &[usize],
    scale: Rat,
    eps: Rat,
    pin: Option<(usize, i8)>,
) -> BTreeSet<CubicalCell> {
    let one = rat_int(1);
    let d = z.len() + pin.map_or(0, |_| 1);
    let axes: Vec<usize> = match pin {
        None => (0..d).collect(),
        Some((a, _)) => (0..d).filter(|&k| k != a).collect(),
    };
    let mut out = BTreeSet::new();
    if scale.is_zero() {
        return out;
    }
    for (fi, &free) in zero_axes.iter().enumerate() {
        let others: Vec<usize> = zero_axes
            .iter()
            .copied()
            .filter(|&q| q != free)
            .collect();
        for signs in 0u32..(1 << others.len()) {
            let mut intervals = vec![(Rat::zero(), Rat::zero()); d];
            if let Some((a, s)) = pin {
                let v = if s > 0 { one } else { -one };
                intervals[a] = (v, v);
            }
            for (q, &k) in axes.iter().enumerate() {
                if q == free {
                    intervals[k] = (-scale, scale);
                } else if let Some(r) = others.iter().position(|&x| x == q) {
                    let v = if signs >> r & 1 == 1 { scale } else { -scale };
                    intervals[k] = (v, v);
                } else {
                    let v = lambda_inv(eps, z[q]);
                    intervals[k] = (v, v);
                }
            }
            out.insert(CubicalCell::new(chart, intervals));
        }
        let _ = fi;
    }
    out
}

/// The fiber of the sweep over a generic interior sample of one cell of T.
pub fn fiber(
    bundle: &SweepoutBundle,
    t_chart: usize,
    t_cell: &CubicalCell,
) -> Result<FiberRecord, SweepError> {
    let piece = bundle
        .t_pieces
        .get(t_chart)
        .ok_or_else(|| SweepError::Invalid(format!("T has no chart {t_chart}")))?;
    let sample = generic_sample(t_cell);
    let eps = bundle.eps;
    let d = bundle.n + 1;

    let edge_cells: BTreeSet<CubicalCell> = match piece {
        TPiece::Core { chart } => {
            let z = &sample;
            let zeros: Vec<usize> = (0..d).filter(|&k| z[k].is_zero()).collect();
            if zeros.len() < 2 {
                return Err(SweepError::Domain(format!(
                    "core sample has {} zero coordinates; the sweep needs at least two",
                    zeros.len()
                )));
            }
            point_fiber_edges(*chart, z, &zeros, eps, eps, None)
        }
        TPiece::Band { chart, axis, side } => {
            let n = bundle.n;
            let u = sample[n];
            let y = &sample[..n];
            if u == eps {
                // the collar top coincides with a core point
                let axes = facet_axes(d, *axis);
                let mut z = vec![Rat::zero(); d];
                z[*axis] = if *side > 0 { rat_int(1) } else { rat_int(-1) };
                for (q, &k) in axes.iter().enumerate() {
                    z[k] = y[q];
                }
                let zeros: Vec<usize> = (0..d).filter(|&k| z[k].is_zero()).collect();
                point_fiber_edges(*chart, &z, &zeros, eps, eps, None)
            } else if u.is_zero() {
                BTreeSet::new()
            } else {
                let zeros: Vec<usize> = (0..n).filter(|&q| y[q].is_zero()).collect();
                if zeros.len() < 2 {
                    return Err(SweepError::Domain(format!(
                        "collar sample has {} zero coordinates; the sweep needs at least two",
                        zeros.len()
                    )));
                }
                point_fiber_edges(*chart, y, &zeros, u, u, Some((*axis, *side)))
            }
        }
    };

    // decorate, measure, and group the edges
    let mut edges = Vec::new();
    for cell in edge_cells {
        let free_axis = cell.free_axes()[0];
        let image_intervals: Vec<(Rat, Rat)> = cell
            .intervals
            .iter()
            .enumerate()
            .map(|(k, &(lo, _))| {
                if k == free_axis {
                    (rat_int(-1), rat_int(1))
                } else {
                    let v = if lo > Rat::zero() { rat_int(1) } else { rat_int(-1) };
                    (v, v)
                }
            })
            .collect();
        let image = CubicalCell::new(cell.chart, image_intervals);
        let length = bundle.image_length(&image)?;
        let host = bundle.n_complex.charts[cell.chart]
            .cells
            .iter()
            .find(|c| c.dim() == bundle.n && c.contains_cell(&cell));
        let orientation = host.map_or(1, |c| bundle.top_cell_sign(c));
        edges.push(FiberEdge {
            chart: cell.chart,
            cell,
            free_axis,
            orientation,
            image,
            length,
        });
    }

    // connected components by shared endpoints
    let mut node_of: BTreeMap<Vec<Rat>, usize> = BTreeMap::new();
    let mut ends = Vec::new();
    for e in &edges {
        let mut pair = Vec::new();
        for v in e.cell.vertices() {
            let p = v.point();
            let next = node_of.len();
            pair.push(*node_of.entry(p).or_insert(next));
        }
        ends.push((pair[0], pair[1]));
    }
    let mut parent: Vec<usize> = (0..node_of.len()).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(a, b) in &ends {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let mut comp_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let mut components: Vec<Vec<usize>> = Vec::new();
    for (ei, &(a, _)) in ends.iter().enumerate() {
        let root = find(&mut parent, a);
        let next = components.len();
        let ci = *comp_of_root.entry(root).or_insert(next);
        if ci == components.len() {
            components.push(Vec::new());
        }
        components[ci].push(ei);
    }

    let total: Rat = edges.iter().map(|e| e.length).sum();
    let max_component = components
        .iter()
        .map(|comp| comp.iter().map(|&ei| edges[ei].length).sum())
        .max()
        .unwrap_or_else(Rat::zero);

    Ok(FiberRecord {
        t_chart,
        t_cell: t_cell.clone(),
        sample,
        edges,
        components,
        total,
        max_component,
    })
}

/// Max total fiber length over every cell of T, with the guaranteed bound
/// (n+1) 2^n delta. Scanning is parallel over T cells.
pub fn waist_upper_bound(bundle: &SweepoutBundle) -> Result<WaistReport, SweepError> {
    let mut tasks: Vec<(usize, CubicalCell)> = Vec::new();
    for (tc, chart) in bundle.t_complex.charts.iter().enumerate() {
        for cell in &chart.cells {
            tasks.push((tc, cell.clone()));
        }
    }
    let threads = thread_count().min(tasks.len()).max(1);
    let chunk = tasks.len().div_ceil(threads);
    let results: Vec<Result<Option<(Rat, usize, CubicalCell)>, SweepError>> =
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for slice in tasks.chunks(chunk) {
                handles.push(scope.spawn(move || {
                    let mut best: Option<(Rat, usize, CubicalCell)> = None;
                    for (tc, cell) in slice {
                        let rec = fiber(bundle, *tc, cell)?;
                        if best.as_ref().map_or(true, |(b, _, _)| rec.total > *b) {
                            best = Some((rec.total, *tc, cell.clone()));
                        }
                    }
                    Ok(best)
                }));
            }
            handles.into_iter().map(|h| h.join().expect("worker")).collect()
        });
    let mut best: Option<(Rat, usize, CubicalCell)> = None;
    for r in results {
        if let Some((w, tc, cell)) = r? {
            if best.as_ref().map_or(true, |(b, _, _)| w > *b) {
                best = Some((w, tc, cell));
            }
        }
    }
    let (waist, attained_chart, attained_cell) =
        best.ok_or_else(|| SweepError::Invalid("T has no cells".into()))?;
    let bound = rat_int((bundle.n as i64 + 1) << bundle.n) * bundle.delta;
    Ok(WaistReport {
        delta: bundle.delta,
        within_bound: waist <= bound,
        waist,
        bound,
        attained_chart,
        attained_cell,
        fibers_checked: tasks.len(),
        threads,
    })
}

/// Verify, mod 2 in the ambient band complex of P, that N is the boundary
/// of the inner-region chain plus the boundary of P — hence homologous to
/// the boundary of P.
pub fn homology_audit(bundle: &SweepoutBundle) -> Result<HomologyAudit, SweepError> {
    let d = bundle.n + 1;
    let eps = bundle.eps;
    let nc = bundle.input.complex.charts.len();

    // ambient: every band product cell of every chart, glued like P
    let mut charts = Vec::with_capacity(nc);
    for c in 0..nc {
        let mut chart = Chart::new(AxisGrid::standard(d, eps));
        for cell in band_cells(c, d, eps, None, |_| true) {
            chart.insert_closed(cell);
        }
        charts.push(chart);
    }
    let ambient = GluedComplex {
        charts,
        identifications: bundle.input.complex.identifications.clone(),
    };
    let g = ambient.global()?;
    let data = ChainComplexData::from_glued(&ambient)?;

    let xor = |set: &mut BTreeSet<usize>, idx: usize| {
        if !set.remove(&idx) {
            set.insert(idx);
        }
    };

    // inner-region witness: top cells with at most one middle band
    let mut witness: BTreeSet<usize> = BTreeSet::new();
    for c in 0..nc {
        for cell in band_cells(c, d, eps, None, |m| m <= 1) {
            let (dim, idx) = g
                .locate(&cell)
                .ok_or_else(|| SweepError::Invalid("ambient complex is missing a band cell".into()))?;
            debug_assert_eq!(dim, d);
            xor(&mut witness, idx);
        }
    }

    // N as an n-chain in the ambient complex
    let mut n_chain: BTreeSet<usize> = BTreeSet::new();
    for chart in &bundle.n_complex.charts {
        for cell in chart.cells.iter().filter(|c| c.dim() == bundle.n) {
            let (dim, idx) = g
                .locate(cell)
                .ok_or_else(|| SweepError::Invalid("N cell missing from the ambient complex".into()))?;
            debug_assert_eq!(dim, bundle.n);
            xor(&mut n_chain, idx);
        }
    }

    // the boundary of P: every facet band cell of every unglued facet
    let mut p_chain: BTreeSet<usize> = BTreeSet::new();
    for &(c, axis, side) in &bundle.boundary_facets {
        for cell in band_cells(c, d, eps, Some((axis, side)), |_| true) {
            let (dim, idx) = g
                .locate(&cell)
                .ok_or_else(|| SweepError::Invalid("facet cell missing from the ambient complex".into()))?;
            debug_assert_eq!(dim, bundle.n);
            xor(&mut p_chain, idx);
        }
    }

    let witness_vec: Vec<usize> = witness.iter().copied().collect();
    let n_vec: Vec<usize> = n_chain.iter().copied().collect();
    let p_vec: Vec<usize> = p_chain.iter().copied().collect();

    let dw = data.boundary_z2(d, &witness_vec);
    let target: Vec<usize> = n_chain.symmetric_difference(&p_chain).copied().collect();
    let boundary_matches = dw == target;

    let n_is_cycle = data.boundary_z2(bundle.n, &n_vec).is_empty();
    let boundary_is_cycle = data.boundary_z2(bundle.n, &p_vec).is_empty();
    if !n_is_cycle || !boundary_is_cycle {
        return Err(SweepError::NotPseudomanifold(
            "audit chains are not cycles; the filling or its sweep is broken".into(),
        ));
    }
    let homologous = homologous_z2(&data, bundle.n, &n_vec, &p_vec)
        .map_err(|e| SweepError::Invalid(e.to_string()))?;

    Ok(HomologyAudit {
        n_cells: n_vec.len(),
        boundary_cells: p_vec.len(),
        n_is_cycle,
        boundary_is_cycle,
        boundary_matches,
        homologous: homologous.is_some(),
        witness_cells: witness_vec.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweepout::input::{two_cube_filling, unit_cube_filling};

    fn top_count(gc: &GluedComplex, dim: usize) -> usize {
        gc.charts
            .iter()
            .flat_map(|ch| ch.cells.iter())
            .filter(|c| c.dim() == dim)
            .count()
    }

    #[test]
    fn single_cube_bundle_counts() {
        let input = unit_cube_filling(2);
        let bundle = build_bundle(&input, &BuildOptions::default()).unwrap();
        assert_eq!(top_count(&bundle.n_complex, 2), 30);
        assert_eq!(bundle.boundary_facets.len(), 6);
        assert!(bundle.orientation.is_some());
        // T: 6 core star edges plus one collar edge per facet
        assert_eq!(top_count(&bundle.t_complex, 1), 12);
        assert_eq!(bundle.delta, rat_int(1));
    }

    #[test]
    fn four_dim_bundle_counts() {
        let input = unit_cube_filling(3);
        let bundle = build_bundle(&input, &BuildOptions::default()).unwrap();
        assert_eq!(top_count(&bundle.n_complex, 3), 152);
        assert_eq!(top_count(&bundle.t_complex, 2), 24 + 48);
        let report = check_pseudomanifold(&bundle.n_complex).unwrap();
        assert!(report.is_pseudomanifold && report.closed);
    }

    #[test]
    fn two_chart_bundle_closes_up() {
        let input = two_cube_filling(2);
        let bundle = build_bundle(&input, &BuildOptions::default()).unwrap();
        assert_eq!(top_count(&bundle.n_complex, 2), 2 * 24 + 10);
        let report = check_pseudomanifold(&bundle.n_complex).unwrap();
        assert!(report.is_pseudomanifold && report.closed, "{:?}", report.failures);
        assert!(bundle.orientation.is_some());
    }

    #[test]
    fn strict_mode_rejects_coarse_charts() {
        let input = unit_cube_filling(2);
        let err = match build_bundle(
            &input,
            &BuildOptions {
                require_subdivided: true,
            },
        ) {
            Err(e) => e,
            Ok(_) => panic!("strict mode accepted a coarse chart"),
        };
        assert!(matches!(
            err,
            SweepError::SubdivisionRequired { chart: 0, faces: 6 }
        ));
    }

    #[test]
    fn center_fiber_is_cube_skeleton() {
        let input = unit_cube_filling(2);
        let bundle = build_bundle(&input, &BuildOptions::default()).unwrap();
        let center = CubicalCell::vertex(0, &[Rat::zero(); 3]);
        let rec = fiber(&bundle, 0, &center).unwrap();
        assert_eq!(rec.edges.len(), 12);
        assert_eq!(rec.total, rat_int(12));
        assert_eq!(rec.components.len(), 1);
        // generic core edge fibers are 4-edge loops
        let z = CubicalCell::new(
            0,
            vec![
                (Rat::zero(), Rat::zero()),
                (Rat::zero(), Rat::zero()),
                (Rat::zero(), rat_int(1)),
            ],
        );
        let rec = fiber(&bundle, 0, &z).unwrap();
        assert_eq!(rec.edges.len(), 4);
        assert_eq!(rec.components.len(), 1);
    }

    #[test]
    fn waist_meets_bound_on_unit_cube() {
        let input = unit_cube_filling(2);
        let bundle = build_bundle(&input, &BuildOptions::default()).unwrap();
        let report = waist_upper_bound(&bundle).unwrap();
        assert_eq!(report.waist, rat_int(12));
        assert_eq!(report.bound, rat_int(12));
        assert!(report.within_bound);
    }

    #[test]
    fn audit_certifies_n_homologous_to_boundary() {
        for input in [unit_cube_filling(2), two_cube_filling(2)] {
            let bundle = build_bundle(&input, &BuildOptions::default()).unwrap();
            let audit = homology_audit(&bundle).unwrap();
            assert!(audit.boundary_matches);
            assert!(audit.homologous);
        }
    }

    #[test]
    fn audit_detects_a_broken_sweep() {
        let input = unit_cube_filling(2);
        let mut bundle = build_bundle(&input, &BuildOptions::default()).unwrap();
        // drop one top cell of N: the chain is no longer a cycle
        let victim = bundle.n_complex.charts[0]
            .cells
            .iter()
            .find(|c| c.dim() == 2)
            .cloned()
            .unwrap();
        bundle.n_complex.charts[0].cells.remove(&victim);
        assert!(matches!(
            homology_audit(&bundle),
            Err(SweepError::NotPseudomanifold(_))
        ));
    }
}
