//! Loops of the composed sweep over the ordered simplex.
//!
//! T carries a projection to the simplex Delta = {0 <= t_1 <= ... <=
//! t_{n-1} <= 1}: sort the absolute values of the embedded chart
//! coordinates and drop the two forced zeros (collar points embed with
//! twice the height standing in for the pinned facet axis). Over a generic
//! interior point of Delta the composed fiber is a finite family of
//! disjoint square loops, one per signed placement of the simplex values
//! into a chart; each loop carries orientation signs chosen so that its
//! signed boundary vanishes.
//!
//! Walking such a point into the boundary of Delta, the loops converge
//! pairwise (or in larger orbit groups) to limit loops whose signed sum is
//! the zero 1-chain; `boundary_pairing` certifies this exactly by
//! extrapolating the loop coordinates (quadratic polynomials in the
//! approach parameter) to the boundary and cancelling canonical edges.
//! `collar_extend` shrinks the edges of such a limit fiber toward their
//! endpoints, interpolating between the fiber and its vertex set.

use crate::decomp::lambda_inv;
use crate::lattice::cell::CubicalCell;
use crate::lattice::complex::{AxisImage, FacetMap, GluedComplex, Identification};
use crate::rat::{rat, rat_int, Rat};
use crate::sweepout::bundle::{FiberEdge, FiberRecord, SweepoutBundle, TPiece};
use crate::sweepout::input::SweepError;
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// The simplex image of one point of T.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexQuotient {
    pub t_chart: usize,
    /// The point, in chart coordinates.
    pub point: Vec<Rat>,
    /// Its embedded coordinates in the ambient cube of the chart of P.
    pub embedded: Vec<Rat>,
    /// The simplex coordinates (ascending, length n-1).
    pub delta: Vec<Rat>,
}

/// Projection of a point of T onto the ordered simplex.
pub fn simplex_quotient(
    bundle: &SweepoutBundle,
    t_chart: usize,
    point: &[Rat],
) -> Result<SimplexQuotient, SweepError> {
    let piece = bundle
        .t_pieces
        .get(t_chart)
        .ok_or_else(|| SweepError::Invalid(format!("T has no chart {t_chart}")))?;
    let chart = &bundle.t_complex.charts[t_chart];
    if !chart.cells.iter().any(|c| c.contains_point(point)) {
        return Err(SweepError::Domain(
            "the point lies in no cell of T".into(),
        ));
    }
    let d = bundle.n + 1;
    let embedded: Vec<Rat> = match piece {
        TPiece::Core { .. } => point.to_vec(),
        TPiece::Band { axis, .. } => {
            let mut out = vec![Rat::zero(); d];
            out[*axis] = rat(2, 1) * point[bundle.n];
            for (q, k) in (0..d).filter(|&k| k != *axis).enumerate() {
                out[k] = point[q];
            }
            out
        }
    };
    let mut abs: Vec<Rat> = embedded.iter().map(|v| v.abs()).collect();
    abs.sort();
    if !(abs[0].is_zero() && abs[1].is_zero()) {
        return Err(SweepError::Domain(
            "the point lacks the two forced zero coordinates of T".into(),
        ));
    }
    Ok(SimplexQuotient {
        t_chart,
        point: point.to_vec(),
        embedded,
        delta: abs.split_off(2),
    })
}

/// The interior sample used by the boundary-pairing approach paths:
/// (1/(n+3), 2/(n+3), ..., (n-1)/(n+3)).
pub fn default_delta_sample(n: usize) -> Vec<Rat> {
    (1..n as i64).map(|i| rat(i, n as i64 + 3)).collect()
}

/// One placement of the simplex values into a chart of T: the combinatorial
/// identity of one loop of the composed fiber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Placement {
    /// Values go to `val_axes` with signs; the other two axes are zero.
    Core {
        chart: usize,
        val_axes: Vec<usize>,
        signs: Vec<i8>,
    },
    /// One value (`height_slot`) is twice the collar height; the rest go to
    /// the listed facet axes with signs.
    Band {
        chart: usize,
        t_chart: usize,
        axis: usize,
        side: i8,
        height_slot: usize,
        val_axes: Vec<usize>,
        signs: Vec<i8>,
    },
}

/// One loop of the composed fiber, with signed edges.
#[derive(Clone, Debug)]
pub struct LoopRecord {
    pub placement: Placement,
    pub t_chart: usize,
    /// Preimage point in T-chart coordinates.
    pub t_point: Vec<Rat>,
    /// Signed edges; `orientation` carries the loop coefficient.
    pub edges: Vec<FiberEdge>,
    pub length: Rat,
    /// Every vertex of the loop has degree two.
    pub simple: bool,
}

/// The composed fiber over a generic interior simplex point.
#[derive(Clone, Debug)]
pub struct HbarFiber {
    pub x: Vec<Rat>,
    pub loops: Vec<LoopRecord>,
    pub enumerated: usize,
    /// The closed-form count 2^n (n+1)! |P| + 2^(n-1) n! |dP| quoted for
    /// comparison; enumeration is the ground truth.
    pub formula_count: usize,
    pub matches_formula: bool,
    pub edge_disjoint: bool,
    pub total_length: Rat,
    pub max_loop_length: Rat,
}

fn perm_sign(perm: &[usize]) -> i64 {
    let mut s = 1i64;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] {
                s = -s;
            }
        }
    }
    s
}

/// Ordered injections of 0..m into `items` (sequences of distinct picks).
fn ordered_picks(items: &[usize], m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(items: &[usize], m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for &it in items {
            if !cur.contains(&it) {
                cur.push(it);
                rec(items, m, cur, out);
                cur.pop();
            }
        }
    }
    rec(items, m, &mut cur, &mut out);
    out
}

fn sign_patterns(m: usize) -> Vec<Vec<i8>> {
    (0u32..(1 << m))
        .map(|mask| (0..m).map(|q| if mask >> q & 1 == 1 { 1 } else { -1 }).collect())
        .collect()
}

/// Deterministic enumeration of every placement of the bundle.
pub fn placements(bundle: &SweepoutBundle) -> Vec<Placement> {
    let n = bundle.n;
    let d = n + 1;
    let axes: Vec<usize> = (0..d).collect();
    let mut out = Vec::new();
    for chart in 0..bundle.input.complex.charts.len() {
        for val_axes in ordered_picks(&axes, n - 1) {
            for signs in sign_patterns(n - 1) {
                out.push(Placement::Core {
                    chart,
                    val_axes: val_axes.clone(),
                    signs,
                });
            }
        }
    }
    for (bf, &(chart, axis, side)) in bundle.boundary_facets.iter().enumerate() {
        let t_chart = bundle.input.complex.charts.len() + bf;
        let facet: Vec<usize> = (0..d).filter(|&k| k != axis).collect();
        for height_slot in 0..(n - 1) {
            for val_axes in ordered_picks(&facet, n - 2) {
                for signs in sign_patterns(n - 2) {
                    out.push(Placement::Band {
                        chart,
                        t_chart,
                        axis,
                        side,
                        height_slot,
                        val_axes: val_axes.clone(),
                        signs: signs.clone(),
                    });
                }
            }
        }
    }
    out
}

/// The signed square loop a placement cuts out over the simplex point `x`.
pub fn loop_at(
    bundle: &SweepoutBundle,
    placement: &Placement,
    x: &[Rat],
) -> Result<LoopRecord, SweepError> {
    let n = bundle.n;
    let d = n + 1;
    let eps = bundle.eps;
    let one = rat_int(1);

    // per-axis data in P-chart coordinates
    let p_chart;
    let t_chart;
    let t_point;
    let scale; // half-width of the fiber square
    let pin: Option<(usize, i8)>;
    // signed raw value and simplex slot of each nonzero axis
    let mut raw: BTreeMap<usize, Rat> = BTreeMap::new();
    let mut slot: BTreeMap<usize, Rat> = BTreeMap::new();
    let zeros: Vec<usize>;
    match placement {
        Placement::Core { chart, val_axes, signs } => {
            p_chart = *chart;
            t_chart = *chart;
            scale = eps;
            pin = None;
            let mut z = vec![Rat::zero(); d];
            for (q, (&k, &s)) in val_axes.iter().zip(signs).enumerate() {
                z[k] = rat_int(s as i64) * x[q];
                raw.insert(k, z[k]);
                slot.insert(k, x[q]);
            }
            zeros = (0..d).filter(|k| !raw.contains_key(k)).collect();
            t_point = z;
        }
        Placement::Band {
            chart,
            t_chart: tc,
            axis,
            side,
            height_slot,
            val_axes,
            signs,
        } => {
            p_chart = *chart;
            t_chart = *tc;
            let u = x[*height_slot] / rat_int(2);
            scale = u;
            pin = Some((*axis, *side));
            let facet: Vec<usize> = (0..d).filter(|&k| k != *axis).collect();
            let rest: Vec<usize> = (0..n - 1).filter(|&q| q != *height_slot).collect();
            let mut y = vec![Rat::zero(); n];
            for ((&k, &s), &q) in val_axes.iter().zip(signs).zip(&rest) {
                let v = rat_int(s as i64) * x[q];
                let pos = facet.iter().position(|&a| a == k).unwrap();
                y[pos] = v;
                raw.insert(k, v);
                slot.insert(k, x[q]);
            }
            zeros = facet
                .iter()
                .copied()
                .filter(|k| !raw.contains_key(k))
                .collect();
            let mut tp = y;
            tp.push(u);
            t_point = tp;
        }
    }
    debug_assert_eq!(zeros.len(), 2);
    let (alpha, beta) = (zeros[0], zeros[1]);

    // fiber coordinates of the nonzero axes
    let coord: BTreeMap<usize, Rat> = raw
        .iter()
        .map(|(&k, &v)| (k, lambda_inv(scale, v)))
        .collect();

    let mut edges = Vec::new();
    for (f, o) in [(alpha, beta), (beta, alpha)] {
        for so in [-1i64, 1] {
            let mut intervals = vec![(Rat::zero(), Rat::zero()); d];
            if let Some((a, s)) = pin {
                let v = if s > 0 { one } else { -one };
                intervals[a] = (v, v);
            }
            intervals[f] = (-scale, scale);
            let ov = rat_int(so) * scale;
            intervals[o] = (ov, ov);
            for (&k, &v) in &coord {
                intervals[k] = (v, v);
            }
            let cell = CubicalCell::new(p_chart, intervals);

            // host top cell of N and its coherent orientation sign
            let host = match placement {
                Placement::Core { .. } => {
                    let mut hi = vec![(Rat::zero(), Rat::zero()); d];
                    hi[f] = (-eps, eps);
                    hi[o] = (ov, ov);
                    for (&k, &v) in &raw {
                        hi[k] = if v > Rat::zero() { (eps, one) } else { (-one, -eps) };
                    }
                    CubicalCell::new(p_chart, hi)
                }
                Placement::Band { axis, side, .. } => {
                    let mut hi = vec![(Rat::zero(), Rat::zero()); d];
                    let sv = if *side > 0 { one } else { -one };
                    hi[*axis] = (sv, sv);
                    hi[f] = (-eps, eps);
                    hi[o] = (-eps, eps);
                    for (&k, &v) in &coord {
                        if v.abs() == eps {
                            return Err(SweepError::NotGeneric(format!(
                                "a fiber coordinate lands exactly on the band break {}",
                                crate::rat::rat_str(v)
                            )));
                        }
                        hi[k] = if v.abs() < eps {
                            (-eps, eps)
                        } else if v > Rat::zero() {
                            (eps, one)
                        } else {
                            (-one, -eps)
                        };
                    }
                    CubicalCell::new(p_chart, hi)
                }
            };
            if !bundle.n_complex.charts[p_chart].cells.contains(&host) {
                return Err(SweepError::Invalid(
                    "fiber edge host cell is missing from the swept hypersurface".into(),
                ));
            }
            let or_n = bundle.top_cell_sign(&host);

            // product of the fixed-coordinate signs over the host's free
            // axes other than the edge direction
            let mut prod = 1i64;
            for ax in host.free_axes() {
                if ax == f {
                    continue;
                }
                let v = cell.intervals[ax].0;
                prod *= if v > Rat::zero() { 1 } else { -1 };
            }

            // permutation from slot order (ascending simplex values, then
            // the edge direction) to ascending axis order
            let mut slotted: Vec<(Rat, usize)> =
                slot.iter().map(|(&k, &v)| (v, k)).collect();
            if matches!(placement, Placement::Band { .. }) {
                slotted.push((rat(2, 1) * scale, o));
            }
            slotted.sort();
            let mut seq: Vec<usize> = slotted.iter().map(|&(_, k)| k).collect();
            seq.push(f);
            let mut sorted = seq.clone();
            sorted.sort_unstable();
            let perm: Vec<usize> = seq
                .iter()
                .map(|k| sorted.iter().position(|a| a == k).unwrap())
                .collect();
            let d_e = or_n * prod * perm_sign(&perm);

            // skeleton image and its metric length
            let image_intervals: Vec<(Rat, Rat)> = cell
                .intervals
                .iter()
                .enumerate()
                .map(|(k, &(lo, _))| {
                    if k == f {
                        (-one, one)
                    } else if lo > Rat::zero() {
                        (one, one)
                    } else {
                        (-one, -one)
                    }
                })
                .collect();
            let image = CubicalCell::new(p_chart, image_intervals);
            let length = bundle.image_length(&image)?;
            edges.push(FiberEdge {
                chart: p_chart,
                cell,
                free_axis: f,
                orientation: d_e,
                image,
                length,
            });
        }
    }

    // the signed boundary of the loop must vanish
    if bundle.orientation.is_some() {
        let mut acc: BTreeMap<Vec<Rat>, i64> = BTreeMap::new();
        for e in &edges {
            let (lo, hi) = e.cell.intervals[e.free_axis];
            let mut p: Vec<Rat> = e.cell.intervals.iter().map(|&(l, _)| l).collect();
            p[e.free_axis] = hi;
            *acc.entry(p.clone()).or_insert(0) += e.orientation;
            p[e.free_axis] = lo;
            *acc.entry(p).or_insert(0) -= e.orientation;
        }
        if acc.values().any(|&v| v != 0) {
            return Err(SweepError::Invalid(
                "loop orientation bookkeeping failed: signed boundary is nonzero".into(),
            ));
        }
    }

    // simplicity: every endpoint is met by exactly two edges
    let mut deg: BTreeMap<Vec<Rat>, usize> = BTreeMap::new();
    for e in &edges {
        for v in e.cell.vertices() {
            *deg.entry(v.point()).or_insert(0) += 1;
        }
    }
    let simple = deg.values().all(|&c| c == 2);
    let length = edges.iter().map(|e| e.length).sum();

    Ok(LoopRecord {
        placement: placement.clone(),
        t_chart,
        t_point,
        edges,
        length,
        simple,
    })
}

/// The composed fiber over a generic interior simplex point: one square
/// loop per placement.
pub fn hbar_fiber(bundle: &SweepoutBundle, x: &[Rat]) -> Result<HbarFiber, SweepError> {
    let n = bundle.n;
    if x.len() != n - 1 {
        return Err(SweepError::Invalid(format!(
            "simplex points have {} coordinates, got {}",
            n - 1,
            x.len()
        )));
    }
    let generic = x.iter().all(|v| *v > Rat::zero() && *v < rat_int(1))
        && x.windows(2).all(|w| w[0] < w[1]);
    if !generic {
        return Err(SweepError::NotGeneric(format!(
            "coordinates must be strictly increasing inside (0,1); try {:?}",
            default_delta_sample(n)
                .iter()
                .map(|v| crate::rat::rat_str(*v))
                .collect::<Vec<_>>()
        )));
    }
    let mut loops = Vec::new();
    for p in placements(bundle) {
        loops.push(loop_at(bundle, &p, x)?);
    }
    let enumerated = loops.len();
    let fact = |m: usize| (1..=m).product::<usize>();
    let formula_count = (1usize << n) * fact(n + 1) * bundle.input.complex.charts.len()
        + (1usize << (n - 1)) * fact(n) * bundle.boundary_facets.len();
    let mut seen = BTreeSet::new();
    let mut edge_disjoint = true;
    for l in &loops {
        for e in &l.edges {
            if !seen.insert(e.cell.clone()) {
                edge_disjoint = false;
            }
        }
    }
    let total_length = loops.iter().map(|l| l.length).sum();
    let max_loop_length = loops.iter().map(|l| l.length).max().unwrap_or_else(Rat::zero);
    Ok(HbarFiber {
        x: x.to_vec(),
        matches_formula: enumerated == formula_count,
        enumerated,
        formula_count,
        edge_disjoint,
        total_length,
        max_loop_length,
        loops,
    })
}

/// Exact Lagrange extrapolation to 0 of a quadratic sampled at three nodes.
fn extrapolate0(nodes: &[Rat; 3], values: &[Rat; 3]) -> Rat {
    let mut out = Rat::zero();
    for i in 0..3 {
        let mut c = rat_int(1);
        for j in 0..3 {
            if j != i {
                c *= nodes[j] / (nodes[j] - nodes[i]);
            }
        }
        out += c * values[i];
    }
    out
}

/// Inverse of a facet identification map, defined on the partner facet.
fn inverse_map(id: &Identification, src_dim: usize) -> FacetMap {
    let mut out = vec![AxisImage::Fixed(Rat::zero()); src_dim];
    for (k, img) in out.iter_mut().enumerate() {
        *img = AxisImage::Fixed(id.facet_a.intervals[k].0);
    }
    for (m, img) in id.map.out.iter().enumerate() {
        if let AxisImage::Axis { from, sign } = img {
            out[*from] = AxisImage::Axis { from: m, sign: *sign };
        }
    }
    FacetMap { out }
}

/// Orbit of a point under the identifications of a complex; returns the
/// lexicographically least (chart, coordinates) representative.
fn canonical_point(gc: &GluedComplex, chart: usize, point: &[Rat]) -> (usize, Vec<Rat>) {
    let mut orbit: BTreeSet<(usize, Vec<Rat>)> = BTreeSet::new();
    let mut queue = vec![(chart, point.to_vec())];
    orbit.insert(queue[0].clone());
    while let Some((c, p)) = queue.pop() {
        for id in &gc.identifications {
            if id.chart_a == c && id.facet_a.contains_point(&p) {
                let q = (id.chart_b, id.map.apply_point(&p));
                if orbit.insert(q.clone()) {
                    queue.push(q);
                }
            }
            if id.chart_b == c && id.facet_b.contains_point(&p) {
                let inv = inverse_map(id, id.facet_a.intervals.len());
                let q = (id.chart_a, inv.apply_point(&p));
                if orbit.insert(q.clone()) {
                    queue.push(q);
                }
            }
        }
    }
    orbit.into_iter().next().expect("orbit holds the seed")
}

/// Canonical representative of a signed edge under the identifications of
/// P, transporting the coefficient through axis reversals.
fn canonical_edge(
    gc: &GluedComplex,
    cell: &CubicalCell,
    coeff: i64,
) -> (CubicalCell, i64) {
    let mut orbit: BTreeMap<CubicalCell, i64> = BTreeMap::new();
    let mut queue = vec![(cell.clone(), coeff)];
    orbit.insert(cell.clone(), coeff);
    while let Some((c, s)) = queue.pop() {
        let free = c.free_axes()[0];
        for id in &gc.identifications {
            let step = |to_chart: usize, map: &FacetMap, facet: &CubicalCell, from_chart: usize| {
                if c.chart != from_chart || !facet.contains_cell(&c) {
                    return None;
                }
                let img = map.apply_cell(to_chart, &c);
                let sign = map
                    .out
                    .iter()
                    .find_map(|a| match a {
                        AxisImage::Axis { from, sign } if *from == free => Some(*sign as i64),
                        _ => None,
                    })
                    .unwrap_or(1);
                Some((img, s * sign))
            };
            for next in [
                step(id.chart_b, &id.map, &id.facet_a, id.chart_a),
                step(
                    id.chart_a,
                    &inverse_map(id, id.facet_a.intervals.len()),
                    &id.facet_b,
                    id.chart_b,
                ),
            ]
            .into_iter()
            .flatten()
            {
                if !orbit.contains_key(&next.0) {
                    orbit.insert(next.0.clone(), next.1);
                    queue.push(next);
                }
            }
        }
    }
    orbit.into_iter().next().expect("orbit holds the seed")
}

/// One group of placements sharing a limit point in T.
#[derive(Clone, Debug)]
pub struct PairingGroup {
    pub limit_chart: usize,
    pub limit_point: Vec<Rat>,
    /// Placement indices in the certificate's placement list.
    pub members: Vec<usize>,
    /// Members whose limit loops coincide with opposite signs.
    pub pairs: Vec<(usize, usize)>,
    /// Members cancelling only through the whole group.
    pub unpaired: Vec<usize>,
    /// The signed sum of all limit edges of the group vanishes over Z.
    pub signed_sum_zero: bool,
    pub edge_terms: usize,
}

/// Exact cancellation certificate at a boundary point of the simplex.
#[derive(Clone, Debug)]
pub struct PairingCertificate {
    pub x0: Vec<Rat>,
    pub approach: Vec<Vec<Rat>>,
    pub placements: usize,
    /// Collar placements whose height collapses to zero (point fibers).
    pub skipped_degenerate: usize,
    pub groups: Vec<PairingGroup>,
    pub all_zero: bool,
    pub paired: usize,
    pub unpaired: usize,
}

/// Walk a generic sample toward `x0` on the simplex boundary, extrapolate
/// every loop to the limit exactly, and certify that the signed limit
/// 1-chain vanishes, grouped by limit point in T.
pub fn boundary_pairing(
    bundle: &SweepoutBundle,
    x0: &[Rat],
) -> Result<PairingCertificate, SweepError> {
    let n = bundle.n;
    if bundle.orientation.is_none() {
        return Err(SweepError::NotOrientable);
    }
    if x0.len() != n - 1 {
        return Err(SweepError::Invalid(format!(
            "simplex points have {} coordinates, got {}",
            n - 1,
            x0.len()
        )));
    }
    let one = rat_int(1);
    let ordered = x0.iter().all(|v| *v >= Rat::zero() && *v <= one)
        && x0.windows(2).all(|w| w[0] <= w[1]);
    if !ordered {
        return Err(SweepError::Domain(
            "the point lies outside the ordered simplex".into(),
        ));
    }
    let interior = x0.iter().all(|v| *v > Rat::zero() && *v < one)
        && x0.windows(2).all(|w| w[0] < w[1]);
    if interior {
        return Err(SweepError::Domain(
            "the point is interior to the simplex; pairing happens on its boundary".into(),
        ));
    }

    let g = default_delta_sample(n);
    let hs = [rat(1, 64), rat(1, 128), rat(1, 256)];
    let xh: Vec<Vec<Rat>> = hs
        .iter()
        .map(|&h| {
            x0.iter()
                .zip(&g)
                .map(|(&a, &b)| (one - h) * a + h * b)
                .collect()
        })
        .collect();

    let plist = placements(bundle);
    let mut per_h: Vec<Vec<LoopRecord>> = Vec::new();
    for x in &xh {
        let mut loops = Vec::new();
        for p in &plist {
            loops.push(loop_at(bundle, p, x)?);
        }
        per_h.push(loops);
    }

    // extrapolate placements to the limit
    struct Limit {
        index: usize,
        chart: usize,
        point: Vec<Rat>,
        /// canonical signed edges
        edges: BTreeMap<CubicalCell, i64>,
    }
    let mut skipped = 0usize;
    let mut limits: Vec<Limit> = Vec::new();
    for (pi, p) in plist.iter().enumerate() {
        let recs = [&per_h[0][pi], &per_h[1][pi], &per_h[2][pi]];
        let dim = recs[0].t_point.len();
        let point: Vec<Rat> = (0..dim)
            .map(|q| extrapolate0(&hs, &[recs[0].t_point[q], recs[1].t_point[q], recs[2].t_point[q]]))
            .collect();
        if let Placement::Band { .. } = p {
            if point[n].is_zero() {
                skipped += 1;
                continue;
            }
        }
        let (chart, point) = canonical_point(&bundle.t_complex, recs[0].t_chart, &point);
        let mut edges: BTreeMap<CubicalCell, i64> = BTreeMap::new();
        for e in 0..recs[0].edges.len() {
            let d_e = recs[0].edges[e].orientation;
            if recs[1].edges[e].orientation != d_e || recs[2].edges[e].orientation != d_e {
                return Err(SweepError::NotGeneric(
                    "loop orientation is unstable along the approach path".into(),
                ));
            }
            let d_cells = [&recs[0].edges[e].cell, &recs[1].edges[e].cell, &recs[2].edges[e].cell];
            let intervals: Vec<(Rat, Rat)> = (0..d_cells[0].intervals.len())
                .map(|k| {
                    let lo = extrapolate0(
                        &hs,
                        &[
                            d_cells[0].intervals[k].0,
                            d_cells[1].intervals[k].0,
                            d_cells[2].intervals[k].0,
                        ],
                    );
                    let hi = extrapolate0(
                        &hs,
                        &[
                            d_cells[0].intervals[k].1,
                            d_cells[1].intervals[k].1,
                            d_cells[2].intervals[k].1,
                        ],
                    );
                    (lo, hi)
                })
                .collect();
            let cell = CubicalCell::new(d_cells[0].chart, intervals);
            if cell.dim() == 0 {
                continue; // the edge collapsed
            }
            let (canon, sign) = canonical_edge(&bundle.input.complex, &cell, d_e);
            *edges.entry(canon).or_insert(0) += sign;
            let _ = sign;
        }
        edges.retain(|_, v| *v != 0);
        limits.push(Limit {
            index: pi,
            chart,
            point,
            edges,
        });
    }

    // group by canonical limit point and certify cancellation
    let mut by_point: BTreeMap<(usize, Vec<Rat>), Vec<usize>> = BTreeMap::new();
    for (li, l) in limits.iter().enumerate() {
        by_point
            .entry((l.chart, l.point.clone()))
            .or_default()
            .push(li);
    }
    let mut groups = Vec::new();
    let mut all_zero = true;
    let mut paired_total = 0usize;
    let mut unpaired_total = 0usize;
    for ((chart, point), lis) in by_point {
        let mut sum: BTreeMap<CubicalCell, i64> = BTreeMap::new();
        for &li in &lis {
            for (cell, &s) in &limits[li].edges {
                *sum.entry(cell.clone()).or_insert(0) += s;
            }
        }
        sum.retain(|_, v| *v != 0);
        let signed_sum_zero = sum.is_empty();
        all_zero &= signed_sum_zero;

        // greedy pairing of exactly opposite limit chains
        let mut taken = vec![false; lis.len()];
        let mut pairs = Vec::new();
        for i in 0..lis.len() {
            if taken[i] {
                continue;
            }
            for j in (i + 1)..lis.len() {
                if taken[j] {
                    continue;
                }
                let (a, b) = (&limits[lis[i]].edges, &limits[lis[j]].edges);
                let opposite = a.len() == b.len()
                    && a.iter().all(|(cell, &s)| b.get(cell) == Some(&-s));
                if opposite {
                    taken[i] = true;
                    taken[j] = true;
                    pairs.push((limits[lis[i]].index, limits[lis[j]].index));
                    break;
                }
            }
        }
        let unpaired: Vec<usize> = lis
            .iter()
            .enumerate()
            .filter(|&(q, _)| !taken[q])
            .map(|(_, &li)| limits[li].index)
            .collect();
        paired_total += 2 * pairs.len();
        unpaired_total += unpaired.len();
        groups.push(PairingGroup {
            limit_chart: chart,
            limit_point: point,
            members: lis.iter().map(|&li| limits[li].index).collect(),
            edge_terms: lis.iter().map(|&li| limits[li].edges.len()).sum(),
            pairs,
            unpaired,
            signed_sum_zero,
        });
    }

    Ok(PairingCertificate {
        x0: x0.to_vec(),
        approach: xh,
        placements: plist.len(),
        skipped_degenerate: skipped,
        groups,
        all_zero,
        paired: paired_total,
        unpaired: unpaired_total,
    })
}

/// Shrink every edge [a,b] of a fiber toward its endpoints: the edge is
/// replaced by [a, a_s] and [b_s, b] with a_s = s a + (1-s) m, m the
/// midpoint. s = 0 reproduces the fiber, s = 1 collapses it to points.
pub fn collar_extend(fiber: &FiberRecord, s: Rat) -> Result<FiberRecord, SweepError> {
    if s < Rat::zero() || s > rat_int(1) {
        return Err(SweepError::Domain(
            "the collar parameter must lie in [0, 1]".into(),
        ));
    }
    // precondition: each component is a union of closed walks
    let mut deg: BTreeMap<Vec<Rat>, usize> = BTreeMap::new();
    for e in &fiber.edges {
        for v in e.cell.vertices() {
            *deg.entry(v.point()).or_insert(0) += 1;
        }
    }
    if deg.values().any(|&c| c % 2 != 0) {
        return Err(SweepError::Domain(
            "the fiber is not a 1-cycle; collar extension needs vanishing edge sums".into(),
        ));
    }
    if s.is_zero() {
        return Ok(fiber.clone());
    }

    let half = rat(1, 2);
    let shrink = (rat_int(1) - s) * half; // each piece keeps this fraction
    let mut edges = Vec::new();
    for e in &fiber.edges {
        let (lo, hi) = e.cell.intervals[e.free_axis];
        let m = (lo + hi) * half;
        let lo_s = s * lo + (rat_int(1) - s) * m;
        let hi_s = s * hi + (rat_int(1) - s) * m;
        for (plo, phi) in [(lo, lo_s), (hi_s, hi)] {
            let mut intervals = e.cell.intervals.clone();
            intervals[e.free_axis] = (plo, phi);
            edges.push(FiberEdge {
                chart: e.chart,
                cell: CubicalCell::new(e.chart, intervals),
                free_axis: e.free_axis,
                orientation: e.orientation,
                image: e.image.clone(),
                length: e.length * shrink,
            });
        }
    }
    // components by shared endpoints
    let mut node: BTreeMap<Vec<Rat>, usize> = BTreeMap::new();
    let mut parent: Vec<usize> = Vec::new();
    let mut ends = Vec::new();
    for e in &edges {
        let mut pair = Vec::new();
        for v in e.cell.vertices() {
            let next = node.len();
            let id = *node.entry(v.point()).or_insert(next);
            if id == parent.len() {
                parent.push(id);
            }
            pair.push(id);
        }
        if pair.len() == 1 {
            pair.push(pair[0]); // degenerate piece
        }
        ends.push((pair[0], pair[1]));
    }
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
    let mut comp_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut components: Vec<Vec<usize>> = Vec::new();
    for (ei, &(a, _)) in ends.iter().enumerate() {
        let root = find(&mut parent, a);
        let next = components.len();
        let ci = *comp_of.entry(root).or_insert(next);
        if ci == components.len() {
            components.push(Vec::new());
        }
        components[ci].push(ei);
    }
    let total: Rat = edges.iter().map(|e| e.length).sum();
    let max_component = components
        .iter()
        .map(|c| c.iter().map(|&ei| edges[ei].length).sum())
        .max()
        .unwrap_or_else(Rat::zero);
    Ok(FiberRecord {
        t_chart: fiber.t_chart,
        t_cell: fiber.t_cell.clone(),
        sample: fiber.sample.clone(),
        edges,
        components,
        total,
        max_component,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweepout::bundle::{build_bundle, fiber, BuildOptions};
    use crate::sweepout::input::{two_cube_filling, unit_cube_filling};

    fn c3_bundle() -> SweepoutBundle {
        build_bundle(&unit_cube_filling(2), &BuildOptions::default()).unwrap()
    }

    #[test]
    fn quotient_sorts_absolute_values() {
        let bundle = c3_bundle();
        let q = simplex_quotient(&bundle, 0, &[rat(-1, 2), Rat::zero(), Rat::zero()]).unwrap();
        assert_eq!(q.delta, vec![rat(1, 2)]);
        let q0 = simplex_quotient(&bundle, 0, &[Rat::zero(); 3]).unwrap();
        assert_eq!(q0.delta, vec![Rat::zero()]);
        // signed-permutation invariance
        let q2 = simplex_quotient(&bundle, 0, &[Rat::zero(), rat(1, 2), Rat::zero()]).unwrap();
        assert_eq!(q.delta, q2.delta);
        // collar points embed with doubled height
        let band = bundle.input.complex.charts.len();
        let qb = simplex_quotient(&bundle, band, &[Rat::zero(), Rat::zero(), rat(1, 8)]).unwrap();
        assert_eq!(qb.delta, vec![rat(1, 4)]);
    }

    #[test]
    fn hbar_fiber_counts_and_loops() {
        let bundle = c3_bundle();
        let hb = hbar_fiber(&bundle, &[rat(2, 5)]).unwrap();
        // 6 core placements plus one per boundary facet
        assert_eq!(hb.enumerated, 12);
        assert_eq!(hb.formula_count, 4 * 6 + 2 * 2 * 6);
        assert!(hb.edge_disjoint);
        for l in &hb.loops {
            assert!(l.simple);
            assert_eq!(l.edges.len(), 4);
            assert!(l.length <= rat_int(4) * bundle.delta);
        }
    }

    #[test]
    fn hbar_count_is_stable_and_rejects_nongeneric() {
        let bundle = c3_bundle();
        let a = hbar_fiber(&bundle, &[rat(1, 5)]).unwrap();
        let b = hbar_fiber(&bundle, &[rat(9, 11)]).unwrap();
        assert_eq!(a.enumerated, b.enumerated);
        assert!(matches!(
            hbar_fiber(&bundle, &[rat_int(1)]),
            Err(SweepError::NotGeneric(_))
        ));
    }

    #[test]
    fn pairing_at_the_far_corner_pairs_everything() {
        let bundle = c3_bundle();
        let cert = boundary_pairing(&bundle, &[rat_int(1)]).unwrap();
        assert!(cert.all_zero);
        assert_eq!(cert.skipped_degenerate, 0);
        // each core tip placement cancels against its collar partner
        assert_eq!(cert.paired, 12);
        assert_eq!(cert.unpaired, 0);
    }

    #[test]
    fn pairing_at_zero_cancels_group_globally() {
        let bundle = c3_bundle();
        let cert = boundary_pairing(&bundle, &[Rat::zero()]).unwrap();
        assert!(cert.all_zero);
        // every collar fiber collapses to a point
        assert_eq!(cert.skipped_degenerate, 6);
        // the six core squares bound a cube and only cancel jointly
        assert_eq!(cert.groups.len(), 1);
        assert_eq!(cert.groups[0].members.len(), 6);
    }

    #[test]
    fn pairing_on_two_charts() {
        let bundle =
            build_bundle(&two_cube_filling(2), &BuildOptions::default()).unwrap();
        let cert = boundary_pairing(&bundle, &[rat_int(1)]).unwrap();
        assert!(cert.all_zero);
        assert_eq!(cert.unpaired, 0);
    }

    #[test]
    fn pairing_in_dimension_three() {
        let bundle =
            build_bundle(&unit_cube_filling(3), &BuildOptions::default()).unwrap();
        // one coordinate at an endpoint
        let c1 = boundary_pairing(&bundle, &[rat(1, 3), rat_int(1)]).unwrap();
        assert!(c1.all_zero);
        // one coordinate at zero: collar fibers there degenerate
        let c2 = boundary_pairing(&bundle, &[Rat::zero(), rat(1, 2)]).unwrap();
        assert!(c2.all_zero);
        assert!(c2.skipped_degenerate > 0);
        // two equal interior coordinates: value-swap placements cancel
        let c3 = boundary_pairing(&bundle, &[rat(1, 3), rat(1, 3)]).unwrap();
        assert!(c3.all_zero);
        assert!(c3.paired > 0);
    }

    #[test]
    fn rejects_interior_points() {
        let bundle = c3_bundle();
        assert!(matches!(
            boundary_pairing(&bundle, &[rat(1, 3)]),
            Err(SweepError::Domain(_))
        ));
    }

    #[test]
    fn collar_endpoints() {
        let bundle = c3_bundle();
        let cell = CubicalCell::new(
            0,
            vec![
                (Rat::zero(), Rat::zero()),
                (Rat::zero(), Rat::zero()),
                (Rat::zero(), rat_int(1)),
            ],
        );
        let f = fiber(&bundle, 0, &cell).unwrap();
        let id = collar_extend(&f, Rat::zero()).unwrap();
        assert_eq!(id.total, f.total);
        let half = collar_extend(&f, rat(1, 2)).unwrap();
        assert_eq!(half.total, f.total / rat_int(2));
        assert_eq!(half.edges.len(), 2 * f.edges.len());
        let full = collar_extend(&f, rat_int(1)).unwrap();
        assert!(full.total.is_zero());
        // a non-cycle fiber is rejected
        let center = CubicalCell::vertex(0, &[Rat::zero(); 3]);
        let c = fiber(&bundle, 0, &center).unwrap();
        assert!(matches!(
            collar_extend(&c, rat(1, 2)),
            Err(SweepError::Domain(_))
        ));
    }
}
