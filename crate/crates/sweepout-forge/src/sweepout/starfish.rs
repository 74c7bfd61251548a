//! The three-legged starfish: a cubulated sphere made of three tubes joined
//! at a central junction, mapping onto a tripod. Fibers over the interiors
//! of the tripod rays are m-gon rings; the fiber over the junction is a
//! theta-graph (two degree-3 vertices, three arcs), which is why the tripod
//! map is not a sweepout by cycles. Doubling the target into a hexapod
//! replaces the theta-graph by three digons and turns every fiber into a
//! 1-cycle at the cost of (at most) doubling the maximal fiber length.

use crate::fillrad::FiniteMetricSpace;
use crate::rat::{rat, rat_int, Rat};
use crate::sweepout::input::SweepError;
use num_traits::Zero;
use std::collections::BTreeMap;

/// A fiber of the tripod or hexapod map, as a weighted graph on the surface
/// vertex set.
#[derive(Clone, Debug)]
pub struct StarfishFiber {
    /// Leg index for ray fibers; `None` over the junction.
    pub leg: Option<usize>,
    /// Distance of the base point from the tripod center.
    pub t: Rat,
    pub vertices: Vec<usize>,
    /// Undirected weighted edges (u, v, length).
    pub edges: Vec<(usize, usize, Rat)>,
    pub total: Rat,
    /// Every vertex has even degree.
    pub is_cycle: bool,
    /// Nonempty and every vertex has degree exactly two.
    pub simple_loop: bool,
    /// Edge indices grouped into connected components.
    pub components: Vec<Vec<usize>>,
}

fn fiber_from_edges(leg: Option<usize>, t: Rat, edges: Vec<(usize, usize, Rat)>) -> StarfishFiber {
    let mut deg: BTreeMap<usize, usize> = BTreeMap::new();
    for &(u, v, _) in &edges {
        *deg.entry(u).or_insert(0) += 1;
        *deg.entry(v).or_insert(0) += 1;
    }
    let vertices: Vec<usize> = deg.keys().copied().collect();
    let is_cycle = deg.values().all(|&c| c % 2 == 0);
    let simple_loop = !edges.is_empty() && deg.values().all(|&c| c == 2);
    // connected components of the edge set
    let index: BTreeMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut parent: Vec<usize> = (0..vertices.len()).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for &(u, v, _) in &edges {
        let (a, b) = (find(&mut parent, index[&u]), find(&mut parent, index[&v]));
        if a != b {
            parent[a] = b;
        }
    }
    let mut comp_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut components: Vec<Vec<usize>> = Vec::new();
    for (ei, &(u, _, _)) in edges.iter().enumerate() {
        let root = find(&mut parent, index[&u]);
        let next = components.len();
        let ci = *comp_of.entry(root).or_insert(next);
        if ci == components.len() {
            components.push(Vec::new());
        }
        components[ci].push(ei);
    }
    let total = edges.iter().map(|&(_, _, l)| l).sum();
    StarfishFiber {
        leg,
        t,
        vertices,
        edges,
        total,
        is_cycle,
        simple_loop,
        components,
    }
}

/// A cubulated starfish sphere with its tripod map and fiber inventory.
#[derive(Clone, Debug)]
pub struct Starfish {
    pub leg_length: Rat,
    pub tube_radius: Rat,
    pub resolution: usize,
    /// Discretized tube circumference, 44r/7 (rational stand-in for 2 pi r).
    pub circumference: Rat,
    /// Common mesh edge length around a tube, circumference / m.
    pub edge_len: Rat,
    pub vertex_count: usize,
    /// The surface 1-skeleton with edge lengths.
    pub skeleton: Vec<(usize, usize, Rat)>,
    /// Intrinsic shortest-path metric on the vertices; fundamental degree 2.
    pub space: FiniteMetricSpace,
    /// Tripod image of each vertex.
    pub tripod: Vec<(Option<usize>, Rat)>,
    /// The three junction arcs as vertex paths from one saddle to the other.
    pub junction_arcs: Vec<Vec<usize>>,
    /// Fibers over the tripod vertex stations: junction, then per leg the
    /// two ring stations and the apex.
    pub fibers: Vec<StarfishFiber>,
    /// Largest ray-interior fiber length (one tube circumference).
    pub max_ray_fiber: Rat,
    /// Largest fiber length overall (the theta-graph).
    pub max_fiber_length: Rat,
    /// Largest intrinsic diameter of a fiber vertex set.
    pub max_fiber_diameter: Rat,
}

fn shortest_paths(n: usize, edges: &[(usize, usize, Rat)]) -> Vec<Vec<Rat>> {
    let mut dist: Vec<Vec<Option<Rat>>> = vec![vec![None; n]; n];
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = Some(Rat::zero());
    }
    for &(u, v, l) in edges {
        let better = |cur: &Option<Rat>| cur.map_or(true, |c| l < c);
        if better(&dist[u][v]) {
            dist[u][v] = Some(l);
            dist[v][u] = Some(l);
        }
    }
    for k in 0..n {
        for i in 0..n {
            let Some(ik) = dist[i][k] else { continue };
            for j in 0..n {
                let Some(kj) = dist[k][j] else { continue };
                let cand = ik + kj;
                if dist[i][j].map_or(true, |c| cand < c) {
                    dist[i][j] = Some(cand);
                }
            }
        }
    }
    dist.into_iter()
        .map(|row| {
            row.into_iter()
                .map(|d| d.expect("the starfish skeleton is connected"))
                .collect()
        })
        .collect()
}

/// Build the starfish: three tubes of length `l` and radius `r`, each
/// meshed with `m` vertices around, joined along a junction whose
/// cross-section is the theta-graph.
pub fn make_starfish(l: Rat, r: Rat, m: usize) -> Result<Starfish, SweepError> {
    if l <= Rat::zero() || r <= Rat::zero() {
        return Err(SweepError::Domain(
            "leg length and tube radius must be positive".into(),
        ));
    }
    if m < 3 {
        return Err(SweepError::Domain(
            "resolution too small to cubulate: need m >= 3".into(),
        ));
    }
    let circumference = rat(44, 7) * r;
    let e = circumference / rat_int(m as i64);
    let a = m.div_ceil(2); // edges per junction arc, about half a ring
    let third = l / rat_int(3);

    // vertex layout: saddles A=0, B=1; per leg the arc interiors, then two
    // rings of m and the apex
    let arc_start = |j: usize| 2 + j * (a - 1);
    let leg_start = |j: usize| 2 + 3 * (a - 1) + j * (2 * m + 1);
    let ring = |j: usize, s: usize, i: usize| leg_start(j) + s * m + i;
    let apex = |j: usize| leg_start(j) + 2 * m;
    let count = 2 + 3 * (a - 1) + 3 * (2 * m + 1);

    // the junction arc j as a vertex path from A to B
    let arc_path = |j: usize| -> Vec<usize> {
        let mut p = vec![0usize];
        p.extend((0..a - 1).map(|q| arc_start(j) + q));
        p.push(1);
        p
    };

    let mut skeleton: Vec<(usize, usize, Rat)> = Vec::new();
    for j in 0..3 {
        // arc edges
        let path = arc_path(j);
        for w in path.windows(2) {
            skeleton.push((w[0], w[1], e));
        }
        // ring edges
        for s in 0..2 {
            for i in 0..m {
                skeleton.push((ring(j, s, i), ring(j, s, (i + 1) % m), e));
            }
        }
        // the junction circle of tube j is arc_j followed by arc_{j+1}
        // reversed; meridians connect it to the first ring
        let mut jc = arc_path(j);
        let back = arc_path((j + 1) % 3);
        jc.extend(back.iter().rev().skip(1).take(back.len() - 2));
        for i in 0..m {
            let anchor = jc[i.min(jc.len() - 1)];
            skeleton.push((anchor, ring(j, 0, i), third));
            skeleton.push((ring(j, 0, i), ring(j, 1, i), third));
            skeleton.push((ring(j, 1, i), apex(j), third));
        }
    }

    let mut space = FiniteMetricSpace::new(shortest_paths(count, &skeleton))
        .map_err(|err| SweepError::Invalid(format!("starfish metric: {err}")))?;
    space.degree = Some(2);

    let mut tripod = vec![(None, Rat::zero()); count];
    for j in 0..3 {
        for i in 0..m {
            tripod[ring(j, 0, i)] = (Some(j), third);
            tripod[ring(j, 1, i)] = (Some(j), third * rat_int(2));
        }
        tripod[apex(j)] = (Some(j), l);
    }

    let mut fibers = Vec::new();
    // junction fiber: the theta-graph of the three arcs
    let mut theta = Vec::new();
    for j in 0..3 {
        for w in arc_path(j).windows(2) {
            theta.push((w[0], w[1], e));
        }
    }
    fibers.push(fiber_from_edges(None, Rat::zero(), theta));
    for j in 0..3 {
        for s in 0..2 {
            let ring_edges = (0..m)
                .map(|i| (ring(j, s, i), ring(j, s, (i + 1) % m), e))
                .collect();
            fibers.push(fiber_from_edges(
                Some(j),
                third * rat_int(s as i64 + 1),
                ring_edges,
            ));
        }
        let mut pt = fiber_from_edges(Some(j), l, Vec::new());
        pt.vertices = vec![apex(j)];
        fibers.push(pt);
    }

    let max_ray_fiber = fibers
        .iter()
        .filter(|f| f.leg.is_some())
        .map(|f| f.total)
        .max()
        .unwrap();
    let max_fiber_length = fibers.iter().map(|f| f.total).max().unwrap();
    let mut max_fiber_diameter = Rat::zero();
    for f in &fibers {
        for &u in &f.vertices {
            for &v in &f.vertices {
                max_fiber_diameter = max_fiber_diameter.max(space.dist[u][v]);
            }
        }
    }

    Ok(Starfish {
        leg_length: l,
        tube_radius: r,
        resolution: m,
        circumference,
        edge_len: e,
        vertex_count: count,
        skeleton,
        space,
        tripod,
        junction_arcs: (0..3).map(arc_path).collect(),
        fibers,
        max_ray_fiber,
        max_fiber_length,
        max_fiber_diameter,
    })
}

/// The fiber family of the hexapod map, indexed along the circle obtained
/// by composing with the interval map on one doubled leg.
#[derive(Clone, Debug)]
pub struct Hexapod {
    pub resolution: usize,
    /// Fibers in circle order; `t` holds the circle coordinate in [0, 1].
    pub fibers: Vec<StarfishFiber>,
    pub max_fiber_length: Rat,
    /// Largest single loop (component) length across all fibers.
    pub max_loop_length: Rat,
    /// max_fiber_length / (tripod max fiber length).
    pub length_ratio: f64,
    pub all_cycles: bool,
    /// Arc and digon counts of the junction fiber.
    pub center_arcs: usize,
    pub center_digons: usize,
    /// Largest per-component symmetric difference between consecutive
    /// fibers of the family.
    pub symdiff_max: Rat,
    /// Its bound, twice the largest loop length.
    pub symdiff_bound: Rat,
    pub proxy_ok: bool,
}

fn component_lengths(f: &StarfishFiber) -> Vec<Rat> {
    f.components
        .iter()
        .map(|c| c.iter().map(|&ei| f.edges[ei].2).sum())
        .collect()
}

/// Per-component symmetric-difference proxy between consecutive fibers:
/// components are matched greedily by shared edge length, and the largest
/// unshared length over all matched pairs is returned.
fn symdiff_proxy(f: &StarfishFiber, g: &StarfishFiber) -> Rat {
    let key = |e: &(usize, usize, Rat)| (e.0.min(e.1), e.0.max(e.1), e.2);
    let mut worst = Rat::zero();
    let fl = component_lengths(f);
    let gl = component_lengths(g);
    let mut used = vec![false; g.components.len()];
    for (ci, comp) in f.components.iter().enumerate() {
        let fset: Vec<_> = comp.iter().map(|&ei| key(&f.edges[ei])).collect();
        // best partner: the component sharing the most length
        let mut best: Option<(usize, Rat)> = None;
        for (cj, gcomp) in g.components.iter().enumerate() {
            if used[cj] {
                continue;
            }
            let shared: Rat = gcomp
                .iter()
                .map(|&ei| key(&g.edges[ei]))
                .filter(|k| fset.contains(k))
                .map(|k| k.2)
                .sum();
            if best.map_or(true, |(_, s)| shared > s) {
                best = Some((cj, shared));
            }
        }
        let diff = match best {
            Some((cj, shared)) => {
                used[cj] = true;
                fl[ci] + gl[cj] - rat_int(2) * shared
            }
            None => fl[ci],
        };
        worst = worst.max(diff);
    }
    for (cj, &l) in gl.iter().enumerate() {
        if !used[cj] {
            worst = worst.max(l);
        }
    }
    worst
}

/// Double the tripod into a hexapod: the theta-graph fiber over the
/// junction becomes three digons (each junction arc together with a
/// parallel push-off, lengths scaled by 1 -+ 1/20), so every fiber of the
/// new map is a 1-cycle. The fibers are listed along the circle obtained
/// by composing with the map collapsing one doubled leg's endpoints.
pub fn hexapodize(star: &Starfish) -> Result<Hexapod, SweepError> {
    let center = &star.fibers[0];
    if center.leg.is_some() || center.is_cycle {
        return Err(SweepError::Invalid(
            "input is not a starfish bundle: the junction fiber must be the theta-graph".into(),
        ));
    }
    // each junction arc and its push-off close up into a digon disjoint
    // from the others: every digon gets its own copies of all vertices
    let lo = rat(19, 20);
    let hi = rat(21, 20);
    let e = star.edge_len;
    let mut next_id = star.vertex_count;
    let mut fresh = |k: usize| -> Vec<usize> {
        let ids = (next_id..next_id + k).collect();
        next_id += k;
        ids
    };
    let mut digons = Vec::new();
    for arc in &star.junction_arcs {
        let near = fresh(arc.len());
        let far = fresh(arc.len() - 2);
        // the push-off shares the saddle copies, closing the circle
        for w in near.windows(2) {
            digons.push((w[0], w[1], e * lo));
        }
        let mut off = vec![near[0]];
        off.extend(&far);
        off.push(*near.last().unwrap());
        for w in off.windows(2) {
            digons.push((w[0], w[1], e * hi));
        }
    }
    let center_fiber = fiber_from_edges(None, rat(1, 2), digons);
    let center_arcs = 2 * star.junction_arcs.len();
    let center_digons = center_fiber.components.len();

    // circle order: out along leg 0, through the junction, back along leg 1
    let station = |leg: usize, s: usize| &star.fibers[1 + 3 * leg + s];
    let reclock = |f: &StarfishFiber, t: Rat| {
        let mut g = f.clone();
        g.t = t;
        g
    };
    let fibers = vec![
        reclock(station(0, 2), Rat::zero()),
        reclock(station(0, 1), rat(1, 6)),
        reclock(station(0, 0), rat(2, 6)),
        center_fiber,
        reclock(station(1, 0), rat(4, 6)),
        reclock(station(1, 1), rat(5, 6)),
        reclock(station(1, 2), rat_int(1)),
    ];

    let all_cycles = fibers.iter().all(|f| f.is_cycle);
    let max_fiber_length = fibers.iter().map(|f| f.total).max().unwrap();
    let max_loop_length = fibers
        .iter()
        .flat_map(component_lengths)
        .max()
        .unwrap_or_else(Rat::zero);
    let length_ratio = crate::rat::to_f64(max_fiber_length) / crate::rat::to_f64(star.max_fiber_length);
    let symdiff_bound = rat_int(2) * max_loop_length;
    let mut symdiff_max = Rat::zero();
    for w in fibers.windows(2) {
        symdiff_max = symdiff_max.max(symdiff_proxy(&w[0], &w[1]));
    }
    // the family closes up: the circle identifies the two apex stations
    symdiff_max = symdiff_max.max(symdiff_proxy(&fibers[fibers.len() - 1], &fibers[0]));
    let proxy_ok = symdiff_max <= symdiff_bound;

    Ok(Hexapod {
        resolution: star.resolution,
        fibers,
        max_fiber_length,
        max_loop_length,
        length_ratio,
        all_cycles,
        center_arcs,
        center_digons,
        symdiff_max,
        symdiff_bound,
        proxy_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn starfish_shape_and_fibers() {
        let star = make_starfish(rat_int(1), rat(1, 10), 6).unwrap();
        assert_eq!(star.vertex_count, 47);
        assert!(star.space.validate().is_ok());
        // junction fiber: a theta-graph
        let theta = &star.fibers[0];
        assert!(!theta.is_cycle);
        assert_eq!(theta.components.len(), 1);
        let mut deg: BTreeMap<usize, usize> = BTreeMap::new();
        for &(u, v, _) in &theta.edges {
            *deg.entry(u).or_insert(0) += 1;
            *deg.entry(v).or_insert(0) += 1;
        }
        assert_eq!(deg.values().filter(|&&c| c == 3).count(), 2);
        assert!(deg.values().all(|&c| c == 2 || c == 3));
        assert_eq!(theta.total, rat(3, 2) * star.circumference);
        // ray fibers: simple m-gon loops of one circumference
        for f in star.fibers.iter().filter(|f| f.leg.is_some() && !f.edges.is_empty()) {
            assert!(f.simple_loop);
            assert_eq!(f.total, star.circumference);
        }
        assert_eq!(star.max_ray_fiber, star.circumference);
        assert_eq!(star.max_fiber_length, rat(3, 2) * star.circumference);
    }

    #[test]
    fn ray_fibers_scale_with_radius() {
        let thin = make_starfish(rat_int(1), rat(1, 10), 6).unwrap();
        let fat = make_starfish(rat_int(1), rat(1, 5), 6).unwrap();
        assert_eq!(fat.max_ray_fiber, rat_int(2) * thin.max_ray_fiber);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            make_starfish(rat_int(1), rat_int(0), 6),
            Err(SweepError::Domain(_))
        ));
        assert!(matches!(
            make_starfish(rat_int(1), rat(1, 10), 2),
            Err(SweepError::Domain(_))
        ));
    }

    #[test]
    fn hexapod_turns_every_fiber_into_a_cycle() {
        let star = make_starfish(rat_int(1), rat(1, 10), 6).unwrap();
        let hex = hexapodize(&star).unwrap();
        assert!(hex.all_cycles);
        assert_eq!(hex.center_arcs, 6);
        assert_eq!(hex.center_digons, 3);
        // the doubled junction fiber is exactly twice the theta-graph
        assert!(hex.length_ratio >= 1.0 && hex.length_ratio <= 2.05);
        assert_eq!(hex.max_fiber_length, rat_int(3) * star.circumference);
        assert!(hex.proxy_ok);
    }
}
