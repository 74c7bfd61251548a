//! Acceptance suite: one test (and one printed pass/fail line) per release
//! criterion, with pinned tolerances and runtime budgets.

use num_traits::Zero;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use sweepout_forge::decomp::{
    build_decomposition, edge_count, fiber_is_cube_skeleton, generic_sample, theta_fiber,
};
use sweepout_forge::filling::{
    check_boundary_commutation, check_volume_bounds, cube_face_count, fh_profile, min_filling,
    r_transform, ChainWeighting, ModelMap,
};
use sweepout_forge::fillrad::{
    cycle_space, fillrad_estimate, icosahedron_space, inequality_audit, octahedron_space,
    SweepSurrogates,
};
use sweepout_forge::homology::samples::{annulus, octahedron, octahedron_equator, solid_cube};
use sweepout_forge::homology::{linalg::symm_diff, ChainComplexData};
use sweepout_forge::lattice::cell::CubicalCell;
use sweepout_forge::lattice::complex::{Chart, GluedComplex};
use sweepout_forge::lattice::grid::AxisGrid;
use sweepout_forge::rat::{rat, rat_int, to_f64, Rat};
use sweepout_forge::sweepout::{
    boundary_pairing, build_bundle, hbar_fiber, homology_audit, make_starfish, hexapodize,
    waist_upper_bound, BuildOptions,
};
use sweepout_forge::sweepout::input::{two_cube_filling, unit_cube_filling};

fn verdict(number: usize, name: &str, pass: bool) {
    println!(
        "criterion {number}: {} - {name}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {number} failed: {name}");
}

#[test]
fn criterion_01_y_validates_for_all_profiles() {
    let start = Instant::now();
    let mut ok = true;
    for n in 1..=4usize {
        for p in 1..=n {
            let ds = build_decomposition(n, p, rat(1, 2)).unwrap();
            let rep = ds.validate_y().unwrap();
            ok &= rep.pseudomanifold.is_pseudomanifold && rep.boundary_in_cube_boundary;
        }
    }
    ok &= start.elapsed() < Duration::from_secs(60);
    verdict(1, "Y is a pseudomanifold with boundary in the cube boundary for n <= 4, p <= n, under 60 s", ok);
}

#[test]
fn criterion_02_fibers_are_cube_skeletons() {
    let mut ok = true;
    for n in 1..=4usize {
        for p in 1..=n {
            let ds = build_decomposition(n, p, rat(1, 2)).unwrap();
            let mut max_edges = 0usize;
            let mut center_edges = 0usize;
            for cell in &ds.z.charts[0].cells {
                let z = generic_sample(cell);
                let k = z.iter().filter(|v| v.is_zero()).count();
                let fiber = theta_fiber(p, ds.eps, &z).unwrap();
                ok &= fiber_is_cube_skeleton(&fiber, k, p);
                if p == 1 {
                    let e = edge_count(&fiber);
                    max_edges = max_edges.max(e);
                    if z.iter().all(|v| v.is_zero()) {
                        center_edges = e;
                    }
                }
            }
            if p == 1 {
                let bound = (n + 1) * (1 << n);
                ok &= center_edges == bound && max_edges == bound;
            }
        }
    }
    verdict(2, "theta fibers are p-skeletons of cubes; p=1 edge count peaks at (n+1)*2^n exactly at the center", ok);
}

#[test]
fn criterion_03_face_count_constant() {
    let binom = |n: usize, k: usize| -> usize {
        (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
    };
    let mut ok = true;
    for n in 1..=5usize {
        for p in 1..=n {
            ok &= cube_face_count(n, p) == (1usize << (n - p + 1)) * binom(n + 1, p);
        }
    }
    verdict(3, "enumerated p-face count of the (n+1)-cube equals 2^(n-p+1) C(n+1,p) for n <= 5", ok);
}

#[test]
fn criterion_04_sweepout_bundles() {
    let mut ok = true;
    for input in [unit_cube_filling(2), two_cube_filling(2)] {
        let start = Instant::now();
        let bundle = build_bundle(&input, &BuildOptions::default()).unwrap();
        let waist = waist_upper_bound(&bundle).unwrap();
        let audit = homology_audit(&bundle).unwrap();
        ok &= bundle.orientation.is_some();
        ok &= waist.within_bound && waist.waist == waist.bound; // unit metric attains equality
        ok &= audit.n_is_cycle
            && audit.boundary_is_cycle
            && audit.boundary_matches
            && audit.homologous;
        ok &= start.elapsed() < Duration::from_secs(30);
    }
    verdict(4, "N is closed, homologous to the boundary with exact witness, and the waist bound (n+1)2^n delta is attained, under 30 s each", ok);
}

#[test]
fn criterion_05_hbar_fiber_suite() {
    let bundle = build_bundle(&unit_cube_filling(2), &BuildOptions::default()).unwrap();
    let four_delta = rat_int(4) * bundle.delta;
    let mut ok = true;
    let mut counts = Vec::new();
    for i in 1..=10i64 {
        let hb = hbar_fiber(&bundle, &[rat(i, 11)]).unwrap();
        counts.push(hb.enumerated);
        ok &= hb.edge_disjoint;
        for l in &hb.loops {
            ok &= l.simple && l.length <= four_delta;
        }
        // the closed-form count is reported alongside; enumeration is the
        // oracle and a mismatch only sets the flag
        ok &= hb.formula_count > 0;
    }
    ok &= counts.windows(2).all(|w| w[0] == w[1]);
    verdict(5, "10 generic samples give identical counts of edge-disjoint simple loops, each within 4 delta", ok);
}

#[test]
fn criterion_06_boundary_pairing() {
    let c3 = build_bundle(&unit_cube_filling(2), &BuildOptions::default()).unwrap();
    let c4 = build_bundle(&unit_cube_filling(3), &BuildOptions::default()).unwrap();
    let mut ok = true;
    // endpoint collapse, vanishing-coordinate and equal-coordinate geometries
    for x0 in [vec![rat_int(1)], vec![rat_int(0)]] {
        ok &= boundary_pairing(&c3, &x0).unwrap().all_zero;
    }
    for x0 in [
        vec![rat(1, 3), rat_int(1)],
        vec![rat_int(0), rat(1, 2)],
        vec![rat(1, 3), rat(1, 3)],
    ] {
        ok &= boundary_pairing(&c4, &x0).unwrap().all_zero;
    }
    verdict(6, "signed limit loops sum to the zero Z-chain at 5 boundary samples covering all pairing geometries", ok);
}

#[test]
fn criterion_07_filling_radius() {
    let start = Instant::now();
    let mut ok = true;
    for m in [6usize, 9, 12] {
        for circ in [rat_int(1), rat(5, 2)] {
            let (est, _) = fillrad_estimate(&cycle_space(m, circ), 1).unwrap();
            ok &= est == circ / rat_int(6);
        }
    }
    let (est, _) = fillrad_estimate(&icosahedron_space(), 2).unwrap();
    let reference = 0.5 * (-1.0f64 / 3.0).acos();
    ok &= (to_f64(est) - reference).abs() <= 0.2 * reference;
    ok &= start.elapsed() < Duration::from_secs(120);
    verdict(7, "fillrad is L/6 exactly on C6/C9/C12 and within 20% of arccos(-1/3)/2 on the icosahedral sample, under 120 s", ok);
}

#[test]
fn criterion_08_inequality_audits() {
    let mut ok = true;
    // circle graphs: interval-sweep surrogates W = L, UW = L/2. Even
    // multiples of 3 keep the sample diameter at L/2 and the estimate at
    // L/6, so the diam/3 clause passes with exact equality.
    for m in [6usize, 12, 18] {
        let space = cycle_space(m, rat_int(1));
        let s = SweepSurrogates {
            w_upper: Some(1.0),
            uw_upper: Some(0.5),
        };
        ok &= inequality_audit(&space, 1, s, 1e-9).unwrap().all_passed;
    }
    // octahedron: latitude-map surrogates (equator circle of length 2 pi,
    // diameter pi). The UW/W clauses pass; the diam/3 clause cannot hold on
    // this 6-point sample because every killing tetrahedron of its flag
    // complex contains an antipodal pair, forcing death = diameter and
    // estimate = diam/2 exactly. Pin that artifact rather than hide it.
    let s = SweepSurrogates {
        w_upper: Some(2.0 * std::f64::consts::PI),
        uw_upper: Some(std::f64::consts::PI),
    };
    let oct_space = octahedron_space();
    let oct = inequality_audit(&oct_space, 2, s, 1e-9).unwrap();
    for clause in &oct.clauses {
        if clause.name == "fillrad <= diam/3" {
            ok &= !clause.pass;
            let (est, _) = fillrad_estimate(&oct_space, 2).unwrap();
            ok &= est == oct_space.diameter() / rat_int(2);
        } else {
            ok &= clause.pass;
        }
    }
    // dense sphere sample (12 icosahedral points): the full audit passes,
    // including the diam/3 clause
    let s = SweepSurrogates {
        w_upper: Some(2.0 * std::f64::consts::PI),
        uw_upper: Some(std::f64::consts::PI),
    };
    ok &= inequality_audit(&icosahedron_space(), 2, s, 1e-9)
        .unwrap()
        .all_passed;
    // starfish: tripod-map surrogates
    let star = make_starfish(rat_int(1), rat(1, 2), 6).unwrap();
    let s = SweepSurrogates {
        w_upper: Some(to_f64(star.max_fiber_length)),
        uw_upper: Some(to_f64(star.max_fiber_diameter)),
    };
    ok &= inequality_audit(&star.space, 2, s, 1e-9).unwrap().all_passed;
    verdict(8, "audits pass on circles, sphere samples and starfish; the 6-point octahedron's diam/3 clause fails by the pinned death = diameter artifact", ok);
}

/// Minimum filling weight by exhausting every (k+1)-chain.
fn brute_min_filling(
    data: &ChainComplexData,
    k: usize,
    cycle: &[usize],
    weights: &ChainWeighting,
) -> Option<Rat> {
    let n = data.counts[k + 1];
    assert!(n <= 20, "oracle only for small complexes");
    let mut best: Option<Rat> = None;
    for mask in 0u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        if data.boundary_z2(k + 1, &support) != cycle {
            continue;
        }
        let w = weights.weight(k + 1, &support);
        if best.map_or(true, |b| w < b) {
            best = Some(w);
        }
    }
    best
}

#[test]
fn criterion_09_homological_filling() {
    let data = octahedron();
    let weights = ChainWeighting::unit(&data);
    let mut ok = true;

    // equator: weight 4, matching the oracle
    let eq = octahedron_equator();
    let fill = min_filling(&data, 1, &eq, &weights).unwrap().unwrap();
    ok &= fill.weight == rat_int(4) && fill.exact;
    ok &= brute_min_filling(&data, 1, &eq, &weights) == Some(rat_int(4));

    // every kernel cycle agrees with the brute-force oracle (the solution
    // space has dimension well under 12 here)
    let kernel = data.bnd[1].reduce().kernel_basis();
    for cycle in &kernel {
        let here = min_filling(&data, 1, cycle, &weights)
            .unwrap()
            .map(|f| f.weight);
        ok &= here == brute_min_filling(&data, 1, cycle, &weights);
    }

    // FH table nondecreasing
    let grid: Vec<Rat> = (0..=8).map(rat_int).collect();
    let table = fh_profile(&data, 1, &grid, &weights).unwrap();
    ok &= table
        .entries
        .windows(2)
        .all(|w| w[0].value <= w[1].value);

    // annulus core cycle does not bound
    let ann = ChainComplexData::from_glued(&annulus()).unwrap();
    let aw = ChainWeighting::unit(&ann);
    let core: Vec<Vec<usize>> = ann.bnd[1].reduce().kernel_basis();
    let infinite = core
        .iter()
        .any(|c| min_filling(&ann, 1, c, &aw).unwrap().is_none());
    ok &= infinite;

    verdict(9, "min_filling matches the exhaustive oracle, equator fills with weight 4, FH is nondecreasing, annulus core is infinite", ok);
}

/// A model complex projecting onto the first three axes of the solid cube.
fn projected_model(
    top_cells: Vec<CubicalCell>,
    ambient_gc: &GluedComplex,
) -> (ModelMap, ChainComplexData) {
    let g = ambient_gc.global().unwrap();
    let mut chart = Chart::new(AxisGrid::standard(4, rat(1, 2)));
    for c in top_cells {
        chart.insert_closed(c);
    }
    let model = GluedComplex {
        charts: vec![chart],
        identifications: Vec::new(),
    };
    let mut vertex_images = BTreeMap::new();
    let mut edge_images = BTreeMap::new();
    for cell in &model.charts[0].cells {
        let proj: Vec<(Rat, Rat)> = cell.intervals[..3].to_vec();
        match cell.dim() {
            0 => {
                let pt: Vec<Rat> = proj.iter().map(|&(lo, _)| lo).collect();
                vertex_images.insert(cell.clone(), g.vertex_class(0, &pt).unwrap());
            }
            1 => {
                if proj.iter().all(|&(lo, hi)| lo == hi) {
                    edge_images.insert(cell.clone(), Vec::new());
                } else {
                    let target = CubicalCell::new(0, proj);
                    let (d, idx) = g.locate(&target).unwrap();
                    assert_eq!(d, 1);
                    edge_images.insert(cell.clone(), vec![idx]);
                }
            }
            _ => {}
        }
    }
    let data = ChainComplexData::from_glued(ambient_gc).unwrap();
    (
        ModelMap {
            model,
            vertex_images,
            edge_images,
        },
        data,
    )
}

#[test]
fn criterion_10_r_transform_laws() {
    let start = Instant::now();
    let m1 = rat_int(-1);
    let p1 = rat_int(1);
    let square = CubicalCell::new(0, vec![(m1, p1), (m1, p1), (m1, m1), (m1, m1)]);
    let cube = CubicalCell::new(
        0,
        vec![(m1, p1), (m1, p1), (m1, p1), (m1, m1)],
    );
    let fourcube = CubicalCell::new(0, vec![(m1, p1); 4]);

    let ambient = solid_cube(3, rat(1, 2));
    let mut ok = true;
    let mut results = Vec::new();
    for tops in [vec![square], vec![cube.clone()], vec![fourcube]] {
        let (mm, data) = projected_model(tops, &ambient);
        let weights = ChainWeighting::unit(&data);
        let res = r_transform(&mm, &data, &weights, None).unwrap();
        ok &= check_boundary_commutation(&mm, &res, &data);
        ok &= check_volume_bounds(&res, &data, &weights, rat(1, 1_000_000)).unwrap();
        // triviality: re-feeding the result reproduces it byte-identically
        let again = r_transform(&mm, &data, &weights, Some(&res)).unwrap();
        ok &= serde_json::to_string(&again).unwrap() == serde_json::to_string(&res).unwrap();
        results.push(res);
    }
    // coherence across nested models
    for window in results.windows(2) {
        for (cell, a) in &window[0].assignments {
            ok &= window[1].assignments.get(cell) == Some(a);
        }
    }
    // boundary decomposition of the cube model's chain
    let data = ChainComplexData::from_glued(&ambient).unwrap();
    let a = results[1].get(&cube).unwrap();
    let mut facets: Vec<usize> = Vec::new();
    for (f, _) in cube.facets_signed() {
        facets = symm_diff(&facets, &results[1].get(&f).unwrap().support);
    }
    ok &= data.boundary_z2(3, &a.support) == facets;
    ok &= start.elapsed() < Duration::from_secs(60);
    verdict(10, "R-transformation satisfies triviality, coherence, boundary commutation and the volume bounds, under 60 s", ok);
}

#[test]
fn criterion_11_starfish_hexapod() {
    let star = make_starfish(rat_int(1), rat(1, 2), 6).unwrap();
    let hex = hexapodize(&star).unwrap();
    let mut ok = hex.all_cycles;
    ok &= hex.length_ratio >= 1.0 && hex.length_ratio <= 2.0 * 1.05;
    ok &= hex.center_arcs == 6 && hex.center_digons == 3;
    ok &= hex.proxy_ok; // symdiff_max <= 2 * max loop length
    verdict(11, "all hexapod fibers are 1-cycles, max length within 2x (5% tolerance), symmetric-difference proxy within 2x max loop", ok);
}
