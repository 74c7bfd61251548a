//! Small reference complexes used across tests and the audit command.

use crate::homology::linalg::{Z2Matrix, ZMatrix};
use crate::homology::ChainComplexData;
use crate::lattice::cell::CubicalCell;
use crate::lattice::complex::{AxisImage, Chart, FacetMap, GluedComplex, Identification};
use crate::lattice::grid::AxisGrid;
use crate::rat::{rat, rat_int, Rat};

/// Octahedron 2-sphere as a simplicial chain complex.
/// Vertices 0..3 form the equator (in cyclic order), 4 is the north pole,
/// 5 the south pole.
pub fn octahedron() -> ChainComplexData {
    let vertices = 6usize;
    // edges as ordered (i, j) with i < j
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for i in 0..4 {
        let j = (i + 1) % 4;
        edges.push((i.min(j), i.max(j)));
    }
    for i in 0..4 {
        edges.push((i, 4));
        edges.push((i, 5));
    }
    edges.sort_unstable();
    edges.dedup();
    let eidx = |a: usize, b: usize| -> usize {
        let (a, b) = (a.min(b), a.max(b));
        edges.iter().position(|&e| e == (a, b)).unwrap()
    };
    let mut triangles: Vec<[usize; 3]> = Vec::new();
    for i in 0..4 {
        let j = (i + 1) % 4;
        for pole in [4, 5] {
            let mut t = [i, j, pole];
            t.sort_unstable();
            triangles.push(t);
        }
    }
    triangles.sort_unstable();

    let mut b1 = ZMatrix {
        rows: vertices,
        cols: Vec::new(),
    };
    for &(a, b) in &edges {
        b1.cols.push(vec![(a, -1), (b, 1)]);
    }
    let mut b2 = ZMatrix {
        rows: edges.len(),
        cols: Vec::new(),
    };
    for t in &triangles {
        let [a, b, c] = *t;
        b2.cols.push(vec![
            (eidx(b, c), 1),
            (eidx(a, c), -1),
            (eidx(a, b), 1),
        ]);
    }
    let z2 = |m: &ZMatrix| Z2Matrix {
        rows: m.rows,
        cols: m
            .cols
            .iter()
            .map(|col| {
                let mut v: Vec<usize> = col.iter().map(|&(i, _)| i).collect();
                v.sort_unstable();
                v
            })
            .collect(),
    };
    ChainComplexData {
        counts: vec![vertices, edges.len(), triangles.len()],
        bnd: vec![
            Z2Matrix {
                rows: 0,
                cols: vec![Vec::new(); vertices],
            },
            z2(&b1),
            z2(&b2),
        ],
        bnd_z: vec![
            Some(ZMatrix {
                rows: 0,
                cols: vec![Vec::new(); vertices],
            }),
            Some(b1),
            Some(b2),
        ],
    }
}

/// Support of the equatorial 4-cycle in the octahedron's edge indexing.
pub fn octahedron_equator() -> Vec<usize> {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for i in 0..4 {
        let j = (i + 1) % 4;
        edges.push((i.min(j), i.max(j)));
    }
    for i in 0..4 {
        edges.push((i, 4));
        edges.push((i, 5));
    }
    edges.sort_unstable();
    edges.dedup();
    let mut out: Vec<usize> = (0..4)
        .map(|i| {
            let j = (i + 1) % 4;
            let (a, b) = (i.min(j), i.max(j));
            edges.iter().position(|&e| e == (a, b)).unwrap()
        })
        .collect();
    out.sort_unstable();
    out
}

/// Klein bottle glued from a single square chart: the vertical sides are
/// identified straight, the horizontal sides with a flip. The grid is fine
/// enough that vertex classes separate all cells.
pub fn klein_bottle() -> GluedComplex {
    let grid = AxisGrid::standard(2, rat(1, 2));
    let mut chart = Chart::new(grid);
    let bp = [rat_int(-1), rat(-1, 2), rat_int(0), rat(1, 2), rat_int(1)];
    for i in 0..4 {
        for j in 0..4 {
            chart.insert_closed(CubicalCell::new(
                0,
                vec![(bp[i], bp[i + 1]), (bp[j], bp[j + 1])],
            ));
        }
    }
    let side = |x: i64| CubicalCell::new(0, vec![(rat_int(x), rat_int(x)), (rat_int(-1), rat_int(1))]);
    let cap = |y: i64| CubicalCell::new(0, vec![(rat_int(-1), rat_int(1)), (rat_int(y), rat_int(y))]);
    let ids = vec![
        // (-1, y) ~ (1, y)
        Identification {
            chart_a: 0,
            facet_a: side(-1),
            chart_b: 0,
            facet_b: side(1),
            map: FacetMap {
                out: vec![
                    AxisImage::Fixed(rat_int(1)),
                    AxisImage::Axis { from: 1, sign: 1 },
                ],
            },
        },
        // (x, 1) ~ (-x, -1)
        Identification {
            chart_a: 0,
            facet_a: cap(1),
            chart_b: 0,
            facet_b: cap(-1),
            map: FacetMap {
                out: vec![
                    AxisImage::Axis { from: 0, sign: -1 },
                    AxisImage::Fixed(rat_int(-1)),
                ],
            },
        },
    ];
    GluedComplex {
        charts: vec![chart],
        identifications: ids,
    }
}

/// Flat annulus: a square frame of 12 unit squares inside one chart.
pub fn annulus() -> GluedComplex {
    let grid = AxisGrid::standard(2, rat(1, 2));
    let mut chart = Chart::new(grid);
    let bp = [rat_int(-1), rat(-1, 2), rat_int(0), rat(1, 2), rat_int(1)];
    for i in 0..4 {
        for j in 0..4 {
            // skip the four central squares
            if (1..=2).contains(&i) && (1..=2).contains(&j) {
                continue;
            }
            chart.insert_closed(CubicalCell::new(
                0,
                vec![(bp[i], bp[i + 1]), (bp[j], bp[j + 1])],
            ));
        }
    }
    GluedComplex {
        charts: vec![chart],
        identifications: Vec::new(),
    }
}

/// The cube [-1,1]^d with its face closure as a single-chart complex on the
/// grid {-1, -eps, 0, eps, 1}.
pub fn solid_cube(d: usize, eps: Rat) -> GluedComplex {
    let grid = AxisGrid::standard(d, eps);
    let mut chart = Chart::new(grid);
    chart.insert_closed(CubicalCell::new(0, vec![(rat_int(-1), rat_int(1)); d]));
    GluedComplex {
        charts: vec![chart],
        identifications: Vec::new(),
    }
}

/// Boundary sphere of the d-cube (all proper faces of [-1,1]^d).
pub fn cube_boundary(d: usize, eps: Rat) -> GluedComplex {
    let grid = AxisGrid::standard(d, eps);
    let mut chart = Chart::new(grid);
    let top = CubicalCell::new(0, vec![(rat_int(-1), rat_int(1)); d]);
    for (f, _) in top.facets_signed() {
        chart.insert_closed(f);
    }
    GluedComplex {
        charts: vec![chart],
        identifications: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::{homology, Ring};

    #[test]
    fn klein_bottle_homology() {
        let kb = klein_bottle();
        kb.validate().unwrap();
        let data = ChainComplexData::from_glued(&kb).unwrap();
        let h1 = homology(&data, 1, Ring::Z);
        assert_eq!(h1.rank, 1);
        assert_eq!(h1.torsion, vec![2]);
        let h2 = homology(&data, 2, Ring::Z);
        assert_eq!(h2.rank, 0);
        let h2m2 = homology(&data, 2, Ring::Z2);
        assert_eq!(h2m2.rank, 1); // mod-2 fundamental class
    }

    #[test]
    fn annulus_homology() {
        let data = ChainComplexData::from_glued(&annulus()).unwrap();
        assert_eq!(homology(&data, 0, Ring::Z).rank, 1);
        assert_eq!(homology(&data, 1, Ring::Z).rank, 1);
        assert_eq!(homology(&data, 2, Ring::Z).rank, 0);
    }

    #[test]
    fn cube_boundary_is_a_sphere() {
        let data = ChainComplexData::from_glued(&cube_boundary(3, rat(1, 2))).unwrap();
        assert_eq!(homology(&data, 0, Ring::Z).rank, 1);
        assert_eq!(homology(&data, 1, Ring::Z).rank, 0);
        assert_eq!(homology(&data, 2, Ring::Z).rank, 1);
    }
}
