//! On-disk JSON form of glued complexes.
//!
//! ```text
//! {
//!   "epsilon": "1/2",
//!   "charts": [
//!     { "grid": [["-1","-1/2","0","1/2","1"], ...],
//!       "cells": [ [["-1","1"],["-1","1"],["1","1"]], ... ] }
//!   ],
//!   "identifications": [
//!     { "a": [0, 1], "b": [1, 0], "perm": [0, 1], "signs": [1, -1] }
//!   ]
//! }
//! ```
//!
//! Rationals are written as `p/q` strings. Cells list generators; the face
//! closure is taken on load. A facet index 2*axis (resp. 2*axis + 1) names
//! the lower (resp. upper) bounding facet of the chart's cube on that axis.
//! `perm`/`signs` carry the remaining axes of chart `a` (ascending) onto the
//! remaining axes of chart `b` (ascending): target slot k reads source slot
//! perm[k] with sign signs[k]. Identifications that are not facet-to-facet
//! cube isometries (for instance cone-level gluings produced internally)
//! round-trip through the `general` form instead.
//!
//! OFF export: vertices with their first three coordinates (padded/truncated)
//! followed by the top cells as polygon-style index lists.

use crate::lattice::cell::CubicalCell;
use crate::lattice::complex::{
    AxisImage, Chart, ComplexError, FacetMap, GluedComplex, Identification,
};
use crate::lattice::grid::AxisGrid;
use crate::rat::{parse_rat, rat_str, to_f64, Rat};
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
pub struct ComplexJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    pub charts: Vec<ChartJson>,
    #[serde(default)]
    pub identifications: Vec<IdentJson>,
}

#[derive(Serialize, Deserialize)]
pub struct ChartJson {
    pub grid: Vec<Vec<String>>,
    pub cells: Vec<Vec<[String; 2]>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub enum IdentJson {
    Standard {
        a: (usize, usize),
        b: (usize, usize),
        perm: Vec<usize>,
        signs: Vec<i8>,
    },
    General {
        general: Identification,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum JsonError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Serde(#[from] serde_json::Error),
}

/// Bounding-cube facet of a chart: index 2*axis + (0 lower / 1 upper).
fn chart_facet(grid: &AxisGrid, chart: usize, index: usize) -> Result<CubicalCell, JsonError> {
    let d = grid.dim();
    let axis = index / 2;
    if axis >= d {
        return Err(JsonError::Parse(format!(
            "facet index {index} out of range for a {d}-dimensional chart"
        )));
    }
    let intervals = (0..d)
        .map(|ax| {
            let bp = &grid.axes[ax];
            let (lo, hi) = (bp[0], bp[bp.len() - 1]);
            if ax == axis {
                if index % 2 == 0 {
                    (lo, lo)
                } else {
                    (hi, hi)
                }
            } else {
                (lo, hi)
            }
        })
        .collect();
    Ok(CubicalCell::new(chart, intervals))
}

pub fn from_json(doc: &ComplexJson) -> Result<GluedComplex, JsonError> {
    let mut charts = Vec::new();
    for (ci, cj) in doc.charts.iter().enumerate() {
        let axes: Result<Vec<Vec<Rat>>, _> = cj
            .grid
            .iter()
            .map(|axis| axis.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>, _>>())
            .collect();
        let grid = AxisGrid {
            axes: axes.map_err(JsonError::Parse)?,
        };
        let mut chart = Chart::new(grid);
        for cell in &cj.cells {
            if cell.len() != chart.dim() {
                return Err(JsonError::Parse(format!(
                    "chart {ci}: cell arity {} does not match dimension {}",
                    cell.len(),
                    chart.dim()
                )));
            }
            let intervals: Result<Vec<(Rat, Rat)>, String> = cell
                .iter()
                .map(|[lo, hi]| Ok((parse_rat(lo)?, parse_rat(hi)?)))
                .collect();
            let intervals = intervals.map_err(JsonError::Parse)?;
            if intervals.iter().any(|(lo, hi)| lo > hi) {
                return Err(JsonError::Parse(format!(
                    "chart {ci}: interval with lo > hi"
                )));
            }
            chart.insert_closed(CubicalCell::new(ci, intervals));
        }
        charts.push(chart);
    }
    let mut identifications = Vec::new();
    for ij in &doc.identifications {
        match ij {
            IdentJson::General { general } => identifications.push(general.clone()),
            IdentJson::Standard { a, b, perm, signs } => {
                let (ca, fa) = *a;
                let (cb, fb) = *b;
                let grid_a = &charts
                    .get(ca)
                    .ok_or_else(|| JsonError::Parse(format!("chart {ca} missing")))?
                    .grid
                    .clone();
                let grid_b = &charts
                    .get(cb)
                    .ok_or_else(|| JsonError::Parse(format!("chart {cb} missing")))?
                    .grid
                    .clone();
                let facet_a = chart_facet(grid_a, ca, fa)?;
                let facet_b = chart_facet(grid_b, cb, fb)?;
                let free_a: Vec<usize> = (0..grid_a.dim()).filter(|&ax| ax != fa / 2).collect();
                let free_b: Vec<usize> = (0..grid_b.dim()).filter(|&ax| ax != fb / 2).collect();
                if perm.len() != free_a.len() || signs.len() != free_a.len() || free_a.len() != free_b.len() {
                    return Err(JsonError::Parse(
                        "perm/signs arity does not match the facet".into(),
                    ));
                }
                let mut out = vec![AxisImage::Fixed(Rat::from_integer(0)); grid_b.dim()];
                let pinned_b = fb / 2;
                out[pinned_b] = AxisImage::Fixed(facet_b.intervals[pinned_b].0);
                for (k, &tb) in free_b.iter().enumerate() {
                    let src = *perm.get(k).and_then(|&p| free_a.get(p)).ok_or_else(|| {
                        JsonError::Parse(format!("perm entry {k} out of range"))
                    })?;
                    out[tb] = AxisImage::Axis {
                        from: src,
                        sign: signs[k],
                    };
                }
                identifications.push(Identification {
                    chart_a: ca,
                    facet_a,
                    chart_b: cb,
                    facet_b,
                    map: FacetMap { out },
                });
            }
        }
    }
    let gc = GluedComplex {
        charts,
        identifications,
    };
    gc.validate()?;
    Ok(gc)
}

pub fn to_json(gc: &GluedComplex, epsilon: Option<Rat>) -> ComplexJson {
    let charts = gc
        .charts
        .iter()
        .map(|chart| ChartJson {
            grid: chart
                .grid
                .axes
                .iter()
                .map(|axis| axis.iter().map(|&v| rat_str(v)).collect())
                .collect(),
            cells: chart
                .cells
                .iter()
                .map(|c| {
                    c.intervals
                        .iter()
                        .map(|&(lo, hi)| [rat_str(lo), rat_str(hi)])
                        .collect()
                })
                .collect(),
        })
        .collect();
    let identifications = gc
        .identifications
        .iter()
        .map(|id| IdentJson::General {
            general: id.clone(),
        })
        .collect();
    ComplexJson {
        epsilon: epsilon.map(rat_str),
        charts,
        identifications,
    }
}

pub fn read_complex(path: &std::path::Path) -> Result<GluedComplex, JsonError> {
    let text = std::fs::read_to_string(path)?;
    let doc: ComplexJson = serde_json::from_str(&text)?;
    from_json(&doc)
}

pub fn write_complex(
    path: &std::path::Path,
    gc: &GluedComplex,
    epsilon: Option<Rat>,
) -> Result<(), JsonError> {
    let doc = to_json(gc, epsilon);
    std::fs::write(path, serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}

/// Geometry export: vertices (first three coordinates) plus top cells as
/// vertex-index polygons. 1-complexes come out as segment lists.
pub fn to_off(gc: &GluedComplex) -> Result<String, ComplexError> {
    let g = gc.global()?;
    let dim = g.top_dim();
    // global vertex positions: representative coordinates
    let nverts = g.count(0);
    let mut pos: Vec<[f64; 3]> = vec![[0.0; 3]; nverts];
    for (vi, v) in g.cells[0].iter().enumerate() {
        let p = v.rep.point();
        for (k, slot) in pos[vi].iter_mut().enumerate() {
            *slot = p.get(k).map(|&r| to_f64(r)).unwrap_or(0.0);
        }
    }
    let mut faces: Vec<Vec<usize>> = Vec::new();
    for top in &g.cells[dim] {
        let mut idx: Vec<usize> = Vec::new();
        let verts = top.rep.vertices();
        // order squares as a polygon loop (swap the last two corners)
        let order: Vec<usize> = match verts.len() {
            4 => vec![0, 1, 3, 2],
            _ => (0..verts.len()).collect(),
        };
        for &o in &order {
            let (_, vi) = g.locate(&verts[o]).expect("vertex located");
            idx.push(vi);
        }
        faces.push(idx);
    }
    let mut s = String::from("OFF\n");
    s.push_str(&format!("{} {} 0\n", nverts, faces.len()));
    for p in &pos {
        s.push_str(&format!("{} {} {}\n", p[0], p[1], p[2]));
    }
    for f in &faces {
        s.push_str(&f.len().to_string());
        for i in f {
            s.push_str(&format!(" {i}"));
        }
        s.push('\n');
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::samples;
    use crate::rat::rat;

    #[test]
    fn roundtrip_klein_bottle() {
        let kb = samples::klein_bottle();
        let doc = to_json(&kb, Some(rat(1, 2)));
        let text = serde_json::to_string(&doc).unwrap();
        let doc2: ComplexJson = serde_json::from_str(&text).unwrap();
        let kb2 = from_json(&doc2).unwrap();
        assert_eq!(
            kb.global().unwrap().total(),
            kb2.global().unwrap().total()
        );
    }

    #[test]
    fn standard_identification_parses() {
        // two unit cubes glued along a facet
        let text = r#"{
          "charts": [
            { "grid": [["-1","0","1"],["-1","0","1"],["-1","0","1"]],
              "cells": [[["-1","1"],["-1","1"],["-1","1"]]] },
            { "grid": [["-1","0","1"],["-1","0","1"],["-1","0","1"]],
              "cells": [[["-1","1"],["-1","1"],["-1","1"]]] }
          ],
          "identifications": [
            { "a": [0, 1], "b": [1, 0], "perm": [0, 1], "signs": [1, 1] }
          ]
        }"#;
        let doc: ComplexJson = serde_json::from_str(text).unwrap();
        let gc = from_json(&doc).unwrap();
        let g = gc.global().unwrap();
        // 8 + 8 vertices, 4 shared
        assert_eq!(g.count(0), 12);
        assert_eq!(g.count(3), 2);
    }

    #[test]
    fn bad_perm_rejected() {
        let text = r#"{
          "charts": [
            { "grid": [["-1","0","1"],["-1","0","1"]], "cells": [[["-1","1"],["-1","1"]]] }
          ],
          "identifications": [
            { "a": [0, 0], "b": [0, 1], "perm": [3], "signs": [1] }
          ]
        }"#;
        let doc: ComplexJson = serde_json::from_str(text).unwrap();
        assert!(from_json(&doc).is_err());
    }
}
