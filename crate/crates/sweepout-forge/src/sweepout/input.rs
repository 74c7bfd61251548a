//! Filling inputs: a cubical pseudomanifold-with-boundary P, a finite metric
//! sample of the manifold carried by ∂P, and images in that sample for every
//! vertex of P.
//!
//! Charts of P are required to carry exactly one top cell, the full cube
//! `[-1,1]^{n+1}`; subdivided fillings must be presented one cube per chart.
//! The on-disk form extends complex.json with a metric block and a vertex
//! image table:
//!
//! ```text
//! { ...complex.json fields...,
//!   "metric": { "points": 8, "distances": [["0","1",...], ...] },
//!   "vertex_images": { "0:-1,-1,-1": 0, "0:-1,-1,1": 1, ... },
//!   "nu": "1/2" }
//! ```
//!
//! Keys of `vertex_images` are `chart:coordinates`; every vertex class of P
//! must be covered (classes merged by identifications may be named through
//! any representative).

use crate::fillrad::{FiniteMetricSpace, MetricError};
use crate::lattice::complex::{ComplexError, GluedComplex};
use crate::lattice::json::{self, ComplexJson, JsonError};
use crate::rat::{parse_rat, rat, rat_str, Rat};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Json(#[from] JsonError),
    #[error("chart {chart}: {reason}")]
    BadChart { chart: usize, reason: String },
    #[error("P is not a pseudomanifold with boundary: {0}")]
    NotPseudomanifold(String),
    #[error("subdivision required: the top cell of chart {chart} has {faces} boundary faces")]
    SubdivisionRequired { chart: usize, faces: usize },
    #[error("no image point for vertex {0}")]
    MissingVertexImage(String),
    #[error("vertex image index {index} outside the {points}-point metric space")]
    ImageRange { index: usize, points: usize },
    #[error("N admits no coherent orientation; signed fiber data unavailable")]
    NotOrientable,
    #[error("parameter is not generic: {0}")]
    NotGeneric(String),
    #[error("point lies outside its domain: {0}")]
    Domain(String),
    #[error("{0}")]
    Invalid(String),
}

/// The data of a filling: P, the metric sample, vertex images and the
/// neighborhood-radius bookkeeping value ν (reported, never enforced).
#[derive(Clone, Debug)]
pub struct FillingInput {
    pub complex: GluedComplex,
    pub metric: FiniteMetricSpace,
    /// global vertex class of P -> point index in `metric`
    pub vertex_images: BTreeMap<usize, usize>,
    pub nu: Rat,
}

impl FillingInput {
    /// Dimension n of the boundary manifold (P is (n+1)-dimensional).
    pub fn boundary_dim(&self) -> usize {
        self.complex.top_dim().saturating_sub(1)
    }

    /// Structural validation: P well-formed with one full-cube top cell per
    /// chart, metric valid, every vertex class covered by an in-range image.
    pub fn validate(&self) -> Result<(), SweepError> {
        self.complex.validate()?;
        self.metric.validate()?;
        let d = self.complex.top_dim();
        if d < 2 {
            return Err(SweepError::Invalid(format!(
                "P must be at least 2-dimensional (top dimension {d})"
            )));
        }
        for (ci, chart) in self.complex.charts.iter().enumerate() {
            let tops: Vec<_> = chart.cells.iter().filter(|c| c.dim() == d).collect();
            if tops.len() != 1 {
                return Err(SweepError::BadChart {
                    chart: ci,
                    reason: format!("expected exactly one top cell, found {}", tops.len()),
                });
            }
            let one = rat(1, 1);
            if tops[0].intervals.iter().any(|&(lo, hi)| lo != -one || hi != one) {
                return Err(SweepError::BadChart {
                    chart: ci,
                    reason: "top cell is not the full cube [-1,1]^d".into(),
                });
            }
        }
        let g = self.complex.global()?;
        for class in 0..g.vertex_class_count {
            match self.vertex_images.get(&class) {
                None => {
                    return Err(SweepError::MissingVertexImage(format!(
                        "class {class}"
                    )))
                }
                Some(&idx) if idx >= self.metric.len() => {
                    return Err(SweepError::ImageRange {
                        index: idx,
                        points: self.metric.len(),
                    })
                }
                _ => {}
            }
        }
        if self.nu < Rat::zero() {
            return Err(SweepError::Invalid("nu must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn from_json_str(text: &str) -> Result<Self, SweepError> {
        let doc: FillingJson =
            serde_json::from_str(text).map_err(|e| SweepError::Invalid(format!("parse error: {e}")))?;
        let complex = json::from_json(&ComplexJson {
            epsilon: doc.epsilon.clone(),
            charts: doc.charts,
            identifications: doc.identifications,
        })?;
        let dist: Result<Vec<Vec<Rat>>, String> = doc
            .metric
            .distances
            .iter()
            .map(|row| row.iter().map(|s| parse_rat(s)).collect())
            .collect();
        let metric = FiniteMetricSpace::new(dist.map_err(SweepError::Invalid)?)?;
        if metric.len() != doc.metric.points {
            return Err(SweepError::Invalid(format!(
                "metric block claims {} points but carries {}",
                doc.metric.points,
                metric.len()
            )));
        }
        let g = complex.global()?;
        let mut vertex_images = BTreeMap::new();
        for (key, &idx) in &doc.vertex_images {
            let (chart, coords) = parse_vertex_key(key)?;
            let class = g
                .vertex_class(chart, &coords)
                .ok_or_else(|| SweepError::Invalid(format!("vertex key {key} names no vertex of P")))?;
            if let Some(&old) = vertex_images.get(&class) {
                if old != idx {
                    return Err(SweepError::Invalid(format!(
                        "vertex key {key} conflicts with an earlier image for its class"
                    )));
                }
            }
            vertex_images.insert(class, idx);
        }
        let nu = match &doc.nu {
            Some(s) => parse_rat(s).map_err(SweepError::Invalid)?,
            None => Rat::zero(),
        };
        let input = FillingInput {
            complex,
            metric,
            vertex_images,
            nu,
        };
        input.validate()?;
        Ok(input)
    }

    pub fn to_json_string(&self) -> Result<String, SweepError> {
        let base = json::to_json(&self.complex, None);
        let g = self.complex.global()?;
        let mut vertex_images = BTreeMap::new();
        for v in &g.cells[0] {
            let class = g
                .vertex_class(v.rep.chart, &v.rep.point())
                .expect("vertex class of a representative");
            let key = format!(
                "{}:{}",
                v.rep.chart,
                v.rep
                    .point()
                    .iter()
                    .map(|&c| rat_str(c))
                    .collect::<Vec<_>>()
                    .join(",")
            );
            vertex_images.insert(key, self.vertex_images[&class]);
        }
        let doc = FillingJson {
            epsilon: base.epsilon,
            charts: base.charts,
            identifications: base.identifications,
            metric: MetricJson {
                points: self.metric.len(),
                distances: self
                    .metric
                    .dist
                    .iter()
                    .map(|row| row.iter().map(|&v| rat_str(v)).collect())
                    .collect(),
            },
            vertex_images,
            nu: Some(rat_str(self.nu)),
        };
        serde_json::to_string_pretty(&doc).map_err(|e| SweepError::Invalid(e.to_string()))
    }
}

fn parse_vertex_key(key: &str) -> Result<(usize, Vec<Rat>), SweepError> {
    let (chart, rest) = key
        .split_once(':')
        .ok_or_else(|| SweepError::Invalid(format!("vertex key {key} lacks a chart prefix")))?;
    let chart: usize = chart
        .parse()
        .map_err(|_| SweepError::Invalid(format!("bad chart index in vertex key {key}")))?;
    let coords: Result<Vec<Rat>, String> = rest.split(',').map(parse_rat).collect();
    Ok((chart, coords.map_err(SweepError::Invalid)?))
}

#[derive(Serialize, Deserialize)]
pub struct FillingJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    pub charts: Vec<crate::lattice::json::ChartJson>,
    #[serde(default)]
    pub identifications: Vec<crate::lattice::json::IdentJson>,
    pub metric: MetricJson,
    pub vertex_images: BTreeMap<String, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<String>,
}

#[derive(Serialize, Deserialize)]
pub struct MetricJson {
    pub points: usize,
    pub distances: Vec<Vec<String>>,
}

/// A single (n+1)-cube filling with all vertex images distinct and at unit
/// mutual distance: the standard test instance (delta = 1).
pub fn unit_cube_filling(n: usize) -> FillingInput {
    let complex = crate::homology::samples::solid_cube(n + 1, rat(1, 2));
    distinct_image_filling(complex)
}

/// Two (n+1)-cubes glued along one facet, unit metric on the vertex set.
pub fn two_cube_filling(n: usize) -> FillingInput {
    use crate::lattice::cell::CubicalCell;
    use crate::lattice::complex::{AxisImage, Chart, FacetMap, GluedComplex, Identification};
    use crate::lattice::grid::AxisGrid;
    let d = n + 1;
    let one = rat(1, 1);
    let top = |chart: usize| CubicalCell::new(chart, vec![(-one, one); d]);
    let mut charts = Vec::new();
    for chart in 0..2 {
        let mut ch = Chart::new(AxisGrid::standard(d, rat(1, 2)));
        ch.insert_closed(top(chart));
        charts.push(ch);
    }
    let mut fa = top(0);
    fa.intervals[0] = (one, one);
    let mut fb = top(1);
    fb.intervals[0] = (-one, -one);
    let mut out = vec![AxisImage::Fixed(-one)];
    for ax in 1..d {
        out.push(AxisImage::Axis { from: ax, sign: 1 });
    }
    let complex = GluedComplex {
        charts,
        identifications: vec![Identification {
            chart_a: 0,
            facet_a: fa,
            chart_b: 1,
            facet_b: fb,
            map: FacetMap { out },
        }],
    };
    distinct_image_filling(complex)
}

/// Wrap a complex with the discrete unit metric on its vertex classes.
pub fn distinct_image_filling(complex: GluedComplex) -> FillingInput {
    let g = complex.global().expect("valid complex");
    let k = g.vertex_class_count;
    let one = rat(1, 1);
    let mut dist = vec![vec![Rat::zero(); k]; k];
    for (i, row) in dist.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            if i != j {
                *v = one;
            }
        }
    }
    let metric = FiniteMetricSpace::new(dist).expect("unit metric");
    let vertex_images = (0..k).map(|c| (c, c)).collect();
    FillingInput {
        complex,
        metric,
        vertex_images,
        nu: rat(1, 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_cube_filling_validates() {
        let input = unit_cube_filling(2);
        input.validate().unwrap();
        assert_eq!(input.boundary_dim(), 2);
        assert_eq!(input.metric.len(), 8);
    }

    #[test]
    fn json_roundtrip_preserves_images() {
        let input = two_cube_filling(2);
        input.validate().unwrap();
        let text = input.to_json_string().unwrap();
        let back = FillingInput::from_json_str(&text).unwrap();
        assert_eq!(back.vertex_images, input.vertex_images);
        assert_eq!(back.metric.len(), input.metric.len());
        assert_eq!(back.nu, input.nu);
    }

    #[test]
    fn missing_image_is_rejected() {
        let mut input = unit_cube_filling(2);
        input.vertex_images.remove(&3);
        assert!(matches!(
            input.validate(),
            Err(SweepError::MissingVertexImage(_))
        ));
    }
}
