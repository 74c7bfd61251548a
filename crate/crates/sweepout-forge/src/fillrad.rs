//! Filling-radius estimation on finite metric spaces.
//!
//! The metric space stands in for a closed manifold M via its distance
//! matrix (the Kuratowski picture collapses to the matrix itself at this
//! scale). Neighborhoods of radius nu are modeled by the flag complex at
//! threshold 2*nu, so the estimator is (death threshold of the fundamental
//! class)/2 in a full flag (Rips) filtration.

use crate::homology::linalg::symm_diff;
use crate::rat::{parse_rat, rat, rat_int, rat_str, to_f64, Rat};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Debug, thiserror::Error)]
pub enum MetricError {
    #[error("distance matrix must be square, row {0} has wrong length")]
    NotSquare(usize),
    #[error("diagonal entry at {0} is nonzero")]
    Diagonal(usize),
    #[error("matrix not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("negative distance at ({0}, {1})")]
    Negative(usize, usize),
    #[error("triangle inequality fails: d({0},{2}) > d({0},{1}) + d({1},{2})")]
    Triangle(usize, usize, usize),
    #[error("flag complex too large: {0} simplices would exceed the 5e6 budget")]
    Budget(u128),
    #[error("no homology class found in degree {0}")]
    NoClass(usize),
    #[error("bad rational: {0}")]
    BadRational(String),
}

#[derive(Clone, Debug)]
pub struct FiniteMetricSpace {
    pub dist: Vec<Vec<Rat>>,
    /// Optional volume metadata for the vol-based audit clause.
    pub volume: Option<f64>,
    /// Fundamental degree (dimension of the class whose death is measured).
    pub degree: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct SpaceJson {
    distances: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    volume: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    degree: Option<usize>,
}

impl FiniteMetricSpace {
    pub fn new(dist: Vec<Vec<Rat>>) -> Result<Self, MetricError> {
        let s = FiniteMetricSpace {
            dist,
            volume: None,
            degree: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn validate(&self) -> Result<(), MetricError> {
        let k = self.dist.len();
        for (i, row) in self.dist.iter().enumerate() {
            if row.len() != k {
                return Err(MetricError::NotSquare(i));
            }
            if !row[i].is_zero() {
                return Err(MetricError::Diagonal(i));
            }
        }
        for i in 0..k {
            for j in (i + 1)..k {
                if self.dist[i][j] != self.dist[j][i] {
                    return Err(MetricError::Asymmetric(i, j));
                }
                if self.dist[i][j] < Rat::zero() {
                    return Err(MetricError::Negative(i, j));
                }
            }
        }
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    if self.dist[i][l] > self.dist[i][j] + self.dist[j][l] {
                        return Err(MetricError::Triangle(i, j, l));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn diameter(&self) -> Rat {
        self.dist
            .iter()
            .flatten()
            .copied()
            .max()
            .unwrap_or_else(Rat::zero)
    }

    pub fn from_json(text: &str) -> Result<Self, MetricError> {
        let raw: SpaceJson =
            serde_json::from_str(text).map_err(|e| MetricError::BadRational(e.to_string()))?;
        let mut dist = Vec::with_capacity(raw.distances.len());
        for row in &raw.distances {
            let mut r = Vec::with_capacity(row.len());
            for s in row {
                r.push(parse_rat(s).map_err(|_| MetricError::BadRational(s.clone()))?);
            }
            dist.push(r);
        }
        let s = FiniteMetricSpace {
            dist,
            volume: raw.volume,
            degree: raw.degree,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        let raw = SpaceJson {
            distances: self
                .dist
                .iter()
                .map(|row| row.iter().map(|&v| rat_str(v)).collect())
                .collect(),
            volume: self.volume,
            degree: self.degree,
        };
        serde_json::to_string_pretty(&raw).expect("serializable")
    }
}

// ---------------------------------------------------------------------------
// sample spaces

/// m points evenly spaced on a circle of circumference `circ`, geodesic
/// metric.
pub fn cycle_space(m: usize, circ: Rat) -> FiniteMetricSpace {
    let mi = m as i64;
    let dist = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let gap = (i as i64 - j as i64).rem_euclid(mi);
                    let gap = gap.min(mi - gap);
                    circ * rat(gap, mi)
                })
                .collect()
        })
        .collect();
    let mut s = FiniteMetricSpace::new(dist).expect("cycle metric");
    s.degree = Some(1);
    s
}

fn rat_approx(x: f64, denom: i64) -> Rat {
    Rat::new((x * denom as f64).round() as i64, denom)
}

/// Geodesic (angular) distances between the 12 vertices of a regular
/// icosahedron on the unit sphere, rounded to rationals.
pub fn icosahedron_space() -> FiniteMetricSpace {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts = Vec::new();
    for &(a, b) in &[(1.0, phi), (1.0, -phi), (-1.0, phi), (-1.0, -phi)] {
        pts.push([0.0, a, b]);
        pts.push([a, b, 0.0]);
        pts.push([b, 0.0, a]);
    }
    let norm = (1.0 + phi * phi).sqrt();
    let dist = (0..12)
        .map(|i| {
            (0..12)
                .map(|j| {
                    if i == j {
                        return Rat::zero();
                    }
                    let dot: f64 = (0..3).map(|k| pts[i][k] * pts[j][k]).sum::<f64>()
                        / (norm * norm);
                    rat_approx(dot.clamp(-1.0, 1.0).acos(), 1_000_000_000)
                })
                .collect()
        })
        .collect();
    let mut s = FiniteMetricSpace::new(dist).expect("icosahedron metric");
    s.degree = Some(2);
    s
}

/// Geodesic distances between the 6 vertices of a regular octahedron on the
/// unit sphere (pi/2 between neighbors, pi between antipodes).
pub fn octahedron_space() -> FiniteMetricSpace {
    let quarter = rat_approx(std::f64::consts::FRAC_PI_2, 1_000_000_000);
    let dist = (0..6)
        .map(|i| {
            (0..6)
                .map(|j| {
                    if i == j {
                        Rat::zero()
                    } else if j == i ^ 1 {
                        quarter * rat_int(2)
                    } else {
                        quarter
                    }
                })
                .collect()
        })
        .collect();
    let mut s = FiniteMetricSpace::new(dist).expect("octahedron metric");
    s.degree = Some(2);
    s
}

// ---------------------------------------------------------------------------
// flag (Rips) persistence

#[derive(Clone, Debug, Serialize)]
pub struct PersistencePair {
    pub degree: usize,
    pub birth: Rat,
    /// Absent for classes surviving to the full simplex.
    pub death: Option<Rat>,
    /// Vertex lists of the cycle representative at death pairing time.
    pub representative: Vec<Vec<usize>>,
}

fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut out: u128 = 1;
    for i in 0..k {
        out = out * (n - i) / (i + 1);
    }
    out
}

struct Simplex {
    verts: Vec<usize>,
    diam: Rat,
}

/// Z2 persistence of the full flag filtration through degree `max_degree`.
/// Simplices at equal diameter are ordered by dimension, then
/// lexicographically — the pairing is deterministic.
pub fn rips_persistence(
    space: &FiniteMetricSpace,
    max_degree: usize,
) -> Result<Vec<PersistencePair>, MetricError> {
    space.validate()?;
    let k = space.len();
    let budget = binom(k as u128, max_degree as u128 + 2);
    if budget > 5_000_000 {
        return Err(MetricError::Budget(budget));
    }
    // enumerate all simplices up to dimension max_degree + 1
    let mut simplices: Vec<Simplex> = Vec::new();
    let mut frontier: Vec<Vec<usize>> = (0..k).map(|v| vec![v]).collect();
    for dim in 0..=(max_degree + 1) {
        for verts in &frontier {
            let mut diam = Rat::zero();
            for a in 0..verts.len() {
                for b in (a + 1)..verts.len() {
                    diam = diam.max(space.dist[verts[a]][verts[b]]);
                }
            }
            simplices.push(Simplex {
                verts: verts.clone(),
                diam,
            });
        }
        if dim == max_degree + 1 {
            break;
        }
        let mut next = Vec::new();
        for verts in &frontier {
            let last = *verts.last().unwrap();
            for v in (last + 1)..k {
                let mut w = verts.clone();
                w.push(v);
                next.push(w);
            }
        }
        frontier = next;
    }
    simplices.sort_by(|a, b| {
        (a.diam, a.verts.len(), &a.verts).cmp(&(b.diam, b.verts.len(), &b.verts))
    });
    let index: HashMap<Vec<usize>, usize> = simplices
        .iter()
        .enumerate()
        .map(|(i, s)| (s.verts.clone(), i))
        .collect();

    // standard column reduction over Z2 in filtration order
    let n = simplices.len();
    let mut low_of: HashMap<usize, usize> = HashMap::new(); // low row -> column
    let mut reduced: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut paired = vec![false; n];
    let mut pairs: Vec<PersistencePair> = Vec::new();
    for ci in 0..n {
        let s = &simplices[ci];
        let mut col: Vec<usize> = if s.verts.len() == 1 {
            Vec::new()
        } else {
            (0..s.verts.len())
                .map(|drop| {
                    let mut f = s.verts.clone();
                    f.remove(drop);
                    index[&f]
                })
                .collect()
        };
        col.sort_unstable();
        while let Some(&lowest) = col.last() {
            match low_of.get(&lowest) {
                Some(&other) => col = symm_diff(&col, &reduced[other]),
                None => break,
            }
        }
        if let Some(&lowest) = col.last() {
            low_of.insert(lowest, ci);
            paired[lowest] = true;
            paired[ci] = true;
            let birth = simplices[lowest].diam;
            let death = s.diam;
            if death > birth {
                // the reduced column is a cycle representing the dying class
                pairs.push(PersistencePair {
                    degree: simplices[lowest].verts.len() - 1,
                    birth,
                    death: Some(death),
                    representative: col.iter().map(|&i| simplices[i].verts.clone()).collect(),
                });
            }
        }
        reduced.push(col);
    }
    // unpaired simplices of dimension <= max_degree carry essential classes
    for (ci, s) in simplices.iter().enumerate() {
        if !paired[ci] && s.verts.len() <= max_degree + 1 {
            pairs.push(PersistencePair {
                degree: s.verts.len() - 1,
                birth: s.diam,
                death: None,
                representative: vec![s.verts.clone()],
            });
        }
    }
    pairs.sort_by(|a, b| (a.degree, a.birth, a.death).cmp(&(b.degree, b.birth, b.death)));
    Ok(pairs)
}

#[derive(Clone, Debug, Serialize)]
pub struct FillRadEstimate {
    pub degree: usize,
    pub birth: String,
    pub death: String,
    /// Half the death threshold (the neighborhood radius convention pins
    /// flag threshold = 2 * radius).
    pub estimate: String,
    pub estimate_f64: f64,
}

/// Half the death threshold of the most persistent finite class in the
/// fundamental degree.
pub fn fillrad_estimate(
    space: &FiniteMetricSpace,
    degree: usize,
) -> Result<(Rat, FillRadEstimate), MetricError> {
    let pairs = rips_persistence(space, degree)?;
    let best = pairs
        .iter()
        .filter(|p| p.degree == degree && p.death.is_some())
        .max_by_key(|p| p.death.unwrap() - p.birth)
        .ok_or(MetricError::NoClass(degree))?;
    let death = best.death.unwrap();
    let est = death / rat_int(2);
    Ok((
        est,
        FillRadEstimate {
            degree,
            birth: rat_str(best.birth),
            death: rat_str(death),
            estimate: rat_str(est),
            estimate_f64: to_f64(est),
        },
    ))
}

// ---------------------------------------------------------------------------
// reference constants and audits

#[derive(Clone, Debug, Serialize)]
pub struct ReferenceConstants {
    /// Filling radius of the round unit n-sphere, arccos(-1/(n+1)) / 2.
    pub sphere_fillrad: f64,
    /// Waist-comparison constant 1/((n+1) * 2^(n+1)), exact.
    pub c_n: String,
    pub c_n_f64: f64,
}

pub fn reference_constants(n: usize) -> ReferenceConstants {
    let c = rat(1, (n as i64 + 1) * (1i64 << (n + 1)));
    ReferenceConstants {
        sphere_fillrad: (-1.0 / (n as f64 + 1.0)).acos() / 2.0,
        c_n: rat_str(c),
        c_n_f64: to_f64(c),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditClause {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityAudit {
    pub fillrad: f64,
    pub clauses: Vec<AuditClause>,
    pub all_passed: bool,
}

/// Upper-bound surrogates coming from a sweepout: max fiber length (for the
/// waist) and max fiber diameter (for the Urysohn width).
#[derive(Clone, Copy, Debug, Default)]
pub struct SweepSurrogates {
    pub w_upper: Option<f64>,
    pub uw_upper: Option<f64>,
}

pub fn inequality_audit(
    space: &FiniteMetricSpace,
    degree: usize,
    surrogates: SweepSurrogates,
    tol: f64,
) -> Result<InequalityAudit, MetricError> {
    let (est, _) = fillrad_estimate(space, degree)?;
    let fr = to_f64(est);
    let mut clauses = Vec::new();
    let diam = to_f64(space.diameter());
    clauses.push(AuditClause {
        name: "fillrad <= diam/3".into(),
        lhs: fr,
        rhs: diam / 3.0,
        pass: fr <= diam / 3.0 + 1e-9,
        note: None,
    });
    match space.volume {
        Some(vol) => {
            let rhs = degree as f64 * vol.powf(1.0 / degree as f64);
            clauses.push(AuditClause {
                name: "fillrad <= n * vol^(1/n)".into(),
                lhs: fr,
                rhs,
                pass: fr <= rhs + tol,
                note: None,
            });
        }
        None => clauses.push(AuditClause {
            name: "fillrad <= n * vol^(1/n)".into(),
            lhs: fr,
            rhs: f64::NAN,
            pass: true,
            note: Some("skipped: no volume metadata".into()),
        }),
    }
    for (name, bound) in [
        ("fillrad <= uw_upper/2", surrogates.uw_upper),
        ("fillrad <= w_upper/2", surrogates.w_upper),
    ] {
        match bound {
            Some(b) => clauses.push(AuditClause {
                name: name.into(),
                lhs: fr,
                rhs: b / 2.0,
                pass: fr <= b / 2.0 + tol,
                note: None,
            }),
            None => clauses.push(AuditClause {
                name: name.into(),
                lhs: fr,
                rhs: f64::NAN,
                pass: true,
                note: Some("skipped: no sweepout surrogate".into()),
            }),
        }
    }
    // informational: c_n * W_upper vs fillrad (W_upper only upper-bounds the
    // waist, so a violation is a flag, not a failed theorem)
    if let Some(w) = surrogates.w_upper {
        let c = to_f64(parse_rat(&reference_constants(degree).c_n).unwrap());
        clauses.push(AuditClause {
            name: "info: c_n * w_upper vs fillrad".into(),
            lhs: c * w,
            rhs: fr,
            pass: true,
            note: Some("informational only".into()),
        });
    }
    let all = clauses.iter().all(|c| c.pass);
    Ok(InequalityAudit {
        fillrad: fr,
        clauses,
        all_passed: all,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::linalg::Z2Matrix;

    /// Independent oracle: Z2 Betti number of the flag complex at a fixed
    /// threshold via plain rank computation.
    fn betti_at(space: &FiniteMetricSpace, degree: usize, thresh: Rat) -> usize {
        let k = space.len();
        let mut simplices: Vec<Vec<Vec<usize>>> = vec![Vec::new(); degree + 2];
        let mut frontier: Vec<Vec<usize>> = (0..k).map(|v| vec![v]).collect();
        for dim in 0..=(degree + 1) {
            for verts in &frontier {
                let ok = (0..verts.len()).all(|a| {
                    (a + 1..verts.len()).all(|b| space.dist[verts[a]][verts[b]] <= thresh)
                });
                if ok {
                    simplices[dim].push(verts.clone());
                }
            }
            if dim == degree + 1 {
                break;
            }
            let mut next = Vec::new();
            for verts in &frontier {
                for v in (*verts.last().unwrap() + 1)..k {
                    let mut w = verts.clone();
                    w.push(v);
                    next.push(w);
                }
            }
            frontier = next;
        }
        let bmat = |d: usize| -> Z2Matrix {
            let idx: HashMap<&Vec<usize>, usize> = simplices[d - 1]
                .iter()
                .enumerate()
                .map(|(i, s)| (s, i))
                .collect();
            let cols = simplices[d]
                .iter()
                .map(|s| {
                    let mut col: Vec<usize> = (0..s.len())
                        .map(|drop| {
                            let mut f = s.clone();
                            f.remove(drop);
                            idx[&f]
                        })
                        .collect();
                    col.sort_unstable();
                    col
                })
                .collect();
            Z2Matrix {
                rows: simplices[d - 1].len(),
                cols,
            }
        };
        let rank_d = if degree == 0 { 0 } else { bmat(degree).rank() };
        let rank_d1 = bmat(degree + 1).rank();
        simplices[degree].len() - rank_d - rank_d1
    }

    #[test]
    fn triangle_space_has_no_persistent_h1() {
        let one = rat_int(1);
        let dist = vec![
            vec![rat_int(0), one, one],
            vec![one, rat_int(0), one],
            vec![one, one, rat_int(0)],
        ];
        let s = FiniteMetricSpace::new(dist).unwrap();
        let pairs = rips_persistence(&s, 1).unwrap();
        assert!(pairs.iter().all(|p| p.degree != 1));
    }

    #[test]
    fn cycle_graph_persistence_matches_rank_oracle() {
        let s = cycle_space(12, rat_int(1));
        let pairs = rips_persistence(&s, 1).unwrap();
        let h1: Vec<_> = pairs.iter().filter(|p| p.degree == 1).collect();
        assert_eq!(h1.len(), 1);
        assert_eq!(h1[0].birth, rat(1, 12));
        assert_eq!(h1[0].death, Some(rat(1, 3)));
        // oracle: H1 rank is 1 just below the death threshold, 0 at it
        assert_eq!(betti_at(&s, 1, rat(1, 4)), 1);
        assert_eq!(betti_at(&s, 1, rat(1, 3)), 0);
    }

    #[test]
    fn fillrad_of_circle_graphs() {
        for m in [6, 9, 12] {
            let s = cycle_space(m, rat_int(1));
            let (est, _) = fillrad_estimate(&s, 1).unwrap();
            assert_eq!(est, rat(1, 6), "C_{m}");
        }
        // linearity in the metric scale
        let s = cycle_space(12, rat_int(5));
        let (est, _) = fillrad_estimate(&s, 1).unwrap();
        assert_eq!(est, rat(5, 6));
    }

    #[test]
    fn icosahedron_estimate_near_sphere_value() {
        let s = icosahedron_space();
        let (est, _) = fillrad_estimate(&s, 2).unwrap();
        let reference = reference_constants(2).sphere_fillrad;
        let got = to_f64(est);
        assert!(
            (got - reference).abs() <= 0.2 * reference,
            "estimate {got} vs reference {reference}"
        );
        // oracle cross-check of the death threshold
        let pairs = rips_persistence(&s, 2).unwrap();
        let best = pairs
            .iter()
            .filter(|p| p.degree == 2 && p.death.is_some())
            .max_by_key(|p| p.death.unwrap() - p.birth)
            .unwrap();
        let d = best.death.unwrap();
        assert_eq!(betti_at(&s, 2, d - rat(1, 1_000_000)), 1);
        assert_eq!(betti_at(&s, 2, d), 0);
    }

    #[test]
    fn relabeling_does_not_change_pairs() {
        let s = cycle_space(9, rat_int(1));
        let perm = [4usize, 7, 1, 0, 8, 2, 6, 3, 5];
        let dist = (0..9)
            .map(|i| (0..9).map(|j| s.dist[perm[i]][perm[j]]).collect())
            .collect();
        let t = FiniteMetricSpace::new(dist).unwrap();
        let ps: Vec<_> = rips_persistence(&s, 1)
            .unwrap()
            .into_iter()
            .map(|p| (p.degree, p.birth, p.death))
            .collect();
        let pt: Vec<_> = rips_persistence(&t, 1)
            .unwrap()
            .into_iter()
            .map(|p| (p.degree, p.birth, p.death))
            .collect();
        assert_eq!(ps, pt);
    }

    #[test]
    fn audit_circle_passes_with_equality() {
        let s = cycle_space(12, rat_int(1));
        let audit = inequality_audit(&s, 1, SweepSurrogates::default(), 1e-9).unwrap();
        assert!(audit.all_passed);
        let diam_clause = &audit.clauses[0];
        assert!((diam_clause.lhs - diam_clause.rhs).abs() < 1e-12); // 1/6 = (1/2)/3
    }

    #[test]
    fn budget_guard_trips() {
        let big = FiniteMetricSpace::new(
            (0..40)
                .map(|i| {
                    (0..40)
                        .map(|j| if i == j { rat_int(0) } else { rat_int(1) })
                        .collect()
                })
                .collect(),
        )
        .unwrap();
        assert!(matches!(
            rips_persistence(&big, 8),
            Err(MetricError::Budget(_))
        ));
    }

    #[test]
    fn invalid_metric_rejected() {
        let dist = vec![
            vec![rat_int(0), rat_int(1), rat_int(5)],
            vec![rat_int(1), rat_int(0), rat_int(1)],
            vec![rat_int(5), rat_int(1), rat_int(0)],
        ];
        assert!(matches!(
            FiniteMetricSpace::new(dist),
            Err(MetricError::Triangle(..))
        ));
    }

    #[test]
    fn space_json_roundtrip() {
        let mut s = cycle_space(6, rat_int(1));
        s.volume = Some(1.5);
        let text = s.to_json();
        let back = FiniteMetricSpace::from_json(&text).unwrap();
        assert_eq!(back.dist, s.dist);
        assert_eq!(back.volume, Some(1.5));
        assert_eq!(back.degree, Some(1));
    }
}
