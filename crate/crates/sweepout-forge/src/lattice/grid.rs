//! Per-axis breakpoint grids.

use crate::rat::{rat_int, rat_str, Rat};
use serde::{Deserialize, Serialize};

/// Breakpoint lists, one per axis. Every cell endpoint of a chart must lie on
/// the chart's grid. Each axis list is strictly increasing, contains -1, 0
/// and 1, and is symmetric under negation (so cube isometries act on it).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisGrid {
    pub axes: Vec<Vec<Rat>>,
}

#[derive(Debug, thiserror::Error)]
pub enum GridError {
    #[error("axis {axis}: breakpoints not strictly increasing near {value}")]
    NotIncreasing { axis: usize, value: String },
    #[error("axis {axis}: grid must contain -1, 0 and 1")]
    MissingAnchors { axis: usize },
    #[error("axis {axis}: grid is not symmetric under negation ({value} has no mirror)")]
    NotSymmetric { axis: usize, value: String },
}

impl AxisGrid {
    /// The same breakpoint list on every axis.
    pub fn uniform(dim: usize, breakpoints: Vec<Rat>) -> Self {
        AxisGrid {
            axes: vec![breakpoints; dim],
        }
    }

    /// The grid {-1, -eps, 0, eps, 1} used by the standard decompositions.
    pub fn standard(dim: usize, eps: Rat) -> Self {
        let bp = vec![rat_int(-1), -eps, rat_int(0), eps, rat_int(1)];
        AxisGrid::uniform(dim, bp)
    }

    /// {-1, 0, 1} on every axis.
    pub fn coarse(dim: usize) -> Self {
        AxisGrid::uniform(dim, vec![rat_int(-1), rat_int(0), rat_int(1)])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn validate(&self) -> Result<(), GridError> {
        for (axis, bp) in self.axes.iter().enumerate() {
            for w in bp.windows(2) {
                if w[0] >= w[1] {
                    return Err(GridError::NotIncreasing {
                        axis,
                        value: rat_str(w[1]),
                    });
                }
            }
            for anchor in [-1i64, 0, 1] {
                if !bp.contains(&rat_int(anchor)) {
                    return Err(GridError::MissingAnchors { axis });
                }
            }
            for &v in bp {
                if !bp.contains(&(-v)) {
                    return Err(GridError::NotSymmetric {
                        axis,
                        value: rat_str(v),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn on_grid(&self, axis: usize, v: Rat) -> bool {
        self.axes[axis].contains(&v)
    }

    /// Extend an axis with extra breakpoints (keeps order and symmetry by
    /// inserting both signs).
    pub fn refine(&mut self, axis: usize, values: &[Rat]) {
        let bp = &mut self.axes[axis];
        for &v in values {
            for cand in [v, -v] {
                if let Err(pos) = bp.binary_search(&cand) {
                    bp.insert(pos, cand);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn standard_grid_is_valid() {
        let g = AxisGrid::standard(3, rat(1, 2));
        g.validate().unwrap();
        assert_eq!(g.axes[0].len(), 5);
    }

    #[test]
    fn asymmetric_grid_rejected() {
        let g = AxisGrid::uniform(1, vec![rat_int(-1), rat_int(0), rat(1, 3), rat_int(1)]);
        assert!(matches!(g.validate(), Err(GridError::NotSymmetric { .. })));
    }

    #[test]
    fn refine_inserts_both_signs() {
        let mut g = AxisGrid::coarse(1);
        g.refine(0, &[rat(3, 4)]);
        assert!(g.on_grid(0, rat(3, 4)) && g.on_grid(0, rat(-3, 4)));
        g.validate().unwrap();
    }
}
