//! Exact cubical cells, grids, and glued complexes.

pub mod cell;
pub mod chain;
pub mod complex;
pub mod grid;
pub mod json;

pub use cell::CubicalCell;
pub use complex::{GluedComplex, Identification};
pub use grid::AxisGrid;
