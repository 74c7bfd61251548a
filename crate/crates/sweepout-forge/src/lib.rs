//! Cubical sweepout machinery: standard decompositions of the cube, glued
//! pseudomanifold complexes, sweepout bundles with fiber-length accounting,
//! Vietoris–Rips filling-radius estimates and homological filling functions.

pub mod cli;
pub mod decomp;
pub mod filling;
pub mod fillrad;
pub mod homology;
pub mod lattice;
pub mod rat;
pub mod report;
pub mod sweepout;

/// CLI entry point; returns the process exit code.
pub fn run_cli() -> i32 {
    cli::run()
}
