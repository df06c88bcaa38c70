//! Simulation and measurement laboratory for Liouville first-passage
//! percolation: exact discrete Gaussian free field sampling, vertex-weighted
//! shortest-path functionals, pass machinery, seeded Monte Carlo diagnostics,
//! and normalized-metric scaling analysis.

pub mod error;
pub mod fpp;
pub mod gff;
pub mod lattice;
pub mod mc;
pub mod passes;
pub mod report;
pub mod scaling;
pub mod seed;

pub use error::{Error, Result};
