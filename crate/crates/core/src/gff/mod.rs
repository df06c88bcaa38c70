//! The discrete Gaussian free field with Dirichlet boundary on the blow-up:
//! dense Green-function oracle, exact spectral sampler, the coarse/fine Markov
//! decomposition, and the edge-noise (electric current) representation.
//!
//! Conventions. The field attached to a base box `B` lives on the blow-up of
//! `B`; it is identically zero on the outermost one-vertex layer of the
//! blow-up and its covariance is the simple-random-walk Green function
//! `G = (I - P)^{-1}` (expected visit counts) of the blow-up interior. Edge
//! noises carry variance 4 so that the current representation reproduces the
//! same covariance (see [`edge`]).

mod edge;
mod green;
mod markov;
mod sampler;

pub use edge::{resample_subbox, to_edge_representation, Edge, EdgeNoiseField, ResampleOutcome};
pub use green::{green_dense, green_dense_with_limit, GreenMatrix, DENSE_LIMIT};
pub use markov::{coarse_fine_decompose, coarse_max_diagnostic, harmonic_extension, CoarseMaxRow};
pub use sampler::sample_dgff;

use crate::lattice::{blow_up, GridBox, Point};
use serde::{Deserialize, Serialize};

/// A sampled DGFF on the blow-up of a base box.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianField {
    /// The box of interest.
    pub base_box: GridBox,
    /// `blow_up(base_box)`; the field is zero on its outermost layer.
    pub domain: GridBox,
    /// Row-major values over the full domain grid (ring included as zeros).
    values: Vec<f64>,
    /// Provenance seed.
    pub seed: u64,
}

impl GaussianField {
    pub(crate) fn from_parts(base_box: GridBox, values: Vec<f64>, seed: u64) -> Self {
        let domain = blow_up(&base_box);
        debug_assert_eq!(values.len(), domain.vertex_count());
        GaussianField {
            base_box,
            domain,
            values,
            seed,
        }
    }

    /// Field value at a domain vertex.
    pub fn value(&self, p: Point) -> f64 {
        self.values[self.domain.index_of(p)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A real-valued map over the vertices of some box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldPatch {
    pub domain: GridBox,
    pub values: Vec<f64>,
}

impl FieldPatch {
    pub fn new(domain: GridBox, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), domain.vertex_count());
        FieldPatch { domain, values }
    }

    pub fn zeros(domain: GridBox) -> Self {
        FieldPatch {
            domain,
            values: vec![0.0; domain.vertex_count()],
        }
    }

    pub fn value(&self, p: Point) -> f64 {
        self.values[self.domain.index_of(p)]
    }

    pub fn set(&mut self, p: Point, v: f64) {
        let idx = self.domain.index_of(p);
        self.values[idx] = v;
    }
}
