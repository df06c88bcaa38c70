//! Edge-noise representation of the DGFF.
//!
//! Writing `Y(x) = sum_e i_x(e) xi(e)` with `i_x` the unit current flow from
//! `x` to the grounded boundary layer lets a sub-box be resampled in place:
//! refresh the noises on edges inside the box and keep the rest. With unit
//! resistances, `i_x(e) = G(x, e+)/4 - G(x, e-)/4` and the energy identity
//! gives `sum_e i_x(e)^2 = G(x, x)/4`, so noises of variance 4 reproduce the
//! canonical covariance `G`.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{FieldPatch, GreenMatrix};
use crate::error::{Error, Result};
use crate::lattice::{GridBox, Point};
use crate::seed::{rng_from, sub_seed, Stream};

/// Edge noise standard deviation: variance 4 matches `Cov = G`.
const XI_STD: f64 = 2.0;

/// Undirected lattice edge in canonical orientation: `a` precedes `b` in
/// row-major (y, then x) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub a: Point,
    pub b: Point,
}

/// A DGFF realized as independent edge noises against unit current flows.
#[derive(Debug, Clone)]
pub struct EdgeNoiseField {
    pub domain: GridBox,
    green: GreenMatrix,
    edges: Vec<Edge>,
    xi: Vec<f64>,
    pub seed: u64,
}

/// All edges with at least one endpoint in the interior of `domain`
/// (ring-to-ring edges carry no current and are omitted).
fn interior_incident_edges(domain: &GridBox) -> Vec<Edge> {
    let interior = domain
        .interior()
        .expect("edge representation needs an interior");
    let mut edges = Vec::new();
    for p in domain.vertices() {
        for q in [Point::new(p.x + 1, p.y), Point::new(p.x, p.y + 1)] {
            if domain.contains(q) && (interior.contains(p) || interior.contains(q)) {
                edges.push(Edge { a: p, b: q });
            }
        }
    }
    edges
}

/// Builds the edge representation for `domain` from its Green matrix.
pub fn to_edge_representation(
    domain: &GridBox,
    green: &GreenMatrix,
    seed: u64,
) -> Result<EdgeNoiseField> {
    if green.domain != *domain {
        return Err(Error::DimensionMismatch {
            expected: green.domain,
            actual: *domain,
        });
    }
    let edges = interior_incident_edges(domain);
    let mut rng = rng_from(sub_seed(seed, Stream::EdgeNoise, 0));
    let xi: Vec<f64> = edges
        .iter()
        .map(|_| XI_STD * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok(EdgeNoiseField {
        domain: *domain,
        green: green.clone(),
        edges,
        xi,
        seed,
    })
}

impl EdgeNoiseField {
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn green(&self) -> &GreenMatrix {
        &self.green
    }

    /// Unit current flow through the directed edge `from -> to` for the
    /// current injected at `x`; antisymmetric under orientation flip.
    pub fn flow(&self, x: Point, from: Point, to: Point) -> f64 {
        debug_assert_eq!(from.l1(&to), 1);
        (self.green.entry_or_zero(x, from) - self.green.entry_or_zero(x, to)) / 4.0
    }

    /// Flow through edge `e` in its canonical orientation.
    pub fn flow_edge(&self, x: Point, e: &Edge) -> f64 {
        self.flow(x, e.a, e.b)
    }

    /// The derived field value `Y(x) = sum_e i_x(e) xi(e)`.
    pub fn derived_value(&self, x: Point) -> f64 {
        self.edges
            .iter()
            .zip(&self.xi)
            .map(|(e, xi)| self.flow_edge(x, e) * xi)
            .sum()
    }

    /// The derived field over the full domain grid (zeros on the ring).
    pub fn derived_field(&self) -> FieldPatch {
        let interior = self.domain.interior().unwrap();
        let mut out = FieldPatch::zeros(self.domain);
        for x in interior.vertices() {
            let v = self.derived_value(x);
            out.set(x, v);
        }
        out
    }

    /// Electrical energy of the unit current from `x`: `sum_e i_x(e)^2`.
    pub fn energy(&self, x: Point) -> f64 {
        self.edges
            .iter()
            .map(|e| self.flow_edge(x, e).powi(2))
            .sum()
    }
}

/// Result of resampling the noises inside a sub-box.
#[derive(Debug, Clone)]
pub struct ResampleOutcome {
    /// The field before resampling.
    pub original: FieldPatch,
    /// The field with edges inside the box refreshed.
    pub resampled: FieldPatch,
    /// `delta = original - resampled` (the paper's Xi).
    pub delta: FieldPatch,
}

/// Refreshes the noises on edges with both endpoints in `c`, leaving all
/// other noises shared, and returns original, resampled and delta fields.
pub fn resample_subbox(enf: &EdgeNoiseField, c: &GridBox, seed: u64) -> Result<ResampleOutcome> {
    if !enf.domain.contains_box(c) {
        return Err(Error::NotContained {
            domain: enf.domain,
            boxed: *c,
        });
    }
    let mut rng = rng_from(sub_seed(seed, Stream::Resample, 0));
    // delta_xi = xi - xi' on the refreshed edges, in canonical edge order.
    let mut delta_xi: Vec<(usize, f64)> = Vec::new();
    for (idx, e) in enf.edges.iter().enumerate() {
        if c.contains(e.a) && c.contains(e.b) {
            let fresh = XI_STD * rng.sample::<f64, _>(StandardNormal);
            delta_xi.push((idx, enf.xi[idx] - fresh));
        }
    }

    let interior = enf.domain.interior().unwrap();
    let original = enf.derived_field();
    let mut resampled = original.clone();
    let mut delta = FieldPatch::zeros(enf.domain);
    for x in interior.vertices() {
        let xi_x: f64 = delta_xi
            .iter()
            .map(|&(idx, d)| enf.flow_edge(x, &enf.edges[idx]) * d)
            .sum();
        delta.set(x, xi_x);
        resampled.set(x, original.value(x) - xi_x);
    }
    Ok(ResampleOutcome {
        original,
        resampled,
        delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gff::green_dense;

    #[test]
    fn single_interior_vertex_flows() {
        // One interior vertex: the unit current splits equally into the four
        // absorbing neighbors.
        let domain = GridBox::square(3);
        let green = green_dense(&domain).unwrap();
        let enf = to_edge_representation(&domain, &green, 1).unwrap();
        let x = Point::new(1, 1);
        assert_eq!(enf.edges().len(), 4);
        let mut energy = 0.0;
        for e in enf.edges() {
            let f = enf.flow_edge(x, e);
            assert!((f.abs() - 0.25).abs() < 1e-12);
            energy += f * f;
        }
        assert!((energy - 0.25).abs() < 1e-12);
        assert!((enf.energy(x) - green.entry(x, x) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn flow_antisymmetry() {
        let domain = GridBox::square(5);
        let green = green_dense(&domain).unwrap();
        let enf = to_edge_representation(&domain, &green, 3).unwrap();
        let x = Point::new(2, 2);
        for e in enf.edges() {
            assert_eq!(enf.flow(x, e.a, e.b), -enf.flow(x, e.b, e.a));
        }
    }

    #[test]
    fn energy_identity_small_sizes() {
        for side in [4, 6, 9, 12] {
            let domain = GridBox::square(side);
            let green = green_dense(&domain).unwrap();
            let enf = to_edge_representation(&domain, &green, 0).unwrap();
            for x in domain.interior().unwrap().vertices() {
                let lhs = enf.energy(x);
                let rhs = green.entry(x, x) / 4.0;
                assert!((lhs - rhs).abs() < 1e-8, "side={side} x={x:?}");
            }
        }
    }

    #[test]
    fn resample_unit_box_is_identity() {
        let domain = GridBox::square(5);
        let green = green_dense(&domain).unwrap();
        let enf = to_edge_representation(&domain, &green, 9).unwrap();
        let c = GridBox::new(2, 2, 1, 1); // no edge has both endpoints inside
        let out = resample_subbox(&enf, &c, 4).unwrap();
        assert_eq!(out.original, out.resampled);
        for v in &out.delta.values {
            assert_eq!(*v, 0.0);
        }
    }

    #[test]
    fn resample_rejects_escaping_box() {
        let domain = GridBox::square(4);
        let green = green_dense(&domain).unwrap();
        let enf = to_edge_representation(&domain, &green, 9).unwrap();
        assert!(matches!(
            resample_subbox(&enf, &GridBox::new(2, 2, 4, 4), 1),
            Err(Error::NotContained { .. })
        ));
    }

    #[test]
    fn mismatched_green_is_rejected() {
        let green = green_dense(&GridBox::square(4)).unwrap();
        assert!(matches!(
            to_edge_representation(&GridBox::square(5), &green, 0),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
