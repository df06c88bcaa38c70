//! Dense Green-function oracle for simple random walk killed on the boundary
//! layer of a box: `G = (I - P)^{-1}` computed by direct LU solves.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::lattice::{GridBox, Point};

/// Default cap on interior vertices for the dense oracle (O(V^2) memory).
pub const DENSE_LIMIT: usize = 40_000;

/// Symmetric positive-definite matrix of expected visit counts, indexed by
/// the interior vertices of a domain in row-major scan order.
#[derive(Debug, Clone)]
pub struct GreenMatrix {
    pub domain: GridBox,
    pub interior: GridBox,
    matrix: DMatrix<f64>,
}

impl GreenMatrix {
    /// Green value `G(x, y)`; both points must be interior.
    pub fn entry(&self, x: Point, y: Point) -> f64 {
        self.matrix[(self.interior.index_of(x), self.interior.index_of(y))]
    }

    /// `G(x, y)` with zero extension: boundary-layer arguments give 0.
    pub fn entry_or_zero(&self, x: Point, y: Point) -> f64 {
        if self.interior.contains(x) && self.interior.contains(y) {
            self.entry(x, y)
        } else {
            0.0
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn interior_count(&self) -> usize {
        self.interior.vertex_count()
    }

    /// CSV export, rows in the documented row-major interior scan order.
    pub fn to_csv(&self) -> String {
        let n = self.interior_count();
        let mut out = String::new();
        for i in 0..n {
            let row: Vec<String> = (0..n)
                .map(|j| format!("{:?}", self.matrix[(i, j)]))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Builds `I - P` over the interior of `domain`, `P(x,y) = 1/4` for interior
/// neighbors, walk killed on the boundary layer.
fn one_minus_p(interior: &GridBox) -> DMatrix<f64> {
    let n = interior.vertex_count();
    let mut a = DMatrix::<f64>::identity(n, n);
    for p in interior.vertices() {
        let i = interior.index_of(p);
        for q in [
            Point::new(p.x + 1, p.y),
            Point::new(p.x - 1, p.y),
            Point::new(p.x, p.y + 1),
            Point::new(p.x, p.y - 1),
        ] {
            if interior.contains(q) {
                a[(i, interior.index_of(q))] = -0.25;
            }
        }
    }
    a
}

/// `G = (I - P)^{-1}` with the default interior-size limit.
pub fn green_dense(domain: &GridBox) -> Result<GreenMatrix> {
    green_dense_with_limit(domain, DENSE_LIMIT)
}

/// `G = (I - P)^{-1}` with an explicit interior-size limit.
pub fn green_dense_with_limit(domain: &GridBox, limit: usize) -> Result<GreenMatrix> {
    let interior = domain
        .interior()
        .expect("green_dense requires a domain with non-empty interior");
    let n = interior.vertex_count();
    if n > limit {
        return Err(Error::TooLarge { size: n, limit });
    }
    let a = one_minus_p(&interior);
    let matrix = a
        .lu()
        .try_inverse()
        .expect("I - P is invertible for a killed walk");
    Ok(GreenMatrix {
        domain: *domain,
        interior,
        matrix,
    })
}
