//! Coarse/fine Markov decomposition of a sampled field.
//!
//! The coarse part on a sub-box blow-up is the discrete-harmonic extension of
//! the field's values on the blow-up's boundary layer; by the Markov property
//! it equals the conditional expectation of the field given that layer, and
//! the fine remainder is an independent DGFF of the smaller domain.

use rayon::prelude::*;

use super::{sample_dgff, FieldPatch, GaussianField};
use crate::error::{Error, Result};
use crate::lattice::{blow_up, GridBox, Point};
use crate::seed::{sub_seed, Stream};

/// Conjugate gradient on the 5-point Laplacian; relative residual target.
const CG_TOL: f64 = 1e-13;

/// Discrete-harmonic extension into the interior of `patch.domain` of the
/// values `patch` carries on the boundary layer. Interior entries of the
/// input are ignored.
pub fn harmonic_extension(boundary: &FieldPatch) -> FieldPatch {
    let domain = boundary.domain;
    let mut out = FieldPatch::zeros(domain);
    for p in domain.vertices() {
        if domain.on_boundary_layer(p) {
            out.set(p, boundary.value(p));
        }
    }
    let interior = match domain.interior() {
        Some(i) => i,
        None => return out, // all-boundary box: nothing to extend
    };

    // Solve (4I - A) u = b on the interior, b collecting ring neighbors.
    let n = interior.vertex_count();
    let mut b = vec![0.0f64; n];
    for p in interior.vertices() {
        let mut acc = 0.0;
        for q in neighbors(p) {
            if !interior.contains(q) {
                acc += out.value(q);
            }
        }
        b[interior.index_of(p)] = acc;
    }

    let apply = |v: &[f64], out_v: &mut [f64]| {
        for p in interior.vertices() {
            let i = interior.index_of(p);
            let mut acc = 4.0 * v[i];
            for q in neighbors(p) {
                if interior.contains(q) {
                    acc -= v[interior.index_of(q)];
                }
            }
            out_v[i] = acc;
        }
    };

    // CG iteration count grows with the longest side (condition number of
    // the Dirichlet Laplacian), not with sqrt(n).
    let max_iter = 40 * interior.width.max(interior.height) as usize + 200;
    let u = conjugate_gradient(apply, &b, n, max_iter);
    for p in interior.vertices() {
        out.set(p, u[interior.index_of(p)]);
    }
    out
}

fn neighbors(p: Point) -> [Point; 4] {
    [
        Point::new(p.x + 1, p.y),
        Point::new(p.x - 1, p.y),
        Point::new(p.x, p.y + 1),
        Point::new(p.x, p.y - 1),
    ]
}

fn conjugate_gradient(
    apply: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    n: usize,
    max_iter: usize,
) -> Vec<f64> {
    let norm_b: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut x = vec![0.0f64; n];
    if norm_b == 0.0 {
        return x;
    }
    let mut r = b.to_vec();
    let mut p = b.to_vec();
    let mut ap = vec![0.0f64; n];
    let mut rs: f64 = r.iter().map(|v| v * v).sum();
    for _ in 0..max_iter {
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        let alpha = rs / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rs_new: f64 = r.iter().map(|v| v * v).sum();
        if rs_new.sqrt() <= CG_TOL * norm_b {
            break;
        }
        let beta = rs_new / rs;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rs = rs_new;
    }
    x
}

/// Splits `field` on `blow_up(sub)` into the harmonic coarse part and the
/// fine remainder; `coarse + fine = field` there, exactly by construction.
pub fn coarse_fine_decompose(
    field: &GaussianField,
    sub: &GridBox,
) -> Result<(FieldPatch, FieldPatch)> {
    let patch_box = blow_up(sub);
    if !field.domain.contains_box(&patch_box) {
        return Err(Error::NotContained {
            domain: field.domain,
            boxed: patch_box,
        });
    }
    if !field.base_box.contains_box(sub) {
        return Err(Error::NotContained {
            domain: field.base_box,
            boxed: *sub,
        });
    }
    let mut ring = FieldPatch::zeros(patch_box);
    for p in patch_box.vertices() {
        if patch_box.on_boundary_layer(p) {
            ring.set(p, field.value(p));
        }
    }
    let coarse = harmonic_extension(&ring);
    let fine_values: Vec<f64> = patch_box
        .vertices()
        .map(|p| field.value(p) - coarse.value(p))
        .collect();
    Ok((coarse, FieldPatch::new(patch_box, fine_values)))
}

/// One row of the coarse-field maximum diagnostic.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CoarseMaxRow {
    pub size: i64,
    pub mean_max_coarse: f64,
    pub std_error: f64,
    pub replicas: usize,
}

/// Monte Carlo estimate of `E[max over the central sub-box of the coarse
/// field]` at ratio 3: for each size `A` the base box is `[0,3A)^2` and the
/// conditioning sub-box is the central `A x A` box.
pub fn coarse_max_diagnostic(
    sizes: &[i64],
    replicas: usize,
    seed: u64,
) -> Result<Vec<CoarseMaxRow>> {
    sizes
        .iter()
        .enumerate()
        .map(|(arm, &a)| {
            let arm_seed = sub_seed(seed, Stream::Arm, arm as u64);
            let base = GridBox::new(0, 0, 3 * a, 3 * a);
            let sub = GridBox::new(a, a, a, a);
            let maxima: Vec<f64> = (0..replicas)
                .into_par_iter()
                .map(|r| {
                    let field = sample_dgff(&base, sub_seed(arm_seed, Stream::Replica, r as u64));
                    let (coarse, _) = coarse_fine_decompose(&field, &sub)
                        .expect("central sub-box blow-up stays inside the domain");
                    sub.vertices()
                        .map(|p| coarse.value(p))
                        .fold(f64::NEG_INFINITY, f64::max)
                })
                .collect();
            let n = maxima.len() as f64;
            let mean = maxima.iter().sum::<f64>() / n;
            let var = maxima.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
            Ok(CoarseMaxRow {
                size: a,
                mean_max_coarse: mean,
                std_error: (var / n).sqrt(),
                replicas,
            })
        })
        .collect()
}
