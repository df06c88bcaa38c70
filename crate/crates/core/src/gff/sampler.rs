//! Exact spectral sampler via the Dirichlet sine eigenbasis.
//!
//! For an `m x n` interior the transition matrix `P` of the killed walk has
//! orthonormal eigenfunctions
//! `phi_{jk}(x, y) = (2 / sqrt((m+1)(n+1))) sin(pi j x / (m+1)) sin(pi k y / (n+1))`
//! with eigenvalues `lambda_{jk} = (cos(pi j/(m+1)) + cos(pi k/(n+1))) / 2`,
//! so `sum_{jk} g_{jk} (1 - lambda_{jk})^{-1/2} phi_{jk}` with i.i.d. standard
//! Gaussians `g_{jk}` has covariance exactly `(I - P)^{-1}`.
//!
//! The sine sums are evaluated with a DST-I built on a complex FFT of length
//! `2(L+1)`. Coefficient rows are seeded independently so the output is
//! deterministic for a given seed regardless of thread count.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

use super::GaussianField;
use crate::lattice::{blow_up, GridBox};
use crate::seed::{rng_from, sub_seed, Stream};

/// DST-I of a row: `out[k-1] = sum_j row[j] sin(pi j k / (L+1))`, in place.
struct DstPlan {
    len: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl DstPlan {
    fn new(planner: &mut FftPlanner<f64>, len: usize) -> Self {
        DstPlan {
            len,
            fft: planner.plan_fft_forward(2 * (len + 1)),
        }
    }

    fn scratch(&self) -> (Vec<Complex<f64>>, Vec<Complex<f64>>) {
        (
            vec![Complex::default(); 2 * (self.len + 1)],
            vec![Complex::default(); self.fft.get_inplace_scratch_len()],
        )
    }

    fn run(&self, row: &mut [f64], buf: &mut [Complex<f64>], fft_scratch: &mut [Complex<f64>]) {
        let l = self.len;
        debug_assert_eq!(row.len(), l);
        buf[0] = Complex::default();
        buf[l + 1] = Complex::default();
        for j in 1..=l {
            let v = row[j - 1];
            buf[j] = Complex::new(v, 0.0);
            buf[2 * (l + 1) - j] = Complex::new(-v, 0.0);
        }
        self.fft.process_with_scratch(buf, fft_scratch);
        for k in 1..=l {
            row[k - 1] = -0.5 * buf[k].im;
        }
    }
}

/// Exact DGFF sample on the blow-up of `base_box`, deterministic in `seed`.
pub fn sample_dgff(base_box: &GridBox, seed: u64) -> GaussianField {
    let domain = blow_up(base_box);
    let m = (domain.width - 2) as usize; // interior width
    let n = (domain.height - 2) as usize; // interior height

    let mut planner = FftPlanner::new();
    let dst_cols = DstPlan::new(&mut planner, n);
    let dst_rows = DstPlan::new(&mut planner, m);

    let cos_x: Vec<f64> = (1..=m)
        .map(|j| (PI * j as f64 / (m as f64 + 1.0)).cos())
        .collect();
    let cos_y: Vec<f64> = (1..=n)
        .map(|k| (PI * k as f64 / (n as f64 + 1.0)).cos())
        .collect();

    // coeff[j-1][k-1] = g_{jk} * (1 - lambda_{jk})^{-1/2}, one x-frequency per row.
    let mut coeff = vec![0.0f64; m * n];
    coeff.par_chunks_mut(n).enumerate().for_each_init(
        || dst_cols.scratch(),
        |(buf, fft_scratch), (jm1, row)| {
            let mut rng = rng_from(sub_seed(seed, Stream::FieldRow, jm1 as u64 + 1));
            let cx = cos_x[jm1];
            for (km1, slot) in row.iter_mut().enumerate() {
                let lambda = 0.5 * (cx + cos_y[km1]);
                let g: f64 = rng.sample(StandardNormal);
                *slot = g / (1.0 - lambda).sqrt();
            }
            // Transform over k -> y while the row is hot.
            dst_cols.run(row, buf, fft_scratch);
        },
    );

    // Transpose (m x n, rows j) into (n x m, rows y).
    let mut by_row = vec![0.0f64; m * n];
    transpose(&coeff, &mut by_row, m, n);
    drop(coeff);

    // Transform over j -> x and write into the zero-padded domain grid.
    let w = domain.width as usize;
    let mut values = vec![0.0f64; domain.vertex_count()];
    let norm = 2.0 / (((m as f64) + 1.0) * ((n as f64) + 1.0)).sqrt();
    values
        .par_chunks_mut(w)
        .skip(1)
        .take(n)
        .zip(by_row.par_chunks_mut(m))
        .for_each_init(
            || dst_rows.scratch(),
            |(buf, fft_scratch), (out_row, row)| {
                dst_rows.run(row, buf, fft_scratch);
                for (slot, v) in out_row[1..=m].iter_mut().zip(row.iter()) {
                    *slot = norm * v;
                }
            },
        );

    GaussianField::from_parts(*base_box, values, seed)
}

/// Cache-blocked out-of-place transpose of an `rows x cols` row-major array.
fn transpose(src: &[f64], dst: &mut [f64], rows: usize, cols: usize) {
    const B: usize = 64;
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}
