//! Normalized FPP metrics on the unit square: kappa estimation, sampled
//! distance matrices, bilinear interpolation, identity-correspondence
//! distortion, and Holder-exponent fits.
//!
//! The lattice box is `[0,S]^2` (S+1 vertices per side) so that `S*x` is a
//! lattice point for every grid point `x`; distances keep both endpoint
//! weights, so the diagonal is `w(Sx)/kappa` rather than zero.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fpp::{CrossingSpec, DijkstraScratch, WeightField};
use crate::gff::sample_dgff;
use crate::lattice::{GridBox, Point};
use crate::mc::{run_ensemble, ExperimentPlan};
use crate::report::{fmt_f64, Table};
use crate::seed::{sub_seed, Stream};

/// Normalized distance matrix on the grid `{0, 1/m, ..., 1}^2`.
#[derive(Debug, Clone, Serialize)]
pub struct SampledMetric {
    pub s: i64,
    pub gamma: f64,
    pub m: usize,
    pub kappa: f64,
    pub seed: u64,
    dist: Vec<f64>,
}

impl SampledMetric {
    fn grid_points(m: usize) -> usize {
        (m + 1) * (m + 1)
    }

    /// Matrix entry by grid indices `(i, j)`, each in `0..=m`.
    pub fn dist_at(&self, a: (usize, usize), b: (usize, usize)) -> f64 {
        let g = m_index(self.m, a);
        let h = m_index(self.m, b);
        self.dist[g * Self::grid_points(self.m) + h]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.dist
    }

    /// Builds a metric from an explicit matrix (synthetic injections).
    pub fn from_matrix(m: usize, kappa: f64, dist: Vec<f64>) -> Self {
        assert_eq!(dist.len(), Self::grid_points(m) * Self::grid_points(m));
        SampledMetric {
            s: 0,
            gamma: f64::NAN,
            m,
            kappa,
            seed: 0,
            dist,
        }
    }

    /// CSV body of the distance matrix, row-major over grid points.
    pub fn matrix_csv(&self) -> String {
        let g = Self::grid_points(self.m);
        let mut out = String::with_capacity(self.dist.len() * 8);
        for r in 0..g {
            let row: Vec<String> = (0..g).map(|c| fmt_f64(self.dist[r * g + c])).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn header_table(&self) -> Table {
        let mut t = Table::new(vec!["s", "gamma", "m", "kappa", "seed"]);
        t.push_row(vec![
            self.s.to_string(),
            fmt_f64(self.gamma),
            self.m.to_string(),
            fmt_f64(self.kappa),
            self.seed.to_string(),
        ]);
        t
    }
}

fn m_index(m: usize, (i, j): (usize, usize)) -> usize {
    debug_assert!(i <= m && j <= m);
    j * (m + 1) + i
}

/// Empirical `p`-quantile (default median) of `Psi_LR([0,S]^2)`: the scale
/// normalizer.
pub fn estimate_kappa(s: i64, gamma: f64, replicas: usize, p: f64, seed: u64) -> Result<f64> {
    let d = run_ensemble(&ExperimentPlan::new(
        1,
        1,
        s + 1,
        gamma,
        replicas,
        seed,
        CrossingSpec::LeftRight,
    ))?
    .remove(0);
    d.quantile(p)
}

/// Samples one field on `[0,S]^2` and fills the normalized distance matrix
/// with `Psi_{Sx,Sy} / kappa`, one multi-target solve per grid point.
pub fn sample_normalized_metric(
    s: i64,
    gamma: f64,
    m: usize,
    kappa: f64,
    seed: u64,
) -> Result<SampledMetric> {
    if m == 0 || s % (m as i64) != 0 {
        return Err(Error::NonDivisible {
            side: m as i64,
            boxed: GridBox::new(0, 0, s + 1, s + 1),
        });
    }
    let bounds = GridBox::new(0, 0, s + 1, s + 1);
    let field = sample_dgff(&bounds, sub_seed(seed, Stream::Replica, 0));
    let wf = WeightField::from_gaussian(&field, &bounds, gamma);
    let step = s / m as i64;
    let g = SampledMetric::grid_points(m);
    let grid: Vec<Point> = (0..g)
        .map(|idx| {
            let i = (idx % (m + 1)) as i64;
            let j = (idx / (m + 1)) as i64;
            Point::new(i * step, j * step)
        })
        .collect();

    // One full solve per grid point; fill the upper triangle and mirror so
    // the matrix is exactly symmetric.
    let rows: Vec<Vec<f64>> = (0..g)
        .into_par_iter()
        .map(|a| {
            let mut scratch = DijkstraScratch::new(bounds.vertex_count());
            scratch.run_all(&bounds, &wf, &[grid[a]]);
            (a..g)
                .map(|b| scratch.dist(bounds.index_of(grid[b])) / kappa)
                .collect()
        })
        .collect();
    let mut dist = vec![0.0f64; g * g];
    for a in 0..g {
        for (off, v) in rows[a].iter().enumerate() {
            let b = a + off;
            dist[a * g + b] = *v;
            dist[b * g + a] = *v;
        }
    }
    Ok(SampledMetric {
        s,
        gamma,
        m,
        kappa,
        seed,
        dist,
    })
}

/// Tensor-product bilinear interpolation of the sampled metric at arbitrary
/// points of the unit square.
pub fn interpolate(metric: &SampledMetric, x: (f64, f64), y: (f64, f64)) -> f64 {
    let m = metric.m;
    let corners = |t: (f64, f64)| -> [(usize, usize, f64); 4] {
        let locate = |c: f64| -> (usize, f64) {
            let u = (c.clamp(0.0, 1.0)) * m as f64;
            let i0 = (u.floor() as usize).min(m.saturating_sub(1));
            (i0, u - i0 as f64)
        };
        let (i0, fx) = locate(t.0);
        let (j0, fy) = locate(t.1);
        [
            (i0, j0, (1.0 - fx) * (1.0 - fy)),
            (i0 + 1, j0, fx * (1.0 - fy)),
            (i0, j0 + 1, (1.0 - fx) * fy),
            (i0 + 1, j0 + 1, fx * fy),
        ]
    };
    let cx = corners(x);
    let cy = corners(y);
    let mut acc = 0.0;
    for (i, j, wx) in cx {
        for (p, q, wy) in cy {
            acc += wx * wy * metric.dist_at((i, j), (p, q));
        }
    }
    acc
}

/// Identity-correspondence distortion: max absolute entry difference of two
/// same-grid matrices. Upper-bounds twice the Gromov-Hausdorff distance.
pub fn distortion(a: &SampledMetric, b: &SampledMetric) -> Result<f64> {
    if a.m != b.m {
        return Err(Error::GridMismatch { a: a.m, b: b.m });
    }
    Ok(a.dist
        .iter()
        .zip(&b.dist)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Holder-envelope fit of a sampled metric.
#[derive(Debug, Clone, Serialize)]
pub struct HolderFit {
    pub xi_upper: f64,
    pub xi_lower: f64,
    pub c_upper: f64,
    pub c_lower: f64,
}

/// Regresses the log of the per-bin distance envelopes against the log of
/// the l-infinity separation: bins are the grid separations `k/m`, the upper
/// envelope takes the max sampled distance per bin, the lower the min.
pub fn holder_fit(metric: &SampledMetric) -> Result<HolderFit> {
    let m = metric.m;
    assert!(m >= 8, "holder fit needs grid resolution m >= 8");
    let g = SampledMetric::grid_points(m);
    let mut upper = vec![f64::NEG_INFINITY; m + 1];
    let mut lower = vec![f64::INFINITY; m + 1];
    for a in 0..g {
        let (ai, aj) = ((a % (m + 1)) as i64, (a / (m + 1)) as i64);
        for b in (a + 1)..g {
            let (bi, bj) = ((b % (m + 1)) as i64, (b / (m + 1)) as i64);
            let sep = (ai - bi).abs().max((aj - bj).abs()) as usize;
            let d = metric.dist[a * g + b];
            upper[sep] = upper[sep].max(d);
            lower[sep] = lower[sep].min(d);
        }
    }
    let all_equal = (1..=m).all(|k| (upper[k] - lower[k]).abs() == 0.0)
        && (2..=m).all(|k| (upper[k] - upper[1]).abs() == 0.0);
    if all_equal {
        return Err(Error::DegenerateData);
    }
    let xs: Vec<f64> = (1..=m).map(|k| (k as f64 / m as f64).ln()).collect();
    let uy: Vec<f64> = (1..=m).map(|k| upper[k].ln()).collect();
    let ly: Vec<f64> = (1..=m).map(|k| lower[k].ln()).collect();
    let (xi_u, c_u) = ls_fit(&xs, &uy);
    let (xi_l, c_l) = ls_fit(&xs, &ly);
    Ok(HolderFit {
        xi_upper: xi_u,
        xi_lower: xi_l,
        c_upper: c_u.exp(),
        c_lower: c_l.exp(),
    })
}

fn ls_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
