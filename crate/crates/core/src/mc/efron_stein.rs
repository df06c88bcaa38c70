//! Efron-Stein variance experiments.
//!
//! The synthetic harness checks the estimator machinery on a linear sum of
//! independent Gaussians, where the inequality is an equality. The FPP
//! experiment builds the edge-noise field on the crossing rectangle itself
//! (current grounded on the rectangle's own boundary layer, so the dyadic
//! resampling boxes cover the noise coordinates), resamples each box in turn
//! and accumulates the crossing-weight increments.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::{EmpiricalDistribution, Provenance, BOOTSTRAP_RESAMPLES};
use crate::error::Result;
use crate::fpp::{crossing_weight, CrossingSpec, WeightField};
use crate::gff::{green_dense, to_edge_representation, FieldPatch};
use crate::lattice::{blow_up, dyadic_subboxes, GridBox};
use crate::report::{fmt_f64, Table};
use crate::seed::{rng_from, sub_seed, Stream};

/// Synthetic harness: `f = sum_j X_j` with independent standard Gaussians.
/// Returns the Monte Carlo estimates of `Var(f)` and `1/2 sum_j E[Delta_j^2]`;
/// for linear `f` the two agree in expectation.
pub fn efron_stein_synthetic(terms: usize, replicas: usize, seed: u64) -> (f64, f64) {
    let rows: Vec<(f64, f64)> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_from(sub_seed(seed, Stream::Replica, r as u64));
            let xs: Vec<f64> = (0..terms).map(|_| rng.sample(StandardNormal)).collect();
            let f: f64 = xs.iter().sum();
            let mut delta_sq = 0.0;
            for x in &xs {
                let fresh: f64 = rng.sample(StandardNormal);
                let d = x - fresh;
                delta_sq += d * d;
            }
            (f, delta_sq)
        })
        .collect();
    let n = replicas as f64;
    let mean_f = rows.iter().map(|(f, _)| f).sum::<f64>() / n;
    let var_f = rows
        .iter()
        .map(|(f, _)| (f - mean_f) * (f - mean_f))
        .sum::<f64>()
        / (n - 1.0);
    let rhs = rows.iter().map(|(_, d)| d).sum::<f64>() / n / 2.0;
    (var_f, rhs)
}

/// Per-box contribution of the FPP resampling experiment.
#[derive(Debug, Clone, Serialize)]
pub struct EfronSteinBoxRow {
    pub subbox: GridBox,
    pub mean_delta_sq: f64,
    /// Frequency of the geodesic meeting the box's enlarged neighborhood.
    pub occupancy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EfronSteinReport {
    pub gamma: f64,
    pub k: i64,
    pub l: i64,
    pub s: i64,
    pub replicas: usize,
    pub var_hat: f64,
    pub var_ci95: (f64, f64),
    /// `1/2 sum_i E[Delta_i^2]`.
    pub rhs: f64,
    pub rhs_ci95: (f64, f64),
    pub boxes: Vec<EfronSteinBoxRow>,
}

impl EfronSteinReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new(vec!["x0", "y0", "side", "mean_delta_sq", "occupancy"]);
        for b in &self.boxes {
            t.push_row(vec![
                b.subbox.x0.to_string(),
                b.subbox.y0.to_string(),
                b.subbox.width.to_string(),
                fmt_f64(b.mean_delta_sq),
                fmt_f64(b.occupancy),
            ]);
        }
        t
    }
}

/// The FPP Efron-Stein experiment on `R = [0,KS) x [0,LS)`: the field is the
/// edge-noise DGFF grounded on the boundary layer of `R`; each of the `KL`
/// dyadic `S`-boxes is resampled in turn and the increments of `Psi_LR(R)`
/// feed both sides of `Var <= 1/2 sum E[Delta^2]`.
pub fn efron_stein_experiment(
    gamma: f64,
    k: i64,
    l: i64,
    s: i64,
    replicas: usize,
    seed: u64,
) -> Result<EfronSteinReport> {
    let bounds = GridBox::new(0, 0, k * s, l * s);
    let interior = bounds
        .interior()
        .expect("experiment rectangle has an interior");
    let subboxes = dyadic_subboxes(&bounds, s)?;
    let green = green_dense(&bounds)?;

    // Flow table: i_x(e) for every interior x and every carried edge.
    let probe = to_edge_representation(&bounds, &green, 0)?;
    let edges = probe.edges().to_vec();
    let n_int = interior.vertex_count();
    let mut flows = vec![0.0f64; n_int * edges.len()];
    for x in interior.vertices() {
        let xi = interior.index_of(x);
        for (ei, e) in edges.iter().enumerate() {
            flows[xi * edges.len() + ei] = probe.flow_edge(x, e);
        }
    }
    // Edges inside each resampling box.
    let box_edges: Vec<Vec<usize>> = subboxes
        .iter()
        .map(|c| {
            edges
                .iter()
                .enumerate()
                .filter(|(_, e)| c.contains(e.a) && c.contains(e.b))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let neighborhoods: Vec<GridBox> = subboxes
        .iter()
        .map(|c| {
            let blown = blow_up(c);
            GridBox::new(
                blown.x0.max(bounds.x0),
                blown.y0.max(bounds.y0),
                (blown.x1().min(bounds.x1())) - blown.x0.max(bounds.x0),
                (blown.y1().min(bounds.y1())) - blown.y0.max(bounds.y0),
            )
        })
        .collect();

    struct Row {
        psi: f64,
        delta_sq: Vec<f64>,
        occupied: Vec<bool>,
    }

    let rows: Vec<Row> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let rep_seed = sub_seed(seed, Stream::Replica, r as u64);
            let mut rng = rng_from(sub_seed(rep_seed, Stream::EdgeNoise, 0));
            let xi: Vec<f64> = edges
                .iter()
                .map(|_| 2.0 * rng.sample::<f64, _>(StandardNormal))
                .collect();

            // Base field from the noises.
            let mut base = FieldPatch::zeros(bounds);
            for x in interior.vertices() {
                let xi_ix = interior.index_of(x);
                let row = &flows[xi_ix * edges.len()..(xi_ix + 1) * edges.len()];
                let v: f64 = row.iter().zip(&xi).map(|(f, x)| f * x).sum();
                base.set(x, v);
            }
            let wf = WeightField::from_patch(&base, &bounds, gamma);
            let geo = crossing_weight(&bounds, &CrossingSpec::LeftRight, &wf)?;
            let psi = geo.weight;
            let geo_path = geo.path()?.clone();

            let mut delta_sq = Vec::with_capacity(subboxes.len());
            let mut occupied = Vec::with_capacity(subboxes.len());
            let mut resample_rng = rng_from(sub_seed(rep_seed, Stream::Resample, 0));
            let mut shifted = base.clone();
            for (ci, _c) in subboxes.iter().enumerate() {
                // Fresh noises on the box's edges; everything else shared.
                let mut deltas: Vec<(usize, f64)> = Vec::with_capacity(box_edges[ci].len());
                for &ei in &box_edges[ci] {
                    let fresh = 2.0 * resample_rng.sample::<f64, _>(StandardNormal);
                    deltas.push((ei, xi[ei] - fresh));
                }
                for x in interior.vertices() {
                    let xi_ix = interior.index_of(x);
                    let row = &flows[xi_ix * edges.len()..(xi_ix + 1) * edges.len()];
                    let shift: f64 = deltas.iter().map(|&(ei, d)| row[ei] * d).sum();
                    shifted.set(x, base.value(x) - shift);
                }
                let wf2 = WeightField::from_patch(&shifted, &bounds, gamma);
                let psi2 = crossing_weight(&bounds, &CrossingSpec::LeftRight, &wf2)?.weight;
                let d = psi - psi2;
                delta_sq.push(d * d);
                occupied.push(
                    geo_path
                        .vertices()
                        .iter()
                        .any(|p| neighborhoods[ci].contains(*p)),
                );
            }
            Ok(Row {
                psi,
                delta_sq,
                occupied,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let psis: Vec<f64> = rows.iter().map(|r| r.psi).collect();
    let dist = EmpiricalDistribution::new(
        psis,
        Provenance {
            descriptor: format!("efron-stein psi K={k} L={l} S={s}"),
            seed,
        },
    );
    let var_hat = dist.variance();
    let var_bs = dist.bootstrap(
        |smp| {
            let n = smp.len() as f64;
            let m = smp.iter().sum::<f64>() / n;
            smp.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0)
        },
        BOOTSTRAP_RESAMPLES,
        sub_seed(seed, Stream::Bootstrap, 1),
    );

    let n = replicas as f64;
    let boxes: Vec<EfronSteinBoxRow> = subboxes
        .iter()
        .enumerate()
        .map(|(ci, c)| EfronSteinBoxRow {
            subbox: *c,
            mean_delta_sq: rows.iter().map(|r| r.delta_sq[ci]).sum::<f64>() / n,
            occupancy: rows.iter().filter(|r| r.occupied[ci]).count() as f64 / n,
        })
        .collect();
    let rhs_samples: Vec<f64> = rows
        .iter()
        .map(|r| r.delta_sq.iter().sum::<f64>() / 2.0)
        .collect();
    let rhs_dist = EmpiricalDistribution::new(
        rhs_samples,
        Provenance {
            descriptor: "efron-stein rhs".into(),
            seed,
        },
    );
    let rhs = rhs_dist.mean();
    let rhs_bs = rhs_dist.bootstrap(
        |smp| smp.iter().sum::<f64>() / smp.len() as f64,
        BOOTSTRAP_RESAMPLES,
        sub_seed(seed, Stream::Bootstrap, 2),
    );

    Ok(EfronSteinReport {
        gamma,
        k,
        l,
        s,
        replicas,
        var_hat,
        var_ci95: var_bs.ci95,
        rhs,
        rhs_ci95: rhs_bs.ci95,
        boxes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_linear_sum_is_tight() {
        let (lhs, rhs) = efron_stein_synthetic(10, 20_000, 31);
        let ratio = lhs / rhs;
        assert!(
            (0.95..=1.05).contains(&ratio),
            "linear harness should be near equality, got {ratio}"
        );
    }

    #[test]
    fn gamma_zero_is_degenerate() {
        let report = efron_stein_experiment(0.0, 2, 2, 4, 20, 5).unwrap();
        assert_eq!(report.var_hat, 0.0);
        assert_eq!(report.rhs, 0.0);
    }
}
