//! Seeded Monte Carlo ensembles over fields, empirical distributions,
//! quantiles, CV^2, and the statistical diagnostics built on them.
//!
//! Determinism contract: a plan's replica `r` always draws from the seed
//! `sub_seed(master, Replica, r)`, replicas are aggregated in index order and
//! then sorted, so identical plans give bit-identical distributions no matter
//! how many threads run them.

mod diagnostics;
mod efron_stein;

pub use diagnostics::{
    crossing_tail_check, cv2_with_ci, diameter_tail, fkg_sign_check, gluing_check, power_law_fit,
    quantile_ratio_bounds, rsw_diagnostic, CrossingTailReport, DiameterTailReport, FkgReport,
    GluingReport, GluingRow, PowerLawFit, QuantileRatioReport, RswReport, RswRow, TailRow,
};
pub use efron_stein::{
    efron_stein_experiment, efron_stein_synthetic, EfronSteinBoxRow, EfronSteinReport,
};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fpp::{crossing_weight, CrossingSpec, WeightField};
use crate::gff::sample_dgff;
use crate::lattice::GridBox;
use crate::seed::{rng_from, sub_seed, Stream};
use rand::Rng;

/// Where a distribution came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub descriptor: String,
    pub seed: u64,
}

/// Sorted empirical sample of one functional.
#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
    pub provenance: Provenance,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>, provenance: Provenance) -> Self {
        assert!(
            !samples.is_empty(),
            "a distribution needs at least one sample"
        );
        samples.sort_by(f64::total_cmp);
        EmpiricalDistribution {
            samples,
            provenance,
        }
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.n() as f64
    }

    /// Unbiased sample variance (0 for a single sample).
    pub fn variance(&self) -> f64 {
        let n = self.n();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean();
        self.samples.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n as f64 - 1.0)
    }

    pub fn max(&self) -> f64 {
        *self.samples.last().unwrap()
    }

    pub fn min(&self) -> f64 {
        self.samples[0]
    }

    /// The ceil(p*n)-th order statistic: the smallest sample with empirical
    /// CDF at least `p`. A relative epsilon guards `ceil` against `p*n`
    /// landing a hair above an integer in floating point.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::BadP { p });
        }
        let n = self.n() as f64;
        let k = (p * n - 1e-9).ceil().max(1.0) as usize;
        Ok(self.samples[k.min(self.n()) - 1])
    }

    /// `CV^2 = Var / mean^2` with the unbiased variance.
    pub fn cv2(&self) -> Result<f64> {
        let m = self.mean();
        if m == 0.0 {
            return Err(Error::ZeroMean);
        }
        Ok(self.variance() / (m * m))
    }

    /// Fraction of samples at or above `threshold` (an upper tail).
    pub fn tail_at(&self, threshold: f64) -> f64 {
        let below = self.samples.partition_point(|s| *s < threshold);
        (self.n() - below) as f64 / self.n() as f64
    }

    /// Nonparametric bootstrap of a statistic: point estimate, standard
    /// error, and a 95% percentile interval from `resamples` draws.
    pub fn bootstrap<F: Fn(&[f64]) -> f64>(
        &self,
        stat: F,
        resamples: usize,
        seed: u64,
    ) -> BootstrapSummary {
        let point = stat(&self.samples);
        let mut rng = rng_from(sub_seed(seed, Stream::Bootstrap, 0));
        let n = self.n();
        let mut draws = Vec::with_capacity(resamples);
        let mut buf = vec![0.0f64; n];
        for _ in 0..resamples {
            for slot in buf.iter_mut() {
                *slot = self.samples[rng.gen_range(0..n)];
            }
            draws.push(stat(&buf));
        }
        draws.sort_by(f64::total_cmp);
        let mean = draws.iter().sum::<f64>() / resamples as f64;
        let var =
            draws.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (resamples as f64 - 1.0);
        let lo = draws[((0.025 * resamples as f64) as usize).min(resamples - 1)];
        let hi = draws[((0.975 * resamples as f64) as usize).min(resamples - 1)];
        BootstrapSummary {
            point,
            std_error: var.sqrt(),
            ci95: (lo, hi),
        }
    }
}

/// Bootstrap point estimate with uncertainty.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BootstrapSummary {
    pub point: f64,
    pub std_error: f64,
    pub ci95: (f64, f64),
}

/// Number of bootstrap resamples used by the diagnostics.
pub const BOOTSTRAP_RESAMPLES: usize = 1000;

/// Declarative description of an ensemble run over `[0, K*S) x [0, L*S)`.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentPlan {
    pub k: i64,
    pub l: i64,
    pub s: i64,
    pub gamma: f64,
    pub replicas: usize,
    pub seed: u64,
    pub specs: Vec<CrossingSpec>,
}

impl ExperimentPlan {
    /// Plain crossing plan on `[0, K*S) x [0, L*S)`.
    pub fn new(
        k: i64,
        l: i64,
        s: i64,
        gamma: f64,
        replicas: usize,
        seed: u64,
        spec: CrossingSpec,
    ) -> Self {
        assert!(replicas >= 1);
        ExperimentPlan {
            k,
            l,
            s,
            gamma,
            replicas,
            seed,
            specs: vec![spec],
        }
    }

    pub fn bounds(&self) -> GridBox {
        GridBox::new(0, 0, self.k * self.s, self.l * self.s)
    }

    pub fn descriptor(&self) -> String {
        format!(
            "box=[0,{})x[0,{}) gamma={} n={} specs={}",
            self.k * self.s,
            self.l * self.s,
            self.gamma,
            self.replicas,
            self.specs.len()
        )
    }
}

/// Runs the plan: one field per replica, every requested functional on that
/// shared field; one distribution per functional.
pub fn run_ensemble(plan: &ExperimentPlan) -> Result<Vec<EmpiricalDistribution>> {
    let bounds = plan.bounds();
    let per_replica: Vec<Vec<f64>> = (0..plan.replicas)
        .into_par_iter()
        .map(|r| {
            let field = sample_dgff(&bounds, sub_seed(plan.seed, Stream::Replica, r as u64));
            let wf = WeightField::from_gaussian(&field, &bounds, plan.gamma);
            plan.specs
                .iter()
                .map(|spec| crossing_weight(&bounds, spec, &wf).map(|g| g.weight))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..plan.specs.len())
        .map(|i| {
            let samples: Vec<f64> = per_replica.iter().map(|row| row[i]).collect();
            EmpiricalDistribution::new(
                samples,
                Provenance {
                    descriptor: format!("{} [{i}]", plan.descriptor()),
                    seed: plan.seed,
                },
            )
        })
        .collect())
}

/// Per-replica evaluation of an arbitrary functional of the weight field,
/// with the same seeding and ordering contract as [`run_ensemble`].
pub fn run_custom_ensemble<F>(
    bounds: &GridBox,
    gamma: f64,
    replicas: usize,
    seed: u64,
    descriptor: &str,
    eval: F,
) -> Result<EmpiricalDistribution>
where
    F: Fn(&WeightField) -> Result<f64> + Sync,
{
    let samples: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let field = sample_dgff(bounds, sub_seed(seed, Stream::Replica, r as u64));
            let wf = WeightField::from_gaussian(&field, bounds, gamma);
            eval(&wf)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EmpiricalDistribution::new(
        samples,
        Provenance {
            descriptor: descriptor.to_string(),
            seed,
        },
    ))
}

/// Pearson correlation of paired samples with its large-sample standard
/// error; `None` when either marginal is degenerate.
pub fn correlation(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    let r = sxy / (sxx * syy).sqrt();
    let se = (1.0 - r * r) / n.sqrt();
    Some((r, se))
}
