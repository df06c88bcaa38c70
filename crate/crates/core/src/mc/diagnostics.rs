//! Statistical diagnostics: quantile-ratio envelopes, RSW hard/easy ratios,
//! power-law fits, gluing inequalities, tail checks, and the FKG sign test.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    correlation, run_custom_ensemble, run_ensemble, BootstrapSummary, EmpiricalDistribution,
    ExperimentPlan, BOOTSTRAP_RESAMPLES,
};
use crate::error::{Error, Result};
use crate::fpp::{crossing_weight, diameter_weights, CrossingSpec, DiameterMode, WeightField};
use crate::gff::sample_dgff;
use crate::lattice::GridBox;
use crate::report::{fmt_f64, Table};
use crate::seed::{rng_from, sub_seed, Stream};

/// Chebyshev envelope report for the quantile-versus-mean comparison of two
/// concentrated variables.
#[derive(Debug, Clone, Serialize)]
pub struct QuantileRatioReport {
    pub quantile_ratio: f64,
    pub mean_ratio: f64,
    pub secondary_quantile_ratio: f64,
    /// `A * ratio <= mean ratio <= B * ratio` envelope.
    pub mean_envelope: (f64, f64),
    /// `A' * ratio <= secondary quantile ratio <= B' * ratio` envelope.
    pub quantile_envelope: (f64, f64),
    pub mean_ok: bool,
    pub quantiles_ok: bool,
}

/// Chebyshev factors: for `CV^2(X) <= delta`, the p-quantile of X sits inside
/// `[mu (1 - sqrt(delta/p)), mu (1 + sqrt(delta/(1-p)))]`.
fn quantile_band(delta: f64, p: f64) -> Result<(f64, f64)> {
    if delta >= p {
        return Err(Error::AssumptionViolated { delta, p });
    }
    let lo = 1.0 - (delta / p).sqrt();
    let hi = if p < 1.0 {
        1.0 + (delta / (1.0 - p)).sqrt()
    } else {
        f64::INFINITY
    };
    Ok((lo, hi))
}

/// Checks the empirical mean and quantile ratios of two distributions against
/// the Chebyshev envelopes implied by their CV^2 bounds. A checker, not a
/// prover: `delta_x`, `delta_y` are the assumed CV^2 bounds.
#[allow(clippy::too_many_arguments)]
pub fn quantile_ratio_bounds(
    dx: &EmpiricalDistribution,
    dy: &EmpiricalDistribution,
    p: f64,
    q: f64,
    p2: f64,
    q2: f64,
    delta_x: f64,
    delta_y: f64,
) -> Result<QuantileRatioReport> {
    if delta_x >= p.min(p2) {
        return Err(Error::AssumptionViolated {
            delta: delta_x,
            p: p.min(p2),
        });
    }
    if delta_y >= q.min(q2) {
        return Err(Error::AssumptionViolated {
            delta: delta_y,
            p: q.min(q2),
        });
    }
    let ratio = dx.quantile(p)? / dy.quantile(q)?;
    let mean_ratio = dx.mean() / dy.mean();
    let ratio2 = dx.quantile(p2)? / dy.quantile(q2)?;

    let (xl_p, xh_p) = quantile_band(delta_x, p)?;
    let (yl_q, yh_q) = quantile_band(delta_y, q)?;
    // mu_x in [F^-1(p)/hi, F^-1(p)/lo]; mu_y likewise; combine.
    let a = yl_q / xh_p;
    let b = yh_q / xl_p;
    let mean_env = (a * ratio, b * ratio);

    let (xl_p2, xh_p2) = quantile_band(delta_x, p2)?;
    let (yl_q2, yh_q2) = quantile_band(delta_y, q2)?;
    let a2 = a * xl_p2 / yh_q2;
    let b2 = b * xh_p2 / yl_q2;
    let quant_env = (a2 * ratio, b2 * ratio);

    Ok(QuantileRatioReport {
        quantile_ratio: ratio,
        mean_ratio,
        secondary_quantile_ratio: ratio2,
        mean_envelope: mean_env,
        quantile_envelope: quant_env,
        mean_ok: mean_ratio >= mean_env.0 && mean_ratio <= mean_env.1,
        quantiles_ok: ratio2 >= quant_env.0 && ratio2 <= quant_env.1,
    })
}

/// One scale of the RSW hard/easy comparison.
#[derive(Debug, Clone, Serialize)]
pub struct RswRow {
    pub s: i64,
    pub theta_hard: f64,
    pub theta_easy: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RswReport {
    pub gamma: f64,
    pub p: f64,
    pub replicas: usize,
    pub seed: u64,
    pub rows: Vec<RswRow>,
}

impl RswReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new(vec!["s", "theta_hard", "theta_easy", "ratio"]);
        for r in &self.rows {
            t.push_row(vec![
                r.s.to_string(),
                fmt_f64(r.theta_hard),
                fmt_f64(r.theta_easy),
                fmt_f64(r.ratio),
            ]);
        }
        t
    }
}

/// Empirical `Theta_hard[p] / Theta_easy[p]` on `[0,S) x [0,2S)` per scale,
/// from independent ensembles per arm. Arm seeds derive from the scale
/// value, so a scale's row does not depend on which other scales ran.
pub fn rsw_diagnostic(
    scales: &[i64],
    gamma: f64,
    p: f64,
    replicas: usize,
    seed: u64,
) -> Result<RswReport> {
    let rows = scales
        .iter()
        .map(|&s| {
            let hard_seed = sub_seed(seed, Stream::Arm, 2 * s as u64);
            let easy_seed = sub_seed(seed, Stream::Arm, 2 * s as u64 + 1);
            let hard = run_ensemble(&ExperimentPlan::new(
                1,
                2,
                s,
                gamma,
                replicas,
                hard_seed,
                CrossingSpec::Hard,
            ))?
            .remove(0);
            let easy = run_ensemble(&ExperimentPlan::new(
                1,
                2,
                s,
                gamma,
                replicas,
                easy_seed,
                CrossingSpec::Easy,
            ))?
            .remove(0);
            let th = hard.quantile(p)?;
            let te = easy.quantile(p)?;
            Ok(RswRow {
                s,
                theta_hard: th,
                theta_easy: te,
                ratio: th / te,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RswReport {
        gamma,
        p,
        replicas,
        seed,
        rows,
    })
}

/// Least-squares fit of `log Theta_easy` against `log S`.
#[derive(Debug, Clone, Serialize)]
pub struct PowerLawFit {
    pub gamma: f64,
    pub p: f64,
    pub alpha: f64,
    pub intercept: f64,
    pub alpha_ci95: (f64, f64),
    pub rows: Vec<(i64, f64)>,
    pub residuals: Vec<f64>,
}

impl PowerLawFit {
    pub fn table(&self) -> Table {
        let mut t = Table::new(vec!["s", "theta_easy", "residual"]);
        for ((s, th), r) in self.rows.iter().zip(&self.residuals) {
            t.push_row(vec![s.to_string(), fmt_f64(*th), fmt_f64(*r)]);
        }
        t
    }
}

fn slope_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Fits `Theta_easy([0,S) x [0,2S))[p] ~ C * S^alpha` over dyadic scales
/// `S = 2^t`, with a bootstrap CI for the exponent.
pub fn power_law_fit(
    gamma: f64,
    p: f64,
    t_range: std::ops::RangeInclusive<u32>,
    replicas: usize,
    seed: u64,
) -> Result<PowerLawFit> {
    let ts: Vec<u32> = t_range.collect();
    assert!(ts.len() >= 3, "power-law fit needs at least three scales");
    let dists = ts
        .iter()
        .map(|&t| {
            let s = 1i64 << t;
            let arm = sub_seed(seed, Stream::Arm, s as u64);
            Ok((
                s,
                run_ensemble(&ExperimentPlan::new(
                    1,
                    2,
                    s,
                    gamma,
                    replicas,
                    arm,
                    CrossingSpec::Easy,
                ))?
                .remove(0),
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let xs: Vec<f64> = dists.iter().map(|(s, _)| (*s as f64).ln()).collect();
    let ys: Vec<f64> = dists
        .iter()
        .map(|(_, d)| d.quantile(p).map(f64::ln))
        .collect::<Result<Vec<_>>>()?;
    let (alpha, intercept) = slope_fit(&xs, &ys);
    let residuals: Vec<f64> = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - (intercept + alpha * x))
        .collect();

    // Bootstrap the per-scale quantiles, refit the slope each time.
    let mut draws: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .into_par_iter()
        .map(|bix| {
            let mut ys_b = Vec::with_capacity(dists.len());
            for (i, (_, d)) in dists.iter().enumerate() {
                let mut rng = rng_from(sub_seed(
                    seed,
                    Stream::Bootstrap,
                    (bix * dists.len() + i) as u64,
                ));
                let s = d.samples();
                let n = s.len();
                let mut v: Vec<f64> = (0..n).map(|_| s[rng.gen_range(0..n)]).collect();
                v.sort_by(f64::total_cmp);
                let kq = ((p * n as f64 - 1e-9).ceil().max(1.0) as usize).min(n);
                ys_b.push(v[kq - 1].ln());
            }
            slope_fit(&xs, &ys_b).0
        })
        .collect();
    draws.sort_by(f64::total_cmp);
    let lo = draws[(0.025 * draws.len() as f64) as usize];
    let hi = draws[((0.975 * draws.len() as f64) as usize).min(draws.len() - 1)];

    Ok(PowerLawFit {
        gamma,
        p,
        alpha,
        intercept,
        alpha_ci95: (lo, hi),
        rows: dists
            .iter()
            .zip(&ys)
            .map(|((s, _), y)| (*s, y.exp()))
            .collect(),
        residuals,
    })
}

/// One y-grid row of a gluing comparison.
#[derive(Debug, Clone, Serialize)]
pub struct GluingRow {
    pub y: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub std_error: f64,
    pub slack: f64,
    pub violation: bool,
}

/// Empirical check of the stretch and squish gluing inequalities.
#[derive(Debug, Clone, Serialize)]
pub struct GluingReport {
    pub gamma: f64,
    pub s: i64,
    pub k: i64,
    pub a: i64,
    pub b: i64,
    pub replicas: usize,
    pub stretch: Vec<GluingRow>,
    pub squish: Vec<GluingRow>,
}

impl GluingReport {
    pub fn violations(&self) -> usize {
        self.stretch
            .iter()
            .chain(&self.squish)
            .filter(|r| r.violation)
            .count()
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(vec![
            "kind",
            "y",
            "lhs",
            "rhs",
            "std_error",
            "slack",
            "violation",
        ]);
        for (kind, rows) in [("stretch", &self.stretch), ("squish", &self.squish)] {
            for r in rows {
                t.push_row(vec![
                    kind.to_string(),
                    fmt_f64(r.y),
                    fmt_f64(r.lhs),
                    fmt_f64(r.rhs),
                    fmt_f64(r.std_error),
                    fmt_f64(r.slack),
                    r.violation.to_string(),
                ]);
            }
        }
        t
    }
}

/// Additive slack for the uncontrolled o(1) terms in the gluing corollaries.
pub const GLUING_SLACK: f64 = 0.05;

/// Stretch: `P[Psi_LR(B) <= 2ky] >= P[Psi_LR(A) <= y]^(2k-1) - o(1)` with
/// `A = [0,aS) x [0,bS)`, `B = [0,(ka-(k-1)b)S) x [0,bS)`. Squish:
/// `P[Psi_easy(B') <= y] <= 2k P[Psi_easy(A') <= y] + o(1)` with
/// `A' = [0,bS) x [0,(b+1)S)`, `B' = [0,bS) x [0,kS)`. Violations are flagged
/// beyond `3 SE + slack`.
#[allow(clippy::too_many_arguments)]
pub fn gluing_check(
    gamma: f64,
    s: i64,
    k: i64,
    a: i64,
    b: i64,
    y_grid: Option<&[f64]>,
    replicas: usize,
    seed: u64,
) -> Result<GluingReport> {
    assert!(a > b && b >= 1 && k >= 1);
    let n = replicas as f64;

    // Stretch arms.
    let small = run_ensemble(&ExperimentPlan::new(
        a,
        b,
        s,
        gamma,
        replicas,
        sub_seed(seed, Stream::Arm, 0),
        CrossingSpec::LeftRight,
    ))?
    .remove(0);
    let big_k = k * a - (k - 1) * b;
    let big = run_ensemble(&ExperimentPlan::new(
        big_k,
        b,
        s,
        gamma,
        replicas,
        sub_seed(seed, Stream::Arm, 1),
        CrossingSpec::LeftRight,
    ))?
    .remove(0);

    let grid: Vec<f64> = match y_grid {
        Some(g) => g.to_vec(),
        None => (1..=10)
            .map(|i| small.quantile(i as f64 / 10.0 - 0.05).unwrap())
            .collect(),
    };

    let stretch = grid
        .iter()
        .map(|&y| {
            let p_small = cdf_at(&small, y);
            let rhs = p_small.powi(2 * k as i32 - 1);
            let lhs = cdf_at(&big, 2.0 * k as f64 * y);
            let se_lhs = (lhs * (1.0 - lhs) / n).sqrt();
            let se_p = (p_small * (1.0 - p_small) / n).sqrt();
            let se_rhs = (2.0 * k as f64 - 1.0) * p_small.powi(2 * k as i32 - 2) * se_p;
            let se = (se_lhs * se_lhs + se_rhs * se_rhs).sqrt();
            GluingRow {
                y,
                lhs,
                rhs,
                std_error: se,
                slack: GLUING_SLACK,
                violation: lhs < rhs - 3.0 * se - GLUING_SLACK,
            }
        })
        .collect();

    // Squish arms: portrait boxes, easy = left-right.
    let small_sq = run_ensemble(&ExperimentPlan::new(
        b,
        b + 1,
        s,
        gamma,
        replicas,
        sub_seed(seed, Stream::Arm, 2),
        CrossingSpec::Easy,
    ))?
    .remove(0);
    let big_sq = run_ensemble(&ExperimentPlan::new(
        b,
        k.max(b + 1),
        s,
        gamma,
        replicas,
        sub_seed(seed, Stream::Arm, 3),
        CrossingSpec::Easy,
    ))?
    .remove(0);
    let grid_sq: Vec<f64> = match y_grid {
        Some(g) => g.to_vec(),
        None => (1..=10)
            .map(|i| small_sq.quantile(i as f64 / 10.0 - 0.05).unwrap())
            .collect(),
    };
    let squish = grid_sq
        .iter()
        .map(|&y| {
            let p_small = cdf_at(&small_sq, y);
            let lhs = cdf_at(&big_sq, y);
            let rhs = 2.0 * k as f64 * p_small;
            let se_lhs = (lhs * (1.0 - lhs) / n).sqrt();
            let se_rhs = 2.0 * k as f64 * (p_small * (1.0 - p_small) / n).sqrt();
            let se = (se_lhs * se_lhs + se_rhs * se_rhs).sqrt();
            GluingRow {
                y,
                lhs,
                rhs,
                std_error: se,
                slack: GLUING_SLACK,
                violation: lhs > rhs + 3.0 * se + GLUING_SLACK,
            }
        })
        .collect();

    Ok(GluingReport {
        gamma,
        s,
        k,
        a,
        b,
        replicas,
        stretch,
        squish,
    })
}

/// Empirical CDF `P[X <= y]`.
fn cdf_at(d: &EmpiricalDistribution, y: f64) -> f64 {
    let below = d.samples().partition_point(|s| *s <= y);
    below as f64 / d.n() as f64
}

/// One u-grid row of a tail check.
#[derive(Debug, Clone, Serialize)]
pub struct TailRow {
    pub u: f64,
    pub threshold: f64,
    pub p_hat: f64,
    pub std_error: f64,
    pub envelope: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossingTailReport {
    pub gamma: f64,
    pub k: i64,
    pub l: i64,
    pub s: i64,
    pub replicas: usize,
    pub mean_hard_small: f64,
    pub rows: Vec<TailRow>,
}

impl CrossingTailReport {
    pub fn table(&self) -> Table {
        tail_table(&self.rows)
    }
}

fn tail_table(rows: &[TailRow]) -> Table {
    let mut t = Table::new(vec!["u", "threshold", "p_hat", "std_error", "envelope"]);
    for r in rows {
        t.push_row(vec![
            fmt_f64(r.u),
            fmt_f64(r.threshold),
            fmt_f64(r.p_hat),
            fmt_f64(r.std_error),
            fmt_f64(r.envelope),
        ]);
    }
    t
}

/// Tail of `Psi_LR([0,KS) x [0,LS))` against `2uK E Psi_hard([0,S) x [0,2S))`
/// with the `u^(-L/3)` envelope; the mean is estimated from an auxiliary
/// ensemble.
#[allow(clippy::too_many_arguments)]
pub fn crossing_tail_check(
    gamma: f64,
    k: i64,
    l: i64,
    s: i64,
    u_grid: &[f64],
    replicas: usize,
    seed: u64,
) -> Result<CrossingTailReport> {
    let main = run_ensemble(&ExperimentPlan::new(
        k,
        l,
        s,
        gamma,
        replicas,
        sub_seed(seed, Stream::Arm, 0),
        CrossingSpec::LeftRight,
    ))?
    .remove(0);
    let aux = run_ensemble(&ExperimentPlan::new(
        1,
        2,
        s,
        gamma,
        replicas,
        sub_seed(seed, Stream::Arm, 1),
        CrossingSpec::Hard,
    ))?
    .remove(0);
    let mean_hard = aux.mean();
    let n = replicas as f64;
    let rows = u_grid
        .iter()
        .map(|&u| {
            let threshold = 2.0 * u * k as f64 * mean_hard;
            let p_hat = main.tail_at(threshold);
            TailRow {
                u,
                threshold,
                p_hat,
                std_error: (p_hat * (1.0 - p_hat) / n).sqrt(),
                envelope: u.powf(-(l as f64) / 3.0),
            }
        })
        .collect();
    Ok(CrossingTailReport {
        gamma,
        k,
        l,
        s,
        replicas,
        mean_hard_small: mean_hard,
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DiameterTailReport {
    pub gamma: f64,
    pub s: i64,
    pub q: f64,
    pub replicas: usize,
    pub theta_easy_q: f64,
    pub rows: Vec<TailRow>,
}

impl DiameterTailReport {
    pub fn table(&self) -> Table {
        tail_table(&self.rows)
    }
}

/// Tail of `Psi_max / Theta_easy[q]` on `[0,S) x [0,2S)`; no proven envelope
/// constant exists, so the envelope column reports `u^(-2)` purely as a
/// reference curve.
pub fn diameter_tail(
    gamma: f64,
    s: i64,
    q: f64,
    u_grid: &[f64],
    replicas: usize,
    seed: u64,
) -> Result<DiameterTailReport> {
    let bounds = GridBox::new(0, 0, s, 2 * s);
    let max_dist = run_custom_ensemble(
        &bounds,
        gamma,
        replicas,
        sub_seed(seed, Stream::Arm, 0),
        "diameter",
        |wf| Ok(diameter_weights(&bounds, wf, DiameterMode::All)?.0),
    )?;
    let easy = run_ensemble(&ExperimentPlan::new(
        1,
        2,
        s,
        gamma,
        replicas,
        sub_seed(seed, Stream::Arm, 1),
        CrossingSpec::Easy,
    ))?
    .remove(0);
    let theta = easy.quantile(q)?;
    let n = replicas as f64;
    let rows = u_grid
        .iter()
        .map(|&u| {
            let threshold = u * theta;
            let p_hat = max_dist.tail_at(threshold);
            TailRow {
                u,
                threshold,
                p_hat,
                std_error: (p_hat * (1.0 - p_hat) / n).sqrt(),
                envelope: u.powi(-2),
            }
        })
        .collect();
    Ok(DiameterTailReport {
        gamma,
        s,
        q,
        replicas,
        theta_easy_q: theta,
        rows,
    })
}

/// FKG sign test: correlation of the increasing functionals `Psi_LR` and
/// `Psi_BT` of one shared square field.
#[derive(Debug, Clone, Serialize)]
pub struct FkgReport {
    pub gamma: f64,
    pub s: i64,
    pub replicas: usize,
    /// `None` when the functionals are degenerate (constant samples).
    pub correlation: Option<f64>,
    pub std_error: Option<f64>,
}

pub fn fkg_sign_check(gamma: f64, s: i64, replicas: usize, seed: u64) -> Result<FkgReport> {
    let bounds = GridBox::square(s);
    let pairs: Vec<(f64, f64)> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let field = sample_dgff(&bounds, sub_seed(seed, Stream::Replica, r as u64));
            let wf = WeightField::from_gaussian(&field, &bounds, gamma);
            let lr = crossing_weight(&bounds, &CrossingSpec::LeftRight, &wf)?.weight;
            let bt = crossing_weight(&bounds, &CrossingSpec::BottomTop, &wf)?.weight;
            Ok((lr, bt))
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    match correlation(&xs, &ys) {
        Some((r, se)) => Ok(FkgReport {
            gamma,
            s,
            replicas,
            correlation: Some(r),
            std_error: Some(se),
        }),
        None => Ok(FkgReport {
            gamma,
            s,
            replicas,
            correlation: None,
            std_error: None,
        }),
    }
}

/// CV^2 of an LR-crossing ensemble with a bootstrap CI, for trend reports.
pub fn cv2_with_ci(
    gamma: f64,
    s: i64,
    replicas: usize,
    seed: u64,
) -> Result<(f64, BootstrapSummary)> {
    let d = run_ensemble(&ExperimentPlan::new(
        1,
        1,
        s,
        gamma,
        replicas,
        seed,
        CrossingSpec::LeftRight,
    ))?
    .remove(0);
    let cv2 = d.cv2()?;
    let bs = d.bootstrap(
        |smp| {
            let n = smp.len() as f64;
            let m = smp.iter().sum::<f64>() / n;
            let v = smp.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
            v / (m * m)
        },
        BOOTSTRAP_RESAMPLES,
        seed,
    );
    Ok((cv2, bs))
}
