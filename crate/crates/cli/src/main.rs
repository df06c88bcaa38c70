//! lfpp: batch experiments for Liouville first-passage percolation.
//!
//! Every subcommand writes a CSV table (provenance in '#' comments, body
//! deterministic in the seed) plus a JSON sidecar with the fully resolved
//! configuration. Exit codes: 0 success, 1 runtime failure, 2 usage error.

mod config;
mod output;
mod svg;

use clap::{Parser, Subcommand};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

use config::{resolve, usage, Params, UsageError};
use lfpp_core::fpp::{crossing_weight, CrossingSpec, WeightField};
use lfpp_core::gff::sample_dgff;
use lfpp_core::lattice::GridBox;
use lfpp_core::mc;
use lfpp_core::report::{fmt_f64, Table, FORMAT_TAG};
use lfpp_core::scaling;
use output::OutputWriter;

#[derive(Parser)]
#[command(name = "lfpp", version, about = "Liouville FPP simulation laboratory")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a DGFF and write the field file.
    SampleField(Params),
    /// Crossing-weight ensemble on [0,K*S) x [0,L*S).
    Crossing(Params),
    /// Quantile table of a crossing ensemble.
    Quantiles(Params),
    /// Hard/easy crossing quantile ratios per scale.
    Rsw(Params),
    /// Power-law fit of easy-crossing quantiles over dyadic scales.
    Powerlaw(Params),
    /// Stretch/squish gluing inequalities on a y-grid.
    Gluing(Params),
    /// Crossing-weight tail against the multiscale envelope.
    Tails(Params),
    /// Efron-Stein variance experiment with sub-box resampling.
    EfronStein(Params),
    /// Diameter tail on [0,S) x [0,2S).
    Diameter(Params),
    /// Sampled normalized metric on the unit square.
    Metric(Params),
    /// Cross-scale distortion of normalized metrics on matched grids.
    Distortion(Params),
    /// Holder-envelope exponent fit of a sampled metric.
    Holder(Params),
    /// SVG heatmap of a field with an optional geodesic overlay.
    Render(Params),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::SampleField(_) => "sample-field",
            Command::Crossing(_) => "crossing",
            Command::Quantiles(_) => "quantiles",
            Command::Rsw(_) => "rsw",
            Command::Powerlaw(_) => "powerlaw",
            Command::Gluing(_) => "gluing",
            Command::Tails(_) => "tails",
            Command::EfronStein(_) => "efron-stein",
            Command::Diameter(_) => "diameter",
            Command::Metric(_) => "metric",
            Command::Distortion(_) => "distortion",
            Command::Holder(_) => "holder",
            Command::Render(_) => "render",
        }
    }

    fn params(&self) -> &Params {
        match self {
            Command::SampleField(p)
            | Command::Crossing(p)
            | Command::Quantiles(p)
            | Command::Rsw(p)
            | Command::Powerlaw(p)
            | Command::Gluing(p)
            | Command::Tails(p)
            | Command::EfronStein(p)
            | Command::Diameter(p)
            | Command::Metric(p)
            | Command::Distortion(p)
            | Command::Holder(p)
            | Command::Render(p) => p,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.cmd.name();
    let params = match resolve(cli.cmd.params().clone()) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let threads = params
        .threads
        .or_else(|| {
            std::env::var("LFPP_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        });
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot build thread pool: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| run(name, &params, threads)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn parse_spec(s: &str) -> anyhow::Result<CrossingSpec> {
    match s {
        "lr" => Ok(CrossingSpec::LeftRight),
        "bt" => Ok(CrossingSpec::BottomTop),
        "easy" => Ok(CrossingSpec::Easy),
        "hard" => Ok(CrossingSpec::Hard),
        other => usage(format!(
            "--spec must be lr, bt, easy or hard, got '{other}'"
        )),
    }
}

fn fmt_list<T: std::fmt::Display>(v: &[T]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

fn run(name: &str, params: &Params, threads: usize) -> anyhow::Result<()> {
    let seed = params.seed.unwrap_or(0);
    let out_dir: PathBuf = params.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let gamma = params.gamma.unwrap_or(0.1);
    let replicas = params.replicas.unwrap_or(200);

    match name {
        "sample-field" => {
            let s = params.size.unwrap_or(8);
            let base = GridBox::square(s);
            let field = sample_dgff(&base, seed);
            let writer = OutputWriter::new(
                &out_dir,
                name,
                seed,
                config::provenance_pairs(&[("size", s.to_string())]),
                threads,
            )?;
            // Field file: JSON header line, then one CSV row per y over the
            // full blow-up domain (ring rows are zero).
            let header = json!({
                "format": FORMAT_TAG,
                "base_box": field.base_box,
                "domain": field.domain,
                "seed": seed,
                "convention": "cov=G",
            });
            let mut body = serde_json::to_string(&header)?;
            body.push('\n');
            let d = field.domain;
            for y in d.y0..d.y1() {
                let row: Vec<String> = (d.x0..d.x1())
                    .map(|x| fmt_f64(field.value(lfpp_core::lattice::Point::new(x, y))))
                    .collect();
                body.push_str(&row.join(","));
                body.push('\n');
            }
            let path = writer.write_text("csv", &body)?;
            writer.write_json(json!({"vertices": d.vertex_count()}))?;
            println!("wrote {}", path.display());
        }
        "crossing" | "quantiles" => {
            let s = params.size.unwrap_or(8);
            let k = params.k.unwrap_or(1);
            let l = params.l.unwrap_or(1);
            let spec_name = params.spec.clone().unwrap_or_else(|| "lr".to_string());
            let spec = parse_spec(&spec_name)?;
            let plan = mc::ExperimentPlan::new(k, l, s, gamma, replicas, seed, spec);
            let dist = mc::run_ensemble(&plan)?.remove(0);
            let pairs = config::provenance_pairs(&[
                ("size", s.to_string()),
                ("k", k.to_string()),
                ("l", l.to_string()),
                ("gamma", gamma.to_string()),
                ("replicas", replicas.to_string()),
                ("spec", spec_name.clone()),
            ]);
            let writer = OutputWriter::new(&out_dir, name, seed, pairs, threads)?;
            let table = if name == "crossing" {
                let mut t = Table::new(vec!["replica", "psi"]);
                // Samples in sorted order; replica column is the sorted rank.
                for (i, v) in dist.samples().iter().enumerate() {
                    t.push_row(vec![i.to_string(), fmt_f64(*v)]);
                }
                t
            } else {
                let mut t = Table::new(vec!["p", "theta"]);
                for i in 1..=19 {
                    let p = i as f64 * 0.05;
                    t.push_row(vec![fmt_f64(p), fmt_f64(dist.quantile(p)?)]);
                }
                t
            };
            let path = writer.write_csv(&table)?;
            writer.write_json(json!({
                "mean": dist.mean(),
                "variance": dist.variance(),
                "cv2": dist.cv2().ok(),
                "median": dist.quantile(0.5)?,
                "n": dist.n(),
            }))?;
            println!("wrote {}", path.display());
        }
        "rsw" => {
            let scales = params.scales.clone().unwrap_or_else(|| vec![16, 32]);
            let p = params.p.unwrap_or(0.25);
            let rep = mc::rsw_diagnostic(&scales, gamma, p, replicas, seed)?;
            let pairs = config::provenance_pairs(&[
                ("scales", fmt_list(&scales)),
                ("gamma", gamma.to_string()),
                ("p", p.to_string()),
                ("replicas", replicas.to_string()),
            ]);
            let writer = OutputWriter::new(&out_dir, name, seed, pairs, threads)?;
            let path = writer.write_csv(&rep.table())?;
            writer.write_json(serde_json::to_value(&rep)?)?;
            println!("wrote {}", path.display());
        }
        "powerlaw" => {
            let t_min = params.t_min.unwrap_or(3);
            let t_max = params.t_max.unwrap_or(6);
            if t_max < t_min + 2 {
                return usage("powerlaw needs at least three scales (t_max >= t_min + 2)");
            }
            let p = params.p.unwrap_or(0.25);
            let fit = mc::power_law_fit(gamma, p, t_min..=t_max, replicas, seed)?;
            let pairs = config::provenance_pairs(&[
                ("t_min", t_min.to_string()),
                ("t_max", t_max.to_string()),
                ("gamma", gamma.to_string()),
                ("p", p.to_string()),
                ("replicas", replicas.to_string()),
            ]);
            let writer = OutputWriter::new(&out_dir, name, seed, pairs, threads)?;
            let path = writer.write_csv(&fit.table())?;
            writer.write_json(json!({
                "alpha": fit.alpha,
                "alpha_ci95": fit.alpha_ci95,
                "intercept": fit.intercept,
            }))?;
            println!(
                "alpha = {:.4} (95% CI {:.4}..{:.4})",
                fit.alpha, fit.alpha_ci95.0, fit.alpha_ci95.1
            );
            println!("wrote {}", path.display());
        }
        "gluing" => {
            let s = params.size.unwrap_or(8);
            let k = params.glue_k.unwrap_or(2);
            let a = params.a.unwrap_or(2);
            let b = params.b.unwrap_or(1);
            if a <= b {
                return usage(format!("gluing needs a > b, got a={a} b={b}"));
            }
            let rep =
                mc::gluing_check(gamma, s, k, a, b, params.y_grid.as_deref(), replicas, seed)?;
            let pairs = config::provenance_pairs(&[
                ("size", s.to_string()),
                ("glue_k", k.to_string()),
                ("a", a.to_string()),
                ("b", b.to_string()),
                ("gamma", gamma.to_string()),
                ("replicas", replicas.to_string()),
            ]);
            let writer = OutputWriter::new(&out_dir, name, seed, pairs, threads)?;
            let path = writer.write_csv(&rep.table())?;
            writer.write_json(json!({"violations": rep.violations()}))?;
            println!("violations: {}", rep.violations());
            println!("wrote {}", path.display());
        }
        "tails" => {
            let s = params.size.unwrap_or(8);
            let k = params.k.unwrap_or(8);
            let l = params.l.unwrap_or(6);
            let u_grid = params.u_grid.clone().unwrap_or_else(|| vec![2.0, 4.0]);
            let rep = mc::crossing_tail_check(gamma, k, l, s, &u_grid, replicas, seed)?;
            let pairs = config::provenance_pairs(&[
                ("size", s.to_string()),
                ("k", k.to_string()),
                ("l", l.to_string()),
                ("gamma", gamma.to_string()),
                ("u_grid", fmt_list(&u_grid)),
                ("replicas", replicas.to_string()),
            ]);
            let writer = OutputWriter::new(&out_dir, name, seed, pairs, threads)?;
            let path = writer.write_csv(&rep.table())?;
            writer.write_json(json!({"mean_hard_small": rep.mean_hard_small}))?;
            println!("wrote {}", path.display());
        }
        "efron-stein" => {
            let s = params.size.unwrap_or(4);
            let k = params.k.unwrap_or(4);
            let l = params.l.unwrap_or(4);
            let rep = mc::efron_stein_experiment(gamma, k, l, s, replicas, seed)?;
            let pairs = config::provenance_pairs(&[
                ("size", s.to_string()),
                ("k", k.to_string()),
                ("l", l.to_string()),
                ("gamma", gamma.to_string()),
                ("replicas", replicas.to_string()),
            ]);
            let writer = OutputWriter::new(&out_dir, name, seed, pairs, threads)?;
            let path = writer.write_csv(&rep.table())?;
            writer.write_json(json!({
                "var_hat": rep.var_hat,
                "var_ci95": rep.var_ci95,
                "rhs": rep.rhs,
                "rhs_ci95": rep.rhs_ci95,
            }))?;
            println!(
                "Var = {:.6}  <=  (1/2) sum E[Delta^2] = {:.6}",
                rep.var_hat, rep.rhs
            );
            println!("wrote {}", path.display());
        }
        "diameter" => {
            let s = params.size.unwrap_or(16);
            let q = params.q.unwrap_or(0.5);
            let u_grid = params.u_grid.clone().unwrap_or_else(|| vec![2.0, 4.0]);
            let rep = mc::diameter_tail(gamma, s, q, &u_grid, replicas, seed)?;
            let pairs = config::provenance_pairs(&[
                ("size", s.to_string()),
                ("q", q.to_string()),
                ("gamma", gamma.to_string()),
                ("u_grid", fmt_list(&u_grid)),
                ("replicas", replicas.to_string()),
            ]);
            let writer = OutputWriter::new(&out_dir, name, seed, pairs, threads)?;
            let path = writer.write_csv(&rep.table())?;
            writer.write_json(json!({"theta_easy_q": rep.theta_easy_q}))?;
            println!("wrote {}", path.display());
        }
        "metric" => {
            let s = params.size.unwrap_or(16);
            let m = params.m.unwrap_or(8);
            let p = params.p.unwrap_or(0.5);
            if m == 0 || s % (m as i64) != 0 {
                return usage(format!("--m must divide --size, got m={m} size={s}"));
            }
            let kappa = match params.kappa {
                Some(k) => k,
                None => scaling::estimate_kappa(s, gamma, replicas, p, seed)?,
            };
            let metric = scaling::sample_normalized_metric(s, gamma, m, kappa, seed)?;
            let pairs = config::provenance_pairs(&[
                ("size", s.to_string()),
                ("m", m.to_string()),
                ("gamma", gamma.to_string()),
                ("kappa", fmt_f64(kappa)),
                ("replicas", replicas.to_string()),
            ]);
            let writer = OutputWriter::new(&out_dir, name, seed, pairs, threads)?;
            let header = json!({
                "format": FORMAT_TAG,
                "s": s,
                "gamma": gamma,
                "m": m,
                "kappa": kappa,
                "seed": seed,
                "conventions": "diag=w(Sx)/kappa; both endpoint weights included",
            });
            let mut body = serde_json::to_string(&header)?;
            body.push('\n');
            body.push_str(&metric.matrix_csv());
            let path = writer.write_text("csv", &body)?;
            writer.write_json(json!({"kappa": kappa}))?;
            println!("kappa = {kappa}");
            println!("wrote {}", path.display());
        }
        "distortion" => {
            let scales = params.scales.clone().unwrap_or_else(|| vec![16, 32]);
            let m = params.m.unwrap_or(8);
            let p = params.p.unwrap_or(0.5);
            let mut table = Table::new(vec!["s", "kappa_s", "kappa_2s", "distortion"]);
            let mut summary = Vec::new();
            for (i, &s) in scales.iter().enumerate() {
                if m == 0 || s % (m as i64) != 0 || (2 * s) % (m as i64) != 0 {
                    return usage(format!("--m must divide every scale, got m={m} s={s}"));
                }
                let arm = lfpp_core::seed::sub_seed(seed, lfpp_core::seed::Stream::Arm, i as u64);
                let ka = scaling::estimate_kappa(s, gamma, replicas, p, arm)?;
                let kb = scaling::estimate_kappa(2 * s, gamma, replicas, p, arm ^ 1)?;
                let da = scaling::sample_normalized_metric(s, gamma, m, ka, arm)?;
                let db = scaling::sample_normalized_metric(2 * s, gamma, m, kb, arm)?;
                let d = scaling::distortion(&da, &db)?;
                table.push_row(vec![s.to_string(), fmt_f64(ka), fmt_f64(kb), fmt_f64(d)]);
                summary.push(json!({"s": s, "distortion": d}));
            }
            let pairs = config::provenance_pairs(&[
                ("scales", fmt_list(&scales)),
                ("m", m.to_string()),
                ("gamma", gamma.to_string()),
                ("replicas", replicas.to_string()),
            ]);
            let writer = OutputWriter::new(&out_dir, name, seed, pairs, threads)?;
            let path = writer.write_csv(&table)?;
            writer.write_json(json!({"rows": summary}))?;
            println!("wrote {}", path.display());
        }
        "holder" => {
            let s = params.size.unwrap_or(64);
            let m = params.m.unwrap_or(16);
            let p = params.p.unwrap_or(0.5);
            if m < 8 {
                return usage(format!("holder fit needs --m >= 8, got {m}"));
            }
            if s % (m as i64) != 0 {
                return usage(format!("--m must divide --size, got m={m} size={s}"));
            }
            let kappa = match params.kappa {
                Some(k) => k,
                None => scaling::estimate_kappa(s, gamma, replicas, p, seed)?,
            };
            let metric = scaling::sample_normalized_metric(s, gamma, m, kappa, seed)?;
            let fit = scaling::holder_fit(&metric)?;
            let pairs = config::provenance_pairs(&[
                ("size", s.to_string()),
                ("m", m.to_string()),
                ("gamma", gamma.to_string()),
                ("kappa", fmt_f64(kappa)),
                ("replicas", replicas.to_string()),
            ]);
            let writer = OutputWriter::new(&out_dir, name, seed, pairs, threads)?;
            let mut table = Table::new(vec!["xi_upper", "xi_lower", "c_upper", "c_lower"]);
            table.push_row(vec![
                fmt_f64(fit.xi_upper),
                fmt_f64(fit.xi_lower),
                fmt_f64(fit.c_upper),
                fmt_f64(fit.c_lower),
            ]);
            let path = writer.write_csv(&table)?;
            writer.write_json(serde_json::to_value(&fit)?)?;
            println!(
                "xi_upper = {:.4}, xi_lower = {:.4}",
                fit.xi_upper, fit.xi_lower
            );
            println!("wrote {}", path.display());
        }
        "render" => {
            let s = params.size.unwrap_or(64);
            let draw_geodesic = params.geodesic.unwrap_or(true);
            let base = GridBox::square(s);
            let field = sample_dgff(&base, seed);
            let geo = if draw_geodesic {
                let wf = WeightField::from_gaussian(&field, &base, gamma);
                Some(crossing_weight(&base, &CrossingSpec::LeftRight, &wf)?)
            } else {
                None
            };
            let svg_body =
                svg::render_field(&base, &field, geo.as_ref().and_then(|g| g.path().ok()));
            let pairs = config::provenance_pairs(&[
                ("size", s.to_string()),
                ("gamma", gamma.to_string()),
                ("geodesic", draw_geodesic.to_string()),
            ]);
            let writer = OutputWriter::new(&out_dir, name, seed, pairs, threads)?;
            let path = writer.write_text("svg", &svg_body)?;
            writer.write_json(json!({
                "psi_lr": geo.as_ref().map(|g| g.weight),
                "geodesic": geo.as_ref().and_then(|g| g.path().ok()),
            }))?;
            println!("wrote {}", path.display());
        }
        other => return usage(format!("unknown subcommand {other}")),
    }
    Ok(())
}
