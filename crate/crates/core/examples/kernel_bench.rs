//! Kernel benchmark: sample a DGFF on a 2048 x 2048 base box (6144 x 6144
//! blow-up) and solve one left-right crossing.
//!
//!     cargo run --release -p lfpp-core --example kernel_bench [side]

use lfpp_core::fpp::{crossing_weight, CrossingSpec, WeightField};
use lfpp_core::gff::sample_dgff;
use lfpp_core::lattice::GridBox;
use std::time::Instant;

fn main() {
    let s: i64 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(2048);
    let base = GridBox::square(s);
    let t0 = Instant::now();
    let field = sample_dgff(&base, 7);
    let t1 = Instant::now();
    let wf = WeightField::from_gaussian(&field, &base, 0.1);
    let t2 = Instant::now();
    let g = crossing_weight(&base, &CrossingSpec::LeftRight, &wf).unwrap();
    let t3 = Instant::now();
    println!(
        "S={s}: sample {:.2}s, weights {:.2}s, solve {:.2}s, total {:.2}s (psi_LR = {:.3}, geodesic length {})",
        (t1 - t0).as_secs_f64(),
        (t2 - t1).as_secs_f64(),
        (t3 - t2).as_secs_f64(),
        (t3 - t0).as_secs_f64(),
        g.weight,
        g.path().unwrap().len()
    );
}
