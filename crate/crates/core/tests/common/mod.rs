//! Shared oracles for the integration tests: exhaustive enumerations that
//! stay independent of the solver implementations they check.

#![allow(dead_code)]

use lfpp_core::fpp::WeightField;
use lfpp_core::lattice::{GridBox, Point};

/// Minimum vertex-weight sum over all simple nearest-neighbor paths inside
/// `area` from any source to any target, by depth-first enumeration with
/// pruning on the running sum. Usable up to ~25 vertices.
pub fn exhaustive_min_path(
    area: &GridBox,
    wf: &WeightField,
    sources: &[Point],
    targets: &[Point],
) -> f64 {
    let n = area.vertex_count();
    assert!(n <= 32, "exhaustive oracle is for tiny boxes");
    let w = area.width as usize;
    let weights: Vec<f64> = (0..n).map(|i| wf.weight(area.point_at(i))).collect();
    let mut is_target = vec![false; n];
    for t in targets {
        is_target[area.index_of(*t)] = true;
    }
    let mut best = f64::INFINITY;

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        u: usize,
        visited: u32,
        sum: f64,
        best: &mut f64,
        weights: &[f64],
        is_target: &[bool],
        w: usize,
        n: usize,
    ) {
        if sum >= *best {
            return;
        }
        if is_target[u] {
            *best = sum;
            return;
        }
        let x = u % w;
        let y = u / w;
        let mut try_step = |v: usize| {
            if visited & (1 << v) == 0 {
                dfs(
                    v,
                    visited | (1 << v),
                    sum + weights[v],
                    best,
                    weights,
                    is_target,
                    w,
                    n,
                );
            }
        };
        if x > 0 {
            try_step(u - 1);
        }
        if x + 1 < w {
            try_step(u + 1);
        }
        if y > 0 {
            try_step(u - w);
        }
        if y + 1 < n / w {
            try_step(u + w);
        }
    }

    for s in sources {
        let u = area.index_of(*s);
        dfs(u, 1 << u, weights[u], &mut best, &weights, &is_target, w, n);
    }
    best
}

/// Minimum weight of a connected vertex subset meeting every terminal set,
/// by brute force over all subsets. Usable up to ~16 vertices.
pub fn exhaustive_min_connector(
    area: &GridBox,
    wf: &WeightField,
    terminal_sets: &[Vec<Point>],
) -> f64 {
    let n = area.vertex_count();
    assert!(n <= 16, "subset oracle is for tiny boxes");
    let w = area.width as usize;
    let weights: Vec<f64> = (0..n).map(|i| wf.weight(area.point_at(i))).collect();
    let terminal_masks: Vec<u32> = terminal_sets
        .iter()
        .map(|set| set.iter().fold(0u32, |m, p| m | (1 << area.index_of(*p))))
        .collect();
    let mut best = f64::INFINITY;
    for subset in 1u32..(1 << n) {
        if terminal_masks.iter().any(|tm| subset & tm == 0) {
            continue;
        }
        if !is_connected(subset, w, n) {
            continue;
        }
        let sum: f64 = (0..n)
            .filter(|v| subset & (1 << v) != 0)
            .map(|v| weights[v])
            .sum();
        if sum < best {
            best = sum;
        }
    }
    best
}

fn is_connected(subset: u32, w: usize, n: usize) -> bool {
    let start = subset.trailing_zeros() as usize;
    let mut seen = 1u32 << start;
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        let x = u % w;
        let y = u / w;
        let mut visit = |v: usize| {
            let bit = 1u32 << v;
            if subset & bit != 0 && seen & bit == 0 {
                seen |= bit;
                stack.push(v);
            }
        };
        if x > 0 {
            visit(u - 1);
        }
        if x + 1 < w {
            visit(u + 1);
        }
        if y > 0 {
            visit(u - w);
        }
        if y + 1 < n / w {
            visit(u + w);
        }
    }
    seen == subset
}

/// Deterministic pseudo-random weights in `[lo, hi)` for synthetic fields.
pub fn synthetic_weights(n: usize, lo: f64, hi: f64, seed: u64) -> Vec<f64> {
    let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            lo + (hi - lo) * ((state >> 11) as f64 / (1u64 << 53) as f64)
        })
        .collect()
}
