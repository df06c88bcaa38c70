//! Minimum-weight connected vertex sets meeting up to four terminal sets:
//! dynamic programming over (vertex, subset of terminal sets) with
//! shortest-path relaxations per subset and subset merges at shared vertices.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::WeightField;
use crate::error::{Error, Result};
use crate::lattice::{GridBox, Point};

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    cost: f64,
    idx: u32,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Provenance of a DP state, for reconstructing the vertex set.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Prov {
    Terminal,
    Grow(u32),
    Merge(u8),
}

pub fn min_connector(
    area: &GridBox,
    terminal_sets: &[Vec<Point>],
    wf: &WeightField,
) -> Result<(f64, Vec<Point>)> {
    let t = terminal_sets.len();
    if t > 4 {
        return Err(Error::TooManyTerminals { got: t });
    }
    assert!(t >= 1, "connector needs at least one terminal set");
    if !wf.bounds.contains_box(area) {
        return Err(Error::OutOfBox {
            x: area.x0,
            y: area.y0,
            boxed: wf.bounds,
        });
    }
    let n = area.vertex_count();
    let full = (1usize << t) - 1;
    let mut dp = vec![vec![f64::INFINITY; n]; full + 1];
    let mut prov = vec![vec![Prov::Terminal; n]; full + 1];

    for (i, set) in terminal_sets.iter().enumerate() {
        if set.is_empty() {
            return Err(Error::EmptySpec);
        }
        let mask = 1usize << i;
        for p in set {
            if !area.contains(*p) {
                return Err(Error::OutOfBox {
                    x: p.x,
                    y: p.y,
                    boxed: *area,
                });
            }
            let v = area.index_of(*p);
            if wf.weight(*p) < dp[mask][v] {
                dp[mask][v] = wf.weight(*p);
                prov[mask][v] = Prov::Terminal;
            }
        }
    }

    let w = area.width as usize;
    for mask in 1..=full {
        // Merge two complementary sub-states sharing their anchor vertex.
        let mut sub = (mask - 1) & mask;
        while sub > 0 {
            let other = mask ^ sub;
            if sub < other {
                // each unordered split once
                #[allow(clippy::needless_range_loop)]
                for v in 0..n {
                    let a = dp[sub][v];
                    let b = dp[other][v];
                    if a.is_finite() && b.is_finite() {
                        let cand = a + b - wf.weight(area.point_at(v));
                        if cand < dp[mask][v] {
                            dp[mask][v] = cand;
                            prov[mask][v] = Prov::Merge(sub as u8);
                        }
                    }
                }
            }
            sub = (sub - 1) & mask;
        }
        // Grow by shortest-path relaxation over the whole state layer.
        let mut heap: BinaryHeap<Entry> = BinaryHeap::new();
        for (v, cost) in dp[mask].iter().enumerate() {
            if cost.is_finite() {
                heap.push(Entry {
                    cost: *cost,
                    idx: v as u32,
                });
            }
        }
        while let Some(Entry { cost, idx }) = heap.pop() {
            let u = idx as usize;
            if cost > dp[mask][u] {
                continue;
            }
            let p = area.point_at(u);
            let mut relax = |v: usize, q: Point| {
                let cand = cost + wf.weight(q);
                if cand < dp[mask][v] {
                    dp[mask][v] = cand;
                    prov[mask][v] = Prov::Grow(idx);
                    heap.push(Entry {
                        cost: cand,
                        idx: v as u32,
                    });
                }
            };
            if p.x > area.x0 {
                relax(u - 1, Point::new(p.x - 1, p.y));
            }
            if p.x < area.x1() - 1 {
                relax(u + 1, Point::new(p.x + 1, p.y));
            }
            if p.y > area.y0 {
                relax(u - w, Point::new(p.x, p.y - 1));
            }
            if p.y < area.y1() - 1 {
                relax(u + w, Point::new(p.x, p.y + 1));
            }
        }
    }

    // Deterministic argmin: smallest index among minimal roots.
    let mut best = f64::INFINITY;
    let mut root = usize::MAX;
    for (v, cost) in dp[full].iter().enumerate() {
        if *cost < best {
            best = *cost;
            root = v;
        }
    }
    if root == usize::MAX {
        return Err(Error::Disconnected);
    }

    // Reconstruct the vertex set.
    let mut members: Vec<bool> = vec![false; n];
    let mut stack = vec![(full, root)];
    while let Some((mask, v)) = stack.pop() {
        members[v] = true;
        match prov[mask][v] {
            Prov::Terminal => {}
            Prov::Grow(u) => stack.push((mask, u as usize)),
            Prov::Merge(sub) => {
                stack.push((sub as usize, v));
                stack.push((mask ^ sub as usize, v));
            }
        }
    }
    let vertices: Vec<Point> = (0..n)
        .filter(|v| members[*v])
        .map(|v| area.point_at(v))
        .collect();
    Ok((best, vertices))
}
