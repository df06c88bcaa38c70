//! Multi-source Dijkstra on vertex-weighted grid boxes.
//!
//! Costs accumulate as `cost(v) = cost(parent) + w(v)` with the frontier
//! seeded at `w(source)`, so a geodesic's reported weight reproduces the
//! left-to-right summation of its vertex weights bit for bit. Ties are broken
//! deterministically: the heap orders by (cost, vertex index) and among
//! equal-cost predecessors the smallest row-major index wins.
//!
//! Heap entries pack the cost's IEEE-754 bits next to the vertex index; for
//! positive finite costs the bit order equals the numeric order.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::WeightField;
use crate::error::{Error, Result};
use crate::lattice::{GridBox, LatticePath, Point};

const NO_PARENT: u32 = u32::MAX;

/// Reusable buffers for repeated searches over same-size areas.
pub struct DijkstraScratch {
    dist: Vec<f64>,
    parent: Vec<u32>,
    heap: BinaryHeap<Reverse<(u64, u32)>>,
}

impl DijkstraScratch {
    pub fn new(capacity: usize) -> Self {
        DijkstraScratch {
            dist: vec![f64::INFINITY; capacity],
            parent: vec![NO_PARENT; capacity],
            heap: BinaryHeap::with_capacity(1024),
        }
    }

    pub fn dist(&self, idx: usize) -> f64 {
        self.dist[idx]
    }

    fn reset(&mut self, n: usize) {
        self.dist.clear();
        self.dist.resize(n, f64::INFINITY);
        self.parent.clear();
        self.parent.resize(n, NO_PARENT);
        self.heap.clear();
    }

    /// Runs until the queue drains (all reachable vertices settled).
    pub fn run_all(&mut self, area: &GridBox, wf: &WeightField, sources: &[Point]) {
        self.run_inner(area, wf, sources, None);
    }

    /// Runs until some target settles; returns its index.
    fn run_until(
        &mut self,
        area: &GridBox,
        wf: &WeightField,
        sources: &[Point],
        targets: &[Point],
    ) -> Option<usize> {
        let mut is_target = vec![false; area.vertex_count()];
        for t in targets {
            is_target[area.index_of(*t)] = true;
        }
        self.run_inner(area, wf, sources, Some(&is_target))
    }

    fn run_inner(
        &mut self,
        area: &GridBox,
        wf: &WeightField,
        sources: &[Point],
        stop_at: Option<&[bool]>,
    ) -> Option<usize> {
        let w = area.width as usize;
        let h = area.height as usize;
        let n = w * h;
        self.reset(n);
        let weights = wf.weights();
        // Weight lookup relative to the area requires an offset map when the
        // area is a strict sub-box of the field.
        let same = wf.bounds == *area;
        let wt = |area_idx: usize| -> f64 {
            if same {
                weights[area_idx]
            } else {
                wf.weight(area.point_at(area_idx))
            }
        };
        for s in sources {
            let idx = area.index_of(*s);
            let cost = wt(idx);
            if cost < self.dist[idx] {
                self.dist[idx] = cost;
                self.heap.push(Reverse((cost.to_bits(), idx as u32)));
            }
        }
        while let Some(Reverse((bits, idx))) = self.heap.pop() {
            let u = idx as usize;
            let cost = f64::from_bits(bits);
            if cost > self.dist[u] {
                continue; // stale entry
            }
            if let Some(t) = stop_at {
                if t[u] {
                    return Some(u);
                }
            }
            let x = u % w;
            let y = u / w;
            macro_rules! relax {
                ($v:expr) => {{
                    let v = $v;
                    let cand = cost + wt(v);
                    if cand < self.dist[v] {
                        self.dist[v] = cand;
                        self.parent[v] = idx;
                        self.heap.push(Reverse((cand.to_bits(), v as u32)));
                    } else if cand == self.dist[v] && idx < self.parent[v] {
                        self.parent[v] = idx;
                    }
                }};
            }
            if x > 0 {
                relax!(u - 1);
            }
            if x + 1 < w {
                relax!(u + 1);
            }
            if y > 0 {
                relax!(u - w);
            }
            if y + 1 < h {
                relax!(u + w);
            }
        }
        None
    }

    fn extract_path(&self, area: &GridBox, target: usize) -> LatticePath {
        let mut rev = vec![area.point_at(target)];
        let mut cur = target;
        while self.parent[cur] != NO_PARENT {
            cur = self.parent[cur] as usize;
            rev.push(area.point_at(cur));
        }
        rev.reverse();
        LatticePath::new(rev)
    }
}

/// Cheapest path from any source to any target, confined to `area`.
pub fn shortest_path(
    area: &GridBox,
    wf: &WeightField,
    sources: &[Point],
    targets: &[Point],
) -> Result<(f64, LatticePath)> {
    let mut scratch = DijkstraScratch::new(area.vertex_count());
    match scratch.run_until(area, wf, sources, targets) {
        Some(t) => Ok((scratch.dist[t], scratch.extract_path(area, t))),
        None => Err(Error::Disconnected),
    }
}

/// Exact maximum of `d(x, y)` over `pool x pool` with an attaining pair.
///
/// Rather than one search per pool vertex, the pool is covered by blocks with
/// a landmark each; a block pair whose landmark bound
/// `r_i + d(c_i, c_j) + r_j` does not beat the best pair seen so far cannot
/// host the maximum, and only surviving blocks get exhaustive searches. The
/// result is exact; pruning only skips certified-dominated sources.
pub fn max_pairwise_distance(
    area: &GridBox,
    wf: &WeightField,
    pool: &[Point],
) -> (f64, (Point, Point)) {
    let n = area.vertex_count();
    let mut scratch = DijkstraScratch::new(n);
    let mut best = f64::NEG_INFINITY;
    let mut arg = (pool[0], pool[0]);
    let mut in_pool = vec![false; n];
    for p in pool {
        in_pool[area.index_of(*p)] = true;
    }

    let scan_source =
        |src: Point, scratch: &mut DijkstraScratch, best: &mut f64, arg: &mut (Point, Point)| {
            scratch.run_all(area, wf, &[src]);
            for (idx, flag) in in_pool.iter().enumerate() {
                if *flag {
                    let d = scratch.dist(idx);
                    if d > *best {
                        *best = d;
                        *arg = (src, area.point_at(idx));
                    }
                }
            }
        };

    if pool.len() < 512 {
        for &src in pool {
            scan_source(src, &mut scratch, &mut best, &mut arg);
        }
        return (best, arg);
    }

    // Cover the pool with blocks of side about 8 tiles.
    const BLOCK: i64 = 8;
    let bw = (area.width + BLOCK - 1) / BLOCK;
    let bh = (area.height + BLOCK - 1) / BLOCK;
    let nblocks = (bw * bh) as usize;
    let block_of =
        |p: Point| -> usize { (((p.y - area.y0) / BLOCK) * bw + (p.x - area.x0) / BLOCK) as usize };
    let mut members: Vec<Vec<Point>> = vec![Vec::new(); nblocks];
    for &p in pool {
        members[block_of(p)].push(p);
    }

    // Landmark pass: the pool member closest to each block center.
    let mut landmarks: Vec<Option<Point>> = vec![None; nblocks];
    for (b, ms) in members.iter().enumerate() {
        if ms.is_empty() {
            continue;
        }
        let cx = area.x0 + ((b as i64 % bw) * BLOCK + BLOCK / 2).min(area.width - 1);
        let cy = area.y0 + ((b as i64 / bw) * BLOCK + BLOCK / 2).min(area.height - 1);
        let center = Point::new(cx, cy);
        landmarks[b] = ms.iter().copied().min_by_key(|p| (p.l1(&center), p.x, p.y));
    }

    let mut radius = vec![0.0f64; nblocks];
    let mut lm_dist = vec![vec![0.0f64; nblocks]; nblocks];
    for b in 0..nblocks {
        let Some(c) = landmarks[b] else { continue };
        scan_source(c, &mut scratch, &mut best, &mut arg);
        for (j, lm) in landmarks.iter().enumerate() {
            if let Some(cj) = lm {
                lm_dist[b][j] = scratch.dist(area.index_of(*cj));
            }
        }
        radius[b] = members[b]
            .iter()
            .map(|p| scratch.dist(area.index_of(*p)))
            .fold(0.0, f64::max);
    }

    // Exhaust every block pair whose bound still beats the best pair.
    let mut source_blocks: Vec<bool> = vec![false; nblocks];
    for i in 0..nblocks {
        if landmarks[i].is_none() {
            continue;
        }
        for j in i..nblocks {
            if landmarks[j].is_none() {
                continue;
            }
            let bound = radius[i] + lm_dist[i][j] + radius[j];
            if bound > best && !source_blocks[i] && !source_blocks[j] {
                source_blocks[i] = true;
            }
        }
    }
    // A source block's exhaustive scan may raise `best`; it covers every pair
    // with one endpoint in the block, so re-deriving the survivor set after
    // each block keeps the certificates valid.
    for b in 0..nblocks {
        if !source_blocks[b] {
            continue;
        }
        for &src in &members[b] {
            if Some(src) == landmarks[b] {
                continue; // already scanned
            }
            scan_source(src, &mut scratch, &mut best, &mut arg);
        }
    }
    // Final certification sweep: any pair still beating `best` from blocks
    // not yet exhausted gets its smaller block exhausted now.
    loop {
        let mut grew = false;
        for i in 0..nblocks {
            if landmarks[i].is_none() {
                continue;
            }
            for j in i..nblocks {
                if landmarks[j].is_none() {
                    continue;
                }
                if source_blocks[i] || source_blocks[j] {
                    continue;
                }
                if radius[i] + lm_dist[i][j] + radius[j] > best {
                    source_blocks[i] = true;
                    for &src in &members[i] {
                        if Some(src) == landmarks[i] {
                            continue;
                        }
                        scan_source(src, &mut scratch, &mut best, &mut arg);
                    }
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    (best, arg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_row_at_unit_weights() {
        let area = GridBox::new(0, 0, 5, 3);
        let wf = WeightField::uniform(&area);
        let sources: Vec<Point> = (0..3).map(|y| Point::new(0, y)).collect();
        let targets: Vec<Point> = (0..3).map(|y| Point::new(4, y)).collect();
        let (cost, path) = shortest_path(&area, &wf, &sources, &targets).unwrap();
        assert_eq!(cost, 5.0);
        assert_eq!(path.len(), 5);
        // Deterministic tie-break: the smallest-index row wins.
        assert!(path.vertices().iter().all(|p| p.y == 0));
        assert!(path.is_simple());
    }

    #[test]
    fn cost_equals_path_resum() {
        let area = GridBox::square(4);
        let weights: Vec<f64> = (0..16)
            .map(|i| 0.3 + 0.17 * ((i * 7 % 11) as f64))
            .collect();
        let wf = WeightField::from_weights(area, weights);
        let sources: Vec<Point> = (0..4).map(|y| Point::new(0, y)).collect();
        let targets: Vec<Point> = (0..4).map(|y| Point::new(3, y)).collect();
        let (cost, path) = shortest_path(&area, &wf, &sources, &targets).unwrap();
        let mut acc = 0.0;
        for v in path.vertices() {
            acc += wf.weight(*v);
        }
        assert_eq!(cost, acc, "identical summation order must be bit-exact");
    }

    #[test]
    fn pruned_max_distance_matches_naive() {
        // Big enough to trigger the block-pruned route.
        let area = GridBox::new(0, 0, 32, 24);
        let weights: Vec<f64> = (0..area.vertex_count())
            .map(|i| 0.5 + ((i as u64).wrapping_mul(2654435761) % 1000) as f64 / 700.0)
            .collect();
        let wf = WeightField::from_weights(area, weights);
        let pool: Vec<Point> = area.vertices().collect();
        let (pruned, _) = max_pairwise_distance(&area, &wf, &pool);

        let mut scratch = DijkstraScratch::new(area.vertex_count());
        let mut naive = f64::NEG_INFINITY;
        for &src in &pool {
            scratch.run_all(&area, &wf, &[src]);
            for idx in 0..area.vertex_count() {
                naive = naive.max(scratch.dist(idx));
            }
        }
        assert_eq!(pruned, naive);
    }
}
