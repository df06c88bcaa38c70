//! Pass machinery: enumerate passes, detect crossings, build disjoint
//! blow-up collections along paths, and evaluate the pass-cost lower bound.
//!
//! A pass at scale `S` is an `S x S`, `2S x S`, or `S x 2S` subrectangle of
//! the frame whose corners lie on the scale-`S` grid of the frame. A path
//! crosses a pass when a contiguous subpath stays inside it and joins its two
//! longer sides (any two opposite sides for squares).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fpp::{crossing_weight, path_weight, CrossingSpec, WeightField};
use crate::lattice::{blow_up, boxes_entered, Aspect, GridBox, LatticePath, Point};

/// A pass rectangle at some scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Pass {
    pub rect: GridBox,
}

impl Pass {
    /// Validates shape (`S x S`, `2S x S`, `S x 2S`) and grid alignment
    /// relative to the frame origin.
    pub fn new(rect: GridBox, frame: &GridBox, s: i64) -> Result<Self> {
        let shape_ok = (rect.width == s && rect.height == s)
            || (rect.width == 2 * s && rect.height == s)
            || (rect.width == s && rect.height == 2 * s);
        let aligned =
            (rect.x0 - frame.x0).rem_euclid(s) == 0 && (rect.y0 - frame.y0).rem_euclid(s) == 0;
        if !shape_ok || !aligned || !frame.contains_box(&rect) {
            return Err(Error::NonDivisible {
                side: s,
                boxed: rect,
            });
        }
        Ok(Pass { rect })
    }
}

/// All passes of `frame` at scale `s`: squares first, then landscape, then
/// portrait rectangles, each block in row-major order of origin.
pub fn enumerate_passes(frame: &GridBox, s: i64) -> Result<Vec<Pass>> {
    if s < 1 || frame.width % s != 0 || frame.height % s != 0 {
        return Err(Error::NonDivisible {
            side: s,
            boxed: *frame,
        });
    }
    let cols = frame.width / s;
    let rows = frame.height / s;
    let mut out = Vec::new();
    let mut push_all = |w_tiles: i64, h_tiles: i64| {
        for j in 0..=(rows - h_tiles) {
            for i in 0..=(cols - w_tiles) {
                out.push(Pass {
                    rect: GridBox::new(
                        frame.x0 + i * s,
                        frame.y0 + j * s,
                        w_tiles * s,
                        h_tiles * s,
                    ),
                });
            }
        }
    };
    push_all(1, 1);
    push_all(2, 1);
    push_all(1, 2);
    Ok(out)
}

/// Sides a contiguous run inside a rectangle has touched.
#[derive(Default, Clone, Copy)]
struct Touched {
    left: bool,
    right: bool,
    bottom: bool,
    top: bool,
}

impl Touched {
    fn note(&mut self, p: Point, rect: &GridBox) {
        self.left |= p.x == rect.x0;
        self.right |= p.x == rect.x1() - 1;
        self.bottom |= p.y == rect.y0;
        self.top |= p.y == rect.y1() - 1;
    }

    fn joins_longer_sides(&self, rect: &GridBox) -> bool {
        match rect.aspect() {
            Aspect::Portrait => self.left && self.right,
            Aspect::Landscape => self.bottom && self.top,
            Aspect::Square => (self.left && self.right) || (self.bottom && self.top),
        }
    }
}

/// First path index at which a crossing of `rect` completes, if any.
fn first_crossing_index(path: &LatticePath, rect: &GridBox) -> Option<usize> {
    let mut run = Touched::default();
    let mut inside = false;
    for (i, p) in path.vertices().iter().enumerate() {
        if rect.contains(*p) {
            if !inside {
                run = Touched::default();
                inside = true;
            }
            run.note(*p, rect);
            if run.joins_longer_sides(rect) {
                return Some(i);
            }
        } else {
            inside = false;
        }
    }
    None
}

/// True iff some contiguous subpath lies in the pass and joins its two
/// longer sides (any two opposite sides for squares).
pub fn crosses_pass(path: &LatticePath, pass: &Pass) -> bool {
    first_crossing_index(path, &pass.rect).is_some()
}

/// A disjoint-blow-up family of passes crossed by one path.
#[derive(Debug, Clone)]
pub struct PassCollection {
    pub passes: Vec<Pass>,
    pub frame: GridBox,
    pub scale: i64,
    pub path: LatticePath,
}

impl PassCollection {
    /// Exact pairwise disjointness of the blow-ups, as vertex sets.
    pub fn blow_ups_disjoint(&self) -> bool {
        let blown: Vec<GridBox> = self.passes.iter().map(|p| blow_up(&p.rect)).collect();
        for i in 0..blown.len() {
            for j in (i + 1)..blown.len() {
                let a = &blown[i];
                let b = &blown[j];
                let overlap_x = a.x0 < b.x1() && b.x0 < a.x1();
                let overlap_y = a.y0 < b.y1() && b.y0 < a.y1();
                if overlap_x && overlap_y {
                    return false;
                }
            }
        }
        true
    }

    /// Crossed-pass density `|collection| / ||path||_S`.
    pub fn pass_density(&self) -> f64 {
        let entered = boxes_entered(&self.path, self.scale, &self.frame)
            .expect("collection path stays in its frame");
        self.passes.len() as f64 / entered as f64
    }

    /// Stable 64-bit id of the source path (FNV-1a over the vertex list).
    pub fn path_id(&self) -> u64 {
        let mut h = 0xcbf2_9ce4_8422_2325u64;
        for v in self.path.vertices() {
            for word in [v.x as u64, v.y as u64] {
                for byte in word.to_le_bytes() {
                    h ^= byte as u64;
                    h = h.wrapping_mul(0x0000_0100_0000_01b3);
                }
            }
        }
        h
    }

    /// JSON export: the pass rectangles plus the source path id.
    pub fn to_export_json(&self) -> serde_json::Value {
        serde_json::json!({
            "frame": self.frame,
            "scale": self.scale,
            "path_id": self.path_id(),
            "passes": self.passes.iter().map(|p| p.rect).collect::<Vec<_>>(),
        })
    }
}

/// Walks the path and, for every frame column with index = 1 mod 3, selects
/// the earliest-crossed pass contained in that column. The single-column
/// width plus three-column spacing keeps the blow-ups pairwise disjoint, and
/// every left-right crossing yields at least floor(K/3) passes.
pub fn greedy_disjoint_passes(
    path: &LatticePath,
    frame: &GridBox,
    s: i64,
) -> Result<PassCollection> {
    if s < 1 || frame.width % s != 0 || frame.height % s != 0 {
        return Err(Error::NonDivisible {
            side: s,
            boxed: *frame,
        });
    }
    for v in path.vertices() {
        if !frame.contains(*v) {
            return Err(Error::OutOfFrame {
                x: v.x,
                y: v.y,
                frame: *frame,
            });
        }
    }
    let cols = frame.width / s;
    let rows = frame.height / s;
    let mut chosen: Vec<(usize, Pass)> = Vec::new();
    let mut col = 1i64;
    while col < cols {
        let x = frame.x0 + col * s;
        // Candidates inside the column: squares and portrait rectangles.
        let mut best: Option<(usize, Pass)> = None;
        for j in 0..rows {
            for h_tiles in [1i64, 2] {
                if j + h_tiles > rows {
                    continue;
                }
                let rect = GridBox::new(x, frame.y0 + j * s, s, h_tiles * s);
                if let Some(ci) = first_crossing_index(path, &rect) {
                    if best.as_ref().is_none_or(|(bi, _)| ci < *bi) {
                        best = Some((ci, Pass { rect }));
                    }
                }
            }
        }
        if let Some(b) = best {
            chosen.push(b);
        }
        col += 3;
    }
    chosen.sort_by_key(|(ci, _)| *ci);
    Ok(PassCollection {
        passes: chosen.into_iter().map(|(_, p)| p).collect(),
        frame: *frame,
        scale: s,
        path: path.clone(),
    })
}

/// Cheapest admissible crossing of a pass: the easy direction for
/// rectangles, the cheaper of the two directions for squares.
pub fn pass_crossing_weight(rect: &GridBox, wf: &WeightField) -> Result<f64> {
    match rect.aspect() {
        Aspect::Portrait => Ok(crossing_weight(rect, &CrossingSpec::LeftRight, wf)?.weight),
        Aspect::Landscape => Ok(crossing_weight(rect, &CrossingSpec::BottomTop, wf)?.weight),
        Aspect::Square => {
            let lr = crossing_weight(rect, &CrossingSpec::LeftRight, wf)?.weight;
            let bt = crossing_weight(rect, &CrossingSpec::BottomTop, wf)?.weight;
            Ok(lr.min(bt))
        }
    }
}

/// Both sides of the pass-cost bound: the path's own weight and the sum of
/// cheapest crossings of the collected passes under the same field. The
/// caller asserts `lhs >= rhs`.
pub fn pass_cost_bound(pc: &PassCollection, wf: &WeightField) -> Result<(f64, f64)> {
    let lhs = path_weight(&pc.path, wf)?;
    let mut rhs = 0.0;
    for pass in &pc.passes {
        rhs += pass_crossing_weight(&pass.rect, wf)?;
    }
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn straight_lr(frame: &GridBox, y: i64) -> LatticePath {
        LatticePath::new((frame.x0..frame.x1()).map(|x| Point::new(x, y)).collect())
    }

    #[test]
    fn enumerate_counts() {
        let s = 4;
        // 4S x 4S frame: 16 squares, 12 landscape, 12 portrait.
        let frame = GridBox::new(0, 0, 4 * s, 4 * s);
        let passes = enumerate_passes(&frame, s).unwrap();
        assert_eq!(passes.len(), 40);
        let squares = passes
            .iter()
            .filter(|p| p.rect.aspect() == Aspect::Square)
            .count();
        let landscape = passes
            .iter()
            .filter(|p| p.rect.aspect() == Aspect::Landscape)
            .count();
        let portrait = passes
            .iter()
            .filter(|p| p.rect.aspect() == Aspect::Portrait)
            .count();
        assert_eq!((squares, landscape, portrait), (16, 12, 12));

        // S x S frame: just the square itself.
        assert_eq!(
            enumerate_passes(&GridBox::new(0, 0, s, s), s)
                .unwrap()
                .len(),
            1
        );

        // 2S x S frame: 2 squares + 1 landscape + 0 portrait.
        assert_eq!(
            enumerate_passes(&GridBox::new(0, 0, 2 * s, s), s)
                .unwrap()
                .len(),
            3
        );

        assert!(enumerate_passes(&GridBox::new(0, 0, 6, 6), 4).is_err());
    }

    #[test]
    fn crosses_pass_examples() {
        let pass = Pass::new(GridBox::new(0, 0, 4, 8), &GridBox::new(0, 0, 8, 8), 4).unwrap();
        // Straight segment spanning the short (horizontal) direction.
        let seg = LatticePath::new((0..4).map(|x| Point::new(x, 3)).collect());
        assert!(crosses_pass(&seg, &pass));
        // Touching a single corner vertex is not a crossing.
        let corner = LatticePath::new(vec![Point::new(4, 0), Point::new(3, 0)]);
        assert!(!crosses_pass(&corner, &pass));
        // Entering and leaving through the same long side.
        let bounce = LatticePath::new(vec![
            Point::new(0, 2),
            Point::new(1, 2),
            Point::new(1, 3),
            Point::new(0, 3),
        ]);
        assert!(!crosses_pass(&bounce, &pass));
    }

    #[test]
    fn square_pass_crosses_either_direction() {
        let frame = GridBox::new(0, 0, 4, 4);
        let pass = Pass::new(frame, &frame, 4).unwrap();
        let vertical = LatticePath::new((0..4).map(|y| Point::new(2, y)).collect());
        assert!(crosses_pass(&vertical, &pass));
    }

    #[test]
    fn greedy_on_straight_path() {
        let s = 4;
        let frame = GridBox::new(0, 0, 6 * s, 2 * s);
        let path = straight_lr(&frame, 5);
        let pc = greedy_disjoint_passes(&path, &frame, s).unwrap();
        // Columns 1 and 4 contribute one pass each.
        assert_eq!(pc.passes.len(), 2);
        assert!(pc.blow_ups_disjoint());
        assert!(pc.passes.iter().all(|p| crosses_pass(&path, p)));
    }

    #[test]
    fn greedy_covers_odd_row_straddle() {
        // A staircase hugging an odd tile boundary crosses no square but does
        // cross a grid-aligned portrait pass; the greedy must find it.
        let s = 4;
        let frame = GridBox::new(0, 0, 6 * s, 4 * s);
        let mut v = Vec::new();
        // Enter column 1 on row boundary y=7/8 (tiles 1 and 2).
        for x in 0..=5 {
            v.push(Point::new(x, 7));
        }
        v.push(Point::new(5, 8));
        for x in 6..24 {
            v.push(Point::new(x, 8));
        }
        let path = LatticePath::new(v);
        let pc = greedy_disjoint_passes(&path, &frame, s).unwrap();
        assert!(
            pc.passes.len() >= 2,
            "both selected columns must yield a pass"
        );
        assert!(pc.blow_ups_disjoint());
    }

    #[test]
    fn export_json_lists_rectangles_and_path_id() {
        let s = 4;
        let frame = GridBox::new(0, 0, 6 * s, 2 * s);
        let path = straight_lr(&frame, 5);
        let pc = greedy_disjoint_passes(&path, &frame, s).unwrap();
        let doc = pc.to_export_json();
        assert_eq!(doc["scale"], 4);
        assert_eq!(doc["passes"].as_array().unwrap().len(), pc.passes.len());
        assert!(doc["passes"][0]["w"].is_i64());
        assert_eq!(doc["path_id"], pc.path_id());
        // Same path, same id; different path, different id.
        assert_eq!(
            pc.path_id(),
            greedy_disjoint_passes(&path, &frame, s).unwrap().path_id()
        );
        let other = straight_lr(&frame, 6);
        let pc2 = greedy_disjoint_passes(&other, &frame, s).unwrap();
        assert_ne!(pc.path_id(), pc2.path_id());
    }

    #[test]
    fn empty_collection_cost_bound() {
        let frame = GridBox::new(0, 0, 8, 8);
        let wf = WeightField::uniform(&frame);
        let path = straight_lr(&frame, 0);
        let pc = PassCollection {
            passes: vec![],
            frame,
            scale: 4,
            path,
        };
        let (lhs, rhs) = pass_cost_bound(&pc, &wf).unwrap();
        assert_eq!(rhs, 0.0);
        assert!(lhs >= rhs);
    }
}
