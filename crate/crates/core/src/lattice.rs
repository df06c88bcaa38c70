//! Integer-lattice geometry: half-open boxes, blow-ups, dyadic tilings and
//! lattice paths.
//!
//! A box `[x0, x0+w) x [y0, y0+h)` always counts vertices, so "side length S"
//! means S vertices per side. Everything here is immutable and pure.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// A lattice vertex; serializes as a `[x, y]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.x, self.y).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (x, y) = <(i64, i64)>::deserialize(d)?;
        Ok(Point { x, y })
    }
}

impl Point {
    pub const fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    /// l1 distance to another vertex.
    pub fn l1(&self, other: &Point) -> i64 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }
}

impl From<(i64, i64)> for Point {
    fn from((x, y): (i64, i64)) -> Self {
        Point { x, y }
    }
}

/// Half-open integer rectangle `[x0, x0+width) x [y0, y0+height)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridBox {
    pub x0: i64,
    pub y0: i64,
    #[serde(rename = "w")]
    pub width: i64,
    #[serde(rename = "h")]
    pub height: i64,
}

/// Aspect classification of a box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aspect {
    Portrait,
    Landscape,
    Square,
}

impl GridBox {
    /// New box; both dimensions must be at least 1.
    pub fn new(x0: i64, y0: i64, width: i64, height: i64) -> Self {
        assert!(width >= 1 && height >= 1, "box dimensions must be positive");
        GridBox {
            x0,
            y0,
            width,
            height,
        }
    }

    /// Square `[0, s) x [0, s)`.
    pub fn square(s: i64) -> Self {
        GridBox::new(0, 0, s, s)
    }

    pub fn x1(&self) -> i64 {
        self.x0 + self.width
    }

    pub fn y1(&self) -> i64 {
        self.y0 + self.height
    }

    pub fn vertex_count(&self) -> usize {
        (self.width as usize) * (self.height as usize)
    }

    /// Exact membership on the half-open bounds.
    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x < self.x1() && p.y >= self.y0 && p.y < self.y1()
    }

    pub fn contains_box(&self, inner: &GridBox) -> bool {
        inner.x0 >= self.x0
            && inner.x1() <= self.x1()
            && inner.y0 >= self.y0
            && inner.y1() <= self.y1()
    }

    pub fn aspect(&self) -> Aspect {
        if self.height > self.width {
            Aspect::Portrait
        } else if self.width > self.height {
            Aspect::Landscape
        } else {
            Aspect::Square
        }
    }

    /// The interior: the box shrunk by the outermost one-vertex layer.
    /// Empty interiors are rejected by the callers that need one.
    pub fn interior(&self) -> Option<GridBox> {
        if self.width <= 2 || self.height <= 2 {
            None
        } else {
            Some(GridBox::new(
                self.x0 + 1,
                self.y0 + 1,
                self.width - 2,
                self.height - 2,
            ))
        }
    }

    /// True iff `p` lies on the outermost one-vertex layer of the box.
    pub fn on_boundary_layer(&self, p: Point) -> bool {
        self.contains(p)
            && (p.x == self.x0 || p.x == self.x1() - 1 || p.y == self.y0 || p.y == self.y1() - 1)
    }

    /// Row-major iteration over all vertices.
    pub fn vertices(&self) -> impl Iterator<Item = Point> + '_ {
        let b = *self;
        (b.y0..b.y1()).flat_map(move |y| (b.x0..b.x1()).map(move |x| Point::new(x, y)))
    }

    /// Row-major linear index of a contained vertex.
    pub fn index_of(&self, p: Point) -> usize {
        debug_assert!(self.contains(p));
        ((p.y - self.y0) as usize) * (self.width as usize) + (p.x - self.x0) as usize
    }

    /// Inverse of `index_of`.
    pub fn point_at(&self, idx: usize) -> Point {
        let w = self.width as usize;
        Point::new(self.x0 + (idx % w) as i64, self.y0 + (idx / w) as i64)
    }
}

impl fmt::Display for GridBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})x[{},{})", self.x0, self.x1(), self.y0, self.y1())
    }
}

/// The box of three times the side lengths centered on `b`.
pub fn blow_up(b: &GridBox) -> GridBox {
    GridBox::new(b.x0 - b.width, b.y0 - b.height, 3 * b.width, 3 * b.height)
}

/// Aligned `s x s` tiles partitioning `b`, row-major.
pub fn dyadic_subboxes(b: &GridBox, s: i64) -> Result<Vec<GridBox>> {
    check_tileable(b, s)?;
    let cols = b.width / s;
    let rows = b.height / s;
    let mut tiles = Vec::with_capacity((cols * rows) as usize);
    for r in 0..rows {
        for c in 0..cols {
            tiles.push(GridBox::new(b.x0 + c * s, b.y0 + r * s, s, s));
        }
    }
    Ok(tiles)
}

fn check_tileable(b: &GridBox, s: i64) -> Result<()> {
    if s < 1
        || b.width % s != 0
        || b.height % s != 0
        || b.x0.rem_euclid(s) != 0
        || b.y0.rem_euclid(s) != 0
    {
        return Err(Error::NonDivisible { side: s, boxed: *b });
    }
    Ok(())
}

/// max(outer.width/inner.width, outer.height/inner.height) for nested boxes.
pub fn box_ratio(outer: &GridBox, inner: &GridBox) -> Result<f64> {
    if !outer.contains_box(inner) {
        return Err(Error::NotNested {
            outer: *outer,
            inner: *inner,
        });
    }
    let rw = outer.width as f64 / inner.width as f64;
    let rh = outer.height as f64 / inner.height as f64;
    Ok(rw.max(rh))
}

/// Nearest-neighbor path, stored as its vertex sequence; serializes as a
/// bare JSON array of `[x, y]` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct LatticePath {
    vertices: Vec<Point>,
}

impl<'de> Deserialize<'de> for LatticePath {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let vertices = Vec::<Point>::deserialize(d)?;
        if vertices.is_empty() {
            return Err(serde::de::Error::custom(
                "a lattice path has at least one vertex",
            ));
        }
        for w in vertices.windows(2) {
            if w[0].l1(&w[1]) != 1 {
                return Err(serde::de::Error::custom(
                    "consecutive path vertices must be neighbors",
                ));
            }
        }
        Ok(LatticePath { vertices })
    }
}

impl LatticePath {
    /// Builds a path, checking non-emptiness and the nearest-neighbor steps.
    pub fn new(vertices: Vec<Point>) -> Self {
        assert!(
            !vertices.is_empty(),
            "a lattice path has at least one vertex"
        );
        for w in vertices.windows(2) {
            assert_eq!(
                w[0].l1(&w[1]),
                1,
                "consecutive path vertices must be lattice neighbors"
            );
        }
        LatticePath { vertices }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> Point {
        self.vertices[0]
    }

    pub fn last(&self) -> Point {
        *self.vertices.last().unwrap()
    }

    /// True when no vertex repeats (geodesics are simple).
    pub fn is_simple(&self) -> bool {
        let mut seen: std::collections::HashSet<Point> = std::collections::HashSet::new();
        self.vertices.iter().all(|v| seen.insert(*v))
    }
}

/// Number of distinct `s`-tiles of `frame` entered by the path, each counted
/// once no matter how often the path revisits it.
pub fn boxes_entered(path: &LatticePath, s: i64, frame: &GridBox) -> Result<usize> {
    check_tileable(frame, s)?;
    let cols = (frame.width / s) as usize;
    let rows = (frame.height / s) as usize;
    let mut seen = vec![false; cols * rows];
    let mut count = 0;
    for v in path.vertices() {
        if !frame.contains(*v) {
            return Err(Error::OutOfFrame {
                x: v.x,
                y: v.y,
                frame: *frame,
            });
        }
        let c = ((v.x - frame.x0) / s) as usize;
        let r = ((v.y - frame.y0) / s) as usize;
        let idx = r * cols + c;
        if !seen[idx] {
            seen[idx] = true;
            count += 1;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blow_up_examples() {
        assert_eq!(
            blow_up(&GridBox::new(0, 0, 4, 4)),
            GridBox::new(-4, -4, 12, 12)
        );
        assert_eq!(
            blow_up(&GridBox::new(0, 0, 1, 1)),
            GridBox::new(-1, -1, 3, 3)
        );
        assert_eq!(
            blow_up(&GridBox::new(2, 0, 4, 2)),
            GridBox::new(-2, -2, 12, 6)
        );
    }

    #[test]
    fn blow_up_contains_and_ratio_three() {
        for b in [
            GridBox::new(0, 0, 5, 3),
            GridBox::new(-7, 2, 1, 9),
            GridBox::new(3, 3, 8, 8),
        ] {
            let big = blow_up(&b);
            assert!(big.contains_box(&b));
            assert_eq!(box_ratio(&big, &b).unwrap(), 3.0);
        }
    }

    #[test]
    fn dyadic_subboxes_examples() {
        let tiles = dyadic_subboxes(&GridBox::square(8), 2).unwrap();
        assert_eq!(tiles.len(), 16);
        let tiles = dyadic_subboxes(&GridBox::new(0, 0, 4, 8), 4).unwrap();
        assert_eq!(tiles.len(), 2);
        assert!(matches!(
            dyadic_subboxes(&GridBox::square(6), 4),
            Err(Error::NonDivisible { .. })
        ));
    }

    #[test]
    fn dyadic_subboxes_cover_disjointly() {
        let b = GridBox::new(-4, -8, 12, 16);
        let tiles = dyadic_subboxes(&b, 4).unwrap();
        let total: usize = tiles.iter().map(|t| t.vertex_count()).sum();
        assert_eq!(total, b.vertex_count());
        for v in b.vertices() {
            assert_eq!(tiles.iter().filter(|t| t.contains(v)).count(), 1);
        }
    }

    #[test]
    fn boxes_entered_examples() {
        let frame = GridBox::square(8);
        let row: Vec<Point> = (0..8).map(|x| Point::new(x, 0)).collect();
        assert_eq!(boxes_entered(&LatticePath::new(row), 4, &frame).unwrap(), 2);

        let single = LatticePath::new(vec![Point::new(3, 3)]);
        assert_eq!(boxes_entered(&single, 4, &frame).unwrap(), 1);
        assert_eq!(boxes_entered(&single, 2, &frame).unwrap(), 1);

        // Enter tile A, tile B, then A again: still 2 tiles.
        let revisit = LatticePath::new(vec![Point::new(3, 0), Point::new(4, 0), Point::new(3, 0)]);
        assert_eq!(boxes_entered(&revisit, 4, &frame).unwrap(), 2);
    }

    #[test]
    fn boxes_entered_rejects_escapes() {
        let frame = GridBox::square(4);
        let p = LatticePath::new(vec![Point::new(3, 0), Point::new(4, 0)]);
        assert!(matches!(
            boxes_entered(&p, 4, &frame),
            Err(Error::OutOfFrame { .. })
        ));
    }

    #[test]
    fn box_ratio_examples() {
        assert_eq!(
            box_ratio(&GridBox::square(8), &GridBox::square(2)).unwrap(),
            4.0
        );
        assert_eq!(
            box_ratio(&GridBox::square(8), &GridBox::square(8)).unwrap(),
            1.0
        );
        assert_eq!(
            box_ratio(&GridBox::new(0, 0, 8, 4), &GridBox::new(0, 0, 4, 4)).unwrap(),
            2.0
        );
        assert!(box_ratio(&GridBox::square(2), &GridBox::new(1, 1, 4, 4)).is_err());
    }

    #[test]
    fn aspect_classification() {
        assert_eq!(GridBox::new(0, 0, 2, 3).aspect(), Aspect::Portrait);
        assert_eq!(GridBox::new(0, 0, 3, 2).aspect(), Aspect::Landscape);
        assert_eq!(GridBox::square(3).aspect(), Aspect::Square);
    }

    #[test]
    fn json_shapes() {
        let b = GridBox::new(1, -2, 3, 4);
        assert_eq!(
            serde_json::to_string(&b).unwrap(),
            r#"{"x0":1,"y0":-2,"w":3,"h":4}"#
        );
        let p = LatticePath::new(vec![Point::new(0, 0), Point::new(1, 0)]);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[[0,0],[1,0]]");
        let back: LatticePath = serde_json::from_str("[[0,0],[1,0],[1,1]]").unwrap();
        assert_eq!(back.len(), 3);
        assert!(serde_json::from_str::<LatticePath>("[[0,0],[2,0]]").is_err());
        assert!(serde_json::from_str::<LatticePath>("[]").is_err());
    }
}
