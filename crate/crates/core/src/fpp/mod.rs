//! Vertex-weighted shortest-path engine: path weights, crossing functionals,
//! point-to-point and diameter weights, multi-terminal connectors, and
//! geodesic extraction.

mod solver;
mod steiner;

pub use solver::DijkstraScratch;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gff::{FieldPatch, GaussianField};
use crate::lattice::{boxes_entered, Aspect, GridBox, LatticePath, Point};

/// Default all-pairs vertex budget for diameter computations.
pub const DIAMETER_BUDGET: usize = 65_536;

/// Positive vertex weights `w(x) = exp(gamma * Y(x))` over a box.
#[derive(Debug, Clone)]
pub struct WeightField {
    pub bounds: GridBox,
    pub gamma: f64,
    weights: Vec<f64>,
}

impl WeightField {
    /// Weights from a sampled field restricted to `bounds`.
    pub fn from_gaussian(field: &GaussianField, bounds: &GridBox, gamma: f64) -> Self {
        assert!(field.domain.contains_box(bounds));
        let weights = bounds
            .vertices()
            .map(|p| (gamma * field.value(p)).exp())
            .collect();
        WeightField {
            bounds: *bounds,
            gamma,
            weights,
        }
    }

    /// Weights from an arbitrary field patch restricted to `bounds`.
    pub fn from_patch(patch: &FieldPatch, bounds: &GridBox, gamma: f64) -> Self {
        assert!(patch.domain.contains_box(bounds));
        let weights = bounds
            .vertices()
            .map(|p| (gamma * patch.value(p)).exp())
            .collect();
        WeightField {
            bounds: *bounds,
            gamma,
            weights,
        }
    }

    /// Unit weights (`gamma = 0`).
    pub fn uniform(bounds: &GridBox) -> Self {
        WeightField {
            bounds: *bounds,
            gamma: 0.0,
            weights: vec![1.0; bounds.vertex_count()],
        }
    }

    /// Explicit weights, for synthetic instances.
    pub fn from_weights(bounds: GridBox, weights: Vec<f64>) -> Self {
        assert_eq!(weights.len(), bounds.vertex_count());
        assert!(weights.iter().all(|w| *w > 0.0));
        WeightField {
            bounds,
            gamma: f64::NAN,
            weights,
        }
    }

    pub fn weight(&self, p: Point) -> f64 {
        self.weights[self.bounds.index_of(p)]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// A copy with one vertex weight replaced.
    pub fn with_weight(&self, p: Point, w: f64) -> Self {
        let mut weights = self.weights.clone();
        weights[self.bounds.index_of(p)] = w;
        WeightField {
            bounds: self.bounds,
            gamma: f64::NAN,
            weights,
        }
    }
}

/// Which boundary sets a crossing must join.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CrossingSpec {
    /// Left column to right column.
    LeftRight,
    /// Bottom row to top row.
    BottomTop,
    /// Joins the two longer sides (LR on portrait, BT on landscape, LR on squares).
    Easy,
    /// Joins the two shorter sides; LR on squares by the same convention.
    Hard,
    /// Fully explicit terminal sets.
    Segments {
        sources: Vec<Point>,
        targets: Vec<Point>,
    },
    /// Point-to-point geodesic.
    PointToPoint { from: Point, to: Point },
    /// Connector joining the four boundary segments obtained by removing a
    /// vertical gap of half-width `gap` around mid-height from both the left
    /// and right columns.
    FourSegmentX { gap: i64 },
    /// Connector meeting 2 to 4 explicit terminal sets.
    MultiTerminal { sets: Vec<Vec<Point>> },
}

impl CrossingSpec {
    /// Resolves the variant on a concrete box to explicit terminal sets.
    pub fn resolve(&self, area: &GridBox) -> Result<ResolvedSpec> {
        let column =
            |x: i64| -> Vec<Point> { (area.y0..area.y1()).map(|y| Point::new(x, y)).collect() };
        let row =
            |y: i64| -> Vec<Point> { (area.x0..area.x1()).map(|x| Point::new(x, y)).collect() };
        let lr = || ResolvedSpec::TwoSets {
            sources: column(area.x0),
            targets: column(area.x1() - 1),
        };
        let bt = || ResolvedSpec::TwoSets {
            sources: row(area.y0),
            targets: row(area.y1() - 1),
        };
        let resolved = match self {
            CrossingSpec::LeftRight => lr(),
            CrossingSpec::BottomTop => bt(),
            CrossingSpec::Easy => match area.aspect() {
                Aspect::Portrait | Aspect::Square => lr(),
                Aspect::Landscape => bt(),
            },
            CrossingSpec::Hard => match area.aspect() {
                Aspect::Portrait => bt(),
                Aspect::Landscape | Aspect::Square => lr(),
            },
            CrossingSpec::Segments { sources, targets } => ResolvedSpec::TwoSets {
                sources: sources.clone(),
                targets: targets.clone(),
            },
            CrossingSpec::PointToPoint { from, to } => ResolvedSpec::TwoSets {
                sources: vec![*from],
                targets: vec![*to],
            },
            CrossingSpec::FourSegmentX { gap } => {
                let h = area.height;
                let mid = area.y0 + h / 2;
                let seg = |x: i64, from: i64, to: i64| -> Vec<Point> {
                    (from..to).map(|y| Point::new(x, y)).collect()
                };
                let left = area.x0;
                let right = area.x1() - 1;
                ResolvedSpec::FourSets(vec![
                    seg(left, mid + gap, area.y1()),
                    seg(left, area.y0, mid - gap),
                    seg(right, mid + gap, area.y1()),
                    seg(right, area.y0, mid - gap),
                ])
            }
            CrossingSpec::MultiTerminal { sets } => ResolvedSpec::FourSets(sets.clone()),
        };
        resolved.validate(area)?;
        Ok(resolved)
    }
}

/// Explicit terminal sets after resolving a spec on a box.
#[derive(Debug, Clone)]
pub enum ResolvedSpec {
    TwoSets {
        sources: Vec<Point>,
        targets: Vec<Point>,
    },
    FourSets(Vec<Vec<Point>>),
}

impl ResolvedSpec {
    fn validate(&self, area: &GridBox) -> Result<()> {
        let sets: Vec<&[Point]> = match self {
            ResolvedSpec::TwoSets { sources, targets } => vec![sources, targets],
            ResolvedSpec::FourSets(sets) => sets.iter().map(|s| s.as_slice()).collect(),
        };
        for set in sets {
            if set.is_empty() {
                return Err(Error::EmptySpec);
            }
            for p in set {
                if !area.contains(*p) {
                    return Err(Error::OutOfBox {
                        x: p.x,
                        y: p.y,
                        boxed: *area,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Geodesic payload: a path for two-set crossings, a vertex set for
/// multi-terminal connectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GeodesicBody {
    Path(LatticePath),
    VertexSet(Vec<Point>),
}

/// A minimizing crossing: its weight, the minimizer, and the spec it answers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeodesicResult {
    pub weight: f64,
    pub body: GeodesicBody,
    pub spec: CrossingSpec,
}

impl GeodesicResult {
    /// The path, when the body is a path.
    pub fn path(&self) -> Result<&LatticePath> {
        match &self.body {
            GeodesicBody::Path(p) => Ok(p),
            GeodesicBody::VertexSet(_) => Err(Error::NotAPath),
        }
    }

    pub fn vertices(&self) -> &[Point] {
        match &self.body {
            GeodesicBody::Path(p) => p.vertices(),
            GeodesicBody::VertexSet(v) => v,
        }
    }
}

/// Sum of vertex weights along the listed path, left to right, one term per
/// listed occurrence.
pub fn path_weight(p: &LatticePath, wf: &WeightField) -> Result<f64> {
    let mut acc = 0.0;
    for v in p.vertices() {
        if !wf.bounds.contains(*v) {
            return Err(Error::OutOfBox {
                x: v.x,
                y: v.y,
                boxed: wf.bounds,
            });
        }
        acc += wf.weight(*v);
    }
    Ok(acc)
}

/// Minimum total vertex weight over nearest-neighbor paths inside `area`
/// joining the spec's terminal sets; both endpoint weights count.
pub fn crossing_weight(
    area: &GridBox,
    spec: &CrossingSpec,
    wf: &WeightField,
) -> Result<GeodesicResult> {
    if !wf.bounds.contains_box(area) {
        return Err(Error::OutOfBox {
            x: area.x0,
            y: area.y0,
            boxed: wf.bounds,
        });
    }
    match spec.resolve(area)? {
        ResolvedSpec::TwoSets { sources, targets } => {
            let (weight, path) = solver::shortest_path(area, wf, &sources, &targets)?;
            Ok(GeodesicResult {
                weight,
                body: GeodesicBody::Path(path),
                spec: spec.clone(),
            })
        }
        ResolvedSpec::FourSets(sets) => {
            let (weight, vertices) = steiner::min_connector(area, &sets, wf)?;
            Ok(GeodesicResult {
                weight,
                body: GeodesicBody::VertexSet(vertices),
                spec: spec.clone(),
            })
        }
    }
}

/// Point-to-point crossing weight. The solve runs from the smaller endpoint
/// in row-major order, so swapping the arguments returns bit-identical
/// results.
pub fn point_weight(
    x: Point,
    y: Point,
    area: &GridBox,
    wf: &WeightField,
) -> Result<GeodesicResult> {
    for p in [x, y] {
        if !area.contains(p) {
            return Err(Error::OutOfBox {
                x: p.x,
                y: p.y,
                boxed: *area,
            });
        }
    }
    let (a, b) = if area.index_of(x) <= area.index_of(y) {
        (x, y)
    } else {
        (y, x)
    };
    let mut result = crossing_weight(area, &CrossingSpec::PointToPoint { from: a, to: b }, wf)?;
    result.spec = CrossingSpec::PointToPoint { from: x, to: y };
    Ok(result)
}

/// Pair set for [`diameter_weights`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiameterMode {
    /// Max over boundary-layer vertex pairs.
    Boundary,
    /// Max over all vertex pairs.
    All,
}

/// Maximum point-to-point weight over the designated pair set, via one
/// multi-target search per source.
pub fn diameter_weights(
    area: &GridBox,
    wf: &WeightField,
    mode: DiameterMode,
) -> Result<(f64, (Point, Point))> {
    let n = area.vertex_count();
    if n > DIAMETER_BUDGET {
        return Err(Error::TooLarge {
            size: n,
            limit: DIAMETER_BUDGET,
        });
    }
    if !wf.bounds.contains_box(area) {
        return Err(Error::OutOfBox {
            x: area.x0,
            y: area.y0,
            boxed: wf.bounds,
        });
    }
    let pool: Vec<Point> = match mode {
        DiameterMode::All => area.vertices().collect(),
        DiameterMode::Boundary => area
            .vertices()
            .filter(|p| area.on_boundary_layer(*p))
            .collect(),
    };
    Ok(solver::max_pairwise_distance(area, wf, &pool))
}

/// Number of `s`-tiles of `frame` entered by a geodesic path.
pub fn geodesic_box_count(g: &GeodesicResult, s: i64, frame: &GridBox) -> Result<usize> {
    boxes_entered(g.path()?, s, frame)
}

/// Minimum-weight connected vertex set meeting every terminal set (2 to 4
/// sets), by dynamic programming over (vertex, terminal subset) states.
pub fn min_weight_connector(
    area: &GridBox,
    terminal_sets: &[Vec<Point>],
    wf: &WeightField,
) -> Result<GeodesicResult> {
    if terminal_sets.len() > 4 {
        return Err(Error::TooManyTerminals {
            got: terminal_sets.len(),
        });
    }
    let resolved = ResolvedSpec::FourSets(terminal_sets.to_vec());
    resolved.validate(area)?;
    let (weight, vertices) = steiner::min_connector(area, terminal_sets, wf)?;
    Ok(GeodesicResult {
        weight,
        body: GeodesicBody::VertexSet(vertices),
        spec: CrossingSpec::MultiTerminal {
            sets: terminal_sets.to_vec(),
        },
    })
}
