//! Solver-versus-oracle checks: exhaustive path and subset enumerations,
//! exact invariants of the crossing functionals.

mod common;

use common::{exhaustive_min_connector, exhaustive_min_path, synthetic_weights};
use lfpp_core::fpp::{
    crossing_weight, diameter_weights, min_weight_connector, path_weight, point_weight,
    CrossingSpec, DiameterMode, WeightField,
};
use lfpp_core::gff::sample_dgff;
use lfpp_core::lattice::{GridBox, LatticePath, Point};

fn left_column(b: &GridBox) -> Vec<Point> {
    (b.y0..b.y1()).map(|y| Point::new(b.x0, y)).collect()
}

fn right_column(b: &GridBox) -> Vec<Point> {
    (b.y0..b.y1()).map(|y| Point::new(b.x1() - 1, y)).collect()
}

#[test]
fn unit_weight_crossings_are_side_lengths() {
    for (k, l) in [(3i64, 5i64), (8, 2), (6, 6)] {
        let area = GridBox::new(0, 0, k, l);
        let wf = WeightField::uniform(&area);
        let lr = crossing_weight(&area, &CrossingSpec::LeftRight, &wf).unwrap();
        assert_eq!(lr.weight, k as f64);
        assert_eq!(lr.path().unwrap().len(), k as usize);
    }
    // Hard and easy on a portrait box.
    let area = GridBox::new(0, 0, 8, 16);
    let wf = WeightField::uniform(&area);
    let hard = crossing_weight(&area, &CrossingSpec::Hard, &wf).unwrap();
    let easy = crossing_weight(&area, &CrossingSpec::Easy, &wf).unwrap();
    assert_eq!(hard.weight, 16.0);
    assert_eq!(easy.weight, 8.0);
    assert_eq!(hard.weight / easy.weight, 2.0);
}

#[test]
fn crossing_matches_exhaustive_enumeration() {
    let area = GridBox::square(4);
    for trial in 0..100 {
        let weights = synthetic_weights(16, 0.4, 2.5, 1000 + trial);
        let wf = WeightField::from_weights(area, weights);
        let got = crossing_weight(&area, &CrossingSpec::LeftRight, &wf).unwrap();
        let want = exhaustive_min_path(&area, &wf, &left_column(&area), &right_column(&area));
        assert_eq!(got.weight, want, "trial {trial}");
        assert_eq!(path_weight(got.path().unwrap(), &wf).unwrap(), got.weight);
    }
}

#[test]
fn point_weight_matches_exhaustive_enumeration() {
    let area = GridBox::square(4);
    for trial in 0..100 {
        let weights = synthetic_weights(16, 0.4, 2.5, 2000 + trial);
        let wf = WeightField::from_weights(area, weights.clone());
        let x = Point::new((trial % 4) as i64, (trial % 3) as i64);
        let y = Point::new(3 - (trial % 2) as i64, 3);
        let got = point_weight(x, y, &area, &wf).unwrap();
        let want = exhaustive_min_path(&area, &wf, &[x], &[y]);
        assert_eq!(got.weight, want, "trial {trial}");
    }
}

#[test]
fn point_weight_degenerate_and_l1() {
    let area = GridBox::square(5);
    let weights = synthetic_weights(25, 0.5, 2.0, 77);
    let wf = WeightField::from_weights(area, weights);
    let x = Point::new(2, 3);
    let g = point_weight(x, x, &area, &wf).unwrap();
    assert_eq!(g.weight, wf.weight(x));
    assert_eq!(g.path().unwrap().vertices(), &[x]);

    let uf = WeightField::uniform(&area);
    let g = point_weight(Point::new(0, 0), Point::new(3, 4), &area, &uf).unwrap();
    assert_eq!(g.weight, (3 + 4 + 1) as f64);
}

#[test]
fn point_weight_symmetry_is_exact() {
    let area = GridBox::square(5);
    for trial in 0..50 {
        let weights = synthetic_weights(25, 0.3, 3.0, 3000 + trial);
        let wf = WeightField::from_weights(area, weights);
        let x = Point::new((trial % 5) as i64, (trial % 4) as i64);
        let y = Point::new(4 - (trial % 3) as i64, (trial % 5) as i64);
        let a = point_weight(x, y, &area, &wf).unwrap();
        let b = point_weight(y, x, &area, &wf).unwrap();
        assert_eq!(a.weight, b.weight);
        assert_eq!(a.path().unwrap(), b.path().unwrap());
    }
}

#[test]
fn triangle_inequality_exhaustive_six_by_six() {
    let area = GridBox::square(6);
    let weights = synthetic_weights(36, 0.4, 2.2, 99);
    let wf = WeightField::from_weights(area, weights);
    let pts: Vec<Point> = area.vertices().collect();
    let mut d = vec![vec![0.0f64; 36]; 36];
    for (i, &x) in pts.iter().enumerate() {
        for (j, &y) in pts.iter().enumerate() {
            d[i][j] = point_weight(x, y, &area, &wf).unwrap().weight;
        }
    }
    for (i, &_x) in pts.iter().enumerate() {
        for (j, &y) in pts.iter().enumerate() {
            for (k, _z) in pts.iter().enumerate() {
                let lhs = d[i][k];
                let rhs = d[i][j] + d[j][k] - wf.weight(y);
                assert!(lhs <= rhs + 1e-9, "triangle violated at ({i},{j},{k})");
            }
        }
    }
}

#[test]
fn diameter_respects_all_pairs_budget() {
    let area = GridBox::new(0, 0, 300, 300);
    let wf = WeightField::uniform(&area);
    assert!(matches!(
        diameter_weights(&area, &wf, DiameterMode::All),
        Err(lfpp_core::Error::TooLarge { .. })
    ));
}

#[test]
fn diameter_examples_and_brute_force() {
    // gamma = 0 on a square: opposite corners, 2S - 1 vertices.
    let s = 5;
    let area = GridBox::square(s);
    let uf = WeightField::uniform(&area);
    let (dmax, _) = diameter_weights(&area, &uf, DiameterMode::All).unwrap();
    assert_eq!(dmax, (2 * s - 1) as f64);
    let (dboundary, _) = diameter_weights(&area, &uf, DiameterMode::Boundary).unwrap();
    assert!(dboundary <= dmax);

    // 3x3 random field against brute force over all 36 unordered pairs.
    let area = GridBox::square(3);
    let weights = synthetic_weights(9, 0.3, 2.0, 512);
    let wf = WeightField::from_weights(area, weights);
    let pts: Vec<Point> = area.vertices().collect();
    let mut want = f64::NEG_INFINITY;
    for i in 0..pts.len() {
        for j in i..pts.len() {
            want = want.max(exhaustive_min_path(&area, &wf, &[pts[i]], &[pts[j]]));
        }
    }
    let (got, argmax) = diameter_weights(&area, &wf, DiameterMode::All).unwrap();
    assert_eq!(got, want);
    let check = point_weight(argmax.0, argmax.1, &area, &wf).unwrap();
    assert_eq!(check.weight, got);
}

#[test]
fn steiner_matches_subset_brute_force() {
    let area = GridBox::square(3);
    let corners: Vec<Vec<Point>> = [(0, 0), (2, 0), (0, 2), (2, 2)]
        .iter()
        .map(|&(x, y)| vec![Point::new(x, y)])
        .collect();
    for trial in 0..50 {
        let weights = synthetic_weights(9, 0.3, 2.0, 4000 + trial);
        let wf = WeightField::from_weights(area, weights);
        let got = min_weight_connector(&area, &corners, &wf).unwrap();
        let want = exhaustive_min_connector(&area, &wf, &corners);
        assert!(
            (got.weight - want).abs() < 1e-12,
            "trial {trial}: {} vs {want}",
            got.weight
        );
        // Reported vertex set must reproduce the weight.
        let resum: f64 = got.vertices().iter().map(|p| wf.weight(*p)).sum();
        assert!((resum - got.weight).abs() < 1e-12);
    }
}

#[test]
fn steiner_two_sets_equals_crossing() {
    for trial in 0..50 {
        let area = GridBox::square(5);
        let weights = synthetic_weights(25, 0.4, 2.0, 5000 + trial);
        let wf = WeightField::from_weights(area, weights);
        let sets = vec![left_column(&area), right_column(&area)];
        let conn = min_weight_connector(&area, &sets, &wf).unwrap();
        let cross = crossing_weight(&area, &CrossingSpec::LeftRight, &wf).unwrap();
        assert!((conn.weight - cross.weight).abs() < 1e-12, "trial {trial}");
    }
}

#[test]
fn steiner_bounded_by_pairwise_geodesic_union() {
    let area = GridBox::square(6);
    for trial in 0..20 {
        let weights = synthetic_weights(36, 0.3, 2.4, 6000 + trial);
        let wf = WeightField::from_weights(area, weights);
        let terminals = [
            Point::new(0, 0),
            Point::new(5, 0),
            Point::new(2, 5),
            Point::new(5, 5),
        ];
        let sets: Vec<Vec<Point>> = terminals.iter().map(|t| vec![*t]).collect();
        let conn = min_weight_connector(&area, &sets, &wf).unwrap();
        // Union of the three geodesics out of terminal 0 is a feasible connector.
        let mut union: std::collections::BTreeSet<Point> = std::collections::BTreeSet::new();
        for t in &terminals[1..] {
            let g = point_weight(terminals[0], *t, &area, &wf).unwrap();
            union.extend(g.path().unwrap().vertices().iter().copied());
        }
        let union_weight: f64 = union.iter().map(|p| wf.weight(*p)).sum();
        assert!(conn.weight <= union_weight + 1e-12, "trial {trial}");
    }
}

#[test]
fn four_segment_x_matches_explicit_connector() {
    // Box [0,3) x [0,4), gap 1 around mid-height 2: the four segments are the
    // singletons (0,3), (0,0), (2,3), (2,0).
    let area = GridBox::new(0, 0, 3, 4);
    let spec = CrossingSpec::FourSegmentX { gap: 1 };
    let segments: Vec<Vec<Point>> = vec![
        vec![Point::new(0, 3)],
        vec![Point::new(0, 0)],
        vec![Point::new(2, 3)],
        vec![Point::new(2, 0)],
    ];
    for trial in 0..30 {
        let weights = synthetic_weights(12, 0.4, 2.0, 8000 + trial);
        let wf = WeightField::from_weights(area, weights);
        let x = crossing_weight(&area, &spec, &wf).unwrap();
        assert!(matches!(x.body, lfpp_core::fpp::GeodesicBody::VertexSet(_)));
        let explicit = min_weight_connector(&area, &segments, &wf).unwrap();
        assert_eq!(x.weight, explicit.weight, "trial {trial}");
        let brute = exhaustive_min_connector(&area, &wf, &segments);
        assert!((x.weight - brute).abs() < 1e-12, "trial {trial}");
    }
    // A gap that swallows the half-columns leaves empty segments.
    let bad = CrossingSpec::FourSegmentX { gap: 2 };
    let wf = WeightField::uniform(&area);
    assert!(crossing_weight(&area, &bad, &wf).is_err());
}

#[test]
fn four_terminals_rejected_above_limit() {
    let area = GridBox::square(3);
    let wf = WeightField::uniform(&area);
    let sets: Vec<Vec<Point>> = (0..5).map(|i| vec![Point::new(i % 3, i / 3)]).collect();
    assert!(min_weight_connector(&area, &sets, &wf).is_err());
}

#[test]
fn monotone_in_single_vertex_weight() {
    let area = GridBox::square(5);
    for trial in 0..100 {
        let weights = synthetic_weights(25, 0.4, 2.0, 7000 + trial);
        let wf = WeightField::from_weights(area, weights);
        let base = crossing_weight(&area, &CrossingSpec::LeftRight, &wf)
            .unwrap()
            .weight;
        let bump = area.point_at((trial % 25) as usize);
        let wf2 = wf.with_weight(bump, wf.weight(bump) * 1.5);
        let bumped = crossing_weight(&area, &CrossingSpec::LeftRight, &wf2)
            .unwrap()
            .weight;
        assert!(bumped >= base, "trial {trial}");
    }
}

#[test]
fn dispatcher_is_pathwise() {
    let portrait = GridBox::new(0, 0, 4, 7);
    let weights = synthetic_weights(28, 0.4, 2.0, 123);
    let wf = WeightField::from_weights(portrait, weights);
    let easy = crossing_weight(&portrait, &CrossingSpec::Easy, &wf).unwrap();
    let lr = crossing_weight(&portrait, &CrossingSpec::LeftRight, &wf).unwrap();
    assert_eq!(easy.weight, lr.weight);
    assert_eq!(easy.path().unwrap(), lr.path().unwrap());
    let hard = crossing_weight(&portrait, &CrossingSpec::Hard, &wf).unwrap();
    let bt = crossing_weight(&portrait, &CrossingSpec::BottomTop, &wf).unwrap();
    assert_eq!(hard.path().unwrap(), bt.path().unwrap());

    // Squares: both easy and hard resolve to left-right.
    let square = GridBox::square(5);
    let wf = WeightField::uniform(&square);
    let e = crossing_weight(&square, &CrossingSpec::Easy, &wf).unwrap();
    let h = crossing_weight(&square, &CrossingSpec::Hard, &wf).unwrap();
    assert_eq!(e.path().unwrap(), h.path().unwrap());
}

#[test]
fn gamma_continuity_bound_at_zero() {
    let base = GridBox::square(6);
    let field = sample_dgff(&base, 404);
    let max_abs = base
        .vertices()
        .map(|p| field.value(p).abs())
        .fold(0.0, f64::max);
    let psi0 = crossing_weight(
        &base,
        &CrossingSpec::LeftRight,
        &WeightField::uniform(&base),
    )
    .unwrap()
    .weight;
    for gamma in [0.01, 0.05, 0.1, 0.2, 0.3] {
        let wf = WeightField::from_gaussian(&field, &base, gamma);
        let psi = crossing_weight(&base, &CrossingSpec::LeftRight, &wf)
            .unwrap()
            .weight;
        let bound = psi0 * ((gamma * max_abs).exp() - 1.0);
        assert!((psi - psi0).abs() <= bound + 1e-12, "gamma={gamma}");
    }
}

#[test]
fn path_weight_examples() {
    let area = GridBox::new(0, 0, 7, 2);
    let uf = WeightField::uniform(&area);
    let p = LatticePath::new((0..7).map(|x| Point::new(x, 0)).collect());
    assert_eq!(path_weight(&p, &uf).unwrap(), 7.0);

    // Single vertex with Y = ln 2 / gamma gives weight 2.
    let gamma = 0.7;
    let mut weights = vec![1.0; 14];
    weights[0] = (gamma * ((2.0f64).ln() / gamma)).exp();
    let wf = WeightField::from_weights(area, weights);
    let single = LatticePath::new(vec![Point::new(0, 0)]);
    assert!((path_weight(&single, &wf).unwrap() - 2.0).abs() < 1e-12);

    // Out-of-box vertices are rejected.
    let stray = LatticePath::new(vec![Point::new(6, 1), Point::new(6, 2)]);
    assert!(path_weight(&stray, &uf).is_err());

    // Independent re-summation along a random field path.
    let base = GridBox::square(4);
    let field = sample_dgff(&base, 9);
    let gamma = 0.4;
    let wf = WeightField::from_gaussian(&field, &base, gamma);
    let g = crossing_weight(&base, &CrossingSpec::LeftRight, &wf).unwrap();
    let resum: f64 = g
        .path()
        .unwrap()
        .vertices()
        .iter()
        .map(|v| (gamma * field.value(*v)).exp())
        .sum();
    assert!((resum - g.weight).abs() <= 1e-12 * g.weight);
}

#[test]
fn geodesic_box_count_consistency() {
    use lfpp_core::fpp::geodesic_box_count;
    use lfpp_core::lattice::boxes_entered;
    let frame = GridBox::square(8);
    let uf = WeightField::uniform(&frame);
    let g = crossing_weight(&frame, &CrossingSpec::LeftRight, &uf).unwrap();
    assert_eq!(geodesic_box_count(&g, 4, &frame).unwrap(), 2);
    assert_eq!(geodesic_box_count(&g, 8, &frame).unwrap(), 1);
    let field = sample_dgff(&frame, 5151);
    let wf = WeightField::from_gaussian(&field, &frame, 0.3);
    let g = crossing_weight(&frame, &CrossingSpec::LeftRight, &wf).unwrap();
    assert_eq!(
        geodesic_box_count(&g, 2, &frame).unwrap(),
        boxes_entered(g.path().unwrap(), 2, &frame).unwrap()
    );
    // Connectors are not paths.
    let conn = min_weight_connector(
        &frame,
        &[
            vec![Point::new(0, 0)],
            vec![Point::new(7, 7)],
            vec![Point::new(0, 7)],
        ],
        &wf,
    )
    .unwrap();
    assert!(geodesic_box_count(&conn, 4, &frame).is_err());
}
