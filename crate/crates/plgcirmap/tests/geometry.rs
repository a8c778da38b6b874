mod common;

use common::*;
use plgcirmap::error::Error;
use plgcirmap::geometry::{
    domain_from_json, domain_to_json, point_in_circular, point_in_polygon, signed_area,
    validate_domain, Alpha, CircularDomain, PointLocation,
};

#[test]
fn signed_area_orientation() {
    let sq = square(c(0.0, 0.0), 0.5); // unit square, counterclockwise
    assert!((signed_area(&sq) - 1.0).abs() < 1e-15);
    let mut rev = sq.clone();
    rev.reverse();
    assert!((signed_area(&rev) + 1.0).abs() < 1e-15);
}

#[test]
fn point_in_polygon_cases() {
    let sq = square(c(0.5, 0.5), 0.5); // [0,1]^2
    assert_eq!(point_in_polygon(c(0.5, 0.5), &sq), PointLocation::Inside);
    assert_eq!(point_in_polygon(c(2.0, 0.5), &sq), PointLocation::Outside);
    assert_eq!(point_in_polygon(c(0.5, 0.0), &sq), PointLocation::Boundary);
    assert_eq!(point_in_polygon(c(0.0, 0.0), &sq), PointLocation::Boundary);
    // Point level with a vertex but outside.
    assert_eq!(point_in_polygon(c(-1.0, 1.0), &sq), PointLocation::Outside);
}

#[test]
fn bowtie_is_self_intersecting() {
    let bowtie = vec![c(0.0, 0.0), c(1.0, 1.0), c(1.0, 0.0), c(0.0, 1.0)];
    let err = validate_domain(vec![bowtie], Alpha::Finite(c(0.25, 0.5)), None).unwrap_err();
    assert!(matches!(err, Error::SelfIntersection { polygon: 0 }));
}

#[test]
fn too_few_vertices() {
    let err = validate_domain(
        vec![vec![c(0.0, 0.0), c(1.0, 0.0)]],
        Alpha::Finite(c(0.5, 0.5)),
        None,
    )
    .unwrap_err();
    assert!(matches!(err, Error::TooFewVertices { polygon: 0 }));
}

#[test]
fn repeated_vertex() {
    let poly = vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)];
    let err = validate_domain(vec![poly], Alpha::Finite(c(0.3, 0.3)), None).unwrap_err();
    assert!(matches!(
        err,
        Error::RepeatedVertex {
            polygon: 0,
            vertex: 1
        }
    ));
}

#[test]
fn wrong_orientation_is_reversed_with_warning() {
    let mut sq = square(c(0.0, 0.0), 1.0);
    sq.reverse(); // clockwise outer boundary of a bounded domain
    let (domain, warnings) = validate_domain(vec![sq], Alpha::Finite(c(0.0, 0.0)), None).unwrap();
    assert_eq!(warnings.len(), 1);
    assert!(warnings[0].contains("counterclockwise"));
    assert!(signed_area(&domain.polygons[0]) > 0.0);
}

#[test]
fn hole_orientation_is_reversed_with_warning() {
    // Hole given counterclockwise; must become clockwise.
    let (domain, warnings) = validate_domain(
        vec![square(c(0.0, 0.0), 0.5), square(c(0.0, 0.0), 2.0)],
        Alpha::Finite(c(1.2, 0.0)),
        None,
    )
    .unwrap();
    assert_eq!(warnings.len(), 1);
    assert!(warnings[0].contains("polygon 1"));
    assert!(signed_area(&domain.polygons[0]) < 0.0);
}

#[test]
fn overlapping_polygons_rejected() {
    let a: Vec<_> = square(c(0.0, 0.0), 1.0).into_iter().rev().collect();
    let b: Vec<_> = square(c(1.0, 0.0), 1.0).into_iter().rev().collect();
    let err = validate_domain(vec![a, b], Alpha::Infinity, None).unwrap_err();
    assert!(matches!(err, Error::PolygonOverlap { a: 0, b: 1 }));
}

#[test]
fn bad_nesting_bounded() {
    // "Hole" lies outside the outer polygon.
    let hole: Vec<_> = square(c(5.0, 0.0), 0.5).into_iter().rev().collect();
    let err = validate_domain(
        vec![hole, square(c(0.0, 0.0), 1.0)],
        Alpha::Finite(c(0.0, 0.0)),
        None,
    )
    .unwrap_err();
    assert!(matches!(err, Error::BadNesting { kind: "bounded" }));
}

#[test]
fn bad_nesting_unbounded() {
    // Nested polygons are not allowed for an unbounded domain.
    let a: Vec<_> = square(c(0.0, 0.0), 0.5).into_iter().rev().collect();
    let b: Vec<_> = square(c(0.0, 0.0), 2.0).into_iter().rev().collect();
    let err = validate_domain(vec![a, b], Alpha::Infinity, None).unwrap_err();
    assert!(matches!(err, Error::BadNesting { kind: "unbounded" }));
}

#[test]
fn alpha_outside_rejected() {
    let err = validate_domain(
        vec![square(c(0.0, 0.0), 1.0)],
        Alpha::Finite(c(5.0, 0.0)),
        None,
    )
    .unwrap_err();
    assert!(matches!(err, Error::AlphaOutside));
}

#[test]
fn alpha_inside_hole_rejected() {
    let d = square_annulus_domain();
    let err = validate_domain(d.polygons.clone(), Alpha::Finite(c(0.0, 0.0)), None).unwrap_err();
    assert!(matches!(err, Error::AlphaOutside));
}

#[test]
fn beta_out_of_range_rejected() {
    let err = validate_domain(
        vec![square(c(0.0, 0.0), 1.0)],
        Alpha::Finite(c(0.0, 0.0)),
        Some(7),
    )
    .unwrap_err();
    assert!(matches!(err, Error::BetaNotVertex { vertex: 7 }));
}

#[test]
fn cusp_angle_rejected() {
    let sliver = vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1e-8)];
    let err = validate_domain(vec![sliver], Alpha::Finite(c(0.9, 1e-9)), None).unwrap_err();
    assert!(matches!(err, Error::CuspAngle { polygon: 0, .. }));
}

#[test]
fn domain_json_round_trip() {
    let mut d = square_annulus_domain();
    d.beta = Some(2);
    let text = domain_to_json(&d);
    let (d2, warnings) = domain_from_json(&text).unwrap();
    assert!(warnings.is_empty());
    assert_eq!(d2.polygons.len(), d.polygons.len());
    for (p, q) in d.polygons.iter().zip(&d2.polygons) {
        assert_eq!(max_abs_diff(p, q), 0.0);
    }
    assert_eq!(d2.bounded, d.bounded);
    assert_eq!(d2.beta, Some(2));
    assert_eq!(d2.alpha.value(), d.alpha.value());
}

#[test]
fn domain_json_alpha_inf() {
    let text = r#"{"polygons": [[[0,0],[0,1],[1,1],[1,0]]], "alpha": "inf"}"#;
    let (d, _warnings) = domain_from_json(text).unwrap();
    assert!(!d.bounded);
    assert!(!d.alpha.is_finite());
}

#[test]
fn domain_json_rejects_zero_beta() {
    let text =
        r#"{"polygons": [[[0,0],[1,0],[1,1],[0,1]]], "alpha": [0.5,0.5], "beta": {"vertex": 0}}"#;
    let err = domain_from_json(text).unwrap_err();
    assert!(matches!(err, Error::Schema(_)));
}

#[test]
fn domain_json_rejects_bad_alpha() {
    let text = r#"{"polygons": [[[0,0],[1,0],[1,1],[0,1]]], "alpha": "center"}"#;
    assert!(domain_from_json(text).is_err());
}

#[test]
fn point_in_circular_regions() {
    let annulus = CircularDomain {
        centers: vec![c(0.0, 0.0), c(0.0, 0.0)],
        radii: vec![0.3, 1.0],
        bounded: true,
    };
    assert!(point_in_circular(c(0.6, 0.0), &annulus));
    assert!(!point_in_circular(c(0.2, 0.0), &annulus)); // inside the hole
    assert!(!point_in_circular(c(1.1, 0.0), &annulus)); // outside the outer circle
    assert!(!point_in_circular(c(1.0, 0.0), &annulus)); // on the outer circle

    let exterior = CircularDomain {
        centers: vec![c(0.0, 0.0)],
        radii: vec![1.0],
        bounded: false,
    };
    assert!(point_in_circular(c(2.0, 0.0), &exterior));
    assert!(!point_in_circular(c(0.5, 0.0), &exterior));
}

#[test]
fn circular_domain_validity_and_diameter() {
    let good = CircularDomain {
        centers: vec![c(0.0, 0.0), c(0.0, 0.0)],
        radii: vec![0.3, 1.0],
        bounded: true,
    };
    assert!(good.is_valid());
    assert!((good.diameter() - 2.0).abs() < 1e-15);
    let overlapping = CircularDomain {
        centers: vec![c(0.0, 0.0), c(0.4, 0.0)],
        radii: vec![0.3, 0.3],
        bounded: false,
    };
    assert!(!overlapping.is_valid());
}

#[test]
fn diameter_of_polygonal_domain() {
    let d = hexagon_domain();
    // Bounding box [-1, 1.5] x [-1, 1.5].
    let expect = (2.5f64 * 2.5 + 2.5 * 2.5).sqrt();
    assert!((d.diameter() - expect).abs() < 1e-12);
    assert_eq!(d.connectivity(), 1);
}
