mod common;

use common::*;
use plgcirmap::discretize::{discretize_polygon, kress_grading, Component};
use plgcirmap::error::Error;
use plgcirmap::C64;
use std::f64::consts::PI;

#[test]
fn kress_grading_endpoints_and_symmetry() {
    for p in [2u32, 3, 5, 8] {
        let (w0, wp0, _) = kress_grading(0.0, p);
        let (w2, wp2, _) = kress_grading(2.0 * PI, p);
        let (wm, _, _) = kress_grading(PI, p);
        assert!(w0.abs() < 1e-14, "w(0) = {w0} for p = {p}");
        assert!((w2 - 2.0 * PI).abs() < 1e-13, "w(2pi) for p = {p}");
        assert!((wm - PI).abs() < 1e-13, "w(pi) for p = {p}");
        // The derivative vanishes to order p - 1 at the endpoints.
        assert!(wp0.abs() < 1e-12);
        assert!(wp2.abs() < 1e-12);
    }
}

#[test]
fn kress_grading_is_monotone() {
    let p = 3;
    let mut prev = -1.0;
    for i in 0..=1000 {
        let s = 2.0 * PI * i as f64 / 1000.0;
        let (w, wp, _) = kress_grading(s, p);
        assert!(w > prev, "w not increasing at s = {s}");
        assert!(wp >= -1e-14, "w' negative at s = {s}");
        prev = w;
    }
}

#[test]
fn kress_grading_derivatives_match_finite_differences() {
    let p = 3;
    let h = 1e-6;
    for &s in &[0.5, 1.3, 2.9, 4.4, 5.7] {
        let (_, wp, wpp) = kress_grading(s, p);
        let (wa, wpa, _) = kress_grading(s - h, p);
        let (wb, wpb, _) = kress_grading(s + h, p);
        assert!((wp - (wb - wa) / (2.0 * h)).abs() < 1e-7);
        assert!((wpp - (wpb - wpa) / (2.0 * h)).abs() < 1e-6);
    }
}

#[test]
fn mesh_size_validation() {
    let d = hexagon_domain();
    assert!(matches!(
        discretize_polygon(&d, 7, 3).unwrap_err(),
        Error::BadMeshSize { n: 7 }
    ));
    assert!(matches!(
        discretize_polygon(&d, 2, 3).unwrap_err(),
        Error::BadMeshSize { n: 2 }
    ));
}

#[test]
fn square_discretization_structure() {
    let (domain, _) = plgcirmap::geometry::validate_domain(
        vec![square(c(0.0, 0.0), 1.0)],
        plgcirmap::geometry::Alpha::Finite(c(0.0, 0.0)),
        None,
    )
    .unwrap();
    let n = 16;
    let disc = discretize_polygon(&domain, n, 3).unwrap();
    assert_eq!(disc.components.len(), 1);
    let comp = &disc.components[0];
    assert_eq!(comp.len(), 4 * n);
    assert_eq!(comp.corners.len(), 4);
    for (k, &tc) in comp.corners.iter().enumerate() {
        assert!((tc - PI / 2.0 * k as f64).abs() < 1e-15);
    }
    // Half-step offset: no node coincides with a corner parameter, and no
    // boundary position coincides with a vertex.
    for &t in &comp.t {
        for &tc in &comp.corners {
            assert!((t - tc).abs() > 1e-12);
        }
    }
    for e in &comp.eta {
        for v in &domain.polygons[0] {
            assert!((e - v).norm() > 1e-12);
        }
        // Every node lies on the square's boundary.
        let on = (e.re.abs() - 1.0).abs() < 1e-13 && e.im.abs() <= 1.0 + 1e-13
            || (e.im.abs() - 1.0).abs() < 1e-13 && e.re.abs() <= 1.0 + 1e-13;
        assert!(on, "node off the boundary: {e}");
    }
    // The tangent never vanishes at the nodes.
    assert!(comp.etap.iter().all(|d| d.norm() > 0.0));
    // Weights integrate constants exactly.
    assert!((comp.weight * comp.len() as f64 - 2.0 * PI).abs() < 1e-12);
}

#[test]
fn perimeter_quadrature_converges() {
    let d = hexagon_domain();
    // Perimeter of the six-vertex polygon.
    let verts = hexagon_vertices();
    let exact: f64 = (0..verts.len())
        .map(|i| (verts[(i + 1) % verts.len()] - verts[i]).norm())
        .sum();
    let mut errs = Vec::new();
    for n in [16usize, 64] {
        let disc = discretize_polygon(&d, n, 3).unwrap();
        let comp = &disc.components[0];
        let approx: f64 = comp.etap.iter().map(|d| comp.weight * d.norm()).sum();
        errs.push((approx - exact).abs() / exact);
    }
    assert!(errs[1] < 1e-3, "perimeter error {} at n = 64", errs[1]);
    assert!(errs[1] < errs[0]);
}

#[test]
fn component_orientation_via_winding() {
    let d = square_annulus_domain();
    let disc = discretize_polygon(&d, 16, 3).unwrap();
    let winding = |comp: &Component, z: C64| -> f64 {
        let acc: C64 = comp
            .eta
            .iter()
            .zip(&comp.etap)
            .map(|(&e, &ep)| comp.weight * ep / (e - z))
            .sum();
        (acc / C64::new(0.0, 2.0 * PI)).re
    };
    // Hole (component 0) clockwise, outer (component 1) counterclockwise.
    assert!((winding(&disc.components[0], c(0.0, 0.0)) + 1.0).abs() < 1e-3);
    assert!((winding(&disc.components[1], c(0.0, 0.0)) - 1.0).abs() < 1e-3);
    assert_eq!(disc.total_nodes(), 2 * 4 * 16);
    assert_eq!(disc.offsets(), vec![0, 64]);
}

#[test]
fn component_from_fns_samples_offset_grid() {
    let n = 8;
    let comp = Component::from_fns(
        n,
        |t| C64::from_polar(2.0, t),
        |t| C64::new(0.0, 2.0) * C64::from_polar(1.0, t),
        |t| -C64::from_polar(2.0, t),
    );
    assert_eq!(comp.len(), n);
    assert!(comp.corners.is_empty());
    let h = 2.0 * PI / n as f64;
    for (r, &t) in comp.t.iter().enumerate() {
        assert!((t - h * (r as f64 + 0.5)).abs() < 1e-15);
    }
    for (e, ep) in comp.eta.iter().zip(&comp.etap) {
        assert!((e.norm() - 2.0).abs() < 1e-14);
        // Tangent orthogonal to the radius for a circle.
        assert!((e.re * ep.re + e.im * ep.im).abs() < 1e-13);
    }
}
