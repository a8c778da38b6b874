//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use plgcirmap::geometry::{validate_domain, Alpha, PolygonalDomain};
use plgcirmap::C64;

pub fn c(x: f64, y: f64) -> C64 {
    C64::new(x, y)
}

/// Counterclockwise axis-aligned square around `center`.
pub fn square(center: C64, half: f64) -> Vec<C64> {
    vec![
        center + c(-half, -half),
        center + c(half, -half),
        center + c(half, half),
        center + c(-half, half),
    ]
}

/// Counterclockwise regular `k`-gon of circumradius `r` around the origin.
pub fn regular_polygon(k: usize, r: f64) -> Vec<C64> {
    (0..k)
        .map(|i| C64::from_polar(r, 2.0 * std::f64::consts::PI * i as f64 / k as f64))
        .collect()
}

/// L-shaped six-vertex test polygon with vertices
/// 1.5i, -1+1.5i, -1-i, 1.5-i, 1.5, 1 (counterclockwise).
pub fn hexagon_vertices() -> Vec<C64> {
    vec![
        c(0.0, 1.5),
        c(-1.0, 1.5),
        c(-1.0, -1.0),
        c(1.5, -1.0),
        c(1.5, 0.0),
        c(1.0, 0.0),
    ]
}

/// Bounded simply connected test domain: the six-vertex polygon with α = 0.
pub fn hexagon_domain() -> PolygonalDomain {
    let (domain, warnings) =
        validate_domain(vec![hexagon_vertices()], Alpha::Finite(c(0.0, 0.0)), None).unwrap();
    assert!(warnings.is_empty(), "unexpected warnings: {warnings:?}");
    domain
}

/// Bounded doubly connected domain: outer square of half-width 2, square
/// hole of half-width 0.5, α = 1 + 1i.
pub fn square_annulus_domain() -> PolygonalDomain {
    let hole: Vec<C64> = square(c(0.0, 0.0), 0.5).into_iter().rev().collect();
    let (domain, warnings) = validate_domain(
        vec![hole, square(c(0.0, 0.0), 2.0)],
        Alpha::Finite(c(1.2, 1.2)),
        None,
    )
    .unwrap();
    assert!(warnings.is_empty(), "unexpected warnings: {warnings:?}");
    domain
}

/// Unbounded domain: the exterior of two well-separated squares.
pub fn two_squares_exterior_domain() -> PolygonalDomain {
    let a: Vec<C64> = square(c(-2.0, 0.0), 1.0).into_iter().rev().collect();
    let b: Vec<C64> = square(c(2.0, 0.5), 0.8).into_iter().rev().collect();
    let (domain, warnings) = validate_domain(vec![a, b], Alpha::Infinity, None).unwrap();
    assert!(warnings.is_empty(), "unexpected warnings: {warnings:?}");
    domain
}

pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
