//! Graded-mesh parametrization of polygon boundaries.
//!
//! Each side of a polygon is parametrized over a uniform window of `[0, 2π)`
//! through the Kress substitution `w(s)`, whose derivative vanishes to order
//! `p - 1` at the side endpoints.  The quadrature nodes stay uniform in the
//! parameter while the boundary positions cluster at the corners, which
//! restores high-order accuracy of the periodic trapezoidal rule in the
//! presence of corner singularities.  Nodes carry a half-step offset so no
//! node ever coincides with a corner.

use crate::error::{Error, Result};
use crate::geometry::PolygonalDomain;
use crate::C64;
use std::f64::consts::PI;

/// One discretized boundary component.
#[derive(Debug, Clone)]
pub struct Component {
    /// Uniform parameter nodes on `[0, 2π)`, offset by half a step.
    pub t: Vec<f64>,
    /// Boundary positions η(t).
    pub eta: Vec<C64>,
    /// First parametrization derivative η′(t).
    pub etap: Vec<C64>,
    /// Second parametrization derivative η″(t).
    pub etapp: Vec<C64>,
    /// Trapezoidal weight, `2π / N`.
    pub weight: f64,
    /// Corner parameters (side junctions); empty for smooth curves.
    pub corners: Vec<f64>,
}

impl Component {
    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }

    /// Build a component by sampling closures for η, η′, η″ at `n` offset
    /// uniform nodes.  Used for smooth curves (circles, ellipses).
    pub fn from_fns(
        n: usize,
        eta: impl Fn(f64) -> C64,
        etap: impl Fn(f64) -> C64,
        etapp: impl Fn(f64) -> C64,
    ) -> Self {
        let h = 2.0 * PI / n as f64;
        let t: Vec<f64> = (0..n).map(|r| h * (r as f64 + 0.5)).collect();
        Component {
            eta: t.iter().map(|&s| eta(s)).collect(),
            etap: t.iter().map(|&s| etap(s)).collect(),
            etapp: t.iter().map(|&s| etapp(s)).collect(),
            weight: h,
            corners: Vec::new(),
            t,
        }
    }
}

/// Discretized boundary of a (possibly multiply connected) domain.
#[derive(Debug, Clone)]
pub struct BoundaryDiscretization {
    pub components: Vec<Component>,
    /// Grading exponent used to build the mesh.
    pub grading_p: u32,
    /// Nodes per polygon side.
    pub n_per_side: usize,
}

impl BoundaryDiscretization {
    pub fn total_nodes(&self) -> usize {
        self.components.iter().map(Component::len).sum()
    }

    /// Start index of each component in the node concatenation.
    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.components.len());
        let mut acc = 0;
        for c in &self.components {
            out.push(acc);
            acc += c.len();
        }
        out
    }

    /// Single-component discretization from a ready-made component.
    pub fn single(component: Component) -> Self {
        BoundaryDiscretization {
            components: vec![component],
            grading_p: 0,
            n_per_side: 0,
        }
    }
}

/// Kress grading function and its first two derivatives.
///
/// `w(s) = 2π v(s)^p / (v(s)^p + v(2π - s)^p)` with the cubic blending
/// polynomial `v`; strictly increasing on `[0, 2π]` with `w(0) = 0`,
/// `w(2π) = 2π`, and `w′` vanishing to order `p - 1` at both endpoints.
pub fn kress_grading(s: f64, p: u32) -> (f64, f64, f64) {
    debug_assert!(p >= 2);
    let pf = f64::from(p);
    let v = |x: f64| (1.0 / pf - 0.5) * ((PI - x) / PI).powi(3) + (x - PI) / (PI * pf) + 0.5;
    let vp = |x: f64| -3.0 * (1.0 / pf - 0.5) * ((PI - x) / PI).powi(2) / PI + 1.0 / (pf * PI);
    let vpp = |x: f64| 6.0 * (1.0 / pf - 0.5) * ((PI - x) / PI) / (PI * PI);

    let (u, up, upp) = (v(s), vp(s), vpp(s));
    // Mirror argument: d/ds v(2π - s) = -v'(2π - s).
    let (q, qp, qpp) = (v(2.0 * PI - s), -vp(2.0 * PI - s), vpp(2.0 * PI - s));

    let k = p as i32;
    let a = u.powi(k);
    let ap = pf * u.powi(k - 1) * up;
    let app = pf * (pf - 1.0) * u.powi(k - 2) * up * up + pf * u.powi(k - 1) * upp;
    let b = q.powi(k);
    let bp = pf * q.powi(k - 1) * qp;
    let bpp = pf * (pf - 1.0) * q.powi(k - 2) * qp * qp + pf * q.powi(k - 1) * qpp;

    let d = a + b;
    let w = 2.0 * PI * a / d;
    let wp = 2.0 * PI * (ap * b - a * bp) / (d * d);
    let wpp =
        2.0 * PI * ((app * b - a * bpp) * d - 2.0 * (ap * b - a * bp) * (ap + bp)) / (d * d * d);
    (w, wp, wpp)
}

/// Discretize every polygon of a validated domain with `n` graded nodes per
/// side and grading exponent `p`.
pub fn discretize_polygon(
    domain: &PolygonalDomain,
    n: usize,
    p: u32,
) -> Result<BoundaryDiscretization> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::BadMeshSize { n });
    }
    let mut components = Vec::with_capacity(domain.polygons.len());
    for poly in &domain.polygons {
        let sides = poly.len();
        let big_n = sides * n;
        let h = 2.0 * PI / big_n as f64;
        let lf = sides as f64;
        let mut t = Vec::with_capacity(big_n);
        let mut eta = Vec::with_capacity(big_n);
        let mut etap = Vec::with_capacity(big_n);
        let mut etapp = Vec::with_capacity(big_n);
        for r in 0..big_n {
            let tr = h * (r as f64 + 0.5);
            let k = r / n; // side index; offset keeps tr off the junctions
            let s = lf * tr - 2.0 * PI * k as f64;
            let (w, wp, wpp) = kress_grading(s, p);
            let a = poly[k];
            let d = poly[(k + 1) % sides] - a;
            t.push(tr);
            eta.push(a + d * (w / (2.0 * PI)));
            etap.push(d * (wp * lf / (2.0 * PI)));
            etapp.push(d * (wpp * lf * lf / (2.0 * PI)));
        }
        components.push(Component {
            t,
            eta,
            etap,
            etapp,
            weight: h,
            corners: (0..sides).map(|k| 2.0 * PI * k as f64 / lf).collect(),
        });
    }
    Ok(BoundaryDiscretization {
        components,
        grading_p: p,
        n_per_side: n,
    })
}
