//! Polygon and circular-domain data model, validation, orientation, and
//! point-location predicates.
//!
//! A multiply connected polygonal domain is bordered by `m` polygons.  For a
//! bounded domain the last polygon is the outer boundary (counterclockwise)
//! and the others are holes (clockwise); for an unbounded domain every
//! polygon is a clockwise hole.  Either way the domain lies on the left of
//! the oriented boundary.

use crate::error::{Error, Result};
use crate::C64;
use serde::{Deserialize, Serialize};

/// Interior angles closer than this to 0 or 2π are rejected as cusps.
pub const CUSP_ANGLE_TOL: f64 = 1e-6;

/// Base point of the mapping: a finite point inside the domain, or infinity
/// for unbounded domains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha {
    Finite(C64),
    Infinity,
}

impl Alpha {
    pub fn is_finite(&self) -> bool {
        matches!(self, Alpha::Finite(_))
    }

    /// The finite value; panics on `Infinity`.
    pub fn value(&self) -> C64 {
        match self {
            Alpha::Finite(z) => *z,
            Alpha::Infinity => panic!("alpha is infinite"),
        }
    }
}

/// A validated polygonal multiply connected domain.
#[derive(Debug, Clone)]
pub struct PolygonalDomain {
    /// Vertex lists, one per boundary component, in validated orientation.
    pub polygons: Vec<Vec<C64>>,
    pub bounded: bool,
    pub alpha: Alpha,
    /// 0-based vertex index on the last polygon that is mapped to 1 under
    /// the point-normalized conditions.
    pub beta: Option<usize>,
}

/// Outcome of a point-location query against a polygon or domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointLocation {
    Inside,
    Outside,
    Boundary,
}

/// A circular multiply connected domain: the canonical target.
#[derive(Debug, Clone)]
pub struct CircularDomain {
    pub centers: Vec<C64>,
    pub radii: Vec<f64>,
    pub bounded: bool,
}

/// Shoelace signed area; positive for counterclockwise vertex order.
pub fn signed_area(vertices: &[C64]) -> f64 {
    let n = vertices.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        s += a.re * b.im - b.re * a.im;
    }
    0.5 * s
}

fn cross(o: C64, a: C64, b: C64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// True if `p` lies on the closed segment `[a, b]` up to roundoff.
fn on_segment(p: C64, a: C64, b: C64) -> bool {
    let scale = (b - a).norm().max((p - a).norm()).max(1e-300);
    if cross(a, b, p).abs() > 1e-13 * scale * scale {
        return false;
    }
    let t = ((p - a).re * (b - a).re + (p - a).im * (b - a).im) / (b - a).norm_sqr();
    (-1e-13..=1.0 + 1e-13).contains(&t)
}

/// Crossing-number point location with an explicit boundary outcome.
pub fn point_in_polygon(p: C64, vertices: &[C64]) -> PointLocation {
    let n = vertices.len();
    for i in 0..n {
        if on_segment(p, vertices[i], vertices[(i + 1) % n]) {
            return PointLocation::Boundary;
        }
    }
    // Half-open edge rule: count edges crossing the upward ray from p.
    let mut inside = false;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        if (a.im > p.im) != (b.im > p.im) {
            let x = a.re + (p.im - a.im) / (b.im - a.im) * (b.re - a.re);
            if x > p.re {
                inside = !inside;
            }
        }
    }
    if inside {
        PointLocation::Inside
    } else {
        PointLocation::Outside
    }
}

/// Point location against the whole polygonal domain `G`.
pub fn point_in_domain(p: C64, domain: &PolygonalDomain) -> PointLocation {
    let m = domain.polygons.len();
    if domain.bounded {
        match point_in_polygon(p, &domain.polygons[m - 1]) {
            PointLocation::Inside => {}
            other => return other,
        }
    }
    let holes = if domain.bounded { m - 1 } else { m };
    for poly in &domain.polygons[..holes] {
        match point_in_polygon(p, poly) {
            PointLocation::Inside => return PointLocation::Outside,
            PointLocation::Boundary => return PointLocation::Boundary,
            PointLocation::Outside => {}
        }
    }
    PointLocation::Inside
}

/// True iff `w` lies strictly inside the circular domain.
pub fn point_in_circular(w: C64, c: &CircularDomain) -> bool {
    let m = c.centers.len();
    if c.bounded && (w - c.centers[m - 1]).norm() >= c.radii[m - 1] {
        return false;
    }
    let holes = if c.bounded { m - 1 } else { m };
    for j in 0..holes {
        if (w - c.centers[j]).norm() <= c.radii[j] {
            return false;
        }
    }
    true
}

/// Proper or touching intersection test for segments `a1a2` and `b1b2`.
fn segments_intersect(a1: C64, a2: C64, b1: C64, b2: C64) -> bool {
    let d1 = cross(b1, b2, a1);
    let d2 = cross(b1, b2, a2);
    let d3 = cross(a1, a2, b1);
    let d4 = cross(a1, a2, b2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(a1, b1, b2))
        || (d2 == 0.0 && on_segment(a2, b1, b2))
        || (d3 == 0.0 && on_segment(b1, a1, a2))
        || (d4 == 0.0 && on_segment(b2, a1, a2))
}

fn polygon_is_simple(vertices: &[C64]) -> bool {
    let n = vertices.len();
    for i in 0..n {
        let (a1, a2) = (vertices[i], vertices[(i + 1) % n]);
        for j in i + 1..n {
            // Skip the shared-endpoint pairs (adjacent edges).
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let (b1, b2) = (vertices[j], vertices[(j + 1) % n]);
            if segments_intersect(a1, a2, b1, b2) {
                return false;
            }
        }
    }
    true
}

fn polygons_touch(p: &[C64], q: &[C64]) -> bool {
    let (n, m) = (p.len(), q.len());
    for i in 0..n {
        for j in 0..m {
            if segments_intersect(p[i], p[(i + 1) % n], q[j], q[(j + 1) % m]) {
                return true;
            }
        }
    }
    false
}

/// Interior angle of the domain at each vertex, assuming the domain lies on
/// the left of the oriented polygon.  Values lie in (0, 2π) for valid input.
fn interior_angles(vertices: &[C64]) -> Vec<f64> {
    let n = vertices.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let u = vertices[(i + n - 1) % n];
        let v = vertices[i];
        let w = vertices[(i + 1) % n];
        let din = v - u;
        let dout = w - v;
        let turn = (dout / din).arg(); // in (-pi, pi]
        out.push(std::f64::consts::PI - turn);
    }
    out
}

/// Validate raw polygons plus normalization data into a [`PolygonalDomain`].
///
/// Wrong-orientation polygons are reversed (with a warning recorded);
/// everything else that violates the domain invariants is an error.
pub fn validate_domain(
    raw: Vec<Vec<C64>>,
    alpha: Alpha,
    beta: Option<usize>,
) -> Result<(PolygonalDomain, Vec<String>)> {
    let m = raw.len();
    if m == 0 {
        return Err(Error::Schema("no polygons given".into()));
    }
    let bounded = alpha.is_finite();
    if !bounded && m == 0 {
        return Err(Error::AlphaBoundednessMismatch);
    }
    let mut warnings = Vec::new();
    let mut polygons = raw;

    for (j, poly) in polygons.iter().enumerate() {
        if poly.len() < 3 {
            return Err(Error::TooFewVertices { polygon: j });
        }
        for k in 0..poly.len() {
            let next = poly[(k + 1) % poly.len()];
            if (next - poly[k]).norm() == 0.0 {
                return Err(Error::RepeatedVertex {
                    polygon: j,
                    vertex: k,
                });
            }
        }
        if !polygon_is_simple(poly) {
            return Err(Error::SelfIntersection { polygon: j });
        }
    }

    // Orientation: outer component (bounded case) counterclockwise, every
    // other component clockwise, so the domain is on the left.
    for (j, poly) in polygons.iter_mut().enumerate() {
        let want_ccw = bounded && j == m - 1;
        let area = signed_area(poly);
        if (area > 0.0) != want_ccw {
            poly.reverse();
            warnings.push(format!(
                "polygon {} reversed to {} orientation",
                j + 1,
                if want_ccw {
                    "counterclockwise"
                } else {
                    "clockwise"
                }
            ));
        }
    }

    for (j, poly) in polygons.iter().enumerate() {
        for (k, angle) in interior_angles(poly).iter().enumerate() {
            if *angle < CUSP_ANGLE_TOL || *angle > 2.0 * std::f64::consts::PI - CUSP_ANGLE_TOL {
                return Err(Error::CuspAngle {
                    polygon: j,
                    vertex: k,
                    angle: *angle,
                });
            }
        }
    }

    // Pairwise disjointness plus nesting probes.
    for a in 0..m {
        for b in a + 1..m {
            if polygons_touch(&polygons[a], &polygons[b]) {
                return Err(Error::PolygonOverlap { a, b });
            }
        }
    }
    if bounded {
        let outer = &polygons[m - 1];
        for poly in &polygons[..m - 1] {
            if point_in_polygon(poly[0], outer) != PointLocation::Inside {
                return Err(Error::BadNesting { kind: "bounded" });
            }
        }
    }
    let holes = if bounded { m - 1 } else { m };
    for a in 0..holes {
        for b in 0..holes {
            if a != b && point_in_polygon(polygons[a][0], &polygons[b]) != PointLocation::Outside {
                return Err(Error::BadNesting {
                    kind: if bounded { "bounded" } else { "unbounded" },
                });
            }
        }
    }

    if let Some(k) = beta {
        if k >= polygons[m - 1].len() {
            return Err(Error::BetaNotVertex { vertex: k });
        }
    }

    let domain = PolygonalDomain {
        polygons,
        bounded,
        alpha,
        beta,
    };
    if let Alpha::Finite(a) = alpha {
        if point_in_domain(a, &domain) != PointLocation::Inside {
            return Err(Error::AlphaOutside);
        }
    }
    Ok((domain, warnings))
}

impl PolygonalDomain {
    /// Number of boundary components.
    pub fn connectivity(&self) -> usize {
        self.polygons.len()
    }

    /// Axis-aligned bounding box of all vertices as (min, max) corners.
    pub fn bounding_box(&self) -> (C64, C64) {
        let mut lo = C64::new(f64::INFINITY, f64::INFINITY);
        let mut hi = C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for poly in &self.polygons {
            for v in poly {
                lo.re = lo.re.min(v.re);
                lo.im = lo.im.min(v.im);
                hi.re = hi.re.max(v.re);
                hi.im = hi.im.max(v.im);
            }
        }
        (lo, hi)
    }

    /// Diagonal of the bounding box; the length scale used for margins.
    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        (hi - lo).norm()
    }
}

impl CircularDomain {
    /// Largest distance between points of any two circles; length scale of D.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (c, r) in self.centers.iter().zip(&self.radii) {
            for (c2, r2) in self.centers.iter().zip(&self.radii) {
                d = d.max((c - c2).norm() + r + r2);
            }
        }
        d
    }

    /// Check the type invariants: disjoint circles, correct nesting.
    pub fn is_valid(&self) -> bool {
        let m = self.centers.len();
        if self.radii.iter().any(|r| *r <= 0.0) {
            return false;
        }
        let holes = if self.bounded { m - 1 } else { m };
        for a in 0..holes {
            for b in a + 1..holes {
                if (self.centers[a] - self.centers[b]).norm() <= self.radii[a] + self.radii[b] {
                    return false;
                }
            }
            if self.bounded
                && (self.centers[a] - self.centers[m - 1]).norm() + self.radii[a]
                    >= self.radii[m - 1]
            {
                return false;
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// Domain JSON schema
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct BetaSpec {
    /// 1-based vertex index on the last polygon.
    vertex: usize,
}

#[derive(Serialize, Deserialize)]
struct DomainSpec {
    polygons: Vec<Vec<[f64; 2]>>,
    alpha: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<BetaSpec>,
}

/// Parse the domain JSON schema and validate it.
///
/// Schema: `{"polygons": [[[x,y],...],...], "alpha": [x,y] | "inf",
/// "beta": {"vertex": k}}` with `k` 1-based on the last polygon.
pub fn domain_from_json(text: &str) -> Result<(PolygonalDomain, Vec<String>)> {
    let spec: DomainSpec = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    let polygons: Vec<Vec<C64>> = spec
        .polygons
        .iter()
        .map(|p| p.iter().map(|&[x, y]| C64::new(x, y)).collect())
        .collect();
    let alpha = match &spec.alpha {
        serde_json::Value::String(s) if s == "inf" => Alpha::Infinity,
        serde_json::Value::Array(a) if a.len() == 2 => {
            let x = a[0].as_f64().ok_or_else(|| Error::Schema("alpha".into()))?;
            let y = a[1].as_f64().ok_or_else(|| Error::Schema("alpha".into()))?;
            Alpha::Finite(C64::new(x, y))
        }
        _ => return Err(Error::Schema("alpha must be [x,y] or \"inf\"".into())),
    };
    let beta = match spec.beta {
        Some(BetaSpec { vertex: 0 }) => {
            return Err(Error::Schema("beta vertex index is 1-based".into()))
        }
        Some(BetaSpec { vertex }) => Some(vertex - 1),
        None => None,
    };
    validate_domain(polygons, alpha, beta)
}

/// Serialize a validated domain back to the domain JSON schema.
pub fn domain_to_json(domain: &PolygonalDomain) -> String {
    let spec = DomainSpec {
        polygons: domain
            .polygons
            .iter()
            .map(|p| p.iter().map(|v| [v.re, v.im]).collect())
            .collect(),
        alpha: match domain.alpha {
            Alpha::Finite(a) => serde_json::json!([a.re, a.im]),
            Alpha::Infinity => serde_json::json!("inf"),
        },
        beta: domain.beta.map(|k| BetaSpec { vertex: k + 1 }),
    };
    serde_json::to_string_pretty(&spec).expect("domain schema serializes")
}
