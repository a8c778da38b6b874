//! Coordinate grids clipped to either domain, their images under the map,
//! and SVG/JSONL emission.

use crate::error::Result;
use crate::geometry::{point_in_domain, CircularDomain, PointLocation, PolygonalDomain};
use crate::mapdata::ConformalMap;
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

/// Which coordinate family a grid polyline belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Horizontal,
    Vertical,
    Circle,
    Ray,
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Horizontal => "horizontal",
            Family::Vertical => "vertical",
            Family::Circle => "circle",
            Family::Ray => "ray",
        }
    }
}

/// Which plane the polyline lives in: the polygonal domain `G` ("d") or the
/// circular domain `D` ("v").
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Domain,
    Codomain,
}

#[derive(Debug, Clone)]
pub struct Polyline {
    pub family: Family,
    pub index: usize,
    pub side: Side,
    pub points: Vec<C64>,
}

/// Clipped grid curves plus the boundary curves of their plane.
#[derive(Debug, Clone)]
pub struct PolylineSet {
    pub side: Side,
    pub polylines: Vec<Polyline>,
    pub boundaries: Vec<Vec<C64>>,
}

fn sample_count(length: f64, diameter: f64) -> usize {
    ((length / (diameter / 400.0)).ceil() as usize).max(8)
}

fn sample_segment(a: C64, b: C64, diameter: f64) -> Vec<C64> {
    let n = sample_count((b - a).norm(), diameter);
    (0..=n)
        .map(|i| a + (b - a) * (i as f64 / n as f64))
        .collect()
}

/// Rectangular grid across the domain's bounding box (inflated 50% for
/// unbounded domains), clipped exactly against the polygon edges.
pub fn rect_grid(domain: &PolygonalDomain, n1: usize, n2: usize) -> PolylineSet {
    let (mut lo, mut hi) = domain.bounding_box();
    if !domain.bounded {
        let c = (lo + hi) / 2.0;
        lo = c + (lo - c) * 1.5;
        hi = c + (hi - c) * 1.5;
    }
    let diameter = domain.diameter();
    let eps = 1e-3 * diameter;
    let mut polylines = Vec::new();

    let mut clip_line = |family: Family, index: usize, a: C64, b: C64| {
        // Crossing parameters of the line a->b with every polygon edge.
        let d = b - a;
        let mut ts = vec![0.0, 1.0];
        for poly in &domain.polygons {
            let m = poly.len();
            for i in 0..m {
                let (p, q) = (poly[i], poly[(i + 1) % m]);
                let e = q - p;
                let denom = d.re * e.im - d.im * e.re;
                let w = p - a;
                if denom == 0.0 {
                    // An edge lying along the line blocks its whole span:
                    // record both endpoints, otherwise the half-open rule
                    // below loses the crossing at the shared vertex and the
                    // kept segment runs along the boundary.
                    if w.re * d.im - w.im * d.re == 0.0 {
                        for r in [p, q] {
                            let t = ((r - a).re * d.re + (r - a).im * d.im) / d.norm_sqr();
                            if (0.0..=1.0).contains(&t) {
                                ts.push(t);
                            }
                        }
                    }
                    continue;
                }
                let t = (w.re * e.im - w.im * e.re) / denom;
                let u = (w.re * d.im - w.im * d.re) / denom;
                if (0.0..=1.0).contains(&t) && (0.0..1.0).contains(&u) {
                    ts.push(t);
                }
            }
        }
        ts.sort_by(f64::total_cmp);
        for pair in ts.windows(2) {
            let (t0, t1) = (pair[0], pair[1]);
            if t1 - t0 <= 0.0 {
                continue;
            }
            let mid = a + d * ((t0 + t1) / 2.0);
            if point_in_domain(mid, domain) != PointLocation::Inside {
                continue;
            }
            let len = (t1 - t0) * d.norm();
            if len <= 2.0 * eps {
                continue;
            }
            let shrink = eps / d.norm();
            let p0 = a + d * (t0 + shrink);
            let p1 = a + d * (t1 - shrink);
            polylines.push(Polyline {
                family,
                index,
                side: Side::Domain,
                points: sample_segment(p0, p1, diameter),
            });
        }
    };

    for i in 1..=n1 {
        let y = lo.im + (hi.im - lo.im) * i as f64 / (n1 + 1) as f64;
        clip_line(
            Family::Horizontal,
            i - 1,
            C64::new(lo.re, y),
            C64::new(hi.re, y),
        );
    }
    for i in 1..=n2 {
        let x = lo.re + (hi.re - lo.re) * i as f64 / (n2 + 1) as f64;
        clip_line(
            Family::Vertical,
            i - 1,
            C64::new(x, lo.im),
            C64::new(x, hi.im),
        );
    }

    let boundaries = domain
        .polygons
        .iter()
        .map(|p| {
            let mut b: Vec<C64> = p.clone();
            b.push(p[0]);
            b
        })
        .collect();
    PolylineSet {
        side: Side::Domain,
        polylines,
        boundaries,
    }
}

/// Merge intervals and return the complement within `[0, span)`.
fn complement(mut blocked: Vec<(f64, f64)>, span: f64) -> Vec<(f64, f64)> {
    blocked.retain(|(a, b)| b > a);
    blocked.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (a, b) in blocked {
        if let Some(last) = merged.last_mut() {
            if a <= last.1 {
                last.1 = last.1.max(b);
                continue;
            }
        }
        merged.push((a, b));
    }
    let mut free = Vec::new();
    let mut cursor = 0.0;
    for (a, b) in &merged {
        if *a > cursor {
            free.push((cursor, *a));
        }
        cursor = cursor.max(*b);
    }
    if cursor < span {
        free.push((cursor, span));
    }
    free
}

/// Polar grid about the origin of `D`, clipped exactly against the circles.
pub fn polar_grid(circ: &CircularDomain, n1: usize, n2: usize) -> PolylineSet {
    let m = circ.centers.len();
    let r_max = if circ.bounded {
        circ.radii[m - 1]
    } else {
        2.0 * circ.centers.iter().map(|c| c.norm()).fold(0.0, f64::max)
            + circ.radii.iter().fold(0.0_f64, |a, &b| a.max(b))
    };
    let diameter = circ.diameter();
    let eps = 1e-3 * diameter;
    let holes = if circ.bounded { m - 1 } else { m };
    let mut polylines = Vec::new();

    // Concentric circles, radii equally spaced in (0, r_max).
    for i in 1..=n1 {
        let r = r_max * i as f64 / (n1 + 1) as f64;
        let mut blocked: Vec<(f64, f64)> = Vec::new();
        let mut fully_blocked = false;
        if circ.bounded {
            let (c, rho) = (circ.centers[m - 1], circ.radii[m - 1]);
            // Block angles where the sample circle leaves the outer circle.
            if c.norm() + r >= rho {
                let cosd = (r * r + c.norm_sqr() - rho * rho) / (2.0 * r * c.norm());
                if cosd >= 1.0 {
                    fully_blocked = true;
                } else if cosd > -1.0 {
                    let d0 = cosd.acos();
                    let a0 = c.arg();
                    // Inside for |angle - a0| < d0; block the rest.
                    blocked.extend(shift_interval(a0 + d0, a0 - d0 + 2.0 * PI));
                }
            }
        }
        for j in 0..holes {
            let (c, rho) = (circ.centers[j], circ.radii[j]);
            if c.norm() == 0.0 {
                if r <= rho {
                    fully_blocked = true;
                }
                continue;
            }
            if c.norm() + r <= rho {
                fully_blocked = true; // sample circle swallowed by the hole
                continue;
            }
            let cosd = (r * r + c.norm_sqr() - rho * rho) / (2.0 * r * c.norm());
            if cosd.abs() < 1.0 {
                let d0 = cosd.acos();
                let a0 = c.arg();
                blocked.extend(shift_interval(a0 - d0, a0 + d0));
            }
        }
        if fully_blocked {
            continue;
        }
        if blocked.is_empty() {
            // Full circle; sample closed.
            let n = sample_count(2.0 * PI * r, diameter);
            let points = (0..=n)
                .map(|k| C64::from_polar(r, 2.0 * PI * k as f64 / n as f64))
                .collect();
            polylines.push(Polyline {
                family: Family::Circle,
                index: i - 1,
                side: Side::Codomain,
                points,
            });
        } else {
            let eps_angle = eps / r;
            for (a, b) in complement(blocked, 2.0 * PI) {
                let (a, b) = (a + eps_angle, b - eps_angle);
                if b <= a {
                    continue;
                }
                let n = sample_count((b - a) * r, diameter);
                let points = (0..=n)
                    .map(|k| C64::from_polar(r, a + (b - a) * k as f64 / n as f64))
                    .collect();
                polylines.push(Polyline {
                    family: Family::Circle,
                    index: i - 1,
                    side: Side::Codomain,
                    points,
                });
            }
        }
    }

    // Rays from the origin.
    for j in 0..n2 {
        let psi = 2.0 * PI * j as f64 / n2 as f64;
        let dir = C64::from_polar(1.0, psi);
        let mut blocked: Vec<(f64, f64)> = Vec::new();
        let mut t_hi = r_max;
        if circ.bounded {
            let (c, rho) = (circ.centers[m - 1], circ.radii[m - 1]);
            // Largest t with |t·dir − c| = rho.
            let pr = (c * dir.conj()).re;
            let disc = pr * pr - (c.norm_sqr() - rho * rho);
            if disc >= 0.0 {
                t_hi = t_hi.min(pr + disc.sqrt());
            }
        }
        for k in 0..holes {
            let (c, rho) = (circ.centers[k], circ.radii[k]);
            let pr = (c * dir.conj()).re;
            let disc = pr * pr - (c.norm_sqr() - rho * rho);
            if disc > 0.0 {
                blocked.push((pr - disc.sqrt(), pr + disc.sqrt()));
            }
        }
        blocked.push((f64::NEG_INFINITY.max(-1.0), 0.0)); // nothing below the origin
        for (a, b) in complement(
            blocked
                .into_iter()
                .map(|(a, b)| (a.max(0.0), b.clamp(0.0, t_hi)))
                .collect(),
            t_hi,
        ) {
            let (a, b) = (a + eps, b - eps);
            if b <= a {
                continue;
            }
            polylines.push(Polyline {
                family: Family::Ray,
                index: j,
                side: Side::Codomain,
                points: sample_segment(dir * a, dir * b, diameter),
            });
        }
    }

    let boundaries = circ
        .centers
        .iter()
        .zip(&circ.radii)
        .map(|(&c, &r)| {
            (0..=256)
                .map(|k| c + C64::from_polar(r, 2.0 * PI * k as f64 / 256.0))
                .collect()
        })
        .collect();
    PolylineSet {
        side: Side::Codomain,
        polylines,
        boundaries,
    }
}

/// Split an angular interval that may wrap past 2π into in-range pieces.
fn shift_interval(a: f64, b: f64) -> Vec<(f64, f64)> {
    let two_pi = 2.0 * PI;
    let a = a.rem_euclid(two_pi);
    let mut b = b.rem_euclid(two_pi);
    if b < a {
        b += two_pi;
    }
    if b <= two_pi {
        vec![(a, b)]
    } else {
        vec![(a, two_pi), (0.0, b - two_pi)]
    }
}

/// Direction of [`map_polylines`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapDirection {
    Forward,
    Inverse,
}

/// Map every sampled point of a grid to the other plane.  Points whose
/// evaluation was refused (outside sentinels) are dropped; the count of
/// dropped points is returned alongside.
pub fn map_polylines(
    f: &ConformalMap,
    set: &PolylineSet,
    direction: MapDirection,
) -> (PolylineSet, usize) {
    let mut dropped = 0;
    let polylines = set
        .polylines
        .iter()
        .map(|pl| {
            let report = match direction {
                MapDirection::Forward => f.eval_forward(&pl.points),
                MapDirection::Inverse => f.eval_inverse(&pl.points),
            };
            let points: Vec<C64> = report
                .values
                .into_iter()
                .filter(|v| {
                    let ok = v.re.is_finite() && v.im.is_finite();
                    if !ok {
                        dropped += 1;
                    }
                    ok
                })
                .collect();
            Polyline {
                family: pl.family,
                index: pl.index,
                side: match direction {
                    MapDirection::Forward => Side::Codomain,
                    MapDirection::Inverse => Side::Domain,
                },
                points,
            }
        })
        .filter(|pl| pl.points.len() >= 2)
        .collect();
    let boundaries = match direction {
        MapDirection::Forward => {
            // Image boundary: the circle discretization.
            let (s, t) = f.postmap;
            f.zet
                .iter()
                .map(|c| {
                    let mut b: Vec<C64> = c.iter().map(|&z| s * z + t).collect();
                    b.push(b[0]);
                    b
                })
                .collect()
        }
        MapDirection::Inverse => f
            .disc
            .components
            .iter()
            .map(|c| {
                let mut b = c.eta.clone();
                b.push(b[0]);
                b
            })
            .collect(),
    };
    (
        PolylineSet {
            side: match direction {
                MapDirection::Forward => Side::Codomain,
                MapDirection::Inverse => Side::Domain,
            },
            polylines,
            boundaries,
        },
        dropped,
    )
}

#[derive(Serialize, Deserialize)]
struct JsonlRecord {
    side: Side,
    family: Family,
    index: usize,
    points: Vec<[f64; 2]>,
}

/// Write an SVG rendering and a JSONL line-data file for the given sets.
pub fn emit(sets: &[&PolylineSet], svg_path: &Path, data_path: &Path) -> Result<()> {
    // Bounding box over everything drawn.
    let mut lo = C64::new(f64::INFINITY, f64::INFINITY);
    let mut hi = C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut grow = |p: &C64| {
        lo.re = lo.re.min(p.re);
        lo.im = lo.im.min(p.im);
        hi.re = hi.re.max(p.re);
        hi.im = hi.im.max(p.im);
    };
    for set in sets {
        for pl in &set.polylines {
            pl.points.iter().for_each(&mut grow);
        }
        for b in &set.boundaries {
            b.iter().for_each(&mut grow);
        }
    }
    if !lo.re.is_finite() {
        lo = C64::new(0.0, 0.0);
        hi = C64::new(1.0, 1.0);
    }
    let pad = 0.05 * (hi - lo).norm().max(1e-9);
    let (w, h) = (hi.re - lo.re + 2.0 * pad, hi.im - lo.im + 2.0 * pad);
    let stroke = 0.002 * w.max(h);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{} {} {} {}\">\n",
        lo.re - pad,
        -(hi.im + pad),
        w,
        h
    ));
    let fmt_points = |pts: &[C64]| {
        pts.iter()
            .map(|p| format!("{},{}", p.re, -p.im))
            .collect::<Vec<_>>()
            .join(" ")
    };
    for set in sets {
        for pl in &set.polylines {
            svg.push_str(&format!(
                "  <polyline class=\"{}\" fill=\"none\" stroke=\"#4477aa\" stroke-width=\"{}\" points=\"{}\"/>\n",
                pl.family.tag(),
                stroke,
                fmt_points(&pl.points)
            ));
        }
        for b in &set.boundaries {
            svg.push_str(&format!(
                "  <polyline class=\"boundary\" fill=\"none\" stroke=\"#000000\" stroke-width=\"{}\" points=\"{}\"/>\n",
                2.0 * stroke,
                fmt_points(b)
            ));
        }
    }
    svg.push_str("</svg>\n");
    std::fs::write(svg_path, svg)?;

    let mut data = std::io::BufWriter::new(std::fs::File::create(data_path)?);
    for set in sets {
        for pl in &set.polylines {
            let rec = JsonlRecord {
                side: pl.side,
                family: pl.family,
                index: pl.index,
                points: pl.points.iter().map(|p| [p.re, p.im]).collect(),
            };
            writeln!(data, "{}", serde_json::to_string(&rec)?)?;
        }
    }
    data.flush()?;
    Ok(())
}
