//! The conformal-map object: boundary correspondence storage, the
//! forward/inverse/derivative evaluation API, and JSON persistence.

use crate::bie::{cauchy_deriv, cauchy_eval, CauchyMode};
use crate::discretize::{BoundaryDiscretization, Component};
use crate::error::{Error, Result};
use crate::geometry::CircularDomain;
use crate::geometry::{
    domain_from_json, domain_to_json, point_in_circular, point_in_domain, PointLocation,
    PolygonalDomain,
};
use crate::koebe::KoebeResult;
use crate::spectral::{derivative_real, trig_interpolate, PeriodicSamples};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

/// Supported map-file format version.
pub const MAP_FORMAT_VERSION: u32 = 1;

/// Which uniqueness condition the stored map satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Bounded: f(α) = 0, f′(α) > 0.
    Eq1,
    /// Bounded: f(α) = 0, f(β) = 1.
    Eq2,
    /// Unbounded: f(z) = z + O(1/z) near ∞.
    Eq3,
    /// Unbounded: f(∞) = ∞, f(β) = 1, unit outer circle.
    Eq4,
}

impl Normalization {
    pub fn tag(&self) -> &'static str {
        match self {
            Normalization::Eq1 => "eq1",
            Normalization::Eq2 => "eq2",
            Normalization::Eq3 => "eq3",
            Normalization::Eq4 => "eq4",
        }
    }
}

/// Run statistics carried along with a computed map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Diagnostics {
    pub cycles: usize,
    pub converged: bool,
    pub max_deviation: f64,
    pub deviation_history: Vec<f64>,
    pub gmres_iterations: Vec<usize>,
    pub max_im_h_residual: f64,
}

/// The computed conformal map `w = f(z)` with everything needed to evaluate
/// `f`, `f⁻¹`, and their first derivatives.
#[derive(Debug, Clone)]
pub struct ConformalMap {
    pub domain: PolygonalDomain,
    /// Parameter grid and boundary parametrization η, η′ of Γ.
    pub disc: BoundaryDiscretization,
    /// Boundary correspondence ζ on the circles, per component (canonical
    /// frame, before the post-map).
    pub zet: Vec<Vec<C64>>,
    /// ζ′ per component, built analytically from the boundary angle.
    pub zetp: Vec<Vec<C64>>,
    pub cent: Vec<C64>,
    pub rad: Vec<f64>,
    /// Vertex images per component, radially projected onto the circles
    /// (canonical frame).
    pub imgver: Vec<Vec<C64>>,
    /// Affine post-map `w ↦ σw + τ` applied after canonical evaluation.
    pub postmap: (C64, C64),
    pub normalization: Normalization,
    pub diagnostics: Diagnostics,
    /// Runtime override of the trusted-evaluation margin δ (not persisted).
    pub delta_override: Option<f64>,
}

/// Batch evaluation output: values plus the indices of points that fell
/// outside the region (NaN result) or inside the near-boundary margin
/// (best-effort result).
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub values: Vec<C64>,
    pub outside: Vec<usize>,
    pub near_boundary: Vec<usize>,
}

fn nan() -> C64 {
    C64::new(f64::NAN, f64::NAN)
}

/// ζ′ from the unwrapped boundary angle: ζ′ = iθ′(ζ − c).
fn correspondence_derivative(zeta: &[C64], center: C64) -> Vec<C64> {
    let n = zeta.len();
    let h = 2.0 * PI / n as f64;
    // Unwrap the angle by accumulating principal increments.
    let mut theta = vec![0.0; n];
    theta[0] = (zeta[0] - center).arg();
    for i in 1..n {
        let inc = ((zeta[i] - center) / (zeta[i - 1] - center)).arg();
        theta[i] = theta[i - 1] + inc;
    }
    let wrap = ((zeta[0] - center) / (zeta[n - 1] - center)).arg();
    let total = theta[n - 1] - theta[0] + wrap;
    let winding = (total / (2.0 * PI)).round();
    // Periodic residue after removing the winding-linear part.
    let phi: Vec<f64> = theta
        .iter()
        .enumerate()
        .map(|(i, &th)| th - winding * h * (i as f64 + 0.5))
        .collect();
    let phip = derivative_real(&phi);
    zeta.iter()
        .zip(&phip)
        .map(|(&z, &pp)| C64::new(0.0, 1.0) * (winding + pp) * (z - center))
        .collect()
}

/// Assemble a [`ConformalMap`] from a converged, normalized Koebe result.
pub fn build_map(
    kr: KoebeResult,
    domain: &PolygonalDomain,
    disc: &BoundaryDiscretization,
    normalization: Normalization,
    postmap: (C64, C64),
) -> Result<ConformalMap> {
    if !kr.converged {
        return Err(Error::NotConverged);
    }
    let cent = kr.circles.centers.clone();
    let rad = kr.circles.radii.clone();
    let mut zet = Vec::with_capacity(kr.components.len());
    let mut zetp = Vec::with_capacity(kr.components.len());
    let mut imgver = Vec::with_capacity(kr.components.len());
    for (j, comp) in kr.components.iter().enumerate() {
        let zeta = comp.eta.clone();
        zetp.push(correspondence_derivative(&zeta, cent[j]));
        let corners = &disc.components[j].corners;
        let raw = trig_interpolate(&PeriodicSamples::new(zeta.clone()), corners);
        imgver.push(
            raw.iter()
                .map(|&q| {
                    let d = q - cent[j];
                    cent[j] + rad[j] * d / d.norm()
                })
                .collect(),
        );
        zet.push(zeta);
    }
    Ok(ConformalMap {
        domain: domain.clone(),
        disc: disc.clone(),
        zet,
        zetp,
        cent,
        rad,
        imgver,
        postmap,
        normalization,
        diagnostics: Diagnostics {
            cycles: kr.cycles,
            converged: kr.converged,
            max_deviation: kr.deviation_history.last().copied().unwrap_or(f64::NAN),
            deviation_history: kr.deviation_history,
            gmres_iterations: kr.gmres_iterations,
            max_im_h_residual: kr.max_im_h_residual,
        },
        delta_override: None,
    })
}

impl ConformalMap {
    pub fn connectivity(&self) -> usize {
        self.cent.len()
    }

    /// Trusted-evaluation margin: points closer to a boundary are flagged.
    pub fn delta_margin(&self) -> f64 {
        self.delta_override
            .unwrap_or_else(|| 1e-3 * self.domain.diameter())
    }

    /// The circular domain in the user-facing frame (post-map applied).
    pub fn circular_domain(&self) -> CircularDomain {
        let (s, t) = self.postmap;
        CircularDomain {
            centers: self.cent.iter().map(|&c| s * c + t).collect(),
            radii: self.rad.iter().map(|&r| s.norm() * r).collect(),
            bounded: self.domain.bounded,
        }
    }

    /// Vertex images in the user-facing frame.
    pub fn vertex_images(&self) -> Vec<Vec<C64>> {
        let (s, t) = self.postmap;
        self.imgver
            .iter()
            .map(|vs| vs.iter().map(|&v| s * v + t).collect())
            .collect()
    }

    /// Discretization of ∂D in the user-facing frame (flattened).
    pub fn zet_flat(&self) -> Vec<C64> {
        let (s, t) = self.postmap;
        self.zet
            .iter()
            .flat_map(|c| c.iter().map(move |&z| s * z + t))
            .collect()
    }

    fn circle_disc(&self) -> BoundaryDiscretization {
        let comps = self
            .zet
            .iter()
            .zip(&self.zetp)
            .zip(&self.disc.components)
            .map(|((z, zp), d)| Component {
                t: d.t.clone(),
                eta: z.clone(),
                etap: zp.clone(),
                etapp: vec![C64::new(0.0, 0.0); z.len()],
                weight: d.weight,
                corners: d.corners.clone(),
            })
            .collect();
        BoundaryDiscretization {
            components: comps,
            grading_p: self.disc.grading_p,
            n_per_side: self.disc.n_per_side,
        }
    }

    fn boundary_distance(&self, z: C64) -> f64 {
        // Exact distance to the polygon edges; discretization nodes are too
        // sparse near segment midpoints to detect near-boundary points.
        let mut best = f64::INFINITY;
        for poly in &self.domain.polygons {
            let m = poly.len();
            for i in 0..m {
                let (a, b) = (poly[i], poly[(i + 1) % m]);
                let d = b - a;
                let t = (((z - a).re * d.re + (z - a).im * d.im) / d.norm_sqr()).clamp(0.0, 1.0);
                best = best.min((z - (a + d * t)).norm());
            }
        }
        best
    }

    fn circle_distance(&self, w: C64) -> f64 {
        self.cent
            .iter()
            .zip(&self.rad)
            .map(|(&c, &r)| ((w - c).norm() - r).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Values of `f` at points of `G`.
    pub fn eval_forward(&self, z: &[C64]) -> EvalReport {
        let delta = self.delta_margin();
        let mut keep = Vec::new();
        let mut outside = Vec::new();
        let mut near = Vec::new();
        for (i, &p) in z.iter().enumerate() {
            if point_in_domain(p, &self.domain) == PointLocation::Inside {
                if self.boundary_distance(p) < delta {
                    near.push(i);
                }
                keep.push((i, p));
            } else {
                outside.push(i);
            }
        }
        let targets: Vec<C64> = keep.iter().map(|&(_, p)| p).collect();
        let zf: Vec<C64> = self.zet.iter().flatten().copied().collect();
        let raw = if self.domain.bounded {
            cauchy_eval(&self.disc, &zf, &targets, CauchyMode::Bounded)
        } else {
            let ef: Vec<C64> = self
                .disc
                .components
                .iter()
                .flat_map(|c| c.eta.iter())
                .copied()
                .collect();
            let g: Vec<C64> = zf.iter().zip(&ef).map(|(a, b)| a - b).collect();
            cauchy_eval(&self.disc, &g, &targets, CauchyMode::Unbounded)
                .iter()
                .zip(&targets)
                .map(|(&v, &p)| p + v)
                .collect()
        };
        let (s, t) = self.postmap;
        let mut values = vec![nan(); z.len()];
        for ((i, _), v) in keep.iter().zip(raw) {
            values[*i] = s * v + t;
        }
        EvalReport {
            values,
            outside,
            near_boundary: near,
        }
    }

    /// Values of `f⁻¹` at points of `D`.
    pub fn eval_inverse(&self, w: &[C64]) -> EvalReport {
        let (s, t) = self.postmap;
        let canonical: Vec<C64> = w.iter().map(|&p| (p - t) / s).collect();
        let circles = CircularDomain {
            centers: self.cent.clone(),
            radii: self.rad.clone(),
            bounded: self.domain.bounded,
        };
        let delta = self
            .delta_override
            .unwrap_or_else(|| 1e-3 * circles.diameter());
        let mut keep = Vec::new();
        let mut outside = Vec::new();
        let mut near = Vec::new();
        for (i, &p) in canonical.iter().enumerate() {
            if point_in_circular(p, &circles) {
                if self.circle_distance(p) < delta {
                    near.push(i);
                }
                keep.push((i, p));
            } else {
                outside.push(i);
            }
        }
        let targets: Vec<C64> = keep.iter().map(|&(_, p)| p).collect();
        let cdisc = self.circle_disc();
        let ef: Vec<C64> = self
            .disc
            .components
            .iter()
            .flat_map(|c| c.eta.iter())
            .copied()
            .collect();
        let raw = if self.domain.bounded {
            cauchy_eval(&cdisc, &ef, &targets, CauchyMode::Bounded)
        } else {
            let zf: Vec<C64> = self.zet.iter().flatten().copied().collect();
            let g: Vec<C64> = ef.iter().zip(&zf).map(|(a, b)| a - b).collect();
            cauchy_eval(&cdisc, &g, &targets, CauchyMode::Unbounded)
                .iter()
                .zip(&targets)
                .map(|(&v, &p)| p + v)
                .collect()
        };
        let mut values = vec![nan(); w.len()];
        for ((i, _), v) in keep.iter().zip(raw) {
            values[*i] = v;
        }
        EvalReport {
            values,
            outside,
            near_boundary: near,
        }
    }

    /// Values of `f′` at points of `G`.
    pub fn deriv_forward(&self, z: &[C64]) -> EvalReport {
        let delta = self.delta_margin();
        let mut keep = Vec::new();
        let mut outside = Vec::new();
        let mut near = Vec::new();
        for (i, &p) in z.iter().enumerate() {
            if point_in_domain(p, &self.domain) == PointLocation::Inside {
                if self.boundary_distance(p) < delta {
                    near.push(i);
                }
                keep.push((i, p));
            } else {
                outside.push(i);
            }
        }
        let targets: Vec<C64> = keep.iter().map(|&(_, p)| p).collect();
        let zf: Vec<C64> = self.zet.iter().flatten().copied().collect();
        let raw: Vec<C64> = if self.domain.bounded {
            cauchy_deriv(&self.disc, &zf, &targets, CauchyMode::Bounded)
        } else {
            let ef: Vec<C64> = self
                .disc
                .components
                .iter()
                .flat_map(|c| c.eta.iter())
                .copied()
                .collect();
            let g: Vec<C64> = zf.iter().zip(&ef).map(|(a, b)| a - b).collect();
            cauchy_deriv(&self.disc, &g, &targets, CauchyMode::Unbounded)
                .iter()
                .map(|&v| v + 1.0)
                .collect()
        };
        let (s, _) = self.postmap;
        let mut values = vec![nan(); z.len()];
        for ((i, _), v) in keep.iter().zip(raw) {
            values[*i] = s * v;
        }
        EvalReport {
            values,
            outside,
            near_boundary: near,
        }
    }

    /// Values of `(f⁻¹)′` at points of `D`.
    pub fn deriv_inverse(&self, w: &[C64]) -> EvalReport {
        let (s, t) = self.postmap;
        let canonical: Vec<C64> = w.iter().map(|&p| (p - t) / s).collect();
        let circles = CircularDomain {
            centers: self.cent.clone(),
            radii: self.rad.clone(),
            bounded: self.domain.bounded,
        };
        let delta = self
            .delta_override
            .unwrap_or_else(|| 1e-3 * circles.diameter());
        let mut keep = Vec::new();
        let mut outside = Vec::new();
        let mut near = Vec::new();
        for (i, &p) in canonical.iter().enumerate() {
            if point_in_circular(p, &circles) {
                if self.circle_distance(p) < delta {
                    near.push(i);
                }
                keep.push((i, p));
            } else {
                outside.push(i);
            }
        }
        let targets: Vec<C64> = keep.iter().map(|&(_, p)| p).collect();
        let cdisc = self.circle_disc();
        let ef: Vec<C64> = self
            .disc
            .components
            .iter()
            .flat_map(|c| c.eta.iter())
            .copied()
            .collect();
        let raw: Vec<C64> = if self.domain.bounded {
            cauchy_deriv(&cdisc, &ef, &targets, CauchyMode::Bounded)
        } else {
            let zf: Vec<C64> = self.zet.iter().flatten().copied().collect();
            let g: Vec<C64> = ef.iter().zip(&zf).map(|(a, b)| a - b).collect();
            cauchy_deriv(&cdisc, &g, &targets, CauchyMode::Unbounded)
                .iter()
                .map(|&v| v + 1.0)
                .collect()
        };
        let mut values = vec![nan(); w.len()];
        for ((i, _), v) in keep.iter().zip(raw) {
            values[*i] = v / s;
        }
        EvalReport {
            values,
            outside,
            near_boundary: near,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<ConformalMap> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    /// Serialize to the map JSON schema with 17-significant-digit numbers.
    pub fn to_json_string(&self) -> String {
        let file = MapFile::from_map(self);
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, P17Formatter::default());
        file.serialize(&mut ser).expect("map schema serializes");
        let mut s = String::from_utf8(out).expect("json is utf8");
        s.push('\n');
        s
    }

    pub fn from_json_str(text: &str) -> Result<ConformalMap> {
        let file: MapFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        file.into_map()
    }
}

// ---------------------------------------------------------------------------
// Map file schema
// ---------------------------------------------------------------------------

/// JSON formatter printing every float with 17 significant digits so the
/// round trip is bit-exact.
#[derive(Default)]
struct P17Formatter {
    compact: serde_json::ser::CompactFormatter,
}

impl serde_json::ser::Formatter for P17Formatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        if value.is_finite() {
            write!(writer, "{:.16e}", value)
        } else {
            serde_json::ser::Formatter::write_f64(&mut self.compact, writer, value)
        }
    }
}

fn pack(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn unpack(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().map(|&[x, y]| C64::new(x, y)).collect()
}

#[derive(Serialize, Deserialize)]
struct GridSpec {
    n_per_side: usize,
    grading_p: u32,
    component_sizes: Vec<usize>,
    corners: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct MapFile {
    version: u32,
    domain: serde_json::Value,
    grid: GridSpec,
    et: Vec<[f64; 2]>,
    etp: Vec<[f64; 2]>,
    zet: Vec<[f64; 2]>,
    zetp: Vec<[f64; 2]>,
    cent: Vec<[f64; 2]>,
    rad: Vec<f64>,
    imgver: Vec<Vec<[f64; 2]>>,
    postmap: [[f64; 2]; 2],
    normalization: Normalization,
    diagnostics: Diagnostics,
}

impl MapFile {
    fn from_map(m: &ConformalMap) -> MapFile {
        let et: Vec<C64> = m
            .disc
            .components
            .iter()
            .flat_map(|c| c.eta.iter())
            .copied()
            .collect();
        let etp: Vec<C64> = m
            .disc
            .components
            .iter()
            .flat_map(|c| c.etap.iter())
            .copied()
            .collect();
        MapFile {
            version: MAP_FORMAT_VERSION,
            domain: serde_json::from_str(&domain_to_json(&m.domain))
                .expect("domain schema round-trips"),
            grid: GridSpec {
                n_per_side: m.disc.n_per_side,
                grading_p: m.disc.grading_p,
                component_sizes: m.disc.components.iter().map(Component::len).collect(),
                corners: m
                    .disc
                    .components
                    .iter()
                    .map(|c| c.corners.clone())
                    .collect(),
            },
            et: pack(&et),
            etp: pack(&etp),
            zet: pack(&m.zet.iter().flatten().copied().collect::<Vec<_>>()),
            zetp: pack(&m.zetp.iter().flatten().copied().collect::<Vec<_>>()),
            cent: pack(&m.cent),
            rad: m.rad.clone(),
            imgver: m.imgver.iter().map(|v| pack(v)).collect(),
            postmap: [
                [m.postmap.0.re, m.postmap.0.im],
                [m.postmap.1.re, m.postmap.1.im],
            ],
            normalization: m.normalization,
            diagnostics: m.diagnostics.clone(),
        }
    }

    fn into_map(self) -> Result<ConformalMap> {
        if self.version != MAP_FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                found: self.version,
                expected: MAP_FORMAT_VERSION,
            });
        }
        let (domain, _) = domain_from_json(&self.domain.to_string())?;
        let total: usize = self.grid.component_sizes.iter().sum();
        if self.et.len() != total
            || self.etp.len() != total
            || self.zet.len() != total
            || self.zetp.len() != total
            || self.grid.corners.len() != self.grid.component_sizes.len()
        {
            return Err(Error::Schema("array lengths inconsistent with grid".into()));
        }
        let et = unpack(&self.et);
        let etp = unpack(&self.etp);
        let zet_flat = unpack(&self.zet);
        let zetp_flat = unpack(&self.zetp);
        let mut components = Vec::new();
        let mut zet = Vec::new();
        let mut zetp = Vec::new();
        let mut start = 0;
        for (j, &size) in self.grid.component_sizes.iter().enumerate() {
            let h = 2.0 * PI / size as f64;
            components.push(Component {
                t: (0..size).map(|r| h * (r as f64 + 0.5)).collect(),
                eta: et[start..start + size].to_vec(),
                etap: etp[start..start + size].to_vec(),
                etapp: vec![C64::new(0.0, 0.0); size],
                weight: h,
                corners: self.grid.corners[j].clone(),
            });
            zet.push(zet_flat[start..start + size].to_vec());
            zetp.push(zetp_flat[start..start + size].to_vec());
            start += size;
        }
        Ok(ConformalMap {
            domain,
            disc: BoundaryDiscretization {
                components,
                grading_p: self.grid.grading_p,
                n_per_side: self.grid.n_per_side,
            },
            zet,
            zetp,
            cent: unpack(&self.cent),
            rad: self.rad,
            imgver: self.imgver.iter().map(|v| unpack(v)).collect(),
            postmap: (
                C64::new(self.postmap[0][0], self.postmap[0][1]),
                C64::new(self.postmap[1][0], self.postmap[1][1]),
            ),
            normalization: self.normalization,
            diagnostics: self.diagnostics,
            delta_override: None,
        })
    }
}
