//! Koebe's iterative method: cycle simply connected sub-maps over the
//! boundary components until every image component is a circle, then apply
//! the requested normalization.
//!
//! Cycle order: hole components first (exterior sub-maps), then — for
//! bounded domains — the outer component (interior sub-map), so each cycle
//! of a bounded run ends with the outer boundary exactly on the unit circle
//! and the tracked base point at 0.

use crate::bie::{cauchy_deriv, CauchyMode};
use crate::discretize::{BoundaryDiscretization, Component};
use crate::error::{Error, Result};
use crate::geometry::{CircularDomain, PolygonalDomain};
use crate::mapdata::{build_map, ConformalMap, Normalization};
use crate::scmap::{disk_map_bounded, disk_map_unbounded, submap_push};
use crate::spectral::{spectral_derivative, trig_interpolate, PeriodicSamples};
use crate::C64;

/// Solver knobs for one Koebe run.
#[derive(Debug, Clone, Copy)]
pub struct KoebeOptions {
    pub koebe_tol: f64,
    pub koebe_maxit: usize,
    pub gmres_tol: f64,
    pub gmres_maxit: usize,
}

impl Default for KoebeOptions {
    fn default() -> Self {
        KoebeOptions {
            koebe_tol: 1e-12,
            koebe_maxit: 100,
            gmres_tol: 0.5e-12,
            gmres_maxit: 100,
        }
    }
}

/// Fit a circle to points by algebraic least squares (Kåsa fit), which
/// recovers the exact circle for points on one regardless of how they are
/// distributed along it.  Returns (center, radius, deviation), where the
/// deviation is the max radial spread relative to the radius.
pub fn fit_circle(points: &[C64]) -> (C64, f64, f64) {
    assert!(points.len() >= 3);
    // Least squares for u = 2a·x + 2b·y + k with u = x² + y²; then the
    // center is (a, b) and r² = k + a² + b².  Shift to the centroid first
    // for conditioning.
    let n = points.len() as f64;
    let mean = points.iter().sum::<C64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    let (mut sxu, mut syu) = (0.0, 0.0);
    let mut su = 0.0;
    for p in points {
        let (x, y) = (p.re - mean.re, p.im - mean.im);
        let u = x * x + y * y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        sxu += x * u;
        syu += y * u;
        su += u;
    }
    // Normal equations for (a, b); the constant row decouples because the
    // shifted coordinates have zero mean.
    let det = sxx * syy - sxy * sxy;
    let (a, b) = if det.abs() > 0.0 {
        (
            0.5 * (syu * (-sxy) + sxu * syy) / det,
            0.5 * (syu * sxx + sxu * (-sxy)) / det,
        )
    } else {
        (0.0, 0.0)
    };
    let k = su / n; // the k-row decouples: shifted coordinates have zero mean
    let radius = (k + a * a + b * b).max(0.0).sqrt();
    let center = mean + C64::new(a, b);
    let deviation = points
        .iter()
        .map(|p| ((p - center).norm() - radius).abs())
        .fold(0.0, f64::max)
        / radius;
    (center, radius, deviation)
}

/// Result of a Koebe run: the final boundary correspondence per component
/// (still in the iteration's own normalization), fitted circles, and
/// per-cycle diagnostics.
#[derive(Debug, Clone)]
pub struct KoebeResult {
    /// Final Z, Z′, Z″ per component on the fixed parameter grid.
    pub components: Vec<Component>,
    pub circles: CircularDomain,
    /// Max relative circle deviation at the end of each cycle.
    pub deviation_history: Vec<f64>,
    pub cycles: usize,
    pub converged: bool,
    /// GMRES iteration count of every sub-map solve, in execution order.
    pub gmres_iterations: Vec<usize>,
    /// Largest solvability residual reported by an exterior sub-map.
    pub max_im_h_residual: f64,
    /// Image of α for bounded runs (0 by construction).
    pub alpha_image: C64,
    /// Accumulated leading coefficient of the composite map at ∞.
    pub a_tot: f64,
    /// Accumulated affine constant of the composite map at ∞.
    pub b_tot: C64,
}

fn refresh_second_derivative(c: &mut Component) {
    c.etapp = spectral_derivative(&PeriodicSamples::new(c.etap.clone())).values;
}

/// Uniformly parametrized unit circle on the standard offset grid.
///
/// After a component's own sub-step its curve is exactly the unit circle, so
/// the solver state can be re-parametrized this way.  This discards the
/// corner-graded parametrization inherited from the polygon, whose η′ zeros
/// otherwise amplify node-level noise through the spectral differentiation
/// of the boundary correspondence, cycle after cycle.
fn unit_circle(n: usize, ccw: bool) -> Component {
    let s = if ccw { 1.0 } else { -1.0 };
    Component::from_fns(
        n,
        move |t| C64::from_polar(1.0, s * t),
        move |t| C64::new(0.0, s) * C64::from_polar(1.0, s * t),
        move |t| -C64::from_polar(1.0, s * t),
    )
}

fn push_component(sm: &crate::scmap::SubMap, source: &Component, c: &mut Component) {
    let (vals, derivs) = submap_push(sm, source, &c.eta, Some(&c.etap));
    c.eta = vals;
    c.etap = derivs.expect("derivatives requested");
    refresh_second_derivative(c);
}

/// Run Koebe's iterative method on a discretized domain.
pub fn koebe_iterate(
    disc: &BoundaryDiscretization,
    domain: &PolygonalDomain,
    opts: &KoebeOptions,
) -> Result<KoebeResult> {
    let m = disc.components.len();
    // Solver curves: the evolving region boundaries, re-parametrized onto
    // the uniform unit circle after each component's own sub-step.
    let mut curves: Vec<Component> = disc.components.to_vec();
    // Images of the original discretization nodes (the boundary
    // correspondence), pushed through every sub-map as passive point data
    // with multiplicatively accumulated derivatives.
    let mut images: Vec<Component> = disc.components.to_vec();
    let mut alpha_hat = if domain.bounded {
        domain.alpha.value()
    } else {
        C64::new(0.0, 0.0)
    };
    let mut a_tot = 1.0;
    let mut b_tot = C64::new(0.0, 0.0);
    let mut history = Vec::new();
    let mut gmres_iterations = Vec::new();
    let mut max_im_h_residual: f64 = 0.0;
    let mut converged = false;
    let mut cycles = 0;

    // Best iterate so far.  The deviation reaches the discretization floor
    // after a few cycles; once numerical noise starts amplifying instead of
    // contracting, further cycles only degrade the boundary correspondence,
    // so we stop on stagnation or divergence and keep the best state.
    #[allow(clippy::type_complexity)]
    let mut best: Option<(f64, Vec<Component>, Vec<Component>, C64, f64, C64, usize)> = None;

    let exterior_count = if domain.bounded { m - 1 } else { m };

    'cycles: for cycle in 1..=opts.koebe_maxit {
        cycles = cycle;
        for j in 0..exterior_count {
            let sm =
                disk_map_unbounded(&curves[j], opts.gmres_tol, opts.gmres_maxit).map_err(|e| {
                    Error::KoebeSubStep {
                        cycle,
                        component: j,
                        source: Box::new(e),
                    }
                })?;
            gmres_iterations.push(sm.gmres_iterations);
            max_im_h_residual = max_im_h_residual.max(sm.im_h_residual);
            let source = curves[j].clone();
            for k in 0..m {
                if k != j {
                    push_component(&sm, &source, &mut curves[k]);
                }
                push_component(&sm, &source, &mut images[k]);
            }
            if domain.bounded {
                let (vals, _) = submap_push(&sm, &source, &[alpha_hat], None);
                alpha_hat = vals[0];
            }
            a_tot *= sm.c;
            b_tot = sm.c * b_tot + sm.b;
            curves[j] = unit_circle(source.len(), false);
        }

        if domain.bounded {
            let j = m - 1;
            let sm = disk_map_bounded(&curves[j], alpha_hat, opts.gmres_tol, opts.gmres_maxit)
                .map_err(|e| Error::KoebeSubStep {
                    cycle,
                    component: j,
                    source: Box::new(e),
                })?;
            gmres_iterations.push(sm.gmres_iterations);
            let source = curves[j].clone();
            for k in 0..m {
                if k != j {
                    push_component(&sm, &source, &mut curves[k]);
                }
                push_component(&sm, &source, &mut images[k]);
            }
            alpha_hat = C64::new(0.0, 0.0);
            curves[j] = unit_circle(source.len(), true);
        }

        let deviation = curves
            .iter()
            .map(|c| fit_circle(&c.eta).2)
            .fold(0.0, f64::max);
        history.push(deviation);
        if deviation < opts.koebe_tol {
            converged = true;
            break 'cycles;
        }
        let improved = best.as_ref().is_none_or(|b| deviation < b.0);
        if improved {
            best = Some((
                deviation,
                curves.clone(),
                images.clone(),
                alpha_hat,
                a_tot,
                b_tot,
                cycle,
            ));
        }
        if let Some(b) = &best {
            // Divergence guard: noise amplification past the floor.
            if deviation > 100.0 * b.0 {
                break 'cycles;
            }
            // Stagnation guard: no progress for several cycles.
            if cycle - b.6 >= 5 {
                break 'cycles;
            }
        }
    }

    if !converged {
        if let Some((dev, c, im, a, at, bt, _)) = best {
            if dev < *history.last().unwrap_or(&f64::INFINITY) {
                curves = c;
                images = im;
                alpha_hat = a;
                a_tot = at;
                b_tot = bt;
                history.push(dev);
            }
        }
    }

    let (centers, radii): (Vec<C64>, Vec<f64>) = curves
        .iter()
        .map(|c| {
            let (cen, rad, _) = fit_circle(&c.eta);
            (cen, rad)
        })
        .unzip();
    let max_dev = history.last().copied().unwrap_or(f64::INFINITY);
    let result = KoebeResult {
        components: images,
        circles: CircularDomain {
            centers,
            radii,
            bounded: domain.bounded,
        },
        deviation_history: history,
        cycles,
        converged,
        gmres_iterations,
        max_im_h_residual,
        alpha_image: alpha_hat,
        a_tot,
        b_tot,
    };
    if !result.converged {
        return Err(Error::KoebeNoConvergence {
            cycles,
            tol: opts.koebe_tol,
            deviation: max_dev,
        });
    }
    Ok(result)
}

/// Interpolate the boundary correspondence of component `j` at parameter `t`.
fn correspondence_at(kr: &KoebeResult, j: usize, t: f64) -> C64 {
    trig_interpolate(&PeriodicSamples::new(kr.components[j].eta.clone()), &[t])[0]
}

/// Apply one of the normalization conditions and build the final map object.
///
/// Bounded domains accept the derivative-normalized (`Eq1`) and
/// point-normalized (`Eq2`) conditions; unbounded domains the identity-at-∞
/// (`Eq3`) and point-normalized (`Eq4`) conditions.
pub fn normalize(
    mut kr: KoebeResult,
    domain: &PolygonalDomain,
    disc: &BoundaryDiscretization,
    condition: Normalization,
) -> Result<ConformalMap> {
    let m = kr.components.len();
    let mut postmap = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    match condition {
        Normalization::Eq1 | Normalization::Eq2 => {
            if !domain.bounded {
                return Err(Error::NormalizationMismatch {
                    condition: condition.tag(),
                    requires: "bounded",
                });
            }
            let rot = match condition {
                Normalization::Eq1 => {
                    // Rotate so f′(α) is real positive.
                    let zet = kr.flattened_correspondence();
                    let fp =
                        cauchy_deriv(disc, &zet, &[domain.alpha.value()], CauchyMode::Bounded)[0];
                    C64::from_polar(1.0, -fp.arg())
                }
                _ => {
                    let k = domain.beta.ok_or(Error::BetaMissing)?;
                    let t_beta = kr.components[m - 1].corners[k];
                    let fb = correspondence_at(&kr, m - 1, t_beta);
                    fb.conj() / fb.norm()
                }
            };
            for c in &mut kr.components {
                for z in c.eta.iter_mut() {
                    *z *= rot;
                }
                for z in c.etap.iter_mut() {
                    *z *= rot;
                }
                for z in c.etapp.iter_mut() {
                    *z *= rot;
                }
            }
            for c in kr.circles.centers.iter_mut() {
                *c *= rot;
            }
        }
        Normalization::Eq3 | Normalization::Eq4 => {
            if domain.bounded {
                return Err(Error::NormalizationMismatch {
                    condition: condition.tag(),
                    requires: "unbounded",
                });
            }
            // Undo the accumulated affine part so f(z) = z + O(1/z) at ∞.
            let (a, b) = (kr.a_tot, kr.b_tot);
            for c in &mut kr.components {
                for z in c.eta.iter_mut() {
                    *z = (*z - b) / a;
                }
                for z in c.etap.iter_mut() {
                    *z /= a;
                }
                for z in c.etapp.iter_mut() {
                    *z /= a;
                }
            }
            for c in kr.circles.centers.iter_mut() {
                *c = (*c - b) / a;
            }
            for r in kr.circles.radii.iter_mut() {
                *r /= a;
            }
            if condition == Normalization::Eq4 {
                let k = domain.beta.ok_or(Error::BetaMissing)?;
                let t_beta = kr.components[m - 1].corners[k];
                let fb = correspondence_at(&kr, m - 1, t_beta);
                let cm = kr.circles.centers[m - 1];
                let rm = kr.circles.radii[m - 1];
                let phi = -(fb - cm).arg();
                let sigma = C64::from_polar(1.0 / rm, phi);
                postmap = (sigma, -sigma * cm);
            }
        }
    }
    build_map(kr, domain, disc, condition, postmap)
}

impl KoebeResult {
    /// Boundary correspondence flattened across components.
    pub fn flattened_correspondence(&self) -> Vec<C64> {
        self.components
            .iter()
            .flat_map(|c| c.eta.iter().copied())
            .collect()
    }
}
