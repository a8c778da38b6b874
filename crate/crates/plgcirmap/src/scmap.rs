//! Simply connected building blocks of the iteration: conformal maps from a
//! bounded domain onto the unit disk and from an unbounded domain onto the
//! exterior of the unit disk, each obtained from one boundary integral
//! equation solve.

use crate::bie::{
    apply_i_minus_n, cauchy_eval, compute_rhs, gmres_solve, CauchyMode, KernelConfig, KernelVariant,
};
use crate::discretize::{BoundaryDiscretization, Component};
use crate::error::{Error, Result};
use crate::spectral::derivative_real;
use crate::C64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubMapKind {
    Interior,
    Exterior,
}

/// One Koebe sub-step: the boundary correspondence of a simply connected
/// map, plus affine-at-infinity tracking data for the exterior kind.
#[derive(Debug, Clone)]
pub struct SubMap {
    pub kind: SubMapKind,
    /// Boundary correspondence onto the unit circle; unimodular by
    /// construction.
    pub zeta: Vec<C64>,
    pub mu: Vec<f64>,
    /// α̂ for the interior kind, β₀ for the exterior kind.
    pub base: C64,
    /// Exterior kind: real constant with leading coefficient `c = e^{-h}`.
    pub h: f64,
    /// Leading coefficient at infinity; 1 for the interior kind.
    pub c: f64,
    /// Affine constant: the sub-map behaves like `c·z + b + O(1/z)` at ∞.
    pub b: C64,
    /// Derivative of the boundary angle along the correspondence.
    pub theta_p: Vec<f64>,
    /// Solvability diagnostic: |Im| of the quadrature defining `h`.
    pub im_h_residual: f64,
    pub gmres_iterations: usize,
    pub gmres_residual: f64,
}

fn solve_density(
    disc: &BoundaryDiscretization,
    cfg: &KernelConfig,
    gmres_tol: f64,
    gmres_maxit: usize,
) -> Result<(Vec<f64>, usize, f64)> {
    let rhs = compute_rhs(disc, cfg)?;
    let out = gmres_solve(
        |mu| apply_i_minus_n(disc, cfg, mu),
        &rhs,
        gmres_tol,
        gmres_maxit,
    );
    if !out.converged {
        return Err(Error::GmresNoConvergence {
            iterations: out.iterations,
            residual: out.residual,
        });
    }
    Ok((out.x, out.iterations, out.residual))
}

/// Map the bounded domain interior to a counterclockwise `curve` onto the
/// unit disk, sending `alpha` to 0 with positive derivative.
pub fn disk_map_bounded(
    curve: &Component,
    alpha: C64,
    gmres_tol: f64,
    gmres_maxit: usize,
) -> Result<SubMap> {
    let disc = BoundaryDiscretization::single(curve.clone());
    let cfg = KernelConfig {
        variant: KernelVariant::Interior,
        basepoint: alpha,
    };
    let (mu, iters, res) = solve_density(&disc, &cfg, gmres_tol, gmres_maxit)?;
    let zeta: Vec<C64> = curve
        .eta
        .iter()
        .zip(&mu)
        .map(|(&e, &m)| {
            let d = e - alpha;
            d / d.norm() * C64::from_polar(1.0, m)
        })
        .collect();
    let mup = derivative_real(&mu);
    let theta_p: Vec<f64> = curve
        .eta
        .iter()
        .zip(&curve.etap)
        .zip(&mup)
        .map(|((&e, &ep), &mp)| (ep / (e - alpha)).im + mp)
        .collect();
    Ok(SubMap {
        kind: SubMapKind::Interior,
        zeta,
        mu,
        base: alpha,
        h: 0.0,
        c: 1.0,
        b: C64::new(0.0, 0.0),
        theta_p,
        im_h_residual: 0.0,
        gmres_iterations: iters,
        gmres_residual: res,
    })
}

/// Winding number of the discretized curve about `z`.
fn winding(curve: &Component, z: C64) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for (&e, &ep) in curve.eta.iter().zip(&curve.etap) {
        acc += curve.weight * ep / (e - z);
    }
    (acc / C64::new(0.0, 2.0 * PI)).re
}

/// Pick a point inside the hole bounded by the clockwise `curve`.
fn hole_point(curve: &Component) -> Result<C64> {
    let n = curve.len() as f64;
    let mean = curve.eta.iter().sum::<C64>() / n;
    if (winding(curve, mean) + 1.0).abs() < 0.1 {
        return Ok(mean);
    }
    // Nonconvex hole: intersect a horizontal line through the vertical
    // median with the boundary polyline and take the first span's midpoint.
    let mut ys: Vec<f64> = curve.eta.iter().map(|e| e.im).collect();
    ys.sort_by(f64::total_cmp);
    let y = ys[ys.len() / 2];
    let mut xs = Vec::new();
    for i in 0..curve.len() {
        let a = curve.eta[i];
        let b = curve.eta[(i + 1) % curve.len()];
        if (a.im > y) != (b.im > y) {
            xs.push(a.re + (y - a.im) / (b.im - a.im) * (b.re - a.re));
        }
    }
    xs.sort_by(f64::total_cmp);
    for pair in xs.chunks(2) {
        if let [x0, x1] = pair {
            let cand = C64::new(0.5 * (x0 + x1), y);
            if (winding(curve, cand) + 1.0).abs() < 0.1 {
                return Ok(cand);
            }
        }
    }
    Err(Error::BasePointOutsideHole { component: 0 })
}

/// Map the unbounded domain exterior to a clockwise `curve` onto the
/// exterior of the unit disk, fixing ∞ with positive derivative there.
pub fn disk_map_unbounded(curve: &Component, gmres_tol: f64, gmres_maxit: usize) -> Result<SubMap> {
    let beta0 = hole_point(curve)?;
    let disc = BoundaryDiscretization::single(curve.clone());
    let cfg = KernelConfig {
        variant: KernelVariant::Exterior,
        basepoint: beta0,
    };
    let (mu, iters, res) = solve_density(&disc, &cfg, gmres_tol, gmres_maxit)?;
    let gamma: Vec<f64> = curve
        .eta
        .iter()
        .map(|&e| -(e - beta0).norm().ln())
        .collect();
    // h from the hole-point Cauchy moment of the boundary values γ + iμ.
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    let mut moment = C64::new(0.0, 0.0);
    for i in 0..curve.len() {
        let g = C64::new(gamma[i], mu[i]);
        moment += curve.weight * g * curve.etap[i] / (curve.eta[i] - beta0);
    }
    moment /= two_pi_i;
    let h = moment.re;
    let im_h_residual = moment.im.abs();
    let c = (-h).exp();
    let zeta: Vec<C64> = curve
        .eta
        .iter()
        .zip(&mu)
        .map(|(&e, &m)| {
            let d = e - beta0;
            d / d.norm() * C64::from_polar(1.0, m)
        })
        .collect();
    // b from the vanishing-at-∞ moment of g + h.
    let mut bsum = C64::new(0.0, 0.0);
    for i in 0..curve.len() {
        let g = C64::new(gamma[i] + h, mu[i]);
        bsum += curve.weight * g * curve.etap[i];
    }
    let b = c * (-beta0 - bsum / two_pi_i);
    let mup = derivative_real(&mu);
    let theta_p: Vec<f64> = curve
        .eta
        .iter()
        .zip(&curve.etap)
        .zip(&mup)
        .map(|((&e, &ep), &mp)| (ep / (e - beta0)).im + mp)
        .collect();
    Ok(SubMap {
        kind: SubMapKind::Exterior,
        zeta,
        mu,
        base: beta0,
        h,
        c,
        b,
        theta_p,
        im_h_residual,
        gmres_iterations: iters,
        gmres_residual: res,
    })
}

/// Boundary samples of the sub-map derivative `f′(η(t)) = iθ′(t)ζ(t)/η′(t)`.
fn boundary_derivative(sm: &SubMap, curve: &Component) -> Vec<C64> {
    sm.zeta
        .iter()
        .zip(&sm.theta_p)
        .zip(&curve.etap)
        .map(|((&z, &tp), &ep)| C64::new(0.0, tp) * z / ep)
        .collect()
}

/// Push points (and optionally accumulated derivatives) through a sub-map by
/// Cauchy integrals over its source curve.
///
/// The derivative is pushed as an analytic function in its own right, from
/// its boundary values, rather than by differentiating the Cauchy kernel —
/// the latter loses accuracy for targets close to the curve, which occurs
/// whenever boundary components are close together.
pub fn submap_push(
    sm: &SubMap,
    curve: &Component,
    points: &[C64],
    derivs: Option<&[C64]>,
) -> (Vec<C64>, Option<Vec<C64>>) {
    let disc = BoundaryDiscretization::single(curve.clone());
    match sm.kind {
        SubMapKind::Interior => {
            let vals = cauchy_eval(&disc, &sm.zeta, points, CauchyMode::Bounded);
            let dv = derivs.map(|d| {
                let fpb = boundary_derivative(sm, curve);
                let f_prime = cauchy_eval(&disc, &fpb, points, CauchyMode::Bounded);
                d.iter().zip(&f_prime).map(|(&a, &b)| a * b).collect()
            });
            (vals, dv)
        }
        SubMapKind::Exterior => {
            let psi: Vec<C64> = sm
                .zeta
                .iter()
                .zip(&curve.eta)
                .map(|(&z, &e)| z / (e - sm.base) - sm.c)
                .collect();
            let cpsi = cauchy_eval(&disc, &psi, points, CauchyMode::Unbounded);
            let vals: Vec<C64> = points
                .iter()
                .zip(&cpsi)
                .map(|(&z, &w)| (z - sm.base) * (sm.c + w))
                .collect();
            let dv = derivs.map(|d| {
                // f′ − c is analytic in the exterior and vanishes at ∞.
                let fpb: Vec<C64> = boundary_derivative(sm, curve)
                    .into_iter()
                    .map(|v| v - sm.c)
                    .collect();
                let f_prime = cauchy_eval(&disc, &fpb, points, CauchyMode::Unbounded);
                d.iter()
                    .zip(&f_prime)
                    .map(|(&a, &b)| a * (sm.c + b))
                    .collect()
            });
            (vals, dv)
        }
    }
}
