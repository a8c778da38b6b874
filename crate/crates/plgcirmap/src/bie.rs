//! Boundary-integral core: the generalized Neumann kernel operator, singular
//! right-hand sides, an unrestarted GMRES solver, and Cauchy-integral
//! evaluators.
//!
//! The kernel acting on a parametrized boundary η with auxiliary function A:
//!
//! ```text
//! N(s,t) = (1/π) Im[ (A(s)/A(t)) η′(t) / (η(t) − η(s)) ]
//! N(t,t) = (1/π) Im[ η″(t)/(2η′(t)) − A′(t)/A(t) ]
//! ```
//!
//! and `M` is the real-part companion, which carries a cotangent singularity
//! handled by an exact split: the periodic singular part goes through FFT
//! conjugation, the bounded remainder through the trapezoidal rule.
//!
//! Everything here is direct `O(N²)` summation; an accelerated matrix-vector
//! product can be substituted behind [`gmres_solve`]'s operator closure.

use crate::discretize::BoundaryDiscretization;
use crate::error::{Error, Result};
use crate::spectral::{conjugate_operator, PeriodicSamples};
use crate::C64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Which Riemann–Hilbert configuration the kernel is built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelVariant {
    /// `A(t) = η(t) − basepoint`, basepoint inside the curve.
    Interior,
    /// `A(t) ≡ 1`, basepoint inside the complementary hole.
    Exterior,
}

/// Kernel configuration: variant plus the base point feeding `A` and γ.
#[derive(Debug, Clone, Copy)]
pub struct KernelConfig {
    pub variant: KernelVariant,
    pub basepoint: C64,
}

/// Node-flattened view of a discretization, with component ids.
pub(crate) struct Flat {
    pub eta: Vec<C64>,
    pub etap: Vec<C64>,
    pub etapp: Vec<C64>,
    pub w: Vec<f64>,
    pub t: Vec<f64>,
    pub comp: Vec<usize>,
}

pub(crate) fn flatten(disc: &BoundaryDiscretization) -> Flat {
    let n = disc.total_nodes();
    let mut f = Flat {
        eta: Vec::with_capacity(n),
        etap: Vec::with_capacity(n),
        etapp: Vec::with_capacity(n),
        w: Vec::with_capacity(n),
        t: Vec::with_capacity(n),
        comp: Vec::with_capacity(n),
    };
    for (j, c) in disc.components.iter().enumerate() {
        f.eta.extend_from_slice(&c.eta);
        f.etap.extend_from_slice(&c.etap);
        f.etapp.extend_from_slice(&c.etapp);
        f.w.extend(std::iter::repeat_n(c.weight, c.len()));
        f.t.extend_from_slice(&c.t);
        f.comp.extend(std::iter::repeat_n(j, c.len()));
    }
    f
}

fn aux(flat: &Flat, cfg: &KernelConfig, i: usize) -> C64 {
    match cfg.variant {
        KernelVariant::Interior => flat.eta[i] - cfg.basepoint,
        KernelVariant::Exterior => C64::new(1.0, 0.0),
    }
}

/// Apply `I − N` to a density by direct Nyström summation.
pub fn apply_i_minus_n(disc: &BoundaryDiscretization, cfg: &KernelConfig, mu: &[f64]) -> Vec<f64> {
    let flat = flatten(disc);
    apply_i_minus_n_flat(&flat, cfg, mu)
}

pub(crate) fn apply_i_minus_n_flat(flat: &Flat, cfg: &KernelConfig, mu: &[f64]) -> Vec<f64> {
    let n = flat.eta.len();
    assert_eq!(mu.len(), n);
    let a: Vec<C64> = (0..n).map(|i| aux(flat, cfg, i)).collect();
    // Corner-robust singularity subtraction: apply the kernel to the
    // difference μ(t) − μ(s) and use the exact identity N·1 = −1, so rows
    // near corners see a factor that vanishes where the kernel peaks:
    //   (I − N)μ(s) = 2μ(s) − ∫ N(s,t)(μ(t) − μ(s)) dt.
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for j in 0..n {
                if i == j {
                    continue; // the difference factor removes the diagonal
                }
                let nij = ((a[i] / a[j]) * flat.etap[j] / (flat.eta[j] - flat.eta[i])).im / PI;
                acc += flat.w[j] * nij * (mu[j] - mu[i]);
            }
            2.0 * mu[i] - acc
        })
        .collect()
}

/// Build `γ(t) = −log|η(t) − basepoint|` and return `−(Mγ)`, the right-hand
/// side of the integral equation `(I − N)μ = −Mγ`.
pub fn compute_rhs(disc: &BoundaryDiscretization, cfg: &KernelConfig) -> Result<Vec<f64>> {
    let flat = flatten(disc);
    let scale: f64 = flat
        .eta
        .iter()
        .map(|e| e.norm())
        .fold(0.0, f64::max)
        .max(1.0);
    if flat
        .eta
        .iter()
        .any(|&e| (e - cfg.basepoint).norm() < 1e-12 * scale)
    {
        return Err(Error::BasePointOnCurve);
    }
    let gamma: Vec<f64> = flat
        .eta
        .iter()
        .map(|&e| -(e - cfg.basepoint).norm().ln())
        .collect();
    Ok(apply_m(disc, cfg, &gamma).iter().map(|v| -v).collect())
}

/// Apply the singular companion operator `M` to boundary data `γ` by the
/// cotangent-split quadrature: the periodic singular part goes through the
/// FFT conjugation operator, the remainder through the trapezoidal rule.
pub fn apply_m(disc: &BoundaryDiscretization, cfg: &KernelConfig, gamma: &[f64]) -> Vec<f64> {
    let flat = flatten(disc);
    let n = flat.eta.len();
    let a: Vec<C64> = (0..n).map(|i| aux(&flat, cfg, i)).collect();
    let psi: Vec<C64> = (0..n).map(|i| gamma[i] / a[i]).collect();

    // Singular part: the half-cotangent kernel applied per component via the
    // FFT conjugation operator.
    let mut j_sing = vec![C64::new(0.0, 0.0); n];
    let mut start = 0;
    loop {
        if start >= n {
            break;
        }
        let comp = flat.comp[start];
        let end = start
            + flat.comp[start..]
                .iter()
                .take_while(|&&c| c == comp)
                .count();
        let k = conjugate_operator(&PeriodicSamples::new(psi[start..end].to_vec()));
        for (i, v) in k.values.iter().enumerate() {
            j_sing[start + i] = -PI * v;
        }
        start = end;
    }

    // Desingularized remainder by the trapezoidal rule, with the same
    // corner-robust subtraction as the `N` operator: the kernel acts on
    // ψ(t) − ψ(s), and the exact value of the subtracted moment,
    //   PV ∮ η′(t)/(η(t) − η(s)) dt = ±iπ
    // (+ for a boundary traversed with a bounded region on the left, − for
    // the clockwise curve of the exterior configuration), restores the
    // total.  The subtraction changes nothing for the cotangent part, whose
    // principal value over a period is zero.
    let c0 = match cfg.variant {
        KernelVariant::Interior => C64::new(0.0, PI),
        KernelVariant::Exterior => C64::new(0.0, -PI),
    };
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut smooth = C64::new(0.0, 0.0);
            for j in 0..n {
                if i == j {
                    continue; // the difference factor removes the diagonal
                }
                let mut kernel = flat.etap[j] / (flat.eta[j] - flat.eta[i]);
                if flat.comp[i] == flat.comp[j] {
                    kernel -= C64::new(0.5 / ((flat.t[j] - flat.t[i]) / 2.0).tan(), 0.0);
                }
                smooth += flat.w[j] * (psi[j] - psi[i]) * kernel;
            }
            (a[i] / PI * (smooth + j_sing[i] + psi[i] * c0)).re
        })
        .collect()
}

/// Outcome of a GMRES solve.
#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final relative residual.
    pub residual: f64,
    pub converged: bool,
    /// Happy breakdown: the Krylov space became invariant.
    pub breakdown: bool,
}

/// Unrestarted GMRES with modified Gram–Schmidt and Givens rotations.
pub fn gmres_solve(
    matvec: impl Fn(&[f64]) -> Vec<f64>,
    rhs: &[f64],
    tol: f64,
    maxit: usize,
) -> GmresOutcome {
    let n = rhs.len();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let b_norm = norm(rhs);
    if b_norm == 0.0 {
        return GmresOutcome {
            x: vec![0.0; n],
            iterations: 0,
            residual: 0.0,
            converged: true,
            breakdown: false,
        };
    }
    let maxit = maxit.min(n);
    let mut basis: Vec<Vec<f64>> = vec![rhs.iter().map(|x| x / b_norm).collect()];
    // Upper-Hessenberg columns after Givens, plus the rotation history.
    let mut h_cols: Vec<Vec<f64>> = Vec::new();
    let mut cs: Vec<f64> = Vec::new();
    let mut sn: Vec<f64> = Vec::new();
    let mut g = vec![0.0; maxit + 1];
    g[0] = b_norm;
    let mut iterations = 0;
    let mut converged = false;
    let mut breakdown = false;

    for k in 0..maxit {
        let mut w = matvec(&basis[k]);
        let mut h = vec![0.0; k + 2];
        for (j, v) in basis.iter().enumerate() {
            let hij: f64 = w.iter().zip(v).map(|(a, b)| a * b).sum();
            h[j] = hij;
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi -= hij * vi;
            }
        }
        let wn = norm(&w);
        h[k + 1] = wn;
        iterations = k + 1;
        let tiny = wn <= 1e-14 * b_norm.max(1.0);
        if !tiny {
            basis.push(w.iter().map(|x| x / wn).collect());
        }
        // Apply the accumulated rotations, then a new one to zero h[k+1].
        for j in 0..k {
            let (c, s) = (cs[j], sn[j]);
            let tmp = c * h[j] + s * h[j + 1];
            h[j + 1] = -s * h[j] + c * h[j + 1];
            h[j] = tmp;
        }
        let r = (h[k] * h[k] + h[k + 1] * h[k + 1]).sqrt();
        let (c, s) = if r == 0.0 {
            (1.0, 0.0)
        } else {
            (h[k] / r, h[k + 1] / r)
        };
        cs.push(c);
        sn.push(s);
        h[k] = r;
        h[k + 1] = 0.0;
        g[k + 1] = -s * g[k];
        g[k] *= c;
        h_cols.push(h);
        let rel = g[k + 1].abs() / b_norm;
        if rel <= tol {
            converged = true;
            break;
        }
        if tiny {
            breakdown = true;
            converged = true; // invariant subspace: the LS solution is exact
            break;
        }
    }

    // Back-substitute the triangular system and assemble the solution.
    let k = iterations;
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for j in i + 1..k {
            s -= h_cols[j][i] * y[j];
        }
        y[i] = s / h_cols[i][i];
    }
    let mut x = vec![0.0; n];
    for (j, yj) in y.iter().enumerate() {
        for (xi, vi) in x.iter_mut().zip(&basis[j]) {
            *xi += yj * vi;
        }
    }
    let residual = {
        let ax = matvec(&x);
        let diff: f64 = ax
            .iter()
            .zip(rhs)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        diff / b_norm
    };
    GmresOutcome {
        x,
        iterations,
        residual,
        converged: converged && residual <= 10.0 * tol,
        breakdown,
    }
}

/// Evaluation region for the Cauchy-integral evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CauchyMode {
    /// Targets inside a bounded region; barycentric-normalized integral.
    Bounded,
    /// Targets in an unbounded region, boundary data vanishing at infinity.
    Unbounded,
}

/// Evaluate an analytic function from its boundary samples `g` at interior
/// targets by a normalized Cauchy integral.
pub fn cauchy_eval(
    disc: &BoundaryDiscretization,
    g: &[C64],
    targets: &[C64],
    mode: CauchyMode,
) -> Vec<C64> {
    let flat = flatten(disc);
    cauchy_eval_flat(&flat, g, targets, mode)
}

pub(crate) fn cauchy_eval_flat(
    flat: &Flat,
    g: &[C64],
    targets: &[C64],
    mode: CauchyMode,
) -> Vec<C64> {
    let n = flat.eta.len();
    assert_eq!(g.len(), n);
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    targets
        .par_iter()
        .map(|&z| {
            let mut num = C64::new(0.0, 0.0);
            let mut den = C64::new(0.0, 0.0);
            for (j, &gj) in g.iter().enumerate() {
                let d = flat.eta[j] - z;
                // Exact node hit: the barycentric limit is the node value.
                if d.re == 0.0 && d.im == 0.0 {
                    return gj;
                }
                let ker = flat.w[j] * flat.etap[j] / d;
                num += gj * ker;
                den += ker;
            }
            match mode {
                CauchyMode::Bounded => num / den,
                // The point at infinity acts as one extra node with value 0
                // and kernel weight 2πi, giving a form that interpolates on
                // the curve and stays accurate near it.
                CauchyMode::Unbounded => num / (den + two_pi_i),
            }
        })
        .collect()
}

/// Derivative of the Cauchy integral: `(1/2πi) Σ W g η′ / (η − z)²`.
pub fn cauchy_deriv(
    disc: &BoundaryDiscretization,
    g: &[C64],
    targets: &[C64],
    _mode: CauchyMode,
) -> Vec<C64> {
    let flat = flatten(disc);
    cauchy_deriv_flat(&flat, g, targets)
}

pub(crate) fn cauchy_deriv_flat(flat: &Flat, g: &[C64], targets: &[C64]) -> Vec<C64> {
    let n = flat.eta.len();
    assert_eq!(g.len(), n);
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    targets
        .par_iter()
        .map(|&z| {
            let mut acc = C64::new(0.0, 0.0);
            for (j, &gj) in g.iter().enumerate() {
                let d = flat.eta[j] - z;
                acc += flat.w[j] * gj * flat.etap[j] / (d * d);
            }
            acc / two_pi_i
        })
        .collect()
}
