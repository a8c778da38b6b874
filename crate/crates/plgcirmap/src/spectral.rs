//! Periodic FFT utilities on the half-step-offset uniform grid: harmonic
//! conjugation, spectral differentiation, and trigonometric interpolation.
//!
//! Samples live at `t_r = h (r + 1/2)`, `h = 2π/N`; the offset is absorbed
//! by phase-shifting the Fourier coefficients around a standard FFT.  The
//! Nyquist mode is zeroed in every operator.

use crate::C64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Complex samples of a 2π-periodic function on the offset uniform grid.
#[derive(Debug, Clone)]
pub struct PeriodicSamples {
    pub values: Vec<C64>,
}

impl PeriodicSamples {
    pub fn new(values: Vec<C64>) -> Self {
        assert!(values.len().is_multiple_of(2), "even sample count required");
        PeriodicSamples { values }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self::new(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Fourier coefficients `c_k`, `k = -N/2 .. N/2-1`, returned in that order.
fn coefficients(samples: &PeriodicSamples) -> Vec<C64> {
    let n = samples.len();
    let mut buf = samples.values.clone();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = n as i64 / 2;
    (-half..half)
        .map(|k| {
            let idx = k.rem_euclid(n as i64) as usize;
            let phase = C64::from_polar(1.0, -PI * k as f64 / n as f64);
            buf[idx] * phase / n as f64
        })
        .collect()
}

/// Resynthesize offset-grid samples from signed-order coefficients.
fn synthesize(coeffs: &[C64]) -> PeriodicSamples {
    let n = coeffs.len();
    let half = n as i64 / 2;
    let mut buf = vec![C64::new(0.0, 0.0); n];
    for (i, &c) in coeffs.iter().enumerate() {
        let k = i as i64 - half;
        let idx = k.rem_euclid(n as i64) as usize;
        buf[idx] = c * C64::from_polar(1.0, PI * k as f64 / n as f64);
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    PeriodicSamples::new(buf)
}

fn apply_symbol(samples: &PeriodicSamples, symbol: impl Fn(i64) -> C64) -> PeriodicSamples {
    let n = samples.len() as i64;
    let half = n / 2;
    let mut coeffs = coefficients(samples);
    for (i, c) in coeffs.iter_mut().enumerate() {
        let k = i as i64 - half;
        *c *= if k == -half {
            C64::new(0.0, 0.0)
        } else {
            symbol(k)
        };
    }
    synthesize(&coeffs)
}

/// Harmonic conjugation: multiplies coefficient `k` by `-i sgn(k)`, zeroing
/// the mean and Nyquist modes.  Sends `cos kt` to `sin kt`.
pub fn conjugate_operator(samples: &PeriodicSamples) -> PeriodicSamples {
    apply_symbol(samples, |k| match k.cmp(&0) {
        std::cmp::Ordering::Greater => C64::new(0.0, -1.0),
        std::cmp::Ordering::Less => C64::new(0.0, 1.0),
        std::cmp::Ordering::Equal => C64::new(0.0, 0.0),
    })
}

/// Spectral differentiation: coefficient `k` multiplied by `ik`.
pub fn spectral_derivative(samples: &PeriodicSamples) -> PeriodicSamples {
    apply_symbol(samples, |k| C64::new(0.0, k as f64))
}

/// Evaluate the degree-`< N/2` trigonometric interpolant at `tq`.
pub fn trig_interpolate(samples: &PeriodicSamples, tq: &[f64]) -> Vec<C64> {
    let coeffs = coefficients(samples);
    let half = coeffs.len() as i64 / 2;
    tq.iter()
        .map(|&t| {
            let mut acc = C64::new(0.0, 0.0);
            for (i, &c) in coeffs.iter().enumerate() {
                let k = i as i64 - half;
                acc += c * C64::from_polar(1.0, k as f64 * t);
            }
            acc
        })
        .collect()
}

/// Conjugation applied to a real array, returning the real conjugate.
pub fn conjugate_real(values: &[f64]) -> Vec<f64> {
    conjugate_operator(&PeriodicSamples::from_real(values))
        .values
        .iter()
        .map(|c| c.re)
        .collect()
}

/// Spectral derivative of a real array.
pub fn derivative_real(values: &[f64]) -> Vec<f64> {
    spectral_derivative(&PeriodicSamples::from_real(values))
        .values
        .iter()
        .map(|c| c.re)
        .collect()
}
