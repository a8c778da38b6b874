//! Solver parameters shared by the library entry point and the CLI.

use crate::error::{Error, Result};
use crate::mapdata::Normalization;

/// All knobs of one mapping run.
#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    /// Nodes per polygon side (even, ≥ 4).
    pub n: usize,
    /// Grading exponent of the corner-graded mesh.
    pub grading_p: u32,
    pub gmres_tol: f64,
    pub gmres_maxit: usize,
    pub koebe_tol: f64,
    pub koebe_maxit: usize,
    /// `None` selects the default for the domain kind: eq1 bounded / eq3
    /// unbounded, switching to eq2/eq4 when a β vertex is given.
    pub normalization: Option<Normalization>,
    /// Override of the trusted-evaluation margin δ.
    pub delta: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 512,
            grading_p: 3,
            gmres_tol: 0.5e-12,
            gmres_maxit: 100,
            koebe_tol: 1e-12,
            koebe_maxit: 100,
            normalization: None,
            delta: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 4 || !self.n.is_multiple_of(2) {
            return Err(Error::BadMeshSize { n: self.n });
        }
        // NaN tolerances must be rejected too, hence the explicit checks.
        if self.gmres_tol <= 0.0
            || self.gmres_tol.is_nan()
            || self.koebe_tol <= 0.0
            || self.koebe_tol.is_nan()
            || self.gmres_maxit == 0
            || self.koebe_maxit == 0
            || self.grading_p < 2
            || self.delta.is_some_and(|d| d <= 0.0 || d.is_nan())
        {
            return Err(Error::Schema("invalid solver configuration".into()));
        }
        Ok(())
    }

    /// Resolve the normalization for a domain kind and optional β vertex.
    pub fn resolved_normalization(&self, bounded: bool, has_beta: bool) -> Normalization {
        self.normalization.unwrap_or(match (bounded, has_beta) {
            (true, false) => Normalization::Eq1,
            (true, true) => Normalization::Eq2,
            (false, false) => Normalization::Eq3,
            (false, true) => Normalization::Eq4,
        })
    }
}
