//! Conformal mapping of polygonal multiply connected domains onto circular
//! domains, together with the inverse map and first derivatives.
//!
//! The pipeline:
//!
//! 1. [`geometry`] — validate the input polygons and locate points.
//! 2. [`discretize`] — graded-mesh boundary parametrization with analytic
//!    derivatives.
//! 3. [`bie`] — boundary integral machinery: generalized Neumann kernel,
//!    right-hand sides, GMRES, and Cauchy-integral evaluators.
//! 4. [`scmap`] — simply connected building blocks: maps onto the unit disk
//!    and onto the exterior of the unit disk.
//! 5. [`koebe`] — cyclic Koebe iteration until every boundary image is a
//!    circle, plus the final normalization.
//! 6. [`mapdata`] — the resulting map object with forward/inverse/derivative
//!    evaluation and JSON persistence.
//! 7. [`grids`] — clipped coordinate grids in either domain and SVG/JSONL
//!    export.

pub mod bie;
pub mod config;
pub mod discretize;
pub mod error;
pub mod geometry;
pub mod grids;
pub mod koebe;
pub mod mapdata;
pub mod scmap;
pub mod spectral;

pub use config::RunConfig;
pub use error::Error;
pub use geometry::{CircularDomain, PolygonalDomain};
pub use koebe::KoebeResult;
pub use mapdata::ConformalMap;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Compute the conformal map of a validated domain with the given
/// configuration: discretize, run the Koebe iteration, normalize.
pub fn compute_map(domain: &PolygonalDomain, cfg: &RunConfig) -> error::Result<ConformalMap> {
    cfg.validate()?;
    let disc = discretize::discretize_polygon(domain, cfg.n, cfg.grading_p)?;
    let opts = koebe::KoebeOptions {
        koebe_tol: cfg.koebe_tol,
        koebe_maxit: cfg.koebe_maxit,
        gmres_tol: cfg.gmres_tol,
        gmres_maxit: cfg.gmres_maxit,
    };
    let kr = koebe::koebe_iterate(&disc, domain, &opts)?;
    let norm = cfg.resolved_normalization(domain.bounded, domain.beta.is_some());
    let mut map = koebe::normalize(kr, domain, &disc, norm)?;
    map.delta_override = cfg.delta;
    Ok(map)
}
