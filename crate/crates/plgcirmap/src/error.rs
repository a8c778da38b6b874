use thiserror::Error;

/// Errors produced anywhere in the mapping pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("polygon {polygon} has fewer than 3 vertices")]
    TooFewVertices { polygon: usize },

    #[error("polygon {polygon} is self-intersecting")]
    SelfIntersection { polygon: usize },

    #[error("polygons {a} and {b} intersect")]
    PolygonOverlap { a: usize, b: usize },

    #[error("polygons are nested incorrectly for a {kind} domain")]
    BadNesting { kind: &'static str },

    #[error("polygon {polygon} vertex {vertex} forms a cusp (interior angle {angle:.3e} rad)")]
    CuspAngle {
        polygon: usize,
        vertex: usize,
        angle: f64,
    },

    #[error("polygon {polygon} has repeated vertex {vertex}")]
    RepeatedVertex { polygon: usize, vertex: usize },

    #[error("alpha lies outside the domain")]
    AlphaOutside,

    #[error("alpha is infinite but the polygon configuration is bounded (or vice versa)")]
    AlphaBoundednessMismatch,

    #[error("beta vertex index {vertex} is not a vertex of the outer polygon")]
    BetaNotVertex { vertex: usize },

    #[error("discretization requires even n >= 4, got {n}")]
    BadMeshSize { n: usize },

    #[error("base point lies on the discretized curve")]
    BasePointOnCurve,

    #[error("base point for exterior map fell outside the hole of component {component}")]
    BasePointOutsideHole { component: usize },

    #[error("GMRES did not converge in {iterations} iterations (residual {residual:.3e})")]
    GmresNoConvergence { iterations: usize, residual: f64 },

    #[error("Koebe iteration failed at cycle {cycle}, component {component}: {source}")]
    KoebeSubStep {
        cycle: usize,
        component: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("Koebe iteration did not reach tolerance {tol:.3e} in {cycles} cycles (deviation {deviation:.3e})")]
    KoebeNoConvergence {
        cycles: usize,
        tol: f64,
        deviation: f64,
    },

    #[error("normalization {condition} requires a {requires} domain")]
    NormalizationMismatch {
        condition: &'static str,
        requires: &'static str,
    },

    #[error("normalization requires a beta vertex but none was given")]
    BetaMissing,

    #[error("map was built from a non-converged result")]
    NotConverged,

    #[error("map file version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("invalid map or domain file: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
