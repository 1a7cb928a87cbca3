//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong while constructing curves, integrating
/// periods, or transporting them. Variants are grouped by how a caller
/// should react: bad input, degenerate geometry, or a numerical method
/// that ran out of road.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input data is malformed or out of the documented range.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two branch points (or two roots) coincide to within the degeneracy
    /// threshold, so the curve is singular.
    #[error("degenerate curve: branch points {i} and {j} separated by {gap:.3e} (threshold {threshold:.3e})")]
    DegenerateCurve {
        i: usize,
        j: usize,
        gap: f64,
        threshold: f64,
    },

    /// The cubic z^3 + h1 z + h2 has a (near-)multiple root.
    #[error("degenerate moduli: cubic discriminant {disc:.3e} below threshold {threshold:.3e}")]
    DegenerateModuli { disc: f64, threshold: f64 },

    /// A contour passes too close to a branch point.
    #[error("contour clearance violated: distance {dist:.3e} to branch point {index} (required {required:.3e})")]
    Clearance {
        index: usize,
        dist: f64,
        required: f64,
    },

    /// No admissible contour exists for the requested cycle.
    #[error("cycle construction failed: {0}")]
    CycleConstruction(String),

    /// Quadrature did not reach the requested tolerance within the node cap.
    #[error("quadrature did not converge: error {err:.3e} > tol {tol:.3e} at {nodes} nodes")]
    QuadratureNonConvergence { err: f64, tol: f64, nodes: usize },

    /// The square-root branch could not be tracked unambiguously.
    #[error("branch tracking failed: phase jump {jump:.3} rad at node {node} of {nodes}")]
    BranchTracking { jump: f64, node: usize, nodes: usize },

    /// Nearest-neighbour root matching found two assignments closer than the
    /// ambiguity threshold; the configuration is effectively degenerate.
    #[error("root tracking ambiguous: competing matches differ by {margin:.3e}")]
    RootTrackingAmbiguity { margin: f64 },

    /// A moduli path comes too close to the discriminant locus.
    #[error("path unsafe at t = {t:.6}: discriminant magnitude {disc:.3e} below the scale threshold {threshold:.3e}")]
    PathUnsafe { t: f64, disc: f64, threshold: f64 },

    /// The ODE integrator could not make progress.
    #[error("transport step size underflow at t = {t:.6} (step {step:.3e})")]
    StepUnderflow { t: f64, step: f64 },

    /// The ODE integrator exceeded its step budget.
    #[error("transport did not converge within {max_steps} steps")]
    TransportNonConvergence { max_steps: usize },

    /// An internal consistency check failed; indicates a bug, not bad input.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
