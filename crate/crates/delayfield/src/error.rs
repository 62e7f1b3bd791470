use crate::C64;
use thiserror::Error;

/// Errors surfaced by the analysis pipeline.
///
/// Variants are deliberately fine-grained: callers (and the CLI exit-code
/// mapping) distinguish between precondition rejections, which are properties
/// of the requested point, and numerical failures.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("unsupported derivative order {0} (only k = 1, 2, 3)")]
    UnsupportedDerivative(u32),

    #[error("degenerate leading coefficient at lambda = {lambda} (lambda = -alpha drops the polynomial degree)")]
    DegenerateLeading { lambda: C64 },

    #[error("lambda = {lambda} lies in the degenerate set (k_i^2 = k_j^2); Vandermonde system singular")]
    SingularVandermonde { lambda: C64 },

    #[error("repeated characteristic roots at lambda = {lambda}")]
    RepeatedRoots { lambda: C64 },

    #[error("near-singular characteristic matrix entry at lambda = {lambda} (k_j close to +-rho_i)")]
    NearSingularEntry { lambda: C64 },

    #[error("lambda coincides with the essential spectrum point -alpha")]
    EssentialPoint,

    #[error("Newton did not converge within {maxit} iterations (last step {last_step:.3e})")]
    NoConvergence { maxit: usize, last_step: f64 },

    #[error("Newton step entered a forbidden region near lambda = {lambda}")]
    RegionAbort { lambda: C64 },

    #[error("matrix is not rank-deficient: smallest/largest singular value ratio {ratio:.3e}")]
    NotAnEigenvalue { ratio: f64 },

    #[error("matrix T(z) is singular or ill-conditioned at z = {z}")]
    TSingular { z: C64 },

    #[error("z = {z} is (numerically) an eigenvalue; the resolvent is undefined there")]
    AtEigenvalue { z: C64 },

    #[error("ill-conditioned solve (condition estimate {cond:.3e} exceeds the guard)")]
    IllConditioned { cond: f64 },

    #[error("resonance: {0}")]
    Resonance(String),

    #[error("contour pairing failed the proportionality check (relative fit residual {residual:.3e})")]
    ProportionalityFailure { residual: f64 },

    #[error("invalid contour: {0}")]
    InvalidContour(String),

    #[error("unsupported mesh size {m}: need an even m >= 2")]
    UnsupportedMesh { m: usize },

    #[error("time step incompatible with the delay grid: {0}")]
    StepMismatch(String),

    #[error("state norm exceeded 1e6 at t = {t:.3}")]
    Blowup { t: f64 },

    #[error("no sustained oscillation detected")]
    NoCycle,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors that reject a request because a stated precondition
    /// fails at the given point, as opposed to a numerical breakdown.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::DegenerateLeading { .. }
                | Error::SingularVandermonde { .. }
                | Error::RepeatedRoots { .. }
                | Error::NearSingularEntry { .. }
                | Error::EssentialPoint
                | Error::TSingular { .. }
                | Error::AtEigenvalue { .. }
                | Error::Resonance(_)
                | Error::UnsupportedMesh { .. }
                | Error::StepMismatch(_)
                | Error::InvalidContour(_)
        )
    }
}
