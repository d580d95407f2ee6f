use thiserror::Error;

/// Errors surfaced by basis construction, Hamiltonian assembly and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("strip length must be even and at least 6, got {0}")]
    BadStripLength(usize),

    #[error("particle number {n} does not fit on {l} sites")]
    BadFilling { l: usize, n: usize },

    #[error("seed occupation {seed:#x} has {expected} particles, expected {got}")]
    SeedFillingMismatch { seed: u64, expected: usize, got: usize },

    #[error("seed occupation {seed:#x} is frozen: no constraint-allowed hop")]
    FrozenSeed { seed: u64 },

    #[error("hop coupling must lie in [0, 1], got {0}")]
    CouplingOutOfRange(f64),

    #[error("region must be a nonempty strict subset of the strip")]
    BadRegion,

    #[error("frozen pattern fixes {got} particles outside the region, expected {expected}")]
    FrozenPatternMismatch { expected: usize, got: usize },

    #[error("no sector state matches the frozen pattern outside the region")]
    EmptyRestriction,

    #[error("torus dimensions must be even and at least 2, got {lx}x{ly}")]
    BadTorus { lx: usize, ly: usize },

    #[error("link occupation sum is not a multiple of the torus length; flux is fractional")]
    FractionalFlux,

    #[error("configuration is not close-packed")]
    NotClosePacked,

    #[error("flux sector ({fx},{fy}) is empty")]
    EmptyFluxSector { fx: i32, fy: i32 },

    #[error("dimension {dim} exceeds the dense cap {cap}; use the Krylov path")]
    DenseCapExceeded { dim: usize, cap: usize },

    #[error("eigendecomposition failed: {0}")]
    EigenFailure(String),

    #[error("ground-state iteration did not converge within {restarts} restarts (residual {residual:.3e}, tol {tol:.3e})")]
    GroundStateNoConvergence {
        restarts: usize,
        residual: f64,
        tol: f64,
    },

    #[error("Krylov step did not reach tol {tol:.3e} after {halvings} step halvings (last estimate {err:.3e})")]
    KrylovNoConvergence { err: f64, tol: f64, halvings: u32 },

    #[error("filling fraction {0} makes the correlator normalization singular")]
    SingularFilling(f64),

    #[error("configuration is not a member of the sector basis")]
    StateNotInSector,

    #[error("initial state is stationary: c(0) equals its long-time value, nothing relaxes")]
    FrozenCorrelator,

    #[error("integration horizon {t_max} lies below the second grid point {second}")]
    HorizonTooShort { t_max: f64, second: f64 },

    #[error("time grid bounds must satisfy 0 < t_min < t_max, got [{t_min}, {t_max}]")]
    BadGridBounds { t_min: f64, t_max: f64 },

    #[error("empty collection")]
    EmptyCollection,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
