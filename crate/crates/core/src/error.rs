use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("lattice needs at least two sites, got {0}")]
    TooFewSites(usize),
    #[error("unsupported lattice dimension {0}, expected 1 or 2")]
    UnsupportedDimension(usize),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },
    #[error("image-summed couplings diverge for alpha = {alpha} in d = {dimension} (need alpha > d)")]
    NonConvergentImageSum { alpha: f64, dimension: usize },
    #[error("image sum did not reach the requested tail tolerance (estimated relative tail {tail:e})")]
    ImageSumTruncated { tail: f64 },
    #[error("coupling matrix is {rows}x{cols}, expected {expected}x{expected}")]
    ShapeMismatch { rows: usize, cols: usize, expected: usize },
    #[error("coupling matrix is not translation invariant (max deviation {0:e})")]
    NotTranslationInvariant(f64),
    #[error("coupling matrix is not symmetric with zero diagonal (max deviation {0:e})")]
    NotSymmetric(f64),
    #[error("subsystem of {subsystem} sites is not a proper part of {sites} sites")]
    InvalidBipartition { subsystem: usize, sites: usize },
    #[error("site {site} outside a lattice of {sites} sites")]
    SiteOutOfRange { site: usize, sites: usize },
    #[error("time grid must be finite and strictly increasing")]
    NonMonotoneTimeGrid,
    #[error("unphysical Gaussian covariance: symplectic eigenvalue {0} below 1/2")]
    UnphysicalCovariance(f64),
    #[error("exact diagonalization is capped at {cap} sites, got {sites}")]
    SizeCapExceeded { sites: usize, cap: usize },
    #[error("exact diagonalization supports spin 1/2 only")]
    UnsupportedSpin,
    #[error("Krylov propagation stalled, residual estimate {residual:e}")]
    KrylovNotConverged { residual: f64 },
    #[error("Lanczos ground-state search stalled, residual {residual:e}")]
    LanczosNotConverged { residual: f64 },
}
