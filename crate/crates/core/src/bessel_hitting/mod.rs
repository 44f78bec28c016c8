//! Bessel-process hitting times: the moving boundary with explicit density,
//! and the fixed-level hitting time through its spectral expansion.

mod boundary;
mod spectral;

pub use boundary::{hitting_pdf, moving_sphere_param_a, psi, MovingBoundary};
pub use spectral::{
    invert_cdf, laplace_transform, tail_spectral, InversionSettings, SpectralSeriesCache, MAX_TERMS,
    TERM_TOLERANCE, T_MIN_FACTOR,
};
