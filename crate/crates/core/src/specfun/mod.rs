//! Real-valued special functions: log-gamma, Bessel `J_ν` and `I_ν`, and the
//! positive zeros of `J_ν`.

mod bessel;
mod gamma;
mod zeros;

pub use bessel::{bessel_i, bessel_i_scaled, bessel_j, bessel_j_prime};
pub use gamma::log_gamma;
pub use zeros::{bessel_zero, bessel_zeros};

pub(crate) use bessel::{bessel_i_scaled_unchecked, bessel_j_unchecked};
pub(crate) use gamma::log_gamma_unchecked;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Index `ν = δ/2 - 1` of the Bessel process in integer dimension `δ >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BesselIndex {
    delta: u32,
}

impl BesselIndex {
    pub fn from_dimension(delta: u32) -> Result<Self> {
        if delta < 2 {
            return domain(format!("dimension must be >= 2, got {delta}"));
        }
        Ok(Self { delta })
    }

    pub fn delta(self) -> u32 {
        self.delta
    }

    pub fn nu(self) -> f64 {
        self.delta as f64 / 2.0 - 1.0
    }

    /// `⌊ν⌋`
    pub fn floor_nu(self) -> u32 {
        (self.delta - 2) / 2
    }

    /// `ν - ⌊ν⌋`, either 0 or 1/2.
    pub fn frac_nu(self) -> f64 {
        if self.delta.is_multiple_of(2) {
            0.0
        } else {
            0.5
        }
    }

    /// `ln Γ(ν + 1)`
    pub fn log_gamma_nu1(self) -> f64 {
        log_gamma_unchecked(self.nu() + 1.0)
    }
}
