use crate::error::{domain, Result};

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// Stirling series is used from this argument upward; smaller arguments are
/// shifted by the recurrence Γ(x+1) = xΓ(x).
const STIRLING_FROM: f64 = 15.0;

/// Bernoulli coefficients B_{2k} / (2k(2k-1)) for k = 1..7.
const STIRLING_COEFFS: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
];

/// Natural logarithm of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("log_gamma requires finite x > 0, got {x}"));
    }
    Ok(log_gamma_unchecked(x))
}

pub(crate) fn log_gamma_unchecked(x: f64) -> f64 {
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    let mut z = x;
    let mut shift = 1.0;
    let mut log_shift = 0.0;
    while z < STIRLING_FROM {
        shift *= z;
        z += 1.0;
        // keep the running product far from overflow for tiny arguments
        if shift > 1e200 {
            log_shift += shift.ln();
            shift = 1.0;
        }
    }
    log_shift += shift.ln();
    stirling(z) - log_shift
}

fn stirling(z: f64) -> f64 {
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut pow = inv;
    for c in STIRLING_COEFFS {
        corr += c * pow;
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_TWO_PI + corr
}
