//! Bessel functions of real order and real argument.
//!
//! `J_ν` uses the ascending series for small arguments and Steed's method
//! (continued fractions CF1/CF2 with downward recurrence) beyond. `I_ν` uses
//! the ascending series, which has no cancellation, and the Hankel asymptotic
//! expansion for large arguments. Both are also available exponentially
//! scaled where overflow is a concern.

use std::f64::consts::PI;

use super::gamma::log_gamma_unchecked;
use crate::error::{domain, Error, Result};

const SERIES_MAX_X: f64 = 12.0;
const I_ASYMPTOTIC_FROM: f64 = 60.0;
const MAX_ITER: usize = 200_000;
const FPMIN: f64 = 1e-300;

fn check_args(name: &str, index: f64, x: f64) -> Result<()> {
    if !(index >= 0.0) || !index.is_finite() {
        return domain(format!("{name}: order must be finite and >= 0, got {index}"));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return domain(format!("{name}: argument must be finite and >= 0, got {x}"));
    }
    Ok(())
}

/// `J_index(x)` for `index >= 0`, `x >= 0`.
pub fn bessel_j(index: f64, x: f64) -> Result<f64> {
    check_args("bessel_j", index, x)?;
    Ok(bessel_j_unchecked(index, x))
}

/// Derivative `J'_index(x)`.
pub fn bessel_j_prime(index: f64, x: f64) -> Result<f64> {
    check_args("bessel_j_prime", index, x)?;
    Ok(j_and_derivative(index, x).1)
}

pub(crate) fn bessel_j_unchecked(index: f64, x: f64) -> f64 {
    if x <= SERIES_MAX_X.max(2.0 * index) {
        j_series(index, x)
    } else {
        steed(index, x).0
    }
}

/// `(J_ν(x), J'_ν(x))`.
pub(crate) fn j_and_derivative(index: f64, x: f64) -> (f64, f64) {
    if x <= SERIES_MAX_X.max(2.0 * index) {
        let j = j_series(index, x);
        let deriv = if x == 0.0 {
            if index == 1.0 {
                0.5
            } else if index == 0.0 || index > 1.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            index / x * j - j_series(index + 1.0, x)
        };
        (j, deriv)
    } else {
        steed(index, x)
    }
}

fn j_series(index: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if index == 0.0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x;
    let q = half * half;
    let mut term = (index * half.ln() - log_gamma_unchecked(index + 1.0)).exp();
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= -q / (k * (k + index));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || k > 500.0 {
            break;
        }
        k += 1.0;
    }
    sum
}

/// Steed's method for `x >= 2`; returns `(J_ν(x), J'_ν(x))`.
fn steed(nu: f64, x: f64) -> (f64, f64) {
    debug_assert!(x >= 2.0);
    let eps = f64::EPSILON;
    let nl = ((nu - x + 1.5).floor()).max(0.0) as usize;
    let mu = nu - nl as f64;
    let mu2 = mu * mu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1: J'_ν/J_ν by the modified Lentz method.
    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..MAX_ITER {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() <= eps {
            break;
        }
    }

    // Downward recurrence from ν to μ = ν - nl.
    let mut jl = isign * FPMIN;
    let mut jpl = h * jl;
    let jl1 = jl;
    let jp1 = jpl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let tmp = fact * jl + jpl;
        fact -= xi;
        jpl = fact * tmp - jl;
        jl = tmp;
    }
    if jl == 0.0 {
        jl = eps;
    }
    let f = jpl / jl;

    // CF2: p + iq by Steed's algorithm.
    let mut a = 0.25 - mu2;
    let mut p = -0.5 * xi;
    let mut q = 1.0;
    let br = 2.0 * x;
    let mut bi = 2.0;
    let mut fact = a * xi / (p * p + q * q);
    let mut cr = br + q * fact;
    let mut ci = bi + p * fact;
    let mut den = br * br + bi * bi;
    let mut dr = br / den;
    let mut di = -bi / den;
    let mut dlr = cr * dr - ci * di;
    let mut dli = cr * di + ci * dr;
    let mut tmp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = tmp;
    for i in 1..MAX_ITER {
        a += 2.0 * i as f64;
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if dr.abs() + di.abs() < FPMIN {
            dr = FPMIN;
        }
        fact = a / (cr * cr + ci * ci);
        cr = br + cr * fact;
        ci = bi - ci * fact;
        if cr.abs() + ci.abs() < FPMIN {
            cr = FPMIN;
        }
        den = dr * dr + di * di;
        dr /= den;
        di /= -den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        tmp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = tmp;
        if (dlr - 1.0).abs() + dli.abs() <= eps {
            break;
        }
    }
    let gam = (p - f) / q;
    let jmu = (w / ((p - f) * gam + q)).sqrt().copysign(jl);
    let scale = jmu / jl;
    (jl1 * scale, jp1 * scale)
}

/// `I_index(x)`; signals overflow when the value is not representable.
pub fn bessel_i(index: f64, x: f64) -> Result<f64> {
    check_args("bessel_i", index, x)?;
    if x <= I_ASYMPTOTIC_FROM {
        return Ok(i_series(index, x, false));
    }
    let scaled = i_asymptotic_scaled(index, x);
    let value = scaled.ln() + x;
    if value >= f64::MAX.ln() {
        return Err(Error::Overflow(format!("I_{index}({x}) exceeds f64 range")));
    }
    Ok(value.exp())
}

/// `e^{-x} I_index(x)`, finite for every admissible argument.
pub fn bessel_i_scaled(index: f64, x: f64) -> Result<f64> {
    check_args("bessel_i_scaled", index, x)?;
    Ok(bessel_i_scaled_unchecked(index, x))
}

pub(crate) fn bessel_i_scaled_unchecked(index: f64, x: f64) -> f64 {
    if x <= I_ASYMPTOTIC_FROM {
        i_series(index, x, true)
    } else {
        i_asymptotic_scaled(index, x)
    }
}

fn i_series(index: f64, x: f64, scaled: bool) -> f64 {
    if x == 0.0 {
        return if index == 0.0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x;
    let q = half * half;
    let mut log_lead = index * half.ln() - log_gamma_unchecked(index + 1.0);
    if scaled {
        log_lead -= x;
    }
    let mut term = log_lead.exp();
    let mut sum = term;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + index));
        sum += term;
        if term <= 1e-17 * sum || k > 2000.0 {
            break;
        }
        k += 1.0;
    }
    sum
}

fn i_asymptotic_scaled(index: f64, x: f64) -> f64 {
    let mu = 4.0 * index * index;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= -(mu - odd * odd) / (k as f64 * 8.0 * x);
        if term.abs() >= prev {
            break;
        }
        sum += term;
        prev = term.abs();
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}
