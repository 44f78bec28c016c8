//! Level hitting time `τ_L` of the Bessel process started at 0: the
//! Ciesielski–Taylor spectral tail, its Laplace transform and inversion of
//! its distribution function.

use std::f64::consts::LN_2;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{domain, Error, Result};
use crate::specfun::{bessel_i_scaled_unchecked, bessel_j_unchecked, bessel_zeros, BesselIndex};

/// Terms below this magnitude are dropped.
pub const TERM_TOLERANCE: f64 = 1e-14;
/// Hard cap on the number of retained terms.
pub const MAX_TERMS: usize = 512;
/// Series cutoff `t_min = T_MIN_FACTOR · L²`.
pub const T_MIN_FACTOR: f64 = 0.02;

/// Zeros, rates and coefficients of the tail series for one `(ν, L)`.
#[derive(Debug)]
pub struct SpectralSeriesCache {
    index: BesselIndex,
    radius: f64,
    t_min: f64,
    zeros: Vec<f64>,
    // j_{ν,k}² / (2L²)
    rates: Vec<f64>,
    // j^{ν-1} / (J_{ν+1}(j) 2^{ν-1} Γ(ν+1))
    coeffs: Vec<f64>,
    cdf_at_min: f64,
    clamped: AtomicU64,
}

impl SpectralSeriesCache {
    pub fn new(index: BesselIndex, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return domain(format!("radius must be > 0, got {radius}"));
        }
        let nu = index.nu();
        let t_min = T_MIN_FACTOR * radius * radius;
        let log_norm = (nu - 1.0) * LN_2 + index.log_gamma_nu1();
        let mut zeros = Vec::new();
        let mut rates = Vec::new();
        let mut coeffs = Vec::new();
        let mut batch = 32;
        loop {
            if zeros.len() >= MAX_TERMS {
                return Err(Error::Truncation { t: t_min, terms: MAX_TERMS });
            }
            let want = batch.min(MAX_TERMS);
            let js = bessel_zeros(nu, want)?;
            let start = zeros.len();
            let mut met = false;
            for &j in &js[start..] {
                let rate = j * j / (2.0 * radius * radius);
                let c = ((nu - 1.0) * j.ln() - log_norm).exp() / bessel_j_unchecked(nu + 1.0, j);
                zeros.push(j);
                rates.push(rate);
                coeffs.push(c);
                if term_bound(c, rate, t_min) < TERM_TOLERANCE {
                    met = true;
                    break;
                }
            }
            if met {
                break;
            }
            batch *= 2;
        }
        let mut cache =
            Self { index, radius, t_min, zeros, rates, coeffs, cdf_at_min: 0.0, clamped: AtomicU64::new(0) };
        cache.cdf_at_min = 1.0 - cache.tail(t_min)?;
        Ok(cache)
    }

    pub fn index(&self) -> BesselIndex {
        self.index
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Smallest time at which the series is evaluated.
    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    /// Number of cached terms `K`.
    pub fn terms(&self) -> usize {
        self.zeros.len()
    }

    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// How many evaluations were clamped back into [0, 1].
    pub fn clamp_count(&self) -> u64 {
        self.clamped.load(Ordering::Relaxed)
    }

    /// `P_0(τ_L > t)`.
    pub fn tail(&self, t: f64) -> Result<f64> {
        Ok(self.tail_and_density(t)?.0)
    }

    /// `(P_0(τ_L > t), density of τ_L at t)` from one pass over the series.
    pub fn tail_and_density(&self, t: f64) -> Result<(f64, f64)> {
        if !(t >= self.t_min) || !t.is_finite() {
            return Err(Error::BelowSeriesCutoff { t, t_min: self.t_min });
        }
        let mut tail = 0.0;
        let mut dens = 0.0;
        for k in 0..self.zeros.len() {
            let e = (-self.rates[k] * t).exp();
            let term = self.coeffs[k] * e;
            tail += term;
            dens += self.rates[k] * term;
            if term_bound(self.coeffs[k], self.rates[k], t) < TERM_TOLERANCE {
                break;
            }
        }
        if !(0.0..=1.0).contains(&tail) {
            self.clamped.fetch_add(1, Ordering::Relaxed);
            tail = tail.clamp(0.0, 1.0);
        }
        Ok((tail, dens.max(0.0)))
    }

    /// Distribution function `F(t) = P_0(τ_L < t)`, extended below `t_min`
    /// by the small-time approximation used for inversion.
    pub fn cdf(&self, t: f64) -> Result<f64> {
        if t >= self.t_min {
            return Ok(1.0 - self.tail(t)?);
        }
        if !(t > 0.0) {
            return domain(format!("cdf needs t > 0, got {t}"));
        }
        Ok(self.small_time_cdf(t, self.cdf_at_min))
    }

    // One-sided level-hitting shape erfc(L/√(2t)), matched to the series at t_min.
    fn small_time_cdf(&self, t: f64, f_at_min: f64) -> f64 {
        let shape = |s: f64| libm::erfc(self.radius / (2.0 * s).sqrt());
        f_at_min * shape(t) / shape(self.t_min)
    }
}

#[inline]
fn term_bound(c: f64, rate: f64, t: f64) -> f64 {
    c.abs() * rate.max(1.0) * (-rate * t).exp()
}

/// Free-function form of [`SpectralSeriesCache::tail`].
pub fn tail_spectral(t: f64, cache: &SpectralSeriesCache) -> Result<f64> {
    cache.tail(t)
}

/// `E_x[exp(-λ τ_L)]` for the Bessel process of the given index.
pub fn laplace_transform(lambda: f64, x: f64, radius: f64, index: BesselIndex) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("lambda must be > 0, got {lambda}"));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return domain(format!("radius must be > 0, got {radius}"));
    }
    if !(0.0..=radius).contains(&x) {
        return domain(format!("starting point {x} outside [0, {radius}]"));
    }
    let nu = index.nu();
    let s = (2.0 * lambda).sqrt();
    let big = radius * s;
    let denom = bessel_i_scaled_unchecked(nu, big);
    let value = if x == radius {
        1.0
    } else if x > 0.0 {
        let small = x * s;
        let log_ratio = nu * (radius / x).ln() + (small - big);
        log_ratio.exp() * bessel_i_scaled_unchecked(nu, small) / denom
    } else {
        let log_num = nu * big.ln() - nu * LN_2 - index.log_gamma_nu1() - big;
        log_num.exp() / denom
    };
    if !value.is_finite() {
        return Err(Error::Overflow(format!("laplace transform at lambda = {lambda}")));
    }
    Ok(value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionSettings {
    /// Required `|F(t) - u|`.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for InversionSettings {
    fn default() -> Self {
        Self { tolerance: 1e-10, max_iterations: 200 }
    }
}

/// `F^{-1}(u)` by safeguarded Newton iteration on the spectral series.
pub fn invert_cdf(u: f64, cache: &SpectralSeriesCache, settings: &InversionSettings) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return domain(format!("invert_cdf needs u in (0, 1), got {u}"));
    }
    let t_min = cache.t_min;
    let f_min = cache.cdf_at_min;
    if u <= f_min {
        return Ok(invert_small_time(u, cache, f_min));
    }

    let eval = |t: f64| -> Result<(f64, f64)> {
        let (tail, dens) = cache.tail_and_density(t)?;
        Ok((1.0 - tail - u, dens))
    };

    // one-term exponential approximation of the tail
    let rate1 = cache.rates[0];
    let guess = |p: f64| ((cache.coeffs[0] / (1.0 - p)).ln() / rate1).max(t_min);
    let median = guess(0.5);

    let mut lo = t_min;
    let mut hi;
    let mut t;
    let mut iterations = 0;
    if u >= 0.5 {
        t = guess(u);
        hi = t;
        loop {
            iterations += 1;
            if eval(hi)?.0 >= 0.0 || iterations > settings.max_iterations {
                break;
            }
            lo = hi;
            hi *= 2.0;
        }
        if t > hi || t < lo {
            t = 0.5 * (lo + hi);
        }
    } else {
        hi = median;
        loop {
            iterations += 1;
            let cand = 0.5 * hi;
            if cand <= t_min || iterations > settings.max_iterations {
                break;
            }
            if eval(cand)?.0 < 0.0 {
                lo = cand;
                break;
            }
            hi = cand;
        }
        t = 0.5 * (lo + hi);
    }

    for _ in 0..settings.max_iterations {
        let (g, dens) = eval(t)?;
        if g < 0.0 {
            lo = lo.max(t);
        } else {
            hi = hi.min(t);
        }
        let mut next = if dens > 0.0 { t - g / dens } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - t).abs();
        if g.abs() <= settings.tolerance && (step <= 1e-14 * t || g.abs() <= 1e-15) {
            return Ok(t);
        }
        if step <= 2.0 * f64::EPSILON * t {
            if g.abs() <= settings.tolerance {
                return Ok(t);
            }
            break;
        }
        t = next;
    }
    Err(Error::NoConvergence { lo, hi, iterations: settings.max_iterations })
}

fn invert_small_time(u: f64, cache: &SpectralSeriesCache, f_min: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = cache.t_min;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cache.small_time_cdf(mid, f_min) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi).max(f64::MIN_POSITIVE)
}
