//! Random variate generation.
//!
//! Every stream is a ChaCha8 generator keyed by `(seed, stream_id)`: the seed
//! expands to the key and the stream id selects ChaCha's 64-bit stream word,
//! so workers get independent sequences without coordination and replays are
//! bit-identical on every platform. Gaussians use the ziggurat method of
//! `rand_distr::StandardNormal`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Result};
use crate::specfun::BesselIndex;

/// Name recorded in result metadata.
pub const RNG_ALGORITHM: &str = "chacha8 (rand_chacha 0.9, stream = worker id); normals: ziggurat (rand_distr 0.5)";

const TWO_PI: f64 = std::f64::consts::TAU;

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self { seed, stream_id, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on (0, 1].
    #[inline]
    pub fn uniform_pos(&mut self) -> f64 {
        1.0 - self.inner.random::<f64>()
    }

    /// Uniform on the open interval (0, 1).
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        let bits = self.inner.random::<u64>() >> 11;
        (bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `0..n`.
    #[inline]
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    #[inline]
    pub fn gaussian(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }
}

pub fn sample_gaussian(rng: &mut RngStream) -> f64 {
    rng.gaussian()
}

/// Uniform direction on the unit sphere of `R^delta`.
pub fn sample_unit_direction(delta: u32, rng: &mut RngStream) -> Result<Vec<f64>> {
    if delta < 2 {
        return domain(format!("direction needs dimension >= 2, got {delta}"));
    }
    let mut v = vec![0.0; delta as usize];
    fill_unit_direction(&mut v, rng);
    Ok(v)
}

/// In-place variant of [`sample_unit_direction`]; `out.len()` is the dimension (>= 2).
#[inline]
pub fn fill_unit_direction(out: &mut [f64], rng: &mut RngStream) {
    debug_assert!(out.len() >= 2);
    if out.len() == 2 {
        let (s, c) = (TWO_PI * rng.uniform_pos()).sin_cos();
        out[0] = c;
        out[1] = s;
        return;
    }
    loop {
        let mut norm2 = 0.0;
        for x in out.iter_mut() {
            *x = rng.gaussian();
            norm2 += *x * *x;
        }
        if norm2 > 1e-200 {
            let inv = 1.0 / norm2.sqrt();
            out.iter_mut().for_each(|x| *x *= inv);
            return;
        }
    }
}

/// Largest admissible hitting time `(a / (Γ(ν+1) 2^ν))^{1/(ν+1)}` of the moving boundary.
pub(crate) fn log_t_max(a: f64, index: BesselIndex) -> f64 {
    let nu = index.nu();
    (a.ln() - index.log_gamma_nu1() - nu * std::f64::consts::LN_2) / (nu + 1.0)
}

/// Hitting time of the moving boundary `ψ` with parameter `a`:
/// `t_max · (U_1⋯U_{⌊ν⌋+2})^{1/(ν+1)} · exp(-(ν-⌊ν⌋)/(ν+1) · G²)`.
pub fn sample_tau_psi(a: f64, index: BesselIndex, rng: &mut RngStream) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return domain(format!("sample_tau_psi needs finite a > 0, got {a}"));
    }
    Ok(tau_psi_with_t_max(log_t_max(a, index).exp(), index, rng))
}

#[inline]
pub(crate) fn tau_psi_with_t_max(t_max: f64, index: BesselIndex, rng: &mut RngStream) -> f64 {
    let nu1 = index.nu() + 1.0;
    let mut prod = 1.0;
    for _ in 0..index.floor_nu() + 2 {
        prod *= rng.uniform_pos();
    }
    let mut r = if index.delta() == 2 {
        t_max * prod
    } else {
        t_max * prod.powf(1.0 / nu1)
    };
    if index.frac_nu() > 0.0 {
        let g = rng.gaussian();
        r *= (-index.frac_nu() / nu1 * g * g).exp();
    }
    r
}

/// Inverse Gaussian variate with mean `mu` and shape `lambda` (Michael, Schucany and Haas).
pub fn sample_inverse_gaussian(mu: f64, lambda: f64, rng: &mut RngStream) -> Result<f64> {
    if !(mu > 0.0) || !mu.is_finite() {
        return domain(format!("inverse Gaussian mean must be > 0, got {mu}"));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return domain(format!("inverse Gaussian shape must be > 0, got {lambda}"));
    }
    let g = rng.gaussian();
    let y = mu * g * g;
    // mu + mu/(2λ)(y - sqrt(4λy + y²)) without the cancellation
    let root = (4.0 * lambda * y + y * y).sqrt();
    let x = mu - 2.0 * mu * y / (y + root).max(f64::MIN_POSITIVE);
    let x = if y == 0.0 { mu } else { x };
    if rng.uniform_pos() <= mu / (mu + x) {
        Ok(x)
    } else {
        Ok(mu * mu / x)
    }
}
