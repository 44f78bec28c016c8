//! Hitting times of one-sided boundaries by standard one-dimensional Brownian
//! motion started at 0: constant levels, straight lines, and general smooth
//! boundaries through Durbin's tangent approximation and its Volterra series.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::samplers::{sample_inverse_gaussian, RngStream};

/// Smallest tabulation accepted by [`volterra_apply`].
pub const MIN_GRID_NODES: usize = 8;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A continuously differentiable boundary with `ψ(0+) > 0`.
#[derive(Clone)]
pub enum Boundary1D {
    Constant { level: f64 },
    Line { level: f64, slope: f64 },
    General {
        psi: RealFn,
        psi_prime: RealFn,
        /// Used by the removable-singularity guard; finite differences of
        /// `psi_prime` are used when absent.
        psi_second: Option<RealFn>,
    },
}

impl fmt::Debug for Boundary1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant { level } => write!(f, "Constant({level})"),
            Self::Line { level, slope } => write!(f, "Line({level} + {slope} t)"),
            Self::General { .. } => write!(f, "General"),
        }
    }
}

impl Boundary1D {
    pub fn constant(level: f64) -> Result<Self> {
        check_level(level)?;
        Ok(Self::Constant { level })
    }

    pub fn line(level: f64, slope: f64) -> Result<Self> {
        check_level(level)?;
        if !slope.is_finite() {
            return domain("line slope must be finite");
        }
        Ok(Self::Line { level, slope })
    }

    pub fn general(
        psi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        psi_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
        psi_second: Option<RealFn>,
    ) -> Result<Self> {
        let start = psi(f64::MIN_POSITIVE);
        if !(start > 0.0) {
            return domain(format!("boundary must start above 0, psi(0+) = {start}"));
        }
        Ok(Self::General { psi: Arc::new(psi), psi_prime: Arc::new(psi_prime), psi_second })
    }

    /// `ψ(t) = 1 + c t²`, the curved boundary used in the demos and tests.
    pub fn quadratic(c: f64) -> Self {
        Self::General {
            psi: Arc::new(move |t| 1.0 + c * t * t),
            psi_prime: Arc::new(move |t| 2.0 * c * t),
            psi_second: Some(Arc::new(move |_| 2.0 * c)),
        }
    }

    pub fn psi(&self, t: f64) -> f64 {
        match self {
            Self::Constant { level } => *level,
            Self::Line { level, slope } => level + slope * t,
            Self::General { psi, .. } => psi(t),
        }
    }

    pub fn psi_prime(&self, t: f64) -> f64 {
        match self {
            Self::Constant { .. } => 0.0,
            Self::Line { slope, .. } => *slope,
            Self::General { psi_prime, .. } => psi_prime(t),
        }
    }

    fn psi_second(&self, t: f64) -> f64 {
        match self {
            Self::Constant { .. } | Self::Line { .. } => 0.0,
            Self::General { psi_second: Some(g), .. } => g(t),
            Self::General { psi_prime, .. } => {
                let h = 1e-5 * t.max(1e-3);
                (psi_prime(t) - psi_prime(t - h)) / h
            }
        }
    }

    /// `(ψ(t) - ψ(s)) / (t - s) - ψ'(t)`, with a Taylor expansion as `s → t`.
    pub fn kernel_factor(&self, s: f64, t: f64) -> f64 {
        match self {
            Self::Constant { .. } | Self::Line { .. } => 0.0,
            Self::General { .. } => {
                let gap = t - s;
                if gap <= 1e-6 * t.max(1.0) {
                    -0.5 * self.psi_second(t) * gap
                } else {
                    (self.psi(t) - self.psi(s)) / gap - self.psi_prime(t)
                }
            }
        }
    }
}

fn check_level(level: f64) -> Result<()> {
    if !(level > 0.0) || !level.is_finite() {
        return domain(format!("boundary level must be > 0, got {level}"));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("time must be > 0, got {t}"));
    }
    Ok(())
}

/// Gaussian transition density `q(u, x, y)`.
#[inline]
pub fn transition_density(u: f64, x: f64, y: f64) -> f64 {
    let d = y - x;
    (-d * d / (2.0 * u)).exp() / (2.0 * PI * u).sqrt()
}

/// Density of the first passage through the level `L`.
pub fn level_hitting_pdf(t: f64, level: f64) -> Result<f64> {
    check_time(t)?;
    check_level(level)?;
    Ok(level / ((2.0 * PI).sqrt() * t.powf(1.5)) * (-level * level / (2.0 * t)).exp())
}

/// `L² / G²`.
pub fn sample_level_hitting(level: f64, rng: &mut RngStream) -> Result<f64> {
    check_level(level)?;
    loop {
        let g = rng.gaussian();
        if g != 0.0 {
            return Ok(level * level / (g * g));
        }
    }
}

/// Bachelier–Lévy density for the line `L + βt`; defective with mass `e^{-2Lβ}`.
pub fn line_hitting_pdf(t: f64, level: f64, beta: f64) -> Result<f64> {
    check_time(t)?;
    check_level(level)?;
    if !(beta >= 0.0) || !beta.is_finite() {
        return domain(format!("slope must be >= 0, got {beta}"));
    }
    let y = level + beta * t;
    Ok(level / ((2.0 * PI).sqrt() * t.powf(1.5)) * (-y * y / (2.0 * t)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LineHit {
    Hit(f64),
    /// The path stays below the line forever.
    Never,
}

impl LineHit {
    pub fn time(self) -> Option<f64> {
        match self {
            Self::Hit(t) => Some(t),
            Self::Never => None,
        }
    }
}

/// Hit with probability `e^{-2Lβ}`, then inverse Gaussian with mean `L/β` and shape `L²`.
pub fn sample_line_hitting(level: f64, beta: f64, rng: &mut RngStream) -> Result<LineHit> {
    check_level(level)?;
    if !(beta >= 0.0) || !beta.is_finite() {
        return domain(format!("slope must be >= 0, got {beta}"));
    }
    if beta == 0.0 {
        return Ok(LineHit::Hit(sample_level_hitting(level, rng)?));
    }
    if rng.uniform_pos() > (-2.0 * level * beta).exp() {
        return Ok(LineHit::Never);
    }
    Ok(LineHit::Hit(sample_inverse_gaussian(level / beta, level * level, rng)?))
}

/// Tangent approximation `q₁(t) = (ψ(t)/t - ψ'(t)) ξ(t)` with `ξ(t) = q(t, 0, ψ(t))`.
pub fn durbin_q1(t: f64, boundary: &Boundary1D) -> Result<f64> {
    check_time(t)?;
    Ok(q1_unchecked(t, boundary))
}

fn q1_unchecked(t: f64, boundary: &Boundary1D) -> f64 {
    let psi = boundary.psi(t);
    let b1 = match boundary {
        // ψ(t)/t - ψ'(t) = L/t for lines; avoids cancellation
        Boundary1D::Constant { level } | Boundary1D::Line { level, .. } => level / t,
        Boundary1D::General { .. } => psi / t - boundary.psi_prime(t),
    };
    let q = b1 * transition_density(t, 0.0, psi);
    debug_assert!(q == 0.0 || q.signum() == b1.signum());
    q
}

/// A function sampled on the uniform grid `s_i = i·h`, `i = 1..=n`; its value
/// at `s = 0` is taken to be 0 (hitting densities vanish there).
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulation {
    step: f64,
    values: Vec<f64>,
}

impl Tabulation {
    pub fn new(step: f64, values: Vec<f64>) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return domain(format!("grid step must be > 0, got {step}"));
        }
        Ok(Self { step, values })
    }

    /// Samples `f` on `n` nodes covering `(0, end]`.
    pub fn sample(end: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        check_time(end)?;
        let step = end / n as f64;
        Self::new(step, (1..=n).map(|i| f(i as f64 * step)).collect())
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.node(self.values.len())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `𝒫_t f = ∫₀ᵗ f(s) {(ψ(t)-ψ(s))/(t-s) - ψ'(t)} q(t-s, ψ(s), ψ(t)) ds`
/// by the trapezoidal rule on the tabulation nodes up to `t`, which must be
/// one of the nodes.
pub fn volterra_apply(f: &Tabulation, t: f64, boundary: &Boundary1D) -> Result<f64> {
    check_time(t)?;
    if f.len() < MIN_GRID_NODES {
        return Err(Error::GridTooCoarse { nodes: f.len(), min: MIN_GRID_NODES });
    }
    let m = (t / f.step).round() as usize;
    if m == 0 || m > f.len() || (m as f64 * f.step - t).abs() > 1e-9 * t {
        return domain(format!("t = {t} is not a node of the tabulation"));
    }
    if m < MIN_GRID_NODES {
        return Err(Error::GridTooCoarse { nodes: m, min: MIN_GRID_NODES });
    }
    Ok(apply_at(f, m, boundary))
}

// The node at s = t contributes nothing: the kernel vanishes like √(t-s).
fn apply_at(f: &Tabulation, m: usize, boundary: &Boundary1D) -> f64 {
    if matches!(boundary, Boundary1D::Constant { .. } | Boundary1D::Line { .. }) {
        return 0.0;
    }
    let t = f.node(m);
    let psi_t = boundary.psi(t);
    let mut sum = 0.0;
    for i in 1..m {
        let s = f.node(i);
        let fs = f.values[i - 1];
        if fs == 0.0 {
            continue;
        }
        sum += fs * boundary.kernel_factor(s, t) * transition_density(t - s, boundary.psi(s), psi_t);
    }
    sum * f.step
}

/// Truncated Durbin series `Σ_{k=1}^{K} (-1)^{k-1} q_k(t)` with `q_{k+1} = 𝒫 q_k`,
/// tabulated on `grid` nodes over `(0, t]`.
pub fn durbin_pdf(t: f64, boundary: &Boundary1D, terms: usize, grid: usize) -> Result<f64> {
    Ok(*durbin_partial_sums(t, boundary, terms, grid)?.last().expect("terms >= 1"))
}

/// All partial sums of the Durbin series for `K = 1..=terms`.
pub fn durbin_partial_sums(t: f64, boundary: &Boundary1D, terms: usize, grid: usize) -> Result<Vec<f64>> {
    check_time(t)?;
    if terms == 0 {
        return domain("durbin_pdf needs at least one term");
    }
    let q1 = q1_unchecked(t, boundary);
    let mut sums = vec![q1];
    if terms == 1 {
        return Ok(sums);
    }
    if grid < MIN_GRID_NODES {
        return Err(Error::GridTooCoarse { nodes: grid, min: MIN_GRID_NODES });
    }
    let mut current = Tabulation::sample(t, grid, |s| q1_unchecked(s, boundary))?;
    let mut total = q1;
    for k in 2..=terms {
        let value = apply_at(&current, grid, boundary);
        total += if k % 2 == 0 { -value } else { value };
        sums.push(total);
        if k < terms {
            let next: Vec<f64> = (1..=grid).map(|j| apply_at(&current, j, boundary)).collect();
            current = Tabulation::new(current.step, next)?;
        }
    }
    Ok(sums)
}
