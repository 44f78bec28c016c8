//! Trajectory engines for the exit problem of a centred ball: walk on moving
//! spheres, classical walk on spheres and a naive Euler baseline.

mod table;

pub use table::{precompute_table, TableMethod, Tau1Table, TableProvenance, TABLE_MAGIC, TABLE_VERSION};

use serde::{Deserialize, Serialize};

use crate::bessel_hitting::{invert_cdf, InversionSettings, SpectralSeriesCache};
use crate::error::{domain, Error, Result};
use crate::samplers::{fill_unit_direction, tau_psi_with_t_max, RngStream};
use crate::specfun::BesselIndex;

/// Default per-trajectory step budget.
pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000;

/// Default safety factor of the moving spheres.
pub const DEFAULT_GAMMA: f64 = 0.99;

/// Ball of radius `L` centred at the origin of `R^delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereDomain {
    radius: f64,
    delta: u32,
}

impl SphereDomain {
    pub fn new(radius: f64, delta: u32) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return domain(format!("radius must be finite and > 0, got {radius}"));
        }
        if delta < 2 {
            return domain(format!("dimension must be >= 2, got {delta}"));
        }
        Ok(Self { radius, delta })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn delta(&self) -> u32 {
        self.delta
    }

    pub fn index(&self) -> BesselIndex {
        BesselIndex::from_dimension(self.delta).expect("dimension checked at construction")
    }

    /// `L - ‖x‖`, clamped at 0.
    pub fn distance_to_boundary(&self, x: &[f64]) -> f64 {
        (self.radius - norm(x)).max(0.0)
    }

    /// Radial projection of `x` (nonzero) onto the boundary sphere.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let n = norm(x);
        if n == 0.0 {
            let mut p = vec![0.0; x.len()];
            p[0] = self.radius;
            return p;
        }
        x.iter().map(|v| self.radius * v / n).collect()
    }

    fn check_start(&self, x0: &[f64]) -> Result<()> {
        if x0.len() != self.delta as usize {
            return domain(format!("start point has {} coordinates, domain dimension is {}", x0.len(), self.delta));
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return domain("start point must be finite");
        }
        Ok(())
    }
}

#[inline]
fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Position `X(n)`, elapsed time `T(n)` and step count `n` of a walk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkState {
    pub position: Vec<f64>,
    pub elapsed: f64,
    pub steps: u64,
}

impl WalkState {
    pub fn start(x0: &[f64]) -> Self {
        Self { position: x0.to_vec(), elapsed: 0.0, steps: 0 }
    }
}

/// Terminal state of a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExitSample {
    /// Raw terminal position (inside the ε-shell for the sphere walkers).
    pub exit_position: Vec<f64>,
    pub exit_time: f64,
    pub steps: u64,
    /// `L · exit_position / ‖exit_position‖`.
    pub projected_position: Vec<f64>,
}

impl ExitSample {
    fn from_state(state: WalkState, domain: &SphereDomain) -> Self {
        let projected_position = domain.project(&state.position);
        Self { exit_position: state.position, exit_time: state.elapsed, steps: state.steps, projected_position }
    }
}

fn check_eps(epsilon: f64, domain: &SphereDomain) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < domain.radius) {
        return crate::error::domain(format!("epsilon must lie in (0, L), got {epsilon}"));
    }
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return domain(format!("gamma must lie in (0, 1), got {gamma}"));
    }
    Ok(())
}

// Keep a point that rounding pushed onto or past the sphere strictly inside.
#[inline]
fn pull_inside(x: &mut [f64], n: f64, radius: f64) -> f64 {
    if n >= radius {
        let target = radius * (1.0 - f64::EPSILON);
        let s = target / n;
        x.iter_mut().for_each(|v| *v *= s);
        return norm(x);
    }
    n
}

/// Reusable per-trajectory state for the moving-sphere walk.
struct Woms {
    index: BesselIndex,
    nu1: f64,
    gamma: f64,
    radius: f64,
    dir: Vec<f64>,
}

impl Woms {
    fn new(domain: &SphereDomain, gamma: f64) -> Self {
        let index = domain.index();
        Self { index, nu1: index.nu() + 1.0, gamma, radius: domain.radius, dir: vec![0.0; domain.delta as usize] }
    }

    // one step from a point at norm `n`; returns the new norm
    #[inline]
    fn step(&mut self, state: &mut WalkState, n: f64, rng: &mut RngStream) -> f64 {
        let d = self.radius - n;
        // t_max of the boundary built from moving_sphere_param_a(d, gamma)
        let t_max = self.gamma * self.gamma * d * d * std::f64::consts::E / (2.0 * self.nu1);
        let r = tau_psi_with_t_max(t_max, self.index, rng);
        let disp = (2.0 * r * self.nu1 * (t_max / r).ln()).max(0.0).sqrt();
        fill_unit_direction(&mut self.dir, rng);
        for (x, v) in state.position.iter_mut().zip(&self.dir) {
            *x += disp * v;
        }
        state.elapsed += r;
        state.steps += 1;
        let n = norm(&state.position);
        pull_inside(&mut state.position, n, self.radius)
    }
}

/// One step of the walk on moving spheres.
pub fn woms_step(mut state: WalkState, domain: &SphereDomain, gamma: f64, rng: &mut RngStream) -> Result<WalkState> {
    check_gamma(gamma)?;
    domain.check_start(&state.position)?;
    let n = norm(&state.position);
    if n >= domain.radius {
        return crate::error::domain("woms_step needs a point strictly inside the domain");
    }
    Woms::new(domain, gamma).step(&mut state, n, rng);
    Ok(state)
}

/// Walk on moving spheres from `x0` until the first position in the ε-shell.
pub fn woms_run(x0: &[f64], domain: &SphereDomain, epsilon: f64, gamma: f64, rng: &mut RngStream) -> Result<ExitSample> {
    woms_run_with_budget(x0, domain, epsilon, gamma, DEFAULT_STEP_BUDGET, rng)
}

pub fn woms_run_with_budget(
    x0: &[f64],
    domain: &SphereDomain,
    epsilon: f64,
    gamma: f64,
    budget: u64,
    rng: &mut RngStream,
) -> Result<ExitSample> {
    domain.check_start(x0)?;
    check_eps(epsilon, domain)?;
    check_gamma(gamma)?;
    let mut walker = Woms::new(domain, gamma);
    let mut state = WalkState::start(x0);
    let stop = domain.radius - epsilon;
    let mut n = norm(x0);
    while n < stop {
        if state.steps >= budget {
            return Err(Error::StepBudget { budget, state: Box::new(state) });
        }
        n = walker.step(&mut state, n, rng);
    }
    Ok(ExitSample::from_state(state, domain))
}

/// How a walk-on-spheres step accounts for elapsed time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitMode {
    /// Positions only; elapsed time stays 0.
    PositionOnly,
    /// `r² τ₁` with `τ₁` drawn by inverting the spectral CDF.
    Inversion,
    /// `r² τ₁` with `τ₁` picked uniformly from a precomputed table.
    Table,
}

/// Shared, read-only inputs of the walk on spheres.
#[derive(Debug, Default)]
pub struct WosDeps {
    /// Unit-radius spectral series (inversion mode).
    pub spectral: Option<SpectralSeriesCache>,
    /// Precomputed `τ₁` samples (table mode).
    pub table: Option<Tau1Table>,
    pub inversion: InversionSettings,
}

impl WosDeps {
    /// Inputs for `mode` in dimension `delta`; the table must be supplied separately.
    pub fn for_mode(mode: ExitMode, delta: u32) -> Result<Self> {
        let mut deps = Self::default();
        if mode == ExitMode::Inversion {
            deps.spectral = Some(SpectralSeriesCache::new(BesselIndex::from_dimension(delta)?, 1.0)?);
        }
        Ok(deps)
    }

    pub fn with_table(mut self, table: Tau1Table) -> Self {
        self.table = Some(table);
        self
    }

    fn check(&self, mode: ExitMode, delta: u32) -> Result<()> {
        match mode {
            ExitMode::PositionOnly => Ok(()),
            ExitMode::Inversion => match &self.spectral {
                None => Err(Error::Config("inversion mode requires a spectral series cache".into())),
                Some(c) if c.index().delta() != delta || c.radius() != 1.0 => Err(Error::Config(format!(
                    "spectral cache is for delta = {}, L = {}; need delta = {delta}, L = 1",
                    c.index().delta(),
                    c.radius()
                ))),
                Some(_) => Ok(()),
            },
            ExitMode::Table => match &self.table {
                None => Err(Error::MissingTable),
                Some(t) if t.delta() != delta => {
                    Err(Error::Config(format!("table is for delta = {}, domain has delta = {delta}", t.delta())))
                }
                Some(_) => Ok(()),
            },
        }
    }

    #[inline]
    fn tau1(&self, mode: ExitMode, rng: &mut RngStream) -> Result<f64> {
        match mode {
            ExitMode::PositionOnly => Ok(0.0),
            ExitMode::Inversion => {
                let cache = self.spectral.as_ref().ok_or_else(|| Error::Config("missing spectral cache".into()))?;
                invert_cdf(rng.uniform_open(), cache, &self.inversion)
            }
            ExitMode::Table => Ok(self.table.as_ref().ok_or(Error::MissingTable)?.pick(rng)),
        }
    }
}

#[inline]
fn wos_advance(
    state: &mut WalkState,
    n: f64,
    radius: f64,
    mode: ExitMode,
    deps: &WosDeps,
    dir: &mut [f64],
    rng: &mut RngStream,
) -> Result<f64> {
    let r = radius - n;
    fill_unit_direction(dir, rng);
    for (x, v) in state.position.iter_mut().zip(dir.iter()) {
        *x += r * v;
    }
    if mode != ExitMode::PositionOnly {
        state.elapsed += r * r * deps.tau1(mode, rng)?;
    }
    state.steps += 1;
    let n = norm(&state.position);
    Ok(pull_inside(&mut state.position, n, radius))
}

/// One step of the walk on spheres.
pub fn wos_step(
    mut state: WalkState,
    domain: &SphereDomain,
    mode: ExitMode,
    deps: &WosDeps,
    rng: &mut RngStream,
) -> Result<WalkState> {
    domain.check_start(&state.position)?;
    deps.check(mode, domain.delta)?;
    let n = norm(&state.position);
    if n >= domain.radius {
        return crate::error::domain("wos_step needs a point strictly inside the domain");
    }
    let mut dir = vec![0.0; domain.delta as usize];
    wos_advance(&mut state, n, domain.radius, mode, deps, &mut dir, rng)?;
    Ok(state)
}

/// Walk on spheres from `x0` until the first position in the ε-shell.
pub fn wos_run(
    x0: &[f64],
    domain: &SphereDomain,
    epsilon: f64,
    mode: ExitMode,
    deps: &WosDeps,
    rng: &mut RngStream,
) -> Result<ExitSample> {
    wos_run_with_budget(x0, domain, epsilon, mode, deps, DEFAULT_STEP_BUDGET, rng)
}

pub fn wos_run_with_budget(
    x0: &[f64],
    domain: &SphereDomain,
    epsilon: f64,
    mode: ExitMode,
    deps: &WosDeps,
    budget: u64,
    rng: &mut RngStream,
) -> Result<ExitSample> {
    domain.check_start(x0)?;
    check_eps(epsilon, domain)?;
    deps.check(mode, domain.delta)?;
    let mut dir = vec![0.0; domain.delta as usize];
    let mut state = WalkState::start(x0);
    let stop = domain.radius - epsilon;
    let mut n = norm(x0);
    while n < stop {
        if state.steps >= budget {
            return Err(Error::StepBudget { budget, state: Box::new(state) });
        }
        n = wos_advance(&mut state, n, domain.radius, mode, deps, &mut dir, rng)?;
    }
    Ok(ExitSample::from_state(state, domain))
}

/// Naive Euler scheme with step `h`, stopped at the first grid time outside the ball.
pub fn euler_run(x0: &[f64], domain: &SphereDomain, h: f64, rng: &mut RngStream) -> Result<ExitSample> {
    euler_run_with_budget(x0, domain, h, u64::MAX, rng)
}

pub fn euler_run_with_budget(
    x0: &[f64],
    domain: &SphereDomain,
    h: f64,
    budget: u64,
    rng: &mut RngStream,
) -> Result<ExitSample> {
    domain.check_start(x0)?;
    if !(h > 0.0) || !h.is_finite() {
        return crate::error::domain(format!("Euler step must be finite and > 0, got {h}"));
    }
    let sh = h.sqrt();
    let r2 = domain.radius * domain.radius;
    let mut x = x0.to_vec();
    let mut steps = 0u64;
    let mut n2: f64 = x.iter().map(|v| v * v).sum();
    while n2 < r2 {
        if steps >= budget {
            let state = WalkState { position: x, elapsed: h * steps as f64, steps };
            return Err(Error::StepBudget { budget, state: Box::new(state) });
        }
        n2 = 0.0;
        for v in x.iter_mut() {
            *v += sh * rng.gaussian();
            n2 += *v * *v;
        }
        steps += 1;
    }
    let projected = domain.project(&x);
    Ok(ExitSample { exit_position: projected.clone(), exit_time: h * steps as f64, steps, projected_position: projected })
}
