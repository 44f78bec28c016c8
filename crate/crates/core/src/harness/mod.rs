//! Experiment orchestration: parallel Monte Carlo runs, step-count and timing
//! sweeps, least-squares fits and result emission.

mod output;

pub use output::{
    format_real, run_report, steps_report, timing_report, write_steps_csv, write_timing_csv, write_run_csv,
    RunReport, StepsReport, TimingReport, BUILD_ID,
};

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::samplers::RngStream;
use crate::walkers::{
    euler_run, woms_run, wos_run, ExitMode, ExitSample, SphereDomain, Tau1Table, WosDeps, DEFAULT_GAMMA,
};

/// Trajectory engine selected by an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Woms,
    WosInversion,
    WosTable,
    WosPosition,
    Euler,
}

impl Method {
    pub const ALL: [Method; 5] = [Self::Woms, Self::WosInversion, Self::WosTable, Self::WosPosition, Self::Euler];

    /// Command-line spelling.
    pub fn cli_name(self) -> &'static str {
        match self {
            Self::Woms => "woms",
            Self::WosInversion => "wos-inversion",
            Self::WosTable => "wos-table",
            Self::WosPosition => "wos-position",
            Self::Euler => "euler",
        }
    }

    fn exit_mode(self) -> Option<ExitMode> {
        match self {
            Self::WosInversion => Some(ExitMode::Inversion),
            Self::WosTable => Some(ExitMode::Table),
            Self::WosPosition => Some(ExitMode::PositionOnly),
            Self::Woms | Self::Euler => None,
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.cli_name() == s || s.replace('_', "-") == m.cli_name())
            .ok_or_else(|| Error::Config(format!("unknown method '{s}'")))
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.cli_name())
    }
}

/// Everything needed to reproduce a Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub method: Method,
    pub x0: Vec<f64>,
    #[serde(rename = "L")]
    pub radius: f64,
    pub delta: u32,
    pub epsilon: f64,
    pub gamma: f64,
    pub trajectories: u64,
    pub seed: u64,
    pub workers: usize,
    /// Euler step (euler only).
    pub h: f64,
    pub table_path: Option<PathBuf>,
    /// Evaluate the built-in harmonic boundary functions on projected exits.
    pub dirichlet: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            method: Method::Woms,
            x0: vec![0.5, 0.0],
            radius: 1.0,
            delta: 2,
            epsilon: 1e-5,
            gamma: DEFAULT_GAMMA,
            trajectories: 100_000,
            seed: 0,
            workers: 1,
            h: 1e-4,
            table_path: None,
            dirichlet: true,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return bad(format!("L must be finite and > 0, got {}", self.radius));
        }
        if self.delta < 2 {
            return bad(format!("dimension must be >= 2, got {}", self.delta));
        }
        if self.x0.len() != self.delta as usize {
            return bad(format!("x0 has {} coordinates but delta = {}", self.x0.len(), self.delta));
        }
        let n = self.x0.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(n < self.radius) {
            return bad(format!("|x0| = {n} must be < L = {}", self.radius));
        }
        if !(self.epsilon > 0.0 && self.epsilon < self.radius) {
            return bad(format!("epsilon must lie in (0, L), got {}", self.epsilon));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad(format!("gamma must lie in (0, 1), got {}", self.gamma));
        }
        if self.trajectories == 0 {
            return bad("trajectories must be >= 1".into());
        }
        if self.workers == 0 {
            return bad("workers must be >= 1".into());
        }
        if self.method == Method::Euler && !(self.h > 0.0 && self.h.is_finite()) {
            return bad(format!("Euler step h must be > 0, got {}", self.h));
        }
        Ok(())
    }

    /// Shared walker inputs, loading the table from `table_path` when needed.
    pub fn prepare(&self) -> Result<WosDeps> {
        let Some(mode) = self.method.exit_mode() else {
            return Ok(WosDeps::default());
        };
        let deps = WosDeps::for_mode(mode, self.delta)?;
        if mode == ExitMode::Table {
            let path = self.table_path.as_ref().ok_or(Error::MissingTable)?;
            return Ok(deps.with_table(Tau1Table::load(path)?));
        }
        Ok(deps)
    }
}

/// One-pass mean and variance accumulator.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Combine with the partials of another sample.
    pub fn merge(&mut self, other: &Welford) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * (self.n as f64 * other.n as f64 / n as f64);
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; 0 for fewer than two values.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    /// Half-width `1.96 sqrt(var / n)` of the normal 95% interval.
    pub fn ci95(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        1.96 * (self.variance() / self.n as f64).sqrt()
    }
}

/// Built-in harmonic polynomial with its name.
#[derive(Clone, Copy)]
pub struct HarmonicFn {
    pub name: &'static str,
    pub eval: fn(&[f64]) -> f64,
}

/// Harmonic test functions for `u(x) = E_x f(B_τ)`: `{1, x, y, x²−y², xy}` in
/// the plane and `{1, x_i, x_i x_j}` in space; empty otherwise.
pub fn harmonic_functions(delta: u32) -> Vec<HarmonicFn> {
    match delta {
        2 => vec![
            HarmonicFn { name: "1", eval: |_| 1.0 },
            HarmonicFn { name: "x", eval: |p| p[0] },
            HarmonicFn { name: "y", eval: |p| p[1] },
            HarmonicFn { name: "x^2-y^2", eval: |p| p[0] * p[0] - p[1] * p[1] },
            HarmonicFn { name: "xy", eval: |p| p[0] * p[1] },
        ],
        3 => vec![
            HarmonicFn { name: "1", eval: |_| 1.0 },
            HarmonicFn { name: "x1", eval: |p| p[0] },
            HarmonicFn { name: "x2", eval: |p| p[1] },
            HarmonicFn { name: "x3", eval: |p| p[2] },
            HarmonicFn { name: "x1x2", eval: |p| p[0] * p[1] },
            HarmonicFn { name: "x1x3", eval: |p| p[0] * p[2] },
            HarmonicFn { name: "x2x3", eval: |p| p[1] * p[2] },
        ],
        _ => Vec::new(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirichletEstimate {
    pub mean: f64,
    pub ci95: f64,
    /// `f(x0)`, the exact value of the harmonic extension.
    pub exact: f64,
}

/// Aggregated Monte Carlo output of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStatistics {
    pub n: u64,
    pub mean_time: f64,
    pub var_time: f64,
    pub ci95_time: f64,
    pub mean_steps: f64,
    pub var_steps: f64,
    pub ci95_steps: f64,
    /// Wall-clock seconds of the trajectory loop; left out of JSON so equal
    /// configurations serialize identically.
    #[serde(skip_serializing, default)]
    pub wall_seconds: f64,
    pub dirichlet_estimates: Option<BTreeMap<String, DirichletEstimate>>,
}

#[derive(Clone, Default)]
struct Partial {
    time: Welford,
    steps: Welford,
    harmonic: Vec<Welford>,
}

impl Partial {
    fn merge(&mut self, other: &Partial) {
        self.time.merge(&other.time);
        self.steps.merge(&other.steps);
        if self.harmonic.is_empty() {
            self.harmonic = vec![Welford::default(); other.harmonic.len()];
        }
        for (a, b) in self.harmonic.iter_mut().zip(&other.harmonic) {
            a.merge(b);
        }
    }
}

fn one_trajectory(
    config: &ExperimentConfig,
    domain: &SphereDomain,
    deps: &WosDeps,
    rng: &mut RngStream,
) -> Result<ExitSample> {
    match config.method {
        Method::Woms => woms_run(&config.x0, domain, config.epsilon, config.gamma, rng),
        Method::Euler => euler_run(&config.x0, domain, config.h, rng),
        m => wos_run(&config.x0, domain, config.epsilon, m.exit_mode().expect("sphere mode"), deps, rng),
    }
}

/// Number of trajectories assigned to `worker` out of `workers`.
pub fn worker_share(total: u64, workers: usize, worker: usize) -> u64 {
    let w = workers as u64;
    total / w + u64::from((worker as u64) < total % w)
}

/// Runs the configured experiment, loading any table first.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunStatistics> {
    config.validate()?;
    let deps = config.prepare()?;
    run_prepared(config, &deps)
}

/// Runs the experiment with already prepared walker inputs; the wall clock
/// covers only the trajectory loop.
pub fn run_prepared(config: &ExperimentConfig, deps: &WosDeps) -> Result<RunStatistics> {
    config.validate()?;
    let domain = SphereDomain::new(config.radius, config.delta)?;
    let funcs = if config.dirichlet { harmonic_functions(config.delta) } else { Vec::new() };
    let workers = config.workers.min(config.trajectories.max(1) as usize).max(1);

    let start = Instant::now();
    let partials: Vec<Result<Partial>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let (domain, funcs) = (&domain, &funcs);
                scope.spawn(move || -> Result<Partial> {
                    let mut rng = RngStream::new(config.seed, w as u64);
                    let mut part = Partial { harmonic: vec![Welford::default(); funcs.len()], ..Default::default() };
                    for _ in 0..worker_share(config.trajectories, workers, w) {
                        let s = one_trajectory(config, domain, deps, &mut rng)?;
                        part.time.push(s.exit_time);
                        part.steps.push(s.steps as f64);
                        for (acc, f) in part.harmonic.iter_mut().zip(funcs) {
                            acc.push((f.eval)(&s.projected_position));
                        }
                    }
                    Ok(part)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let wall_seconds = start.elapsed().as_secs_f64();

    let mut total = Partial::default();
    for p in partials {
        total.merge(&p?);
    }
    let dirichlet_estimates = (!funcs.is_empty()).then(|| {
        funcs
            .iter()
            .zip(&total.harmonic)
            .map(|(f, acc)| {
                let est = DirichletEstimate { mean: acc.mean(), ci95: acc.ci95(), exact: (f.eval)(&config.x0) };
                (f.name.to_string(), est)
            })
            .collect()
    });
    Ok(RunStatistics {
        n: total.time.count(),
        mean_time: total.time.mean(),
        var_time: total.time.variance(),
        ci95_time: total.time.ci95(),
        mean_steps: total.steps.mean(),
        var_steps: total.steps.variance(),
        ci95_steps: total.steps.ci95(),
        wall_seconds,
        dirichlet_estimates,
    })
}

/// Ordinary least-squares line through `(x, y)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
    pub points: Vec<(f64, f64)>,
}

pub fn fit_loglinear(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 2 {
        return Err(Error::DegenerateFit(format!("need at least 2 points, got {}", points.len())));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateFit("all x values are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let ss_tot: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) } else { 1.0 };
    Ok(FitResult { intercept, slope, r_squared, points: points.to_vec() })
}

/// Mean step count at one ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepPoint {
    pub eps: f64,
    pub abs_ln_eps: f64,
    pub mean_steps: f64,
    pub ci95: f64,
}

/// Mean steps per ε with the fit of mean steps against `|ln ε|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepScaling {
    pub points: Vec<StepPoint>,
    pub fit: FitResult,
}

pub fn step_scaling_experiment(method: Method, base: &ExperimentConfig, epsilons: &[f64]) -> Result<StepScaling> {
    if epsilons.len() < 3 {
        return Err(Error::Config(format!("step scaling needs >= 3 epsilon values, got {}", epsilons.len())));
    }
    let mut config = ExperimentConfig { method, dirichlet: false, ..base.clone() };
    config.epsilon = epsilons[0];
    config.validate()?;
    let deps = config.prepare()?;
    let mut points = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        config.epsilon = eps;
        let stats = run_prepared(&config, &deps)?;
        points.push(StepPoint { eps, abs_ln_eps: eps.ln().abs(), mean_steps: stats.mean_steps, ci95: stats.ci95_steps });
    }
    let pairs: Vec<_> = points.iter().map(|p| (p.abs_ln_eps, p.mean_steps)).collect();
    Ok(StepScaling { fit: fit_loglinear(&pairs)?, points })
}

/// Wall seconds of one method at one ε.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingPoint {
    pub method: Method,
    pub eps: f64,
    pub abs_ln_eps: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingResult {
    pub points: Vec<TimingPoint>,
    /// Fit of seconds against `|ln ε|` per method, present with >= 3 ε values.
    pub fits: BTreeMap<Method, Option<FitResult>>,
}

pub fn timing_experiment(methods: &[Method], base: &ExperimentConfig, epsilons: &[f64]) -> Result<TimingResult> {
    timing_experiment_with_repeats(methods, base, epsilons, 1)
}

/// Like [`timing_experiment`], keeping the fastest of `repeats` identical runs
/// per point to suppress scheduler noise.
pub fn timing_experiment_with_repeats(
    methods: &[Method],
    base: &ExperimentConfig,
    epsilons: &[f64],
    repeats: usize,
) -> Result<TimingResult> {
    if methods.is_empty() || epsilons.is_empty() {
        return Err(Error::Config("timing needs at least one method and one epsilon".into()));
    }
    if repeats == 0 {
        return Err(Error::Config("timing repeats must be >= 1".into()));
    }
    // inputs (including table files) are prepared before any clock starts
    let mut prepared = Vec::with_capacity(methods.len());
    for &method in methods {
        let config = ExperimentConfig { method, dirichlet: false, epsilon: epsilons[0], ..base.clone() };
        config.validate()?;
        let deps = config.prepare()?;
        prepared.push((config, deps));
    }
    // repeats sweep all points round-robin so slow periods spread evenly
    let mut best = vec![vec![f64::INFINITY; epsilons.len()]; prepared.len()];
    for _ in 0..repeats {
        for ((config, deps), row) in prepared.iter_mut().zip(best.iter_mut()) {
            for (&eps, slot) in epsilons.iter().zip(row.iter_mut()) {
                config.epsilon = eps;
                *slot = slot.min(run_prepared(config, deps)?.wall_seconds);
            }
        }
    }
    let mut points = Vec::new();
    let mut fits = BTreeMap::new();
    for ((config, _), row) in prepared.iter().zip(&best) {
        let pairs: Vec<(f64, f64)> = epsilons.iter().map(|e| e.ln().abs()).zip(row.iter().copied()).collect();
        for (&eps, &(abs_ln_eps, seconds)) in epsilons.iter().zip(&pairs) {
            points.push(TimingPoint { method: config.method, eps, abs_ln_eps, seconds });
        }
        let fit = if pairs.len() >= 3 { Some(fit_loglinear(&pairs)?) } else { None };
        fits.insert(config.method, fit);
    }
    Ok(TimingResult { points, fits })
}
