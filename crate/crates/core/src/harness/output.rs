use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, RunStatistics, StepScaling, TimingResult};
use crate::error::Result;
use crate::samplers::RNG_ALGORITHM;

/// `git describe` of the source tree at build time, or the package version.
pub const BUILD_ID: &str = env!("EXITWALK_BUILD_ID");

/// Reals in CSV output carry 17 significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub build: String,
    pub rng: String,
    pub config: ExperimentConfig,
    pub statistics: RunStatistics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepsReport {
    pub schema: String,
    pub build: String,
    pub rng: String,
    pub config: ExperimentConfig,
    pub scaling: StepScaling,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub schema: String,
    pub build: String,
    pub rng: String,
    pub config: ExperimentConfig,
    pub timing: TimingResult,
}

pub fn run_report(config: &ExperimentConfig, statistics: &RunStatistics) -> RunReport {
    RunReport {
        schema: "exitwalk.run/1".into(),
        build: BUILD_ID.into(),
        rng: RNG_ALGORITHM.into(),
        config: config.clone(),
        statistics: statistics.clone(),
    }
}

pub fn steps_report(config: &ExperimentConfig, scaling: &StepScaling) -> StepsReport {
    StepsReport {
        schema: "exitwalk.steps/1".into(),
        build: BUILD_ID.into(),
        rng: RNG_ALGORITHM.into(),
        config: config.clone(),
        scaling: scaling.clone(),
    }
}

pub fn timing_report(config: &ExperimentConfig, timing: &TimingResult) -> TimingReport {
    TimingReport {
        schema: "exitwalk.timing/1".into(),
        build: BUILD_ID.into(),
        rng: RNG_ALGORITHM.into(),
        config: config.clone(),
        timing: timing.clone(),
    }
}

/// Header plus one row: n, mean_time, var_time, ci95_time, mean_steps, var_steps, wall_seconds.
pub fn write_run_csv(mut w: impl Write, stats: &RunStatistics) -> Result<()> {
    writeln!(w, "n,mean_time,var_time,ci95_time,mean_steps,var_steps,wall_seconds")?;
    writeln!(
        w,
        "{},{},{},{},{},{},{}",
        stats.n,
        format_real(stats.mean_time),
        format_real(stats.var_time),
        format_real(stats.ci95_time),
        format_real(stats.mean_steps),
        format_real(stats.var_steps),
        format_real(stats.wall_seconds)
    )?;
    Ok(())
}

pub fn write_steps_csv(mut w: impl Write, scaling: &StepScaling) -> Result<()> {
    writeln!(w, "eps,abs_ln_eps,mean_steps,ci95")?;
    for p in &scaling.points {
        writeln!(
            w,
            "{},{},{},{}",
            format_real(p.eps),
            format_real(p.abs_ln_eps),
            format_real(p.mean_steps),
            format_real(p.ci95)
        )?;
    }
    Ok(())
}

pub fn write_timing_csv(mut w: impl Write, timing: &TimingResult) -> Result<()> {
    writeln!(w, "method,eps,abs_ln_eps,seconds")?;
    for p in &timing.points {
        writeln!(w, "{},{},{},{}", p.method, format_real(p.eps), format_real(p.abs_ln_eps), format_real(p.seconds))?;
    }
    Ok(())
}
