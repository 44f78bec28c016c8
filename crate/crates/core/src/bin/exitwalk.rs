use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use exitwalk::brownian1d::{durbin_partial_sums, Boundary1D};
use exitwalk::harness::{
    format_real, run_experiment, run_report, step_scaling_experiment, steps_report, timing_experiment_with_repeats, timing_report,
    write_run_csv, write_steps_csv, write_timing_csv, ExperimentConfig, Method,
};
use exitwalk::samplers::RngStream;
use exitwalk::walkers::{precompute_table, TableMethod};
use exitwalk::{Error, Result};

#[derive(Parser)]
#[command(name = "exitwalk", version = exitwalk::harness::BUILD_ID, about = "Exit times of Brownian motion from balls")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo run of one method.
    Run(RunArgs),
    /// Mean step count against |ln eps|.
    Steps(StepsArgs),
    /// Wall-clock time per method against |ln eps|.
    Timing(TimingArgs),
    /// Build a table of unit-ball exit times.
    Precompute(PrecomputeArgs),
    /// Tabulate one-dimensional hitting densities.
    Pdf1d(Pdf1dArgs),
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.5,0")]
    x0: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 2)]
    dim: u32,
    #[arg(long, default_value_t = 0.99)]
    gamma: f64,
    #[arg(long, default_value_t = 100_000)]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value_t = 1e-4)]
    h: f64,
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

impl Common {
    fn config(&self, method: Method, epsilon: f64) -> ExperimentConfig {
        ExperimentConfig {
            method,
            x0: self.x0.clone(),
            radius: self.radius,
            delta: self.dim,
            epsilon,
            gamma: self.gamma,
            trajectories: self.n,
            seed: self.seed,
            workers: self.workers,
            h: self.h,
            table_path: self.table.clone(),
            dirichlet: true,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_parser = parse_method)]
    method: Method,
    #[arg(long, default_value_t = 1e-5)]
    eps: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct StepsArgs {
    #[arg(long, value_parser = parse_method)]
    method: Method,
    #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-3,1e-4,1e-5,1e-6,1e-7,1e-8")]
    eps_list: Vec<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct TimingArgs {
    #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "woms,wos-inversion,wos-table")]
    methods: Vec<Method>,
    #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-3,1e-4,1e-5,1e-6,1e-7,1e-8")]
    eps_list: Vec<f64>,
    /// Identical runs per point; the fastest is reported.
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrecomputeMethod {
    Inversion,
    Euler,
}

#[derive(Args)]
struct PrecomputeArgs {
    #[arg(long)]
    dim: u32,
    #[arg(long)]
    count: usize,
    #[arg(long, value_enum)]
    method: PrecomputeMethod,
    #[arg(long, default_value_t = 1e-5)]
    h: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundaryKind {
    /// psi(t) = L
    Level,
    /// psi(t) = L + beta t
    Line,
    /// psi(t) = L + beta t^2
    GeneralDemo,
}

#[derive(Args)]
struct Pdf1dArgs {
    #[arg(long, value_enum)]
    boundary: BoundaryKind,
    #[arg(long = "L")]
    level: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, default_value_t = 4)]
    terms: usize,
    /// Quadrature nodes per evaluation time.
    #[arg(long, default_value_t = 256)]
    grid: usize,
    /// Last tabulated time.
    #[arg(long, default_value_t = 3.0)]
    t_end: f64,
    /// Number of tabulated times.
    #[arg(long, default_value_t = 60)]
    points: usize,
    #[arg(long)]
    out: PathBuf,
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Format(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    let config = args.common.config(args.method, args.eps);
    let stats = run_experiment(&config)?;
    println!(
        "{} n={} mean_time={} ci95={} mean_steps={} wall_seconds={:.3}",
        config.method, stats.n, stats.mean_time, stats.ci95_time, stats.mean_steps, stats.wall_seconds
    );
    if let Some(d) = &stats.dirichlet_estimates {
        for (name, e) in d {
            println!("  f={name}: mean={} ci95={} exact={}", e.mean, e.ci95, e.exact);
        }
    }
    if let Some(p) = &args.common.json {
        write_json(p, &run_report(&config, &stats))?;
    }
    if let Some(p) = &args.common.csv {
        let mut w = create(p)?;
        write_run_csv(&mut w, &stats)?;
        w.flush()?;
    }
    Ok(())
}

fn steps(args: StepsArgs) -> Result<()> {
    let config = args.common.config(args.method, args.eps_list.first().copied().unwrap_or(1e-5));
    let scaling = step_scaling_experiment(args.method, &config, &args.eps_list)?;
    for p in &scaling.points {
        println!("eps={:e} |ln eps|={:.4} mean_steps={:.4} ci95={:.4}", p.eps, p.abs_ln_eps, p.mean_steps, p.ci95);
    }
    let f = &scaling.fit;
    println!("fit: {:.4} + {:.4}|ln eps|  r^2={:.6}", f.intercept, f.slope, f.r_squared);
    if let Some(p) = &args.common.csv {
        let mut w = create(p)?;
        write_steps_csv(&mut w, &scaling)?;
        w.flush()?;
    }
    if let Some(p) = &args.common.json {
        write_json(p, &steps_report(&config, &scaling))?;
    }
    Ok(())
}

fn timing(args: TimingArgs) -> Result<()> {
    let config = args.common.config(args.methods[0], args.eps_list.first().copied().unwrap_or(1e-5));
    let result = timing_experiment_with_repeats(&args.methods, &config, &args.eps_list, args.repeats)?;
    for p in &result.points {
        println!("{} eps={:e} seconds={:.4}", p.method, p.eps, p.seconds);
    }
    for (m, fit) in &result.fits {
        if let Some(f) = fit {
            println!("{m}: {:.4} + {:.4}|ln eps|  r^2={:.6}", f.intercept, f.slope, f.r_squared);
        }
    }
    if let Some(p) = &args.common.csv {
        let mut w = create(p)?;
        write_timing_csv(&mut w, &result)?;
        w.flush()?;
    }
    if let Some(p) = &args.common.json {
        write_json(p, &timing_report(&config, &result))?;
    }
    Ok(())
}

fn precompute(args: PrecomputeArgs) -> Result<()> {
    let method = match args.method {
        PrecomputeMethod::Inversion => TableMethod::Inversion,
        PrecomputeMethod::Euler => TableMethod::Euler { h: args.h },
    };
    let mut rng = RngStream::new(args.seed, 0);
    let table = precompute_table(args.count, args.dim, method, &mut rng)?;
    table.save(&args.out)?;
    println!("wrote {} samples (delta={}) to {}", table.count(), table.delta(), args.out.display());
    Ok(())
}

fn pdf1d(args: Pdf1dArgs) -> Result<()> {
    let (level, beta) = (args.level, args.beta);
    let boundary = match args.boundary {
        BoundaryKind::Level => Boundary1D::constant(level)?,
        BoundaryKind::Line => Boundary1D::line(level, beta)?,
        BoundaryKind::GeneralDemo => Boundary1D::general(
            move |t| level + beta * t * t,
            move |t| 2.0 * beta * t,
            Some(Arc::new(move |_| 2.0 * beta)),
        )?,
    };
    if args.t_end.is_nan() || args.t_end <= 0.0 || args.points == 0 {
        return Err(Error::Config("pdf1d needs --t-end > 0 and --points >= 1".into()));
    }
    let mut w = create(&args.out)?;
    writeln!(w, "t,q1,p_K")?;
    for i in 1..=args.points {
        let t = args.t_end * i as f64 / args.points as f64;
        let sums = durbin_partial_sums(t, &boundary, args.terms, args.grid)?;
        writeln!(w, "{},{},{}", format_real(t), format_real(sums[0]), format_real(*sums.last().unwrap()))?;
    }
    w.flush()?;
    println!("wrote {} rows to {}", args.points, args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => run(a),
        Command::Steps(a) => steps(a),
        Command::Timing(a) => timing(a),
        Command::Precompute(a) => precompute(a),
        Command::Pdf1d(a) => pdf1d(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
