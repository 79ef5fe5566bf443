use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use telegraph_core::{InitialVelocity, MotionParams, SeriesControl};

#[derive(Debug, Parser)]
#[command(name = "telegraph", version, about = "Telegraph motion with gamma sojourns: exact law, mean, simulation, validation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density curve `x,f,b,p` on a uniform grid inside the support.
    Density(RunConfig),
    /// Conditional mean `t,mean[,closed_form]` over a time range.
    Mean(RunConfig),
    /// Ensemble histogram against the bin-averaged analytic density.
    Simulate(RunConfig),
    /// Full validation report as `key=value` lines.
    Validate(RunConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum V0Arg {
    Forward,
    Backward,
}

impl From<V0Arg> for InitialVelocity {
    fn from(v: V0Arg) -> Self {
        match v {
            V0Arg::Forward => InitialVelocity::Forward,
            V0Arg::Backward => InitialVelocity::Backward,
        }
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("must be finite and > 0, got {s}"))
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x >= 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("must be finite and >= 0, got {s}"))
    }
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct RunConfig {
    /// Forward speed.
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub c: f64,
    /// Backward speed.
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub v: f64,
    /// Forward gamma rate.
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub lambda: f64,
    /// Backward gamma rate [default: --lambda].
    #[arg(long, value_parser = positive)]
    pub mu: Option<f64>,
    /// Forward gamma shape.
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    pub alpha: f64,
    /// Backward gamma shape [default: --alpha].
    #[arg(long, value_parser = positive)]
    pub beta: Option<f64>,
    /// Time (density, simulate, validate; a one-point range for mean).
    #[arg(long, value_parser = non_negative)]
    pub t: Option<f64>,
    #[arg(long, value_parser = non_negative)]
    pub t_start: Option<f64>,
    #[arg(long, value_parser = non_negative)]
    pub t_end: Option<f64>,
    #[arg(long, value_parser = positive)]
    pub t_step: Option<f64>,
    /// Initial velocity.
    #[arg(long, value_enum, default_value_t = V0Arg::Forward)]
    pub v0: V0Arg,
    #[arg(long, default_value_t = 201, value_parser = clap::value_parser!(u64).range(1..))]
    pub grid_points: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub bins: u64,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    /// Relative truncation tolerance of the series.
    #[arg(long, default_value_t = 1e-12, value_parser = positive)]
    pub rel_tol: f64,
    /// Output file [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Configuration errors detected after parsing, each naming its flag.
#[derive(Debug)]
pub struct UsageError(pub String);

impl RunConfig {
    pub fn motion(&self) -> Result<MotionParams, telegraph_core::Error> {
        MotionParams::new(
            self.c,
            self.v,
            self.lambda,
            self.alpha,
            self.mu.unwrap_or(self.lambda),
            self.beta.unwrap_or(self.alpha),
        )
    }

    pub fn v0(&self) -> InitialVelocity {
        self.v0.into()
    }

    pub fn control(&self) -> Result<SeriesControl, telegraph_core::Error> {
        let d = SeriesControl::default();
        SeriesControl::new(self.rel_tol, d.consecutive_small, d.max_terms)
    }

    /// The single time of density, simulate and validate.
    pub fn single_time(&self) -> Result<f64, UsageError> {
        match self.t {
            Some(t) if t > 0.0 => Ok(t),
            Some(t) => Err(UsageError(format!("--t must be > 0, got {t}"))),
            None => Err(UsageError("--t is required".into())),
        }
    }

    /// Time grid of the mean: `--t` alone, or `--t-start/--t-end/--t-step`.
    pub fn time_grid(&self) -> Result<Vec<f64>, UsageError> {
        if let Some(t) = self.t {
            if self.t_start.is_some() || self.t_end.is_some() {
                return Err(UsageError("--t cannot be combined with --t-start/--t-end".into()));
            }
            return Ok(vec![t]);
        }
        let start = self.t_start.unwrap_or(0.0);
        let end = self.t_end.ok_or_else(|| UsageError("--t-end (or --t) is required".into()))?;
        if end < start {
            return Err(UsageError(format!("--t-end ({end}) must not be below --t-start ({start})")));
        }
        if end == start {
            return Ok(vec![start]);
        }
        let step = self.t_step.ok_or_else(|| UsageError("--t-step is required when --t-end > --t-start".into()))?;
        // tolerate rounding in (end - start) / step; a final point within
        // 1e-9 steps of the end is snapped to it
        let n = ((end - start) / step * (1.0 + 1e-12)).floor() as usize;
        let mut grid: Vec<f64> = (0..=n).map(|i| start + i as f64 * step).collect();
        if let Some(last) = grid.last_mut() {
            if (*last - end).abs() < 1e-9 * step {
                *last = end;
            }
        }
        Ok(grid)
    }
}
