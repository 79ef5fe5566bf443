use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use telegraph_core::harness::bin_masses;
use telegraph_core::{
    atom_probability, density_grid, ensemble, erlang_mean_closed_form, mean_conditional, validate_with, Error,
    SymmetricGammaParams, ValidationConfig,
};

use crate::args::{Command, RunConfig, UsageError};

/// Relative inset of density grids from the support endpoints, in units of `(c+v)t`.
const GRID_INSET: f64 = 1e-6;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core(Error),
    Io(io::Error),
    Validation,
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Core(Error::Domain(_) | Error::NearBoundary { .. }) => 1,
            Failure::Core(Error::Convergence { .. } | Error::Quadrature { .. }) => 2,
            Failure::Io(_) => 1,
            Failure::Validation => 3,
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
            Failure::Io(e) => format!("output: {e}"),
            Failure::Validation => "validation failed".into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

pub fn run(command: &Command) -> Result<(), Failure> {
    let (cfg, body, verdict) = match command {
        Command::Density(cfg) => (cfg, density(cfg)?, Ok(())),
        Command::Mean(cfg) => (cfg, mean(cfg)?, Ok(())),
        Command::Simulate(cfg) => (cfg, simulate(cfg)?, Ok(())),
        Command::Validate(cfg) => {
            let (text, passed) = validate(cfg)?;
            (cfg, text, if passed { Ok(()) } else { Err(Failure::Validation) })
        }
    };
    let mut sink: Box<dyn Write> = match &cfg.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    sink.write_all(body.as_bytes())?;
    sink.flush()?;
    verdict
}

fn density(cfg: &RunConfig) -> Result<String, Failure> {
    let p = cfg.motion()?;
    let ctl = cfg.control()?;
    let t = cfg.single_time()?;
    let v0 = cfg.v0();
    let lo = -p.v * t;
    let hi = p.c * t;
    let delta = GRID_INSET * p.speed_sum() * t;
    let n = cfg.grid_points as usize;
    let xs: Vec<f64> = if n == 1 {
        vec![0.5 * (lo + hi)]
    } else {
        let span = hi - lo - 2.0 * delta;
        (0..n).map(|i| lo + delta + span * i as f64 / (n - 1) as f64).collect()
    };
    let points = density_grid(&p, &xs, t, v0, &ctl)?;
    let mut out = String::from("x,f,b,p\n");
    for (x, lp) in xs.iter().zip(&points) {
        writeln!(out, "{x},{},{},{}", lp.forward_density, lp.backward_density, lp.total_density).unwrap();
    }
    let max_f = points.iter().map(|lp| lp.truncation_index_f).max().unwrap_or(0);
    let max_b = points.iter().map(|lp| lp.truncation_index_b).max().unwrap_or(0);
    writeln!(
        out,
        "# atom_probability={} atom_position={} truncation_index_f_max={max_f} truncation_index_b_max={max_b}",
        atom_probability(&p, t, v0)?,
        v0.velocity(&p) * t,
    )
    .unwrap();
    Ok(out)
}

fn mean(cfg: &RunConfig) -> Result<String, Failure> {
    let p = cfg.motion()?;
    let ctl = cfg.control()?;
    let sym = SymmetricGammaParams::from_motion(&p).ok_or_else(|| {
        Failure::Usage(format!(
            "unsupported configuration: the mean needs identically distributed forward and backward sojourns \
             (--lambda = --mu and --alpha = --beta), got lambda={} mu={} alpha={} beta={}",
            p.lambda, p.mu, p.alpha, p.beta
        ))
    })?;
    let v0 = cfg.v0();
    let ts = cfg.time_grid()?;
    let erlang_n = (sym.alpha.fract() == 0.0 && (1.0..=4.0).contains(&sym.alpha)).then_some(sym.alpha as u32);
    let mut out = String::from(if erlang_n.is_some() { "t,mean,closed_form\n" } else { "t,mean\n" });
    for t in ts {
        let m = if t == 0.0 { 0.0 } else { mean_conditional(&sym, t, v0, &ctl)? };
        write!(out, "{t},{m}").unwrap();
        if let Some(n) = erlang_n {
            write!(out, ",{}", erlang_mean_closed_form(n, &sym, t, v0)?).unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

fn simulate(cfg: &RunConfig) -> Result<String, Failure> {
    let p = cfg.motion()?;
    let t = cfg.single_time()?;
    let v0 = cfg.v0();
    if cfg.samples == 0 {
        return Err(Failure::Usage("--samples must be >= 1 for simulate".into()));
    }
    let n_bins = cfg.bins as usize;
    let emp = ensemble(&p, t, v0, cfg.samples as usize, n_bins, cfg.seed)?;
    let masses = bin_masses(&p, t, v0, n_bins, 1e-10)?;
    let width = emp.bin_width();
    let n = emp.sample_count as f64;
    let mut out = String::from("bin_center,empirical_density,analytic_density\n");
    let mut within = 0usize;
    for ((x, e), m) in emp.bin_centers().iter().zip(emp.density_estimates()).zip(&masses) {
        writeln!(out, "{x},{e},{}", m / width).unwrap();
        let se = (m * (1.0 - m) / n).sqrt();
        if ((e * width) - m).abs() <= 3.0 * se {
            within += 1;
        }
    }
    let q = atom_probability(&p, t, v0)?;
    let z = (emp.atom_frequency - q) / (q * (1.0 - q) / n).sqrt();
    let interior: f64 = emp.bin_masses.iter().sum();
    writeln!(
        out,
        "# samples={} seed={} atom_position={} atom_frequency={} atom_probability={q} atom_z={z} interior_mass={interior} bins_within_3se={within}/{n_bins}",
        emp.sample_count,
        cfg.seed,
        v0.velocity(&p) * t,
        emp.atom_frequency,
    )
    .unwrap();
    Ok(out)
}

fn validate(cfg: &RunConfig) -> Result<(String, bool), Failure> {
    let p = cfg.motion()?;
    let t = cfg.single_time()?;
    let vc = ValidationConfig {
        n_samples: cfg.samples as usize,
        n_bins: cfg.bins as usize,
        seed: cfg.seed,
        ctl: cfg.control()?,
        ..ValidationConfig::default()
    };
    let report = validate_with(&p, t, cfg.v0(), &vc)?;
    Ok((report.to_key_value(), report.passed()))
}
