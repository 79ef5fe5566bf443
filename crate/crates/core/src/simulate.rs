//! Exact Monte Carlo sampling of `(X_t, V_t)` from the alternating renewal
//! construction.
//!
//! Path `i` of an ensemble draws from its own ChaCha8 stream, keyed by the
//! ensemble seed and stream number `i`, so results do not depend on how the
//! paths are spread across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::law::{InitialVelocity, MotionParams};

/// Paths per work unit. Fixed so the floating-point reduction order does
/// not depend on the thread count.
const CHUNK: usize = 8192;

/// Draws from Gamma(shape, rate = 1) by Marsaglia-Tsang squeeze rejection,
/// boosted by `U^{1/shape}` when `shape < 1`.
fn standard_gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape < 1.0 {
        let u: f64 = 1.0 - rng.random::<f64>();
        return standard_gamma(shape + 1.0, rng) * (u.ln() / shape).exp();
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u: f64 = 1.0 - rng.random::<f64>();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// One draw from the gamma law with density `rate^shape x^{shape-1} e^{-rate x} / Γ(shape)`.
pub fn sample_gamma<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    if !(shape > 0.0) || !shape.is_finite() || !(rate > 0.0) || !rate.is_finite() {
        return domain(format!("gamma shape and rate must be finite and > 0, got ({shape}, {rate})"));
    }
    Ok(standard_gamma(shape, rng) / rate)
}

/// Endpoint state of one simulated path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    /// `X_t`.
    pub position: f64,
    /// `V_t`, either `c` or `-v`.
    pub velocity: f64,
    /// `N_t`.
    pub renewal_count: u64,
    /// No reversal before `t`: the path sits on the atom `X_t = V_0 t`.
    pub hit_boundary: bool,
}

impl PathSample {
    /// `V_t` from the parity of `N_t`: `(c-v)/2 + sgn(V_0)(c+v)/2 (-1)^{N_t}`.
    pub fn parity_velocity(&self, params: &MotionParams, v0: InitialVelocity) -> f64 {
        let parity = if self.renewal_count.is_multiple_of(2) { 1.0 } else { -1.0 };
        0.5 * (params.c - params.v) + v0.sign() * 0.5 * (params.c + params.v) * parity
    }
}

fn run_path<R: Rng + ?Sized>(p: &MotionParams, t: f64, v0: InitialVelocity, rng: &mut R) -> PathSample {
    let mut forward = v0 == InitialVelocity::Forward;
    let mut elapsed = 0.0;
    let mut position = 0.0;
    let mut renewals = 0u64;
    loop {
        let (velocity, sojourn) = if forward {
            (p.c, standard_gamma(p.alpha, rng) / p.lambda)
        } else {
            (-p.v, standard_gamma(p.beta, rng) / p.mu)
        };
        if elapsed + sojourn >= t {
            position += velocity * (t - elapsed);
            return PathSample {
                position,
                velocity,
                renewal_count: renewals,
                hit_boundary: renewals == 0,
            };
        }
        position += velocity * sojourn;
        elapsed += sojourn;
        renewals += 1;
        forward = !forward;
    }
}

fn check_inputs(params: &MotionParams, t: f64) -> Result<()> {
    params.validate()?;
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("t must be finite and > 0, got {t}"));
    }
    Ok(())
}

/// Simulates one path of the motion up to time `t`.
pub fn sample_path<R: Rng + ?Sized>(params: &MotionParams, t: f64, v0: InitialVelocity, rng: &mut R) -> Result<PathSample> {
    check_inputs(params, t)?;
    Ok(run_path(params, t, v0, rng))
}

/// RNG for path `index` of the ensemble keyed by `seed`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Endpoint statistics of an ensemble of paths.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalLaw {
    pub t: f64,
    /// Fraction of paths with no reversal before `t`.
    pub atom_frequency: f64,
    /// `n_bins + 1` uniformly spaced edges from `-vt` to `ct`.
    pub bin_edges: Vec<f64>,
    /// Fraction of all paths whose interior endpoint falls in each bin.
    pub bin_masses: Vec<f64>,
    pub bin_counts: Vec<u64>,
    pub atom_count: u64,
    pub sample_count: u64,
    /// Paths ending with `V_t = c`, atom included.
    pub forward_count: u64,
    pub mean_position: f64,
    /// Unbiased sample variance of `X_t`.
    pub position_variance: f64,
}

impl EmpiricalLaw {
    pub fn bin_width(&self) -> f64 {
        self.bin_edges[1] - self.bin_edges[0]
    }

    pub fn bin_centers(&self) -> Vec<f64> {
        self.bin_edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// Histogram estimate of the continuous density `p` (atom excluded).
    pub fn density_estimates(&self) -> Vec<f64> {
        let w = self.bin_width();
        self.bin_masses.iter().map(|m| m / w).collect()
    }

    /// Standard error of `mean_position`.
    pub fn mean_standard_error(&self) -> f64 {
        (self.position_variance / self.sample_count as f64).sqrt()
    }

    pub fn forward_frequency(&self) -> f64 {
        self.forward_count as f64 / self.sample_count as f64
    }
}

#[derive(Clone)]
struct Tally {
    counts: Vec<u64>,
    atom: u64,
    forward: u64,
    n: u64,
    sum: f64,
    sum_sq: f64,
}

impl Tally {
    fn new(n_bins: usize) -> Self {
        Self {
            counts: vec![0; n_bins],
            atom: 0,
            forward: 0,
            n: 0,
            sum: 0.0,
            sum_sq: 0.0,
        }
    }

    fn merge(&mut self, other: &Tally) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.atom += other.atom;
        self.forward += other.forward;
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }
}

/// Runs `n_samples` independent paths and tabulates their endpoints.
///
/// Path `i` uses [`path_rng`]`(seed, i)`; the result is bit-identical for any
/// rayon thread count.
pub fn ensemble(
    params: &MotionParams,
    t: f64,
    v0: InitialVelocity,
    n_samples: usize,
    n_bins: usize,
    seed: u64,
) -> Result<EmpiricalLaw> {
    check_inputs(params, t)?;
    if n_samples < 1 {
        return domain("n_samples must be >= 1");
    }
    if n_bins < 1 {
        return domain("n_bins must be >= 1");
    }
    let lo = -params.v * t;
    let hi = params.c * t;
    let width = (hi - lo) / n_bins as f64;
    let n_chunks = n_samples.div_ceil(CHUNK);

    let tallies: Vec<Tally> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut tally = Tally::new(n_bins);
            let start = chunk * CHUNK;
            let end = (start + CHUNK).min(n_samples);
            for i in start..end {
                let mut rng = path_rng(seed, i as u64);
                let s = run_path(params, t, v0, &mut rng);
                tally.n += 1;
                tally.sum += s.position;
                tally.sum_sq += s.position * s.position;
                if s.velocity > 0.0 {
                    tally.forward += 1;
                }
                if s.hit_boundary {
                    tally.atom += 1;
                } else {
                    let idx = ((s.position - lo) / width).floor();
                    let idx = (idx.max(0.0) as usize).min(n_bins - 1);
                    tally.counts[idx] += 1;
                }
            }
            tally
        })
        .collect();

    let mut total = Tally::new(n_bins);
    for tally in &tallies {
        total.merge(tally);
    }

    let n = total.n as f64;
    let mean = total.sum / n;
    let variance = if total.n > 1 {
        ((total.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    let bin_edges = (0..=n_bins)
        .map(|i| if i == n_bins { hi } else { lo + i as f64 * width })
        .collect();
    Ok(EmpiricalLaw {
        t,
        atom_frequency: total.atom as f64 / n,
        bin_edges,
        bin_masses: total.counts.iter().map(|&c| c as f64 / n).collect(),
        bin_counts: total.counts,
        atom_count: total.atom,
        sample_count: total.n,
        forward_count: total.forward,
        mean_position: mean,
        position_variance: variance,
    })
}
