//! Acceptance criteria 1-8. Each criterion prints one PASS/FAIL line with its
//! observed worst case and runtime; the process exits non-zero if any fail.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use telegraph_core::harness::{bin_masses, LimitProbe, LIMIT_EPSILONS};
use telegraph_core::{
    atom_probability, density, ensemble, erlang_mean_closed_form, erlang_parity_expectation, integrate_density,
    mean_conditional, parity_expectation, BoundaryCase, ExtendedReal, InitialVelocity, MotionParams, SeriesControl,
    SymmetricGammaParams,
};

const SHAPE_GRID: [(f64, f64); 4] = [(0.5, 0.5), (0.5, 1.5), (1.5, 0.5), (1.5, 1.5)];

struct Outcome {
    pass: bool,
    detail: String,
}

fn unit_motion(alpha: f64, beta: f64) -> MotionParams {
    MotionParams::new(1.0, 1.0, 1.0, alpha, 1.0, beta).unwrap()
}

fn normalization() -> Outcome {
    let mut worst: f64 = 0.0;
    for (alpha, beta) in SHAPE_GRID {
        let p = unit_motion(alpha, beta);
        for t in [1.0, 2.0, 3.0] {
            let atom = atom_probability(&p, t, InitialVelocity::Forward).unwrap();
            let mass = integrate_density(&p, t, InitialVelocity::Forward, 1e-10).unwrap();
            worst = worst.max((atom + mass - 1.0).abs());
        }
    }
    Outcome {
        pass: worst <= 1e-6,
        detail: format!("max |atom + ∫p - 1| = {worst:.3e} over 12 configurations (tol 1e-6)"),
    }
}

fn erlang_regression() -> Outcome {
    let ctl = SeriesControl::default();
    let mut worst: f64 = 0.0;
    for n in 1..=4u32 {
        for lambda in [1.0, 2.0] {
            let p = SymmetricGammaParams::new(1.0, 1.0, lambda, n as f64).unwrap();
            for t in [0.25, 0.5, 1.0, 2.0, 5.0] {
                let series = mean_conditional(&p, t, InitialVelocity::Forward, &ctl).unwrap();
                let closed = erlang_mean_closed_form(n, &p, t, InitialVelocity::Forward).unwrap();
                worst = worst.max((series - closed).abs());
            }
        }
    }
    Outcome {
        pass: worst <= 1e-8,
        detail: format!("max |series - closed form| = {worst:.3e} over 40 points (tol 1e-8)"),
    }
}

fn monte_carlo_law() -> Outcome {
    let p = unit_motion(1.5, 1.5);
    let t = 3.0;
    let n = 1_000_000usize;
    let n_bins = 100;
    let emp = ensemble(&p, t, InitialVelocity::Forward, n, n_bins, 20_240_601).unwrap();
    let q = atom_probability(&p, t, InitialVelocity::Forward).unwrap();
    let nf = n as f64;
    let atom_z = (emp.atom_frequency - q) / (q * (1.0 - q) / nf).sqrt();
    let masses = bin_masses(&p, t, InitialVelocity::Forward, n_bins, 1e-11).unwrap();
    let within = emp
        .bin_masses
        .iter()
        .zip(&masses)
        .filter(|&(&e, &m)| {
            let se = (m * (1.0 - m) / nf).sqrt();
            (e - m).abs() <= 3.0 * se
        })
        .count();
    let coverage = within as f64 / n_bins as f64;
    Outcome {
        pass: atom_z.abs() <= 4.0 && coverage >= 0.95,
        detail: format!("atom z = {atom_z:+.3} (|z| <= 4), bins within 3 SE = {within}/{n_bins} (>= 95)"),
    }
}

fn monte_carlo_mean() -> Outcome {
    let ctl = SeriesControl::default();
    let t = 2.0;
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, alpha) in [0.5, 1.0, 1.5, 2.0].into_iter().enumerate() {
        let sym = SymmetricGammaParams::new(1.0, 1.0, 1.0, alpha).unwrap();
        let emp = ensemble(&sym.as_motion(), t, InitialVelocity::Forward, 1_000_000, 1, 7_000 + i as u64).unwrap();
        let m = mean_conditional(&sym, t, InitialVelocity::Forward, &ctl).unwrap();
        let z = (emp.mean_position - m) / emp.mean_standard_error();
        pass &= z.abs() <= 4.0;
        parts.push(format!("α={alpha}: z={z:+.3}"));
    }
    Outcome {
        pass,
        detail: format!("{} (|z| <= 4)", parts.join(", ")),
    }
}

fn probe(p: &MotionParams, case: BoundaryCase) -> LimitProbe {
    LimitProbe::run(p, case, 1.0, &SeriesControl::default()).unwrap()
}

fn limit_suite() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let last = LIMIT_EPSILONS.len() - 1;

    // finite non-zero limits, matched at the smallest ε
    let finite = [
        (unit_motion(0.5, 1.0), BoundaryCase::ForwardAtCt),
        (unit_motion(1.5, 1.0), BoundaryCase::ForwardAtCt),
        (unit_motion(1.0, 0.5), BoundaryCase::BackwardAtMinusVt),
        (unit_motion(1.0, 1.5), BoundaryCase::BackwardAtMinusVt),
        (unit_motion(0.5, 1.0), BoundaryCase::BackwardAtCt),
        (unit_motion(1.0, 1.0), BoundaryCase::BackwardAtCt),
        (unit_motion(1.5, 1.0), BoundaryCase::BackwardAtCt),
    ];
    let mut worst_rel: f64 = 0.0;
    for (p, case) in finite {
        let pr = probe(&p, case);
        let l = pr.limit.finite().expect("finite limit");
        worst_rel = worst_rel.max((pr.values[last] / l - 1.0).abs());
    }
    pass &= worst_rel <= 1e-3;
    parts.push(format!("finite: max rel err {worst_rel:.2e} (<= 1e-3)"));

    // divergent limits: ≥ 10× growth per ε-decade
    let mut min_growth = f64::INFINITY;
    for (p, case) in [
        (unit_motion(1.0, 0.5), BoundaryCase::ForwardAtCt),
        (unit_motion(0.5, 1.0), BoundaryCase::BackwardAtMinusVt),
    ] {
        let pr = probe(&p, case);
        assert!(pr.limit.is_infinite());
        for r in pr.decade_ratios() {
            min_growth = min_growth.min(r);
        }
    }
    pass &= min_growth >= 10.0;
    parts.push(format!("divergent: min growth per decade {min_growth:.3} (>= 10)"));

    // zero limits: value at the smallest ε below 1e-3 of the value at the largest
    let mut max_ratio: f64 = 0.0;
    for (p, case) in [
        (unit_motion(1.0, 1.5), BoundaryCase::ForwardAtCt),
        (unit_motion(1.5, 1.0), BoundaryCase::BackwardAtMinusVt),
        (unit_motion(1.5, 1.5), BoundaryCase::ForwardAtMinusVt),
    ] {
        let pr = probe(&p, case);
        assert_eq!(pr.limit, ExtendedReal::Finite(0.0));
        max_ratio = max_ratio.max(pr.overall_ratio());
    }
    pass &= max_ratio <= 1e-3;
    parts.push(format!("zero: max ratio ε=1e-5 / ε=1e-3 {max_ratio:.3e} (<= 1e-3)"));

    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn parity_cross_check() -> Outcome {
    let ctl = SeriesControl::default();
    let mut worst_pair: f64 = 0.0;
    let mut worst_exp: f64 = 0.0;
    for n in 1..=4u32 {
        let p = SymmetricGammaParams::new(1.0, 1.0, 1.0, n as f64).unwrap();
        for ls in [0.5, 1.0, 2.0, 5.0] {
            let series = parity_expectation(&p, ls, &ctl).unwrap();
            let blocks = erlang_parity_expectation(n, 1.0, ls).unwrap();
            worst_pair = worst_pair.max((series - blocks).abs());
            if n == 1 {
                let e = (-2.0 * ls).exp();
                worst_exp = worst_exp.max((series - e).abs()).max((blocks - e).abs());
            }
        }
    }
    Outcome {
        pass: worst_pair <= 1e-10 && worst_exp <= 1e-12,
        detail: format!("max |series - block sum| = {worst_pair:.2e} (1e-10), n=1 vs e^(-2λs) {worst_exp:.2e} (1e-12)"),
    }
}

fn small_time() -> Outcome {
    let ctl = SeriesControl::default();
    let t = 1e-8;
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in [0.5, 1.0, 2.0] {
        let p = SymmetricGammaParams::new(1.0, 1.0, 1.0, alpha).unwrap();
        let m = mean_conditional(&p, t, InitialVelocity::Forward, &ctl).unwrap();
        let dev = (m / (1.0 * t) - 1.0).abs();
        pass &= dev <= 1e-6;
        parts.push(format!("α={alpha}: {dev:.3e}"));
    }
    Outcome {
        pass,
        detail: format!("|E[X_t]/(V_0 t) - 1| at t=1e-8: {} (<= 1e-6)", parts.join(", ")),
    }
}

fn reflection() -> Outcome {
    let ctl = SeriesControl::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_p: f64 = 0.0;
    let mut worst_m: f64 = 0.0;
    for _ in 0..20 {
        let c = rng.random_range(0.2..3.0);
        let lambda = rng.random_range(0.2..3.0);
        let alpha = rng.random_range(0.3..4.0);
        let t = rng.random_range(0.1..4.0);
        let sym = SymmetricGammaParams::new(c, c, lambda, alpha).unwrap();
        let p = sym.as_motion();
        for _ in 0..5 {
            let x = c * t * rng.random_range(-0.98..0.98);
            let fwd = density(&p, x, t, InitialVelocity::Forward, &ctl).unwrap();
            let bwd = density(&p, -x, t, InitialVelocity::Backward, &ctl).unwrap();
            worst_p = worst_p.max((fwd.total_density - bwd.total_density).abs());
        }
        let mf = mean_conditional(&sym, t, InitialVelocity::Forward, &ctl).unwrap();
        let mb = mean_conditional(&sym, t, InitialVelocity::Backward, &ctl).unwrap();
        worst_m = worst_m.max((mf + mb).abs());
    }
    Outcome {
        pass: worst_p <= 1e-12 && worst_m <= 1e-12,
        detail: format!("max density gap {worst_p:.2e}, max mean gap {worst_m:.2e} over 20 configurations (1e-12)"),
    }
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        (1, "normalization", Duration::from_secs(10), normalization),
        (2, "erlang closed-form regression", Duration::from_secs(1), erlang_regression),
        (3, "monte carlo vs analytic law", Duration::from_secs(60), monte_carlo_law),
        (4, "monte carlo vs analytic mean", Duration::from_secs(60), monte_carlo_mean),
        (5, "boundary limit suite", Duration::from_secs(5), limit_suite),
        (6, "parity cross-check", Duration::from_secs(1), parity_cross_check),
        (7, "small-t asymptotics", Duration::from_secs(1), small_time),
        (8, "reflection symmetry", Duration::from_secs(5), reflection),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = Vec::new();
    for (id, name, budget, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || f == &id.to_string()) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let pass = out.pass && in_time;
        println!(
            "criterion {id} [{}] {name}: {} | {:.3}s (budget {}s{})",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_time { "" } else { ", exceeded" },
        );
        if !pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
