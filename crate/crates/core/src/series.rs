//! Truncation policy for the infinite series of the law and the mean.

use crate::error::{domain, Error, Result};

/// Truncation policy: stop once `consecutive_small` successive terms are each
/// below `rel_tol` times the running sum, or fail after `max_terms`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub consecutive_small: usize,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            consecutive_small: 3,
            max_terms: 10_000,
        }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, consecutive_small: usize, max_terms: usize) -> Result<Self> {
        let ctl = Self {
            rel_tol,
            consecutive_small,
            max_terms,
        };
        ctl.validate()?;
        Ok(ctl)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !self.rel_tol.is_finite() {
            return domain(format!("rel_tol must be > 0, got {}", self.rel_tol));
        }
        if self.consecutive_small < 1 {
            return domain("consecutive_small must be >= 1");
        }
        if self.max_terms < self.consecutive_small {
            return domain(format!(
                "max_terms ({}) must be >= consecutive_small ({})",
                self.max_terms, self.consecutive_small
            ));
        }
        Ok(())
    }
}

/// Sums `term(k)` for `k = 1, 2, ...` under `ctl`.
///
/// The small-term counter only runs once `k >= monotone_from`: before that
/// index the terms may still be growing (or underflow to zero ahead of the
/// peak) and a run of tiny terms says nothing about the tail.
///
/// Returns the sum and the index of the last term added.
pub(crate) fn sum_series<F>(ctl: &SeriesControl, monotone_from: usize, mut term: F) -> Result<(f64, usize)>
where
    F: FnMut(usize) -> f64,
{
    let mut sum = 0.0;
    let mut small = 0;
    for k in 1..=ctl.max_terms {
        let tk = term(k);
        sum += tk;
        if k >= monotone_from && tk.abs() <= ctl.rel_tol * sum.abs() {
            small += 1;
            if small >= ctl.consecutive_small {
                return Ok((sum, k));
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Convergence {
        partial_sum: sum,
        terms: ctl.max_terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series_converges() {
        let ctl = SeriesControl::default();
        let (s, k) = sum_series(&ctl, 1, |k| 0.5f64.powi(k as i32)).unwrap();
        assert!((s - 1.0).abs() < 1e-11);
        assert!(k > 30 && k < 60);
    }

    #[test]
    fn divergent_series_reports_partial_sum() {
        let ctl = SeriesControl::new(1e-12, 3, 50).unwrap();
        match sum_series(&ctl, 1, |_| 1.0) {
            Err(Error::Convergence { partial_sum, terms }) => {
                assert_eq!(terms, 50);
                assert_eq!(partial_sum, 50.0);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn leading_zeros_do_not_stop_before_guard() {
        let ctl = SeriesControl::default();
        // zero until k = 10, then a geometric tail
        let f = |k: usize| if k < 10 { 0.0 } else { 0.5f64.powi(k as i32 - 9) };
        let (s, _) = sum_series(&ctl, 10, f).unwrap();
        assert!((s - 1.0).abs() < 1e-11);
    }

    #[test]
    fn control_validation() {
        assert!(SeriesControl::new(0.0, 3, 10).is_err());
        assert!(SeriesControl::new(1e-12, 0, 10).is_err());
        assert!(SeriesControl::new(1e-12, 5, 4).is_err());
        assert!(SeriesControl::new(1e-12, 3, 3).is_ok());
    }
}
