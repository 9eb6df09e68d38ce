//! Shared numerical substrate.
//!
//! Everything here is a pure function over immutable inputs.

mod diff;
mod fourier;
mod grid;
mod ode;

pub use diff::{central_diff, derivative_along, derivative_along_vec};
pub use fourier::{dft_modes, inverse_dft, Spectrum};
pub use grid::PeriodicGrid;
pub use ode::{rk4_solve, Trajectory};

use crate::error::{Error, Result};

/// Absolute/relative tolerances plus the finite-difference step used by the
/// derivative-based checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub fd_step: f64,
}

impl Tolerances {
    pub fn new(abs_tol: f64, rel_tol: f64, fd_step: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&abs_tol) {
            return Err(Error::InvalidParameter {
                name: "abs_tol",
                reason: format!("{abs_tol} not in [0, 1)"),
            });
        }
        if !(0.0..1.0).contains(&rel_tol) {
            return Err(Error::InvalidParameter {
                name: "rel_tol",
                reason: format!("{rel_tol} not in [0, 1)"),
            });
        }
        if !(fd_step > 0.0 && fd_step < std::f64::consts::TAU / 10.0) {
            return Err(Error::InvalidParameter {
                name: "fd_step",
                reason: format!("{fd_step} not in (0, 2pi/10)"),
            });
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            fd_step,
        })
    }

    /// Checks the step against a grid period other than `2pi`.
    pub fn check_period(&self, period: f64) -> Result<()> {
        if self.fd_step < period / 10.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter {
                name: "fd_step",
                reason: format!("{} must be below period/10 = {}", self.fd_step, period / 10.0),
            })
        }
    }

    pub fn with_fd_step(mut self, fd_step: f64) -> Result<Self> {
        self.fd_step = fd_step;
        Self::new(self.abs_tol, self.rel_tol, self.fd_step)
    }

    /// `|a - b| <= abs_tol + rel_tol * max(|a|, |b|)`
    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.abs_tol + self.rel_tol * a.abs().max(b.abs())
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            fd_step: 1e-3,
        }
    }
}

/// Least-squares slope of `log y` against `log x`.
///
/// Returns `None` with fewer than two points or when any value is not
/// strictly positive.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerances_reject_bad_values() {
        assert!(Tolerances::new(1.5, 0.0, 1e-3).is_err());
        assert!(Tolerances::new(0.0, -1.0, 1e-3).is_err());
        assert!(Tolerances::new(0.0, 0.0, 0.0).is_err());
        assert!(Tolerances::new(0.0, 0.0, 1.0).is_err());
        let tol = Tolerances::new(1e-9, 0.0, 1e-3).unwrap();
        assert!(tol.check_period(1.0).is_ok());
        assert!(tol.check_period(0.005).is_err());
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [0.1, 0.05, 0.025];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powi(2)).collect();
        assert!((loglog_slope(&xs, &ys).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(loglog_slope(&xs[..1], &ys[..1]), None);
        assert_eq!(loglog_slope(&[1.0, 2.0], &[0.0, 1.0]), None);
    }
}
