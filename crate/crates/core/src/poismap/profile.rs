use std::f64::consts::TAU;
use std::path::Path;

use nalgebra::Vector3;

use super::sphere::{exp_sphere, SpherePoint};
use crate::error::{Error, Result};
use crate::numkit::{rk4_solve, Trajectory};

const SERIES_BELOW: f64 = 1e-4;

/// Cubic Hermite interpolant of `alpha(t)` on a sorted grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    t: Vec<f64>,
    alpha: Vec<f64>,
    slope: Vec<f64>,
}

impl ProfileTable {
    /// Knots `(t, alpha)` with slopes taken from `t alpha' + alpha = t`.
    pub fn from_alpha(t: Vec<f64>, alpha: Vec<f64>) -> Result<Self> {
        let slope = t.iter().zip(&alpha).map(|(t, a)| (t - a) / t).collect();
        Self::new(t, alpha, slope)
    }

    /// Knots `(t, mu)`; converted through `alpha = sin(t mu)` with
    /// finite-difference slopes.
    pub fn from_mu(t: Vec<f64>, mu: Vec<f64>) -> Result<Self> {
        let alpha: Vec<f64> = t.iter().zip(&mu).map(|(t, m)| (t * m).sin()).collect();
        let n = t.len();
        if n < 2 {
            return Err(Error::InvalidParameter { name: "profile", reason: "need at least two knots".into() });
        }
        let slope = (0..n)
            .map(|i| {
                let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
                (alpha[b] - alpha[a]) / (t[b] - t[a])
            })
            .collect();
        Self::new(t, alpha, slope)
    }

    fn new(t: Vec<f64>, alpha: Vec<f64>, slope: Vec<f64>) -> Result<Self> {
        if t.len() < 2 || t.len() != alpha.len() {
            return Err(Error::InvalidParameter {
                name: "profile",
                reason: "need at least two knots and matching columns".into(),
            });
        }
        if t.iter().chain(&alpha).chain(&slope).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { context: "profile table".into() });
        }
        if t[0] <= 0.0 || t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter {
                name: "profile",
                reason: "t must be positive and strictly increasing".into(),
            });
        }
        if alpha.iter().any(|a| a.abs() > 1.0) {
            return Err(Error::Domain("profile has |alpha| > 1, outside arcsin".into()));
        }
        Ok(Self { t, alpha, slope })
    }

    /// Reads a CSV with a header containing `t` and either `alpha` or `mu`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::parse_csv(&text)
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<&str> = lines
            .next()
            .ok_or_else(|| Error::Parse("empty profile file".into()))?
            .split(',')
            .map(str::trim)
            .collect();
        let col = |name: &str| header.iter().position(|h| *h == name);
        let tc = col("t").ok_or_else(|| Error::Parse("profile file has no `t` column".into()))?;
        let (vc, is_mu) = match (col("alpha"), col("mu")) {
            (Some(c), _) => (c, false),
            (None, Some(c)) => (c, true),
            _ => return Err(Error::Parse("profile file needs an `alpha` or `mu` column".into())),
        };
        let (mut t, mut v) = (Vec::new(), Vec::new());
        for (i, line) in lines.enumerate() {
            let cells: Vec<&str> = line.split(',').map(str::trim).collect();
            let get = |c: usize| -> Result<f64> {
                cells
                    .get(c)
                    .ok_or_else(|| Error::Parse(format!("row {}: missing column", i + 2)))?
                    .parse()
                    .map_err(|e| Error::Parse(format!("row {}: {e}", i + 2)))
            };
            t.push(get(tc)?);
            v.push(get(vc)?);
        }
        if is_mu {
            Self::from_mu(t, v)
        } else {
            Self::from_alpha(t, v)
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.t[0], *self.t.last().expect("non-empty"))
    }

    pub fn alpha(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(lo..=hi).contains(&t) {
            return Err(Error::OutOfChart { norm: t, limit: if t < lo { lo } else { hi } });
        }
        let i = self.t.partition_point(|&x| x <= t).clamp(1, self.t.len() - 1) - 1;
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let (s2, s3) = (s * s, s * s * s);
        Ok((2.0 * s3 - 3.0 * s2 + 1.0) * self.alpha[i]
            + (s3 - 2.0 * s2 + s) * h * self.slope[i]
            + (-2.0 * s3 + 3.0 * s2) * self.alpha[i + 1]
            + (s3 - s2) * h * self.slope[i + 1])
    }
}

/// The radial rescaling `u -> mu(|u|) u` applied before the exponential.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialProfile {
    /// `mu(t) = arcsin(t/2) / t`, defined for `t < 2`.
    Arcsin,
    /// `mu = 1/2`, the plain half-exponential.
    Half,
    /// `mu(t) = arcsin(alpha(t)) / t` with `alpha` interpolated from a table.
    Tabulated(ProfileTable),
}

impl RadialProfile {
    pub fn is_closed_form(&self) -> bool {
        !matches!(self, RadialProfile::Tabulated(_))
    }

    /// Admissible `|u|` range; `|u| = 0` is always accepted.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            RadialProfile::Arcsin => (0.0, 2.0),
            RadialProfile::Half => (0.0, f64::INFINITY),
            RadialProfile::Tabulated(t) => t.domain(),
        }
    }

    pub fn mu(&self, t: f64) -> Result<f64> {
        match self {
            RadialProfile::Half => Ok(0.5),
            RadialProfile::Arcsin => {
                if t >= 2.0 {
                    return Err(Error::OutOfChart { norm: t, limit: 2.0 });
                }
                if t < SERIES_BELOW {
                    let t2 = t * t;
                    Ok(0.5 + t2 / 48.0 + 3.0 * t2 * t2 / 1280.0)
                } else {
                    Ok((0.5 * t).asin() / t)
                }
            }
            RadialProfile::Tabulated(table) => Ok(table.alpha(t)?.asin() / t),
        }
    }
}

/// `pi(p, u) = Exp_p(mu(|u|) u)`.
pub fn pi_sphere(p: &SpherePoint, u: &Vector3<f64>, profile: &RadialProfile) -> Result<SpherePoint> {
    let t = u.norm();
    if t == 0.0 {
        return Ok(*p);
    }
    Ok(exp_sphere(p, &(u * profile.mu(t)?)))
}

/// `pi(p, u) = p + u/2` reduced to `[0, 2 pi)^n`.
pub fn pi_torus(p: &[f64], u: &[f64]) -> Result<Vec<f64>> {
    if p.len() != u.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), got: u.len() });
    }
    Ok(p.iter().zip(u).map(|(p, u)| (p + 0.5 * u).rem_euclid(TAU)).collect())
}

/// An RK4 solution of `t alpha' + alpha = t` and the closed-form family
/// member `a/t + t/2` it is compared against.
#[derive(Debug, Clone)]
pub struct ProfileSolution {
    pub a: f64,
    pub trajectory: Trajectory,
}

impl ProfileSolution {
    pub fn closed_form(&self, t: f64) -> f64 {
        self.a / t + 0.5 * t
    }

    /// `max_t |alpha(t) - (a/t + t/2)|` over the trajectory.
    pub fn compare_closed_form(&self) -> f64 {
        self.trajectory.max_deviation(|t| self.closed_form(t))
    }

    /// `(t, arcsin(alpha(t)) / t)` along the trajectory.
    pub fn mu(&self) -> Result<Vec<(f64, f64)>> {
        self.trajectory
            .iter()
            .map(|(t, a)| {
                if a.abs() > 1.0 {
                    Err(Error::Domain(format!("alpha({t}) = {a} is outside arcsin")))
                } else {
                    Ok((t, a.asin() / t))
                }
            })
            .collect()
    }

    pub fn table(&self) -> Result<ProfileTable> {
        ProfileTable::from_alpha(self.trajectory.times().to_vec(), self.trajectory.values().to_vec())
    }
}

/// Integrates `alpha' = (t - alpha) / t` from `(t0, alpha0)` to `t1`.
pub fn solve_profile_ode(a: f64, t0: f64, alpha0: f64, t1: f64, step: f64) -> Result<ProfileSolution> {
    if !(t0 > 0.0) {
        return Err(Error::Domain(format!("t0 = {t0}: the equation is singular at t = 0")));
    }
    if !(t0 < t1 && t1 < 2.0) {
        return Err(Error::Domain(format!("need t0 < t1 < 2, got t0 = {t0}, t1 = {t1}")));
    }
    let trajectory = rk4_solve(|t, y| (t - y) / t, t0, alpha0, t1, step)?;
    Ok(ProfileSolution { a, trajectory })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};

    fn north() -> SpherePoint {
        SpherePoint::new([0.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn arcsin_profile_values() {
        let p = north();
        assert_eq!(pi_sphere(&p, &Vector3::zeros(), &RadialProfile::Arcsin).unwrap(), p);
        let q = pi_sphere(&p, &Vector3::new(1.0, 0.0, 0.0), &RadialProfile::Arcsin).unwrap();
        let expect = Vector3::new(FRAC_PI_6.sin(), 0.0, FRAC_PI_6.cos());
        assert!((q.vector() - expect).amax() < 1e-15);
        let t = 2.0 - 1e-12;
        assert!((RadialProfile::Arcsin.mu(t).unwrap() * t - FRAC_PI_2).abs() < 1e-5);
        assert!(pi_sphere(&p, &Vector3::new(2.0, 0.0, 0.0), &RadialProfile::Arcsin).is_err());
        assert!((RadialProfile::Arcsin.mu(0.0).unwrap() - 0.5).abs() < 1e-16);
        let s = SERIES_BELOW;
        assert!((RadialProfile::Arcsin.mu(s * 0.999_999).unwrap() - (0.5 * s).asin() / s).abs() < 1e-14);
    }

    #[test]
    fn torus_projection_examples() {
        assert_eq!(pi_torus(&[0.3, 1.0], &[0.0, 0.0]).unwrap(), vec![0.3, 1.0]);
        assert_eq!(pi_torus(&[0.0, 0.0], &[PI, 0.0]).unwrap(), vec![FRAC_PI_2, 0.0]);
        let q = pi_torus(&[1.5 * PI, 0.0], &[2.0 * PI, 0.0]).unwrap();
        assert!((q[0] - FRAC_PI_2).abs() < 1e-15 && q[1] == 0.0);
    }

    #[test]
    fn ode_reproduces_closed_forms() {
        let sol = solve_profile_ode(0.0, 0.1, 0.05, 1.9, 1e-3).unwrap();
        assert!(sol.compare_closed_form() <= 1e-8);
        for (t, mu) in sol.mu().unwrap() {
            assert!((mu - (0.5 * t).asin() / t).abs() <= 1e-8);
        }
        let sol = solve_profile_ode(0.3, 0.5, 0.3 / 0.5 + 0.25, 1.9, 1e-3).unwrap();
        assert!(sol.compare_closed_form() <= 1e-8);
    }

    #[test]
    fn ode_rejects_singular_start() {
        assert!(solve_profile_ode(0.0, 0.0, 0.0, 1.0, 1e-3).is_err());
        assert!(solve_profile_ode(0.0, 0.1, 0.05, 2.5, 1e-3).is_err());
        assert!(solve_profile_ode(0.0, 0.5, 0.25, 0.4, 1e-3).is_err());
    }

    #[test]
    fn tabulated_profile_tracks_arcsin() {
        let sol = solve_profile_ode(0.0, 0.1, 0.05, 1.9, 1e-3).unwrap();
        let profile = RadialProfile::Tabulated(sol.table().unwrap());
        for t in [0.1, 0.1234, 0.77, 1.5, 1.9] {
            let d = profile.mu(t).unwrap() - RadialProfile::Arcsin.mu(t).unwrap();
            assert!(d.abs() < 1e-9, "t {t}: {d}");
        }
        assert!(profile.mu(0.05).is_err());
        assert!(!profile.is_closed_form());
    }

    #[test]
    fn profile_csv_formats() {
        let t = ProfileTable::parse_csv("t,alpha,closed_form\n0.5,0.25,0.25\n1.0,0.5,0.5\n").unwrap();
        assert!((t.alpha(0.75).unwrap() - 0.375).abs() < 1e-15);
        let m = ProfileTable::parse_csv("mu,t\n0.5,0.5\n0.5,1.0\n").unwrap();
        assert_eq!(m.domain(), (0.5, 1.0));
        assert!(ProfileTable::parse_csv("x,y\n1,2\n").is_err());
        assert!(ProfileTable::parse_csv("t,alpha\n1.0,0.5\n0.5,0.25\n").is_err());
        assert!(ProfileTable::parse_csv("t,alpha\n0.5,0.25\n1.0,abc\n").is_err());
    }
}
