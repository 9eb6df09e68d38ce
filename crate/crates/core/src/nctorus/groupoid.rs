use std::f64::consts::TAU;

use nalgebra::DVector;
use num_complex::Complex64;

use super::SkewForm;
use crate::error::{Error, Result};

const COMPOSABLE_TOLERANCE: f64 = 1e-12;

fn reduce(q: &[f64]) -> Vec<f64> {
    q.iter().map(|x| x.rem_euclid(TAU)).collect()
}

fn circle_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = (x - y).rem_euclid(TAU);
            d.min(TAU - d)
        })
        .fold(0.0, f64::max)
}

/// An arrow `(hbar, u, q)` of the tangent groupoid over the torus, from
/// `(hbar, q)` to `(hbar, q + hbar u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupoidPoint {
    hbar: f64,
    u: Vec<f64>,
    q: Vec<f64>,
}

impl GroupoidPoint {
    /// `q` is reduced to `[0, 2 pi)^n`.
    pub fn new(hbar: f64, u: Vec<f64>, q: &[f64]) -> Result<Self> {
        if u.len() != q.len() {
            return Err(Error::DimensionMismatch { expected: u.len(), got: q.len() });
        }
        if !hbar.is_finite() || u.iter().chain(q).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { context: "groupoid point".into() });
        }
        Ok(Self { hbar, u, q: reduce(q) })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn source(&self) -> (f64, Vec<f64>) {
        (self.hbar, self.q.clone())
    }

    pub fn target(&self) -> (f64, Vec<f64>) {
        let t: Vec<f64> = self.q.iter().zip(&self.u).map(|(q, u)| q + self.hbar * u).collect();
        (self.hbar, reduce(&t))
    }

    /// `x . y`, defined when `source(x) = target(y)`; the result is
    /// `(hbar, u_x + u_y, q_y)`.
    pub fn product(&self, y: &GroupoidPoint) -> Result<GroupoidPoint> {
        if self.u.len() != y.u.len() {
            return Err(Error::DimensionMismatch { expected: self.u.len(), got: y.u.len() });
        }
        let (hs, qs) = self.source();
        let (ht, qt) = y.target();
        let mismatch = (hs - ht).abs().max(circle_distance(&qs, &qt));
        if mismatch > COMPOSABLE_TOLERANCE {
            return Err(Error::NotComposable { mismatch });
        }
        let u = self.u.iter().zip(&y.u).map(|(a, b)| a + b).collect();
        Ok(GroupoidPoint { hbar: y.hbar, u, q: y.q.clone() })
    }
}

/// An arrow `(u, p)` of the un-scaled groupoid `R^n x P`, from `p` to
/// `p + pr2(u)` with `pr2` the projection onto `Im(eta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnscaledArrow {
    pub u: Vec<f64>,
    pub p: Vec<f64>,
}

impl UnscaledArrow {
    pub fn new(u: Vec<f64>, p: &[f64]) -> Result<Self> {
        if u.len() != p.len() {
            return Err(Error::DimensionMismatch { expected: u.len(), got: p.len() });
        }
        Ok(Self { u, p: reduce(p) })
    }

    pub fn source(&self) -> Vec<f64> {
        self.p.clone()
    }

    pub fn target(&self, eta: &SkewForm) -> Vec<f64> {
        let (_, image) = eta.projections();
        let shift = image * DVector::from_column_slice(&self.u);
        reduce(&self.p.iter().zip(shift.iter()).map(|(p, s)| p + s).collect::<Vec<_>>())
    }

    /// `(u, p) . (v, q) = (u + v, p)`, defined when `q = p + pr2(u)`.
    pub fn product(&self, other: &UnscaledArrow, eta: &SkewForm) -> Result<UnscaledArrow> {
        let mismatch = circle_distance(&other.p, &self.target(eta));
        if mismatch > COMPOSABLE_TOLERANCE {
            return Err(Error::NotComposable { mismatch });
        }
        let u = self.u.iter().zip(&other.u).map(|(a, b)| a + b).collect();
        Ok(UnscaledArrow { u, p: self.p.clone() })
    }
}

fn half_eta(eta: &SkewForm, r: &[i64]) -> Vec<f64> {
    let half: Vec<f64> = r.iter().map(|&x| 0.5 * x as f64).collect();
    eta.apply(&half)
}

fn phase(r: &[i64], q: &[f64]) -> Complex64 {
    Complex64::from_polar(1.0, r.iter().zip(q).map(|(&a, &b)| a as f64 * b).sum())
}

/// `Q(f_r)_{hbar,q}(H) = e^{i<r,q>} H(hbar, eta(r/2), q)`, the closed form of
/// the oscillatory integral for the pure character `f_r`.
pub fn evaluate_quantised<H>(r: &[i64], h: &H, hbar: f64, q: &[f64], eta: &SkewForm) -> Result<Complex64>
where
    H: Fn(f64, &[f64], &[f64]) -> Complex64,
{
    if r.len() != eta.dim() || q.len() != eta.dim() {
        return Err(Error::DimensionMismatch { expected: eta.dim(), got: r.len().max(q.len()) });
    }
    let z = GroupoidPoint::new(hbar, half_eta(eta, r), q)?;
    Ok(phase(r, z.q()) * h(hbar, z.u(), z.q()))
}

/// `(Q(f_r) * Q(f_s))_{hbar,q}(H)` computed with the groupoid convolution
/// `(D * E)_q(H) = E_q(z -> D_{t(z)}(H(. z)))`.
pub fn compose_quantised<H>(
    r: &[i64],
    s: &[i64],
    h: &H,
    hbar: f64,
    q: &[f64],
    eta: &SkewForm,
) -> Result<Complex64>
where
    H: Fn(f64, &[f64], &[f64]) -> Complex64,
{
    if r.len() != eta.dim() || s.len() != eta.dim() || q.len() != eta.dim() {
        return Err(Error::DimensionMismatch { expected: eta.dim(), got: r.len() });
    }
    // E = Q(f_s) evaluates its argument at z = (hbar, eta(s/2), q)
    let z = GroupoidPoint::new(hbar, half_eta(eta, s), q)?;
    let (_, tz) = z.target();
    // D = Q(f_r) at t(z) evaluates the right-translated H at x = (hbar, eta(r/2), t(z))
    let x = GroupoidPoint::new(hbar, half_eta(eta, r), &tz)?;
    let xz = x.product(&z)?;
    let inner = phase(r, &tz) * h(hbar, xz.u(), xz.q());
    Ok(phase(s, z.q()) * inner)
}
