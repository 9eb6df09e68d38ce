use nalgebra::{DMatrix, Vector3};

use crate::error::{Error, Result};
use crate::numkit::derivative_along_vec;

const UNIT_TOLERANCE: f64 = 1e-12;
const SERIES_BELOW: f64 = 1e-4;
const CANCELLATION_SERIES_BELOW: f64 = 0.2;
const DOMAIN_TOLERANCE: f64 = 1e-10;

/// `sin t / t`.
pub fn sinc(t: f64) -> f64 {
    if t.abs() < SERIES_BELOW {
        let t2 = t * t;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0
    } else {
        t.sin() / t
    }
}

/// `(cos t - sin t / t) / t^2`. The closed form loses `eps / t^2` to
/// cancellation, so the series is used up to a larger radius than for
/// [`sinc`].
pub fn cos_minus_sinc_over_sq(t: f64) -> f64 {
    if t.abs() < CANCELLATION_SERIES_BELOW {
        // sum_k (-1)^k 2k / (2k+1)! t^(2k-2)
        let t2 = t * t;
        let (mut acc, mut power, mut fact) = (0.0, 1.0, 6.0);
        for k in 1..=7 {
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            acc += sign * (2 * k) as f64 / fact * power;
            power *= t2;
            fact *= ((2 * k + 2) * (2 * k + 3)) as f64;
        }
        acc
    } else {
        (t.cos() - t.sin() / t) / (t * t)
    }
}

/// Derivative of [`sinc`].
pub fn sinc_prime(t: f64) -> f64 {
    t * cos_minus_sinc_over_sq(t)
}

/// A point of the unit sphere in `R^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint(Vector3<f64>);

impl SpherePoint {
    /// Requires `|p| = 1` to within 1e-12.
    pub fn new(p: [f64; 3]) -> Result<Self> {
        let v = Vector3::from(p);
        if !v.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite { context: "sphere point".into() });
        }
        if (v.norm() - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::Domain(format!("|p| = {} is not 1", v.norm())));
        }
        Ok(Self(v))
    }

    /// Normalizes a non-zero vector.
    pub fn normalized(p: [f64; 3]) -> Result<Self> {
        let v = Vector3::from(p);
        let n = v.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Domain("cannot normalize a zero or non-finite vector".into()));
        }
        Ok(Self(v / n))
    }

    pub(crate) fn from_unit(v: Vector3<f64>) -> Self {
        Self(v)
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.0.x, self.0.y, self.0.z]
    }

    /// Positively oriented orthonormal frame `(e1, p x e1)` of the tangent plane.
    pub fn tangent_frame(&self) -> [Vector3<f64>; 2] {
        let p = self.0;
        let axis = (0..3)
            .min_by(|&i, &j| p[i].abs().total_cmp(&p[j].abs()))
            .expect("three axes");
        let mut a = Vector3::zeros();
        a[axis] = 1.0;
        let e1 = (a - p * p.dot(&a)).normalize();
        [e1, p.cross(&e1)]
    }

    /// Projection of an ambient vector onto the tangent plane.
    pub fn project(&self, w: &Vector3<f64>) -> Vector3<f64> {
        w - self.0 * self.0.dot(w)
    }
}

fn check_tangent(p: &SpherePoint, w: &Vector3<f64>, what: &str) -> Result<()> {
    let dot = p.0.dot(w);
    if dot.abs() > DOMAIN_TOLERANCE * w.norm().max(1.0) {
        return Err(Error::Domain(format!("{what} is not tangent at p (<p, {what}> = {dot:e})")));
    }
    Ok(())
}

fn check_chart(u: &Vector3<f64>) -> Result<f64> {
    let l = u.norm();
    if l >= std::f64::consts::PI {
        return Err(Error::OutOfChart { norm: l, limit: std::f64::consts::PI });
    }
    Ok(l)
}

/// `Exp_p(u) = cos|u| p + (sin|u|/|u|) u`.
pub fn exp_sphere(p: &SpherePoint, u: &Vector3<f64>) -> SpherePoint {
    let l = u.norm();
    SpherePoint(p.0 * l.cos() + u * sinc(l))
}

/// Fiber differential `h -> d/ds Exp_p(u + s h)`.
pub fn d1_exp(p: &SpherePoint, u: &Vector3<f64>, h: &Vector3<f64>) -> Result<Vector3<f64>> {
    check_tangent(p, u, "u")?;
    check_tangent(p, h, "h")?;
    let l = check_chart(u)?;
    let uh = u.dot(h);
    Ok((h - p.0 * uh) * sinc(l) + u * (cos_minus_sinc_over_sq(l) * uh))
}

/// Base differential: `eps -> d/ds Exp_{sigma(s)}(transported u)` along the
/// geodesic `sigma` with `sigma'(0) = eps`.
pub fn d2_exp(p: &SpherePoint, u: &Vector3<f64>, eps: &Vector3<f64>) -> Result<Vector3<f64>> {
    check_tangent(p, u, "u")?;
    check_tangent(p, eps, "eps")?;
    let l = check_chart(u)?;
    Ok(eps * l.cos() - p.0 * (sinc(l) * u.dot(eps)))
}

/// Parallel transport of `w` along `sigma(t) = cos t p + sin t eps`.
pub fn parallel_transport_sphere(
    p: &SpherePoint,
    eps: &Vector3<f64>,
    t: f64,
    w: &Vector3<f64>,
) -> Result<Vector3<f64>> {
    if (eps.norm() - 1.0).abs() > DOMAIN_TOLERANCE {
        return Err(Error::Domain(format!("direction has norm {}, expected 1", eps.norm())));
    }
    check_tangent(p, eps, "eps")?;
    check_tangent(p, w, "w")?;
    Ok(transport_unchecked(p, eps, t, w))
}

pub(crate) fn transport_unchecked(p: &SpherePoint, eps: &Vector3<f64>, t: f64, w: &Vector3<f64>) -> Vector3<f64> {
    let n = p.0.cross(eps);
    (eps * t.cos() - p.0 * t.sin()) * w.dot(eps) + n * w.dot(&n)
}

/// Point `Exp_p(t d)` and the transport of each `w` along it; `d = 0` stays put.
pub(crate) fn move_along(
    p: &SpherePoint,
    d: &Vector3<f64>,
    t: f64,
    ws: &[Vector3<f64>],
) -> (SpherePoint, Vec<Vector3<f64>>) {
    let len = d.norm();
    if len == 0.0 {
        return (*p, ws.to_vec());
    }
    let dir = d / len;
    let q = SpherePoint(p.0 * (t * len).cos() + dir * (t * len).sin());
    let moved = ws.iter().map(|w| transport_unchecked(p, &dir, t * len, w)).collect();
    (q, moved)
}

/// `J(1)` for the Jacobi field along `s -> Exp_p(s u)` with `J(0) = horizontal`
/// and `J'(0) = vertical`, solved in a parallel frame (curvature 1).
pub fn jacobi_dexp(
    p: &SpherePoint,
    u: &Vector3<f64>,
    horizontal: &Vector3<f64>,
    vertical: &Vector3<f64>,
) -> Result<Vector3<f64>> {
    check_tangent(p, u, "u")?;
    check_tangent(p, horizontal, "horizontal")?;
    check_tangent(p, vertical, "vertical")?;
    let l = check_chart(u)?;
    let (c, s) = (l.cos(), sinc(l));
    Ok(horizontal * c + vertical * s - p.0 * (s * u.dot(&(horizontal + vertical)))
        + u * (cos_minus_sinc_over_sq(l) * u.dot(vertical)))
}

/// Differential of `Exp` at `(p, u)` as a 3x4 matrix acting on
/// `(horizontal, vertical)` coordinates in the tangent frame at `p`.
pub fn exp_differential(p: &SpherePoint, u: &Vector3<f64>) -> Result<DMatrix<f64>> {
    let [e1, e2] = p.tangent_frame();
    let zero = Vector3::zeros();
    let cols = [
        jacobi_dexp(p, u, &e1, &zero)?,
        jacobi_dexp(p, u, &e2, &zero)?,
        jacobi_dexp(p, u, &zero, &e1)?,
        jacobi_dexp(p, u, &zero, &e2)?,
    ];
    Ok(DMatrix::from_fn(3, 4, |i, j| cols[j][i]))
}

/// Numerical rank with singular values above `threshold * largest`.
pub fn numerical_rank(m: &DMatrix<f64>, threshold: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().copied().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > threshold * top).count()
}

/// Finite-difference derivative of `s -> Exp_{sigma(s)}(transport(u + s vertical))`
/// with `sigma(s) = Exp_p(s horizontal)`: the geodesic variation whose
/// closed form is [`jacobi_dexp`].
pub fn geodesic_variation_fd(
    p: &SpherePoint,
    u: &Vector3<f64>,
    horizontal: &Vector3<f64>,
    vertical: &Vector3<f64>,
    step: f64,
) -> Result<Vector3<f64>> {
    let d = derivative_along_vec(
        |s| {
            let (q, moved) = move_along(p, horizontal, s, &[u + vertical * s]);
            Ok(exp_sphere(&q, &moved[0]).0.as_slice().to_vec())
        },
        step,
    )?;
    Ok(Vector3::new(d[0], d[1], d[2]))
}
