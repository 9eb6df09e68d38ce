use std::f64::consts::TAU;

use nalgebra::{DMatrix, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;

use super::sphere::{move_along, SpherePoint};
use crate::error::{ensure_finite, Error, Result};
use crate::nctorus::SkewForm;
use crate::numkit::{central_diff, derivative_along, Tolerances};

const TANGENCY_TOLERANCE: f64 = 1e-12;

/// A tangent vector `u` at `base`, both in ambient coordinates (`R^n` for the
/// torus, `R^3` for the sphere).
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVec {
    pub base: Vec<f64>,
    pub u: Vec<f64>,
}

impl TangentVec {
    pub fn torus(base: Vec<f64>, u: Vec<f64>) -> Result<Self> {
        if base.len() != u.len() {
            return Err(Error::DimensionMismatch { expected: base.len(), got: u.len() });
        }
        Ok(Self { base, u })
    }

    /// Requires `<p, u> = 0` to within 1e-12.
    pub fn sphere(p: &SpherePoint, u: [f64; 3]) -> Result<Self> {
        let dot = p.vector().dot(&Vector3::from(u));
        if dot.abs() > TANGENCY_TOLERANCE {
            return Err(Error::Domain(format!("u is not tangent at p (<p, u> = {dot:e})")));
        }
        Ok(Self { base: p.to_array().to_vec(), u: u.to_vec() })
    }

    pub fn norm(&self) -> f64 {
        self.u.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Base point and fiber vector as sphere data.
    pub fn sphere_parts(&self) -> Result<(SpherePoint, Vector3<f64>)> {
        if self.base.len() != 3 || self.u.len() != 3 {
            return Err(Error::DimensionMismatch { expected: 3, got: self.base.len() });
        }
        let p = SpherePoint::new([self.base[0], self.base[1], self.base[2]])?;
        Ok((p, Vector3::new(self.u[0], self.u[1], self.u[2])))
    }
}

/// A Poisson manifold with a torsion-free connection whose parallel
/// transport is known in closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum PoissonGeometry {
    /// `R^n / 2 pi Z^n` with a constant bivector and the flat connection.
    FlatTorus(SkewForm),
    /// The unit sphere with its area bivector and the Levi-Civita connection.
    /// In a positively oriented orthonormal frame `(e1, e2)` the bivector is
    /// `e1 ^ e2`, i.e. `eta_p(a, b) = <p, a x b>`; equivalently
    /// `u ^ (p x u) / |u|^2` for any non-zero tangent `u`.
    RoundSphere,
}

/// A scalar function on `TP`, called with `(base, u)`.
pub trait TpFunction: Fn(&[f64], &[f64]) -> Result<f64> {}
impl<F: Fn(&[f64], &[f64]) -> Result<f64>> TpFunction for F {}

impl PoissonGeometry {
    /// Length of ambient coordinate vectors.
    pub fn ambient_dim(&self) -> usize {
        match self {
            PoissonGeometry::FlatTorus(eta) => eta.dim(),
            PoissonGeometry::RoundSphere => 3,
        }
    }

    pub fn check(&self, v: &TangentVec) -> Result<()> {
        match self {
            PoissonGeometry::FlatTorus(eta) => {
                if v.base.len() != eta.dim() || v.u.len() != eta.dim() {
                    return Err(Error::DimensionMismatch { expected: eta.dim(), got: v.base.len() });
                }
            }
            PoissonGeometry::RoundSphere => {
                let (p, u) = v.sphere_parts()?;
                let dot = p.vector().dot(&u);
                if dot.abs() > TANGENCY_TOLERANCE * u.norm().max(1.0) {
                    return Err(Error::Domain(format!("u is not tangent at p (<p, u> = {dot:e})")));
                }
            }
        }
        if v.base.iter().chain(&v.u).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { context: "tangent vector".into() });
        }
        Ok(())
    }

    /// Orthonormal frame of the tangent space at `base`.
    pub fn frame(&self, base: &[f64]) -> Result<Vec<Vec<f64>>> {
        match self {
            PoissonGeometry::FlatTorus(eta) => Ok((0..eta.dim())
                .map(|i| {
                    let mut e = vec![0.0; eta.dim()];
                    e[i] = 1.0;
                    e
                })
                .collect()),
            PoissonGeometry::RoundSphere => {
                let p = SpherePoint::new([base[0], base[1], base[2]])?;
                Ok(p.tangent_frame().iter().map(|e| e.as_slice().to_vec()).collect())
            }
        }
    }

    /// `eta_x(a, b)` for ambient covectors `a`, `b` at `x`.
    pub fn eta_pair(&self, base: &[f64], a: &[f64], b: &[f64]) -> f64 {
        match self {
            PoissonGeometry::FlatTorus(eta) => {
                let m = eta.matrix();
                let n = eta.dim();
                let mut acc = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        acc += a[i] * m[(i, j)] * b[j];
                    }
                }
                acc
            }
            PoissonGeometry::RoundSphere => {
                let (p, a, b) = (Vector3::from_column_slice(base), Vector3::from_column_slice(a), Vector3::from_column_slice(b));
                p.dot(&a.cross(&b))
            }
        }
    }

    /// Moves `base` for time `t` along the geodesic with initial velocity `d`,
    /// parallel transporting each of `ws`.
    pub fn transport(&self, base: &[f64], d: &[f64], t: f64, ws: &[&[f64]]) -> (Vec<f64>, Vec<Vec<f64>>) {
        match self {
            PoissonGeometry::FlatTorus(_) => {
                let moved = base.iter().zip(d).map(|(x, v)| x + t * v).collect();
                (moved, ws.iter().map(|w| w.to_vec()).collect())
            }
            PoissonGeometry::RoundSphere => {
                let p = SpherePoint::from_unit(Vector3::from_column_slice(base));
                let vs: Vec<Vector3<f64>> = ws.iter().map(|w| Vector3::from_column_slice(w)).collect();
                let (q, moved) = move_along(&p, &Vector3::from_column_slice(d), t, &vs);
                (q.to_array().to_vec(), moved.iter().map(|w| w.as_slice().to_vec()).collect())
            }
        }
    }

    /// Components `eta(e_i, e_j)` in the frame at `base`.
    pub fn eta_in_frame(&self, base: &[f64]) -> Result<DMatrix<f64>> {
        let frame = self.frame(base)?;
        let k = frame.len();
        Ok(DMatrix::from_fn(k, k, |i, j| self.eta_pair(base, &frame[i], &frame[j])))
    }

    /// `{f, g}_P(x)` for ambient test functions, gradients by finite differences.
    pub fn poisson_bracket<F, G>(&self, f: F, g: G, x: &[f64], tol: &Tolerances) -> Result<f64>
    where
        F: Fn(&[f64]) -> f64,
        G: Fn(&[f64]) -> f64,
    {
        let n = self.ambient_dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: x.len() });
        }
        let grad = |h: &dyn Fn(&[f64]) -> f64| -> Result<Vec<f64>> {
            (0..n)
                .map(|i| {
                    let mut e = vec![0.0; n];
                    e[i] = 1.0;
                    central_diff(h, x, &e, tol.fd_step)
                })
                .collect()
        };
        let value = self.eta_pair(x, &grad(&f)?, &grad(&g)?);
        ensure_finite(value, || format!("Poisson bracket at {x:?}"))
    }

    /// Draws a tangent vector of norm `unorm` at a uniformly random base point.
    pub fn sample_tangent<R: Rng>(&self, rng: &mut R, unorm: f64) -> TangentVec {
        match self {
            PoissonGeometry::FlatTorus(eta) => {
                let n = eta.dim();
                let base = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
                let dir = loop {
                    let d: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                    let len = d.iter().map(|x: &f64| x * x).sum::<f64>().sqrt();
                    if len > 1e-8 {
                        break d.into_iter().map(|x| x / len).collect::<Vec<_>>();
                    }
                };
                TangentVec { base, u: dir.into_iter().map(|x| x * unorm).collect() }
            }
            PoissonGeometry::RoundSphere => {
                let p = loop {
                    let v: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
                    if let Ok(p) = SpherePoint::normalized(v) {
                        break p;
                    }
                };
                let [e1, e2] = p.tangent_frame();
                let theta = rng.random_range(0.0..TAU);
                let u = (e1 * theta.cos() + e2 * theta.sin()) * unorm;
                TangentVec { base: p.to_array().to_vec(), u: u.as_slice().to_vec() }
            }
        }
    }
}

/// Vertical derivative of the bivector at `v`: the derivative of the
/// transported-back components of `eta` along the geodesic in direction
/// `u / |u|`, scaled by `|u|`. Components are in the frame at the base.
pub fn vertical_derivative_eta(v: &TangentVec, geom: &PoissonGeometry, tol: &Tolerances) -> Result<DMatrix<f64>> {
    geom.check(v)?;
    let frame = geom.frame(&v.base)?;
    let k = frame.len();
    let norm = v.norm();
    if norm == 0.0 || matches!(geom, PoissonGeometry::FlatTorus(_)) {
        return Ok(DMatrix::zeros(k, k));
    }
    let dir: Vec<f64> = v.u.iter().map(|x| x / norm).collect();
    let refs: Vec<&[f64]> = frame.iter().map(Vec::as_slice).collect();
    let mut out = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            out[(i, j)] = norm
                * derivative_along(
                    |t| {
                        let (x, moved) = geom.transport(&v.base, &dir, t, &refs);
                        Ok(geom.eta_pair(&x, &moved[i], &moved[j]))
                    },
                    tol.fd_step,
                )?;
        }
    }
    Ok(out)
}

fn vertical_partials(f: &impl TpFunction, v: &TangentVec, frame: &[Vec<f64>], step: f64) -> Result<Vec<f64>> {
    frame
        .iter()
        .map(|e| {
            derivative_along(
                |t| {
                    let u: Vec<f64> = v.u.iter().zip(e).map(|(a, b)| a + t * b).collect();
                    f(&v.base, &u)
                },
                step,
            )
        })
        .collect()
}

fn horizontal_partials(
    f: &impl TpFunction,
    v: &TangentVec,
    frame: &[Vec<f64>],
    geom: &PoissonGeometry,
    step: f64,
) -> Result<Vec<f64>> {
    frame
        .iter()
        .map(|e| {
            derivative_along(
                |t| {
                    let (x, moved) = geom.transport(&v.base, e, t, &[&v.u]);
                    f(&x, &moved[0])
                },
                step,
            )
        })
        .collect()
}

/// The bracket on `TP` induced by the connection:
///
/// ```text
/// {f, g}(v) = <D eta(v), d1 f ^ d1 g> + <eta(x), d1 f ^ d2 g - d1 g ^ d2 f>
/// ```
///
/// with `d1` the fiber derivative and `d2` the horizontal derivative.
pub fn tp_bracket(
    f: impl TpFunction,
    g: impl TpFunction,
    v: &TangentVec,
    geom: &PoissonGeometry,
    tol: &Tolerances,
) -> Result<f64> {
    geom.check(v)?;
    let frame = geom.frame(&v.base)?;
    let h = tol.fd_step;
    let (d1f, d1g) = (vertical_partials(&f, v, &frame, h)?, vertical_partials(&g, v, &frame, h)?);
    let (d2f, d2g) = (
        horizontal_partials(&f, v, &frame, geom, h)?,
        horizontal_partials(&g, v, &frame, geom, h)?,
    );
    let eta = geom.eta_in_frame(&v.base)?;
    let deta = vertical_derivative_eta(v, geom, tol)?;
    let k = frame.len();
    let mut acc = 0.0;
    for i in 0..k {
        for j in 0..k {
            acc += deta[(i, j)] * d1f[i] * d1g[j] + eta[(i, j)] * (d1f[i] * d2g[j] - d1g[i] * d2f[j]);
        }
    }
    ensure_finite(acc, || format!("TP bracket at {v:?}"))
}

pub type ScalarFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A named scalar function on the ambient space of `P`.
pub struct TestFunction {
    pub name: String,
    pub f: ScalarFn,
}

/// Test functions whose differentials span every cotangent space: real and
/// imaginary parts of the coordinate characters on the torus, ambient
/// coordinates on the sphere.
pub fn test_functions(geom: &PoissonGeometry) -> Vec<TestFunction> {
    match geom {
        PoissonGeometry::FlatTorus(eta) => (0..eta.dim())
            .flat_map(|i| {
                [
                    TestFunction { name: format!("cos q{}", i + 1), f: Box::new(move |q: &[f64]| q[i].cos()) },
                    TestFunction { name: format!("sin q{}", i + 1), f: Box::new(move |q: &[f64]| q[i].sin()) },
                ]
            })
            .collect(),
        PoissonGeometry::RoundSphere => ["x", "y", "z"]
            .iter()
            .enumerate()
            .map(|(i, name)| TestFunction { name: name.to_string(), f: Box::new(move |x: &[f64]| x[i]) })
            .collect(),
    }
}

/// `|{f o pi, g o pi}_TP(v) - {f, g}_P(pi(v))|`.
pub fn poisson_map_residual<P, F, G>(
    pi: &P,
    v: &TangentVec,
    geom: &PoissonGeometry,
    f: F,
    g: G,
    tol: &Tolerances,
) -> Result<f64>
where
    P: Fn(&[f64], &[f64]) -> Result<Vec<f64>>,
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> f64,
{
    let pf = |x: &[f64], u: &[f64]| Ok(f(&pi(x, u)?));
    let pg = |x: &[f64], u: &[f64]| Ok(g(&pi(x, u)?));
    let lhs = tp_bracket(pf, pg, v, geom, tol)?;
    let rhs = geom.poisson_bracket(&f, &g, &pi(&v.base, &v.u)?, tol)?;
    Ok((lhs - rhs).abs())
}

/// Maximum of [`poisson_map_residual`] over all pairs of [`test_functions`].
pub fn residual_battery<P>(pi: &P, v: &TangentVec, geom: &PoissonGeometry, tol: &Tolerances) -> Result<f64>
where
    P: Fn(&[f64], &[f64]) -> Result<Vec<f64>>,
{
    let fns = test_functions(geom);
    let mut worst: f64 = 0.0;
    for (i, a) in fns.iter().enumerate() {
        for b in &fns[i + 1..] {
            worst = worst.max(poisson_map_residual(pi, v, geom, &a.f, &b.f, tol)?);
        }
    }
    Ok(worst)
}
