use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::{AlgebroidChart, FiberPolynomial, StructureTensor};
use crate::error::{ensure_finite, Error, Result};
use crate::numkit::{derivative_along, Tolerances};

/// A point `(u, Z)` of the dual bundle in a local chart.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub u: Vec<f64>,
    pub z: Vec<f64>,
}

impl PhasePoint {
    pub fn new(u: Vec<f64>, z: Vec<f64>) -> Self {
        Self { u, z }
    }
}

type PhaseFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// Argument of the bracket: either a fiber polynomial or an opaque callable
/// `(u, Z) -> value`.
#[derive(Clone)]
pub enum Observable {
    Poly(FiberPolynomial),
    Func(PhaseFn),
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::Poly(p) => f.debug_tuple("Poly").field(p).finish(),
            Observable::Func(_) => f.write_str("Func(..)"),
        }
    }
}

impl Observable {
    pub fn func(f: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Observable::Func(Arc::new(f))
    }

    pub fn eval(&self, u: &[f64], z: &[f64]) -> f64 {
        match self {
            Observable::Poly(p) => p.eval(u, z),
            Observable::Func(f) => f(u, z),
        }
    }
}

impl From<FiberPolynomial> for Observable {
    fn from(p: FiberPolynomial) -> Self {
        Observable::Poly(p)
    }
}

/// Minimal ring interface needed to assemble the bracket, so the same
/// formula serves numeric values and symbolic fiber polynomials.
pub trait BracketRing: Clone {
    fn zero_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, s: f64) -> Self;
}

impl BracketRing for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
}

impl BracketRing for FiberPolynomial {
    fn zero_like(&self) -> Self {
        FiberPolynomial::zero(self.base_dim(), self.fiber_dim())
    }
    fn add(&self, other: &Self) -> Self {
        FiberPolynomial::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        FiberPolynomial::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        FiberPolynomial::mul(self, other)
    }
    fn scale(&self, s: f64) -> Self {
        FiberPolynomial::scale(self, s)
    }
}

/// First derivatives of an observable: `dF/dZ_k` and `dF/du_h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient<T> {
    pub fiber: Vec<T>,
    pub base: Vec<T>,
}

/// The Lie-Poisson bracket in local coordinates:
///
/// ```text
/// {F,G}(u,Z) = sum_{k,h,j} dF/dZ_k dG/dZ_h (B^j_{hk} - B^j_{kh}) Z_j
///            + sum_{k,h} (dF/dZ_k dG/du_h - dF/du_h dG/dZ_k) rho_{hk}
/// ```
///
/// This is the single place where the orientation of the bracket is fixed;
/// every other bracket in the crate is derived from it.
#[allow(clippy::needless_range_loop)]
pub fn assemble_bracket<T: BracketRing>(
    df: &Gradient<T>,
    dg: &Gradient<T>,
    fiber_coordinates: &[T],
    b: &StructureTensor,
    rho: &DMatrix<f64>,
) -> T {
    let n = b.n();
    let m = rho.nrows();
    let mut acc = df.fiber[0].zero_like();
    for k in 0..n {
        for h in 0..n {
            for j in 0..n {
                let c = b.get(j, h, k) - b.get(j, k, h);
                if c != 0.0 {
                    let term = df.fiber[k].mul(&dg.fiber[h]).mul(&fiber_coordinates[j]);
                    acc = acc.add(&term.scale(c));
                }
            }
        }
    }
    for k in 0..n {
        for h in 0..m {
            let r = rho[(h, k)];
            if r != 0.0 {
                let term = df.fiber[k].mul(&dg.base[h]).sub(&df.base[h].mul(&dg.fiber[k]));
                acc = acc.add(&term.scale(r));
            }
        }
    }
    acc
}

fn unit(dim: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[i] = 1.0;
    e
}

/// Gradient of `obs` at `point`: exact for fiber polynomials with polynomial
/// coefficients, fourth-order finite differences otherwise.
pub fn gradient(obs: &Observable, point: &PhasePoint, tol: &Tolerances) -> Result<Gradient<f64>> {
    let (u, z) = (&point.u, &point.z);
    if let Observable::Poly(p) = obs {
        p.check_shape(u.len(), z.len())?;
        if p.is_exact() {
            let fiber = (0..z.len()).map(|k| p.fiber_partial(k).eval(u, z)).collect();
            let base = (0..u.len())
                .map(|h| p.base_partial(h).expect("exact").eval(u, z))
                .collect();
            return Ok(Gradient { fiber, base });
        }
    }
    let fiber = (0..z.len())
        .map(|k| {
            let e = unit(z.len(), k);
            derivative_along(
                |t| {
                    let zt: Vec<f64> = z.iter().zip(&e).map(|(a, d)| a + t * d).collect();
                    Ok(obs.eval(u, &zt))
                },
                tol.fd_step,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let base = (0..u.len())
        .map(|h| {
            let e = unit(u.len(), h);
            derivative_along(
                |t| {
                    let ut: Vec<f64> = u.iter().zip(&e).map(|(a, d)| a + t * d).collect();
                    Ok(obs.eval(&ut, z))
                },
                tol.fd_step,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Gradient { fiber, base })
}

fn check_point(point: &PhasePoint, chart: &AlgebroidChart) -> Result<()> {
    if point.z.len() != chart.fiber_dim() {
        return Err(Error::DimensionMismatch {
            expected: chart.fiber_dim(),
            got: point.z.len(),
        });
    }
    if point.u.len() != chart.base_dim() {
        return Err(Error::DimensionMismatch {
            expected: chart.base_dim(),
            got: point.u.len(),
        });
    }
    Ok(())
}

/// `{F, G}(u, Z)` for the algebroid described by `chart`.
pub fn lie_poisson_bracket(
    f: &Observable,
    g: &Observable,
    point: &PhasePoint,
    chart: &AlgebroidChart,
    tol: &Tolerances,
) -> Result<f64> {
    check_point(point, chart)?;
    let (b, rho) = chart.at(&point.u)?;
    let df = gradient(f, point, tol)?;
    let dg = gradient(g, point, tol)?;
    let value = assemble_bracket(&df, &dg, &point.z, &b, &rho);
    ensure_finite(value, || format!("bracket at {point:?}"))
}

/// `{F, G}` as a fiber polynomial. Requires a constant chart and
/// polynomial coefficients.
pub fn symbolic_bracket(
    f: &FiberPolynomial,
    g: &FiberPolynomial,
    chart: &AlgebroidChart,
) -> Result<FiberPolynomial> {
    if !chart.is_constant() {
        return Err(Error::UnsupportedSymbol(
            "symbolic brackets need a constant chart".into(),
        ));
    }
    let (m, n) = (chart.base_dim(), chart.fiber_dim());
    f.check_shape(m, n)?;
    g.check_shape(m, n)?;
    let grad = |p: &FiberPolynomial| -> Result<Gradient<FiberPolynomial>> {
        let base = (0..m)
            .map(|h| {
                p.base_partial(h).ok_or_else(|| {
                    Error::UnsupportedSymbol("coefficient is not a polynomial".into())
                })
            })
            .collect::<Result<_>>()?;
        Ok(Gradient {
            fiber: (0..n).map(|k| p.fiber_partial(k)).collect(),
            base,
        })
    };
    let coords: Vec<FiberPolynomial> = (0..n)
        .map(|j| FiberPolynomial::fiber_coordinate(m, n, j))
        .collect();
    let (b, rho) = chart.at(&vec![0.0; m])?;
    Ok(assemble_bracket(&grad(f)?, &grad(g)?, &coords, &b, &rho))
}

/// `|{F,{G,H}} + {G,{H,F}} + {H,{F,G}}|` at `point`.
///
/// Constant charts with polynomial arguments are evaluated symbolically and
/// exactly; everything else nests finite-difference brackets.
pub fn jacobi_residual(
    chart: &AlgebroidChart,
    f: &FiberPolynomial,
    g: &FiberPolynomial,
    h: &FiberPolynomial,
    point: &PhasePoint,
    tol: &Tolerances,
) -> Result<f64> {
    check_point(point, chart)?;
    if chart.is_constant() && f.is_exact() && g.is_exact() && h.is_exact() {
        let cyc = |a: &FiberPolynomial, b: &FiberPolynomial, c: &FiberPolynomial| {
            symbolic_bracket(a, &symbolic_bracket(b, c, chart)?, chart)
        };
        let sum = cyc(f, g, h)?.add(&cyc(g, h, f)?).add(&cyc(h, f, g)?);
        let value = sum.eval(&point.u, &point.z).abs();
        return ensure_finite(value, || format!("Jacobi residual at {point:?}"));
    }
    let nested = |a: &FiberPolynomial, b: &FiberPolynomial, c: &FiberPolynomial| -> Result<f64> {
        let inner = {
            let (b, c) = (Observable::Poly(b.clone()), Observable::Poly(c.clone()));
            let chart = chart.clone();
            let tol = *tol;
            Observable::func(move |u, z| {
                lie_poisson_bracket(&b, &c, &PhasePoint::new(u.to_vec(), z.to_vec()), &chart, &tol)
                    .unwrap_or(f64::NAN)
            })
        };
        lie_poisson_bracket(&Observable::Poly(a.clone()), &inner, point, chart, tol)
    };
    let value = (nested(f, g, h)? + nested(g, h, f)? + nested(h, f, g)?).abs();
    ensure_finite(value, || format!("Jacobi residual at {point:?}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liepoisson::{BasePoly, Coefficient};
    use proptest::prelude::*;

    fn so3_chart(eps: f64) -> AlgebroidChart {
        // B^3_{12} = 1 + eps, B^1_{23} = 1, B^2_{31} = 1 (0-based indices below)
        let b = StructureTensor::zeros(3)
            .with(2, 0, 1, 1.0 + eps)
            .with(0, 1, 2, 1.0)
            .with(1, 2, 0, 1.0);
        AlgebroidChart::lie_algebra(b).unwrap()
    }

    fn z(n: usize, j: usize) -> FiberPolynomial {
        FiberPolynomial::fiber_coordinate(0, n, j)
    }

    #[test]
    fn canonical_pair_on_the_line() {
        let chart = AlgebroidChart::tangent(1).unwrap();
        let f = Observable::Poly(FiberPolynomial::fiber_coordinate(1, 1, 0));
        let g = Observable::Poly(FiberPolynomial::base_coordinate(1, 1, 0));
        for (u, zz) in [(0.0, 0.0), (1.5, -2.0), (-3.0, 7.0)] {
            let v = lie_poisson_bracket(&f, &g, &PhasePoint::new(vec![u], vec![zz]), &chart, &Tolerances::default())
                .unwrap();
            assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn bracket_with_itself_vanishes() {
        let chart = so3_chart(0.0);
        let f = Observable::func(|_, z| z[0] * z[1].sin() + z[2].powi(3));
        let v = lie_poisson_bracket(&f, &f, &PhasePoint::new(vec![], vec![0.3, -1.2, 0.8]), &chart, &Tolerances::default())
            .unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn so3_coordinate_bracket() {
        let chart = so3_chart(0.0);
        let p = PhasePoint::new(vec![], vec![0.4, -0.7, 2.5]);
        let v = lie_poisson_bracket(&z(3, 0).into(), &z(3, 1).into(), &p, &chart, &Tolerances::default()).unwrap();
        assert_eq!(v, -2.5);
        let sym = symbolic_bracket(&z(3, 0), &z(3, 1), &chart).unwrap();
        assert!(sym.sub(&z(3, 2).scale(-1.0)).is_zero());
    }

    #[test]
    fn jacobi_for_so3_and_abelian() {
        let tol = Tolerances::default();
        let p = PhasePoint::new(vec![], vec![1.0, -2.0, 0.5]);
        let chart = so3_chart(0.0);
        let r = jacobi_residual(&chart, &z(3, 0), &z(3, 1), &z(3, 2), &p, &tol).unwrap();
        assert!(r < 1e-9);

        let abelian = AlgebroidChart::abelian(2, 2).unwrap();
        let p = PhasePoint::new(vec![0.1, 0.2], vec![0.3, 0.4]);
        let f = FiberPolynomial::fiber_coordinate(2, 2, 0).mul(&FiberPolynomial::base_coordinate(2, 2, 1));
        let g = FiberPolynomial::fiber_coordinate(2, 2, 1);
        let h = FiberPolynomial::base_coordinate(2, 2, 0);
        assert_eq!(jacobi_residual(&abelian, &f, &g, &h, &p, &tol).unwrap(), 0.0);
    }

    #[test]
    fn rescaled_structure_constants_still_satisfy_jacobi() {
        // [e1,e2] = 1.1 e3 with the other two relations unchanged is still a
        // Lie algebra, so the cyclic sum on coordinates is identically zero.
        let p = PhasePoint::new(vec![], vec![1.0, 1.0, 1.0]);
        let r = jacobi_residual(&so3_chart(0.1), &z(3, 0), &z(3, 1), &z(3, 2), &p, &Tolerances::default()).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn non_lie_structure_constants_break_jacobi() {
        // [e1,e2] = e3 + eps e1 violates Jacobi; brute-force cyclic sum
        // evaluates to eps * Z2 at Z = (1,1,1).
        let eps = 0.1;
        let b = StructureTensor::zeros(3)
            .with(2, 0, 1, 1.0)
            .with(0, 1, 2, 1.0)
            .with(1, 2, 0, 1.0)
            .with(0, 0, 1, eps);
        let chart = AlgebroidChart::lie_algebra(b).unwrap();
        let p = PhasePoint::new(vec![], vec![1.0, 1.0, 1.0]);
        let r = jacobi_residual(&chart, &z(3, 0), &z(3, 1), &z(3, 2), &p, &Tolerances::default()).unwrap();
        assert!((r - eps).abs() < 1e-12, "{r}");
        assert!(r > 1e-3);
    }

    #[test]
    fn base_functions_poisson_commute() {
        let chart = AlgebroidChart::tangent(2).unwrap();
        let f = FiberPolynomial::from_base(2, 2, Coefficient::Poly(BasePoly::monomial(vec![2, 1], 1.0)));
        let g = FiberPolynomial::base_coordinate(2, 2, 1);
        let p = PhasePoint::new(vec![0.7, -0.2], vec![5.0, 1.0]);
        let v = lie_poisson_bracket(&f.into(), &g.into(), &p, &chart, &Tolerances::default()).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn exact_and_fd_paths_agree_to_fourth_order() {
        // degree-6 base coefficients give a non-trivial fifth derivative
        let chart = AlgebroidChart::tangent(1).unwrap();
        let f = FiberPolynomial::zero(1, 1)
            .with_term(vec![1], BasePoly::monomial(vec![6], 1.0).into())
            .unwrap();
        let g = FiberPolynomial::zero(1, 1)
            .with_term(vec![2], BasePoly::monomial(vec![5], 0.5).into())
            .unwrap();
        let p = PhasePoint::new(vec![0.9], vec![1.3]);
        let exact = lie_poisson_bracket(&f.clone().into(), &g.clone().into(), &p, &chart, &Tolerances::default()).unwrap();
        let as_func = |q: FiberPolynomial| Observable::func(move |u, z| q.eval(u, z));
        let fd = |h: f64| {
            let tol = Tolerances::default().with_fd_step(h).unwrap();
            lie_poisson_bracket(&as_func(f.clone()), &as_func(g.clone()), &p, &chart, &tol).unwrap()
        };
        let e1 = (fd(0.1) - exact).abs();
        let e2 = (fd(0.05) - exact).abs();
        assert!(e1 > 0.0);
        let ratio = e1 / e2;
        assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
        assert!((fd(1e-3) - exact).abs() < 1e-9);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let chart = AlgebroidChart::tangent(2).unwrap();
        let f = Observable::Poly(FiberPolynomial::fiber_coordinate(2, 2, 0));
        let bad = PhasePoint::new(vec![0.0], vec![0.0, 0.0]);
        assert!(lie_poisson_bracket(&f, &f, &bad, &chart, &Tolerances::default()).is_err());
        let wrong = Observable::Poly(FiberPolynomial::fiber_coordinate(1, 1, 0));
        let p = PhasePoint::new(vec![0.0, 0.0], vec![0.0, 0.0]);
        assert!(lie_poisson_bracket(&wrong, &f, &p, &chart, &Tolerances::default()).is_err());
    }

    #[test]
    fn non_finite_evaluation_is_an_error() {
        let chart = AlgebroidChart::tangent(1).unwrap();
        let f = Observable::func(|_, z| 1.0 / z[0]);
        let g = Observable::Poly(FiberPolynomial::base_coordinate(1, 1, 0));
        let p = PhasePoint::new(vec![0.0], vec![0.0]);
        assert!(lie_poisson_bracket(&f, &g, &p, &chart, &Tolerances::default()).is_err());
    }

    fn random_poly(coeffs: &[f64]) -> FiberPolynomial {
        // terms up to degree 2 in Z over a 1-dim base, polynomial coefficients in u
        let exps = [vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]];
        let mut p = FiberPolynomial::zero(1, 2);
        for (i, alpha) in exps.iter().enumerate() {
            let mut c = BasePoly::constant(1, coeffs[2 * i]);
            c.add_term(vec![1], coeffs[2 * i + 1]);
            p.push(alpha.clone(), c.into()).unwrap();
        }
        p
    }

    fn mixed_chart() -> AlgebroidChart {
        // a 2-dim fiber over a line with non-trivial bracket and anchor
        let b = StructureTensor::zeros(2).with(1, 0, 1, 1.0);
        let rho = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        AlgebroidChart::constant(1, 2, b, rho).unwrap()
    }

    proptest! {
        #[test]
        fn antisymmetry(c1 in prop::collection::vec(-1.0f64..1.0, 12),
                        c2 in prop::collection::vec(-1.0f64..1.0, 12),
                        u in -2.0f64..2.0, z0 in -2.0f64..2.0, z1 in -2.0f64..2.0) {
            let chart = mixed_chart();
            let (f, g) = (Observable::Poly(random_poly(&c1)), Observable::Poly(random_poly(&c2)));
            let p = PhasePoint::new(vec![u], vec![z0, z1]);
            let tol = Tolerances::default();
            let a = lie_poisson_bracket(&f, &g, &p, &chart, &tol).unwrap();
            let b = lie_poisson_bracket(&g, &f, &p, &chart, &tol).unwrap();
            prop_assert!((a + b).abs() < 1e-10);
        }

        #[test]
        fn leibniz_in_fd_mode(c1 in prop::collection::vec(-1.0f64..1.0, 12),
                              c2 in prop::collection::vec(-1.0f64..1.0, 12),
                              c3 in prop::collection::vec(-1.0f64..1.0, 12),
                              u in -1.0f64..1.0, z0 in -1.0f64..1.0, z1 in -1.0f64..1.0) {
            let chart = mixed_chart();
            let (f, g, h) = (random_poly(&c1), random_poly(&c2), random_poly(&c3));
            let as_func = |q: FiberPolynomial| Observable::func(move |u, z| q.eval(u, z));
            let p = PhasePoint::new(vec![u], vec![z0, z1]);
            let tol = Tolerances::default();
            let lhs = lie_poisson_bracket(&as_func(f.mul(&g)), &as_func(h.clone()), &p, &chart, &tol).unwrap();
            let fh = lie_poisson_bracket(&as_func(f.clone()), &as_func(h.clone()), &p, &chart, &tol).unwrap();
            let gh = lie_poisson_bracket(&as_func(g.clone()), &as_func(h), &p, &chart, &tol).unwrap();
            let rhs = f.eval(&p.u, &p.z) * gh + fh * g.eval(&p.u, &p.z);
            prop_assert!((lhs - rhs).abs() < 1e-8, "{} vs {}", lhs, rhs);
        }
    }
}
