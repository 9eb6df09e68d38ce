//! The torus with a constant Poisson structure: its tangent groupoid, the
//! quantised characters, and the induced star product on trigonometric
//! polynomials.

mod groupoid;
mod skew;
mod trigpoly;

use num_complex::Complex64;
use rand::Rng;

pub use groupoid::{compose_quantised, evaluate_quantised, GroupoidPoint, UnscaledArrow};
pub use skew::SkewForm;
pub use trigpoly::TrigPoly;

use crate::error::{Error, Result};

/// Sign `s` in `{g_r, g_s} = s <r, eta s> g_{r+s}`. With the bivector read as
/// `eta(a, b) = a^T eta b`, `d g_r = i r g_r` gives `i^2 = -1`.
pub const BRACKET_ORIENTATION: f64 = -1.0;

/// Sign `s` with `(1/i hbar)[a, b]_star -> s {a, b}` as `hbar -> 0`.
pub const COMMUTATOR_ORIENTATION: f64 = -1.0;

fn check(a: &TrigPoly, b: &TrigPoly, eta: &SkewForm) -> Result<()> {
    a.check_dim(b)?;
    if a.dim() != eta.dim() {
        return Err(Error::DimensionMismatch { expected: eta.dim(), got: a.dim() });
    }
    Ok(())
}

/// `(a * b)_m = sum_{r+s=m} a_r b_s e^{i hbar/2 <r, eta s>}`.
pub fn star(a: &TrigPoly, b: &TrigPoly, eta: &SkewForm, hbar: f64) -> Result<TrigPoly> {
    check(a, b, eta)?;
    a.twisted_product(b, |r, s| Complex64::from_polar(1.0, 0.5 * hbar * eta.pairing(r, s)))
}

/// `a*(r) = conj(a(-r))`.
pub fn involution(a: &TrigPoly) -> TrigPoly {
    TrigPoly::from_terms(a.dim(), a.terms().map(|(r, c)| (r.iter().map(|x| -x).collect(), c.conj())))
        .expect("shape preserved")
}

/// The Poisson bracket of the constant structure `eta`.
pub fn poisson_bracket_const(a: &TrigPoly, b: &TrigPoly, eta: &SkewForm) -> Result<TrigPoly> {
    check(a, b, eta)?;
    a.twisted_product(b, |r, s| Complex64::new(BRACKET_ORIENTATION * eta.pairing(r, s), 0.0))
}

/// `max_m |(1/i hbar)(a*b - b*a)_m - s {a,b}_m|`.
pub fn semiclassical_error(a: &TrigPoly, b: &TrigPoly, eta: &SkewForm, hbar: f64) -> Result<f64> {
    if hbar == 0.0 {
        return Err(Error::ZeroHbar);
    }
    let commutator = star(a, b, eta, hbar)?.sub(&star(b, a, eta, hbar)?)?;
    let scaled = commutator.scale(Complex64::new(0.0, -1.0 / hbar));
    let bracket = poisson_bracket_const(a, b, eta)?.scale(Complex64::new(COMMUTATOR_ORIENTATION, 0.0));
    scaled.max_abs_diff(&bracket)
}

/// `sum_{r,s} |a_r| |b_s| |<r, eta s>|^3 hbar^2 / 24`, an upper bound for
/// [`semiclassical_error`].
pub fn semiclassical_bound(a: &TrigPoly, b: &TrigPoly, eta: &SkewForm, hbar: f64) -> Result<f64> {
    check(a, b, eta)?;
    let mut acc = 0.0;
    for (r, x) in a.terms() {
        for (s, y) in b.terms() {
            acc += x.norm() * y.norm() * eta.pairing(r, s).abs().powi(3);
        }
    }
    Ok(acc * hbar * hbar / 24.0)
}

/// At most `max_modes` modes with `|r|_inf <= max_freq` and coefficients
/// uniform in the unit square.
pub fn random_trig_poly<R: Rng>(rng: &mut R, dim: usize, max_modes: usize, max_freq: i64) -> TrigPoly {
    let count = rng.random_range(1..=max_modes.max(1));
    let terms: Vec<_> = (0..count)
        .map(|_| {
            let r = (0..dim).map(|_| rng.random_range(-max_freq..=max_freq)).collect();
            let c = Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
            (r, c)
        })
        .collect();
    TrigPoly::from_terms(dim, terms).expect("dimensions match")
}

#[cfg(test)]
mod tests {
    use super::{compose_quantised, evaluate_quantised, involution, poisson_bracket_const, random_trig_poly, semiclassical_bound, semiclassical_error, star, Complex64, Error, SkewForm, TrigPoly, BRACKET_ORIENTATION, COMMUTATOR_ORIENTATION};
    use proptest::prelude::*;
    use rand::{Rng as _, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn g(r: &[i64]) -> TrigPoly {
        TrigPoly::character(r.to_vec())
    }

    fn i() -> Complex64 {
        Complex64::new(0.0, 1.0)
    }

    #[test]
    fn star_of_generators() {
        let eta = SkewForm::standard_symplectic();
        let p = star(&g(&[1, 0]), &g(&[0, 1]), &eta, PI).unwrap();
        assert!(p.max_abs_diff(&TrigPoly::monomial(vec![1, 1], i())).unwrap() < 1e-15);
        let sq = star(&g(&[2, -3]), &g(&[2, -3]), &eta, 0.77).unwrap();
        assert_eq!(sq, g(&[4, -6]));
    }

    #[test]
    fn zero_hbar_is_convolution() {
        let eta = SkewForm::standard_symplectic();
        let a = TrigPoly::parse_mode_list("(1,0):1,2;(0,1):-1,0.5", 2).unwrap();
        let b = TrigPoly::parse_mode_list("(1,1):0.5,0;(-1,0):0,1", 2).unwrap();
        let q = [0.4, -1.3];
        let p = star(&a, &b, &eta, 0.0).unwrap();
        assert!((p.eval(&q) - a.eval(&q) * b.eval(&q)).norm() < 1e-14);
        assert_eq!(p, star(&b, &a, &eta, 0.0).unwrap());
    }

    #[test]
    fn unit_is_neutral() {
        let eta = SkewForm::standard_symplectic();
        let a = TrigPoly::parse_mode_list("(1,0):1,2;(0,3):-1,0.5", 2).unwrap();
        assert_eq!(star(&a, &TrigPoly::one(2), &eta, 0.3).unwrap(), a);
        assert_eq!(star(&TrigPoly::one(2), &a, &eta, 0.3).unwrap(), a);
    }

    #[test]
    fn involution_examples() {
        let eta = SkewForm::standard_symplectic();
        assert_eq!(involution(&g(&[2, -1])), g(&[-2, 1]));
        let even = TrigPoly::parse_mode_list("(1,0):2;(-1,0):2;(0,0):1", 2).unwrap();
        assert_eq!(involution(&even), even);
        let (r, s, hbar) = ([1, 2], [-3, 1], 0.4);
        let lhs = involution(&star(&g(&r), &g(&s), &eta, hbar).unwrap());
        let rhs = star(&g(&[3, -1]), &g(&[-1, -2]), &eta, hbar).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-15);
        let c = eta.pairing(&r, &s);
        let expect = TrigPoly::monomial(vec![2, -3], Complex64::from_polar(1.0, -0.5 * hbar * c));
        assert!(lhs.max_abs_diff(&expect).unwrap() < 1e-15);
    }

    #[test]
    fn bracket_examples() {
        let eta = SkewForm::standard_symplectic();
        let b = poisson_bracket_const(&g(&[1, 0]), &g(&[0, 1]), &eta).unwrap();
        assert_eq!(b, TrigPoly::monomial(vec![1, 1], Complex64::new(BRACKET_ORIENTATION, 0.0)));
        assert!(poisson_bracket_const(&g(&[1, 1]), &g(&[1, 1]), &eta).unwrap().is_zero());
        assert!(poisson_bracket_const(&g(&[1, 0]), &g(&[0, 1]), &SkewForm::zero(2)).unwrap().is_zero());
    }

    /// Fixes the bracket orientation from derivatives: for the constant
    /// bivector `sum eta_ij d_i f d_j g` evaluated on characters.
    #[test]
    fn bracket_orientation_from_derivatives() {
        let eta = SkewForm::standard_symplectic();
        let (r, s) = ([1, 0], [0, 1]);
        let q = [0.3, 0.8];
        let h = 1e-4;
        let grad = |r: &[i64]| -> Vec<Complex64> {
            (0..2)
                .map(|k| {
                    let mut qp = q;
                    let mut qm = q;
                    qp[k] += h;
                    qm[k] -= h;
                    (g(r).eval(&qp) - g(r).eval(&qm)) / (2.0 * h)
                })
                .collect()
        };
        let (df, dg) = (grad(&r), grad(&s));
        let mut direct = Complex64::new(0.0, 0.0);
        for (a, dfa) in df.iter().enumerate() {
            for (b, dgb) in dg.iter().enumerate() {
                direct += eta.matrix()[(a, b)] * dfa * dgb;
            }
        }
        let formula = poisson_bracket_const(&g(&r), &g(&s), &eta).unwrap().eval(&q);
        assert!((direct - formula).norm() < 1e-7);
    }

    /// Fixes the commutator orientation: the rescaled star commutator of the
    /// canonical pair must reproduce `s {g_r, g_s}` at small hbar.
    #[test]
    fn commutator_orientation_from_canonical_pair() {
        let eta = SkewForm::standard_symplectic();
        let (a, b) = (g(&[1, 0]), g(&[0, 1]));
        let hbar = 1e-6;
        let comm = star(&a, &b, &eta, hbar).unwrap().sub(&star(&b, &a, &eta, hbar).unwrap()).unwrap();
        let lhs = comm.scale(Complex64::new(0.0, -1.0 / hbar)).coefficient(&[1, 1]);
        let bracket = poisson_bracket_const(&a, &b, &eta).unwrap().coefficient(&[1, 1]);
        let empirical = (lhs / bracket).re.signum();
        assert_eq!(empirical, COMMUTATOR_ORIENTATION);
        assert_eq!(COMMUTATOR_ORIENTATION, crate::weylrn::COMMUTATOR_ORIENTATION);
    }

    #[test]
    fn semiclassical_examples() {
        let eta = SkewForm::standard_symplectic();
        let (a, b) = (g(&[1, 0]), g(&[0, 1]));
        let e = semiclassical_error(&a, &b, &eta, 0.1).unwrap();
        assert!((e - (1.0 - 20.0 * 0.05f64.sin())).abs() < 1e-15);
        assert!(e <= semiclassical_bound(&a, &b, &eta, 0.1).unwrap());
        assert!((e - 0.1f64.powi(2) / 24.0).abs() / e < 1e-3);
        assert_eq!(semiclassical_error(&a, &a, &eta, 0.1).unwrap(), 0.0);
        assert_eq!(semiclassical_error(&a, &b, &SkewForm::zero(2), 0.3).unwrap(), 0.0);
        assert!(matches!(semiclassical_error(&a, &b, &eta, 0.0), Err(Error::ZeroHbar)));
    }

    #[test]
    fn semiclassical_rate_is_quadratic() {
        let eta = SkewForm::standard_symplectic();
        let (r, s) = ([2, 1], [-1, 3]);
        let c = eta.pairing(&r, &s).abs();
        let hbars = [0.1, 0.05, 0.025, 0.0125];
        let errs: Vec<f64> = hbars
            .iter()
            .map(|&h| {
                let e = semiclassical_error(&g(&r), &g(&s), &eta, h).unwrap();
                assert!(e <= c.powi(3) * h * h / 24.0 * (1.0 + 1e-12));
                e
            })
            .collect();
        let slope = crate::numkit::loglog_slope(&hbars, &errs).unwrap();
        assert!((slope - 2.0).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn associativity_on_random_triples() {
        let eta = SkewForm::from_row_major(2, &[0.0, 0.7, -0.7, 0.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (a, b, c) = (
                random_trig_poly(&mut rng, 2, 20, 3),
                random_trig_poly(&mut rng, 2, 20, 3),
                random_trig_poly(&mut rng, 2, 20, 3),
            );
            let hbar = rng.random_range(-2.0..2.0);
            let left = star(&star(&a, &b, &eta, hbar).unwrap(), &c, &eta, hbar).unwrap();
            let right = star(&a, &star(&b, &c, &eta, hbar).unwrap(), &eta, hbar).unwrap();
            assert!(left.max_abs_diff(&right).unwrap() < 1e-12);
        }
    }

    #[test]
    fn groupoid_composition_reproduces_star_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = |hb: f64, u: &[f64], q: &[f64]| {
            Complex64::new(1.0 + u[0] * u[0] + 0.5 * u[1], hb + (q[0] - 2.0 * q[1]).sin())
        };
        for _ in 0..50 {
            let w = rng.random_range(-2.0..2.0);
            let eta = SkewForm::from_row_major(2, &[0.0, w, -w, 0.0]).unwrap();
            let r: Vec<i64> = (0..2).map(|_| rng.random_range(-5..=5)).collect();
            let s: Vec<i64> = (0..2).map(|_| rng.random_range(-5..=5)).collect();
            let hbar = rng.random_range(-1.0..1.0);
            let q: Vec<f64> = (0..2).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
            let composed = compose_quantised(&r, &s, &h, hbar, &q, &eta).unwrap();
            let m: Vec<i64> = r.iter().zip(&s).map(|(a, b)| a + b).collect();
            let single = evaluate_quantised(&m, &h, hbar, &q, &eta).unwrap();
            let phase = star(&g(&r), &g(&s), &eta, hbar).unwrap().coefficient(&m);
            assert!((composed - phase * single).norm() < 1e-12 * single.norm().max(1.0));
        }
    }

    fn arb_poly() -> impl Strategy<Value = TrigPoly> {
        prop::collection::vec(((-3i64..=3, -3i64..=3), -1.0f64..1.0, -1.0f64..1.0), 1..8).prop_map(|v| {
            TrigPoly::from_terms(2, v.into_iter().map(|((x, y), re, im)| (vec![x, y], Complex64::new(re, im))))
                .unwrap()
        })
    }

    proptest! {
        #[test]
        fn star_axioms(a in arb_poly(), b in arb_poly(), hbar in -3.0f64..3.0,
                       w in -2.0f64..2.0, lre in -1.0f64..1.0, lim in -1.0f64..1.0) {
            let eta = SkewForm::from_row_major(2, &[0.0, w, -w, 0.0]).unwrap();
            let lambda = Complex64::new(lre, lim);
            prop_assert_eq!(involution(&involution(&a)), a.clone());
            let lhs = involution(&star(&a, &b, &eta, hbar).unwrap());
            let rhs = star(&involution(&b), &involution(&a), &eta, hbar).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
            let scaled = involution(&a.scale(lambda)).max_abs_diff(&involution(&a).scale(lambda.conj())).unwrap();
            prop_assert!(scaled < 1e-15);
            let tr = star(&involution(&a), &a, &eta, hbar).unwrap().trace();
            let norm2: f64 = a.terms().map(|(_, c)| c.norm_sqr()).sum();
            prop_assert!(tr.re >= 0.0 && (tr.re - norm2).abs() < 1e-12 && tr.im.abs() < 1e-12);
            prop_assert_eq!(star(&a, &b, &eta, 0.0).unwrap(), star(&b, &a, &eta, 0.0).unwrap());
            // support of the product sits inside the Minkowski sum of supports
            for (m, _) in star(&a, &b, &eta, hbar).unwrap().terms() {
                prop_assert!(a.terms().any(|(r, _)| b.terms().any(|(s, _)| r[0] + s[0] == m[0] && r[1] + s[1] == m[1])));
            }
        }

        #[test]
        fn bracket_is_antisymmetric_and_leibniz(a in arb_poly(), b in arb_poly(), c in arb_poly(), w in -2.0f64..2.0) {
            let eta = SkewForm::from_row_major(2, &[0.0, w, -w, 0.0]).unwrap();
            let ab = poisson_bracket_const(&a, &b, &eta).unwrap();
            let ba = poisson_bracket_const(&b, &a, &eta).unwrap();
            prop_assert!(ab.add(&ba).unwrap().terms().all(|(_, z)| z.norm() < 1e-12));
            let prod = star(&a, &b, &eta, 0.0).unwrap();
            let lhs = poisson_bracket_const(&prod, &c, &eta).unwrap();
            let rhs = star(&a, &poisson_bracket_const(&b, &c, &eta).unwrap(), &eta, 0.0).unwrap()
                .add(&star(&poisson_bracket_const(&a, &c, &eta).unwrap(), &b, &eta, 0.0).unwrap()).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-10);
        }
    }
}
