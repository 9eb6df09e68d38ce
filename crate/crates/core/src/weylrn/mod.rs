//! Quantisation of symbols on `T*R^n`, polynomial in the fiber, as
//! differential operators acting on periodic samples.
//!
//! The base `R^n` is replaced by a periodic box, so base coefficients are
//! trigonometric polynomials and derivatives are spectral. `Q(X_k)` is
//! `-i hbar d/dp_k` and a base function acts by multiplication; both are
//! unbounded on the line, which the box sidesteps. The fiber measure is
//! normalized as `dX dxi / (2 pi)^n`, so `Q(1)` is the identity.

mod parse;
mod symbol;

use num_complex::Complex64;

pub use parse::parse_symbol;
pub use symbol::SymbolRn;

use crate::error::{Error, Result};
use crate::liepoisson::{assemble_bracket, AlgebroidChart, Gradient};
use crate::numkit::{dft_modes, inverse_dft, PeriodicGrid};

/// Sign `s` with `s (1/i hbar)[Q f, Q g] -> Q {f, g}`. Operators compose in
/// the usual order here, the reverse of the groupoid convolution order.
pub const COMMUTATOR_ORIENTATION: f64 = -1.0;

/// Spectral coefficients below `SPECTRAL_NOISE_FLOOR * len * eps * max|c|`
/// are treated as rounding noise before differentiation.
const SPECTRAL_NOISE_FLOOR: f64 = 4.0;

/// `sum_alpha a_alpha(p) (-i hbar d_p)^alpha`, coefficients on the left.
#[derive(Debug, Clone)]
pub struct QuantisedOperator {
    hbar: f64,
    grid: PeriodicGrid,
    terms: Vec<(Vec<u32>, Vec<Complex64>)>,
}

impl QuantisedOperator {
    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    /// Applies the operator to samples of `H` on the grid.
    pub fn apply(&self, h: &[Complex64]) -> Result<Vec<Complex64>> {
        self.grid.check_samples(h.len())?;
        let spectrum = dft_modes(&self.grid, h)?;
        // coefficients at the transform's rounding level carry no signal but
        // are amplified by up to (hbar k_max)^|alpha|; drop them
        let top = spectrum.coefficients().iter().map(|c| c.norm()).fold(0.0, f64::max);
        let floor = SPECTRAL_NOISE_FLOOR * h.len() as f64 * f64::EPSILON * top;
        let nyquist = (self.grid.points_per_dim() / 2) as i64;
        let k = self.grid.fundamental();
        let mut out = vec![Complex64::default(); h.len()];
        for (alpha, coeff) in &self.terms {
            let derived = if alpha.iter().all(|&a| a == 0) {
                h.to_vec()
            } else {
                let multiplied = spectrum.map_modes(|m, c| {
                    if c.norm() <= floor {
                        return Complex64::default();
                    }
                    let mut factor = 1.0;
                    for (&mi, &ai) in m.iter().zip(alpha) {
                        // odd derivatives of the unpaired Nyquist mode are not real
                        if mi == nyquist && ai % 2 == 1 {
                            return Complex64::default();
                        }
                        factor *= (self.hbar * k * mi as f64).powi(ai as i32);
                    }
                    c * factor
                });
                inverse_dft(&multiplied)
            };
            for ((o, d), a) in out.iter_mut().zip(derived).zip(coeff) {
                *o += a * d;
            }
        }
        Ok(out)
    }
}

/// Builds `Q_hbar(f)` on `grid`.
pub fn quantise(f: &SymbolRn, hbar: f64, grid: &PeriodicGrid) -> Result<QuantisedOperator> {
    if !hbar.is_finite() {
        return Err(Error::NonFinite { context: "hbar".into() });
    }
    if grid.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: grid.dim() });
    }
    if (grid.period() - f.period()).abs() > 1e-12 * f.period() {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: format!("grid period {} differs from symbol period {}", grid.period(), f.period()),
        });
    }
    let terms = f
        .terms()
        .map(|(alpha, _)| {
            let samples = grid.sample(|p| f.coefficient_at(alpha, p));
            (alpha.to_vec(), samples)
        })
        .collect();
    Ok(QuantisedOperator { hbar, grid: *grid, terms })
}

/// Shorthand for `quantise(f, hbar, grid)?.apply(h)`.
pub fn apply(op: &QuantisedOperator, h: &[Complex64]) -> Result<Vec<Complex64>> {
    op.apply(h)
}

/// `{f, g}` computed by the Lie-Poisson bracket of the tangent algebroid.
pub fn symbol_bracket(f: &SymbolRn, g: &SymbolRn, chart: &AlgebroidChart) -> Result<SymbolRn> {
    let n = f.dim();
    if chart.fiber_dim() != n || chart.base_dim() != n || !chart.is_constant() {
        return Err(Error::InvalidParameter {
            name: "chart",
            reason: format!("expected a constant chart with base and fiber dimension {n}"),
        });
    }
    if g.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: g.dim() });
    }
    let grad = |s: &SymbolRn| Gradient {
        fiber: (0..n).map(|k| s.fiber_partial(k)).collect(),
        base: (0..n).map(|h| s.base_partial(h)).collect(),
    };
    let coords: Vec<SymbolRn> = (0..n).map(|j| SymbolRn::fiber_coordinate(n, f.period(), j)).collect();
    let (b, rho) = chart.at(&vec![0.0; n])?;
    Ok(assemble_bracket(&grad(f), &grad(g), &coords, &b, &rho))
}

/// `|| s (1/i hbar)[Q f, Q g] H - Q({f, g}) H ||_inf`.
pub fn commutator_check(
    f: &SymbolRn,
    g: &SymbolRn,
    hbar: f64,
    h: &[Complex64],
    grid: &PeriodicGrid,
    chart: &AlgebroidChart,
) -> Result<f64> {
    if hbar == 0.0 {
        return Err(Error::ZeroHbar);
    }
    let qf = quantise(f, hbar, grid)?;
    let qg = quantise(g, hbar, grid)?;
    let qb = quantise(&symbol_bracket(f, g, chart)?, hbar, grid)?;
    let fg = qf.apply(&qg.apply(h)?)?;
    let gf = qg.apply(&qf.apply(h)?)?;
    let target = qb.apply(h)?;
    let scale = Complex64::new(0.0, -COMMUTATOR_ORIENTATION / hbar);
    let deviation = fg
        .iter()
        .zip(&gf)
        .zip(&target)
        .map(|((a, b), t)| ((a - b) * scale - t).norm())
        .fold(0.0, f64::max);
    crate::error::ensure_finite(deviation, || format!("commutator deviation at hbar = {hbar}"))
}

/// Samples of `prod_k sum_{|m| <= 4} e^{i m p_k} / (1 + m^2)`, band-limited
/// well inside any grid with at least 16 points per axis.
pub fn band_limited_test_function(grid: &PeriodicGrid) -> Vec<Complex64> {
    let k = grid.fundamental();
    grid.sample(|p| {
        p.iter()
            .map(|&x| {
                (-4..=4i32)
                    .map(|m| Complex64::from_polar(1.0 / (1.0 + (m * m) as f64), k * m as f64 * x))
                    .sum::<Complex64>()
            })
            .product()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nctorus::TrigPoly;
    use std::f64::consts::TAU;

    fn grid1(n: usize) -> PeriodicGrid {
        PeriodicGrid::standard(1, n).unwrap()
    }

    fn x() -> SymbolRn {
        SymbolRn::fiber_coordinate(1, TAU, 0)
    }

    fn wave(grid: &PeriodicGrid, m: &[i64]) -> Vec<Complex64> {
        grid.sample(|p| {
            Complex64::from_polar(1.0, p.iter().zip(m).map(|(a, &b)| a * b as f64).sum())
        })
    }

    fn sup(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn momentum_on_plane_wave() {
        let g = grid1(32);
        let h = wave(&g, &[3]);
        let out = quantise(&x(), 0.5, &g).unwrap().apply(&h).unwrap();
        let expect: Vec<_> = h.iter().map(|v| v * 1.5).collect();
        assert!(sup(&out, &expect) < 1e-12);
    }

    #[test]
    fn eigenrelation_on_a_fine_grid() {
        let g = grid1(64);
        for hbar in [1.0, 0.1] {
            for a in 0..=4u32 {
                let op = quantise(&SymbolRn::zero(1, TAU).with_term(vec![a], TrigPoly::one(1)), hbar, &g).unwrap();
                for m in -16..=16i64 {
                    let h = wave(&g, &[m]);
                    let lambda = (hbar * m as f64).powi(a as i32);
                    let expect: Vec<_> = h.iter().map(|v| v * lambda).collect();
                    assert!(sup(&op.apply(&h).unwrap(), &expect) <= 1e-12 * lambda.abs().max(1.0), "{hbar} {a} {m}");
                }
            }
        }
    }

    #[test]
    fn eigenrelation_up_to_fourth_order() {
        let g = PeriodicGrid::standard(2, 16).unwrap();
        let hbar = 0.7;
        for a0 in 0..=4u32 {
            for a1 in 0..=(4 - a0) {
                let f = SymbolRn::zero(2, TAU).with_term(vec![a0, a1], TrigPoly::one(2));
                let op = quantise(&f, hbar, &g).unwrap();
                for m in [[4, -3], [-4, 1], [0, 2]] {
                    let h = wave(&g, &m);
                    let lambda = (hbar * m[0] as f64).powi(a0 as i32) * (hbar * m[1] as f64).powi(a1 as i32);
                    let expect: Vec<_> = h.iter().map(|v| v * lambda).collect();
                    assert!(sup(&op.apply(&h).unwrap(), &expect) <= 1e-12 * lambda.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn base_function_multiplies() {
        let g = grid1(32);
        let a = SymbolRn::base(TAU, TrigPoly::parse_mode_list("(1):0,1;(-2):0.5,0", 1).unwrap());
        let h = band_limited_test_function(&g);
        for hbar in [0.0, 0.3, 5.0] {
            let out = quantise(&a, hbar, &g).unwrap().apply(&h).unwrap();
            let expect: Vec<_> = g.nodes().zip(&h).map(|(p, v)| a.eval(&p, &[0.0]) * v).collect();
            assert!(sup(&out, &expect) < 1e-13);
        }
    }

    #[test]
    fn identity_and_constants() {
        let g = grid1(16);
        let h = band_limited_test_function(&g);
        let one = SymbolRn::constant(1, TAU, Complex64::new(1.0, 0.0));
        assert!(sup(&quantise(&one, 0.2, &g).unwrap().apply(&h).unwrap(), &h) < 1e-15);
        let x2 = x().try_mul(&x()).unwrap();
        let c = vec![Complex64::new(2.0, 0.0); g.len()];
        let out = quantise(&x2, 0.4, &g).unwrap().apply(&c).unwrap();
        assert!(out.iter().all(|v| v.norm() < 1e-14));
    }

    #[test]
    fn square_of_momentum() {
        let g = grid1(32);
        let (hbar, m) = (0.3, 5);
        let h = wave(&g, &[m]);
        let q = quantise(&x(), hbar, &g).unwrap();
        let twice = q.apply(&q.apply(&h).unwrap()).unwrap();
        let lambda = (hbar * m as f64).powi(2);
        let expect: Vec<_> = h.iter().map(|v| v * lambda).collect();
        assert!(sup(&twice, &expect) < 1e-12);
    }

    #[test]
    fn momentum_parity() {
        let g = grid1(32);
        let h: Vec<Complex64> = g.sample(|p| Complex64::new(p[0].cos() + 0.3 * (2.0 * p[0]).cos(), 0.0));
        let out = quantise(&x(), 1.0, &g).unwrap().apply(&h).unwrap();
        let n = g.len();
        for i in 0..n {
            assert!(out[i].re.abs() < 1e-13);
            assert!((out[i] + out[(n - i) % n]).norm() < 1e-13);
        }
    }

    #[test]
    fn zero_hbar_limit_is_multiplicative() {
        let g = grid1(32);
        let h = band_limited_test_function(&g);
        let f = parse_symbol("e(p)*X^2 + 3*cos(2*p) - i*X", 1, TAU).unwrap();
        let gg = parse_symbol("sin(p)*X + 0.5", 1, TAU).unwrap();
        let qf = quantise(&f, 0.0, &g).unwrap();
        let qg = quantise(&gg, 0.0, &g).unwrap();
        let qfg = quantise(&f.try_mul(&gg).unwrap(), 0.0, &g).unwrap();
        let lhs = qf.apply(&qg.apply(&h).unwrap()).unwrap();
        assert!(sup(&lhs, &qfg.apply(&h).unwrap()) < 1e-12);
        let expect: Vec<_> = g.nodes().zip(&h).map(|(p, v)| f.eval(&p, &[0.0]) * v).collect();
        assert!(sup(&qf.apply(&h).unwrap(), &expect) < 1e-12);
    }

    #[test]
    fn quantise_is_linear() {
        let g = grid1(32);
        let h = band_limited_test_function(&g);
        let f = parse_symbol("cos(p)*X^2 + X", 1, TAU).unwrap();
        let gg = parse_symbol("e(-p)*X^3 - 2", 1, TAU).unwrap();
        let sum = f.try_add(&gg.scale_complex(Complex64::new(0.5, -1.0))).unwrap();
        let hbar = 0.37;
        let lhs = quantise(&sum, hbar, &g).unwrap().apply(&h).unwrap();
        let a = quantise(&f, hbar, &g).unwrap().apply(&h).unwrap();
        let b = quantise(&gg, hbar, &g).unwrap().apply(&h).unwrap();
        let rhs: Vec<_> = a.iter().zip(&b).map(|(x, y)| x + y * Complex64::new(0.5, -1.0)).collect();
        assert!(sup(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn canonical_pair_is_exact() {
        let g = grid1(64);
        let h = band_limited_test_function(&g);
        let chart = AlgebroidChart::tangent(1).unwrap();
        let a = SymbolRn::base(TAU, TrigPoly::character(vec![1]));
        for hbar in [1.0, 0.1, 0.01] {
            let d = commutator_check(&x(), &a, hbar, &h, &g, &chart).unwrap();
            assert!(d <= 1e-10, "hbar {hbar}: {d}");
            assert_eq!(commutator_check(&x(), &x(), hbar, &h, &g, &chart).unwrap(), 0.0);
        }
    }

    /// With the opposite sign the canonical pair misses by twice the bracket.
    #[test]
    fn orientation_is_pinned_by_canonical_pair() {
        let g = grid1(32);
        let h = band_limited_test_function(&g);
        let chart = AlgebroidChart::tangent(1).unwrap();
        let a = SymbolRn::base(TAU, TrigPoly::character(vec![1]));
        let hbar = 0.5;
        let qx = quantise(&x(), hbar, &g).unwrap();
        let qa = quantise(&a, hbar, &g).unwrap();
        let comm: Vec<_> = qx
            .apply(&qa.apply(&h).unwrap())
            .unwrap()
            .iter()
            .zip(qa.apply(&qx.apply(&h).unwrap()).unwrap())
            .map(|(u, v)| (u - v) / Complex64::new(0.0, hbar))
            .collect();
        let target = quantise(&symbol_bracket(&x(), &a, &chart).unwrap(), hbar, &g)
            .unwrap()
            .apply(&h)
            .unwrap();
        let plus: Vec<_> = comm.clone();
        let minus: Vec<_> = comm.iter().map(|v| -v).collect();
        let empirical = if sup(&plus, &target) < sup(&minus, &target) { 1.0 } else { -1.0 };
        assert_eq!(empirical, COMMUTATOR_ORIENTATION);
    }

    #[test]
    fn quadratic_symbol_has_first_order_remainder() {
        let g = grid1(64);
        let h = band_limited_test_function(&g);
        let chart = AlgebroidChart::tangent(1).unwrap();
        let f = x().try_mul(&x()).unwrap();
        let s = parse_symbol("sin(p)", 1, TAU).unwrap();
        let hbars = [0.1, 0.05, 0.025];
        let devs: Vec<f64> = hbars
            .iter()
            .map(|&hb| commutator_check(&f, &s, hb, &h, &g, &chart).unwrap())
            .collect();
        let slope = crate::numkit::loglog_slope(&hbars, &devs).unwrap();
        assert!((slope - 1.0).abs() <= 0.1, "slope {slope}");
    }

    #[test]
    fn shape_errors() {
        let g = grid1(16);
        assert!(quantise(&SymbolRn::fiber_coordinate(2, TAU, 0), 1.0, &g).is_err());
        assert!(quantise(&SymbolRn::fiber_coordinate(1, 3.0, 0), 1.0, &g).is_err());
        let op = quantise(&x(), 1.0, &g).unwrap();
        assert!(op.apply(&[Complex64::default(); 5]).is_err());
    }
}
