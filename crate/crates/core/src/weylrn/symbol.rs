use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::liepoisson::BracketRing;
use crate::nctorus::TrigPoly;

/// A symbol `f(p, X) = sum_alpha a_alpha(p) X^alpha` on a periodic box of
/// side `period`; each `a_alpha` is a trigonometric polynomial whose mode
/// `m` stands for `e^{i (2 pi / period) <m, p>}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolRn {
    dim: usize,
    period: f64,
    terms: BTreeMap<Vec<u32>, TrigPoly>,
}

impl SymbolRn {
    pub fn zero(dim: usize, period: f64) -> Self {
        Self { dim, period, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, period: f64, c: Complex64) -> Self {
        Self::zero(dim, period).with_term(vec![0; dim], TrigPoly::monomial(vec![0; dim], c))
    }

    /// The fiber coordinate `X_k`.
    pub fn fiber_coordinate(dim: usize, period: f64, k: usize) -> Self {
        let mut alpha = vec![0; dim];
        alpha[k] = 1;
        Self::zero(dim, period).with_term(alpha, TrigPoly::one(dim))
    }

    /// A function of `p` alone.
    pub fn base(period: f64, a: TrigPoly) -> Self {
        let dim = a.dim();
        Self::zero(dim, period).with_term(vec![0; dim], a)
    }

    /// Adds `a(p) X^alpha`.
    pub fn with_term(mut self, alpha: Vec<u32>, a: TrigPoly) -> Self {
        assert_eq!(alpha.len(), self.dim, "multi-index length");
        assert_eq!(a.dim(), self.dim, "coefficient dimension");
        self.add_term(alpha, a);
        self
    }

    fn add_term(&mut self, alpha: Vec<u32>, a: TrigPoly) {
        let sum = match self.terms.remove(&alpha) {
            Some(prev) => prev.add(&a).expect("dimensions checked"),
            None => a,
        };
        if !sum.is_zero() {
            self.terms.insert(alpha, sum);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &TrigPoly)> {
        self.terms.iter().map(|(a, c)| (a.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|a| a.iter().sum()).max().unwrap_or(0)
    }

    fn angle(&self, p: &[f64]) -> Vec<f64> {
        let k = TAU / self.period;
        p.iter().map(|x| k * x).collect()
    }

    /// `a_alpha(p)` for one multi-index.
    pub fn coefficient_at(&self, alpha: &[u32], p: &[f64]) -> Complex64 {
        self.terms.get(alpha).map_or(Complex64::default(), |a| a.eval(&self.angle(p)))
    }

    pub fn eval(&self, p: &[f64], x: &[f64]) -> Complex64 {
        let q = self.angle(p);
        self.terms
            .iter()
            .map(|(alpha, a)| {
                let mono: f64 = alpha.iter().zip(x).map(|(&e, &xi)| xi.powi(e as i32)).product();
                a.eval(&q) * mono
            })
            .sum()
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        let mut out = Self::zero(self.dim, self.period);
        for (alpha, a) in &self.terms {
            out.add_term(alpha.clone(), a.scale(s));
        }
        out
    }

    pub fn fiber_partial(&self, k: usize) -> Self {
        let mut out = Self::zero(self.dim, self.period);
        for (alpha, a) in &self.terms {
            if alpha[k] > 0 {
                let mut beta = alpha.clone();
                beta[k] -= 1;
                out.add_term(beta, a.scale(Complex64::new(alpha[k] as f64, 0.0)));
            }
        }
        out
    }

    pub fn base_partial(&self, h: usize) -> Self {
        let k = TAU / self.period;
        let mut out = Self::zero(self.dim, self.period);
        for (alpha, a) in &self.terms {
            let d = TrigPoly::from_terms(
                self.dim,
                a.terms().map(|(r, c)| (r.to_vec(), c * Complex64::new(0.0, k * r[h] as f64))),
            )
            .expect("shape preserved");
            out.add_term(alpha.clone(), d);
        }
        out
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (alpha, a) in &other.terms {
            out.add_term(alpha.clone(), a.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.dim, self.period);
        for (a1, c1) in &self.terms {
            for (a2, c2) in &other.terms {
                let alpha = a1.iter().zip(a2).map(|(x, y)| x + y).collect();
                let c = c1.twisted_product(c2, |_, _| Complex64::new(1.0, 0.0))?;
                out.add_term(alpha, c);
            }
        }
        Ok(out)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        if self.period != other.period {
            return Err(Error::InvalidParameter {
                name: "period",
                reason: format!("symbols live on boxes of different size ({} vs {})", self.period, other.period),
            });
        }
        Ok(())
    }
}

impl BracketRing for SymbolRn {
    fn zero_like(&self) -> Self {
        Self::zero(self.dim, self.period)
    }
    fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("symbols on the same box")
    }
    fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }
    fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("symbols on the same box")
    }
    fn scale(&self, s: f64) -> Self {
        self.scale_complex(Complex64::new(s, 0.0))
    }
}
