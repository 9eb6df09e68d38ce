use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Real polynomial in the base coordinates `u`, keyed by exponent vector.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BasePoly {
    dim: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl BasePoly {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    /// The coordinate function `u_i`.
    pub fn variable(dim: usize, i: usize) -> Self {
        let mut exp = vec![0; dim];
        exp[i] = 1;
        let mut p = Self::zero(dim);
        p.add_term(exp, 1.0);
        p
    }

    pub fn monomial(exponent: Vec<u32>, c: f64) -> Self {
        let mut p = Self::zero(exponent.len());
        p.add_term(exponent, c);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add_term(&mut self, exponent: Vec<u32>, c: f64) {
        debug_assert_eq!(exponent.len(), self.dim);
        let slot = self.terms.entry(exponent).or_insert(0.0);
        *slot += c;
        if *slot == 0.0 {
            self.terms.retain(|_, v| *v != 0.0);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn eval(&self, u: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(u).map(|(&k, x)| x.powi(k as i32)).product::<f64>())
            .sum()
    }

    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut d = e.clone();
                d[i] -= 1;
                out.add_term(d, c * e[i] as f64);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

type BaseFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Coefficient `a_alpha(u)` of a fiber monomial.
///
/// Polynomial coefficients support exact differentiation; opaque callables
/// force the finite-difference path.
#[derive(Clone)]
pub enum Coefficient {
    Poly(BasePoly),
    Func(BaseFn),
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Poly(p) => f.debug_tuple("Poly").field(p).finish(),
            Coefficient::Func(_) => f.write_str("Func(..)"),
        }
    }
}

impl Coefficient {
    pub fn func(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Coefficient::Func(Arc::new(f))
    }

    pub fn eval(&self, u: &[f64]) -> f64 {
        match self {
            Coefficient::Poly(p) => p.eval(u),
            Coefficient::Func(f) => f(u),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coefficient::Poly(_))
    }

    fn is_zero(&self) -> bool {
        matches!(self, Coefficient::Poly(p) if p.is_zero())
    }

    fn as_fn(&self) -> BaseFn {
        match self {
            Coefficient::Poly(p) => {
                let p = p.clone();
                Arc::new(move |u: &[f64]| p.eval(u))
            }
            Coefficient::Func(f) => f.clone(),
        }
    }

    fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (Coefficient::Poly(a), Coefficient::Poly(b)) => Coefficient::Poly(a.add(b)),
            _ => {
                let (fa, fb) = (self.as_fn(), other.as_fn());
                Coefficient::Func(Arc::new(move |u: &[f64]| fa(u) + fb(u)))
            }
        }
    }

    fn mul(&self, other: &Self) -> Self {
        match (self, other) {
            (Coefficient::Poly(a), Coefficient::Poly(b)) => Coefficient::Poly(a.mul(b)),
            _ => {
                let (fa, fb) = (self.as_fn(), other.as_fn());
                Coefficient::Func(Arc::new(move |u: &[f64]| fa(u) * fb(u)))
            }
        }
    }

    fn scale(&self, s: f64) -> Self {
        match self {
            Coefficient::Poly(p) => Coefficient::Poly(p.scale(s)),
            Coefficient::Func(f) => {
                let f = f.clone();
                Coefficient::Func(Arc::new(move |u: &[f64]| s * f(u)))
            }
        }
    }
}

impl From<BasePoly> for Coefficient {
    fn from(p: BasePoly) -> Self {
        Coefficient::Poly(p)
    }
}

/// `F(u, Z) = sum_alpha a_alpha(u) Z^alpha`, polynomial in the fiber.
#[derive(Debug, Clone)]
pub struct FiberPolynomial {
    base_dim: usize,
    fiber_dim: usize,
    terms: BTreeMap<Vec<u32>, Coefficient>,
}

impl FiberPolynomial {
    pub fn zero(base_dim: usize, fiber_dim: usize) -> Self {
        Self {
            base_dim,
            fiber_dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(base_dim: usize, fiber_dim: usize, c: f64) -> Self {
        let mut p = Self::zero(base_dim, fiber_dim);
        p.push(vec![0; fiber_dim], BasePoly::constant(base_dim, c).into())
            .expect("shape is consistent");
        p
    }

    /// The fiber coordinate `Z_j`.
    pub fn fiber_coordinate(base_dim: usize, fiber_dim: usize, j: usize) -> Self {
        let mut alpha = vec![0; fiber_dim];
        alpha[j] = 1;
        let mut p = Self::zero(base_dim, fiber_dim);
        p.push(alpha, BasePoly::constant(base_dim, 1.0).into())
            .expect("shape is consistent");
        p
    }

    /// The base coordinate `u_h`, constant along fibers.
    pub fn base_coordinate(base_dim: usize, fiber_dim: usize, h: usize) -> Self {
        Self::from_base(base_dim, fiber_dim, BasePoly::variable(base_dim, h).into())
    }

    /// A function pulled back from the base.
    pub fn from_base(base_dim: usize, fiber_dim: usize, coefficient: Coefficient) -> Self {
        let mut p = Self::zero(base_dim, fiber_dim);
        p.push(vec![0; fiber_dim], coefficient)
            .expect("shape is consistent");
        p
    }

    /// Adds `coefficient * Z^alpha`.
    pub fn push(&mut self, alpha: Vec<u32>, coefficient: Coefficient) -> Result<()> {
        if alpha.len() != self.fiber_dim {
            return Err(Error::DimensionMismatch {
                expected: self.fiber_dim,
                got: alpha.len(),
            });
        }
        if let Coefficient::Poly(p) = &coefficient {
            if p.dim() != self.base_dim {
                return Err(Error::DimensionMismatch {
                    expected: self.base_dim,
                    got: p.dim(),
                });
            }
        }
        let merged = match self.terms.remove(&alpha) {
            Some(existing) => existing.add(&coefficient),
            None => coefficient,
        };
        if !merged.is_zero() {
            self.terms.insert(alpha, merged);
        }
        Ok(())
    }

    pub fn with_term(mut self, alpha: Vec<u32>, coefficient: Coefficient) -> Result<Self> {
        self.push(alpha, coefficient)?;
        Ok(self)
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Coefficient)> {
        self.terms.iter().map(|(a, c)| (a.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every coefficient is a polynomial in `u`.
    pub fn is_exact(&self) -> bool {
        self.terms.values().all(Coefficient::is_exact)
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|a| a.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, u: &[f64], z: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(alpha, c)| {
                c.eval(u)
                    * alpha
                        .iter()
                        .zip(z)
                        .map(|(&k, x)| x.powi(k as i32))
                        .product::<f64>()
            })
            .sum()
    }

    /// `dF/dZ_k`, always exact.
    pub fn fiber_partial(&self, k: usize) -> Self {
        let mut out = Self::zero(self.base_dim, self.fiber_dim);
        for (alpha, c) in &self.terms {
            if alpha[k] > 0 {
                let mut beta = alpha.clone();
                beta[k] -= 1;
                out.push(beta, c.scale(alpha[k] as f64))
                    .expect("shape is consistent");
            }
        }
        out
    }

    /// `dF/du_h`, or `None` when some coefficient is an opaque callable.
    pub fn base_partial(&self, h: usize) -> Option<Self> {
        let mut out = Self::zero(self.base_dim, self.fiber_dim);
        for (alpha, c) in &self.terms {
            match c {
                Coefficient::Poly(p) => out
                    .push(alpha.clone(), Coefficient::Poly(p.partial(h)))
                    .expect("shape is consistent"),
                Coefficient::Func(_) => return None,
            }
        }
        Some(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (alpha, c) in &other.terms {
            out.push(alpha.clone(), c.clone())
                .expect("operands share a shape");
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero(self.base_dim, self.fiber_dim);
        if s != 0.0 {
            for (alpha, c) in &self.terms {
                out.push(alpha.clone(), c.scale(s)).expect("shape is consistent");
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.base_dim, self.fiber_dim);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let alpha = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.push(alpha, ca.mul(cb)).expect("operands share a shape");
            }
        }
        out
    }

    pub(crate) fn check_shape(&self, base_dim: usize, fiber_dim: usize) -> Result<()> {
        if self.fiber_dim != fiber_dim {
            return Err(Error::DimensionMismatch {
                expected: fiber_dim,
                got: self.fiber_dim,
            });
        }
        if self.base_dim != base_dim {
            return Err(Error::DimensionMismatch {
                expected: base_dim,
                got: self.base_dim,
            });
        }
        Ok(())
    }
}
