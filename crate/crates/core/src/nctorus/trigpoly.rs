use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

const PRUNE_BELOW: f64 = 1e-300;

/// A trigonometric polynomial `sum_r a_r e^{i<r,q>}` on the n-torus.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    dim: usize,
    coeffs: BTreeMap<Vec<i64>, Complex64>,
}

impl TrigPoly {
    pub fn zero(dim: usize) -> Self {
        Self { dim, coeffs: BTreeMap::new() }
    }

    /// The unit `g_0`.
    pub fn one(dim: usize) -> Self {
        Self::character(vec![0; dim])
    }

    /// The character `g_r(q) = e^{i<r,q>}`.
    pub fn character(r: Vec<i64>) -> Self {
        Self::monomial(r, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(r: Vec<i64>, c: Complex64) -> Self {
        let mut p = Self::zero(r.len());
        p.add_term(r, c);
        p
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Vec<i64>, Complex64)>) -> Result<Self> {
        let mut p = Self::zero(dim);
        for (r, c) in terms {
            if r.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: r.len() });
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::NonFinite { context: format!("coefficient of mode {r:?}") });
            }
            p.add_term(r, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, r: Vec<i64>, c: Complex64) {
        debug_assert_eq!(r.len(), self.dim);
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(r) {
            Entry::Vacant(v) => {
                if c.norm() >= PRUNE_BELOW {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().norm() < PRUNE_BELOW {
                    o.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coefficient(&self, r: &[i64]) -> Complex64 {
        self.coeffs.get(r).copied().unwrap_or_default()
    }

    /// Modes in lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&[i64], Complex64)> {
        self.coeffs.iter().map(|(r, c)| (r.as_slice(), *c))
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The trace `tau(a) = a_0`.
    pub fn trace(&self) -> Complex64 {
        self.coefficient(&vec![0; self.dim])
    }

    pub fn eval(&self, q: &[f64]) -> Complex64 {
        self.terms()
            .map(|(r, c)| {
                let phase: f64 = r.iter().zip(q).map(|(&ri, &qi)| ri as f64 * qi).sum();
                c * Complex64::from_polar(1.0, phase)
            })
            .sum()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (r, c) in other.terms() {
            out.add_term(r.to_vec(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero(self.dim);
        for (r, c) in self.terms() {
            out.add_term(r.to_vec(), c * s);
        }
        out
    }

    /// `max_r |a_r - b_r|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max))
    }

    /// Bilinear extension of `(r, s) -> w(r, s) g_{r+s}`.
    ///
    /// Contributions to each mode are summed in sorted order, so equal
    /// multisets of products give bit-identical coefficients.
    pub(crate) fn twisted_product(
        &self,
        other: &Self,
        weight: impl Fn(&[i64], &[i64]) -> Complex64,
    ) -> Result<Self> {
        self.check_dim(other)?;
        let mut parts: BTreeMap<Vec<i64>, Vec<Complex64>> = BTreeMap::new();
        for (r, a) in self.terms() {
            for (s, b) in other.terms() {
                let m: Vec<i64> = r.iter().zip(s).map(|(x, y)| x + y).collect();
                parts.entry(m).or_default().push(a * b * weight(r, s));
            }
        }
        let mut out = Self::zero(self.dim);
        for (m, mut values) in parts {
            values.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
            out.add_term(m, values.into_iter().sum());
        }
        Ok(out)
    }

    pub(crate) fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        Ok(())
    }

    /// Parses `"r:re,im;r:re,im;..."` where each `r` is `(r1,...,rn)` or
    /// space-separated integers.
    pub fn parse_mode_list(text: &str, dim: usize) -> Result<Self> {
        let mut terms = Vec::new();
        for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (mode, value) = item
                .rsplit_once(':')
                .ok_or_else(|| Error::Parse(format!("mode entry `{item}` lacks `:`")))?;
            let mode = mode.trim().trim_start_matches('(').trim_end_matches(')');
            let r = mode
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<i64>().map_err(|e| Error::Parse(format!("mode `{s}`: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            let parts: Vec<&str> = value.split(',').map(str::trim).collect();
            let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("coefficient `{s}`: {e}")));
            let c = match parts.as_slice() {
                [re] => Complex64::new(num(re)?, 0.0),
                [re, im] => Complex64::new(num(re)?, num(im)?),
                _ => return Err(Error::Parse(format!("coefficient `{value}` must be `re` or `re,im`"))),
            };
            terms.push((r, c));
        }
        Self::from_terms(dim, terms)
    }

    /// Inverse of [`parse_mode_list`](Self::parse_mode_list), 17 significant digits.
    pub fn to_mode_list(&self) -> String {
        self.terms()
            .map(|(r, c)| {
                let r: Vec<String> = r.iter().map(i64::to_string).collect();
                format!("({}):{:.16e},{:.16e}", r.join(","), c.re, c.im)
            })
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl fmt::Display for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_mode_list())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cancellation_prunes() {
        let a = TrigPoly::monomial(vec![1, 2], c(1.0, -1.0));
        assert!(a.sub(&a).unwrap().is_zero());
        let b = TrigPoly::monomial(vec![0, 0], c(0.0, 0.0));
        assert!(b.is_zero());
    }

    #[test]
    fn dimension_checks() {
        assert!(TrigPoly::one(2).add(&TrigPoly::one(3)).is_err());
        assert!(TrigPoly::from_terms(2, [(vec![1], c(1.0, 0.0))]).is_err());
        assert!(TrigPoly::from_terms(1, [(vec![1], c(f64::NAN, 0.0))]).is_err());
    }

    #[test]
    fn evaluation_matches_characters() {
        let a = TrigPoly::from_terms(2, [(vec![1, 0], c(2.0, 0.0)), (vec![0, -1], c(0.0, 1.0))]).unwrap();
        let q = [0.3, 1.1];
        let expect = 2.0 * Complex64::from_polar(1.0, 0.3) + c(0.0, 1.0) * Complex64::from_polar(1.0, -1.1);
        assert!((a.eval(&q) - expect).norm() < 1e-15);
    }

    #[test]
    fn mode_list_round_trip() {
        let a = TrigPoly::parse_mode_list("(1,0):1,0; (0,-2):0.5,-0.25; 3 1:2", 2).unwrap();
        assert_eq!(a.coefficient(&[0, -2]), c(0.5, -0.25));
        assert_eq!(a.coefficient(&[3, 1]), c(2.0, 0.0));
        let text = a.to_mode_list();
        assert_eq!(TrigPoly::parse_mode_list(&text, 2).unwrap(), a);
        assert!(TrigPoly::parse_mode_list("(1,0)=1", 2).is_err());
        assert!(TrigPoly::parse_mode_list("(1,x):1", 2).is_err());
        assert!(TrigPoly::parse_mode_list("(1,0,0):1", 2).is_err());
    }
}
