use std::fmt;
use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kvtext::{Diagnostic, KvDoc, Reader};

/// `B^j_{kh}` for `j, k, h` in `0..n`, stored `[j][k][h]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureTensor {
    n: usize,
    data: Vec<f64>,
}

impl StructureTensor {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    /// Builds from a flat `[j][k][h]` row-major array of length `n^3`.
    pub fn from_flat(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n * n,
                got: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, j: usize, k: usize, h: usize) -> f64 {
        self.data[(j * self.n + k) * self.n + h]
    }

    pub fn set(&mut self, j: usize, k: usize, h: usize, value: f64) {
        self.data[(j * self.n + k) * self.n + h] = value;
    }

    /// Builder-style [`set`](Self::set).
    pub fn with(mut self, j: usize, k: usize, h: usize, value: f64) -> Self {
        self.set(j, k, h, value);
        self
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

type ChartFn = Arc<dyn Fn(&[f64]) -> (StructureTensor, DMatrix<f64>) + Send + Sync>;

#[derive(Clone)]
enum ChartData {
    Constant {
        b: StructureTensor,
        rho: DMatrix<f64>,
    },
    Varying(ChartFn),
}

/// Local data of a Lie algebroid over a chart `U` of dimension `m` with
/// fiber dimension `n`: the structure functions `B^j_{kh}(u)` and the anchor
/// `rho(u)`, an `m x n` matrix whose entry `(h, k)` is the `h`-th component
/// of the anchor of `e_k`.
#[derive(Clone)]
pub struct AlgebroidChart {
    base_dim: usize,
    fiber_dim: usize,
    data: ChartData,
}

impl fmt::Debug for AlgebroidChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_struct("AlgebroidChart");
        s.field("base_dim", &self.base_dim)
            .field("fiber_dim", &self.fiber_dim);
        match &self.data {
            ChartData::Constant { b, rho } => s.field("b", b).field("rho", rho),
            ChartData::Varying(_) => s.field("data", &"varying"),
        };
        s.finish()
    }
}

impl AlgebroidChart {
    pub fn constant(
        base_dim: usize,
        fiber_dim: usize,
        b: StructureTensor,
        rho: DMatrix<f64>,
    ) -> Result<Self> {
        let chart = Self {
            base_dim,
            fiber_dim,
            data: ChartData::Constant { b, rho },
        };
        chart.at(&vec![0.0; base_dim])?;
        Ok(chart)
    }

    pub fn varying(
        base_dim: usize,
        fiber_dim: usize,
        data: impl Fn(&[f64]) -> (StructureTensor, DMatrix<f64>) + Send + Sync + 'static,
    ) -> Result<Self> {
        if fiber_dim == 0 {
            return Err(Error::InvalidParameter {
                name: "fiber_dim",
                reason: "must be at least 1".into(),
            });
        }
        Ok(Self {
            base_dim,
            fiber_dim,
            data: ChartData::Varying(Arc::new(data)),
        })
    }

    /// The Lie algebra over a point with the given structure functions.
    pub fn lie_algebra(b: StructureTensor) -> Result<Self> {
        let n = b.n();
        Self::constant(0, n, b, DMatrix::zeros(0, n))
    }

    /// Tangent algebroid of `R^m`: `B = 0`, anchor the identity.
    pub fn tangent(dim: usize) -> Result<Self> {
        Self::constant(dim, dim, StructureTensor::zeros(dim), DMatrix::identity(dim, dim))
    }

    /// Zero bracket and zero anchor.
    pub fn abelian(base_dim: usize, fiber_dim: usize) -> Result<Self> {
        Self::constant(
            base_dim,
            fiber_dim,
            StructureTensor::zeros(fiber_dim),
            DMatrix::zeros(base_dim, fiber_dim),
        )
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.data, ChartData::Constant { .. })
    }

    /// `(B(u), rho(u))`, checked for shape and finiteness.
    pub fn at(&self, u: &[f64]) -> Result<(StructureTensor, DMatrix<f64>)> {
        if u.len() != self.base_dim {
            return Err(Error::DimensionMismatch {
                expected: self.base_dim,
                got: u.len(),
            });
        }
        let (b, rho) = match &self.data {
            ChartData::Constant { b, rho } => (b.clone(), rho.clone()),
            ChartData::Varying(f) => f(u),
        };
        if self.fiber_dim == 0 || b.n() != self.fiber_dim {
            return Err(Error::DimensionMismatch {
                expected: self.fiber_dim,
                got: b.n(),
            });
        }
        if rho.nrows() != self.base_dim || rho.ncols() != self.fiber_dim {
            return Err(Error::DimensionMismatch {
                expected: self.base_dim * self.fiber_dim,
                got: rho.nrows() * rho.ncols(),
            });
        }
        if b.as_slice().iter().chain(rho.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: format!("chart data at u = {u:?}"),
            });
        }
        Ok((b, rho))
    }

    /// Parses a constant chart from a flat `key = value` document with keys
    /// `base_dim`, `fiber_dim`, `B` (`n^3` numbers ordered `[j][k][h]`) and
    /// `rho` (`m x n`, row-major).
    pub fn from_text(text: &str) -> std::result::Result<Self, Vec<Diagnostic>> {
        let mut doc = KvDoc::parse(text)?;
        let mut r = Reader::new(&mut doc);
        let m = r.usize_req("base_dim");
        let n = r.usize_req("fiber_dim");
        let b = r.flat_array_req("B");
        let rho = r.flat_array_req("rho");
        let mut diags = r.finish();
        let (Some(m), Some(n), Some((b, b_line)), Some((rho, rho_line))) = (m, n, b, rho) else {
            return Err(diags);
        };
        if n == 0 {
            diags.push(Diagnostic {
                line: None,
                message: "fiber_dim must be at least 1".into(),
            });
        }
        if b.len() != n * n * n {
            diags.push(Diagnostic {
                line: b_line,
                message: format!("B has {} entries, expected fiber_dim^3 = {}", b.len(), n * n * n),
            });
        }
        if rho.len() != m * n {
            diags.push(Diagnostic {
                line: rho_line,
                message: format!("rho has {} entries, expected base_dim*fiber_dim = {}", rho.len(), m * n),
            });
        }
        if !diags.is_empty() {
            return Err(diags);
        }
        let b = StructureTensor::from_flat(n, b).expect("length checked");
        let rho = DMatrix::from_row_slice(m, n, &rho);
        Self::constant(m, n, b, rho).map_err(|e| {
            vec![Diagnostic {
                line: None,
                message: e.to_string(),
            }]
        })
    }

    pub fn load(path: &Path) -> std::result::Result<Self, Vec<Diagnostic>> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            vec![Diagnostic {
                line: None,
                message: format!("cannot read {}: {e}", path.display()),
            }]
        })?;
        Self::from_text(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_constant_chart_file() {
        let text = "base_dim = 0\nfiber_dim = 3\n\
                    B = [0,0,0, 0,0,1, 0,0,0,  0,0,0, 0,0,0, 1,0,0,  0,1,0, 0,0,0, 0,0,0]\n\
                    rho = []\n";
        let chart = AlgebroidChart::from_text(text).unwrap();
        let (b, rho) = chart.at(&[]).unwrap();
        assert_eq!(b.get(0, 1, 2), 1.0);
        assert_eq!(b.get(1, 2, 0), 1.0);
        assert_eq!(b.get(2, 0, 1), 1.0);
        assert_eq!(rho.shape(), (0, 3));
        assert!(chart.is_constant());
    }

    #[test]
    fn chart_file_diagnostics() {
        let err = AlgebroidChart::from_text("base_dim = 1\nfiber_dim = 1\nB = [0, 0]\nrho = [1]\nextra = 2\n")
            .unwrap_err();
        let msgs: Vec<String> = err.iter().map(|d| d.to_string()).collect();
        assert!(msgs.contains(&"line 5: unknown key: extra".to_string()), "{msgs:?}");
        assert!(msgs.iter().any(|m| m.starts_with("line 3: B has 2 entries")), "{msgs:?}");
        let err = AlgebroidChart::from_text("fiber_dim = 1\n").unwrap_err();
        assert!(err.iter().any(|d| d.message == "missing key: base_dim"));
    }

    #[test]
    fn varying_chart_shapes_are_checked() {
        let chart = AlgebroidChart::varying(1, 2, |_| (StructureTensor::zeros(3), DMatrix::zeros(1, 2))).unwrap();
        assert!(matches!(chart.at(&[0.0]), Err(Error::DimensionMismatch { .. })));
        let chart = AlgebroidChart::varying(1, 1, |u| {
            (StructureTensor::zeros(1), DMatrix::from_element(1, 1, 1.0 / u[0]))
        })
        .unwrap();
        assert!(matches!(chart.at(&[0.0]), Err(Error::NonFinite { .. })));
        assert!(chart.at(&[1.0, 2.0]).is_err());
    }
}
