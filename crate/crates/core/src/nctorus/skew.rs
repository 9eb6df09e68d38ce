use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

const SKEW_TOLERANCE: f64 = 1e-12;
const RANK_THRESHOLD: f64 = 1e-10;

/// A constant skew-symmetric matrix `eta`, read as the bivector
/// `eta(a, b) = a^T eta b`.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewForm {
    eta: DMatrix<f64>,
}

impl SkewForm {
    /// Symmetrizes to `(eta - eta^T)/2`; rejects inputs that move by more
    /// than 1e-12 in doing so.
    pub fn new(eta: DMatrix<f64>) -> Result<Self> {
        if !eta.is_square() || eta.nrows() == 0 {
            return Err(Error::InvalidParameter {
                name: "eta",
                reason: format!("expected a non-empty square matrix, got {}x{}", eta.nrows(), eta.ncols()),
            });
        }
        if eta.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { context: "eta entries".into() });
        }
        let skew = (&eta - eta.transpose()) * 0.5;
        let correction = (&skew - &eta).amax();
        if correction > SKEW_TOLERANCE {
            return Err(Error::InvalidParameter {
                name: "eta",
                reason: format!("not skew-symmetric (off by {correction:e})"),
            });
        }
        Ok(Self { eta: skew })
    }

    pub fn from_row_major(n: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, got: entries.len() });
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    /// `[[0, 1], [-1, 0]]`.
    pub fn standard_symplectic() -> Self {
        Self { eta: DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]) }
    }

    pub fn zero(n: usize) -> Self {
        Self { eta: DMatrix::zeros(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.eta.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.eta
    }

    /// `eta v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (&self.eta * DVector::from_column_slice(v)).as_slice().to_vec()
    }

    /// `<r, eta s>` on integer vectors.
    #[allow(clippy::needless_range_loop)]
    pub fn pairing(&self, r: &[i64], s: &[i64]) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += r[i] as f64 * self.eta[(i, j)] * s[j] as f64;
            }
        }
        acc
    }

    /// Orthogonal projections onto `Ker(eta)` and `Im(eta)`.
    pub fn projections(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let n = self.dim();
        let gram = self.eta.transpose() * &self.eta;
        let eig = SymmetricEigen::new(gram);
        let scale = eig.eigenvalues.amax().max(1.0);
        let mut image = DMatrix::zeros(n, n);
        for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
            if lambda > RANK_THRESHOLD * scale {
                let v = eig.eigenvectors.column(i);
                image += v * v.transpose();
            }
        }
        (DMatrix::identity(n, n) - &image, image)
    }

    pub fn rank(&self) -> usize {
        let (_, image) = self.projections();
        image.trace().round() as usize
    }
}
