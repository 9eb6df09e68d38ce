use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Uniform nodal grid on the torus `[0, L)^dim` with `N` points per axis.
///
/// Nodes are `x_j = j L / N`; multi-indices are laid out row-major with the
/// last axis fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGrid {
    dim: usize,
    points_per_dim: usize,
    period: f64,
}

impl PeriodicGrid {
    pub fn new(dim: usize, points_per_dim: usize, period: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter {
                name: "dim",
                reason: "must be positive".into(),
            });
        }
        if points_per_dim < 4 || !points_per_dim.is_multiple_of(2) {
            return Err(Error::InvalidParameter {
                name: "points_per_dim",
                reason: format!("{points_per_dim} must be even and at least 4"),
            });
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "period",
                reason: format!("{period} must be positive"),
            });
        }
        Ok(Self {
            dim,
            points_per_dim,
            period,
        })
    }

    /// Grid with the default period `2pi`.
    pub fn standard(dim: usize, points_per_dim: usize) -> Result<Self> {
        Self::new(dim, points_per_dim, TAU)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_dim(&self) -> usize {
        self.points_per_dim
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Total node count `N^dim`.
    pub fn len(&self) -> usize {
        self.points_per_dim.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `2pi / L`, the wavenumber of mode 1.
    pub fn fundamental(&self) -> f64 {
        TAU / self.period
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let n = self.points_per_dim;
        let mut idx = vec![0; self.dim];
        for slot in idx.iter_mut().rev() {
            *slot = flat % n;
            flat /= n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.points_per_dim + i)
    }

    /// Coordinates of the node with flat index `flat`.
    pub fn node(&self, flat: usize) -> Vec<f64> {
        let h = self.period / self.points_per_dim as f64;
        self.multi_index(flat)
            .into_iter()
            .map(|j| j as f64 * h)
            .collect()
    }

    pub fn nodes(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(move |i| self.node(i))
    }

    /// Samples `f` at every node.
    pub fn sample<T>(&self, f: impl Fn(&[f64]) -> T) -> Vec<T> {
        self.nodes().map(|x| f(&x)).collect()
    }

    /// Balanced mode number `(-N/2, N/2]` for a storage index along one axis.
    pub fn mode_of(&self, index: usize) -> i64 {
        let n = self.points_per_dim as i64;
        let i = index as i64;
        if i <= n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Storage index for a balanced mode, or `None` when out of band.
    pub fn index_of_mode(&self, mode: i64) -> Option<usize> {
        let n = self.points_per_dim as i64;
        if mode > n / 2 || mode <= -n / 2 {
            None
        } else {
            Some(mode.rem_euclid(n) as usize)
        }
    }

    pub(crate) fn check_samples(&self, len: usize) -> Result<()> {
        if len == self.len() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.len(),
                got: len,
            })
        }
    }
}
