use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;

use super::PeriodicGrid;
use crate::error::Result;

/// Trigonometric-interpolation coefficients of a sampled function.
///
/// `s_j = sum_m c_m exp(i 2pi <m, j> / N)` with `m` ranging over the balanced
/// mode set `(-N/2, N/2]^dim`. Storage follows the grid layout, so the
/// coefficient of mode `m` sits at the flat index of `m mod N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: PeriodicGrid,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    /// Coefficient of `mode`; zero for out-of-band modes.
    pub fn coefficient(&self, mode: &[i64]) -> Complex64 {
        if mode.len() != self.grid.dim() {
            return Complex64::new(0.0, 0.0);
        }
        let mut idx = Vec::with_capacity(mode.len());
        for &m in mode {
            match self.grid.index_of_mode(m) {
                Some(i) => idx.push(i),
                None => return Complex64::new(0.0, 0.0),
            }
        }
        self.coeffs[self.grid.flat_index(&idx)]
    }

    pub fn mode_at(&self, flat: usize) -> Vec<i64> {
        self.grid
            .multi_index(flat)
            .into_iter()
            .map(|i| self.grid.mode_of(i))
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<i64>, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(flat, c)| (self.mode_at(flat), *c))
    }

    /// Applies a per-mode multiplier, e.g. a spectral derivative.
    pub fn map_modes(&self, f: impl Fn(&[i64], Complex64) -> Complex64) -> Spectrum {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(flat, c)| f(&self.mode_at(flat), *c))
            .collect();
        Spectrum {
            grid: self.grid,
            coeffs,
        }
    }

    /// Non-negligible coefficients keyed by mode, for inspection and tests.
    pub fn to_mode_map(&self, threshold: f64) -> BTreeMap<Vec<i64>, Complex64> {
        self.iter().filter(|(_, c)| c.norm() > threshold).collect()
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }
}

/// Direct O(N^2)-per-axis transform of one axis of a row-major buffer.
fn transform_axis(grid: &PeriodicGrid, data: &mut [Complex64], axis: usize, sign: f64) {
    let n = grid.points_per_dim();
    let twiddle: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(1.0, sign * TAU * k as f64 / n as f64))
        .collect();
    let stride = n.pow((grid.dim() - 1 - axis) as u32);
    let block = stride * n;
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for outer in (0..data.len()).step_by(block) {
        for inner in 0..stride {
            let base = outer + inner;
            for (k, slot) in line.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    acc += data[base + j * stride] * twiddle[(k * j) % n];
                }
                *slot = acc;
            }
            for (k, v) in line.iter().enumerate() {
                data[base + k * stride] = *v;
            }
        }
    }
}

/// Trigonometric-interpolation coefficients of `samples` on `grid`.
pub fn dft_modes(grid: &PeriodicGrid, samples: &[Complex64]) -> Result<Spectrum> {
    grid.check_samples(samples.len())?;
    let mut data = samples.to_vec();
    for axis in 0..grid.dim() {
        transform_axis(grid, &mut data, axis, -1.0);
    }
    let scale = 1.0 / grid.len() as f64;
    for c in &mut data {
        *c *= scale;
    }
    Ok(Spectrum {
        grid: *grid,
        coeffs: data,
    })
}

/// Reconstructs nodal samples from a [`Spectrum`].
pub fn inverse_dft(spectrum: &Spectrum) -> Vec<Complex64> {
    let mut data = spectrum.coeffs.clone();
    for axis in 0..spectrum.grid.dim() {
        transform_axis(&spectrum.grid, &mut data, axis, 1.0);
    }
    data
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Independent 1-D oracle: naive summation with freshly computed phases.
    fn naive_coefficient(samples: &[Complex64], mode: i64) -> Complex64 {
        let n = samples.len() as f64;
        samples
            .iter()
            .enumerate()
            .map(|(j, s)| s * Complex64::from_polar(1.0, -TAU * mode as f64 * j as f64 / n))
            .sum::<Complex64>()
            / n
    }

    #[test]
    fn pure_mode_is_orthogonal() {
        let grid = PeriodicGrid::standard(1, 16).unwrap();
        let samples = grid.sample(|x| Complex64::from_polar(1.0, 2.0 * x[0]));
        let spectrum = dft_modes(&grid, &samples).unwrap();
        for (mode, coeff) in spectrum.iter() {
            let expected = if mode == [2] { c(1.0) } else { c(0.0) };
            assert!((coeff - expected).norm() < 1e-14, "mode {mode:?}: {coeff}");
        }
    }

    #[test]
    fn constant_maps_to_mode_zero() {
        let grid = PeriodicGrid::standard(2, 8).unwrap();
        let spectrum = dft_modes(&grid, &vec![c(1.0); grid.len()]).unwrap();
        assert!((spectrum.coefficient(&[0, 0]) - c(1.0)).norm() < 1e-15);
        let others: f64 = spectrum
            .iter()
            .filter(|(m, _)| m != &[0, 0])
            .map(|(_, c)| c.norm())
            .sum();
        assert!(others < 1e-14);
    }

    #[test]
    fn cosine_matches_naive_summation() {
        let grid = PeriodicGrid::standard(1, 16).unwrap();
        let samples = grid.sample(|x| c(x[0].cos()));
        let spectrum = dft_modes(&grid, &samples).unwrap();
        for m in -7..=8 {
            let oracle = naive_coefficient(&samples, m);
            assert!((spectrum.coefficient(&[m]) - oracle).norm() < 1e-14);
        }
        assert!((naive_coefficient(&samples, 1) - c(0.5)).norm() < 1e-14);
        assert!((naive_coefficient(&samples, -1) - c(0.5)).norm() < 1e-14);
    }

    #[test]
    fn rejects_wrong_sample_count() {
        let grid = PeriodicGrid::standard(2, 8).unwrap();
        assert_eq!(
            dft_modes(&grid, &[c(0.0); 10]).unwrap_err(),
            Error::DimensionMismatch {
                expected: 64,
                got: 10
            }
        );
    }

    #[test]
    fn two_dimensional_modes_are_separable() {
        let grid = PeriodicGrid::standard(2, 8).unwrap();
        let samples = grid.sample(|x| Complex64::from_polar(1.0, 3.0 * x[0] - 2.0 * x[1]));
        let spectrum = dft_modes(&grid, &samples).unwrap();
        assert!((spectrum.coefficient(&[3, -2]) - c(1.0)).norm() < 1e-14);
        assert_eq!(spectrum.to_mode_map(1e-12).len(), 1);
    }

    proptest! {
        #[test]
        fn round_trip_and_parseval(values in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64)) {
            let grid = PeriodicGrid::standard(2, 8).unwrap();
            let samples: Vec<Complex64> = values.iter().map(|(a, b)| Complex64::new(*a, *b)).collect();
            let spectrum = dft_modes(&grid, &samples).unwrap();
            let back = inverse_dft(&spectrum);
            for (s, b) in samples.iter().zip(&back) {
                prop_assert!((s - b).norm() < 1e-12);
            }
            let energy: f64 = samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / grid.len() as f64;
            let spectral: f64 = spectrum.coefficients().iter().map(|c| c.norm_sqr()).sum();
            prop_assert!((energy - spectral).abs() < 1e-12);
        }
    }
}
