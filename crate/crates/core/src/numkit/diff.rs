use crate::error::{ensure_finite, Error, Result};

/// Fourth-order central estimate of `d/dt g(t)` at `t = 0`:
/// `(-g(2h) + 8 g(h) - 8 g(-h) + g(-2h)) / 12h`.
pub fn derivative_along<F>(g: F, step: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "step",
            reason: format!("{step} must be positive"),
        });
    }
    let mut vals = [0.0; 4];
    for (slot, t) in vals.iter_mut().zip([2.0 * step, step, -step, -2.0 * step]) {
        *slot = ensure_finite(g(t)?, || format!("stencil point t = {t}"))?;
    }
    Ok((8.0 * (vals[1] - vals[2]) - (vals[0] - vals[3])) / (12.0 * step))
}

/// Componentwise [`derivative_along`] for vector-valued curves.
pub fn derivative_along_vec<F>(g: F, step: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "step",
            reason: format!("{step} must be positive"),
        });
    }
    let pts = [2.0 * step, step, -step, -2.0 * step];
    let vals: Vec<Vec<f64>> = pts.iter().map(|&t| g(t)).collect::<Result<_>>()?;
    let dim = vals[0].len();
    if vals.iter().any(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: vals.iter().map(Vec::len).find(|&l| l != dim).unwrap_or(dim),
        });
    }
    (0..dim)
        .map(|i| {
            let d = (8.0 * (vals[1][i] - vals[2][i]) - (vals[0][i] - vals[3][i])) / (12.0 * step);
            ensure_finite(d, || format!("component {i} of a curve derivative"))
        })
        .collect()
}

/// Directional derivative of `f` at `x` along `direction`.
pub fn central_diff<F>(f: F, x: &[f64], direction: &[f64], step: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    if x.len() != direction.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: direction.len(),
        });
    }
    derivative_along(
        |t| {
            let point: Vec<f64> = x.iter().zip(direction).map(|(a, d)| a + t * d).collect();
            Ok(f(&point))
        },
        step,
    )
}
