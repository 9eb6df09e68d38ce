use crate::error::{Error, Result};

/// Scalar time series with strictly increasing sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                got: values.len(),
            });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter {
                name: "times",
                reason: "must be strictly increasing".into(),
            });
        }
        Ok(Self { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    pub fn last(&self) -> Option<(f64, f64)> {
        Some((*self.times.last()?, *self.values.last()?))
    }

    /// `max_k |values[k] - reference(times[k])|`
    pub fn max_deviation(&self, reference: impl Fn(f64) -> f64) -> f64 {
        self.iter()
            .map(|(t, y)| (y - reference(t)).abs())
            .fold(0.0, f64::max)
    }
}

/// Classical fixed-step RK4 for `y' = rhs(t, y)` on `[t0, t1]`.
///
/// Samples are taken every `step`; the final step is shortened so the
/// trajectory ends exactly at `t1`.
pub fn rk4_solve<F>(rhs: F, t0: f64, y0: f64, t1: f64, step: f64) -> Result<Trajectory>
where
    F: Fn(f64, f64) -> f64,
{
    if !(t1 > t0) {
        return Err(Error::InvalidParameter {
            name: "t1",
            reason: format!("{t1} must exceed t0 = {t0}"),
        });
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "step",
            reason: format!("{step} must be positive"),
        });
    }
    let steps = ((t1 - t0) / step - 1e-9).ceil().max(1.0) as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    times.push(t0);
    values.push(y0);
    let (mut t, mut y) = (t0, y0);
    for k in 1..=steps {
        let t_next = if k == steps { t1 } else { t0 + k as f64 * step };
        let h = t_next - t;
        let k1 = rhs(t, y);
        let k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
        let k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
        let k4 = rhs(t + h, y + h * k3);
        let y_next = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if ![k1, k2, k3, k4, y_next].iter().all(|v| v.is_finite()) {
            return Err(Error::IntegrationDiverged { last_good_t: t });
        }
        t = t_next;
        y = y_next;
        times.push(t);
        values.push(y);
    }
    Trajectory::new(times, values)
}
