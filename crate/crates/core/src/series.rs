//! Uniformly sampled signals.

use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum SeriesError {
    #[error("sample interval must be positive and finite, got {0}")]
    BadInterval(f64),
    #[error("a series needs at least 2 samples, got {0}")]
    TooShort(usize),
    #[error("sample {index} is not finite")]
    NonFinite { index: usize },
    #[error("series are not aligned (dt {dt_a} vs {dt_b}, len {len_a} vs {len_b})")]
    Misaligned {
        dt_a: f64,
        dt_b: f64,
        len_a: usize,
        len_b: usize,
    },
}

/// A signal sampled every `dt` seconds starting at `start_time`.
///
/// Always holds at least two finite samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    dt: f64,
    start_time: f64,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(dt: f64, start_time: f64, values: Vec<f64>) -> Result<Self, SeriesError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SeriesError::BadInterval(dt));
        }
        if values.len() < 2 {
            return Err(SeriesError::TooShort(values.len()));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(SeriesError::NonFinite { index });
        }
        if !start_time.is_finite() {
            return Err(SeriesError::NonFinite { index: 0 });
        }
        Ok(Self {
            dt,
            start_time,
            values,
        })
    }

    /// Samples `f(t)` at `t = k * dt` for `k in 0..len`.
    pub fn from_fn(dt: f64, len: usize, f: impl Fn(f64) -> f64) -> Result<Self, SeriesError> {
        let values = (0..len).map(|k| f(k as f64 * dt)).collect();
        Self::new(dt, 0.0, values)
    }

    /// A constant signal, e.g. a step applied at `t = 0`.
    pub fn constant(dt: f64, len: usize, value: f64) -> Result<Self, SeriesError> {
        Self::new(dt, 0.0, alloc::vec![value; len])
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn start_time(&self) -> f64 {
        self.start_time
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time_at(&self, index: usize) -> f64 {
        self.start_time + index as f64 * self.dt
    }

    pub fn duration(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.dt
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &v)| (self.time_at(k), v))
    }

    /// Samples from `index` onwards, keeping the time axis.
    pub fn tail_from(&self, index: usize) -> Result<Self, SeriesError> {
        let index = index.min(self.values.len());
        Self::new(
            self.dt,
            self.time_at(index),
            self.values[index..].to_vec(),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Two series share `dt` (to 1e-9 relative) and length.
    pub fn check_aligned(&self, other: &TimeSeries) -> Result<(), SeriesError> {
        if !same_interval(self.dt, other.dt) || self.len() != other.len() {
            return Err(SeriesError::Misaligned {
                dt_a: self.dt,
                dt_b: other.dt,
                len_a: self.len(),
                len_b: other.len(),
            });
        }
        Ok(())
    }
}

pub(crate) fn same_interval(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_bad_construction() {
        assert_eq!(
            TimeSeries::new(0.0, 0.0, vec![1.0, 2.0]),
            Err(SeriesError::BadInterval(0.0))
        );
        assert_eq!(
            TimeSeries::new(0.1, 0.0, vec![1.0]),
            Err(SeriesError::TooShort(1))
        );
        assert_eq!(
            TimeSeries::new(0.1, 0.0, vec![1.0, f64::NAN]),
            Err(SeriesError::NonFinite { index: 1 })
        );
    }

    #[test]
    fn time_axis() {
        let ts = TimeSeries::new(0.5, 2.0, vec![0.0, 1.0, 2.0]).unwrap();
        assert_eq!(ts.time_at(2), 3.0);
        assert_eq!(ts.duration(), 1.0);
        let tail = ts.tail_from(1).unwrap();
        assert_eq!(tail.start_time(), 2.5);
        assert_eq!(tail.values(), &[1.0, 2.0]);
    }
}
