//! Logarithmically spaced time grids for relaxation observables.

use crate::error::{Error, Result};

/// Default number of grid points per decade of time.
pub const DEFAULT_POINTS_PER_DECADE: usize = 24;
/// Default first grid time.
pub const DEFAULT_T_MIN: f64 = 1e-1;
/// Default last grid time.
pub const DEFAULT_T_MAX: f64 = 1e8;

/// Strictly increasing, positive sample times, log-spaced.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    /// Log-spaced grid with `points_per_decade` samples per decade of time,
    /// covering `[t_min, t_max]`. Both endpoints are included.
    pub fn log_spaced(t_min: f64, t_max: f64, points_per_decade: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_max > t_min) || points_per_decade == 0 {
            return Err(Error::BadGridBounds { t_min, t_max });
        }
        let p = points_per_decade as f64;
        let k_lo = (p * t_min.log10()).round() as i64;
        let k_hi = (p * t_max.log10()).round() as i64;
        let mut times: Vec<f64> = (k_lo..=k_hi).map(|k| 10f64.powf(k as f64 / p)).collect();
        // Guard the endpoints against rounding of the exponent.
        if times.first().is_some_and(|&t| t > t_min * (1.0 + 1e-12)) {
            times.insert(0, t_min);
        }
        if times.last().is_some_and(|&t| t < t_max * (1.0 - 1e-12)) {
            times.push(t_max);
        }
        debug_assert!(times.windows(2).all(|w| w[0] < w[1]));
        Ok(Self { times })
    }

    /// The default grid used by the relaxation pipelines: 10⁻¹ to 10⁸ at 24
    /// points per decade.
    pub fn default_grid() -> Self {
        Self::log_spaced(DEFAULT_T_MIN, DEFAULT_T_MAX, DEFAULT_POINTS_PER_DECADE)
            .expect("default grid bounds are valid")
    }

    /// Explicit sample times. They must be positive and strictly increasing.
    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times[0] <= 0.0 || times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadGridBounds {
                t_min: times.first().copied().unwrap_or(0.0),
                t_max: times.last().copied().unwrap_or(0.0),
            });
        }
        Ok(Self { times })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Index of the last grid point ≤ `t`, if any.
    pub fn last_index_at_or_before(&self, t: f64) -> Option<usize> {
        match self.times.partition_point(|&x| x <= t) {
            0 => None,
            k => Some(k - 1),
        }
    }
}
