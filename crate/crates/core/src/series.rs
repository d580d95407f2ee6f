//! Sampled observables on a time grid and the reductions applied to them:
//! running time averages, ensemble averages, threshold-crossing times.

use crate::error::{Error, Result};
use crate::grid::TimeGrid;

/// Real-valued samples, one per grid time.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Self {
        assert_eq!(grid.len(), values.len(), "series length must match grid");
        assert!(values.iter().all(|v| v.is_finite()), "series contains NaN");
        Self { grid, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Linear interpolation in log-time. Clamps outside the grid.
    pub fn interpolate_log_time(&self, t: f64) -> f64 {
        let times = self.grid.times();
        if t <= times[0] {
            return self.values[0];
        }
        if t >= *times.last().unwrap() {
            return *self.values.last().unwrap();
        }
        let k = times.partition_point(|&x| x <= t) - 1;
        let (t0, t1) = (times[k], times[k + 1]);
        let w = (t.ln() - t0.ln()) / (t1.ln() - t0.ln());
        self.values[k] * (1.0 - w) + self.values[k + 1] * w
    }
}

/// Running time average `t⁻¹ ∫₀ᵗ f dt′` by trapezoidal quadrature on the log
/// grid, with `f` extended over the leading gap `[0, t₀]` by its value at
/// time zero.
pub fn running_average(series: &TimeSeries, value_at_zero: f64) -> TimeSeries {
    let times = series.grid.times();
    let v = &series.values;
    let mut integral = Vec::with_capacity(v.len());
    let mut acc = 0.5 * (value_at_zero + v[0]) * times[0];
    integral.push(acc);
    for k in 1..v.len() {
        acc += 0.5 * (v[k - 1] + v[k]) * (times[k] - times[k - 1]);
        integral.push(acc);
    }
    let values = integral
        .iter()
        .zip(times)
        .map(|(i, &t)| i / t)
        .collect();
    TimeSeries::new(series.grid.clone(), values)
}

/// Unweighted mean of a family of series sharing one grid.
pub fn infinite_temperature_average(collection: &[TimeSeries]) -> Result<TimeSeries> {
    let first = collection.first().ok_or(Error::EmptyCollection)?;
    let n = collection.len() as f64;
    let mut values = vec![0.0; first.len()];
    for s in collection {
        assert_eq!(s.grid, first.grid, "series grids differ");
        for (acc, v) in values.iter_mut().zip(&s.values) {
            *acc += v;
        }
    }
    for v in &mut values {
        *v /= n;
    }
    Ok(TimeSeries::new(first.grid.clone(), values))
}

/// First downward crossing of a threshold. When the series never dips below
/// the threshold the time is censored at the final grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossingTime {
    pub time: f64,
    pub censored: bool,
}

/// First time the series reaches `threshold` from above, log-linearly
/// interpolated between the bracketing grid points.
pub fn relaxation_time(series: &TimeSeries, threshold: f64) -> CrossingTime {
    let times = series.grid.times();
    let v = &series.values;
    if v[0] <= threshold {
        return CrossingTime {
            time: times[0],
            censored: false,
        };
    }
    for k in 1..v.len() {
        if v[k] <= threshold {
            let (v0, v1) = (v[k - 1], v[k]);
            let frac = (v0 - threshold) / (v0 - v1);
            let log_t = times[k - 1].ln() + frac * (times[k].ln() - times[k - 1].ln());
            return CrossingTime {
                time: log_t.exp(),
                censored: false,
            };
        }
    }
    CrossingTime {
        time: *times.last().unwrap(),
        censored: true,
    }
}
