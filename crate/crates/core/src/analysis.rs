//! Curve-level diagnostics: plateau detection, rescaled-curve collapse,
//! rank correlation, ground-state scans across the coupling axis.

use crate::error::Result;
use crate::gas::{build_gas_hamiltonian, build_strip, enumerate_sector, Occupation};
use crate::krylov::{lanczos_ground_state, GroundStateOptions};
use crate::par;
use crate::series::TimeSeries;

/// A time window over which a correlator stalls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateauWindow {
    pub t_start: f64,
    pub t_end: f64,
    /// Mean series value across the window.
    pub level: f64,
}

/// Find the widest window `[t₁, t₂]` with `t₂/t₁ ≥ min_ratio` over which the
/// series varies by less than `max_variation` while staying inside
/// `level_bounds`.
pub fn find_plateau(
    series: &TimeSeries,
    min_ratio: f64,
    max_variation: f64,
    level_bounds: (f64, f64),
) -> Option<PlateauWindow> {
    let times = series.grid.times();
    let v = &series.values;
    let n = v.len();
    let mut best: Option<(f64, PlateauWindow)> = None;
    for start in 0..n {
        if v[start] <= level_bounds.0 || v[start] >= level_bounds.1 {
            continue;
        }
        let mut lo = v[start];
        let mut hi = v[start];
        let mut sum = 0.0;
        let mut count = 0usize;
        for end in start..n {
            if v[end] <= level_bounds.0 || v[end] >= level_bounds.1 {
                break;
            }
            lo = lo.min(v[end]);
            hi = hi.max(v[end]);
            if hi - lo >= max_variation {
                break;
            }
            sum += v[end];
            count += 1;
            let ratio = times[end] / times[start];
            if ratio >= min_ratio {
                let window = PlateauWindow {
                    t_start: times[start],
                    t_end: times[end],
                    level: sum / count as f64,
                };
                if best.as_ref().map_or(true, |(r, _)| ratio > *r) {
                    best = Some((ratio, window));
                }
            }
        }
    }
    best.map(|(_, w)| w)
}

/// True when the series dips below `threshold` at some time after `t_after`.
pub fn decays_below_after(series: &TimeSeries, threshold: f64, t_after: f64) -> bool {
    series
        .grid
        .times()
        .iter()
        .zip(&series.values)
        .any(|(&t, &v)| t > t_after && v < threshold)
}

/// Time spent inside a value band `[lo, hi]`: ratio of the last to the first
/// grid time whose value falls inside the band (1.0 when never entered).
pub fn band_dwell_ratio(series: &TimeSeries, lo: f64, hi: f64) -> f64 {
    let mut first = None;
    let mut last = None;
    for (&t, &v) in series.grid.times().iter().zip(&series.values) {
        if v >= lo && v <= hi {
            first.get_or_insert(t);
            last = Some(t);
        }
    }
    match (first, last) {
        (Some(a), Some(b)) => b / a,
        _ => 1.0,
    }
}

/// Sup-distance between two curves sampled at (x, value) points, compared on
/// a shared log-x grid restricted to where both stay at or above `floor`.
/// Returns `None` when the supports do not overlap.
pub fn sup_distance_on_common_support(
    xa: &[f64],
    va: &[f64],
    xb: &[f64],
    vb: &[f64],
    floor: f64,
) -> Option<f64> {
    let lo = xa[0].max(xb[0]);
    let hi = xa.last().unwrap().min(*xb.last().unwrap());
    if !(hi > lo) {
        return None;
    }
    let samples = 400;
    let mut sup: Option<f64> = None;
    for k in 0..=samples {
        let x = (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / samples as f64).exp();
        let a = interp_log(xa, va, x);
        let b = interp_log(xb, vb, x);
        if a >= floor && b >= floor {
            let d = (a - b).abs();
            sup = Some(sup.map_or(d, |s: f64| s.max(d)));
        }
    }
    sup
}

fn interp_log(xs: &[f64], vs: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return vs[0];
    }
    if x >= *xs.last().unwrap() {
        return *vs.last().unwrap();
    }
    let k = xs.partition_point(|&t| t <= x) - 1;
    let w = (x.ln() - xs[k].ln()) / (xs[k + 1].ln() - xs[k].ln());
    vs[k] * (1.0 - w) + vs[k + 1] * w
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let rx = ranks(xs);
    let ry = ranks(ys);
    pearson(&rx, &ry)
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap());
    let mut r = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

/// Centered second difference `v(x-h) - 2v(x) + v(x+h)` from three samples.
pub fn second_difference(left: f64, center: f64, right: f64) -> f64 {
    left - 2.0 * center + right
}

/// First time the series rises to `frac` of the way from its minimum to its
/// final value, log-linearly interpolated. `None` when the series never
/// rises.
pub fn rise_time(series: &TimeSeries, frac: f64) -> Option<f64> {
    let times = series.grid.times();
    let v = &series.values;
    let v_min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let v_end = *v.last().unwrap();
    if v_end <= v_min {
        return None;
    }
    let target = v_min + frac * (v_end - v_min);
    let start = v.iter().position(|&x| x == v_min).unwrap_or(0);
    for k in start..v.len() {
        if v[k] >= target {
            if k == 0 || v[k - 1] >= target {
                return Some(times[k]);
            }
            let w = (target - v[k - 1]) / (v[k] - v[k - 1]);
            let log_t = times[k - 1].ln() + w * (times[k].ln() - times[k - 1].ln());
            return Some(log_t.exp());
        }
    }
    None
}

/// One row of the ground-state energy scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyScanRow {
    pub sites: usize,
    pub particles: usize,
    pub lambda: f64,
    pub energy: f64,
}

/// Ground-state energies across a coupling grid for a family of strip sizes
/// at fixed vacancy count. The seed puts all vacancies on the leading sites,
/// which always lies in the ergodic sector.
pub fn energy_scan(
    sizes: &[usize],
    vacancies: usize,
    lambdas: &[f64],
    tol: f64,
) -> Result<Vec<EnergyScanRow>> {
    let mut rows = Vec::new();
    for &l in sizes {
        let geom = build_strip(l)?;
        let holes: Vec<usize> = (0..vacancies).collect();
        let seed = Occupation::from_vacancies(l, &holes);
        let basis = enumerate_sector(&geom, l - vacancies, seed)?;
        let energies: Vec<Result<f64>> = par::map_slice(lambdas, |&lambda| {
            let h = build_gas_hamiltonian(&basis, lambda)?;
            let (e0, _) = lanczos_ground_state(&h, tol, &GroundStateOptions::default())?;
            Ok(e0)
        });
        for (&lambda, e) in lambdas.iter().zip(energies) {
            rows.push(EnergyScanRow {
                sites: l,
                particles: l - vacancies,
                lambda,
                energy: e?,
            });
        }
    }
    Ok(rows)
}
