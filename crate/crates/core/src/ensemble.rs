//! Weighted pure-state ensembles standing in for time-integrated density
//! matrices. Nothing here ever materializes a dim×dim density matrix: traces
//! and Frobenius norms reduce to Gram matrices of the stored pure states.

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::series::TimeSeries;
use crate::state::StateVector;

/// ρ = Σ_k w_k |ψ_k⟩⟨ψ_k| with positive weights summing to one.
#[derive(Debug, Clone)]
pub struct EnsembleState {
    members: Vec<(f64, StateVector)>,
}

impl EnsembleState {
    /// Build from weighted members; weights must be positive and are
    /// normalized to unit sum.
    pub fn new(members: Vec<(f64, StateVector)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyCollection);
        }
        let total: f64 = members.iter().map(|(w, _)| *w).sum();
        if !(total > 0.0) || members.iter().any(|(w, _)| *w <= 0.0) {
            return Err(Error::EmptyCollection);
        }
        let members = members
            .into_iter()
            .map(|(w, s)| (w / total, s))
            .collect();
        Ok(Self { members })
    }

    /// The pure ensemble of a single state.
    pub fn pure(state: StateVector) -> Self {
        Self {
            members: vec![(1.0, state)],
        }
    }

    pub fn members(&self) -> &[(f64, StateVector)] {
        &self.members
    }

    pub fn weights_sum(&self) -> f64 {
        self.members.iter().map(|(w, _)| w).sum()
    }

    /// Tr[ρσ] from pairwise overlaps.
    pub fn overlap_trace(&self, other: &Self) -> Result<f64> {
        let mut acc = 0.0;
        for (w, psi) in &self.members {
            for (v, phi) in &other.members {
                acc += w * v * psi.dot(phi)?.norm_sqr();
            }
        }
        Ok(acc)
    }

    /// Purity Tr[ρ²].
    pub fn purity(&self) -> f64 {
        self.overlap_trace(self).expect("same-dimension members")
    }
}

/// Trapezoidal weights over the first `count` grid times, normalized to one.
pub(crate) fn trapezoid_weights(times: &[f64], count: usize) -> Vec<f64> {
    assert!(count >= 1 && count <= times.len());
    if count == 1 {
        return vec![1.0];
    }
    let mut w = vec![0.0; count];
    for k in 0..count - 1 {
        let h = 0.5 * (times[k + 1] - times[k]);
        w[k] += h;
        w[k + 1] += h;
    }
    let total: f64 = w.iter().sum();
    for x in &mut w {
        *x /= total;
    }
    w
}

/// The time-integrated state `t⁻¹ ∫₀ᵗ ρ(t′) dt′` over the sampled grid, as a
/// trapezoid-weighted ensemble of the sampled pure states up to `t_max`.
pub fn time_integrated_ensemble(
    states: &[StateVector],
    grid: &TimeGrid,
    t_max: f64,
) -> Result<EnsembleState> {
    assert_eq!(states.len(), grid.len(), "one sampled state per grid time");
    if grid.len() < 2 || t_max < grid.times()[1] {
        return Err(Error::HorizonTooShort {
            t_max,
            second: grid.times().get(1).copied().unwrap_or(f64::NAN),
        });
    }
    let count = grid
        .last_index_at_or_before(t_max)
        .map(|k| k + 1)
        .unwrap_or(0);
    let weights = trapezoid_weights(grid.times(), count);
    EnsembleState::new(
        weights
            .into_iter()
            .zip(states.iter().cloned())
            .collect(),
    )
}

/// Normalized Frobenius distance
/// `D(ρ,σ) = √Tr[(ρ-σ)²] / √(Tr[ρ²] + Tr[σ²])`, always in [0, 1].
pub fn frobenius_distance(rho: &EnsembleState, sigma: &EnsembleState) -> Result<f64> {
    let rr = rho.purity();
    let ss = sigma.purity();
    let rs = rho.overlap_trace(sigma)?;
    let num = (rr + ss - 2.0 * rs).max(0.0).sqrt();
    Ok(num / (rr + ss).sqrt())
}

/// Frobenius distance between the running time-integrated ensembles of two
/// trajectories, at every grid time. Pairwise overlaps are computed once and
/// reweighted per horizon.
pub fn frobenius_tracking_series(
    full: &[StateVector],
    reduced: &[StateVector],
    grid: &TimeGrid,
) -> Result<TimeSeries> {
    let n = grid.len();
    assert_eq!(full.len(), n);
    assert_eq!(reduced.len(), n);
    let gram = |a: &[StateVector], b: &[StateVector]| -> Result<Vec<Vec<f64>>> {
        let mut g = vec![vec![0.0; n]; n];
        for j in 0..n {
            for k in 0..n {
                g[j][k] = a[j].dot(&b[k])?.norm_sqr();
            }
        }
        Ok(g)
    };
    let ff = gram(full, full)?;
    let rr = gram(reduced, reduced)?;
    let fr = gram(full, reduced)?;

    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let w = trapezoid_weights(grid.times(), i + 1);
        let quad = |g: &Vec<Vec<f64>>| -> f64 {
            let mut acc = 0.0;
            for (j, wj) in w.iter().enumerate() {
                for (k, wk) in w.iter().enumerate() {
                    acc += wj * wk * g[j][k];
                }
            }
            acc
        };
        let a = quad(&ff);
        let b = quad(&rr);
        let c = quad(&fr);
        values.push(((a + b - 2.0 * c).max(0.0)).sqrt() / (a + b).sqrt());
    }
    Ok(TimeSeries::new(grid.clone(), values))
}
