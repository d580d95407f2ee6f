//! Exact-dynamics engine for two kinetically constrained lattice models: a
//! one-dimensional quantum lattice gas with neighbor-blocked hopping and the
//! square-lattice quantum dimer model.
//!
//! The crate enumerates dynamically connected sector bases over bit-encoded
//! classical configurations, assembles the sparse sector Hamiltonians,
//! propagates states exactly (dense spectral path) or through a Lanczos
//! subspace (Krylov path), and evaluates the relaxation observables built on
//! top: two-time autocorrelators and their running averages, relaxation
//! times, entanglement entropies over sliding bipartitions, projection
//! weights and Frobenius distances of time-integrated states, occupation and
//! flippability maps and the dimer correlation length.
//!
//! Sweeps over initial states, couplings and partition windows run in
//! parallel with the default `parallel` feature; building with
//! `--no-default-features` produces a fully sequential binary with
//! bit-identical outputs.

pub mod analysis;
pub mod correlate;
pub mod dimer;
pub mod ensemble;
pub mod entropy;
pub mod error;
pub mod export;
pub mod gas;
pub mod grid;
pub mod krylov;
pub mod par;
pub mod reference;
pub mod series;
pub mod sparse;
pub mod spectral;
pub mod state;

pub use error::{Error, Result};
pub use grid::TimeGrid;
pub use series::{relaxation_time, running_average, CrossingTime, TimeSeries};
pub use sparse::SparseHermitianMatrix;
pub use state::StateVector;
