//! Thermal entanglement and correlated coherence of two capacitively coupled
//! double-quantum-dot charge qubits.
//!
//! The model Hamiltonian is `Δ1 σx⊗I + Δ2 I⊗σx + V σz⊗σz` in the basis
//! `|LL>, |LR>, |RL>, |RR>`. Every closed-form quantity (spectrum, Gibbs-state
//! elements, spectrum of the concurrence matrix, correlated coherence) has a
//! brute-force counterpart built on a Jacobi eigensolver, and [`validation`]
//! compares the two over a random grid.

pub mod cli;
pub mod correlations;
pub mod error;
pub mod model;
pub mod numkernel;
pub mod parallel;
pub mod scan;
pub mod thermal;
pub mod validation;

pub use correlations::MeasureSet;
pub use error::{Error, Result};
pub use model::{ModelParams, Spectrum, SpectrumSource};
pub use numkernel::{Mat2, Mat4};
pub use thermal::{Temperature, ThermalState};
