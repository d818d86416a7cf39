//! Gibbs state `ρ(T) = exp(-H/T) / Z` of the two-DQD Hamiltonian.
//!
//! Boltzmann weights are always taken relative to the ground energy, so every
//! weight lies in `[0, 1]` and the shifted partition function is at least one.
//! `T = 0` selects the ground manifold and `T = ∞` gives `I/4`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{build_hamiltonian, ModelParams, SpectrumSource};
use crate::numkernel::{jacobi_eigensolve, Mat4, JACOBI_TOL};

/// Largest structural deviation tolerated by [`gibbs_numeric`].
pub const STRUCTURE_TOL: f64 = 1e-8;

/// Absolute temperature with `k_B = 1`, including the limits `0` and `+∞`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Temperature(f64);

impl Temperature {
    pub const ZERO: Temperature = Temperature(0.0);
    pub const INFINITE: Temperature = Temperature(f64::INFINITY);

    pub fn new(t: f64) -> Result<Self> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::invalid("t", format!("temperature must be >= 0, got {t}")));
        }
        Ok(Temperature(t))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `1/T`, with `β = ∞` at `T = 0` and `β = 0` at `T = ∞`.
    pub fn beta(self) -> f64 {
        1.0 / self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl FromStr for Temperature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") {
            return Ok(Temperature::INFINITE);
        }
        let t: f64 = s
            .parse()
            .map_err(|_| Error::invalid("t", format!("not a number: {s:?}")))?;
        Temperature::new(t)
    }
}

impl fmt::Display for Temperature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Partition function stored as `Z̃ = Σ exp(-(εi - shift)/T)` plus the shift.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionFunction {
    pub shifted: f64,
    pub shift: f64,
}

impl PartitionFunction {
    /// `Z = Z̃ exp(-shift/T)`; overflows to `inf` when not representable.
    pub fn unshifted(&self, t: Temperature) -> f64 {
        self.shifted * (-self.shift * t.beta()).exp()
    }
}

/// Relative energy gap below which two levels count as one ground manifold.
fn degeneracy_tol(ground: f64) -> f64 {
    1e-12 * ground.abs().max(1.0)
}

/// Boltzmann weights relative to the lowest energy, plus that energy.
pub fn boltzmann_weights(energies: &[f64; 4], t: Temperature) -> ([f64; 4], f64) {
    let ground = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let weights = energies.map(|e| {
        let gap = e - ground;
        if t.is_infinite() {
            1.0
        } else if t.is_zero() {
            if gap <= degeneracy_tol(ground) {
                1.0
            } else {
                0.0
            }
        } else {
            (-gap / t.value()).exp()
        }
    });
    (weights, ground)
}

/// The six independent entries of the thermal density matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoElements {
    pub r11: f64,
    pub r12: f64,
    pub r13: f64,
    pub r14: f64,
    pub r22: f64,
    pub r23: f64,
}

impl RhoElements {
    pub fn as_array(&self) -> [f64; 6] {
        [self.r11, self.r12, self.r13, self.r14, self.r22, self.r23]
    }

    /// Assembles the persymmetric pattern
    ///
    /// ```text
    /// ρ11 ρ12 ρ13 ρ14
    /// ρ12 ρ22 ρ23 ρ13
    /// ρ13 ρ23 ρ22 ρ12
    /// ρ14 ρ13 ρ12 ρ11
    /// ```
    pub fn to_matrix(&self) -> Mat4 {
        let RhoElements { r11, r12, r13, r14, r22, r23 } = *self;
        Mat4::from_rows([
            [r11, r12, r13, r14],
            [r12, r22, r23, r13],
            [r13, r23, r22, r12],
            [r14, r13, r12, r11],
        ])
    }

    /// Averages every group of entries that the pattern declares equal.
    pub fn from_matrix(m: &Mat4) -> Self {
        let avg = |cells: &[(usize, usize)]| {
            cells.iter().map(|&ij| m[ij]).sum::<f64>() / cells.len() as f64
        };
        RhoElements {
            r11: avg(&[(0, 0), (3, 3)]),
            r12: avg(&[(0, 1), (1, 0), (2, 3), (3, 2)]),
            r13: avg(&[(0, 2), (2, 0), (1, 3), (3, 1)]),
            r14: avg(&[(0, 3), (3, 0)]),
            r22: avg(&[(1, 1), (2, 2)]),
            r23: avg(&[(1, 2), (2, 1)]),
        }
    }

    /// Largest deviation of `m` from the pattern built from its own averages.
    pub fn structure_defect(m: &Mat4) -> f64 {
        Self::from_matrix(m).to_matrix().max_abs_diff(m)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

/// Gibbs state of the model at one temperature.
#[derive(Clone, Debug, PartialEq)]
pub struct ThermalState {
    pub rho: Mat4,
    pub elements: RhoElements,
    /// Shifted partition function. At `T = 0` `shifted` is the ground degeneracy.
    pub z: PartitionFunction,
    pub params: ModelParams,
    pub temp: Temperature,
    pub source: SpectrumSource,
}

impl ThermalState {
    pub fn purity(&self) -> f64 {
        (self.rho * self.rho).trace()
    }
}

/// `[α²A², α²n², α²An]` of one branch. At `n = 0, V <= 0` the normalizer
/// diverges but the products have the finite limit `[0, 1/2, 0]`.
fn branch_products(n: f64, a: f64) -> [f64; 3] {
    let norm = 2.0 * (n * n + a * a);
    if norm == 0.0 || !norm.is_finite() {
        return [0.0, 0.5, 0.0];
    }
    [a * a / norm, n * n / norm, a * n / norm]
}

/// Gibbs state from the closed-form element expressions.
pub fn gibbs_analytic(p: &ModelParams, t: Temperature) -> Result<ThermalState> {
    let c = p.couplings();
    let (w, shift) = boltzmann_weights(&p.energies(), t);
    let z: f64 = w.iter().sum();
    let [w1, w2, w3, w4] = w;

    let [aa_m, nn_m, an_m] = branch_products(c.n_minus, c.a_minus);
    let [aa_p, nn_p, an_p] = branch_products(c.n_plus, c.a_plus);

    let outer_minus = aa_m * w1 + nn_m * w2;
    let outer_plus = aa_p * w3 + nn_p * w4;
    let inner_minus = nn_m * w1 + aa_m * w2;
    let inner_plus = nn_p * w3 + aa_p * w4;
    let cross_minus = an_m * (w1 - w2);
    let cross_plus = an_p * (w3 - w4);

    let elements = RhoElements {
        r11: (outer_minus + outer_plus) / z,
        r12: (-cross_minus + cross_plus) / z,
        r13: (cross_minus + cross_plus) / z,
        r14: (-outer_minus + outer_plus) / z,
        r22: (inner_minus + inner_plus) / z,
        r23: (-inner_minus + inner_plus) / z,
    };
    Ok(ThermalState {
        rho: elements.to_matrix(),
        elements,
        z: PartitionFunction { shifted: z, shift },
        params: *p,
        temp: t,
        source: SpectrumSource::Analytic,
    })
}

/// Gibbs state by diagonalizing `H` numerically: `ρ = Σ w_i v_i v_iᵀ / Σ w_i`.
pub fn gibbs_numeric(p: &ModelParams, t: Temperature) -> Result<ThermalState> {
    let h = build_hamiltonian(p);
    let d = jacobi_eigensolve(&h, JACOBI_TOL)?;
    let (w, shift) = boltzmann_weights(&d.values, t);
    let z: f64 = w.iter().sum();
    let rho = d
        .vectors
        .iter()
        .zip(w)
        .fold(Mat4::zeros(), |acc, (v, wi)| acc + Mat4::outer(v, v).scale(wi / z));

    let defect = RhoElements::structure_defect(&rho);
    if defect > STRUCTURE_TOL {
        return Err(Error::Consistency(format!(
            "numeric Gibbs state deviates from the persymmetric pattern by {defect:e} at {p:?}, T = {t}"
        )));
    }
    Ok(ThermalState {
        elements: RhoElements::from_matrix(&rho),
        rho,
        z: PartitionFunction { shifted: z, shift },
        params: *p,
        temp: t,
        source: SpectrumSource::Numeric,
    })
}

/// Shifted partition function `Z̃` with its shift (the ground energy).
pub fn partition_function(p: &ModelParams, t: Temperature) -> Result<PartitionFunction> {
    if t.is_zero() {
        return Err(Error::invalid(
            "t",
            "partition function is undefined at T = 0; use the Gibbs state, which takes the limit",
        ));
    }
    let (w, shift) = boltzmann_weights(&p.energies(), t);
    Ok(PartitionFunction {
        shifted: w.iter().sum(),
        shift,
    })
}
