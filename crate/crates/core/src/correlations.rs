//! Concurrence, l1-norm coherence and correlated coherence of the thermal state.
//!
//! The Gibbs state commutes with the swap-both parity `σx ⊗ σx`, and so does
//! the spin flip `σy ⊗ σy`. In the parity basis `R = ρ (σy⊗σy) ρ* (σy⊗σy)`
//! splits into two 2×2 blocks, one per branch, with block entries
//!
//! ```text
//! a± = ρ11 ± ρ14,   b± = ρ22 ± ρ23,   c± = ρ12 ± ρ13
//! ```
//!
//! Each block contributes the eigenvalue pair `Θ/2 ± ½√(Ξ² - Σ²)` with
//! `Θ = a² - 2c² + b²`, `Ξ = a² - b²` and `Σ = 2c(a - b)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{conjugate, jacobi_eigensolve, kron2, pauli, Mat, Mat2, Mat4, JACOBI_TOL};
use crate::thermal::{RhoElements, ThermalState};

/// Negative values of `Ξ² - Σ²` or of `R`-eigenvalues above this are rounding noise.
pub const CLAMP_TOL: f64 = 1e-9;

/// Eigenvalues of `R` with the intermediate scalars of each parity branch.
///
/// Branch arrays are indexed `[minus, plus]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RSpectrum {
    /// All four eigenvalues, descending.
    pub lambda: [f64; 4],
    /// `[λ1, λ2, λ3, λ4]` in branch order: minus pair first, larger root first.
    pub by_branch: [f64; 4],
    pub theta: [f64; 2],
    pub xi: [f64; 2],
    pub sigma: [f64; 2],
}

fn clamp_small_negative(x: f64, what: &str) -> Result<f64> {
    if x >= 0.0 {
        Ok(x)
    } else if x >= -CLAMP_TOL {
        Ok(0.0)
    } else {
        Err(Error::Consistency(format!("{what} = {x:e} is negative beyond clamp tolerance")))
    }
}

/// Closed-form spectrum of `R` from the six density-matrix elements.
pub fn r_spectrum(e: &RhoElements) -> Result<RSpectrum> {
    let mut by_branch = [0.0; 4];
    let mut theta = [0.0; 2];
    let mut xi = [0.0; 2];
    let mut sigma = [0.0; 2];
    for (k, sign) in [-1.0, 1.0].into_iter().enumerate() {
        let a = e.r11 + sign * e.r14;
        let b = e.r22 + sign * e.r23;
        let c = e.r12 + sign * e.r13;
        theta[k] = a * a - 2.0 * c * c + b * b;
        xi[k] = a * a - b * b;
        sigma[k] = 2.0 * c * (a - b);
        let disc = clamp_small_negative(xi[k] * xi[k] - sigma[k] * sigma[k], "Ξ² - Σ²")?;
        let hi = clamp_small_negative(0.5 * (theta[k] + disc.sqrt()), "λ")?;
        // The smaller root through the product of the pair, (ab - c²)², which
        // keeps its relative accuracy when it is many orders below the larger.
        let det = a * b - c * c;
        let lo = if hi > 0.0 {
            det * det / hi
        } else {
            clamp_small_negative(0.5 * (theta[k] - disc.sqrt()), "λ")?
        };
        by_branch[2 * k] = hi;
        by_branch[2 * k + 1] = lo;
    }
    let mut lambda = by_branch;
    lambda.sort_by(|x, y| y.total_cmp(x));
    Ok(RSpectrum {
        lambda,
        by_branch,
        theta,
        xi,
        sigma,
    })
}

/// Branch eigenvalues produced when the first factor of `Σ±` is taken as
/// `(ρ13 ± ρ14)` instead of `(ρ12 ± ρ13)`. This variant does not reproduce the
/// spectrum of `R`; it is evaluated only so the validation report can show by
/// how much. Roots with a negative discriminant come back as `NaN`.
pub fn r_eigenvalues_sigma_variant(e: &RhoElements) -> [f64; 4] {
    let mut out = [f64::NAN; 4];
    for (k, sign) in [-1.0, 1.0].into_iter().enumerate() {
        let a = e.r11 + sign * e.r14;
        let b = e.r22 + sign * e.r23;
        let c = e.r12 + sign * e.r13;
        let theta = a * a - 2.0 * c * c + b * b;
        let xi = a * a - b * b;
        let sigma = 2.0 * (e.r13 + sign * e.r14) * (-sign * e.r11 - e.r14 + e.r23 + sign * e.r22);
        let root = (xi * xi - sigma * sigma).sqrt();
        out[2 * k] = 0.5 * (theta + root);
        out[2 * k + 1] = 0.5 * (theta - root);
    }
    out
}

/// `max{0, s1 - s2 - s3 - s4}` over descending square roots of the eigenvalues.
pub fn wootters_combination(lambda: &[f64; 4]) -> f64 {
    let mut s = lambda.map(|l| l.max(0.0).sqrt());
    s.sort_by(|x, y| y.total_cmp(x));
    (s[0] - s[1] - s[2] - s[3]).max(0.0)
}

/// `max{0, |√λ1 - √λ3| - √λ2 - √λ4}` with branch-ordered eigenvalues.
///
/// Since the larger root of each branch comes first, this always agrees with
/// [`wootters_combination`]; both are kept so the equivalence stays checked.
pub fn branch_paired_concurrence(r: &RSpectrum) -> f64 {
    let [s1, s2, s3, s4] = r.by_branch.map(|l| l.max(0.0).sqrt());
    ((s1 - s3).abs() - s2 - s4).max(0.0)
}

/// Concurrence from the closed-form `R` spectrum.
pub fn concurrence_analytic(s: &ThermalState) -> Result<f64> {
    Ok(wootters_combination(&r_spectrum(&s.elements)?.lambda))
}

/// Square roots of the `R` eigenvalues, descending, by direct diagonalization.
///
/// `R` is similar to `(√ρ Y √ρ)²` with `Y = σy⊗σy`, and `√ρ Y √ρ` is real
/// symmetric for real `ρ`, so its absolute eigenvalues are the `√λ` directly.
pub fn r_sqrt_eigenvalues_numeric(rho: &Mat4) -> Result<[f64; 4]> {
    let d = jacobi_eigensolve(&rho.symmetrized(), JACOBI_TOL)?;
    for &p in &d.values {
        clamp_small_negative(p, "density-matrix eigenvalue")?;
    }
    let sqrt_rho = d.map_spectrum(|p| p.max(0.0).sqrt());
    let m = (sqrt_rho * pauli::yy() * sqrt_rho).symmetrized();
    let mut mags = jacobi_eigensolve(&m, JACOBI_TOL)?.values.map(f64::abs);
    mags.sort_by(|x, y| y.total_cmp(x));
    Ok(mags)
}

/// Eigenvalues of `R`, descending, by direct diagonalization.
pub fn r_eigenvalues_numeric(rho: &Mat4) -> Result<[f64; 4]> {
    Ok(r_sqrt_eigenvalues_numeric(rho)?.map(|s| s * s))
}

/// Concurrence by diagonalization, independent of the closed-form branches.
pub fn concurrence_numeric(s: &ThermalState) -> Result<f64> {
    let [s1, s2, s3, s4] = r_sqrt_eigenvalues_numeric(&s.rho)?;
    Ok((s1 - s2 - s3 - s4).max(0.0))
}

/// State of the first dot: `[[ρ11+ρ22, 2ρ13], [2ρ13, ρ11+ρ22]]`.
pub fn reduced_a(s: &ThermalState) -> Mat2 {
    let e = &s.elements;
    let d = e.r11 + e.r22;
    Mat2::from_rows([[d, 2.0 * e.r13], [2.0 * e.r13, d]])
}

/// State of the second dot: `[[ρ11+ρ22, 2ρ12], [2ρ12, ρ11+ρ22]]`.
pub fn reduced_b(s: &ThermalState) -> Mat2 {
    let e = &s.elements;
    let d = e.r11 + e.r22;
    Mat2::from_rows([[d, 2.0 * e.r12], [2.0 * e.r12, d]])
}

/// Traces out the second qubit, leaving the state of the first.
pub fn partial_trace_second(m: &Mat4) -> Mat2 {
    let mut out = Mat2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = (0..2).map(|k| m[(2 * i + k, 2 * j + k)]).sum();
        }
    }
    out
}

/// Traces out the first qubit, leaving the state of the second.
pub fn partial_trace_first(m: &Mat4) -> Mat2 {
    let mut out = Mat2::zeros();
    for k in 0..2 {
        for l in 0..2 {
            out[(k, l)] = (0..2).map(|i| m[(2 * i + k, 2 * i + l)]).sum();
        }
    }
    out
}

/// Local rotation `[[cos θ, -e^{iφ} sin θ], [e^{-iφ} sin θ, cos θ]]`; only
/// `φ = 0` is supported because every state in this engine is real.
pub fn local_unitary(theta: f64, phi: f64) -> Result<Mat2> {
    if phi != 0.0 {
        return Err(Error::Unsupported {
            name: "phi",
            reason: format!("only phi = 0 (real rotations) is supported, got {phi}"),
        });
    }
    if !theta.is_finite() {
        return Err(Error::invalid("theta", format!("must be finite, got {theta}")));
    }
    let (s, c) = theta.sin_cos();
    Ok(Mat2::from_rows([[c, -s], [s, c]]))
}

/// Sum of `|m_ij|` over `i ≠ j`.
pub fn l1_coherence<const N: usize>(m: &Mat<N>) -> f64 {
    let mut sum = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                sum += m[(i, j)].abs();
            }
        }
    }
    sum
}

/// Coherence and entanglement measures in the local basis rotated by `θ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureSet {
    pub concurrence: f64,
    /// `C_l1(ρ_AB)` in the rotated basis.
    pub c_l1_total: f64,
    /// `C_l1(ρ_A) + C_l1(ρ_B)` in the rotated basis.
    pub c_l1_local: f64,
    /// `c_l1_total - c_l1_local`.
    pub c_cc: f64,
    pub theta: f64,
    pub phi: f64,
}

/// Rotates `ρ_AB` by `U(θ) ⊗ U(θ)` and both reduced states by `U(θ)`, then
/// measures the global and local l1 coherence.
pub fn correlated_coherence(s: &ThermalState, theta: f64) -> Result<MeasureSet> {
    let u = local_unitary(theta, 0.0)?;
    let rotated = conjugate(&kron2(&u, &u), &s.rho)?;
    let c_l1_total = l1_coherence(&rotated);
    let c_l1_local = l1_coherence(&conjugate(&u, &reduced_a(s))?)
        + l1_coherence(&conjugate(&u, &reduced_b(s))?);
    Ok(MeasureSet {
        concurrence: concurrence_analytic(s)?,
        c_l1_total,
        c_l1_local,
        c_cc: c_l1_total - c_l1_local,
        theta,
        phi: 0.0,
    })
}

/// Correlated coherence in the locally incoherent basis `θ = π/4`:
/// `|ρ11 + ρ14 - ρ22 - ρ23| + |ρ11 - ρ14 - ρ22 + ρ23|`.
pub fn correlated_coherence_closed_form(s: &ThermalState) -> f64 {
    let e = &s.elements;
    (e.r11 + e.r14 - e.r22 - e.r23).abs() + (e.r11 - e.r14 - e.r22 + e.r23).abs()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_4;

    use super::*;
    use crate::model::{ModelParams, SpectrumSource};
    use crate::thermal::{gibbs_analytic, gibbs_numeric, PartitionFunction, Temperature};

    fn state(d1: f64, d2: f64, v: f64, t: f64) -> ThermalState {
        gibbs_analytic(
            &ModelParams::new(d1, d2, v).unwrap(),
            Temperature::new(t).unwrap(),
        )
        .unwrap()
    }

    /// Wraps an arbitrary density matrix; only `rho` and `elements` are read.
    fn from_rho(rho: Mat4) -> ThermalState {
        ThermalState {
            elements: RhoElements::from_matrix(&rho),
            rho,
            z: PartitionFunction { shifted: 1.0, shift: 0.0 },
            params: ModelParams::new(0.0, 0.0, 0.0).unwrap(),
            temp: Temperature::ZERO,
            source: SpectrumSource::Numeric,
        }
    }

    #[test]
    fn strong_and_weak_coupling_ground_concurrence() {
        let c = concurrence_analytic(&state(10.0, 15.0, 160.0, 0.0)).unwrap();
        assert!((c - 0.988).abs() < 2e-3, "{c}");
        let c = concurrence_analytic(&state(10.0, 15.0, 10.0 / 6.0, 0.0)).unwrap();
        assert!((c - 0.066).abs() < 2e-3, "{c}");
    }

    #[test]
    fn zero_coulomb_equal_tunneling_is_separable() {
        for t in [0.0, 0.1, 1.0, 10.0] {
            let s = gibbs_analytic(&ModelParams::new(3.0, 3.0, 0.0).unwrap(), Temperature::new(t).unwrap()).unwrap();
            let c = concurrence_analytic(&s).unwrap();
            assert!(c < 1e-12, "T = {t}: {c:e}");
            assert!(concurrence_numeric(&s).unwrap() < 1e-9);
        }
    }

    #[test]
    fn pure_symmetric_state_concurrence() {
        for (a, b) in [(0.705_f64, 0.055_f64), (0.3, 0.6), (0.5, 0.5)] {
            let norm = (2.0 * a * a + 2.0 * b * b).sqrt();
            let (a, b) = (a / norm, b / norm);
            let psi = [a, b, b, a];
            let s = from_rho(Mat4::outer(&psi, &psi));
            let expected = 2.0 * (a * a - b * b).abs();
            assert!((concurrence_numeric(&s).unwrap() - expected).abs() < 1e-12);
            assert!((concurrence_analytic(&s).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn maximally_mixed_measures_vanish() {
        let s = state(10.0, 15.0, 160.0, f64::INFINITY);
        assert_eq!(concurrence_numeric(&s).unwrap(), 0.0);
        for theta in [0.0, 0.3, FRAC_PI_4] {
            let m = correlated_coherence(&s, theta).unwrap();
            assert_eq!(m.concurrence, 0.0);
            assert!(m.c_l1_total.abs() < 1e-15 && m.c_l1_local.abs() < 1e-15 && m.c_cc.abs() < 1e-15);
        }
        assert_eq!(correlated_coherence_closed_form(&s), 0.0);
        assert_eq!(reduced_a(&s), Mat2::identity().scale(0.5));
        assert_eq!(reduced_b(&s), Mat2::identity().scale(0.5));
    }

    #[test]
    fn r_spectrum_matches_frozen_values() {
        // (Δ1, Δ2, V, T) = (10, 15, 10, 5); numpy eigvals of R.
        let s = state(10.0, 15.0, 10.0, 5.0);
        let r = r_spectrum(&s.elements).unwrap();
        let want = [
            1.267_280_884_491_196_7e-1,
            1.359_434_425_456_191_2e-3,
            2.740_602_018_072_022e-7,
            2.939_891_897_732_660_4e-9,
        ];
        for (got, want) in r.lambda.iter().zip(want) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert!((concurrence_analytic(&s).unwrap() - 0.318_540_650_848_099_8).abs() < 1e-10);
        assert!((concurrence_numeric(&s).unwrap() - 0.318_540_650_848_099_8).abs() < 1e-10);
    }

    #[test]
    fn sigma_variant_does_not_reproduce_r() {
        let s = state(10.0, 15.0, 10.0, 5.0);
        let variant = r_eigenvalues_sigma_variant(&s.elements);
        let exact = r_spectrum(&s.elements).unwrap().by_branch;
        let agrees = variant
            .iter()
            .zip(exact)
            .all(|(v, e)| (v - e).abs() < 1e-9);
        assert!(!agrees);
    }

    #[test]
    fn paired_and_standard_combinations_agree() {
        for (d1, d2, v, t) in [(10.0, 15.0, 160.0, 10.0), (1.0, 8.0, 20.0, 3.0), (3.0, 7.0, 2.0, 1.3)] {
            let r = r_spectrum(&state(d1, d2, v, t).elements).unwrap();
            assert!((branch_paired_concurrence(&r) - wootters_combination(&r.lambda)).abs() < 1e-15);
        }
    }

    #[test]
    fn reduced_states_from_elements_and_partial_trace() {
        let s = state(10.0, 15.0, 160.0, 0.0);
        let ra = reduced_a(&s);
        assert_eq!(ra.diagonal(), [0.5, 0.5]);
        // -2·0.05474·0.70498 from the ground-state outer product.
        assert!((ra[(0, 1)] + 0.077_188_440_136_804_91).abs() < 1e-12);
        let rb = reduced_b(&s);
        assert!((rb[(0, 1)] - ra[(0, 1)]).abs() < 1e-12);

        let s = gibbs_numeric(&ModelParams::new(3.0, 7.0, 2.0).unwrap(), Temperature::new(1.3).unwrap()).unwrap();
        assert!(partial_trace_second(&s.rho).max_abs_diff(&reduced_a(&s)) < 1e-12);
        assert!(partial_trace_first(&s.rho).max_abs_diff(&reduced_b(&s)) < 1e-12);
    }

    #[test]
    fn local_unitary_examples() {
        assert_eq!(local_unitary(0.0, 0.0).unwrap(), Mat2::identity());
        assert!(matches!(local_unitary(0.1, 0.2), Err(Error::Unsupported { name: "phi", .. })));
        let u = local_unitary(FRAC_PI_4, 0.0).unwrap();
        let twice = u * u;
        let swap = Mat2::from_rows([[0.0, -1.0], [1.0, 0.0]]);
        assert!(twice.max_abs_diff(&swap) < 1e-15);
        let s = state(10.0, 15.0, 10.0, 4.0);
        let rotated = conjugate(&u, &reduced_a(&s)).unwrap();
        assert!(rotated[(0, 1)].abs() < 1e-12);
    }

    #[test]
    fn l1_examples() {
        assert_eq!(l1_coherence(&Mat4::from_diag([0.1, 0.2, 0.3, 0.4])), 0.0);
        let s = state(10.0, 15.0, 160.0, 0.0);
        assert!((l1_coherence(&s.rho) - 1.308_753_760_547_217_5).abs() < 1e-12);
    }

    #[test]
    fn incoherent_basis_captures_ground_entanglement() {
        let s = state(10.0, 15.0, 160.0, 0.0);
        let m = correlated_coherence(&s, FRAC_PI_4).unwrap();
        assert!(m.c_l1_local < 1e-12);
        assert!((m.c_cc - m.c_l1_total).abs() < 1e-12);
        assert!((m.c_cc - m.concurrence).abs() < 1e-12);
        assert!((correlated_coherence_closed_form(&s) - m.c_cc).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_pipeline_frozen() {
        let s = state(10.0, 15.0, 160.0, 10.0);
        let cf = correlated_coherence_closed_form(&s);
        assert!((cf - 0.993_227_915_426_825_8).abs() < 1e-12);
        let m = correlated_coherence(&s, FRAC_PI_4).unwrap();
        assert!((m.c_cc - cf).abs() < 1e-12);
    }
}
