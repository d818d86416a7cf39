//! Hamiltonian of two capacitively coupled double quantum dots and its spectrum.
//!
//! Basis order is fixed everywhere as `|LL>, |LR>, |RL>, |RR>` (indices 0..3),
//! with `|L> = |0>` and `|R> = |1>`. Energies are indexed `ε1..ε4` as
//! `[+r₋, -r₋, +r₊, -r₊]` where `r± = √(n±² + V²)` and `n± = Δ1 ± Δ2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{jacobi_eigensolve, kron2, pauli, Mat2, Mat4, JACOBI_TOL};

/// Coupling constants of the two-DQD model, in units with `ħ = k_B = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Tunneling strength of the first double dot.
    pub delta1: f64,
    /// Tunneling strength of the second double dot.
    pub delta2: f64,
    /// Coulomb coupling between the two double dots.
    pub v: f64,
}

impl ModelParams {
    pub fn new(delta1: f64, delta2: f64, v: f64) -> Result<Self> {
        for (name, x) in [("delta1", delta1), ("delta2", delta2), ("v", v)] {
            if !x.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {x}")));
            }
        }
        Ok(ModelParams { delta1, delta2, v })
    }

    pub fn couplings(&self) -> DerivedCouplings {
        DerivedCouplings::from_params(self)
    }

    /// Closed-form energies `[ε1, ε2, ε3, ε4]`.
    pub fn energies(&self) -> [f64; 4] {
        let r_minus = (self.delta1 - self.delta2).hypot(self.v);
        let r_plus = (self.delta1 + self.delta2).hypot(self.v);
        [r_minus, -r_minus, r_plus, -r_plus]
    }

    /// Largest coupling magnitude; the natural energy scale for tolerances.
    pub fn energy_scale(&self) -> f64 {
        self.delta1.abs().max(self.delta2.abs()).max(self.v.abs())
    }
}

/// Parity sector of the swap-both operator `σx ⊗ σx` that block-diagonalizes `H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// Odd sector, holding `|φ1>` and `|φ2>`.
    Minus,
    /// Even sector, holding `|φ3>` and `|φ4>`.
    Plus,
}

/// Combinations of the couplings that parametrize the closed-form eigenvectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedCouplings {
    pub n_minus: f64,
    pub n_plus: f64,
    pub a_minus: f64,
    pub a_plus: f64,
    pub alpha_minus: f64,
    pub alpha_plus: f64,
}

impl DerivedCouplings {
    pub fn from_params(p: &ModelParams) -> Self {
        let n_minus = p.delta1 - p.delta2;
        let n_plus = p.delta1 + p.delta2;
        let a_minus = amplitude(n_minus, p.v);
        let a_plus = amplitude(n_plus, p.v);
        DerivedCouplings {
            n_minus,
            n_plus,
            a_minus,
            a_plus,
            alpha_minus: normalizer(n_minus, a_minus),
            alpha_plus: normalizer(n_plus, a_plus),
        }
    }

    /// `true` when the branch normalizer `α` is finite, i.e. the closed-form
    /// eigenvectors of that branch exist.
    pub fn branch_is_regular(&self, branch: Branch) -> bool {
        match branch {
            Branch::Minus => self.alpha_minus.is_finite(),
            Branch::Plus => self.alpha_plus.is_finite(),
        }
    }

    /// Closed-form eigenvectors `[φ1, φ2]` or `[φ3, φ4]` of one branch.
    pub fn branch_states(&self, branch: Branch) -> Option<[[f64; 4]; 2]> {
        if !self.branch_is_regular(branch) {
            return None;
        }
        Some(match branch {
            Branch::Minus => {
                let (a, n, k) = (self.a_minus, self.n_minus, self.alpha_minus);
                [
                    // A₋(-|LL> + |RR>) + n₋(|LR> - |RL>)
                    [-k * a, k * n, -k * n, k * a],
                    // n₋(-|LL> + |RR>) + A₋(-|LR> + |RL>)
                    [-k * n, -k * a, k * a, k * n],
                ]
            }
            Branch::Plus => {
                let (a, n, k) = (self.a_plus, self.n_plus, self.alpha_plus);
                [
                    // A₊(|LL> + |RR>) + n₊(|LR> + |RL>)
                    [k * a, k * n, k * n, k * a],
                    // n₊(|LL> + |RR>) - A₊(|LR> + |RL>)
                    [k * n, -k * a, -k * a, k * n],
                ]
            }
        })
    }
}

/// `A = V + √(n² + V²)`, evaluated without cancellation when `V < 0`.
fn amplitude(n: f64, v: f64) -> f64 {
    let r = n.hypot(v);
    if v >= 0.0 {
        v + r
    } else {
        n * n / (r - v)
    }
}

fn normalizer(n: f64, a: f64) -> f64 {
    1.0 / (std::f64::consts::SQRT_2 * n.hypot(a))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumSource {
    Analytic,
    Numeric,
}

impl SpectrumSource {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectrumSource::Analytic => "analytic",
            SpectrumSource::Numeric => "numeric",
        }
    }
}

/// Energies `ε1..ε4` paired with normalized eigenvectors `|φ1>..|φ4>`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub energies: [f64; 4],
    pub states: [[f64; 4]; 4],
    pub source: SpectrumSource,
}

impl Spectrum {
    pub fn ground_energy(&self) -> f64 {
        self.energies.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Energies in ascending order.
    pub fn sorted_energies(&self) -> [f64; 4] {
        let mut e = self.energies;
        e.sort_by(f64::total_cmp);
        e
    }

    /// Largest `|H φ - ε φ|` over the four pairs.
    pub fn max_residual(&self, h: &Mat4) -> f64 {
        self.energies
            .iter()
            .zip(&self.states)
            .map(|(&e, v)| {
                let hv = h.mul_vec(v);
                (0..4).fold(0.0_f64, |acc, i| acc.max((hv[i] - e * v[i]).abs()))
            })
            .fold(0.0, f64::max)
    }
}

/// `Δ1 σx⊗I + Δ2 I⊗σx + V σz⊗σz`.
pub fn build_hamiltonian(p: &ModelParams) -> Mat4 {
    let id = Mat2::identity();
    kron2(&pauli::x(), &id).scale(p.delta1)
        + kron2(&id, &pauli::x()).scale(p.delta2)
        + kron2(&pauli::z(), &pauli::z()).scale(p.v)
}

/// Closed-form spectrum, or `None` when a branch normalizer diverges
/// (`n = 0` together with `V ≤ 0`).
pub fn try_analytic_spectrum(p: &ModelParams) -> Option<Spectrum> {
    let c = p.couplings();
    let [s1, s2] = c.branch_states(Branch::Minus)?;
    let [s3, s4] = c.branch_states(Branch::Plus)?;
    Some(Spectrum {
        energies: p.energies(),
        states: [s1, s2, s3, s4],
        source: SpectrumSource::Analytic,
    })
}

/// Closed-form spectrum, falling back to [`numeric_spectrum`] for degenerate
/// normalizers. The `source` field records which path produced it.
pub fn analytic_spectrum(p: &ModelParams) -> Result<Spectrum> {
    match try_analytic_spectrum(p) {
        Some(s) => Ok(s),
        None => numeric_spectrum(p),
    }
}

fn parity(v: &[f64; 4]) -> [f64; 4] {
    [v[3], v[2], v[1], v[0]]
}

fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Spectrum from the Jacobi eigensolver, relabeled to the `ε1..ε4` convention.
///
/// Eigenvectors are first made parity-pure (clusters of near-equal eigenvalues
/// are re-split by projecting onto the two parity sectors), then assigned to a
/// branch by parity and ordered by energy within it. Each vector's sign is
/// aligned with the closed-form vector of the same label when that exists.
pub fn numeric_spectrum(p: &ModelParams) -> Result<Spectrum> {
    let h = build_hamiltonian(p);
    let decomp = jacobi_eigensolve(&h, JACOBI_TOL)?;
    let cluster_tol = 1e-8 * p.energy_scale().max(1.0);

    let mut odd: Vec<[f64; 4]> = Vec::with_capacity(2);
    let mut even: Vec<[f64; 4]> = Vec::with_capacity(2);
    let mut start = 0;
    while start < 4 {
        let mut end = start + 1;
        while end < 4 && decomp.values[end] - decomp.values[end - 1] <= cluster_tol {
            end += 1;
        }
        let mut kept = 0;
        for v in &decomp.vectors[start..end] {
            let pv = parity(v);
            let plus: [f64; 4] = std::array::from_fn(|i| 0.5 * (v[i] + pv[i]));
            let minus: [f64; 4] = std::array::from_fn(|i| 0.5 * (v[i] - pv[i]));
            kept += usize::from(push_orthonormal(&mut even, plus));
            kept += usize::from(push_orthonormal(&mut odd, minus));
        }
        if kept != end - start {
            return Err(Error::Consistency(format!(
                "parity split of eigenvalue cluster {start}..{end} produced {kept} vectors"
            )));
        }
        start = end;
    }
    if odd.len() != 2 || even.len() != 2 {
        return Err(Error::Consistency(format!(
            "expected two eigenvectors per parity sector, found {} odd and {} even",
            odd.len(),
            even.len()
        )));
    }

    let rayleigh = |v: &[f64; 4]| dot(v, &h.mul_vec(v));
    let order_pair = |pair: Vec<[f64; 4]>| {
        let (a, b) = (pair[0], pair[1]);
        let (ea, eb) = (rayleigh(&a), rayleigh(&b));
        if ea >= eb {
            ([a, b], [ea, eb])
        } else {
            ([b, a], [eb, ea])
        }
    };
    let ([s1, s2], [e1, e2]) = order_pair(odd);
    let ([s3, s4], [e3, e4]) = order_pair(even);
    let mut states = [s1, s2, s3, s4];

    let c = p.couplings();
    for (branch, offset) in [(Branch::Minus, 0), (Branch::Plus, 2)] {
        if let Some(reference) = c.branch_states(branch) {
            for k in 0..2 {
                let s = &mut states[offset + k];
                if dot(s, &reference[k]) < 0.0 {
                    s.iter_mut().for_each(|x| *x = -*x);
                }
            }
        }
    }

    Ok(Spectrum {
        energies: [e1, e2, e3, e4],
        states,
        source: SpectrumSource::Numeric,
    })
}

/// Gram-Schmidt `v` against `basis`; appends and returns `true` if what
/// remains is not negligible.
fn push_orthonormal(basis: &mut Vec<[f64; 4]>, mut v: [f64; 4]) -> bool {
    for _ in 0..2 {
        for b in basis.iter() {
            let d = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
        }
    }
    let norm = dot(&v, &v).sqrt();
    if norm < 1e-6 {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    basis.push(v);
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(d1: f64, d2: f64, v: f64) -> ModelParams {
        ModelParams::new(d1, d2, v).unwrap()
    }

    #[test]
    fn rejects_non_finite() {
        assert!(ModelParams::new(f64::NAN, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn hamiltonian_examples() {
        assert_eq!(
            build_hamiltonian(&params(0.0, 0.0, 1.0)),
            Mat4::from_diag([1.0, -1.0, -1.0, 1.0])
        );
        let h = build_hamiltonian(&params(1.0, 0.0, 0.0));
        assert_eq!(h, kron2(&pauli::x(), &Mat2::identity()));
        let h = build_hamiltonian(&params(10.0, 15.0, 160.0));
        assert_eq!(h.diagonal(), [160.0, -160.0, -160.0, 160.0]);
        assert_eq!(h.max_asymmetry(), 0.0);
    }

    #[test]
    fn normalizer_identity() {
        for (d1, d2, v) in [(10.0, 15.0, 160.0), (1.0, 8.0, 20.0), (3.0, 3.0, 0.5), (-2.0, 7.0, -4.0)] {
            let c = params(d1, d2, v).couplings();
            for (n, a, k) in [
                (c.n_minus, c.a_minus, c.alpha_minus),
                (c.n_plus, c.a_plus, c.alpha_plus),
            ] {
                assert!((2.0 * k * k * (n * n + a * a) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn strong_coupling_ground_state_amplitudes() {
        let s = analytic_spectrum(&params(10.0, 15.0, 160.0)).unwrap();
        assert_eq!(s.source, SpectrumSource::Analytic);
        let g = s.states[3];
        assert!((g[0] - 0.055).abs() < 1e-3 && (g[3] - 0.055).abs() < 1e-3);
        assert!((g[1] + 0.705).abs() < 1e-3 && (g[2] + 0.705).abs() < 1e-3);
    }

    #[test]
    fn weak_coupling_ground_state_amplitudes() {
        let s = analytic_spectrum(&params(10.0, 15.0, 10.0 / 6.0)).unwrap();
        let g = s.states[3];
        assert!((g[0] - 0.483).abs() < 1e-3);
        assert!((g[1] + 0.516).abs() < 1e-3);
    }

    #[test]
    fn tunneling_off_collapses_to_plus_minus_v() {
        let s = analytic_spectrum(&params(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(s.energies, [1.0, -1.0, 1.0, -1.0]);
        assert!(s.max_residual(&build_hamiltonian(&params(0.0, 0.0, 1.0))) < 1e-15);
    }

    #[test]
    fn analytic_states_are_normalized_eigenvectors() {
        for (d1, d2, v) in [(10.0, 15.0, 160.0), (1.0, 8.0, 20.0), (4.0, 4.0, 3.0), (2.0, 9.0, -1.5)] {
            let p = params(d1, d2, v);
            let s = try_analytic_spectrum(&p).unwrap();
            for st in &s.states {
                assert!((dot(st, st) - 1.0).abs() < 1e-12);
            }
            assert!(s.max_residual(&build_hamiltonian(&p)) < 1e-10);
        }
    }

    #[test]
    fn energy_ordering_for_positive_couplings() {
        let e = params(10.0, 15.0, 10.0).energies();
        assert!(e[3] <= e[1] && e[1] <= e[0] && e[0] <= e[2]);
    }

    #[test]
    fn numeric_matches_analytic_labels() {
        let p = params(10.0, 15.0, 160.0);
        let a = analytic_spectrum(&p).unwrap();
        let n = numeric_spectrum(&p).unwrap();
        assert_eq!(n.source, SpectrumSource::Numeric);
        for k in 0..4 {
            assert!((a.energies[k] - n.energies[k]).abs() < 1e-10);
            let diff = (0..4).fold(0.0_f64, |m, i| m.max((a.states[k][i] - n.states[k][i]).abs()));
            assert!(diff < 1e-10, "state {k} differs by {diff}");
        }
    }

    #[test]
    fn numeric_without_coulomb_term() {
        let n = numeric_spectrum(&params(10.0, 15.0, 0.0)).unwrap();
        for (got, want) in n.energies.iter().zip([5.0, -5.0, 25.0, -25.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn forced_degeneracy_falls_back_to_numeric() {
        let p = params(5.0, 5.0, 0.0);
        assert!(try_analytic_spectrum(&p).is_none());
        let s = analytic_spectrum(&p).unwrap();
        assert_eq!(s.source, SpectrumSource::Numeric);
        assert!(s.energies[0].abs() < 1e-12 && s.energies[1].abs() < 1e-12);
        assert!((s.energies[3] + 10.0).abs() < 1e-12);
        assert!(s.max_residual(&build_hamiltonian(&p)) < 1e-10);
        // Ground state is regular and aligned with its closed form.
        for (got, want) in s.states[3].iter().zip([0.5, -0.5, -0.5, 0.5]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn cross_sector_degeneracy_is_separated() {
        // Δ2 = 0 makes r₋ = r₊, so ε1 = ε3 and ε2 = ε4 across parity sectors.
        let p = params(3.0, 0.0, 4.0);
        let n = numeric_spectrum(&p).unwrap();
        let a = try_analytic_spectrum(&p).unwrap();
        for k in 0..4 {
            assert!((a.energies[k] - n.energies[k]).abs() < 1e-12);
            let diff = (0..4).fold(0.0_f64, |m, i| m.max((a.states[k][i] - n.states[k][i]).abs()));
            assert!(diff < 1e-10, "state {k} differs by {diff}");
        }
    }

    #[test]
    fn swapping_tunnelings_keeps_magnitudes() {
        let a = params(3.0, 11.0, 7.0).energies();
        let b = params(11.0, 3.0, 7.0).energies();
        assert_eq!(params(3.0, 11.0, 7.0).couplings().n_minus, -params(11.0, 3.0, 7.0).couplings().n_minus);
        for k in 0..4 {
            assert_eq!(a[k].abs(), b[k].abs());
        }
    }
}
