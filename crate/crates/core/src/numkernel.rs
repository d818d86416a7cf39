//! Dense real matrices of fixed small order and a cyclic Jacobi eigensolver.
//!
//! Everything in the engine is real: the Hamiltonian is real symmetric in the
//! computational basis, so the Gibbs state, the spin-flipped product used by
//! the concurrence, and every local rotation with `phi = 0` are real too.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default convergence threshold of [`jacobi_eigensolve`].
pub const JACOBI_TOL: f64 = 1e-13;

/// Maximum number of cyclic sweeps before [`jacobi_eigensolve`] gives up.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Orthogonality tolerance accepted by [`conjugate`].
pub const ORTHOGONALITY_TOL: f64 = 1e-12;

/// Square real matrix of order `N`, stored row-major.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat<const N: usize>(#[serde(with = "rows")] pub [[f64; N]; N]);

pub type Mat4 = Mat<4>;
pub type Mat2 = Mat<2>;

impl<const N: usize> Mat<N> {
    pub const fn from_rows(rows: [[f64; N]; N]) -> Self {
        Mat(rows)
    }

    pub fn zeros() -> Self {
        Mat([[0.0; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: [f64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = diag[i];
        }
        m
    }

    /// Outer product `a bᵀ`.
    pub fn outer(a: &[f64; N], b: &[f64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = a[i] * b[j];
            }
        }
        m
    }

    pub fn rows(&self) -> &[[f64; N]; N] {
        &self.0
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[row][col]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                t.0[j][i] = self.0[i][j];
            }
        }
        t
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|x| *x *= k);
        m
    }

    pub fn trace(&self) -> f64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn diagonal(&self) -> [f64; N] {
        std::array::from_fn(|i| self.0[i][i])
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Largest entry-wise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    /// Largest `|m_ij - m_ji|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..N {
            for j in (i + 1)..N {
                worst = worst.max((self.0[i][j] - self.0[j][i]).abs());
            }
        }
        worst
    }

    /// Frobenius norm of the strictly off-diagonal part.
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut sum = 0.0;
        for i in 0..N {
            for j in 0..N {
                if i != j {
                    sum += self.0[i][j] * self.0[i][j];
                }
            }
        }
        sum.sqrt()
    }

    pub fn symmetrized(&self) -> Self {
        let mut m = *self;
        for i in 0..N {
            for j in (i + 1)..N {
                let avg = 0.5 * (self.0[i][j] + self.0[j][i]);
                m.0[i][j] = avg;
                m.0[j][i] = avg;
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[f64; N]) -> [f64; N] {
        std::array::from_fn(|i| (0..N).map(|j| self.0[i][j] * v[j]).sum())
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }
}

impl<const N: usize> Default for Mat<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Index<(usize, usize)> for Mat<N> {
    type Output = f64;

    fn index(&self, (row, col): (usize, usize)) -> &f64 {
        &self.0[row][col]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Mat<N> {
    fn index_mut(&mut self, (row, col): (usize, usize)) -> &mut f64 {
        &mut self.0[row][col]
    }
}

impl<const N: usize> Add for Mat<N> {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a += b;
        }
        self
    }
}

impl<const N: usize> Sub for Mat<N> {
    type Output = Self;

    fn sub(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a -= b;
        }
        self
    }
}

impl<const N: usize> Mul for Mat<N> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..N {
                    out.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        out
    }
}

mod rows {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer, const N: usize>(
        rows: &[[f64; N]; N],
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let v: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(
        d: D,
    ) -> Result<[[f64; N]; N], D::Error> {
        let v: Vec<Vec<f64>> = Vec::deserialize(d)?;
        if v.len() != N || v.iter().any(|r| r.len() != N) {
            return Err(D::Error::custom(format!("expected a {N}x{N} matrix")));
        }
        let mut out = [[0.0; N]; N];
        for (dst, src) in out.iter_mut().zip(v) {
            dst.copy_from_slice(&src);
        }
        Ok(out)
    }
}

/// Pauli matrices and related fixed operators.
pub mod pauli {
    use super::{kron2, Mat2, Mat4};

    pub fn x() -> Mat2 {
        Mat2::from_rows([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn z() -> Mat2 {
        Mat2::from_rows([[1.0, 0.0], [0.0, -1.0]])
    }

    /// `σy ⊗ σy`, which is real even though `σy` is not: with `σy = i σx σz`
    /// the product equals `-(σx σz) ⊗ (σx σz)`.
    pub fn yy() -> Mat4 {
        let xz = x() * z();
        kron2(&xz, &xz).scale(-1.0)
    }
}

/// Eigen-decomposition of a real symmetric matrix.
///
/// `values` are ascending and `vectors[k]` is the unit eigenvector paired with
/// `values[k]`. Inside a degenerate block the basis is arbitrary.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenDecomp<const N: usize> {
    pub values: [f64; N],
    pub vectors: [[f64; N]; N],
    pub sweeps: usize,
}

impl<const N: usize> EigenDecomp<N> {
    /// `Σ_k values[k] v_k v_kᵀ`.
    pub fn reconstruct(&self) -> Mat<N> {
        self.values
            .iter()
            .zip(&self.vectors)
            .fold(Mat::zeros(), |acc, (&l, v)| acc + Mat::outer(v, v).scale(l))
    }

    /// Reassembles `Σ_k f(values[k]) v_k v_kᵀ`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Mat<N> {
        self.values
            .iter()
            .zip(&self.vectors)
            .fold(Mat::zeros(), |acc, (&l, v)| acc + Mat::outer(v, v).scale(f(l)))
    }
}

/// Cyclic Jacobi eigensolver for a real symmetric matrix.
///
/// Sweeps the strict upper triangle in row order, annihilating each nonzero
/// entry with one plane rotation, until the off-diagonal Frobenius norm drops
/// below `tol` times the Frobenius norm of the input.
pub fn jacobi_eigensolve<const N: usize>(m: &Mat<N>, tol: f64) -> Result<EigenDecomp<N>> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::invalid("tol", format!("must be positive and finite, got {tol}")));
    }
    if m.0.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::invalid("matrix", "contains non-finite entries"));
    }
    let scale = m.max_abs();
    let asym = m.max_asymmetry();
    if asym > tol * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotSymmetric {
            max_asymmetry: asym,
            tolerance: tol * scale,
        });
    }

    let mut a = m.symmetrized();
    let mut v = Mat::<N>::identity();
    let target = tol * a.frobenius_norm();
    let mut sweeps = 0;

    loop {
        let off = a.off_diagonal_norm();
        if off <= target {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: off,
            });
        }
        sweeps += 1;
        for p in 0..N {
            for q in (p + 1)..N {
                if a.0[p][q] != 0.0 {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&i, &j| a.0[i][i].total_cmp(&a.0[j][j]));
    Ok(EigenDecomp {
        values: order.map(|k| a.0[k][k]),
        vectors: order.map(|k| std::array::from_fn(|row| v.0[row][k])),
        sweeps,
    })
}

fn rotate<const N: usize>(a: &mut Mat<N>, v: &mut Mat<N>, p: usize, q: usize) {
    let apq = a.0[p][q];
    let theta = (a.0[q][q] - a.0[p][p]) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..N {
        let (akp, akq) = (a.0[k][p], a.0[k][q]);
        a.0[k][p] = c * akp - s * akq;
        a.0[k][q] = s * akp + c * akq;
    }
    for k in 0..N {
        let (apk, aqk) = (a.0[p][k], a.0[q][k]);
        a.0[p][k] = c * apk - s * aqk;
        a.0[q][k] = s * apk + c * aqk;
    }
    a.0[p][q] = 0.0;
    a.0[q][p] = 0.0;

    for k in 0..N {
        let (vkp, vkq) = (v.0[k][p], v.0[k][q]);
        v.0[k][p] = c * vkp - s * vkq;
        v.0[k][q] = s * vkp + c * vkq;
    }
}

/// Kronecker product: `(a ⊗ b)[2i+k][2j+l] = a[i][j] · b[k][l]`.
pub fn kron2(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    out
}

/// Largest entry of `|u uᵀ - I|`.
pub fn orthogonality_defect<const N: usize>(u: &Mat<N>) -> f64 {
    (*u * u.transpose()).max_abs_diff(&Mat::identity())
}

/// Similarity transform `u m uᵀ` by a real orthogonal `u`.
pub fn conjugate<const N: usize>(u: &Mat<N>, m: &Mat<N>) -> Result<Mat<N>> {
    let deviation = orthogonality_defect(u);
    if !(deviation <= ORTHOGONALITY_TOL) {
        return Err(Error::NotOrthogonal { deviation });
    }
    Ok(*u * *m * u.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_decomp_ok<const N: usize>(m: &Mat<N>, d: &EigenDecomp<N>) {
        for i in 0..N {
            for j in 0..N {
                let dot: f64 = (0..N).map(|r| d.vectors[i][r] * d.vectors[j][r]).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-12, "v{i}·v{j} = {dot}");
            }
        }
        assert!(d.reconstruct().max_abs_diff(m) < 1e-10);
        assert!(d.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn identity_eigenvalues() {
        let m = Mat4::identity();
        let d = jacobi_eigensolve(&m, JACOBI_TOL).unwrap();
        assert_eq!(d.values, [1.0; 4]);
        assert_decomp_ok(&m, &d);
    }

    #[test]
    fn diagonal_input_returns_standard_basis() {
        let m = Mat4::from_diag([1.0, -2.0, 2.0, -1.0]);
        let d = jacobi_eigensolve(&m, JACOBI_TOL).unwrap();
        assert_eq!(d.values, [-2.0, -1.0, 1.0, 2.0]);
        assert_eq!(d.vectors[0], [0.0, 1.0, 0.0, 0.0]);
        assert_eq!(d.vectors[3], [0.0, 0.0, 1.0, 0.0]);
        assert_eq!(d.sweeps, 0);
    }

    #[test]
    fn rejects_asymmetric_input() {
        let mut m = Mat4::identity();
        m[(0, 1)] = 1e-3;
        match jacobi_eigensolve(&m, JACOBI_TOL) {
            Err(Error::NotSymmetric { max_asymmetry, .. }) => {
                assert!((max_asymmetry - 1e-3).abs() < 1e-18)
            }
            other => panic!("expected NotSymmetric, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(jacobi_eigensolve(&Mat4::identity(), 0.0).is_err());
        assert!(jacobi_eigensolve(&Mat4::identity(), f64::NAN).is_err());
    }

    #[test]
    fn dense_symmetric_matrix() {
        let m = Mat4::from_rows([
            [4.0, -2.0, 1.0, 0.5],
            [-2.0, 3.0, 0.0, 2.0],
            [1.0, 0.0, -1.0, 3.0],
            [0.5, 2.0, 3.0, 0.0],
        ]);
        let d = jacobi_eigensolve(&m, JACOBI_TOL).unwrap();
        assert_decomp_ok(&m, &d);
        assert!((d.values.iter().sum::<f64>() - m.trace()).abs() < 1e-12);
    }

    #[test]
    fn coupled_dot_hamiltonian_eigenvalues() {
        // Δ1 σx⊗I + Δ2 I⊗σx + V σz⊗σz at (10, 15, 160); expected ±√(n±² + V²).
        let i2 = Mat2::identity();
        let h = kron2(&pauli::x(), &i2).scale(10.0)
            + kron2(&i2, &pauli::x()).scale(15.0)
            + kron2(&pauli::z(), &pauli::z()).scale(160.0);
        let d = jacobi_eigensolve(&h, JACOBI_TOL).unwrap();
        let r_minus = 160.078_105_935_821_2;
        let r_plus = 161.941_347_407_016_48;
        let expected = [-r_plus, -r_minus, r_minus, r_plus];
        for (got, want) in d.values.iter().zip(expected) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
        assert_decomp_ok(&h, &d);
    }

    #[test]
    fn kron_examples() {
        let i2 = Mat2::identity();
        assert_eq!(kron2(&i2, &i2), Mat4::identity());
        assert_eq!(
            kron2(&pauli::z(), &pauli::z()),
            Mat4::from_diag([1.0, -1.0, -1.0, 1.0])
        );
        let xi = kron2(&pauli::x(), &i2);
        let swap = Mat4::from_rows([
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
        ]);
        assert_eq!(xi, swap);
    }

    #[test]
    fn yy_is_the_spin_flip() {
        // σy⊗σy maps |00>→-|11>, |01>→|10>, |10>→|01>, |11>→-|00>.
        let expected = Mat4::from_rows([
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0, 0.0],
        ]);
        assert_eq!(pauli::yy(), expected);
    }

    #[test]
    fn kron_is_bilinear_on_integers() {
        let a = Mat2::from_rows([[1.0, 2.0], [3.0, 4.0]]);
        let a2 = Mat2::from_rows([[-1.0, 5.0], [0.0, 2.0]]);
        let b = Mat2::from_rows([[2.0, -3.0], [7.0, 1.0]]);
        assert_eq!(kron2(&(a + a2), &b), kron2(&a, &b) + kron2(&a2, &b));
        assert_eq!(kron2(&b, &(a + a2)), kron2(&b, &a) + kron2(&b, &a2));
    }

    #[test]
    fn conjugate_identity_cases() {
        let m = Mat4::from_rows([
            [1.0, 2.0, 3.0, 4.0],
            [2.0, 5.0, 6.0, 7.0],
            [3.0, 6.0, 8.0, 9.0],
            [4.0, 7.0, 9.0, 10.0],
        ]);
        assert_eq!(conjugate(&Mat4::identity(), &m).unwrap(), m);
        let (c, s) = (0.3_f64.cos(), 0.3_f64.sin());
        let u2 = Mat2::from_rows([[c, -s], [s, c]]);
        let u = kron2(&u2, &u2);
        assert!(conjugate(&u, &Mat4::identity()).unwrap().max_abs_diff(&Mat4::identity()) < 1e-15);
        assert!((conjugate(&u, &m).unwrap().trace() - m.trace()).abs() < 1e-12);
    }

    #[test]
    fn conjugate_rejects_non_orthogonal() {
        let u = Mat4::identity().scale(1.1);
        assert!(matches!(
            conjugate(&u, &Mat4::identity()),
            Err(Error::NotOrthogonal { .. })
        ));
    }
}
