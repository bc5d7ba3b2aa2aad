use faer::{c64, Mat, MatRef, Side};

use crate::error::{Error, Result};

/// Hermiticity tolerance accepted by [`eig_hermitian`](super::eig_hermitian).
pub const EIG_HERMITIAN_TOL: f64 = 1e-10;
/// Entrywise Hermiticity tolerance of a [`DensityMatrix`].
pub const DENSITY_HERMITIAN_TOL: f64 = 1e-12;
/// Trace tolerance of a [`DensityMatrix`].
pub const DENSITY_TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue tolerated in a [`DensityMatrix`]; anything in
/// `[-PSD_TOL, 0)` is treated as zero.
pub const PSD_TOL: f64 = 1e-10;

/// A square complex matrix acting on a register of spins.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    mat: Mat<c64>,
}

impl DenseOperator {
    pub fn from_mat(mat: Mat<c64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        Ok(Self { mat })
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> c64) -> Self {
        Self {
            mat: Mat::from_fn(dim, dim, f),
        }
    }

    pub fn from_real_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        Self::from_fn(dim, |i, j| c64::new(f(i, j), 0.0))
    }

    /// Builds an operator from row-major complex entries.
    pub fn from_rows(rows: &[&[c64]]) -> Result<Self> {
        let dim = rows.len();
        for row in rows {
            if row.len() != dim {
                return Err(Error::NotSquare {
                    rows: dim,
                    cols: row.len(),
                });
            }
        }
        Ok(Self::from_fn(dim, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let converted: Vec<Vec<c64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| c64::new(x, 0.0)).collect())
            .collect();
        let refs: Vec<&[c64]> = converted.iter().map(|r| r.as_slice()).collect();
        Self::from_rows(&refs)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: Mat::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_real_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Number of spins when the dimension is a power of two.
    pub fn num_sites(&self) -> Option<usize> {
        let d = self.dim();
        d.is_power_of_two().then(|| d.trailing_zeros() as usize)
    }

    pub fn as_mat(&self) -> MatRef<'_, c64> {
        self.mat.as_ref()
    }

    pub fn into_mat(self) -> Mat<c64> {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.mat[(i, j)]
    }

    pub fn trace(&self) -> c64 {
        (0..self.dim()).map(|i| self.mat[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint().to_owned(),
        }
    }

    /// Largest entrywise deviation `max |A - A^H|`.
    pub fn hermiticity_violation(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                let diff = self.mat[(i, j)] - self.mat[(j, i)].conj();
                worst = worst.max(diff.norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_violation() <= tol
    }

    /// `(A + A^H) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let d = self.dim();
        Self::from_fn(d, |i, j| (self.mat[(i, j)] + self.mat[(j, i)].conj()) * 0.5)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            mat: &self.mat * &other.mat,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            mat: &self.mat + &other.mat,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            mat: &self.mat - &other.mat,
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let d = self.dim();
        Self::from_fn(d, |i, j| self.mat[(i, j)] * factor)
    }

    /// `U A U^H`.
    pub fn conjugated_by(&self, unitary: &Self) -> Result<Self> {
        self.check_same_dim(unitary)?;
        Ok(Self {
            mat: &unitary.mat * &self.mat * unitary.mat.adjoint(),
        })
    }

    /// Kronecker product `self ⊗ other`; `self` occupies the more significant
    /// sites.
    pub fn kron(&self, other: &Self) -> Self {
        let (a, b) = (self.dim(), other.dim());
        Self::from_fn(a * b, |i, j| self.mat[(i / b, j / b)] * other.mat[(i % b, j % b)])
    }

    /// Entrywise max-norm of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_dim(other)?;
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for j in 0..d {
            for i in 0..d {
                worst = worst.max((self.mat[(i, j)] - other.mat[(i, j)]).norm());
            }
        }
        Ok(worst)
    }

    pub(crate) fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

/// A Hermitian, unit-trace, positive semidefinite operator.
///
/// Construction validates all three properties; the stored matrix is the
/// exact Hermitian part of the input.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    op: DenseOperator,
}

impl DensityMatrix {
    pub fn new(op: DenseOperator) -> Result<Self> {
        let violation = op.hermiticity_violation();
        if violation > DENSITY_HERMITIAN_TOL {
            return Err(Error::NotHermitian {
                max_violation: violation,
            });
        }
        let trace = op.trace().re;
        if (trace - 1.0).abs() > DENSITY_TRACE_TOL {
            return Err(Error::InvalidTrace { trace });
        }
        let op = op.hermitian_part();
        let min_eig = min_eigenvalue(op.as_mat())?;
        if min_eig < -PSD_TOL {
            return Err(Error::NotPositive { eigenvalue: min_eig });
        }
        Ok(Self { op })
    }

    /// Divides by the trace before validating. Used for states known only up
    /// to normalisation (partition functions, MPS norms).
    pub fn from_unnormalized(op: DenseOperator) -> Result<Self> {
        let op = op.hermitian_part();
        let trace = op.trace().re;
        if !(trace.is_finite() && trace > 0.0) {
            return Err(Error::InvalidTrace { trace });
        }
        Self::new(op.scaled(1.0 / trace))
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: DenseOperator::from_real_fn(dim, |i, j| if i == j { 1.0 / dim as f64 } else { 0.0 }),
        }
    }

    /// `|ψ><ψ| / <ψ|ψ>`.
    pub fn from_pure(amplitudes: &[c64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !(norm > 0.0) {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        let d = amplitudes.len();
        Ok(Self {
            op: DenseOperator::from_fn(d, |i, j| amplitudes[i] * amplitudes[j].conj() / norm),
        })
    }

    /// Density matrix of a basis state.
    pub fn basis_state(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::SiteOutOfRange { index, sites: dim });
        }
        Ok(Self {
            op: DenseOperator::from_real_fn(dim, |i, j| if i == index && j == index { 1.0 } else { 0.0 }),
        })
    }

    /// Tensor product; `self` occupies the more significant sites.
    pub fn kron(&self, other: &Self) -> Self {
        Self {
            op: self.op.kron(&other.op),
        }
    }

    /// `U ρ U^H` for a unitary `U`.
    pub fn conjugated_by(&self, unitary: &DenseOperator) -> Result<Self> {
        Self::new(self.op.conjugated_by(unitary)?)
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn num_sites(&self) -> Option<usize> {
        self.op.num_sites()
    }

    pub fn operator(&self) -> &DenseOperator {
        &self.op
    }

    pub fn as_mat(&self) -> MatRef<'_, c64> {
        self.op.as_mat()
    }

    pub fn get(&self, i: usize, j: usize) -> c64 {
        self.op.get(i, j)
    }

    /// `½ Σ |λ_i(ρ - σ)|`.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        let diff = self.op.sub(&other.op)?.hermitian_part();
        let eigs = diff
            .as_mat()
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
        Ok(0.5 * eigs.iter().map(|x| x.abs()).sum::<f64>())
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.op
            .as_mat()
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.op.max_abs_diff(&other.op)
    }

    /// Skips validation. Callers guarantee the invariants hold up to
    /// rounding; the Hermitian part is stored.
    pub(crate) fn from_trusted(op: DenseOperator) -> Self {
        Self {
            op: op.hermitian_part(),
        }
    }
}

fn min_eigenvalue(mat: MatRef<'_, c64>) -> Result<f64> {
    let eigs = mat
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
    Ok(eigs.first().copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_orders_sites_most_significant_first() {
        let z = DenseOperator::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap();
        let id = DenseOperator::identity(2);
        let zi = z.kron(&id);
        // Basis |s1 s2>, index = 2*s1 + s2.
        assert_eq!(zi.get(2, 2).re, -1.0);
        assert_eq!(zi.get(1, 1).re, 1.0);
    }

    #[test]
    fn density_validation_rejects_bad_inputs() {
        let not_herm = DenseOperator::from_rows(&[
            &[c64::new(0.5, 0.0), c64::new(0.1, 0.0)],
            &[c64::new(0.2, 0.0), c64::new(0.5, 0.0)],
        ])
        .unwrap();
        assert!(matches!(DensityMatrix::new(not_herm), Err(Error::NotHermitian { .. })));
        let bad_trace = DenseOperator::identity(2);
        assert!(matches!(DensityMatrix::new(bad_trace), Err(Error::InvalidTrace { .. })));
        let negative = DenseOperator::from_real_rows(&[&[1.5, 0.0], &[0.0, -0.5]]).unwrap();
        match DensityMatrix::new(negative) {
            Err(Error::NotPositive { eigenvalue }) => assert!((eigenvalue + 0.5).abs() < 1e-14),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tiny_negative_eigenvalues_are_tolerated() {
        let op = DenseOperator::from_real_rows(&[&[1.0 + 5e-11, 0.0], &[0.0, -5e-11]]).unwrap();
        assert!(DensityMatrix::new(op).is_ok());
    }

    #[test]
    fn trace_distance_of_orthogonal_states_is_one() {
        let a = DensityMatrix::basis_state(2, 0).unwrap();
        let b = DensityMatrix::basis_state(2, 1).unwrap();
        assert!((a.trace_distance(&b).unwrap() - 1.0).abs() < 1e-14);
    }
}
