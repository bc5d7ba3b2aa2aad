use faer::{c64, Mat, Side};

use super::operator::{DenseOperator, DensityMatrix, EIG_HERMITIAN_TOL, PSD_TOL};
use crate::error::{Error, Result};

/// Eigendecomposition `A = V diag(λ) V^H` with `λ` ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Mat<c64>,
}

impl HermitianEigen {
    /// `V diag(f(λ)) V^H`.
    pub fn apply_fn(&self, mut f: impl FnMut(f64) -> f64) -> DenseOperator {
        let d = self.eigenvalues.len();
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        let v = &self.eigenvectors;
        let scaled = Mat::from_fn(d, d, |i, k| v[(i, k)] * weights[k]);
        DenseOperator::from_mat(&scaled * v.adjoint()).expect("square by construction")
    }

    pub fn reconstruct(&self) -> DenseOperator {
        self.apply_fn(|x| x)
    }
}

/// Hermitian eigendecomposition. Rejects inputs whose Hermiticity violation
/// exceeds `1e-10`.
pub fn eig_hermitian(a: &DenseOperator) -> Result<HermitianEigen> {
    let violation = a.hermiticity_violation();
    if violation > EIG_HERMITIAN_TOL {
        return Err(Error::NotHermitian {
            max_violation: violation,
        });
    }
    eig_unchecked(&a.hermitian_part().into_mat())
}

fn eig_unchecked(a: &Mat<c64>) -> Result<HermitianEigen> {
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let eigenvalues = (0..a.nrows()).map(|i| s[i].re).collect();
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors: evd.U().to_owned(),
    })
}

/// Principal square root of a density matrix. Eigenvalues in `[-1e-10, 0)`
/// are clamped to zero, as are positive ones at the rounding level of the
/// decomposition (their square roots would otherwise be of order 1e-8).
pub fn sqrt_psd(rho: &DensityMatrix) -> Result<DenseOperator> {
    let eig = eig_unchecked(&rho.as_mat().to_owned())?;
    if let Some(&min) = eig.eigenvalues.first() {
        if min < -PSD_TOL {
            return Err(Error::NotPositive { eigenvalue: min });
        }
    }
    let top = eig.eigenvalues.last().copied().unwrap_or(0.0).abs();
    let floor = (eig.eigenvalues.len() as f64) * f64::EPSILON * top;
    Ok(eig.apply_fn(|x| if x > floor { x.sqrt() } else { 0.0 }))
}

/// Uhlmann fidelity `F = Tr √(√σ ρ √σ)`, on the square-root scale.
///
/// Evaluated as the nuclear norm of `√ρ √σ`, which equals the trace above
/// and avoids square roots of rounding-level negative eigenvalues of the
/// product.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let sr = sqrt_psd(rho)?;
    let ss = sqrt_psd(sigma)?;
    fidelity_from_sqrts(&sr, &ss)
}

/// Fidelity given precomputed square roots of both states.
pub fn fidelity_from_sqrts(sqrt_rho: &DenseOperator, sqrt_sigma: &DenseOperator) -> Result<f64> {
    sqrt_rho.check_same_dim(sqrt_sigma)?;
    let product = sqrt_rho.as_mat() * sqrt_sigma.as_mat();
    let sv = product
        .singular_values()
        .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
    Ok(sv.iter().sum::<f64>().clamp(0.0, 1.0 + 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_z_spectrum() {
        let z = DenseOperator::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap();
        let e = eig_hermitian(&z).unwrap();
        assert_eq!(e.eigenvalues.len(), 2);
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_spectrum_and_unitary_vectors() {
        let e = eig_hermitian(&DenseOperator::identity(4)).unwrap();
        assert!(e.eigenvalues.iter().all(|x| (x - 1.0).abs() < 1e-14));
        let v = DenseOperator::from_mat(e.eigenvectors.clone()).unwrap();
        let vv = v.adjoint().matmul(&v).unwrap();
        assert!(vv.max_abs_diff(&DenseOperator::identity(4)).unwrap() < 1e-12);
    }

    #[test]
    fn non_hermitian_rejected_with_violation() {
        let a = DenseOperator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        match eig_hermitian(&a) {
            Err(Error::NotHermitian { max_violation }) => assert!((max_violation - 1.0).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sqrt_of_diagonal_and_scalar_states() {
        let rho = DensityMatrix::maximally_mixed(4);
        let s = sqrt_psd(&rho).unwrap();
        assert!(s.max_abs_diff(&DenseOperator::identity(4).scaled(0.5)).unwrap() < 1e-14);

        let rho = DensityMatrix::new(DenseOperator::from_real_rows(&[&[0.64, 0.0], &[0.0, 0.36]]).unwrap()).unwrap();
        let s = sqrt_psd(&rho).unwrap();
        assert!((s.get(0, 0).re - 0.8).abs() < 1e-14);
        assert!((s.get(1, 1).re - 0.6).abs() < 1e-14);
    }

    #[test]
    fn closed_form_fidelities() {
        let mixed = DensityMatrix::maximally_mixed(2);
        let up = DensityMatrix::basis_state(2, 0).unwrap();
        let down = DensityMatrix::basis_state(2, 1).unwrap();
        assert!((fidelity(&up, &up).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&up, &down).unwrap().abs() < 1e-12);
        assert!((fidelity(&mixed, &up).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn fidelity_dimension_mismatch() {
        let a = DensityMatrix::maximally_mixed(2);
        let b = DensityMatrix::maximally_mixed(4);
        assert!(matches!(fidelity(&a, &b), Err(Error::DimensionMismatch { .. })));
    }
}
