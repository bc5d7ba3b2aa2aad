use faer::Mat;

use crate::c64;
use crate::error::{Error, Result};
use crate::hamiltonians::{local_block_hamiltonian, SpinChainSpec};
use crate::qstate::{eig_hermitian, sqrt_psd, DensityMatrix};

/// Thermal states `Ω_m(β')` of one block Hamiltonian compared against a
/// fixed state, for many `β'`.
///
/// In the eigenbasis of `H_m`, `√Ω(β') = diag(e^{-β'(E-E_0)/2}) / √Z`, so
/// `F(Ω(β'), ρ)` is the nuclear norm of `diag(√p) V^H √ρ` and each
/// evaluation costs one small SVD.
pub struct ThermalReference {
    energies: Vec<f64>,
    /// `V^H √ρ`.
    rotated_sqrt: Mat<c64>,
}

impl ThermalReference {
    pub fn new(h: f64, m: usize, rho: &DensityMatrix) -> Result<Self> {
        let spec = SpinChainSpec::new(m, h)?;
        let hm = local_block_hamiltonian(&spec, m)?;
        if hm.dim() != rho.dim() {
            return Err(Error::DimensionMismatch {
                expected: hm.dim(),
                found: rho.dim(),
            });
        }
        let eig = eig_hermitian(&hm)?;
        let sqrt_rho = sqrt_psd(rho)?;
        let rotated_sqrt = eig.eigenvectors.adjoint() * sqrt_rho.as_mat();
        Ok(Self {
            energies: eig.eigenvalues,
            rotated_sqrt,
        })
    }

    /// `F[Ω_m(β'), ρ]`.
    pub fn fidelity(&self, beta_prime: f64) -> Result<f64> {
        let e0 = self.energies[0];
        let weights: Vec<f64> = self.energies.iter().map(|&e| (-beta_prime * (e - e0)).exp()).collect();
        let z: f64 = weights.iter().sum();
        let d = self.energies.len();
        let scaled = Mat::from_fn(d, d, |i, j| self.rotated_sqrt[(i, j)] * (weights[i] / z).sqrt());
        let sv = scaled
            .singular_values()
            .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
        Ok(sv.iter().sum::<f64>().clamp(0.0, 1.0 + 1e-12))
    }
}
