#![allow(dead_code)]

use std::sync::{Mutex, MutexGuard, OnceLock};

use rand::Rng;
use thermolens::c64;
use thermolens::hamiltonians::{ExactSpectrum, SpinChainSpec};
use thermolens::qstate::{DenseOperator, DensityMatrix};

/// Serialises the large exact diagonalisations so that concurrent test
/// threads do not hold several 14-site spectra at once.
pub fn ed_lock() -> MutexGuard<'static, ()> {
    static LOCK: OnceLock<Mutex<()>> = OnceLock::new();
    LOCK.get_or_init(|| Mutex::new(()))
        .lock()
        .unwrap_or_else(|e| e.into_inner())
}

pub fn spectrum(n: usize, h: f64) -> ExactSpectrum {
    ExactSpectrum::new(&SpinChainSpec::new(n, h).unwrap()).unwrap()
}

/// Sites of the centre pair of an `n`-site chain.
pub fn center_pair(n: usize) -> [usize; 2] {
    [n / 2 - 1, n / 2]
}

pub fn random_complex<R: Rng>(rng: &mut R, dim: usize) -> DenseOperator {
    DenseOperator::from_fn(dim, |_, _| c64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// `G G^H / Tr`, full rank with probability one.
pub fn random_density<R: Rng>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = random_complex(rng, dim);
    DensityMatrix::from_unnormalized(g.matmul(&g.adjoint()).unwrap()).unwrap()
}

/// Rank-deficient random state.
pub fn random_low_rank<R: Rng>(rng: &mut R, dim: usize, rank: usize) -> DensityMatrix {
    let g = DenseOperator::from_fn(dim, |_, j| {
        if j < rank {
            c64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        } else {
            c64::new(0.0, 0.0)
        }
    });
    DensityMatrix::from_unnormalized(g.matmul(&g.adjoint()).unwrap()).unwrap()
}

/// Haar-ish random unitary from the QR of a Gaussian-like matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> DenseOperator {
    let g = random_complex(rng, dim);
    let q = g.as_mat().qr().compute_thin_Q();
    DenseOperator::from_mat(q).unwrap()
}

/// Fidelity via the eigenvalues of `√σ ρ √σ`, the textbook route.
pub fn fidelity_spectral(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    let ss = thermolens::qstate::sqrt_psd(sigma).unwrap();
    let prod = ss.matmul(rho.operator()).unwrap().matmul(&ss).unwrap();
    let eig = thermolens::qstate::eig_hermitian(&prod.hermitian_part()).unwrap();
    eig.eigenvalues.iter().map(|&x| x.max(0.0).sqrt()).sum()
}

/// `⊗ σz` on `n` sites.
pub fn spin_flip(n: usize) -> DenseOperator {
    DenseOperator::from_real_fn(1 << n, |r, c| {
        if r == c {
            if r.count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        } else {
            0.0
        }
    })
}
