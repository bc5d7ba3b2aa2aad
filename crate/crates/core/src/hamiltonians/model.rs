use crate::error::{invalid, Error, Result};
use crate::qstate::{eig_hermitian, DenseOperator, DensityMatrix};

/// Inverse temperature standing in for `T = 0`.
pub const DEFAULT_BETA_MAX: f64 = 1e6;
/// Largest chain accepted by the dense constructors.
pub const DENSE_SITE_LIMIT: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Model {
    #[default]
    TransverseIsing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Open,
}

/// `H = (J/2) Σ σx^i σx^{i+1} - (h/2) Σ σz^i` on an open chain of `n` sites.
///
/// `J` is `coupling`, equal to 1 unless explicitly switched off.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinChainSpec {
    pub n: usize,
    pub h: f64,
    pub coupling: f64,
    pub model: Model,
    pub boundary: Boundary,
}

impl SpinChainSpec {
    pub fn new(n: usize, h: f64) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("chain needs at least 2 sites, got {n}")));
        }
        if !h.is_finite() {
            return Err(invalid(format!("field must be finite, got {h}")));
        }
        Ok(Self {
            n,
            h,
            coupling: 1.0,
            model: Model::TransverseIsing,
            boundary: Boundary::Open,
        })
    }

    pub fn with_coupling(mut self, coupling: f64) -> Result<Self> {
        if !coupling.is_finite() {
            return Err(invalid(format!("coupling must be finite, got {coupling}")));
        }
        self.coupling = coupling;
        Ok(self)
    }

    pub fn with_sites(mut self, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("chain needs at least 2 sites, got {n}")));
        }
        self.n = n;
        Ok(self)
    }

    /// Diagonal entry `<j|H|j>`; bit `n-1-i` of `j` is site `i`, and a set
    /// bit means spin down.
    pub(crate) fn diagonal(&self, j: usize) -> f64 {
        let down = j.count_ones() as f64;
        let up = self.n as f64 - down;
        -0.5 * self.h * (up - down)
    }

    /// Bit masks flipped by each `σx σx` bond.
    pub(crate) fn bond_masks(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n - 1).map(move |i| 0b11usize << (self.n - 2 - i))
    }
}

/// Inverse temperature `β ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct InverseTemperature(f64);

impl InverseTemperature {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta >= 0.0) || beta.is_nan() {
            return Err(invalid(format!("inverse temperature must be >= 0, got {beta}")));
        }
        if beta.is_infinite() {
            return Ok(Self(DEFAULT_BETA_MAX));
        }
        Ok(Self(beta))
    }

    /// Clamps to `beta_max`.
    pub fn capped(self, beta_max: f64) -> Self {
        Self(self.0.min(beta_max))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Dense Hamiltonian of the whole chain.
pub fn build_dense(spec: &SpinChainSpec) -> Result<DenseOperator> {
    if spec.n > DENSE_SITE_LIMIT {
        return Err(Error::Capacity {
            what: format!("dense Hamiltonian on {} sites", spec.n),
            limit: DENSE_SITE_LIMIT,
            hint: "use the MPS backend for longer chains",
        });
    }
    let dim = 1usize << spec.n;
    let masks: Vec<usize> = spec.bond_masks().collect();
    let half_j = 0.5 * spec.coupling;
    Ok(DenseOperator::from_real_fn(dim, |r, c| {
        if r == c {
            spec.diagonal(c)
        } else if masks.contains(&(r ^ c)) {
            half_j
        } else {
            0.0
        }
    }))
}

/// `e^{-βH} / Z`, with the ground energy subtracted before exponentiating.
pub fn gibbs_dense(h: &DenseOperator, beta: InverseTemperature) -> Result<DensityMatrix> {
    let eig = eig_hermitian(h)?;
    let e0 = eig.eigenvalues.first().copied().unwrap_or(0.0);
    let b = beta.value();
    let z: f64 = eig.eigenvalues.iter().map(|&e| (-b * (e - e0)).exp()).sum();
    let rho = eig.apply_fn(|e| (-b * (e - e0)).exp() / z);
    Ok(DensityMatrix::from_trusted(rho))
}

/// The chain Hamiltonian restricted to `m` sites, with no boundary
/// correction.
pub fn local_block_hamiltonian(spec: &SpinChainSpec, m: usize) -> Result<DenseOperator> {
    if m < 2 {
        return Err(invalid(format!("block needs at least one bond, got m = {m}")));
    }
    if m > spec.n {
        return Err(invalid(format!("block of {m} sites exceeds chain of {}", spec.n)));
    }
    build_dense(&spec.with_sites(m)?)
}

/// Two-site terms `h_{i,i+1}` summing to `H`; the field on a site shared by
/// two bonds is split evenly between them.
pub fn bond_hamiltonians(spec: &SpinChainSpec) -> Vec<DenseOperator> {
    let n = spec.n;
    let weight = |site: usize| if site == 0 || site == n - 1 { 1.0 } else { 0.5 };
    (0..n - 1)
        .map(|i| {
            let (wl, wr) = (weight(i), weight(i + 1));
            DenseOperator::from_real_fn(4, |r, c| {
                if r == c {
                    let zl = if r & 2 == 0 { 1.0 } else { -1.0 };
                    let zr = if r & 1 == 0 { 1.0 } else { -1.0 };
                    -0.5 * spec.h * (wl * zl + wr * zr)
                } else if r ^ c == 3 {
                    0.5 * spec.coupling
                } else {
                    0.0
                }
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::Pauli;

    #[test]
    fn two_site_zero_field_is_half_xx() {
        let spec = SpinChainSpec::new(2, 0.0).unwrap();
        let h = build_dense(&spec).unwrap();
        let xx = Pauli::X.matrix().kron(&Pauli::X.matrix()).scaled(0.5);
        assert!(h.max_abs_diff(&xx).unwrap() < 1e-15);
    }

    #[test]
    fn hamiltonian_is_traceless() {
        for h in [0.0, 0.3, 2.0] {
            let op = build_dense(&SpinChainSpec::new(2, h).unwrap()).unwrap();
            assert!(op.trace().norm() < 1e-14);
        }
    }

    #[test]
    fn capacity_error_above_dense_limit() {
        let spec = SpinChainSpec::new(15, 1.0).unwrap();
        assert!(matches!(build_dense(&spec), Err(Error::Capacity { .. })));
    }

    #[test]
    fn bond_terms_sum_to_hamiltonian() {
        for n in 2..=5 {
            let spec = SpinChainSpec::new(n, 0.7).unwrap();
            let full = build_dense(&spec).unwrap();
            let mut sum = DenseOperator::zeros(1 << n);
            for (i, b) in bond_hamiltonians(&spec).iter().enumerate() {
                let left = DenseOperator::identity(1 << i);
                let right = DenseOperator::identity(1 << (n - i - 2));
                sum = sum.add(&left.kron(b).kron(&right)).unwrap();
            }
            assert!(sum.max_abs_diff(&full).unwrap() < 1e-14, "n = {n}");
        }
    }

    #[test]
    fn block_hamiltonian_validation() {
        let spec = SpinChainSpec::new(4, 0.5).unwrap();
        assert!(local_block_hamiltonian(&spec, 1).is_err());
        assert!(local_block_hamiltonian(&spec, 5).is_err());
        let whole = local_block_hamiltonian(&spec, 4).unwrap();
        assert!(whole.max_abs_diff(&build_dense(&spec).unwrap()).unwrap() == 0.0);
    }

    #[test]
    fn beta_validation() {
        assert!(InverseTemperature::new(-1.0).is_err());
        assert!(InverseTemperature::new(f64::NAN).is_err());
        assert_eq!(
            InverseTemperature::new(f64::INFINITY).unwrap().value(),
            DEFAULT_BETA_MAX
        );
        assert_eq!(InverseTemperature::new(5.0).unwrap().capped(2.0).value(), 2.0);
    }
}
