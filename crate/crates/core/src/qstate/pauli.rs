use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::operator::{DenseOperator, DensityMatrix};
use crate::c64;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> DenseOperator {
        let (o, l, i) = (c64::new(0.0, 0.0), c64::new(1.0, 0.0), c64::new(0.0, 1.0));
        let rows: [[c64; 2]; 2] = match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        };
        DenseOperator::from_fn(2, |r, c| rows[r][c])
    }

    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    fn signs(self) -> bool {
        matches!(self, Pauli::Y | Pauli::Z)
    }

    fn label(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of Pauli matrices, one label per site (site 0 first).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    sites: Vec<Pauli>,
}

impl PauliString {
    pub fn new(sites: Vec<Pauli>) -> Self {
        Self { sites }
    }

    pub fn identity(m: usize) -> Self {
        Self {
            sites: vec![Pauli::I; m],
        }
    }

    /// Identity except for `op` on each listed site.
    pub fn with_ops(m: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::identity(m);
        for &(site, p) in ops {
            if site >= m {
                return Err(Error::SiteOutOfRange { index: site, sites: m });
            }
            s.sites[site] = p;
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[Pauli] {
        &self.sites
    }

    pub fn is_identity(&self) -> bool {
        self.sites.iter().all(|&p| p == Pauli::I)
    }

    /// All `4^m` strings in lexicographic order.
    pub fn all(m: usize) -> impl Iterator<Item = PauliString> {
        (0..1usize << (2 * m)).map(move |code| {
            let sites = (0..m).map(|k| Pauli::ALL[(code >> (2 * (m - 1 - k))) & 3]).collect();
            PauliString { sites }
        })
    }

    /// `(flip mask, sign mask, number of Y)`; bit `m-1-k` belongs to site `k`.
    fn masks(&self) -> (usize, usize, u32) {
        let m = self.sites.len();
        let (mut x, mut z, mut ny) = (0usize, 0usize, 0u32);
        for (k, &p) in self.sites.iter().enumerate() {
            let bit = 1usize << (m - 1 - k);
            if p.flips() {
                x |= bit;
            }
            if p.signs() {
                z |= bit;
            }
            if p == Pauli::Y {
                ny += 1;
            }
        }
        (x, z, ny)
    }

    /// `P|j> = phase(j) |j ^ flip>`, with `phase(j) = i^{#Y} (-1)^{popcount(j & sign)}`.
    fn phase(j: usize, sign: usize, ny: u32) -> c64 {
        let base = match ny % 4 {
            0 => c64::new(1.0, 0.0),
            1 => c64::new(0.0, 1.0),
            2 => c64::new(-1.0, 0.0),
            _ => c64::new(0.0, -1.0),
        };
        if (j & sign).count_ones() % 2 == 1 {
            -base
        } else {
            base
        }
    }

    pub fn matrix(&self) -> DenseOperator {
        let dim = 1usize << self.len();
        let (x, z, ny) = self.masks();
        DenseOperator::from_fn(dim, |r, c| {
            if r == c ^ x {
                Self::phase(c, z, ny)
            } else {
                c64::new(0.0, 0.0)
            }
        })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.sites {
            write!(f, "{}", p.label())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let sites = s
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::InvalidParameter(format!("invalid Pauli label '{other}'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if sites.is_empty() {
            return Err(Error::InvalidParameter("empty Pauli string".into()));
        }
        Ok(Self { sites })
    }
}

/// `Tr(ρ P)` in `O(dim)`.
pub fn pauli_expectation(rho: &DensityMatrix, p: &PauliString) -> Result<f64> {
    let dim = 1usize << p.len();
    if dim != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: dim,
        });
    }
    let (x, z, ny) = p.masks();
    let m = rho.as_mat();
    let mut acc = c64::new(0.0, 0.0);
    for j in 0..dim {
        acc += m[(j, j ^ x)] * PauliString::phase(j, z, ny);
    }
    Ok(acc.re)
}

/// `ρ = 2^{-m} Σ_P c_P P`. The identity coefficient must equal 1; the result
/// is checked for positivity.
pub fn from_pauli_coefficients(coeffs: &BTreeMap<PauliString, f64>, m: usize) -> Result<DensityMatrix> {
    let identity = PauliString::identity(m);
    let c_id = coeffs.get(&identity).copied().unwrap_or(0.0);
    if (c_id - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "identity coefficient must be 1, got {c_id}"
        )));
    }
    let dim = 1usize << m;
    let mut entries = vec![c64::new(0.0, 0.0); dim * dim];
    let norm = 1.0 / dim as f64;
    for (p, &c) in coeffs {
        if p.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: p.len(),
            });
        }
        if !c.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite coefficient for {p}")));
        }
        let (x, z, ny) = p.masks();
        for j in 0..dim {
            entries[(j ^ x) * dim + j] += PauliString::phase(j, z, ny) * (c * norm);
        }
    }
    DensityMatrix::new(DenseOperator::from_fn(dim, |r, c| entries[r * dim + c]))
}

/// All `4^m` coefficients `Tr(ρ P)`.
pub fn pauli_coefficients(rho: &DensityMatrix) -> Result<BTreeMap<PauliString, f64>> {
    let m = rho
        .num_sites()
        .ok_or_else(|| Error::InvalidParameter(format!("dimension {} is not a qubit register", rho.dim())))?;
    PauliString::all(m)
        .map(|p| pauli_expectation(rho, &p).map(|v| (p, v)))
        .collect()
}
