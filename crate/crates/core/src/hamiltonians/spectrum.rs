use faer::{Mat, Side};

use super::model::{SpinChainSpec, DENSE_SITE_LIMIT};
use crate::error::{invalid, Error, Result};
use crate::qstate::{DenseOperator, DensityMatrix};

/// Boltzmann weights below this fraction of the ground-state weight are
/// dropped when assembling reduced states.
const WEIGHT_FLOOR: f64 = 1e-18;
/// Largest reduced state handed out as a dense matrix.
const MAX_KEPT_SITES: usize = 10;

/// Full spectrum of a chain, block-diagonalised by spin-flip parity and
/// reflection.
///
/// Exact diagonalisation oracle for chains up to the dense limit. Memory
/// grows as `4^n / 4` reals, about 540 MB at `n = 14`.
#[derive(Clone, Debug)]
pub struct ExactSpectrum {
    spec: SpinChainSpec,
    sectors: Vec<Sector>,
    ground_energy: f64,
}

#[derive(Clone, Debug)]
struct Sector {
    /// Representatives `j <= reverse(j)`.
    reps: Vec<usize>,
    /// Reflection eigenvalue.
    reflection: f64,
    energies: Vec<f64>,
    /// Columns are eigenvectors in the symmetrised basis.
    vectors: Mat<f64>,
}

fn reverse_bits(j: usize, n: usize) -> usize {
    j.reverse_bits() >> (usize::BITS as usize - n)
}

impl ExactSpectrum {
    pub fn new(spec: &SpinChainSpec) -> Result<Self> {
        let n = spec.n;
        if n > DENSE_SITE_LIMIT {
            return Err(Error::Capacity {
                what: format!("exact diagonalisation on {n} sites"),
                limit: DENSE_SITE_LIMIT,
                hint: "use the MPS backend for longer chains",
            });
        }
        let dim = 1usize << n;
        let masks: Vec<usize> = spec.bond_masks().collect();
        let mut sectors = Vec::with_capacity(4);
        for parity in 0..2u32 {
            for reflection in [1.0, -1.0] {
                let reps: Vec<usize> = (0..dim)
                    .filter(|&j| j.count_ones() % 2 == parity)
                    .filter(|&j| {
                        let rj = reverse_bits(j, n);
                        j < rj || (j == rj && reflection > 0.0)
                    })
                    .collect();
                if reps.is_empty() {
                    continue;
                }
                let mut index = vec![usize::MAX; dim];
                for (a, &j) in reps.iter().enumerate() {
                    index[j] = a;
                    index[reverse_bits(j, n)] = a;
                }
                // Amplitude of |k> inside the symmetrised state built on rep(k).
                let amp = |k: usize, rep: usize| -> f64 {
                    let rk = reverse_bits(rep, n);
                    if rk == rep {
                        1.0
                    } else if k == rep {
                        std::f64::consts::FRAC_1_SQRT_2
                    } else {
                        reflection * std::f64::consts::FRAC_1_SQRT_2
                    }
                };
                let d = reps.len();
                let mut block = Mat::<f64>::zeros(d, d);
                for (b, &rep) in reps.iter().enumerate() {
                    let rr = reverse_bits(rep, n);
                    let members = [rep, rr];
                    let count = if rr == rep { 1 } else { 2 };
                    for &k in &members[..count] {
                        let ck = amp(k, rep);
                        let mut push = |target: usize, value: f64| {
                            let a = index[target];
                            if a != usize::MAX {
                                block[(a, b)] += amp(target, reps[a]) * value;
                            }
                        };
                        push(k, ck * spec.diagonal(k));
                        for &m in &masks {
                            push(k ^ m, ck * 0.5 * spec.coupling);
                        }
                    }
                }
                let evd = block
                    .self_adjoint_eigen(Side::Lower)
                    .map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
                let s = evd.S().column_vector();
                sectors.push(Sector {
                    reps,
                    reflection,
                    energies: (0..d).map(|i| s[i]).collect(),
                    vectors: evd.U().to_owned(),
                });
            }
        }
        let ground_energy = sectors
            .iter()
            .flat_map(|s| s.energies.first().copied())
            .fold(f64::INFINITY, f64::min);
        Ok(Self {
            spec: *spec,
            sectors,
            ground_energy,
        })
    }

    pub fn spec(&self) -> &SpinChainSpec {
        &self.spec
    }

    pub fn ground_energy(&self) -> f64 {
        self.ground_energy
    }

    /// All eigenvalues, ascending.
    pub fn energies(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.sectors.iter().flat_map(|s| s.energies.iter().copied()).collect();
        all.sort_by(f64::total_cmp);
        all
    }

    /// `ln Z(β)`.
    pub fn log_partition(&self, beta: f64) -> f64 {
        let shifted: f64 = self
            .sectors
            .iter()
            .flat_map(|s| s.energies.iter())
            .map(|&e| (-beta * (e - self.ground_energy)).exp())
            .sum();
        -beta * self.ground_energy + shifted.ln()
    }

    /// `Tr(Ω H)`.
    pub fn thermal_energy(&self, beta: f64) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for &e in self.sectors.iter().flat_map(|s| s.energies.iter()) {
            let w = (-beta * (e - self.ground_energy)).exp();
            num += w * e;
            den += w;
        }
        num / den
    }

    /// Reduced Gibbs state `Tr_{rest} e^{-βH}/Z` on the sites in `keep`,
    /// in ascending site order.
    pub fn reduced_state(&self, beta: f64, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.spec.n;
        if !(beta >= 0.0) {
            return Err(invalid(format!("inverse temperature must be >= 0, got {beta}")));
        }
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        if let Some(&bad) = kept.iter().find(|&&k| k >= n) {
            return Err(Error::SiteOutOfRange { index: bad, sites: n });
        }
        if kept.len() > MAX_KEPT_SITES {
            return Err(Error::Capacity {
                what: format!("dense reduced state on {} sites", kept.len()),
                limit: MAX_KEPT_SITES,
                hint: "keep fewer sites",
            });
        }
        let dim = 1usize << n;
        let da = 1usize << kept.len();
        let db = dim / da;
        // Split every basis index into (kept index, traced index).
        let split: Vec<(usize, usize)> = (0..dim)
            .map(|j| {
                let (mut a, mut b) = (0usize, 0usize);
                for site in 0..n {
                    let bit = (j >> (n - 1 - site)) & 1;
                    if kept.binary_search(&site).is_ok() {
                        a = (a << 1) | bit;
                    } else {
                        b = (b << 1) | bit;
                    }
                }
                (a, b)
            })
            .collect();

        let mut rho = vec![0.0f64; da * da];
        let mut z = 0.0;
        let mut psi = vec![0.0f64; dim];
        for sector in &self.sectors {
            for (k, &e) in sector.energies.iter().enumerate() {
                let w = (-beta * (e - self.ground_energy)).exp();
                if w < WEIGHT_FLOOR {
                    continue;
                }
                z += w;
                sector.expand(k, n, &mut psi);
                // psi laid out as a (da x db) matrix, then ρ_A += w Ψ Ψ^T.
                let mut grid = vec![0.0f64; da * db];
                for (j, &(a, b)) in split.iter().enumerate() {
                    grid[a * db + b] = psi[j];
                }
                for a in 0..da {
                    let ra = &grid[a * db..(a + 1) * db];
                    for a2 in a..da {
                        let rb = &grid[a2 * db..(a2 + 1) * db];
                        let dot: f64 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
                        rho[a * da + a2] += w * dot;
                    }
                }
            }
        }
        let op = DenseOperator::from_real_fn(da, |r, c| {
            let (lo, hi) = if r <= c { (r, c) } else { (c, r) };
            rho[lo * da + hi] / z
        });
        Ok(DensityMatrix::from_trusted(op))
    }

    /// The full Gibbs state; limited to small chains.
    pub fn gibbs_state(&self, beta: f64) -> Result<DensityMatrix> {
        let all: Vec<usize> = (0..self.spec.n).collect();
        self.reduced_state(beta, &all)
    }
}

impl Sector {
    fn expand(&self, k: usize, n: usize, psi: &mut [f64]) {
        psi.iter_mut().for_each(|x| *x = 0.0);
        for (a, &rep) in self.reps.iter().enumerate() {
            let c = self.vectors[(a, k)];
            let rr = reverse_bits(rep, n);
            if rr == rep {
                psi[rep] = c;
            } else {
                psi[rep] = c * std::f64::consts::FRAC_1_SQRT_2;
                psi[rr] = c * self.reflection * std::f64::consts::FRAC_1_SQRT_2;
            }
        }
    }
}
