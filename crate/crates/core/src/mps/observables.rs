use std::collections::BTreeMap;

use super::state::{PurifiedMps, SiteTensor};
use crate::c64;
use crate::error::{invalid, Error, Result};
use crate::hamiltonians::SpinChainSpec;
use crate::qstate::{from_pauli_coefficients, DenseOperator, DensityMatrix, Pauli, PauliString};

/// Largest block for the Pauli reconstruction (`4^m` strings).
pub const PAULI_BLOCK_LIMIT: usize = 6;
/// Largest block for direct contraction.
pub const DIRECT_BLOCK_LIMIT: usize = 10;

/// How [`PurifiedMps::block_rdm`] assembles the reduced state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RdmMethod {
    /// Evaluate all `4^m` Pauli-string expectations and expand.
    PauliReconstruction,
    /// Contract the block with its environments and trace the ancillas.
    #[default]
    DirectContraction,
}

/// Square matrix `E[k, k']`, ket index first.
#[derive(Clone, Debug)]
struct Env {
    d: usize,
    data: Vec<c64>,
}

impl Env {
    fn unit() -> Self {
        Self {
            d: 1,
            data: vec![c64::new(1.0, 0.0)],
        }
    }

    fn trace(&self) -> c64 {
        (0..self.d).map(|i| self.data[i * self.d + i]).sum()
    }
}

/// `<s'|O|s>` for a 2×2 operator, or the identity.
fn op_entries(op: Option<&DenseOperator>) -> [[c64; 2]; 2] {
    match op {
        Some(o) => [[o.get(0, 0), o.get(0, 1)], [o.get(1, 0), o.get(1, 1)]],
        None => [
            [c64::new(1.0, 0.0), c64::new(0.0, 0.0)],
            [c64::new(0.0, 0.0), c64::new(1.0, 0.0)],
        ],
    }
}

/// Left transfer: `E'[r, r'] = Σ E[k, k'] A[k, (s, a), r] O[s', s] conj(A[k', (s', a), r'])`.
fn push_left(env: &Env, t: &SiteTensor, op: &[[c64; 2]; 2]) -> Env {
    let (dl, dr) = (t.dl, t.dr);
    // y[(p', r, k')] = Σ_k Σ_s E[k, k'] A[k, (s, a), r] O[s', s], with p' = 2s' + a.
    let mut y = vec![c64::new(0.0, 0.0); 4 * dr * dl];
    for k in 0..dl {
        for kp in 0..dl {
            let e = env.data[k * dl + kp];
            if e == c64::new(0.0, 0.0) {
                continue;
            }
            for (sp, row) in op.iter().enumerate() {
                for a in 0..2 {
                    let (o0, o1) = (row[0] * e, row[1] * e);
                    if o0 == c64::new(0.0, 0.0) && o1 == c64::new(0.0, 0.0) {
                        continue;
                    }
                    let base = ((2 * sp + a) * dr) * dl;
                    for r in 0..dr {
                        let v = o0 * t.get(k, a, r) + o1 * t.get(k, 2 + a, r);
                        y[base + r * dl + kp] += v;
                    }
                }
            }
        }
    }
    let mut out = vec![c64::new(0.0, 0.0); dr * dr];
    for p in 0..4 {
        for r in 0..dr {
            for kp in 0..dl {
                let v = y[(p * dr + r) * dl + kp];
                if v == c64::new(0.0, 0.0) {
                    continue;
                }
                for rp in 0..dr {
                    out[r * dr + rp] += v * t.get(kp, p, rp).conj();
                }
            }
        }
    }
    Env { d: dr, data: out }
}

/// Right transfer with the identity: `E'[k, k'] = Σ A[k, p, r] conj(A[k', p, r']) E[r, r']`.
fn push_right(env: &Env, t: &SiteTensor) -> Env {
    let (dl, dr) = (t.dl, t.dr);
    // y[k, p, r'] = Σ_r A[k, p, r] E[r, r']
    let mut y = vec![c64::new(0.0, 0.0); dl * 4 * dr];
    for k in 0..dl {
        for p in 0..4 {
            for r in 0..dr {
                let a = t.get(k, p, r);
                if a == c64::new(0.0, 0.0) {
                    continue;
                }
                for rp in 0..dr {
                    y[(k * 4 + p) * dr + rp] += a * env.data[r * dr + rp];
                }
            }
        }
    }
    let mut out = vec![c64::new(0.0, 0.0); dl * dl];
    for k in 0..dl {
        for kp in 0..dl {
            let mut acc = c64::new(0.0, 0.0);
            for p in 0..4 {
                for rp in 0..dr {
                    acc += y[(k * 4 + p) * dr + rp] * t.get(kp, p, rp).conj();
                }
            }
            out[k * dl + kp] = acc;
        }
    }
    Env { d: dl, data: out }
}

/// `Σ_{r, r'} E[r, r'] R[r, r']`.
fn close(left: &Env, right: &Env) -> c64 {
    left.data.iter().zip(&right.data).map(|(a, b)| a * b).sum()
}

/// Left environments `left[i]` of sites `0..i` and right environments
/// `right[i]` of sites `i..n`, all with identity operators.
pub struct Environments {
    left: Vec<Env>,
    right: Vec<Env>,
    norm: f64,
}

impl Environments {
    pub fn new(state: &PurifiedMps) -> Self {
        let n = state.n();
        let id = op_entries(None);
        let mut left = Vec::with_capacity(n + 1);
        left.push(Env::unit());
        for t in &state.tensors {
            let next = push_left(left.last().expect("non-empty"), t, &id);
            left.push(next);
        }
        let mut right = vec![Env::unit(); n + 1];
        for i in (0..n).rev() {
            right[i] = push_right(&right[i + 1], &state.tensors[i]);
        }
        let norm = left[n].trace().re;
        Self { left, right, norm }
    }

    /// `<ρ|ρ>`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Normalised expectation of a product of single-site operators on the
    /// contiguous sites starting at `first`.
    pub fn local_expectation(&self, state: &PurifiedMps, first: usize, ops: &[&DenseOperator]) -> f64 {
        let mut env = self.left[first].clone();
        for (k, op) in ops.iter().enumerate() {
            env = push_left(&env, &state.tensors[first + k], &op_entries(Some(op)));
        }
        close(&env, &self.right[first + ops.len()]).re / self.norm
    }
}

impl PurifiedMps {
    /// `<O_1 ⊗ … ⊗ O_n>` normalised by `<ρ|ρ>`; unlisted sites carry the
    /// identity.
    pub fn expectation(&self, ops: &BTreeMap<usize, DenseOperator>) -> Result<f64> {
        for (&site, op) in ops {
            if site >= self.n() {
                return Err(Error::SiteOutOfRange {
                    index: site,
                    sites: self.n(),
                });
            }
            if op.dim() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    found: op.dim(),
                });
            }
        }
        let id = op_entries(None);
        let mut num = Env::unit();
        let mut den = Env::unit();
        for (i, t) in self.tensors.iter().enumerate() {
            num = match ops.get(&i) {
                Some(op) => push_left(&num, t, &op_entries(Some(op))),
                None => push_left(&num, t, &id),
            };
            den = push_left(&den, t, &id);
        }
        let norm = den.trace();
        if !(norm.re > 0.0) {
            return Err(Error::LinearAlgebra("state has vanishing norm".into()));
        }
        Ok((num.trace() / norm).re)
    }

    /// Energy `<H>` of the state for the chain `spec`.
    pub fn energy(&self, spec: &SpinChainSpec) -> Result<f64> {
        if spec.n != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: spec.n,
            });
        }
        let env = Environments::new(self);
        let (x, z) = (Pauli::X.matrix(), Pauli::Z.matrix());
        let mut e = 0.0;
        for i in 0..self.n() {
            e -= 0.5 * spec.h * env.local_expectation(self, i, &[&z]);
            if i + 1 < self.n() {
                e += 0.5 * spec.coupling * env.local_expectation(self, i, &[&x, &x]);
            }
        }
        Ok(e)
    }

    /// First site of the centered block of `m` sites.
    pub fn centered_block_start(&self, m: usize) -> usize {
        self.n().saturating_sub(m) / 2
    }

    /// Reduced state of the `m` contiguous sites starting at `first`.
    pub fn block_rdm(&self, first: usize, m: usize, method: RdmMethod) -> Result<DensityMatrix> {
        if m == 0 || first + m > self.n() {
            return Err(invalid(format!(
                "block [{first}, {}) does not fit in a chain of {} sites",
                first + m,
                self.n()
            )));
        }
        match method {
            RdmMethod::PauliReconstruction => self.block_rdm_pauli(first, m),
            RdmMethod::DirectContraction => self.block_rdm_direct(first, m),
        }
    }

    /// Reduced state of the centered block.
    pub fn centered_block_rdm(&self, m: usize, method: RdmMethod) -> Result<DensityMatrix> {
        self.block_rdm(self.centered_block_start(m), m, method)
    }

    fn block_rdm_pauli(&self, first: usize, m: usize) -> Result<DensityMatrix> {
        if m > PAULI_BLOCK_LIMIT {
            return Err(Error::Capacity {
                what: format!("Pauli reconstruction of {m} sites"),
                limit: PAULI_BLOCK_LIMIT,
                hint: "use direct contraction for larger blocks",
            });
        }
        let env = Environments::new(self);
        let paulis: Vec<[[c64; 2]; 2]> = Pauli::ALL.iter().map(|p| op_entries(Some(&p.matrix()))).collect();
        let mut coeffs = BTreeMap::new();
        // Depth-first over strings so shared prefixes are contracted once.
        let mut stack: Vec<(Vec<Pauli>, Env)> = vec![(Vec::new(), env.left[first].clone())];
        while let Some((prefix, e)) = stack.pop() {
            if prefix.len() == m {
                let v = close(&e, &env.right[first + m]).re / env.norm;
                coeffs.insert(PauliString::new(prefix), v);
                continue;
            }
            let t = &self.tensors[first + prefix.len()];
            for (k, &p) in Pauli::ALL.iter().enumerate() {
                let mut next = prefix.clone();
                next.push(p);
                stack.push((next, push_left(&e, t, &paulis[k])));
            }
        }
        coeffs.insert(PauliString::identity(m), 1.0);
        from_pauli_coefficients(&coeffs, m)
    }

    fn block_rdm_direct(&self, first: usize, m: usize) -> Result<DensityMatrix> {
        if m > DIRECT_BLOCK_LIMIT {
            return Err(Error::Capacity {
                what: format!("dense reduced state of {m} sites"),
                limit: DIRECT_BLOCK_LIMIT,
                hint: "choose a smaller block",
            });
        }
        let env = Environments::new(self);
        // c[(S, S'), k, k'] grows one site at a time; S, S' are the physical
        // indices of the sites absorbed so far.
        let left = &env.left[first];
        let mut dim = 1usize;
        let mut bond = left.d;
        let mut c = left.data.clone();
        for t in &self.tensors[first..first + m] {
            let (dl, dr) = (t.dl, t.dr);
            debug_assert_eq!(dl, bond);
            let new_dim = dim * 2;
            let mut next = vec![c64::new(0.0, 0.0); new_dim * new_dim * dr * dr];
            // y[(S, S'), s, a, r, k'] = Σ_k c[(S, S'), k, k'] A[k, (s, a), r]
            let mut y = vec![c64::new(0.0, 0.0); 4 * dr * dl];
            for ss in 0..dim * dim {
                let block = &c[ss * dl * dl..(ss + 1) * dl * dl];
                y.iter_mut().for_each(|v| *v = c64::new(0.0, 0.0));
                for k in 0..dl {
                    for kp in 0..dl {
                        let e = block[k * dl + kp];
                        if e == c64::new(0.0, 0.0) {
                            continue;
                        }
                        for p in 0..4 {
                            for r in 0..dr {
                                y[(p * dr + r) * dl + kp] += e * t.get(k, p, r);
                            }
                        }
                    }
                }
                let (row, col) = (ss / dim, ss % dim);
                for s in 0..2 {
                    for sp in 0..2 {
                        let nrow = row * 2 + s;
                        let ncol = col * 2 + sp;
                        let out = &mut next[(nrow * new_dim + ncol) * dr * dr..(nrow * new_dim + ncol + 1) * dr * dr];
                        for a in 0..2 {
                            for r in 0..dr {
                                for kp in 0..dl {
                                    let v = y[((2 * s + a) * dr + r) * dl + kp];
                                    if v == c64::new(0.0, 0.0) {
                                        continue;
                                    }
                                    for rp in 0..dr {
                                        out[r * dr + rp] += v * t.get(kp, 2 * sp + a, rp).conj();
                                    }
                                }
                            }
                        }
                    }
                }
            }
            c = next;
            dim = new_dim;
            bond = dr;
        }
        let right = &env.right[first + m];
        let rho = DenseOperator::from_fn(dim, |i, j| {
            let block = &c[(i * dim + j) * bond * bond..(i * dim + j + 1) * bond * bond];
            block.iter().zip(&right.data).map(|(a, b)| a * b).sum::<c64>()
        });
        DensityMatrix::from_unnormalized(rho)
    }
}
