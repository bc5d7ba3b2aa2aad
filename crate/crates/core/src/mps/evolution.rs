use faer::Mat;

use super::state::{PurifiedMps, SiteTensor, LOCAL_DIM};
use crate::c64;
use crate::error::{invalid, Error, Result};
use crate::hamiltonians::{bond_hamiltonians, SpinChainSpec};
use crate::qstate::{eig_hermitian, DenseOperator};

type Observer<'a> = &'a mut dyn FnMut(&PurifiedMps, f64);

/// Largest accepted imaginary-time step.
pub const DT_MAX: f64 = 0.05;
/// Default imaginary-time step.
pub const DEFAULT_DT: f64 = 0.02;
/// Default relative singular-value cutoff.
pub const DEFAULT_SV_CUTOFF: f64 = 1e-12;
/// Default bond dimension.
pub const DEFAULT_BOND_DIM: usize = 15;
/// Default accumulated truncation error above which a warning is recorded.
pub const DEFAULT_ERROR_BUDGET: f64 = 1e-3;

/// `e^{-βH/2} = (e^{-Δt H})^M` with `Δt = β / (2M)`, applied by second-order
/// even/odd splitting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrotterSchedule {
    pub beta_target: f64,
    /// Requested upper bound on the step.
    pub dt_max_step: f64,
    /// Actual step `β / (2M)`.
    pub dt: f64,
    pub steps: usize,
}

impl TrotterSchedule {
    /// Smallest `M` with `β / (2M) <= dt`.
    pub fn new(beta_target: f64, dt: f64) -> Result<Self> {
        if !(beta_target >= 0.0 && beta_target.is_finite()) {
            return Err(invalid(format!(
                "target inverse temperature must be finite and >= 0, got {beta_target}"
            )));
        }
        if !(dt > 0.0) {
            return Err(invalid(format!("time step must be > 0, got {dt}")));
        }
        if dt > DT_MAX {
            return Err(invalid(format!("time step {dt} exceeds the maximum {DT_MAX}")));
        }
        let (steps, actual) = split(beta_target, dt);
        Ok(Self {
            beta_target,
            dt_max_step: dt,
            dt: actual,
            steps,
        })
    }

    /// Schedule covering `[beta_from, beta_target]` with the same step bound.
    fn remaining(&self, beta_from: f64) -> Result<(usize, f64)> {
        let delta = self.beta_target - beta_from;
        if delta < -1e-12 {
            return Err(invalid(format!(
                "state is already at β = {beta_from}, beyond the target {}",
                self.beta_target
            )));
        }
        Ok(split(delta.max(0.0), self.dt_max_step))
    }
}

fn split(beta: f64, dt: f64) -> (usize, f64) {
    let steps = (beta / (2.0 * dt)).ceil() as usize;
    if steps == 0 {
        (0, 0.0)
    } else {
        (steps, beta / (2.0 * steps as f64))
    }
}

/// SVD truncation after every two-site gate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationConfig {
    pub max_bond: usize,
    /// Singular values below `cutoff · s_max` are discarded.
    pub cutoff: f64,
    /// Accumulated truncation error that triggers a warning.
    pub error_budget: f64,
}

impl TruncationConfig {
    pub fn new(max_bond: usize) -> Result<Self> {
        if max_bond == 0 {
            return Err(invalid("bond dimension must be >= 1"));
        }
        Ok(Self {
            max_bond,
            cutoff: DEFAULT_SV_CUTOFF,
            error_budget: DEFAULT_ERROR_BUDGET,
        })
    }
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self::new(DEFAULT_BOND_DIM).expect("default bond dimension is positive")
    }
}

/// `e^{-τ h_b}` for every bond, as 4×4 matrices on `(s_i, s_{i+1})`.
fn bond_gates(bonds: &[DenseOperator], tau: f64) -> Result<Vec<DenseOperator>> {
    bonds
        .iter()
        .map(|b| Ok(eig_hermitian(b)?.apply_fn(|e| (-tau * e).exp())))
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Parity {
    Even,
    Odd,
}

struct Layers {
    even_half: Vec<DenseOperator>,
    even_full: Vec<DenseOperator>,
    odd_full: Vec<DenseOperator>,
}

impl PurifiedMps {
    /// Applies `e^{-(β_target - β)H/2}` to the physical spins.
    pub fn evolve_to_beta(
        &mut self,
        spec: &SpinChainSpec,
        schedule: &TrotterSchedule,
        truncation: &TruncationConfig,
    ) -> Result<()> {
        self.evolve_impl(spec, schedule, truncation, None)
    }

    /// As [`evolve_to_beta`](Self::evolve_to_beta), calling `observer` with
    /// the state and its inverse temperature after every full Trotter step.
    pub fn evolve_observed(
        &mut self,
        spec: &SpinChainSpec,
        schedule: &TrotterSchedule,
        truncation: &TruncationConfig,
        observer: &mut dyn FnMut(&PurifiedMps, f64),
    ) -> Result<()> {
        self.evolve_impl(spec, schedule, truncation, Some(observer))
    }

    fn evolve_impl(
        &mut self,
        spec: &SpinChainSpec,
        schedule: &TrotterSchedule,
        truncation: &TruncationConfig,
        mut observer: Option<Observer<'_>>,
    ) -> Result<()> {
        if spec.n != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: spec.n,
            });
        }
        if truncation.max_bond == 0 {
            return Err(invalid("bond dimension must be >= 1"));
        }
        let (steps, dt) = schedule.remaining(self.beta)?;
        let beta0 = self.beta;
        self.max_bond = self.max_bond.max(truncation.max_bond);
        if steps == 0 {
            return Ok(());
        }
        let bonds = bond_hamiltonians(spec);
        let layers = Layers {
            even_half: bond_gates(&bonds, 0.5 * dt)?,
            even_full: bond_gates(&bonds, dt)?,
            odd_full: bond_gates(&bonds, dt)?,
        };
        if self.center.is_none() {
            self.canonicalize(0)?;
        }
        let mut last_even_pending = false;
        for step in 0..steps {
            let observed = observer.is_some();
            // Adjacent even half-steps merge into one full step unless the
            // state is observed in between.
            if last_even_pending {
                self.apply_layer(Parity::Even, &layers.even_full, truncation)?;
            } else {
                self.apply_layer(Parity::Even, &layers.even_half, truncation)?;
            }
            self.apply_layer(Parity::Odd, &layers.odd_full, truncation)?;
            let last = step + 1 == steps;
            if observed || last {
                self.apply_layer(Parity::Even, &layers.even_half, truncation)?;
                last_even_pending = false;
            } else {
                last_even_pending = true;
            }
            if let Some(obs) = observer.as_mut() {
                self.beta = beta0 + 2.0 * dt * (step + 1) as f64;
                obs(self, self.beta);
            }
        }
        self.beta = schedule.beta_target;
        if self.truncation_error > truncation.error_budget && self.warnings.is_empty() {
            self.warnings.push(format!(
                "accumulated truncation error {:.3e} exceeds budget {:.3e}",
                self.truncation_error, truncation.error_budget
            ));
        }
        Ok(())
    }

    fn apply_layer(&mut self, parity: Parity, gates: &[DenseOperator], truncation: &TruncationConfig) -> Result<()> {
        let n = self.n();
        let first = if parity == Parity::Even { 0 } else { 1 };
        let bonds: Vec<usize> = (first..n - 1).step_by(2).collect();
        if bonds.is_empty() {
            return Ok(());
        }
        let center = self.center.unwrap_or(0);
        let left_to_right = center <= n / 2;
        if left_to_right {
            for &b in &bonds {
                self.move_center(b)?;
                self.apply_gate(b, &gates[b], truncation, true)?;
            }
        } else {
            for &b in bonds.iter().rev() {
                self.move_center(b + 1)?;
                self.apply_gate(b, &gates[b], truncation, false)?;
            }
        }
        Ok(())
    }

    /// Applies a 4×4 gate on the physical spins of bond `(b, b+1)`; the
    /// center must sit on one of the two sites. Afterwards the center is on
    /// `b + 1` when `center_right`, else on `b`.
    fn apply_gate(
        &mut self,
        b: usize,
        gate: &DenseOperator,
        truncation: &TruncationConfig,
        center_right: bool,
    ) -> Result<()> {
        let (a, c) = (&self.tensors[b], &self.tensors[b + 1]);
        let (dl, dr) = (a.dl, c.dr);
        // θ[l, p1, p2, r] = Σ_k A[l, p1, k] C[k, p2, r]
        let theta = &a.as_left_matrix() * &c.as_right_matrix();
        let g = gate.as_mat();
        let rows = dl * LOCAL_DIM;
        let cols = LOCAL_DIM * dr;
        let mut out = Mat::<c64>::zeros(rows, cols);
        for l in 0..dl {
            for a1 in 0..2 {
                for a2 in 0..2 {
                    for r in 0..dr {
                        let mut src = [c64::new(0.0, 0.0); 4];
                        for s1 in 0..2 {
                            for s2 in 0..2 {
                                src[2 * s1 + s2] = theta[(l * LOCAL_DIM + 2 * s1 + a1, (2 * s2 + a2) * dr + r)];
                            }
                        }
                        for t1 in 0..2 {
                            for t2 in 0..2 {
                                let row = 2 * t1 + t2;
                                let mut acc = c64::new(0.0, 0.0);
                                for (col, &v) in src.iter().enumerate() {
                                    acc += g[(row, col)] * v;
                                }
                                out[(l * LOCAL_DIM + 2 * t1 + a1, (2 * t2 + a2) * dr + r)] = acc;
                            }
                        }
                    }
                }
            }
        }
        let svd = out.thin_svd().map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
        let s = svd.S().column_vector();
        let k_all = s.nrows();
        let sv: Vec<f64> = (0..k_all).map(|i| s[i].re).collect();
        let total: f64 = sv.iter().map(|x| x * x).sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::LinearAlgebra("two-site tensor vanished during evolution".into()));
        }
        let smax = sv[0];
        let mut keep = sv
            .iter()
            .take(truncation.max_bond)
            .take_while(|&&x| x > truncation.cutoff * smax)
            .count();
        keep = keep.max(1);
        let kept: f64 = sv[..keep].iter().map(|x| x * x).sum();
        self.truncation_error += (total - kept) / total;
        let norm = kept.sqrt();
        let u = svd.U();
        let v = svd.V();
        let left;
        let right;
        if center_right {
            left = Mat::from_fn(rows, keep, |i, j| u[(i, j)]);
            right = Mat::from_fn(keep, cols, |i, j| v[(j, i)].conj() * (sv[i] / norm));
        } else {
            left = Mat::from_fn(rows, keep, |i, j| u[(i, j)] * (sv[j] / norm));
            right = Mat::from_fn(keep, cols, |i, j| v[(j, i)].conj());
        }
        self.tensors[b] = SiteTensor::from_left_matrix(left.as_ref());
        self.tensors[b + 1] = SiteTensor::from_right_matrix(right.as_ref());
        self.center = Some(if center_right { b + 1 } else { b });
        Ok(())
    }
}
