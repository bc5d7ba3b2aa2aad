use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::quadrature::{integrate, DEFAULT_PANEL_BUDGET};
use crate::error::{invalid, Error, Result};
use crate::hamiltonians::{ExactSpectrum, SpinChainSpec, DENSE_SITE_LIMIT};
use crate::qstate::{from_pauli_coefficients, DensityMatrix, PauliString};

/// Default absolute tolerance of the `G_r` integrals.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
/// Below this `ω` the ratio `tanh(βω/2)/ω` is replaced by its series.
const OMEGA_SERIES: f64 = 1e-8;

/// `tanh(βω/2) / ω` with its removable point handled.
fn thermal_ratio(beta: f64, omega: f64) -> f64 {
    if omega < OMEGA_SERIES {
        let x = 0.5 * beta * omega;
        0.5 * beta * (1.0 - x * x / 3.0)
    } else {
        (0.5 * beta * omega).tanh() / omega
    }
}

fn omega(h: f64, phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    (s * s + (h - c) * (h - c)).sqrt()
}

fn check_inputs(beta: f64, h: f64, quad_tol: f64) -> Result<()> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(invalid(format!(
            "inverse temperature must be finite and >= 0, got {beta}"
        )));
    }
    if !h.is_finite() {
        return Err(invalid(format!("field must be finite, got {h}")));
    }
    if !(quad_tol > 0.0) {
        return Err(invalid(format!("quadrature tolerance must be > 0, got {quad_tol}")));
    }
    Ok(())
}

/// `G_r` for every `r` in `rs`, from one vector-valued quadrature.
fn g_values(beta: f64, h: f64, rs: &[i64], quad_tol: f64) -> Result<Vec<f64>> {
    check_inputs(beta, h, quad_tol)?;
    if beta == 0.0 {
        return Ok(vec![0.0; rs.len()]);
    }
    // G_r = (1/π) ∫_0^π [h cos(rφ) - cos((r+1)φ)] tanh(βω/2)/ω dφ
    let (values, _) = integrate(
        |phi, out| {
            let t = thermal_ratio(beta, omega(h, phi));
            for (o, &r) in out.iter_mut().zip(rs) {
                let r = r as f64;
                *o = (h * (r * phi).cos() - ((r + 1.0) * phi).cos()) * t;
            }
        },
        0.0,
        PI,
        rs.len(),
        quad_tol * PI,
        DEFAULT_PANEL_BUDGET,
    )?;
    Ok(values.into_iter().map(|v| v / PI).collect())
}

/// The fermionic two-point function `G_r` of the infinite chain.
pub fn compute_g(beta: f64, h: f64, r: i64, quad_tol: f64) -> Result<f64> {
    Ok(g_values(beta, h, &[r], quad_tol)?[0])
}

/// `G_r` for `r ∈ [-r_max, r_max]` at fixed `(β, h)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelatorTable {
    pub beta: f64,
    pub h: f64,
    pub r_max: usize,
    pub quad_tol: f64,
    g: Vec<f64>,
}

impl CorrelatorTable {
    pub fn new(beta: f64, h: f64, r_max: usize, quad_tol: f64) -> Result<Self> {
        let rm = r_max as i64;
        let rs: Vec<i64> = (-rm..=rm).collect();
        let g = g_values(beta, h, &rs, quad_tol)?;
        Ok(Self {
            beta,
            h,
            r_max,
            quad_tol,
            g,
        })
    }

    /// `G_r`; `|r| <= r_max`.
    pub fn g(&self, r: i64) -> Result<f64> {
        if r.unsigned_abs() as usize > self.r_max {
            return Err(invalid(format!("separation {r} outside table range ±{}", self.r_max)));
        }
        Ok(self.g[(r + self.r_max as i64) as usize])
    }

    fn check_separation(&self, r: usize) -> Result<()> {
        if r == 0 {
            return Err(invalid("separation must be >= 1"));
        }
        if r > self.r_max {
            return Err(invalid(format!("separation {r} exceeds table range {}", self.r_max)));
        }
        Ok(())
    }

    fn toeplitz_det(&self, r: usize, offset: i64) -> Result<f64> {
        let mut m = vec![0.0; r * r];
        for i in 0..r {
            for j in 0..r {
                m[i * r + j] = self.g(i as i64 - j as i64 + offset)?;
            }
        }
        Ok(determinant(&mut m, r))
    }
}

/// Determinant by LU with partial pivoting; `a` is overwritten.
fn determinant(a: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| a[p * n + col].abs().total_cmp(&a[q * n + col].abs()))
            .expect("non-empty range");
        if a[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        let d = a[col * n + col];
        det *= d;
        for row in col + 1..n {
            let factor = a[row * n + col] / d;
            for k in col..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
        }
    }
    det
}

/// `<σx^i σx^{i+r}>`, an `r × r` Toeplitz determinant of `G_{i-j-1}`.
pub fn xx_correlator(table: &CorrelatorTable, r: usize) -> Result<f64> {
    table.check_separation(r)?;
    table.toeplitz_det(r, -1)
}

/// `<σy^i σy^{i+r}>`, an `r × r` Toeplitz determinant of `G_{i-j+1}`.
pub fn yy_correlator(table: &CorrelatorTable, r: usize) -> Result<f64> {
    table.check_separation(r)?;
    table.toeplitz_det(r, 1)
}

/// `<σz^i σz^{i+r}> = G_0^2 - G_r G_{-r}`.
pub fn zz_correlator(table: &CorrelatorTable, r: usize) -> Result<f64> {
    table.check_separation(r)?;
    let g0 = table.g(0)?;
    Ok(g0 * g0 - table.g(r as i64)? * table.g(-(r as i64))?)
}

/// `<σz> = G_0`.
pub fn magnetization_z(table: &CorrelatorTable) -> f64 {
    table.g[table.r_max]
}

/// Two-spin reduced state of the infinite chain at separation `r`.
#[derive(Clone, Debug)]
pub struct PairRdm {
    pub rho: DensityMatrix,
    pub r: usize,
    pub beta: f64,
    pub h: f64,
}

impl PairRdm {
    /// `ρ = ¼[II + mz(ZI + IZ) + xx XX + yy YY + zz ZZ]`.
    pub fn from_table(table: &CorrelatorTable, r: usize) -> Result<Self> {
        let entries = [
            ("II", 1.0),
            ("ZI", magnetization_z(table)),
            ("IZ", magnetization_z(table)),
            ("XX", xx_correlator(table, r)?),
            ("YY", yy_correlator(table, r)?),
            ("ZZ", zz_correlator(table, r)?),
        ];
        let coeffs: BTreeMap<PauliString, f64> = entries
            .iter()
            .map(|&(label, v)| (label.parse().expect("static label"), v))
            .collect();
        let rho = from_pauli_coefficients(&coeffs, 2)?;
        Ok(Self {
            rho,
            r,
            beta: table.beta,
            h: table.h,
        })
    }
}

/// Reduced state `ρ̃_{2,r}(β)` of two spins `r` sites apart in the infinite
/// chain.
pub fn build_pair_rdm(beta: f64, h: f64, r: usize, quad_tol: f64) -> Result<PairRdm> {
    if r == 0 {
        return Err(invalid("separation must be >= 1"));
    }
    let table = CorrelatorTable::new(beta, h, r, quad_tol)?;
    PairRdm::from_table(&table, r)
}

/// Thermal reference for a pair `r` apart: the Gibbs state of `r + 1` spins
/// with all but the two end spins traced out.
pub fn reference_distant_pair(beta: f64, h: f64, r: usize) -> Result<DensityMatrix> {
    if r == 0 {
        return Err(invalid("separation must be >= 1"));
    }
    if r + 1 > DENSE_SITE_LIMIT {
        return Err(Error::Capacity {
            what: format!("thermal reference on {} sites", r + 1),
            limit: DENSE_SITE_LIMIT - 1,
            hint: "separation r must satisfy r + 1 <= 14",
        });
    }
    check_inputs(beta, h, 1.0)?;
    let spectrum = ExactSpectrum::new(&SpinChainSpec::new(r + 1, h)?)?;
    spectrum.reduced_state(beta, &[0, r])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_temperature_table_vanishes() {
        let t = CorrelatorTable::new(0.0, 0.7, 8, DEFAULT_QUAD_TOL).unwrap();
        for r in -8..=8 {
            assert_eq!(t.g(r).unwrap(), 0.0);
        }
        assert_eq!(xx_correlator(&t, 3).unwrap(), 0.0);
        assert_eq!(zz_correlator(&t, 3).unwrap(), 0.0);
    }

    #[test]
    fn single_entry_determinants() {
        let t = CorrelatorTable::new(3.0, 0.4, 2, DEFAULT_QUAD_TOL).unwrap();
        assert_eq!(xx_correlator(&t, 1).unwrap(), t.g(-1).unwrap());
        assert_eq!(yy_correlator(&t, 1).unwrap(), t.g(1).unwrap());
    }

    #[test]
    fn zero_field_ground_doublet() {
        // At h = 0, <σxσx> = -tanh(β/2) exactly.
        let t = CorrelatorTable::new(2.0, 0.0, 1, 1e-12).unwrap();
        assert!((xx_correlator(&t, 1).unwrap() + 1f64.tanh()).abs() < 1e-10);
    }

    #[test]
    fn determinant_matches_hand_values() {
        let mut a = vec![0.0, 2.0, 1.0, 3.0];
        assert!((determinant(&mut a, 2) + 2.0).abs() < 1e-15);
        let mut b = vec![2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0];
        assert!((determinant(&mut b, 3) - 4.0).abs() < 1e-14);
    }

    #[test]
    fn range_errors() {
        let t = CorrelatorTable::new(1.0, 0.5, 2, DEFAULT_QUAD_TOL).unwrap();
        assert!(xx_correlator(&t, 3).is_err());
        assert!(zz_correlator(&t, 0).is_err());
        assert!(t.g(-3).is_err());
        assert!(reference_distant_pair(1.0, 0.5, 14).is_err());
    }

    #[test]
    fn removable_point_series() {
        let beta = 7.0;
        let tiny = 1e-9;
        assert!((thermal_ratio(beta, tiny) - beta / 2.0).abs() < 1e-12);
        let near = 1.01e-8;
        assert!((thermal_ratio(beta, near) - beta / 2.0).abs() < 1e-12);
    }
}
