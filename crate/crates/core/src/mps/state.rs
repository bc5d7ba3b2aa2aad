use faer::linalg::solvers::DenseSolveCore;
use faer::{Mat, MatRef};

use crate::c64;
use crate::error::{invalid, Error, Result};

/// Local dimension of the combined physical ⊗ ancilla index, `p = 2s + a`.
pub const LOCAL_DIM: usize = 4;

/// One tensor `A[l, p, r]`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteTensor {
    pub dl: usize,
    pub dr: usize,
    pub data: Vec<c64>,
}

impl SiteTensor {
    pub fn zeros(dl: usize, dr: usize) -> Self {
        Self {
            dl,
            dr,
            data: vec![c64::new(0.0, 0.0); dl * LOCAL_DIM * dr],
        }
    }

    #[inline]
    pub fn idx(&self, l: usize, p: usize, r: usize) -> usize {
        (l * LOCAL_DIM + p) * self.dr + r
    }

    #[inline]
    pub fn get(&self, l: usize, p: usize, r: usize) -> c64 {
        self.data[self.idx(l, p, r)]
    }

    /// `(dl·4) × dr` matrix view of the tensor.
    pub(crate) fn as_left_matrix(&self) -> Mat<c64> {
        Mat::from_fn(self.dl * LOCAL_DIM, self.dr, |row, col| self.data[row * self.dr + col])
    }

    /// `dl × (4·dr)` matrix view of the tensor.
    pub(crate) fn as_right_matrix(&self) -> Mat<c64> {
        let w = LOCAL_DIM * self.dr;
        Mat::from_fn(self.dl, w, |row, col| self.data[row * w + col])
    }

    pub(crate) fn from_left_matrix(m: MatRef<'_, c64>) -> Self {
        let dl = m.nrows() / LOCAL_DIM;
        let dr = m.ncols();
        let mut t = Self::zeros(dl, dr);
        for row in 0..m.nrows() {
            for col in 0..dr {
                t.data[row * dr + col] = m[(row, col)];
            }
        }
        t
    }

    pub(crate) fn from_right_matrix(m: MatRef<'_, c64>) -> Self {
        let dl = m.nrows();
        let dr = m.ncols() / LOCAL_DIM;
        let w = m.ncols();
        let mut t = Self::zeros(dl, dr);
        for row in 0..dl {
            for col in 0..w {
                t.data[row * w + col] = m[(row, col)];
            }
        }
        t
    }
}

/// A purification `|ρ>` of a mixed state on `n` spins as an open tensor
/// train; tracing the ancillas of `|ρ><ρ|` gives the (unnormalised) state.
#[derive(Clone, Debug)]
pub struct PurifiedMps {
    pub(crate) tensors: Vec<SiteTensor>,
    pub(crate) center: Option<usize>,
    pub(crate) max_bond: usize,
    pub(crate) truncation_error: f64,
    pub(crate) beta: f64,
    pub(crate) warnings: Vec<String>,
}

impl PurifiedMps {
    /// The `β = 0` state: each spin maximally entangled with its ancilla.
    pub fn init_infinite_temperature(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("chain needs at least 2 sites, got {n}")));
        }
        let amp = std::f64::consts::FRAC_1_SQRT_2;
        let site = SiteTensor {
            dl: 1,
            dr: 1,
            // p = 2s + a: only |00> and |11>.
            data: vec![
                c64::new(amp, 0.0),
                c64::new(0.0, 0.0),
                c64::new(0.0, 0.0),
                c64::new(amp, 0.0),
            ],
        };
        Ok(Self {
            tensors: vec![site; n],
            center: Some(0),
            max_bond: 1,
            truncation_error: 0.0,
            beta: 0.0,
            warnings: Vec::new(),
        })
    }

    /// Assembles a state from raw tensors; bonds must chain and the edges
    /// must have dimension 1. No canonical form is assumed.
    pub fn from_tensors(tensors: Vec<SiteTensor>, beta: f64) -> Result<Self> {
        if tensors.len() < 2 {
            return Err(invalid("chain needs at least 2 sites"));
        }
        if tensors[0].dl != 1 || tensors[tensors.len() - 1].dr != 1 {
            return Err(invalid("edge bonds must have dimension 1"));
        }
        for (i, pair) in tensors.windows(2).enumerate() {
            if pair[0].dr != pair[1].dl {
                return Err(invalid(format!(
                    "bond {i}: left tensor has {} columns, right tensor has {} rows",
                    pair[0].dr, pair[1].dl
                )));
            }
        }
        for t in &tensors {
            if t.data.len() != t.dl * LOCAL_DIM * t.dr {
                return Err(invalid("tensor payload does not match its shape"));
            }
        }
        let max_bond = tensors.iter().map(|t| t.dr.max(t.dl)).max().unwrap_or(1);
        Ok(Self {
            tensors,
            center: None,
            max_bond,
            truncation_error: 0.0,
            beta,
            warnings: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.tensors.len()
    }

    pub fn tensors(&self) -> &[SiteTensor] {
        &self.tensors
    }

    pub fn canonical_center(&self) -> Option<usize> {
        self.center
    }

    /// Bond dimension cap the state was evolved with.
    pub fn max_bond(&self) -> usize {
        self.max_bond
    }

    /// Bond dimensions between consecutive sites.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.tensors[..self.n() - 1].iter().map(|t| t.dr).collect()
    }

    /// Sum of discarded squared singular values over all truncations,
    /// each relative to the norm at that point.
    pub fn truncation_error(&self) -> f64 {
        self.truncation_error
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Brings the state into mixed-canonical form around `site`.
    pub fn canonicalize(&mut self, site: usize) -> Result<()> {
        if site >= self.n() {
            return Err(Error::SiteOutOfRange {
                index: site,
                sites: self.n(),
            });
        }
        for i in 0..site {
            self.shift_right(i)?;
        }
        for i in (site + 1..self.n()).rev() {
            self.shift_left(i)?;
        }
        self.center = Some(site);
        Ok(())
    }

    /// Moves the orthogonality center to `site`, canonicalising first if
    /// needed.
    pub fn move_center(&mut self, site: usize) -> Result<()> {
        let Some(c) = self.center else {
            return self.canonicalize(site);
        };
        if site >= self.n() {
            return Err(Error::SiteOutOfRange {
                index: site,
                sites: self.n(),
            });
        }
        for i in c..site {
            self.shift_right(i)?;
        }
        for i in (site + 1..=c).rev() {
            self.shift_left(i)?;
        }
        self.center = Some(site);
        Ok(())
    }

    /// QR of site `i`, pushing `R` into site `i + 1`.
    fn shift_right(&mut self, i: usize) -> Result<()> {
        let a = self.tensors[i].as_left_matrix();
        let qr = a.qr();
        let q = qr.compute_thin_Q();
        let r = qr.thin_R().to_owned();
        self.tensors[i] = SiteTensor::from_left_matrix(q.as_ref());
        let next = self.tensors[i + 1].as_right_matrix();
        self.tensors[i + 1] = SiteTensor::from_right_matrix((&r * &next).as_ref());
        Ok(())
    }

    /// LQ of site `i`, pushing `L` into site `i - 1`.
    fn shift_left(&mut self, i: usize) -> Result<()> {
        let a = self.tensors[i].as_right_matrix();
        let qr = a.adjoint().to_owned().qr();
        let q = qr.compute_thin_Q();
        let r = qr.thin_R().to_owned();
        self.tensors[i] = SiteTensor::from_right_matrix(q.adjoint().to_owned().as_ref());
        let prev = self.tensors[i - 1].as_left_matrix();
        self.tensors[i - 1] = SiteTensor::from_left_matrix((&prev * r.adjoint()).as_ref());
        Ok(())
    }

    /// Multiplies the bond between `i` and `i + 1` by `X X^{-1}`. Leaves the
    /// represented state unchanged and destroys canonical form.
    pub fn insert_gauge(&mut self, i: usize, x: MatRef<'_, c64>) -> Result<()> {
        if i + 1 >= self.n() {
            return Err(Error::SiteOutOfRange {
                index: i + 1,
                sites: self.n(),
            });
        }
        let d = self.tensors[i].dr;
        if x.nrows() != d || x.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: x.nrows(),
            });
        }
        let inv = x.partial_piv_lu().inverse();
        let left = self.tensors[i].as_left_matrix();
        let right = self.tensors[i + 1].as_right_matrix();
        self.tensors[i] = SiteTensor::from_left_matrix((&left * x).as_ref());
        self.tensors[i + 1] = SiteTensor::from_right_matrix((&inv * &right).as_ref());
        self.center = None;
        Ok(())
    }
}
