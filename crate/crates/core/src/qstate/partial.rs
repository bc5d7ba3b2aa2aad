use super::operator::{DenseOperator, DensityMatrix};
use crate::c64;
use crate::error::{Error, Result};

/// Traces out every site not listed in `keep`.
///
/// `register_shape` gives the local dimension of each site, most significant
/// first. Kept sites appear in the result in ascending site order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize], register_shape: &[usize]) -> Result<DensityMatrix> {
    let total: usize = register_shape.iter().product();
    if total != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: total,
        });
    }
    let sites = register_shape.len();
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&k| k >= sites) {
        return Err(Error::SiteOutOfRange { index: bad, sites });
    }
    let traced: Vec<usize> = (0..sites).filter(|s| !kept.contains(s)).collect();

    let strides = strides(register_shape);
    let dim_keep: usize = kept.iter().map(|&s| register_shape[s]).product();
    let dim_trace: usize = traced.iter().map(|&s| register_shape[s]).product();

    // Offset in the full register contributed by each kept / traced multi-index.
    let keep_offsets = offsets(&kept, register_shape, &strides);
    let trace_offsets = offsets(&traced, register_shape, &strides);

    let m = rho.as_mat();
    let out = DenseOperator::from_fn(dim_keep, |i, j| {
        let (oi, oj) = (keep_offsets[i], keep_offsets[j]);
        let mut acc = c64::new(0.0, 0.0);
        for &t in &trace_offsets[..dim_trace] {
            acc += m[(oi + t, oj + t)];
        }
        acc
    });
    Ok(DensityMatrix::from_trusted(out))
}

/// Partial trace on a register of qubits.
pub fn partial_trace_qubits(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho
        .num_sites()
        .ok_or_else(|| Error::InvalidParameter(format!("dimension {} is not a qubit register", rho.dim())))?;
    partial_trace(rho, keep, &vec![2; n])
}

fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * shape[k + 1];
    }
    s
}

fn offsets(sites: &[usize], shape: &[usize], strides: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &s in sites {
        let mut next = Vec::with_capacity(out.len() * shape[s]);
        for &base in &out {
            for v in 0..shape[s] {
                next.push(base + v * strides[s]);
            }
        }
        out = next;
    }
    out
}
