use crate::error::{invalid, Result};

/// Joint distribution of an adjacent pair of classical spins,
/// `table[i][j] = P(s_i, s'_j)` with index 0 for `s = +1` and 1 for `s = -1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairTable {
    pub table: [[f64; 2]; 2],
}

impl PairTable {
    /// `P(s, s')` for `s, s' ∈ {+1, -1}`.
    pub fn get(&self, s: i8, s_next: i8) -> f64 {
        let idx = |x: i8| if x > 0 { 0 } else { 1 };
        self.table[idx(s)][idx(s_next)]
    }

    /// `e^{-β s s'} / Z_2` with `Z_2 = 2e^{-β} + 2e^{β}`.
    pub fn two_site_gibbs(beta: f64) -> Self {
        let z = 2.0 * (-beta).exp() + 2.0 * beta.exp();
        let same = (-beta).exp() / z;
        let diff = beta.exp() / z;
        Self {
            table: [[same, diff], [diff, same]],
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((self.table[i][j] - other.table[i][j]).abs());
            }
        }
        worst
    }
}

/// Marginal of the pair `(k, k+1)` in the open classical chain
/// `H = Σ s_i s_{i+1}` at inverse temperature `β`, by transfer-matrix
/// summation over the other spins.
///
/// `k` is 0-based. Pairs touching an end of the chain are rejected, so
/// interior pairs satisfy `1 <= k <= n - 3`.
pub fn classical_block_marginal(n: usize, beta: f64, k: usize) -> Result<PairTable> {
    if n < 2 {
        return Err(invalid(format!("chain needs at least 2 sites, got {n}")));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(invalid(format!(
            "inverse temperature must be finite and >= 0, got {beta}"
        )));
    }
    if k == 0 || k + 2 >= n {
        return Err(invalid(format!(
            "pair ({k}, {}) touches a chain end; interior pairs need 1 <= k <= n - 3 (n = {n})",
            k + 1
        )));
    }
    let spin = [1.0, -1.0];
    let t = |a: usize, b: usize| (-beta * spin[a] * spin[b]).exp();
    // Row vector summed over the spins left of k, renormalised each step.
    let propagate = |steps: usize| {
        let mut v = [1.0f64, 1.0];
        for _ in 0..steps {
            let next = [v[0] * t(0, 0) + v[1] * t(1, 0), v[0] * t(0, 1) + v[1] * t(1, 1)];
            let norm = next[0] + next[1];
            v = [next[0] / norm, next[1] / norm];
        }
        v
    };
    let left = propagate(k);
    let right = propagate(n - k - 2);
    let mut table = [[0.0; 2]; 2];
    let mut z = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let w = left[a] * t(a, b) * right[b];
            table[a][b] = w;
            z += w;
        }
    }
    for row in &mut table {
        for x in row {
            *x /= z;
        }
    }
    Ok(PairTable { table })
}
