mod common;

use common::*;
use thermolens::hamiltonians::*;
use thermolens::qstate::*;

fn kron_all(ops: &[DenseOperator]) -> DenseOperator {
    ops.iter().skip(1).fold(ops[0].clone(), |acc, o| acc.kron(o))
}

/// Assembles H from explicit single-site Pauli products.
fn kron_hamiltonian(n: usize, h: f64) -> DenseOperator {
    let id = Pauli::I.matrix();
    let mut total = DenseOperator::zeros(1 << n);
    for i in 0..n - 1 {
        let mut ops = vec![id.clone(); n];
        ops[i] = Pauli::X.matrix();
        ops[i + 1] = Pauli::X.matrix();
        total = total.add(&kron_all(&ops).scaled(0.5)).unwrap();
    }
    for i in 0..n {
        let mut ops = vec![id.clone(); n];
        ops[i] = Pauli::Z.matrix();
        total = total.sub(&kron_all(&ops).scaled(0.5 * h)).unwrap();
    }
    total
}

#[test]
fn dense_matches_kronecker_assembly() {
    for (n, h) in [(2, 0.0), (3, 1.0), (4, 0.37), (5, 2.0)] {
        let spec = SpinChainSpec::new(n, h).unwrap();
        let a = build_dense(&spec).unwrap();
        let b = kron_hamiltonian(n, h);
        assert!(a.max_abs_diff(&b).unwrap() < 1e-15, "n = {n}");
    }
}

#[test]
fn three_site_critical_spectrum() {
    let spec = SpinChainSpec::new(3, 1.0).unwrap();
    let got = eig_hermitian(&build_dense(&spec).unwrap()).unwrap().eigenvalues;
    let want = eig_hermitian(&kron_hamiltonian(3, 1.0)).unwrap().eigenvalues;
    for (a, b) in got.iter().zip(&want) {
        assert!((a - b).abs() < 1e-13);
    }
    let sum: f64 = got.iter().sum();
    assert!(sum.abs() < 1e-13);
}

#[test]
fn zero_beta_gives_maximally_mixed_state() {
    let spec = SpinChainSpec::new(4, 0.9).unwrap();
    let omega = gibbs_dense(&build_dense(&spec).unwrap(), InverseTemperature::new(0.0).unwrap()).unwrap();
    assert!(omega.max_abs_diff(&DensityMatrix::maximally_mixed(16)).unwrap() < 1e-15);
}

#[test]
fn huge_beta_projects_on_ground_state() {
    let spec = SpinChainSpec::new(2, 2.0).unwrap();
    let h = build_dense(&spec).unwrap();
    let omega = gibbs_dense(&h, InverseTemperature::new(DEFAULT_BETA_MAX).unwrap()).unwrap();
    let eig = eig_hermitian(&h).unwrap();
    // Non-degenerate ground state at h = 2.
    assert!(eig.eigenvalues[1] - eig.eigenvalues[0] > 0.1);
    let v = &eig.eigenvectors;
    let proj = DenseOperator::from_fn(4, |i, j| v[(i, 0)] * v[(j, 0)].conj());
    assert!(omega.operator().max_abs_diff(&proj).unwrap() < 1e-12);
    let purity = omega.operator().matmul(omega.operator()).unwrap().trace().re;
    assert!((purity - 1.0).abs() < 1e-12);
}

#[test]
fn gibbs_state_commutes_with_hamiltonian_and_flip() {
    let spec = SpinChainSpec::new(5, 0.6).unwrap();
    let h = build_dense(&spec).unwrap();
    let omega = gibbs_dense(&h, InverseTemperature::new(1.7).unwrap()).unwrap();
    let o = omega.operator();
    let comm = o.matmul(&h).unwrap().sub(&h.matmul(o).unwrap()).unwrap();
    assert!(comm.max_abs_diff(&DenseOperator::zeros(32)).unwrap() < 1e-13);
    let p = spin_flip(5);
    let flipped = o.conjugated_by(&p).unwrap();
    assert!(flipped.max_abs_diff(o).unwrap() < 1e-14);
}

#[test]
fn energy_is_minus_log_partition_derivative_and_decreasing() {
    let ed = spectrum(6, 0.8);
    let h = build_dense(ed.spec()).unwrap();
    let mut previous = f64::INFINITY;
    for beta in [0.0, 0.3, 1.0, 2.0, 5.0, 12.0] {
        let omega = ed.gibbs_state(beta).unwrap();
        let e = omega.operator().matmul(&h).unwrap().trace().re;
        assert!((e - ed.thermal_energy(beta)).abs() < 1e-11);
        if beta > 0.0 {
            let step = 1e-5 * beta.max(1.0);
            let fd = -(ed.log_partition(beta + step) - ed.log_partition(beta - step)) / (2.0 * step);
            assert!((fd - e).abs() < 1e-6, "beta = {beta}");
        }
        assert!(e <= previous + 1e-13);
        previous = e;
    }
}

#[test]
fn odd_x_and_y_strings_vanish() {
    let ed = spectrum(4, 0.7);
    let omega = ed.gibbs_state(2.0).unwrap();
    for p in PauliString::all(4) {
        let nx = (0..4).filter(|&i| p.sites()[i] == Pauli::X).count();
        let ny = (0..4).filter(|&i| p.sites()[i] == Pauli::Y).count();
        let value = pauli_expectation(&omega, &p).unwrap();
        if (nx + ny) % 2 == 1 || ny % 2 == 1 {
            assert!(value.abs() < 1e-12, "{p}: {value}");
        }
    }
}

#[test]
fn local_block_has_no_boundary_terms() {
    let spec = SpinChainSpec::new(8, 1.3).unwrap();
    let block = local_block_hamiltonian(&spec, 3).unwrap();
    assert!(block.max_abs_diff(&kron_hamiltonian(3, 1.3)).unwrap() < 1e-15);
}

#[test]
fn classical_marginal_matches_brute_force() {
    for n in 3..=10usize {
        for beta in [0.1, 1.0, 5.0] {
            for k in 1..n.saturating_sub(2) {
                let mut table = [[0.0f64; 2]; 2];
                let mut z = 0.0;
                for conf in 0..(1usize << n) {
                    let s = |i: usize| if conf >> i & 1 == 0 { 1.0 } else { -1.0 };
                    let e: f64 = (0..n - 1).map(|i| s(i) * s(i + 1)).sum();
                    let w = (-beta * e).exp();
                    z += w;
                    table[conf >> k & 1][conf >> (k + 1) & 1] += w;
                }
                let brute = PairTable {
                    table: table.map(|row| row.map(|x| x / z)),
                };
                let got = classical_block_marginal(n, beta, k).unwrap();
                assert!(got.max_abs_diff(&brute) < 1e-12, "n = {n}, beta = {beta}, k = {k}");
                assert!(got.max_abs_diff(&PairTable::two_site_gibbs(beta)) < 1e-12);
            }
            assert!(classical_block_marginal(n, beta, 0).is_err());
            assert!(classical_block_marginal(n, beta, n - 2).is_err());
        }
    }
}
