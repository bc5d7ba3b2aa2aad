mod common;

use std::collections::BTreeMap;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thermolens::c64;
use thermolens::hamiltonians::{build_dense, gibbs_dense, InverseTemperature, SpinChainSpec};
use thermolens::mps::*;
use thermolens::qstate::*;

fn state(n: usize, h: f64, beta: f64, dt: f64, d: usize) -> PurifiedMps {
    let spec = SpinChainSpec::new(n, h).unwrap();
    thermal_state(&spec, beta, dt, &TruncationConfig::new(d).unwrap()).unwrap()
}

fn dense_gibbs(n: usize, h: f64, beta: f64) -> DensityMatrix {
    let spec = SpinChainSpec::new(n, h).unwrap();
    gibbs_dense(&build_dense(&spec).unwrap(), InverseTemperature::new(beta).unwrap()).unwrap()
}

#[test]
fn decoupled_spins_follow_single_site_formula() {
    let (beta, h) = (3.0, 0.7);
    let spec = SpinChainSpec::new(6, h).unwrap().with_coupling(0.0).unwrap();
    let s = thermal_state(&spec, beta, 0.05, &TruncationConfig::new(4).unwrap()).unwrap();
    let want = (0.5 * beta * h).tanh();
    for i in 0..6 {
        let mut ops = BTreeMap::new();
        ops.insert(i, Pauli::Z.matrix());
        let got = s.expectation(&ops).unwrap();
        assert!((got - want).abs() < 1e-10, "site {i}: {got} vs {want}");
    }
    assert_eq!(s.bond_dims(), vec![1; 5]);
}

#[test]
fn eight_sites_match_dense_gibbs() {
    let (n, h, beta) = (8, 0.8, 2.0);
    let s = state(n, h, beta, 0.01, 64);
    let exact = dense_gibbs(n, h, beta);
    let full = s.block_rdm(0, n, RdmMethod::DirectContraction).unwrap();
    assert!(full.trace_distance(&exact).unwrap() < 1e-5);
    for label in ["ZIIIIIII", "IIIXXIII", "IIIYYIII", "IIZIZIII", "XIIIIIIX", "IIIIIIIZ"] {
        let p: PauliString = label.parse().unwrap();
        let ops: BTreeMap<usize, DenseOperator> = p
            .sites()
            .iter()
            .enumerate()
            .filter(|(_, q)| **q != Pauli::I)
            .map(|(i, q)| (i, q.matrix()))
            .collect();
        let got = s.expectation(&ops).unwrap();
        let want = pauli_expectation(&exact, &p).unwrap();
        assert!((got - want).abs() < 1e-5, "{label}: {got} vs {want}");
    }
}

#[test]
fn block_methods_agree() {
    let s = state(10, 1.1, 3.0, 0.02, 24);
    for m in [1, 2, 3, 4] {
        let a = s.centered_block_rdm(m, RdmMethod::PauliReconstruction).unwrap();
        let b = s.centered_block_rdm(m, RdmMethod::DirectContraction).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-8, "m = {m}");
    }
    assert!(s.block_rdm(8, 3, RdmMethod::DirectContraction).is_err());
    assert!(s.block_rdm(0, 7, RdmMethod::PauliReconstruction).is_err());
}

#[test]
fn three_site_block_matches_dense_partial_trace() {
    let (n, h, beta) = (7, 0.5, 1.5);
    let s = state(n, h, beta, 0.005, 64);
    let exact = partial_trace_qubits(&dense_gibbs(n, h, beta), &[2, 3, 4]).unwrap();
    let block = s.block_rdm(2, 3, RdmMethod::DirectContraction).unwrap();
    assert!(block.trace_distance(&exact).unwrap() < 1e-5);
}

#[test]
fn observables_are_gauge_invariant() {
    let mut s = state(8, 0.9, 2.0, 0.02, 16);
    let before = s.centered_block_rdm(3, RdmMethod::DirectContraction).unwrap();
    let e_before = s.energy(&SpinChainSpec::new(8, 0.9).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for bond in [1usize, 3, 5] {
        let d = s.bond_dims()[bond];
        let x = faer::Mat::<c64>::from_fn(d, d, |i, j| {
            let diag = if i == j { 2.0 } else { 0.0 };
            c64::new(diag + rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))
        });
        s.insert_gauge(bond, x.as_ref()).unwrap();
    }
    assert_eq!(s.canonical_center(), None);
    let after = s.centered_block_rdm(3, RdmMethod::DirectContraction).unwrap();
    assert!(after.max_abs_diff(&before).unwrap() < 1e-10);
    let e_after = s.energy(&SpinChainSpec::new(8, 0.9).unwrap()).unwrap();
    assert!((e_after - e_before).abs() < 1e-10);
}

#[test]
fn error_shrinks_with_bond_dimension() {
    let (n, h, beta) = (10, 1.0, 4.0);
    let reference = state(n, h, beta, 0.02, 64)
        .centered_block_rdm(4, RdmMethod::DirectContraction)
        .unwrap();
    let mut previous = f64::INFINITY;
    for d in [2, 4, 8, 16] {
        let s = state(n, h, beta, 0.02, d);
        let err = s
            .centered_block_rdm(4, RdmMethod::DirectContraction)
            .unwrap()
            .trace_distance(&reference)
            .unwrap();
        assert!(s.bond_dims().iter().all(|&b| b <= d));
        assert!(err <= previous, "D = {d}: {err} > {previous}");
        previous = err;
    }
    assert!(previous < 1e-4);
}

#[test]
fn trotter_error_is_second_order() {
    let (n, h, beta) = (6, 0.8, 3.0);
    let exact = dense_gibbs(n, h, beta);
    let err = |dt: f64| {
        state(n, h, beta, dt, 64)
            .block_rdm(0, n, RdmMethod::DirectContraction)
            .unwrap()
            .trace_distance(&exact)
            .unwrap()
    };
    let ratio = err(0.02) / err(0.01);
    assert!((3.0..=5.0).contains(&ratio), "{ratio}");
}

#[test]
fn spin_flip_symmetry_and_vanishing_x() {
    let s = state(9, 0.6, 5.0, 0.02, 32);
    let block = s.centered_block_rdm(3, RdmMethod::DirectContraction).unwrap();
    let flipped = block.conjugated_by(&spin_flip(3)).unwrap();
    assert!(flipped.max_abs_diff(&block).unwrap() < 1e-10);
    for i in 0..9 {
        let mut ops = BTreeMap::new();
        ops.insert(i, Pauli::X.matrix());
        assert!(s.expectation(&ops).unwrap().abs() < 1e-9);
        ops.insert(i, Pauli::Y.matrix());
        assert!(s.expectation(&ops).unwrap().abs() < 1e-9);
    }
}

#[test]
fn energy_decreases_along_evolution() {
    let spec = SpinChainSpec::new(8, 1.2).unwrap();
    let mut s = PurifiedMps::init_infinite_temperature(8).unwrap();
    let schedule = TrotterSchedule::new(3.0, 0.02).unwrap();
    let mut trace = Vec::new();
    s.evolve_observed(
        &spec,
        &schedule,
        &TruncationConfig::new(32).unwrap(),
        &mut |st, beta| {
            trace.push((beta, st.energy(&spec).unwrap()));
        },
    )
    .unwrap();
    assert_eq!(trace.len(), schedule.steps);
    assert!((trace.last().unwrap().0 - 3.0).abs() < 1e-12);
    for w in trace.windows(2) {
        assert!(w[1].0 > w[0].0);
        assert!(w[1].1 <= w[0].1 + 1e-12);
    }
    let ed = spectrum(8, 1.2);
    assert!((trace.last().unwrap().1 - ed.thermal_energy(3.0)).abs() < 1e-4);
}

#[test]
fn infinite_temperature_state_is_maximally_mixed() {
    let s = PurifiedMps::init_infinite_temperature(6).unwrap();
    let block = s.centered_block_rdm(4, RdmMethod::DirectContraction).unwrap();
    assert!(block.max_abs_diff(&DensityMatrix::maximally_mixed(16)).unwrap() < 1e-15);
    let s0 = state(6, 0.9, 0.0, 0.02, 8);
    assert_eq!(s0.bond_dims(), vec![1; 5]);
}

#[test]
fn tight_budget_warns_and_reports_error() {
    let spec = SpinChainSpec::new(10, 1.0).unwrap();
    let mut trunc = TruncationConfig::new(2).unwrap();
    trunc.error_budget = 1e-8;
    let s = thermal_state(&spec, 4.0, 0.05, &trunc).unwrap();
    assert!(s.truncation_error() > 1e-8);
    assert!(!s.warnings().is_empty());
}

#[test]
fn checkpoint_round_trip_preserves_observables() {
    let s = state(6, 0.4, 1.0, 0.02, 8);
    let mut buf = Vec::new();
    s.write_checkpoint(&mut buf).unwrap();
    assert_eq!(&buf[..8], &CHECKPOINT_MAGIC);
    let back = PurifiedMps::read_checkpoint(buf.as_slice()).unwrap();
    let a = s.centered_block_rdm(2, RdmMethod::DirectContraction).unwrap();
    let b = back.centered_block_rdm(2, RdmMethod::DirectContraction).unwrap();
    assert_eq!(a.max_abs_diff(&b).unwrap(), 0.0);
    assert_eq!(back.beta(), 1.0);
    buf[9] ^= 0xff;
    assert!(PurifiedMps::read_checkpoint(buf.as_slice()).is_err());
}

#[test]
fn schedule_validation() {
    assert!(TrotterSchedule::new(1.0, 0.06).is_err());
    assert!(TrotterSchedule::new(-1.0, 0.01).is_err());
    let s = TrotterSchedule::new(1.0, 0.03).unwrap();
    assert_eq!(s.steps, 17);
    assert!((s.dt * 2.0 * 17.0 - 1.0).abs() < 1e-15);
}
