mod common;

use common::*;
use thermolens::hamiltonians::{
    gibbs_dense, local_block_hamiltonian, ExactSpectrum, InverseTemperature, SpinChainSpec,
};
use thermolens::mps::RdmMethod;
use thermolens::qstate::{fidelity, DensityMatrix};
use thermolens::thermometry::*;

fn exact() -> Backend {
    Backend::default()
}

/// `Ω_2(β)` of the two-site block Hamiltonian.
fn block_gibbs(h: f64, beta: f64) -> DensityMatrix {
    let spec = SpinChainSpec::new(2, h).unwrap();
    gibbs_dense(
        &local_block_hamiltonian(&spec, 2).unwrap(),
        InverseTemperature::new(beta).unwrap(),
    )
    .unwrap()
}

/// Intensive fidelity with the reduced state taken from the centre pair of
/// a 14-site chain.
fn ed_intensive(ed: &ExactSpectrum, beta: f64) -> f64 {
    let rho = ed.reduced_state(beta, &center_pair(14)).unwrap();
    fidelity_spectral(&block_gibbs(ed.spec().h, beta), &rho)
}

#[test]
fn intensive_fidelity_limits() {
    for h in [0.0, 0.6, 1.3] {
        assert!((intensive_fidelity(1e-6, h, 2, &exact()).unwrap() - 1.0).abs() < 1e-6);
    }
    for beta in [0.5, 5.0, 50.0, 500.0] {
        let f = intensive_fidelity(beta, 10.0, 2, &exact()).unwrap();
        assert!((f - 1.0).abs() < 1e-3, "beta = {beta}: {f}");
    }
}

#[test]
fn intensive_and_neighbour_fidelities_match_ed_pipeline() {
    let _guard = ed_lock();
    let ed = spectrum(14, 0.6);
    let want = ed_intensive(&ed, 50.0);
    let got = intensive_fidelity(50.0, 0.6, 2, &exact()).unwrap();
    assert!(got < 0.99, "{got}");
    assert!((got - want).abs() < 2e-2, "{got} vs {want}");
    drop(ed);

    let ed = spectrum(14, 0.1);
    let c = center_pair(14);
    let want = fidelity_spectral(&ed.reduced_state(2.0, &c).unwrap(), &ed.reduced_state(2.5, &c).unwrap());
    let got = neighbor_fidelity(2.0, 0.5, 0.1, 2, &exact()).unwrap();
    assert!((got - want).abs() < 2e-2, "{got} vs {want}");
}

#[test]
fn fidelity_derivative_matches_ed_finite_differences() {
    let _guard = ed_lock();
    let (beta, step) = (50.0, 1e-3);
    for h in [0.5, 1.5] {
        let plus = ed_intensive(&spectrum(14, h + step), beta);
        let minus = ed_intensive(&spectrum(14, h - step), beta);
        let want = (plus - minus) / (2.0 * step);
        let got = fidelity_derivative_h(beta, h, 2, &exact(), step).unwrap();
        println!("dF/dh at h = {h}: {} vs ED {want}", got.value);
        assert!((got.value - want).abs() < 5e-2, "h = {h}: {} vs {want}", got.value);
    }
}

#[test]
fn high_temperature_derivatives_vanish() {
    for h in [0.3, 1.0, 1.8] {
        let d = fidelity_derivative_h(0.01, h, 2, &exact(), DEFAULT_H_STEP).unwrap();
        assert!(d.value.abs() < 1e-3);
        let d = local_beta_derivative_h(0.01, h, 2, &exact(), DEFAULT_H_STEP, &OptimizerOptions::default()).unwrap();
        assert!(d.value.abs() < 1e-2, "h = {h}: {}", d.value);
    }
}

#[test]
fn local_beta_derivative_peaks_near_critical_field() {
    let hs: Vec<f64> = (0..=16).map(|i| 0.6 + 0.05 * i as f64).collect();
    let values: Vec<f64> = hs
        .iter()
        .map(|&h| {
            local_beta_derivative_h(1000.0, h, 2, &exact(), DEFAULT_H_STEP, &OptimizerOptions::default())
                .unwrap()
                .value
        })
        .collect();
    for (h, v) in hs.iter().zip(&values) {
        println!("dbeta/dh at beta = 1000, h = {h:.2}: {v}");
    }
    let (arg, _) = hs
        .iter()
        .zip(&values)
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .unwrap();
    assert!((arg - 1.0).abs() <= 0.1, "peak at {arg}");
}

#[test]
fn local_beta_derivative_integrates_to_differences() {
    let beta = 5.0;
    let (a, b) = (0.2, 0.6);
    let n = 8;
    let opts = OptimizerOptions {
        bracket: None,
        tol: 1e-10,
    };
    let dh = (b - a) / n as f64;
    let d: Vec<f64> = (0..=n)
        .map(|i| {
            local_beta_derivative_h(beta, a + dh * i as f64, 2, &exact(), DEFAULT_H_STEP, &opts)
                .unwrap()
                .value
        })
        .collect();
    // Simpson's rule.
    let integral = dh / 3.0 * (d[0] + d[n] + (1..n).map(|i| if i % 2 == 1 { 4.0 } else { 2.0 } * d[i]).sum::<f64>());
    let ta = optimize_local_beta(beta, a, 2, &exact(), &opts).unwrap().beta_tilde;
    let tb = optimize_local_beta(beta, b, 2, &exact(), &opts).unwrap().beta_tilde;
    println!("integral {integral}, difference {}", tb - ta);
    assert!((integral - (tb - ta)).abs() <= 0.02 * (tb - ta).abs());
}

#[test]
fn optimizer_invariants_and_classical_regime() {
    for beta in [0.05, 0.2, 0.5] {
        for h in [0.0, 0.4, 0.8, 1.6] {
            let res = optimize_local_beta(beta, h, 2, &exact(), &OptimizerOptions::default()).unwrap();
            assert!(
                (res.beta_tilde - beta).abs() / beta <= 0.05,
                "beta = {beta}, h = {h}: {}",
                res.beta_tilde
            );
            assert!(res.f_opt >= res.f_at_global - 1e-12);
            assert!(res.f_opt <= 1.0);
            assert!(res.beta_tilde >= res.bracket.0 && res.beta_tilde <= res.bracket.1);
            let direct = intensive_fidelity(beta, h, 2, &exact()).unwrap();
            assert!(res.f_opt >= direct - 1e-12);
        }
    }
}

#[test]
fn local_beta_saturates() {
    let t: Vec<f64> = [100.0, 300.0, 1000.0]
        .iter()
        .map(|&b| {
            optimize_local_beta(b, 0.8, 2, &exact(), &OptimizerOptions::default())
                .unwrap()
                .beta_tilde
        })
        .collect();
    let lo = t.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = t.iter().copied().fold(0.0, f64::max);
    assert!((hi - lo) / lo < 0.02, "{t:?}");
}

#[test]
fn neighbour_fidelity_limits() {
    assert!((neighbor_fidelity(3.0, 0.0, 0.4, 2, &exact()).unwrap() - 1.0).abs() < 1e-12);
    for beta in [50.0, 100.0, 400.0] {
        let f = neighbor_fidelity(beta, 0.5, 0.1, 2, &exact()).unwrap();
        assert!((f - 1.0).abs() < 1e-6, "beta = {beta}: {f}");
    }
    assert!(neighbor_fidelity(1.0, -0.1, 0.4, 2, &exact()).is_err());
}

#[test]
fn distant_pairs() {
    let _guard = ed_lock();
    for r in [3, 5, 7] {
        assert!((distant_pair_fidelity(1e-8, 0.7, r, 1e-10).unwrap() - 1.0).abs() < 1e-6);
        assert!((distant_pair_fidelity(10.0, 10.0, r, 1e-10).unwrap() - 1.0).abs() < 1e-3);
    }
    let hs: Vec<f64> = (0..=20).map(|i| 0.1 * i as f64).collect();
    let mut previous = 0.0;
    for r in [3, 5, 7] {
        let min = hs
            .iter()
            .map(|&h| distant_pair_fidelity(10.0, h, r, 1e-10).unwrap())
            .fold(f64::INFINITY, f64::min);
        println!("r = {r}: min fidelity {min}");
        assert!(min >= previous - 1e-12, "r = {r}: {min} < {previous}");
        previous = min;
    }
    assert!(distant_pair_fidelity(1.0, 0.5, 14, 1e-10).is_err());
}

#[test]
fn mps_backend_agrees_with_exact_backend() {
    let mps = Backend::Mps(MpsConfig {
        n: 30,
        ..MpsConfig::default()
    });
    let a = intensive_fidelity(2.0, 0.8, 2, &mps).unwrap();
    let b = intensive_fidelity(2.0, 0.8, 2, &exact()).unwrap();
    assert!((a - b).abs() < 1e-4, "{a} vs {b}");
    assert!(exact().validate_block(3).is_err());
    assert!(mps.validate_block(3).is_ok());
    let pauli = Backend::Mps(MpsConfig {
        n: 12,
        method: RdmMethod::PauliReconstruction,
        ..MpsConfig::default()
    });
    let direct = Backend::Mps(MpsConfig {
        n: 12,
        ..MpsConfig::default()
    });
    let x = pauli.reduced_state(1.0, 0.5, 3).unwrap();
    let y = direct.reduced_state(1.0, 0.5, 3).unwrap();
    assert!(x.max_abs_diff(&y).unwrap() < 1e-8);
    assert!((fidelity(&x, &y).unwrap() - 1.0).abs() < 1e-8);
}

fn small_grid() -> SweepGrid {
    SweepGrid {
        betas: vec![0.5, 5.0, 40.0],
        hs: vec![0.2, 0.9, 1.4],
        ms: vec![2],
        r: 3,
        backend: exact(),
    }
}

#[test]
fn sweeps_are_deterministic_and_order_independent() {
    let grid = small_grid();
    for study in [
        Study::Intensive,
        Study::LocalTemp(OptimizerOptions::default()),
        Study::Neighbor { delta_beta: 0.3 },
        Study::Distant,
    ] {
        let a = run_sweep(&grid, &study, 4).unwrap();
        let b = run_sweep(&grid, &study, 4).unwrap();
        let c = run_sweep_sequential(&grid, &study).unwrap();
        let flat = |v: Vec<thermolens::Result<Vec<SweepRow>>>| -> Vec<SweepRow> {
            v.into_iter().flat_map(|r| r.unwrap()).collect()
        };
        let (a, b, c) = (flat(a), flat(b), flat(c));
        assert_eq!(a.len(), 9);
        assert_eq!(a, b, "{}", study.name());
        assert_eq!(a, c, "{}", study.name());
    }
}

#[test]
fn chunked_sweep_streams_in_grid_order() {
    let grid = small_grid();
    let mut seen = Vec::new();
    run_sweep_with(&grid, &Study::Intensive, 2, 4, |p, rows| {
        seen.push((p.index, rows?.len()));
        Ok(())
    })
    .unwrap();
    assert_eq!(seen, (0..9).map(|i| (i, 1)).collect::<Vec<_>>());
}

#[test]
fn invalid_grids_are_rejected() {
    let mut grid = small_grid();
    grid.ms = vec![3];
    assert!(grid.validate(&Study::Intensive).is_err());
    let mut grid = small_grid();
    grid.hs = vec![1.0, 0.5];
    assert!(grid.validate(&Study::Intensive).is_err());
    let mut grid = small_grid();
    grid.betas.clear();
    assert!(run_sweep(&grid, &Study::Intensive, 1).is_err());
}
