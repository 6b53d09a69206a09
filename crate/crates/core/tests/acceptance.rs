//! End-to-end acceptance checks. Each test prints a single line
//! `criterion <k> <name>: PASS|FAIL <details>` before asserting.

use std::time::Instant;

use cdpr_core::experiments::{run_phase_diagram, run_recon_experiment, ExperimentConfig, Phantom};
use cdpr_core::forward::{
    adjoint_field, explicit_matrix, field, forward, forward_values, ApertureMode, EnsembleSpec, SensingEnsemble,
};
use cdpr_core::grid::count_nonzeros;
use cdpr_core::guarantees::{check_gram_identity, sample_condition1, spectral_quantity};
use cdpr_core::metrics::dist;
use cdpr_core::rng::{complex_gaussian, rng_from_seed};
use cdpr_core::solver::{gradient, objective, reconstruct, SolverParams};
use cdpr_core::{gen_sparse_signal, ApertureKind, GridShape};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::Rng;

fn verdict(id: u32, name: &str, pass: bool, details: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("criterion {id} {name}: {status} {details}");
}

fn random(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = rng_from_seed(seed);
    (0..n).map(|_| complex_gaussian(&mut rng)).collect()
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn rel_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    let diff: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&diff) / norm(b).max(f64::MIN_POSITIVE)
}

fn ensemble(n: usize, p: usize, r: usize, kind: ApertureKind, mode: ApertureMode, seed: u64) -> SensingEnsemble {
    let mut spec = EnsembleSpec::new(GridShape::line(n).unwrap(), p, kind, seed);
    spec.regions = r;
    spec.mode = mode;
    spec.build().unwrap()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

#[test]
fn criterion_1_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = rng_from_seed(101);
    let shapes = [vec![16], vec![12], vec![7], vec![4, 4], vec![2, 6], vec![2, 2, 3], vec![5]];
    let mut worst = 0.0f64;
    for trial in 0..50u64 {
        let dims = shapes[rng.random_range(0..shapes.len())].clone();
        let shape = GridShape::new(dims).unwrap();
        let n = shape.len();
        let p = rng.random_range(1..=3);
        let r = rng.random_range(1..=4usize.min(n));
        let kind = if rng.random_bool(0.5) {
            ApertureKind::UniformPhase
        } else {
            ApertureKind::BlockUnblock
        };
        let mut spec = EnsembleSpec::new(shape, p, kind, 1000 + trial);
        spec.regions = r;
        spec.wavelength = rng.random_range(0.5..2.0);
        if rng.random_bool(0.5) {
            spec.mode = ApertureMode::Single;
        }
        let ens = spec.build().unwrap();
        let b = explicit_matrix(&ens).unwrap();
        let x = random(n, 2000 + trial);
        let v = random(ens.m(), 3000 + trial);

        let dense_field: Vec<Complex64> = (&b * DVector::from_column_slice(&x)).iter().copied().collect();
        let dense_adjoint: Vec<Complex64> = (b.adjoint() * DVector::from_column_slice(&v)).iter().copied().collect();
        let dense_intensity: Vec<Complex64> = dense_field.iter().map(|c| Complex64::new(c.norm_sqr(), 0.0)).collect();
        let intensity: Vec<Complex64> = forward_values(&x, &ens)
            .unwrap()
            .values
            .iter()
            .map(|&g| Complex64::new(g, 0.0))
            .collect();

        worst = worst
            .max(rel_gap(&field(&x, &ens).unwrap(), &dense_field))
            .max(rel_gap(&adjoint_field(&v, &ens).unwrap(), &dense_adjoint))
            .max(rel_gap(&intensity, &dense_intensity));
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-10 && elapsed < 10.0;
    verdict(
        1,
        "oracle equivalence",
        pass,
        &format!("max relative gap {worst:.3e} over 50 ensembles in {elapsed:.2}s"),
    );
    assert!(pass);
}

#[test]
fn criterion_2_gram_identity() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for kind in [ApertureKind::BlockUnblock, ApertureKind::UniformPhase] {
        for (n, p) in [(16, 1), (16, 3), (12, 2), (9, 4)] {
            for seed in 0..3 {
                let ens = ensemble(n, p, 1, kind, ApertureMode::Single, seed);
                worst = worst.max(check_gram_identity(&ens).unwrap());
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-10 && elapsed < 5.0;
    verdict(
        2,
        "gram identity",
        pass,
        &format!("max residual {worst:.3e} (block-unblock and uniform-phase) in {elapsed:.2}s"),
    );
    assert!(pass);
}

#[test]
fn criterion_3_gradient() {
    let n = 16;
    let ens = ensemble(n, 2, 2, ApertureKind::UniformPhase, ApertureMode::PerDistance, 5);
    let x = gen_sparse_signal(&GridShape::line(n).unwrap(), 4, 6).unwrap();
    let g = forward(&x, &ens).unwrap().values;
    let h = 1e-6;
    let mut worst_fd = 0.0f64;
    for l in 0..20u64 {
        let mu = [0.1, 1.0, 10.0][(l % 3) as usize];
        let z = random(n, 40 + l);
        let d = random(n, 80 + l);
        let grad = gradient(&z, &g, &ens, mu).unwrap();
        let analytic: f64 = grad.iter().zip(&d).map(|(a, b)| (a.conj() * b).re).sum();
        let shifted = |t: f64| -> Vec<Complex64> { z.iter().zip(&d).map(|(a, b)| a + b * t).collect() };
        let fd = (objective(&shifted(h), &g, &ens, mu).unwrap() - objective(&shifted(-h), &g, &ens, mu).unwrap())
            / (2.0 * h);
        worst_fd = worst_fd.max((fd - analytic).abs() / analytic.abs());
    }

    // term-by-term sum over explicit sampling vectors
    let n = 12;
    let ens = ensemble(n, 3, 2, ApertureKind::BlockUnblock, ApertureMode::PerDistance, 7);
    let x = gen_sparse_signal(&GridShape::line(n).unwrap(), 3, 8).unwrap();
    let g = forward(&x, &ens).unwrap().values;
    let b = explicit_matrix(&ens).unwrap();
    let m = ens.m() as f64;
    let mut worst_dense = 0.0f64;
    for (l, mu) in [0.1, 1.0, 10.0].into_iter().enumerate() {
        let z = random(n, 200 + l as u64);
        let mut expected = vec![Complex64::default(); n];
        for k in 0..ens.m() {
            let c: Complex64 = (0..n).map(|j| b[(k, j)] * z[j]).sum();
            let phi = (c.norm_sqr() + mu * mu).sqrt();
            let coeff = (c - g[k].sqrt() * c / phi) * (2.0 / m);
            for j in 0..n {
                expected[j] += coeff * b[(k, j)].conj();
            }
        }
        worst_dense = worst_dense.max(rel_gap(&gradient(&z, &g, &ens, mu).unwrap(), &expected));
    }

    let pass = worst_fd <= 1e-6 && worst_dense <= 1e-10;
    verdict(
        3,
        "gradient",
        pass,
        &format!("finite-difference max rel error {worst_fd:.3e} (20 triples), dense sum gap {worst_dense:.3e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_4_phase_transition() {
    let start = Instant::now();
    let config = ExperimentConfig {
        shape: GridShape::line(128).unwrap(),
        sparsity: vec![2, 4, 8, 16],
        p_values: vec![1, 2, 3, 4],
        r_values: vec![1],
        aperture: ApertureKind::UniformPhase,
        aperture_mode: ApertureMode::PerDistance,
        trials: 20,
        success_threshold: 1e-5,
        seed: 2024,
        ..ExperimentConfig::default()
    };
    let diagram = run_phase_diagram(&config).unwrap();
    let mut failures = Vec::new();
    for cell in &diagram.cells {
        let ratio = cell.m_over_n();
        if ratio >= 2 && cell.success_rate < 0.9 {
            failures.push(format!("s={} m/n={ratio}: {:.2} < 0.9", cell.sparsity, cell.success_rate));
        }
        if ratio == 1 && cell.sparsity >= 8 && cell.success_rate > 0.1 {
            failures.push(format!("s={} m/n=1: {:.2} > 0.1", cell.sparsity, cell.success_rate));
        }
    }
    println!("{}", diagram.to_matrix());
    let elapsed = start.elapsed().as_secs_f64();
    let pass = failures.is_empty();
    let details = if pass {
        format!("all 16 cells within bounds in {elapsed:.1}s")
    } else {
        failures.join("; ")
    };
    verdict(4, "phase transition", pass, &details);
    assert!(pass);
}

fn recon_config(seed: u64, snr_db: Option<f64>) -> ExperimentConfig {
    ExperimentConfig {
        shape: GridShape::line(128).unwrap(),
        sparsity: vec![8],
        recon_p: 2,
        r_values: vec![1],
        phantom: Phantom::Random { sparsity: 8 },
        snr_db,
        seed,
        ..ExperimentConfig::default()
    }
}

#[test]
fn criterion_5_noiseless_exactness() {
    let errors: Vec<f64> = (0..20)
        .map(|seed| {
            let out = run_recon_experiment(&recon_config(seed, None)).unwrap();
            assert!(out.report.iterations_run <= 800);
            out.rel_error().unwrap()
        })
        .collect();
    let hits = errors.iter().filter(|&&e| e <= 1e-5).count();
    let pass = hits >= 18;
    verdict(
        5,
        "noiseless exactness",
        pass,
        &format!("{hits}/20 seeds at or below 1e-5, median {:.3e}", median(errors)),
    );
    assert!(pass);
}

#[test]
fn criterion_6_noisy_stability() {
    let run = |snr: f64| -> Vec<f64> {
        (0..20)
            .map(|seed| run_recon_experiment(&recon_config(seed, Some(snr))).unwrap().rel_error().unwrap())
            .collect()
    };
    let at30 = run(30.0);
    let at40 = run(40.0);
    let hits = at30.iter().filter(|&&e| e <= 0.1).count();
    let (m30, m40) = (median(at30), median(at40));
    let pass = hits >= 18 && m40 < m30;
    verdict(
        6,
        "noisy stability",
        pass,
        &format!("{hits}/20 seeds at or below 0.1 at 30 dB; median 30 dB {m30:.3e}, 40 dB {m40:.3e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_7_condition_upper_bound() {
    let n = 64;
    let shape = GridShape::line(n).unwrap();
    let x = gen_sparse_signal(&shape, 8, 31).unwrap();
    let mut worst = f64::NEG_INFINITY;
    let mut worst_dense = f64::NEG_INFINITY;
    let mut lambda_gap = 0.0f64;
    let mut min_ratio = f64::INFINITY;
    for (seed, kind) in [(1, ApertureKind::UniformPhase), (2, ApertureKind::BlockUnblock)] {
        let raw = ensemble(n, 2, 1, kind, ApertureMode::PerDistance, seed);
        let ens = raw.clone().with_gain(raw.isotropic_gain());
        assert_eq!(ens.m(), 2 * n);
        let report = sample_condition1(&x.values, &ens, 100, 77, 0.5).unwrap();

        let b: DMatrix<Complex64> = explicit_matrix(&ens).unwrap();
        let lambda_dense = (b.adjoint() * &b).symmetric_eigen().eigenvalues.max();
        let lambda = spectral_quantity(&ens).unwrap() * ens.m() as f64;
        lambda_gap = lambda_gap.max((lambda - lambda_dense).abs() / lambda_dense);
        for t in &report.trials {
            let bound = t.w_nuclear * lambda_dense;
            worst_dense = worst_dense.max((t.b_l1 - bound) / bound);
        }
        worst = worst.max(report.max_bound_excess());
        min_ratio = min_ratio.min(report.min_ratio);
    }
    let pass = worst <= 1e-10 && worst_dense <= 1e-10 && lambda_gap <= 1e-10;
    verdict(
        7,
        "condition upper bound",
        pass,
        &format!(
            "max excess {worst:.3e} (dense eigenvalue {worst_dense:.3e}, eigenvalue gap {lambda_gap:.1e}), min_ratio {min_ratio:.4}"
        ),
    );
    assert!(pass);
}

fn property<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

#[test]
fn criterion_8_invariants() {
    let start = Instant::now();
    let mut results: Vec<(&str, Result<(), String>)> = Vec::new();

    results.push((
        "mu trace and sparsity",
        property(24, (any::<u64>(), 1usize..6, 1usize..4), |(seed, s, p)| {
            let shape = GridShape::line(32).unwrap();
            let ens = EnsembleSpec::new(shape.clone(), p, ApertureKind::UniformPhase, seed).build().unwrap();
            let x = gen_sparse_signal(&shape, s, seed ^ 0xabc).unwrap();
            let g = forward(&x, &ens).unwrap();
            let params = SolverParams {
                iterations: 200,
                ..SolverParams::with_sparsity(s)
            };
            let report = reconstruct(&g, &ens, &params, None).unwrap();
            prop_assert_eq!(report.mu_trace[0], params.mu0);
            for t in 1..report.mu_trace.len() {
                let (prev, next) = (report.mu_trace[t - 1], report.mu_trace[t]);
                if report.grad_norm_trace[t - 1] >= params.gamma * prev {
                    prop_assert_eq!(next, prev);
                } else {
                    prop_assert_eq!(next, prev * params.gamma1);
                }
            }
            prop_assert!(report.support_trace.iter().all(|&k| k <= s));
            prop_assert!(count_nonzeros(&report.spectrum, 0.0) <= s);
            Ok(())
        }),
    ));

    results.push((
        "dist closed form",
        property(32, (any::<u64>(), 1usize..10), |(seed, n)| {
            let x = random(n, seed);
            let z = random(n, seed.wrapping_add(1));
            let closed = dist(&z, &x).unwrap();
            let steps = 10_000;
            let grid = (0..steps)
                .map(|k| {
                    let rot = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / steps as f64);
                    z.iter().zip(&x).map(|(a, b)| (a * rot - b).norm_sqr()).sum::<f64>().sqrt()
                })
                .fold(f64::INFINITY, f64::min);
            let scale = norm(&x).powi(2) + norm(&z).powi(2);
            prop_assert!(closed <= grid + 1e-12 * scale.sqrt());
            prop_assert!(grid * grid - closed * closed <= 1e-6 * scale);
            Ok(())
        }),
    ));

    results.push((
        "global phase invariance",
        property(32, (any::<u64>(), 0.0..std::f64::consts::TAU), |(seed, theta)| {
            let ens = ensemble(16, 2, 2, ApertureKind::BlockUnblock, ApertureMode::PerDistance, seed);
            let x = random(16, seed.wrapping_add(5));
            let z = random(16, seed.wrapping_add(6));
            let rot = Complex64::from_polar(1.0, theta);
            let turned: Vec<Complex64> = x.iter().map(|c| c * rot).collect();
            let a = forward_values(&x, &ens).unwrap().values;
            let b = forward_values(&turned, &ens).unwrap().values;
            let scale = a.iter().cloned().fold(0.0, f64::max);
            prop_assert!(a.iter().zip(&b).all(|(u, v)| (u - v).abs() <= 1e-12 * scale));
            let d0 = dist(&z, &x).unwrap();
            let d1 = dist(&z, &turned).unwrap();
            prop_assert!((d0 - d1).abs() <= 1e-12 * (norm(&x) + norm(&z)));
            prop_assert!(dist(&turned, &x).unwrap() <= 1e-12 * norm(&x));
            Ok(())
        }),
    ));

    results.push((
        "deterministic reruns",
        property(8, any::<u64>(), |seed| {
            let config = ExperimentConfig {
                shape: GridShape::line(64).unwrap(),
                recon_p: 2,
                phantom: Phantom::Random { sparsity: 4 },
                snr_db: Some(35.0),
                seed,
                ..ExperimentConfig::default()
            };
            let a = run_recon_experiment(&config).unwrap();
            let b = run_recon_experiment(&config).unwrap();
            prop_assert_eq!(a.report.trace_csv(), b.report.trace_csv());
            prop_assert_eq!(a.estimate_file().unwrap().to_text().unwrap(), b.estimate_file().unwrap().to_text().unwrap());
            prop_assert_eq!(a.report_toml().unwrap(), b.report_toml().unwrap());
            Ok(())
        }),
    ));

    let diagram_config = ExperimentConfig {
        shape: GridShape::line(32).unwrap(),
        sparsity: vec![2, 4],
        p_values: vec![1, 2],
        trials: 4,
        ..ExperimentConfig::default()
    };
    let run_with = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| run_phase_diagram(&diagram_config).unwrap())
    };
    let (one, many) = (run_with(1), run_with(4));
    let same = one.to_csv() == many.to_csv() && one.trials_csv() == many.trials_csv() && one.to_matrix() == many.to_matrix();
    results.push((
        "thread-count independence",
        if same { Ok(()) } else { Err("phase diagram differs between 1 and 4 threads".into()) },
    ));

    let elapsed = start.elapsed().as_secs_f64();
    let failed: Vec<String> = results
        .iter()
        .filter_map(|(name, r)| r.as_ref().err().map(|e| format!("{name}: {e}")))
        .collect();
    let pass = failed.is_empty() && elapsed < 60.0;
    let details = if failed.is_empty() {
        format!("{} property suites in {elapsed:.1}s", results.len())
    } else {
        failed.join("; ")
    };
    verdict(8, "invariants", pass, &details);
    assert!(pass);
}
