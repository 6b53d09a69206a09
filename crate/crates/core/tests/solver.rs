use cdpr_core::forward::{forward, forward_values, EnsembleSpec, MeasurementSet};
use cdpr_core::grid::count_nonzeros;
use cdpr_core::metrics::relative_error;
use cdpr_core::solver::{reconstruct, SolverParams};
use cdpr_core::{gen_sparse_signal, ApertureKind, Error, GridShape};
use num_complex::Complex64;

fn line(n: usize) -> GridShape {
    GridShape::line(n).unwrap()
}

#[test]
fn exact_recovery_small_problem() {
    let shape = line(64);
    let ens = EnsembleSpec::new(shape.clone(), 3, ApertureKind::UniformPhase, 4).build().unwrap();
    let x = gen_sparse_signal(&shape, 4, 5).unwrap();
    let g = forward(&x, &ens).unwrap();
    let report = reconstruct(&g, &ens, &SolverParams::with_sparsity(4), Some(&x.values)).unwrap();
    let err = relative_error(&report.estimate, &x.values).unwrap();
    assert!(err < 1e-8, "{err}");
    assert_eq!(report.iterations_run, 800);
    assert!(count_nonzeros(&report.spectrum, 1e-14) <= 4);
}

#[test]
fn traces_are_consistent() {
    let shape = line(32);
    let ens = EnsembleSpec::new(shape.clone(), 2, ApertureKind::UniformPhase, 1).build().unwrap();
    let x = gen_sparse_signal(&shape, 3, 2).unwrap();
    let g = forward(&x, &ens).unwrap();
    let params = SolverParams {
        iterations: 300,
        ..SolverParams::with_sparsity(3)
    };
    let report = reconstruct(&g, &ens, &params, Some(&x.values)).unwrap();
    let t = report.iterations_run;
    assert_eq!(report.mu_trace.len(), t);
    assert_eq!(report.grad_norm_trace.len(), t);
    assert_eq!(report.objective_trace.len(), t);
    assert_eq!(report.support_trace.len(), t);
    assert_eq!(report.error_trace.as_ref().unwrap().len(), t);
    assert_eq!(report.mu_trace[0], params.mu0);
    for w in report.mu_trace.windows(2) {
        assert!(w[1] == w[0] || w[1] == w[0] * params.gamma1, "{w:?}");
    }
    for (k, w) in report.mu_trace.windows(2).enumerate() {
        // a shrink happens exactly when the gradient at the new iterate is small
        let shrunk = w[1] < w[0];
        assert_eq!(shrunk, report.grad_norm_trace[k] < params.gamma * w[0]);
    }
    assert!(report.support_trace.iter().all(|&s| s <= 3));
    let summary = report.summary();
    assert_eq!(summary.iterations_run, t);
    let csv = report.trace_csv();
    assert_eq!(csv.lines().count(), t + 1);
}

#[test]
fn zero_measurements_give_zero_estimate() {
    let shape = line(16);
    let ens = EnsembleSpec::new(shape.clone(), 2, ApertureKind::UniformPhase, 3).build().unwrap();
    let zero = vec![Complex64::default(); 16];
    let g = forward_values(&zero, &ens).unwrap();
    let truth = gen_sparse_signal(&shape, 2, 1).unwrap();
    let unit: Vec<Complex64> = truth.values.iter().map(|v| v / truth.norm()).collect();
    let params = SolverParams {
        iterations: 50,
        ..SolverParams::with_sparsity(2)
    };
    let report = reconstruct(&g, &ens, &params, Some(&unit)).unwrap();
    assert!(report.estimate.iter().all(|c| c.norm() == 0.0));
    assert!(report.error_trace.unwrap().iter().all(|e| (e - 1.0).abs() < 1e-15));
}

#[test]
fn single_nonzero_coefficient() {
    let shape = line(32);
    let ens = EnsembleSpec::new(shape.clone(), 2, ApertureKind::UniformPhase, 8).build().unwrap();
    let mut spectrum = vec![Complex64::default(); 32];
    spectrum[5] = Complex64::new(0.6, -0.8);
    let x = ens.fourier().inverse_vec(&spectrum);
    let g = forward_values(&x, &ens).unwrap();
    let report = reconstruct(&g, &ens, &SolverParams::with_sparsity(1), Some(&x)).unwrap();
    assert!(relative_error(&report.estimate, &x).unwrap() < 1e-8);
    assert!(report.spectrum[5].norm() > 0.0);
}

#[test]
fn deterministic() {
    let shape = line(32);
    let ens = EnsembleSpec::new(shape.clone(), 2, ApertureKind::UniformPhase, 9).build().unwrap();
    let x = gen_sparse_signal(&shape, 3, 9).unwrap();
    let g = forward(&x, &ens).unwrap();
    let params = SolverParams {
        iterations: 100,
        ..SolverParams::with_sparsity(3)
    };
    let a = reconstruct(&g, &ens, &params, None).unwrap();
    let b = reconstruct(&g, &ens, &params, None).unwrap();
    assert_eq!(a.estimate, b.estimate);
    assert!(a.error_trace.is_none() && a.init_correlation.is_none());
}

#[test]
fn early_stop_truncates_converged_runs() {
    let shape = line(32);
    let ens = EnsembleSpec::new(shape.clone(), 3, ApertureKind::UniformPhase, 2).build().unwrap();
    let x = gen_sparse_signal(&shape, 2, 4).unwrap();
    let g = forward(&x, &ens).unwrap();
    let params = SolverParams {
        early_stop: true,
        iterations: 5000,
        ..SolverParams::with_sparsity(2)
    };
    let report = reconstruct(&g, &ens, &params, Some(&x.values)).unwrap();
    assert!(report.iterations_run < 5000);
    assert!(report.final_error().unwrap() < 1e-8);
}

#[test]
fn input_errors() {
    let shape = line(16);
    let ens = EnsembleSpec::new(shape.clone(), 2, ApertureKind::UniformPhase, 1).build().unwrap();
    let other = EnsembleSpec::new(shape.clone(), 2, ApertureKind::UniformPhase, 2).build().unwrap();
    let x = gen_sparse_signal(&shape, 2, 1).unwrap();
    let g = forward(&x, &ens).unwrap();
    let params = SolverParams::with_sparsity(2);
    assert!(reconstruct(&g, &other, &params, None).is_err());
    assert!(matches!(
        reconstruct(&g, &ens, &SolverParams::with_sparsity(17), None),
        Err(Error::InvalidSparsity { .. })
    ));
    let bad_tau = SolverParams { tau: 1.5, ..params.clone() };
    assert!(matches!(reconstruct(&g, &ens, &bad_tau, None), Err(Error::InvalidParams(_))));
    let mut nan = g.clone();
    nan.values[0] = f64::NAN;
    assert!(reconstruct(&nan, &ens, &params, None).is_err());
    let zero = vec![Complex64::default(); 16];
    assert!(matches!(reconstruct(&g, &ens, &params, Some(&zero)), Err(Error::ZeroReference)));
}

#[test]
fn noisy_negative_intensities_are_tolerated() {
    let shape = line(32);
    let ens = EnsembleSpec::new(shape.clone(), 2, ApertureKind::UniformPhase, 3).build().unwrap();
    let x = gen_sparse_signal(&shape, 2, 3).unwrap();
    let clean = forward(&x, &ens).unwrap();
    let mut values = clean.values.clone();
    values[0] = -1e-6;
    let g = MeasurementSet { values, ..clean };
    let params = SolverParams {
        iterations: 50,
        ..SolverParams::with_sparsity(2)
    };
    assert!(reconstruct(&g, &ens, &params, None).is_ok());
}
