//! Oracle suites for kernel representations built from the oscillator:
//! heat traces, kernel increments, Lidskii comparisons and Schatten
//! consistency.

use nucleon_core::grid::{GridAxis, TensorGrid};
use nucleon_core::harmonic_oscillator::{spectral_rep, HermiteSystem, SpectralFunction};
use nucleon_core::nuclear_ops::{
    assemble_kernel, discretize, lidskii_check, nuclear_bound, schatten_quasinorm,
    spectrum, trace_from_rep, NystromMode,
};

fn heat_oracle() -> f64 {
    0.5 / 1.0f64.sinh()
}

fn node_grid(extent: f64, step: f64) -> TensorGrid {
    let n = (2.0 * extent / step).round() as usize + 1;
    TensorGrid::new(vec![GridAxis::uniform_nodes(-extent, extent, n).unwrap()]).unwrap()
}

/// Heat representation at t = 1 with 41 ranks on the system's reference
/// grid: the pairing trace hits `1/(2 sinh 1)` within 1e-6.
#[test]
fn heat_trace_from_representation() {
    let sys = HermiteSystem::new(1, 40).unwrap();
    let f = SpectralFunction::exp_neg(1.0).unwrap();
    let rep = spectral_rep(&f, &sys, sys.len()).unwrap();
    let report = trace_from_rep(&rep).unwrap();
    assert!(
        (report.trace.re - heat_oracle()).abs() < 1e-6,
        "trace {} vs {}",
        report.trace.re,
        heat_oracle()
    );
    assert!(report.trace.im.abs() < 1e-12);
    assert!(report.discrepancy < 1e-8);
}

/// Kernel assembly increments decay geometrically with ratio close to
/// `e^{-2}` per rank (the factor norms carry `e^{-λ_j}` with slowly
/// growing `L¹` norms).
#[test]
fn heat_kernel_increments_decay_geometrically() {
    let sys = HermiteSystem::new(1, 40).unwrap();
    let f = SpectralFunction::exp_neg(1.0).unwrap();
    let rep = spectral_rep(&f, &sys, sys.len()).unwrap();
    let kernel = assemble_kernel(&rep, rep.len()).unwrap();
    let inc = &kernel.increments;
    let ratios: Vec<f64> = (10..35).map(|j| inc[j + 1] / inc[j]).collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let expected = (-2.0f64).exp();
    assert!(
        (mean / expected - 1.0).abs() < 0.10,
        "mean increment ratio {mean} vs e^-2 = {expected}"
    );
    // Decay is genuinely geometric: every measured ratio is close too.
    for (j, r) in ratios.iter().enumerate() {
        assert!((r / expected - 1.0).abs() < 0.15, "ratio {j}: {r}");
    }
}

/// Lidskii on a mid-size heat discretization: the representation trace
/// and the eigenvalue sum of the Nyström matrix agree to 1e-4.
#[test]
fn lidskii_heat_midsize() {
    let grid = node_grid(10.0, 0.05);
    let sys = HermiteSystem::with_grid(1, 30, grid).unwrap();
    let f = SpectralFunction::exp_neg(1.0).unwrap();
    let rep = spectral_rep(&f, &sys, sys.len()).unwrap();
    let report = lidskii_check(&rep, NystromMode::Symmetric).unwrap();
    assert!(report.rel_error < 1e-4, "rel error {}", report.rel_error);
    assert!(
        (report.eigensum.re - heat_oracle()).abs() < 1e-4,
        "eigensum {}",
        report.eigensum.re
    );
    assert!(!report.r_within_lidskii_hypothesis); // r = 1 declared
}

/// The column-weighted (non-symmetric) Nyström route agrees with the
/// symmetric one.
#[test]
fn lidskii_heat_column_weights() {
    let grid = node_grid(10.0, 0.1);
    let sys = HermiteSystem::with_grid(1, 24, grid).unwrap();
    let f = SpectralFunction::exp_neg(1.0).unwrap();
    let rep = spectral_rep(&f, &sys, sys.len()).unwrap();
    let report = lidskii_check(&rep, NystromMode::ColumnWeights).unwrap();
    assert!(report.rel_error < 1e-4, "rel error {}", report.rel_error);
}

/// `F(λ) = λ^{-2}` with 200 ranks: the eigenvalue sum of the discretized
/// kernel lands within the analytic tail bound of `π²/8`.
#[test]
fn lidskii_zeta_two_hundred_ranks() {
    let kmax = 199;
    let half = ((2 * kmax + 1) as f64).sqrt() + 6.0;
    let grid = node_grid(half, 0.05);
    let sys = HermiteSystem::with_grid(1, kmax, grid).unwrap();
    let f = SpectralFunction::power_neg(2).unwrap();
    let rep = spectral_rep(&f, &sys, 200).unwrap();
    let report = lidskii_check(&rep, NystromMode::Symmetric).unwrap();
    assert!(report.rel_error < 1e-8, "rel error {}", report.rel_error);

    let target = std::f64::consts::PI * std::f64::consts::PI / 8.0;
    let tail_bound = 1.0 / (4.0 * 200.0);
    assert!(
        (report.eigensum.re - target).abs() <= tail_bound,
        "eigensum {} misses pi^2/8 by more than {tail_bound}",
        report.eigensum.re
    );
}

/// Oloff consistency: for the positive self-adjoint heat matrix the
/// Schatten-1 quasi-norm is the trace, and the eigen-representation bound
/// dominates the Schatten quasi-norm within 2% for r in {1/2, 2/3, 1}.
#[test]
fn oloff_schatten_against_nuclear_bound() {
    let grid = node_grid(10.0, 0.04);
    let sys = HermiteSystem::with_grid(1, 40, grid).unwrap();
    let f = SpectralFunction::exp_neg(1.0).unwrap();
    let rep = spectral_rep(&f, &sys, sys.len()).unwrap();
    let op = discretize(&rep, NystromMode::Symmetric).unwrap();

    let trace = trace_from_rep(&rep).unwrap().trace.re;
    let s1 = schatten_quasinorm(&op, 1.0).unwrap();
    assert!((s1 - trace).abs() < 1e-4, "S_1 {s1} vs trace {trace}");

    for r in [0.5, 2.0 / 3.0, 1.0] {
        let bound = nuclear_bound(&rep, r).unwrap();
        let sr = schatten_quasinorm(&op, r).unwrap();
        assert!(
            sr <= bound * (1.0 + 1e-9),
            "r={r}: schatten {sr} exceeds the bound {bound}"
        );
        assert!(
            (bound - sr) / sr < 0.02,
            "r={r}: gap {} too wide",
            (bound - sr) / sr
        );
    }
}

/// The heat matrix eigenvalues reproduce `e^{-λ_j}` itself.
#[test]
fn heat_matrix_top_eigenvalues() {
    let grid = node_grid(10.0, 0.05);
    let sys = HermiteSystem::with_grid(1, 30, grid).unwrap();
    let f = SpectralFunction::exp_neg(1.0).unwrap();
    let rep = spectral_rep(&f, &sys, sys.len()).unwrap();
    let op = discretize(&rep, NystromMode::Symmetric).unwrap();
    let eigs = spectrum(&op).unwrap();
    for j in 0..6 {
        let expected = (-(2.0 * j as f64 + 1.0)).exp();
        assert!(
            (eigs[j].re - expected).abs() < 1e-8,
            "eigenvalue {j}: {} vs {expected}",
            eigs[j].re
        );
    }
}
