//! Oracle suites for the oscillator eigen-system: orthonormality, the
//! eigen-equation residual, the two-path trace identity and the
//! nuclearity-criterion table.

use nucleon_core::grid::{GridAxis, TensorGrid};
use nucleon_core::harmonic_oscillator::{
    hermite_table, nuclearity_criterion, spectral_rep, trace_f, HermiteSystem,
    SpectralFunction,
};
use nucleon_core::kahan::Kahan;
use nucleon_core::nuclear_ops::trace_from_rep;
use nucleon_core::stft_gabor::{TfPlan, Window};

/// Gram matrix of the first twenty eigenfunctions against the identity on
/// the reference quadrature ([-12, 12], step 0.024).
#[test]
fn gram_matrix_is_the_identity() {
    let axis = GridAxis::uniform_nodes(-12.0, 12.0, 1001).unwrap();
    let table = hermite_table(19, axis.points()).unwrap();
    let mut max_err = 0.0f64;
    for a in 0..20 {
        for b in 0..20 {
            let mut acc = Kahan::new();
            for i in 0..axis.len() {
                acc.add(table[a][i] * table[b][i] * axis.measures()[i]);
            }
            let expected = if a == b { 1.0 } else { 0.0 };
            max_err = max_err.max((acc.value() - expected).abs());
        }
    }
    assert!(max_err < 1e-8, "max Gram error {max_err:.3e}");
}

/// `‖(-Δ + x²)φ_j - λ_j φ_j‖_2 / ‖φ_j‖_2 < 1e-4` with a fourth-order
/// central difference for the Laplacian, j ≤ 20.
#[test]
fn eigen_equation_residual_under_finite_differences() {
    let h = 0.01;
    let n = 2401;
    let axis = GridAxis::uniform_nodes(-12.0, 12.0, n).unwrap();
    let xs = axis.points();
    let table = hermite_table(20, xs).unwrap();
    for (j, phi) in table.iter().enumerate() {
        let lambda = (2 * j + 1) as f64;
        let mut num = Kahan::new();
        let mut den = Kahan::new();
        for i in 2..n - 2 {
            let lap = (-phi[i - 2] + 16.0 * phi[i - 1] - 30.0 * phi[i] + 16.0 * phi[i + 1]
                - phi[i + 2])
                / (12.0 * h * h);
            let residual = -lap + xs[i] * xs[i] * phi[i] - lambda * phi[i];
            num.add(residual * residual * h);
            den.add(phi[i] * phi[i] * h);
        }
        let rel = (num.value() / den.value()).sqrt();
        assert!(rel < 1e-4, "j={j}: residual {rel:.3e}");
    }
}

/// The trace formula made operational: the spectral sum and the
/// kernel/pairing sum agree within 1e-8.
#[test]
fn two_path_trace_identity() {
    let sys = HermiteSystem::new(1, 40).unwrap();
    let f = SpectralFunction::exp_neg(1.0).unwrap();
    let spectral = trace_f(&f, 1, 40).unwrap().value;
    let rep = spectral_rep(&f, &sys, sys.len()).unwrap();
    let pairing = trace_from_rep(&rep).unwrap().trace;
    assert!(
        (spectral - pairing.re).abs() < 1e-8,
        "spectral {spectral} vs pairing {}",
        pairing.re
    );
    assert!(pairing.im.abs() < 1e-14);
}

#[test]
fn two_path_trace_identity_for_negative_powers() {
    let sys = HermiteSystem::new(1, 60).unwrap();
    let f = SpectralFunction::power_neg(2).unwrap();
    let spectral = trace_f(&f, 1, 60).unwrap().value;
    let rep = spectral_rep(&f, &sys, sys.len()).unwrap();
    let pairing = trace_from_rep(&rep).unwrap().trace;
    assert!((spectral - pairing.re).abs() < 1e-8);
}

/// Heat-case nuclearity table at r = 1, s = 0, p = q = 2: the Moyal
/// identity makes the modulation-norm product constant in j, so the terms
/// decay like `e^{-2j}` with under 1% variation in the ratio.
#[test]
fn nuclearity_terms_decay_geometrically() {
    let sys = HermiteSystem::new(1, 8).unwrap();
    let window = Window::gaussian(sys.grid().clone()).unwrap();
    let f = SpectralFunction::exp_neg(1.0).unwrap();
    let plan = TfPlan::square(9.0, 0.125);
    let table = nuclearity_criterion(&f, 1.0, 0.0, 2.0, 2.0, &sys, &window, 7, &plan).unwrap();

    assert_eq!(table.rows.len(), 7);
    let e2 = (-2.0f64).exp();
    for w in table.rows.windows(2) {
        let ratio = w[1].term / w[0].term;
        assert!(
            (ratio / e2 - 1.0).abs() < 0.01,
            "term ratio {ratio} deviates from e^-2 by more than 1%"
        );
    }
    // Partial sums are nondecreasing, exactly.
    for w in table.rows.windows(2) {
        assert!(w[1].partial >= w[0].partial);
    }
    // The Moyal constant itself: each factor norm is (2π)^{1/2} for unit
    // L² inputs; φ_j are unit-normalized, so norm_primal ≈ √(2π).
    let moyal = (2.0 * std::f64::consts::PI).sqrt();
    for row in &table.rows {
        assert!(
            (row.norm_primal - moyal).abs() / moyal < 1e-3,
            "j={}: primal norm {} vs {moyal}",
            row.j,
            row.norm_primal
        );
    }
    let flat = table.flatness.unwrap();
    assert!((flat / e2 - 1.0).abs() < 0.01, "flatness {flat}");
}

/// A vanishing spectral function produces an all-zero table.
#[test]
fn zero_function_gives_zero_partial_sums() {
    let sys = HermiteSystem::new(1, 4).unwrap();
    let window = Window::gaussian(sys.grid().clone()).unwrap();
    let zero = SpectralFunction::table(vec![
        (1.0, 0.0),
        (3.0, 0.0),
        (5.0, 0.0),
        (7.0, 0.0),
        (9.0, 0.0),
    ])
    .unwrap();
    let plan = TfPlan::square(7.0, 0.25);
    let table =
        nuclearity_criterion(&zero, 1.0, 0.0, 2.0, 2.0, &sys, &window, 5, &plan).unwrap();
    assert!(table.rows.iter().all(|r| r.term == 0.0 && r.partial == 0.0));
}

/// Dual-side norms run through infinite exponents when p = 1; the table
/// must still be finite and positive.
#[test]
fn nuclearity_with_p_one_uses_sup_norms() {
    let sys = HermiteSystem::new(1, 3).unwrap();
    let window = Window::gaussian(sys.grid().clone()).unwrap();
    let f = SpectralFunction::exp_neg(0.5).unwrap();
    let plan = TfPlan::square(7.0, 0.25);
    let table =
        nuclearity_criterion(&f, 1.0, 1.0, 1.0, 2.0, &sys, &window, 4, &plan).unwrap();
    for row in &table.rows {
        assert!(row.term.is_finite() && row.term > 0.0);
        assert!(row.norm_dual.is_finite() && row.norm_dual > 0.0);
    }
}
