//! Behavioral suites for the finite-rank operator: contraction, the
//! central row-norm identity, duality bounds and refinement convergence.

use num_complex::Complex64;

use nucleon_core::approx_operator::{
    apply_to_simple, build_factors, contraction_certificate, ell_pn_row_norms,
    projection_residual, PartitionSpec,
};
use nucleon_core::exponents::ExponentTuple;
use nucleon_core::grid::TensorGrid;
use nucleon_core::mixed_norm::{mixed_norm, mixed_norm_simple};
use nucleon_core::random::{self, Selection};
use nucleon_core::rng::SplitMix64;
use nucleon_core::simple::{BoxRegion, SimpleFunction};
use nucleon_core::weights::Weight;

const TUPLES: [&[f64]; 5] = [&[1.0, 1.0], &[2.0, 2.0], &[1.0, 2.0], &[2.0, 1.0], &[3.0, 2.0]];

#[test]
fn contraction_over_tuples_with_and_without_weights() {
    for (ti, exps) in TUPLES.iter().enumerate() {
        let p = ExponentTuple::new(exps).unwrap();
        for weighted in [false, true] {
            let mut rng = SplitMix64::stream(0xAB5, (ti * 2 + weighted as usize) as u64);
            let grid = random::grid(&mut rng, &[12, 12]);
            let selection = if ti % 2 == 0 {
                Selection::Full
            } else {
                Selection::Permutation
            };
            let part = random::partition(&mut rng, &grid, 3, selection, weighted);
            let w = part.weight().unwrap();
            let report =
                contraction_certificate(&part, &p, &w, &grid, 150, 1000 + ti as u64).unwrap();
            assert!(
                report.max_ratio <= 1.0 + 1e-10,
                "tuple {exps:?} weighted={weighted}: max ratio {}",
                report.max_ratio
            );
            let res = projection_residual(&part, &p, &w, &grid, 5).unwrap();
            assert!(res < 1e-12, "projection residual {res}");
        }
    }
}

#[test]
fn subordinate_inputs_attain_ratio_one() {
    let mut rng = SplitMix64::new(77);
    let grid = random::grid(&mut rng, &[8, 8]);
    let part = random::partition(&mut rng, &grid, 4, Selection::Permutation, true);
    let p = ExponentTuple::new(&[1.0, 2.0]).unwrap();
    let w = part.weight().unwrap();
    let factors = build_factors(&part, &p, &grid).unwrap();
    let f = random::subordinate_simple(&mut rng, &part);
    let nf = mixed_norm_simple(&f, &p, &w, &grid).unwrap();
    let lf = apply_to_simple(&factors, &f, &grid).unwrap();
    let nlf = mixed_norm_simple(&lf, &p, &w, &grid).unwrap();
    assert!((nlf / nf - 1.0).abs() < 1e-12, "ratio {}", nlf / nf);
}

/// The testable core of the proof: for subordinate normalized `f` on a
/// per-axis-disjoint partition, `‖⟨f, u_k⟩‖_{ℓ^{p_n}} = ‖f‖_{L_w^P}`.
#[test]
fn central_identity_for_subordinate_functions() {
    for case in 0..50u64 {
        let mut rng = SplitMix64::stream(0xCE27, case);
        let n = rng.usize_in(1, 3);
        let grid = random::grid(&mut rng, &vec![10; n]);
        let count = rng.usize_in(1, 5);
        let part =
            random::partition(&mut rng, &grid, count, Selection::Permutation, case % 2 == 0);
        let p = {
            let pool = [1.0, 1.5, 2.0, 3.0];
            let exps: Vec<f64> = (0..n).map(|_| pool[rng.usize_in(0, 3)]).collect();
            ExponentTuple::new(&exps).unwrap()
        };
        let w = part.weight().unwrap();
        let factors = build_factors(&part, &p, &grid).unwrap();
        let f = random::subordinate_simple(&mut rng, &part);
        let nf = mixed_norm_simple(&f, &p, &w, &grid).unwrap();
        if nf < 1e-12 {
            continue;
        }
        let f = f.scale(Complex64::new(1.0 / nf, 0.0));
        let fg = f.to_grid_function(&grid).unwrap();
        let (row, _) = ell_pn_row_norms(&factors, &fg, &fg, &p, &grid).unwrap();
        assert!(
            (row - 1.0).abs() < 1e-12,
            "case {case}: row norm {row} for a unit-norm subordinate function"
        );
    }
}

#[test]
fn row_norms_stay_below_one_for_normalized_pairs() {
    let mut hits = 0;
    for case in 0..200u64 {
        let mut rng = SplitMix64::stream(0x201, case);
        let grid = random::grid(&mut rng, &[9, 9]);
        let count = rng.usize_in(1, 4);
        let part =
            random::partition(&mut rng, &grid, count, Selection::Permutation, case % 2 == 1);
        let pool = [1.0, 1.5, 2.0, 3.0];
        let exps: Vec<f64> = (0..2).map(|_| pool[rng.usize_in(0, 3)]).collect();
        let p = ExponentTuple::new(&exps).unwrap();
        let w = part.weight().unwrap();
        let wd = w.inverse();
        let pd = p.dual();
        let factors = build_factors(&part, &p, &grid).unwrap();

        let mut f = random::grid_function(&mut rng, &grid);
        let mut g = random::grid_function(&mut rng, &grid);
        let nf = mixed_norm(&f, &p, &w, &grid).unwrap();
        let ng = mixed_norm(&g, &pd, &wd, &grid).unwrap();
        if nf < 1e-12 || ng < 1e-12 {
            continue;
        }
        f = f.scale(Complex64::new(1.0 / nf, 0.0));
        g = g.scale(Complex64::new(1.0 / ng, 0.0));
        let (row_f, row_g) = ell_pn_row_norms(&factors, &f, &g, &p, &grid).unwrap();
        assert!(row_f <= 1.0 + 1e-12, "case {case}: row_f = {row_f}");
        assert!(row_g <= 1.0 + 1e-12, "case {case}: row_g = {row_g}");
        hits += 1;
    }
    assert!(hits >= 190, "too many degenerate draws: {hits}");
}

#[test]
fn zero_input_gives_zero_first_component() {
    let grid = TensorGrid::unit_cells(&[4, 4]).unwrap();
    let part = PartitionSpec::full_tensor(vec![vec![(0, 2), (2, 4)], vec![(0, 4)]], None).unwrap();
    let p = ExponentTuple::new(&[2.0, 2.0]).unwrap();
    let factors = build_factors(&part, &p, &grid).unwrap();
    let zero = nucleon_core::grid::GridFunction::zeros(&grid);
    let mut rng = SplitMix64::new(5);
    let g = random::grid_function(&mut rng, &grid);
    let (row_f, row_g) = ell_pn_row_norms(&factors, &zero, &g, &p, &grid).unwrap();
    assert_eq!(row_f, 0.0);
    assert!(row_g > 0.0);
}

fn refinement_errors(f: &SimpleFunction, p: &ExponentTuple) -> Vec<f64> {
    let grid = TensorGrid::unit_cells(&[8, 8]).unwrap();
    let w = Weight::one(2);
    let mut errors = Vec::new();
    for level in 0..=3u32 {
        let blocks = 1usize << level;
        let width = 8 / blocks;
        let intervals: Vec<(usize, usize)> = (0..blocks)
            .map(|b| (b * width, (b + 1) * width))
            .collect();
        let part =
            PartitionSpec::full_tensor(vec![intervals.clone(), intervals], None).unwrap();
        let factors = build_factors(&part, p, &grid).unwrap();
        let lf = apply_to_simple(&factors, f, &grid).unwrap();
        let fg = f.to_grid_function(&grid).unwrap();
        let lfg = lf.to_grid_function(&grid).unwrap();
        let diff = fg.add(&lfg.scale(Complex64::new(-1.0, 0.0))).unwrap();
        errors.push(mixed_norm(&diff, p, &w, &grid).unwrap());
    }
    errors
}

fn corner_indicator() -> SimpleFunction {
    SimpleFunction::new(
        vec![BoxRegion::new(vec![(0, 1), (0, 1)]).unwrap()],
        vec![Complex64::new(1.0, 0.0)],
    )
    .unwrap()
}

/// Dyadic-refinement convergence on a piecewise-constant target. In the
/// Hilbert case the block averages are nested orthogonal projections, so
/// the error is non-increasing step by step; for unequal exponents only
/// convergence to zero is guaranteed (single refinement steps can
/// overshoot), which is checked separately below.
#[test]
fn refinement_errors_decrease_monotonically_in_the_hilbert_case() {
    let errors = refinement_errors(&corner_indicator(), &ExponentTuple::new(&[2.0, 2.0]).unwrap());
    for w in errors.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "errors increased: {errors:?}");
    }
    assert!(errors[3] < 1e-13, "final error {}", errors[3]);
    assert!(errors[0] > 0.1, "coarse error should be visible: {}", errors[0]);
}

#[test]
fn refinement_errors_vanish_once_the_target_is_resolved() {
    for exps in [[1.0, 1.0], [1.0, 2.0], [2.0, 1.0], [3.0, 2.0]] {
        let errors = refinement_errors(&corner_indicator(), &ExponentTuple::new(&exps).unwrap());
        assert!(
            errors[3] < 1e-13,
            "tuple {exps:?}: final error {}",
            errors[3]
        );
        assert!(
            errors[3] <= errors[0],
            "tuple {exps:?}: no overall decrease: {errors:?}"
        );
    }
}
