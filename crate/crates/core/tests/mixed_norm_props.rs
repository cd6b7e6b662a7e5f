//! Property suites for the weighted mixed norm: the closed-form identity,
//! Hölder duality, triangle inequality, collapse and homogeneity.

use num_complex::Complex64;
use proptest::prelude::*;

use nucleon_core::exponents::{dual_exponents, ExponentTuple};
use nucleon_core::grid::GridFunction;
use nucleon_core::mixed_norm::{
    holder_pair, mixed_norm, mixed_norm_simple, seq_mixed_norm, simple_norm_closed_form,
};
use nucleon_core::random::{self, Selection};
use nucleon_core::rng::SplitMix64;
use nucleon_core::stft_gabor::LatticeCoefficients;
use nucleon_core::weights::{ElementaryWeight, SeparableWeight, Weight};

const EXPONENT_POOL: [f64; 6] = [1.0, 1.5, 2.0, 2.5, 3.0, 4.0];

fn random_tuple(rng: &mut SplitMix64, n: usize) -> ExponentTuple {
    let exps: Vec<f64> = (0..n)
        .map(|_| EXPONENT_POOL[rng.usize_in(0, EXPONENT_POOL.len() - 1)])
        .collect();
    ExponentTuple::new(&exps).unwrap()
}

/// The key identity of the approximation argument: the closed-form norm of
/// a simple function subordinate to a per-axis-disjoint partition equals
/// the iterated norm, with and without elementary weights.
#[test]
fn closed_form_agrees_with_iterated_norm_on_random_partitions() {
    for case in 0..150u64 {
        let mut rng = SplitMix64::stream(0xC105ED, case);
        let n = rng.usize_in(1, 4);
        let cells = match n {
            1 | 2 => 24,
            3 => 21,
            _ => 21,
        };
        let grid = random::grid(&mut rng, &vec![cells; n]);
        let boxes = rng.usize_in(1, 20);
        let weighted = case % 2 == 0;
        let part = random::partition(&mut rng, &grid, boxes, Selection::Permutation, weighted);
        let f = random::subordinate_simple(&mut rng, &part);
        let p = random_tuple(&mut rng, n);

        let (closed, iterated) = if weighted {
            let gammas: Vec<f64> = part.boxes().iter().map(|b| b.gamma).collect();
            let ew = ElementaryWeight::new(part.regions(), gammas).unwrap();
            let closed = simple_norm_closed_form(&f, &p, &grid, Some(&ew)).unwrap();
            let iterated =
                mixed_norm_simple(&f, &p, &Weight::Elementary(ew), &grid).unwrap();
            (closed, iterated)
        } else {
            let closed = simple_norm_closed_form(&f, &p, &grid, None).unwrap();
            let iterated = mixed_norm_simple(&f, &p, &Weight::one(n), &grid).unwrap();
            (closed, iterated)
        };
        let rel = (closed - iterated).abs() / iterated.abs().max(1e-300);
        assert!(
            rel < 1e-12,
            "case {case}: closed {closed} vs iterated {iterated} (rel {rel:.3e})"
        );
    }
}

#[test]
fn triangle_inequality_holds_per_tuple() {
    let tuples = [
        ExponentTuple::new(&[1.0, 2.0]).unwrap(),
        ExponentTuple::new(&[2.0, 1.0]).unwrap(),
        ExponentTuple::new(&[2.0, 3.0, 2.0]).unwrap(),
    ];
    for (ti, p) in tuples.iter().enumerate() {
        let n = p.len();
        let mut rng = SplitMix64::stream(0x741A, ti as u64);
        let grid = random::grid(&mut rng, &vec![6; n]);
        let w = Weight::one(n);
        for trial in 0..1000 {
            let f = random::grid_function(&mut rng, &grid);
            let g = random::grid_function(&mut rng, &grid);
            let nf = mixed_norm(&f, p, &w, &grid).unwrap();
            let ng = mixed_norm(&g, p, &w, &grid).unwrap();
            let nsum = mixed_norm(&f.add(&g).unwrap(), p, &w, &grid).unwrap();
            assert!(
                nsum <= (nf + ng) * (1.0 + 1e-12),
                "tuple {ti} trial {trial}: {nsum} > {nf} + {ng}"
            );
        }
    }
}

/// `|⟨f, g⟩| ≤ ‖f‖_{L_w^P} ‖g‖_{L_{w^{-1}}^{P'}}` for random pairs and
/// separable weights, with normalized inputs (slack at worst `-1e-12`).
#[test]
fn holder_inequality_on_random_pairs() {
    for case in 0..500u64 {
        let mut rng = SplitMix64::stream(0x401DE4, case);
        let n = rng.usize_in(1, 3);
        let grid = random::grid(&mut rng, &vec![5; n]);
        let p = random_tuple(&mut rng, n);
        let pd = dual_exponents(&p);
        let w = match case % 3 {
            0 => SeparableWeight::one(n),
            1 => SeparableWeight::polynomial(n, rng.uniform_in(0.0, 2.0)).unwrap(),
            _ => {
                if n % 2 == 0 {
                    SeparableWeight::modulation(n / 2, rng.uniform_in(-1.0, 1.0)).unwrap()
                } else {
                    SeparableWeight::one(n)
                }
            }
        };
        let wf = Weight::Separable(w.clone());
        let wg = Weight::Separable(w.inverse());

        let mut f = random::grid_function(&mut rng, &grid);
        let mut g = random::grid_function(&mut rng, &grid);
        let nf = mixed_norm(&f, &p, &wf, &grid).unwrap();
        let ng = mixed_norm(&g, &pd, &wg, &grid).unwrap();
        if nf < 1e-12 || ng < 1e-12 {
            continue;
        }
        f = f.scale(Complex64::new(1.0 / nf, 0.0));
        g = g.scale(Complex64::new(1.0 / ng, 0.0));
        let pairing = holder_pair(&f, &g, &grid).unwrap().norm();
        assert!(
            1.0 - pairing >= -1e-12,
            "case {case}: pairing {pairing} exceeds the norm product"
        );
    }
}

#[test]
fn holder_is_sharp_for_matched_powers() {
    // For f = g = indicator and P = (2,2) the inequality is an equality.
    let grid = nucleon_core::grid::TensorGrid::unit_cells(&[2, 2]).unwrap();
    let f = GridFunction::from_fn(&grid, |_| Complex64::new(0.5, 0.0)).unwrap();
    let p = ExponentTuple::new(&[2.0, 2.0]).unwrap();
    let w = Weight::one(2);
    let pairing = holder_pair(&f, &f, &grid).unwrap().norm();
    let nf = mixed_norm(&f, &p, &w, &grid).unwrap();
    let ng = mixed_norm(&f, &p.dual(), &w, &grid).unwrap();
    assert!((pairing - nf * ng).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dual_involution_is_identity(
        exps in proptest::collection::vec(1.0f64..8.0, 1..6)
    ) {
        let p = ExponentTuple::new(&exps).unwrap();
        prop_assert_eq!(dual_exponents(&dual_exponents(&p)), p);
    }

    #[test]
    fn norm_is_absolutely_homogeneous(
        seed in any::<u64>(),
        scale_re in -4.0f64..4.0,
        scale_im in -4.0f64..4.0,
    ) {
        let mut rng = SplitMix64::new(seed);
        let n = rng.usize_in(1, 3);
        let grid = random::grid(&mut rng, &vec![4; n]);
        let p = random_tuple(&mut rng, n);
        let w = Weight::one(n);
        let f = random::grid_function(&mut rng, &grid);
        let c = Complex64::new(scale_re, scale_im);
        let nf = mixed_norm(&f, &p, &w, &grid).unwrap();
        let nc = mixed_norm(&f.scale(c), &p, &w, &grid).unwrap();
        prop_assert!((nc - c.norm() * nf).abs() <= 1e-12 * (1.0 + nf));
    }

    #[test]
    fn equal_exponents_collapse_to_flat_norm(
        seed in any::<u64>(),
        p in 1.0f64..5.0,
    ) {
        let mut rng = SplitMix64::new(seed);
        let n = rng.usize_in(1, 3);
        let grid = random::grid(&mut rng, &vec![4; n]);
        let f = random::grid_function(&mut rng, &grid);
        let tuple = ExponentTuple::constant(p, n).unwrap();
        let v = mixed_norm(&f, &tuple, &Weight::one(n), &grid).unwrap();
        let mut flat = 0.0;
        for (idx, z) in f.values().indexed_iter() {
            let idx: Vec<usize> = (0..n).map(|j| idx[j]).collect();
            flat += z.norm().powf(p) * grid.cell_measure(&idx);
        }
        let flat = flat.powf(1.0 / p);
        prop_assert!((v - flat).abs() <= 1e-12 * flat.max(1.0));
    }

    #[test]
    fn sequence_norm_matches_direct_nested_sums(
        seed in any::<u64>(),
        p in 1.0f64..4.0,
        q in 1.0f64..4.0,
    ) {
        let mut rng = SplitMix64::new(seed);
        let nk = rng.usize_in(1, 6);
        let nl = rng.usize_in(1, 6);
        let vals: Vec<Complex64> = (0..nk * nl).map(|_| rng.complex_normal()).collect();
        let weights: Vec<f64> = (0..nk * nl).map(|_| rng.uniform_in(0.2, 3.0)).collect();
        let a = LatticeCoefficients::from_grid_of(
            1.0, 1.0, nk, nl, vals.clone(), Some(weights.clone()),
        ).unwrap();
        let v = seq_mixed_norm(&a, p, q).unwrap();
        let mut outer = 0.0f64;
        for l in 0..nl {
            let mut inner = 0.0f64;
            for k in 0..nk {
                inner += (vals[k * nl + l].norm() * weights[k * nl + l]).powf(p);
            }
            outer += inner.powf(q / p);
        }
        let direct = outer.powf(1.0 / q);
        prop_assert!((v - direct).abs() <= 1e-10 * direct.max(1.0));
    }
}
