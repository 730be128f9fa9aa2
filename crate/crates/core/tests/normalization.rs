use curveres::kinetics::{self, presets as kin};
use curveres::matcore::{self, Matrix};
use curveres::normalization::{
    closure_stats, fsvt1n_external, fsvt1n_internal, internal_normalize_sum, normalize_rows_sum,
    presets, SumMode,
};
use curveres::odeint::IntegratorConfig;
use curveres::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

#[test]
fn plain_sum_arithmetic() {
    let m = Matrix::from_rows(&[vec![2.0, 2.0], vec![1.0, 3.0]]).unwrap();
    let n = normalize_rows_sum(&m, SumMode::PlainSum).unwrap();
    assert_eq!(n.data(), &[0.5, 0.5, 0.25, 0.75]);
}

#[test]
fn abs_sum_handles_mixed_signs() {
    let m = Matrix::from_rows(&[vec![-2.0, 2.0]]).unwrap();
    // Plain sum is zero; absolute sum is 4.
    assert!(normalize_rows_sum(&m, SumMode::PlainSum).is_err());
    let n = normalize_rows_sum(&m, SumMode::AbsSum).unwrap();
    assert_eq!(n.data(), &[-0.5, 0.5]);
}

#[test]
fn zero_row_error_names_the_row() {
    let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 0.0]]).unwrap();
    match normalize_rows_sum(&m, SumMode::PlainSum) {
        Err(Error::ZeroDivisor { row, .. }) => assert_eq!(row, 1),
        other => panic!("expected ZeroDivisor, got {other:?}"),
    }
}

#[test]
fn normalized_rows_sum_to_one_and_renormalization_is_idempotent() {
    let m = presets::alternating_matrix();
    let n = normalize_rows_sum(&m, SumMode::PlainSum).unwrap();
    for i in 0..n.rows() {
        assert!((n.row(i).iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }
    let nn = normalize_rows_sum(&n, SumMode::PlainSum).unwrap();
    assert!(nn.max_abs_diff(&n).unwrap() < 1e-15);
}

#[test]
fn externally_normalized_matrix_decomposes_exactly() {
    // Full-rank SVD of the row-normalized matrix reproduces it.
    let n = normalize_rows_sum(&presets::alternating_matrix(), SumMode::PlainSum).unwrap();
    let svd = matcore::svd(&n, Some(3)).unwrap();
    let back = svd.reconstruct().unwrap();
    assert!(back.max_abs_diff(&n).unwrap() < 1e-14);
}

#[test]
fn internal_sum_fixed_point_and_scale_invariance() {
    let unit = Matrix::from_rows(&[vec![0.3, 0.7], vec![0.9, 0.1]]).unwrap();
    let out = internal_normalize_sum(&unit).unwrap();
    assert!(out.max_abs_diff(&unit).unwrap() < 1e-15);

    let scores = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, -1.0]]).unwrap();
    let mut scaled = scores.clone();
    for v in scaled.row_mut(0) {
        *v *= 4.0;
    }
    let a = internal_normalize_sum(&scores).unwrap();
    let b = internal_normalize_sum(&scaled).unwrap();
    assert!(a.max_abs_diff(&b).unwrap() < 1e-15);
}

#[test]
fn internal_sum_simplex_coordinates_match_golden() {
    // Pipeline frozen once: SVD scores of the 3x3 demonstration matrix,
    // internal sum normalization, last two coordinates. Guards against
    // silent changes in SVD orientation or the normalization itself.
    let r = presets::alternating_matrix();
    let svd = matcore::svd(&r, Some(3)).unwrap();
    let x = Matrix::from_fn(3, 3, |i, j| svd.u[(i, j)] * svd.s[j]);
    let coords = internal_normalize_sum(&x).unwrap().select_cols(&[1, 2]).unwrap();
    let (golden, header) =
        Matrix::from_csv_str(include_str!("data/simplex_coords.csv"), true).unwrap();
    assert_eq!(header.unwrap(), vec!["u".to_string(), "v".to_string()]);
    assert!(coords.max_abs_diff(&golden).unwrap() < 1e-12);
}

#[test]
fn first_entry_division_arithmetic_and_exact_ones() {
    let m = Matrix::from_rows(&[vec![2.0, 4.0], vec![-1.0, 3.0]]).unwrap();
    let n = fsvt1n_internal(&m).unwrap();
    assert_eq!(n.data(), &[1.0, 2.0, 1.0, -3.0]);
    // x/x is exactly 1.0 in IEEE arithmetic for finite nonzero x.
    let wild = Matrix::from_rows(&[vec![3.7e-11, 2.0], vec![-9.1e7, 5.5]]).unwrap();
    let wn = fsvt1n_internal(&wild).unwrap();
    assert_eq!(wn[(0, 0)].to_bits(), 1.0f64.to_bits());
    assert_eq!(wn[(1, 0)].to_bits(), 1.0f64.to_bits());
}

#[test]
fn first_entry_division_rejects_zero_leading_entry() {
    let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 3.0]]).unwrap();
    match fsvt1n_internal(&m) {
        Err(Error::ZeroDivisor { row, .. }) => assert_eq!(row, 1),
        other => panic!("expected ZeroDivisor, got {other:?}"),
    }
}

#[test]
fn identical_positive_rows_converge_fast() {
    let r = Matrix::from_rows(&vec![vec![2.0, 1.0, 3.0]; 4]).unwrap();
    let res = fsvt1n_external(&r, 1, 1e-12, 50).unwrap();
    assert!(res.converged);
    assert!(res.iterations <= 2, "took {} iterations", res.iterations);
    for i in 0..4 {
        assert!((res.scores[(i, 0)] - 1.0).abs() <= 1e-12);
    }
    assert!(!res.cycle_detected);
}

#[test]
fn random_positive_matrix_converges_to_the_fixed_point() {
    let mut rng = ChaCha12Rng::seed_from_u64(31);
    let r = Matrix::from_fn(6, 4, |_, _| rng.random_range(0.1..2.0));
    let eps = 1e-13;
    let res = fsvt1n_external(&r, 4, eps, 100).unwrap();
    assert!(res.converged, "residual {}", res.residual);
    assert!(res.residual <= eps);
    // At the fixed point the first score column (= R·v1 of the final
    // working matrix) is the one-vector.
    for i in 0..6 {
        assert!((res.scores[(i, 0)] - 1.0).abs() <= 10.0 * eps);
    }
    assert!(!res.cycle_detected);
    assert!(res.cycle_period.is_none());
}

#[test]
fn alternating_matrix_settles_into_a_period_two_cycle() {
    let r = presets::alternating_matrix();
    let runs: Vec<_> = (100..=103)
        .map(|n| fsvt1n_external(&r, 3, presets::DEFAULT_EPS, n).unwrap())
        .collect();
    for res in &runs {
        assert!(!res.converged);
        assert!(res.cycle_detected);
        assert_eq!(res.cycle_period, Some(2));
        assert!(res.cycle_iterates.is_some());
    }
    // Even/odd iterates agree with their own parity and disagree across it.
    let diff_even = runs[0].scores.max_abs_diff(&runs[2].scores).unwrap();
    let diff_odd = runs[1].scores.max_abs_diff(&runs[3].scores).unwrap();
    let diff_cross = runs[0].scores.max_abs_diff(&runs[1].scores).unwrap();
    assert!(diff_even < 1e-10, "even iterates differ by {diff_even}");
    assert!(diff_odd < 1e-10, "odd iterates differ by {diff_odd}");
    assert!(diff_cross > 0.1, "cross-parity iterates only differ by {diff_cross}");
    // The two accumulation points, pinned by their first entries.
    assert!((runs[0].scores[(0, 0)] - 1.9174).abs() < 5e-4);
    assert!((runs[1].scores[(0, 0)] - 0.5215).abs() < 5e-4);
    // The recorded pair spans both accumulation points.
    let (a, b) = runs[0].cycle_iterates.as_ref().unwrap();
    assert!(a.max_abs_diff(b).unwrap() > 0.1);
}

#[test]
fn external_iteration_input_validation() {
    let r = presets::alternating_matrix();
    assert!(fsvt1n_external(&r, 0, 1e-15, 10).is_err());
    assert!(fsvt1n_external(&r, 4, 1e-15, 10).is_err());
    assert!(fsvt1n_external(&Matrix::zeros(3, 3), 2, 1e-15, 10).is_err());
}

#[test]
fn closure_stats_on_closed_rows() {
    let m = Matrix::from_rows(&[vec![0.25, 0.75], vec![0.5, 0.5]]).unwrap();
    let st = closure_stats(&m).unwrap();
    assert_eq!((st.min, st.max, st.mean, st.std), (1.0, 1.0, 1.0, 0.0));
    assert!(!st.degenerate);
}

#[test]
fn closure_stats_single_row_is_degenerate() {
    let st = closure_stats(&Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap()).unwrap();
    assert!(st.degenerate);
    assert_eq!(st.std, 0.0);
    assert_eq!(st.mean, 3.0);
}

#[test]
fn enzyme_kinetics_row_sums_are_not_closed() {
    // Row sum = 1 + [enzyme]: starts at 1.1 and dips as the complex forms,
    // so the trajectory never lies on a fixed-sum hyperplane.
    let c = kinetics::simulate(
        &kin::michaelis_menten(),
        &kin::mm_grid(),
        &IntegratorConfig::rk89_tight(),
        &[],
    )
    .unwrap();
    let st = closure_stats(&c).unwrap();
    assert!((st.min - 1.015).abs() < 2e-3, "min {}", st.min);
    assert!((st.max - 1.100).abs() < 2e-3, "max {}", st.max);
    assert!((st.mean - 1.057).abs() < 2e-3, "mean {}", st.mean);
    // The spread statistics depend on how densely the time grid samples
    // the early transient; the uniform 241-point grid lands close to but
    // not exactly on the adaptive-grid value.
    assert!((st.std - 0.036).abs() < 6e-3, "std {}", st.std);
}

#[test]
fn external_and_internal_sum_normalizations_agree() {
    // For nonnegative D = C·A', the simplex coordinates reached by
    // (a) normalizing the data rows first and factoring, or (b) factoring
    // first and normalizing the concentration rows, are the same: both land
    // the profile rows on the unit-sum hyperplane.
    let mut rng = ChaCha12Rng::seed_from_u64(77);
    let c = Matrix::from_fn(12, 3, |_, _| rng.random_range(0.1..1.0));
    let a = Matrix::from_fn(20, 3, |_, _| rng.random_range(0.1..1.0));
    let d = c.matmul(&a.transpose()).unwrap();

    // Column masses of A convert concentration rows into data row sums.
    let g: Vec<f64> = (0..3).map(|j| a.col(j).iter().sum()).collect();
    let c_mass = Matrix::from_fn(12, 3, |i, j| c[(i, j)] * g[j]);

    // Route (a): external normalization, then the exact factor of the
    // normalized data.
    let dn = normalize_rows_sum(&d, SumMode::PlainSum).unwrap();
    let row_sums: Vec<f64> = (0..12).map(|i| d.row(i).iter().sum()).collect();
    let cn_external = Matrix::from_fn(12, 3, |i, j| c_mass[(i, j)] / row_sums[i]);
    let back = Matrix::from_fn(20, 3, |i, j| a[(i, j)] / g[j]);
    assert!(dn
        .max_abs_diff(&cn_external.matmul(&back.transpose()).unwrap())
        .unwrap()
        < 1e-12);

    // Route (b): normalize the factor rows afterwards.
    let cn_internal = internal_normalize_sum(&c_mass).unwrap();

    for i in 0..12 {
        assert!((cn_external.row(i).iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!((cn_internal.row(i).iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }
    assert!(cn_external.max_abs_diff(&cn_internal).unwrap() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn plain_sum_rows_close_for_positive_matrices(seed in 0u64..1000) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let m = Matrix::from_fn(5, 4, |_, _| rng.random_range(0.05..3.0));
        let n = normalize_rows_sum(&m, SumMode::PlainSum).unwrap();
        for i in 0..5 {
            prop_assert!((n.row(i).iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
        let st = closure_stats(&n).unwrap();
        prop_assert!(st.min <= st.mean && st.mean <= st.max);
    }

    #[test]
    fn converged_runs_never_report_cycles(seed in 0u64..200) {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let r = Matrix::from_fn(5, 3, |_, _| rng.random_range(0.1..2.0));
        let res = fsvt1n_external(&r, 3, 1e-12, 100).unwrap();
        if res.converged {
            prop_assert!(!res.cycle_detected);
            prop_assert!(res.residual <= 1e-12);
        }
    }
}
