use approx::assert_relative_eq;
use curveres::matcore::{
    default_rel_tolerance, estimate_rank, holder_norm, least_squares, sign_flip,
    singular_values, svd, Matrix,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

// ---------------------------------------------------------------------------
// SVD
// ---------------------------------------------------------------------------

#[test]
fn svd_reconstructs_and_is_orthonormal() {
    for seed in 0..10u64 {
        let m = random_matrix(7, 5, seed);
        let f = svd(&m, None).unwrap();
        assert!(f.reconstruct().unwrap().max_abs_diff(&m).unwrap() < 1e-12);
        for j in 0..f.s.len() {
            for k in j..f.s.len() {
                let du: f64 = (0..f.u.rows()).map(|i| f.u[(i, j)] * f.u[(i, k)]).sum();
                let dv: f64 = (0..f.vt.cols()).map(|i| f.vt[(j, i)] * f.vt[(k, i)]).sum();
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((du - want).abs() < 1e-12);
                assert!((dv - want).abs() < 1e-12);
            }
        }
        // Non-increasing singular values.
        assert!(f.s.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn svd_sign_convention_is_deterministic() {
    let m = random_matrix(6, 4, 3);
    let a = svd(&m, None).unwrap();
    let b = svd(&m, None).unwrap();
    assert_eq!(a.u.max_abs_diff(&b.u).unwrap(), 0.0);
    // Largest-magnitude entry of each left singular vector is positive.
    for j in 0..a.s.len() {
        let col = a.u.col(j);
        let imax = (0..col.len()).max_by(|&p, &q| col[p].abs().total_cmp(&col[q].abs())).unwrap();
        assert!(col[imax] > 0.0);
    }
}

#[test]
fn svd_truncation_keeps_leading_triplets() {
    let m = random_matrix(8, 6, 11);
    let full = svd(&m, None).unwrap();
    let part = svd(&m, Some(2)).unwrap();
    assert_eq!(part.s.len(), 2);
    assert_relative_eq!(part.s[0], full.s[0], max_relative = 1e-12);
    assert_relative_eq!(part.s[1], full.s[1], max_relative = 1e-12);
}

#[test]
fn frobenius_equals_singular_value_energy() {
    let m = random_matrix(9, 4, 21);
    let s = singular_values(&m).unwrap();
    let fro2 = m.frobenius_norm().powi(2);
    assert_relative_eq!(fro2, s.iter().map(|v| v * v).sum::<f64>(), max_relative = 1e-12);
}

// ---------------------------------------------------------------------------
// Least squares (independent ridge-regression oracle)
// ---------------------------------------------------------------------------

/// Normal equations with tiny Tikhonov damping, solved by Gaussian
/// elimination — an algorithm independent of the SVD route under test.
fn ridge_solve(a: &Matrix, b: &Matrix, lambda: f64) -> Matrix {
    let at = a.transpose();
    let mut ata = at.matmul(a).unwrap();
    for i in 0..ata.rows() {
        ata[(i, i)] += lambda;
    }
    let atb = at.matmul(b).unwrap();
    let mut x = Matrix::zeros(a.cols(), b.cols());
    for j in 0..b.cols() {
        let col = ata.solve(&atb.col(j)).unwrap();
        for i in 0..col.len() {
            x[(i, j)] = col[i];
        }
    }
    x
}

#[test]
fn least_squares_matches_ridge_oracle_on_well_posed_problems() {
    for seed in 0..5u64 {
        let a = random_matrix(12, 4, 100 + seed);
        let b = random_matrix(12, 3, 200 + seed);
        let ls = least_squares(&a, &b).unwrap();
        assert!(!ls.rank_deficient);
        assert_eq!(ls.rank, 4);
        let oracle = ridge_solve(&a, &b, 1e-12);
        assert!(ls.solution.max_abs_diff(&oracle).unwrap() < 1e-6);
    }
}

#[test]
fn least_squares_flags_rank_deficiency_and_returns_min_norm() {
    // Third column = sum of the first two.
    let base = random_matrix(10, 2, 42);
    let a = Matrix::from_fn(10, 3, |i, j| match j {
        0 | 1 => base[(i, j)],
        _ => base[(i, 0)] + base[(i, 1)],
    });
    let b = random_matrix(10, 1, 43);
    let ls = least_squares(&a, &b).unwrap();
    assert!(ls.rank_deficient);
    assert_eq!(ls.rank, 2);
    // Minimum-norm: the solution is orthogonal to the null vector (1,1,-1).
    let x = ls.solution.col(0);
    assert!((x[0] + x[1] - x[2]).abs() < 1e-10);
}

#[test]
fn least_squares_exact_on_consistent_system() {
    let a = random_matrix(8, 3, 7);
    let x_true = random_matrix(3, 2, 8);
    let b = a.matmul(&x_true).unwrap();
    let ls = least_squares(&a, &b).unwrap();
    assert!(ls.solution.max_abs_diff(&x_true).unwrap() < 1e-10);
}

// ---------------------------------------------------------------------------
// Rank estimation
// ---------------------------------------------------------------------------

#[test]
fn rank_report_on_clean_gap() {
    let s = vec![10.0, 5.0, 2.0, 1e-12, 1e-13];
    let report = estimate_rank(&s, 1e-10).unwrap();
    assert_eq!(report.estimated_rank, 3);
    assert_eq!(report.elbow_index, 3);
    assert_relative_eq!(report.condition_number, 5.0, max_relative = 1e-12);
}

#[test]
fn rank_report_full_rank() {
    let s = vec![4.0, 3.0, 2.0, 1.0];
    let report = estimate_rank(&s, 1e-10).unwrap();
    assert_eq!(report.estimated_rank, 4);
    assert_relative_eq!(report.condition_number, 4.0, max_relative = 1e-12);
}

#[test]
fn rank_report_rejects_bad_input() {
    assert!(estimate_rank(&[1.0, 2.0], 1e-10).is_err()); // increasing
    assert!(estimate_rank(&[1.0, -0.5], 1e-10).is_err()); // negative
    assert!(estimate_rank(&[], 1e-10).is_err());
}

#[test]
fn default_tolerance_scales_with_dimension() {
    assert!(default_rel_tolerance(100, 10) > default_rel_tolerance(10, 10));
}

// ---------------------------------------------------------------------------
// Hölder norms
// ---------------------------------------------------------------------------

#[test]
fn holder_norm_known_values() {
    let v = [3.0, -4.0];
    assert_relative_eq!(holder_norm(&v, 2.0).unwrap(), 5.0, max_relative = 1e-14);
    assert_relative_eq!(holder_norm(&v, 1.0).unwrap(), 7.0, max_relative = 1e-14);
    assert_relative_eq!(holder_norm(&v, f64::INFINITY).unwrap(), 4.0, max_relative = 1e-14);
    assert!(holder_norm(&v, 0.5).is_err());
    assert!(holder_norm(&v, f64::NAN).is_err());
}

#[test]
fn holder_norm_is_overflow_safe() {
    let v = [1e300, 1e300];
    let n = holder_norm(&v, 2.0).unwrap();
    assert!(n.is_finite());
    assert_relative_eq!(n, 2.0f64.sqrt() * 1e300, max_relative = 1e-12);
}

proptest! {
    #[test]
    fn holder_norm_triangle_and_homogeneity(
        a in proptest::collection::vec(-100.0f64..100.0, 4),
        b in proptest::collection::vec(-100.0f64..100.0, 4),
        p in 1.0f64..6.0,
        c in -10.0f64..10.0,
    ) {
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let na = holder_norm(&a, p).unwrap();
        let nb = holder_norm(&b, p).unwrap();
        let ns = holder_norm(&sum, p).unwrap();
        prop_assert!(ns <= na + nb + 1e-9);
        let scaled: Vec<f64> = a.iter().map(|x| c * x).collect();
        prop_assert!((holder_norm(&scaled, p).unwrap() - c.abs() * na).abs() <= 1e-9 * (1.0 + na));
    }

    #[test]
    fn svd_reconstruction_property(seed in 0u64..500) {
        let m = random_matrix(5, 4, seed);
        let f = svd(&m, None).unwrap();
        prop_assert!(f.reconstruct().unwrap().max_abs_diff(&m).unwrap() < 1e-11);
    }
}

// ---------------------------------------------------------------------------
// Two-way sign flip
// ---------------------------------------------------------------------------

/// Positive rank-2 factors: the flipped leading singular vectors must
/// correlate positively with the generating factors.
#[test]
fn sign_flip_recovers_positive_orientation() {
    let mut rng = ChaCha12Rng::seed_from_u64(99);
    let c = Matrix::from_fn(10, 2, |_, _| rng.random_range(0.1..1.0));
    let a = Matrix::from_fn(6, 2, |_, _| rng.random_range(0.1..1.0));
    let d = c.matmul(&a.transpose()).unwrap();
    let f = svd(&d, Some(2)).unwrap();
    // Deliberately flip both factors to the "wrong" orientation.
    let scores = Matrix::from_fn(10, 2, |i, j| -f.scores()[(i, j)]);
    let loadings = Matrix::from_fn(6, 2, |i, j| -f.vt.transpose()[(i, j)]);
    let fixed = sign_flip(&scores, &loadings, &d).unwrap();
    // Model is preserved (flips act on score/loading pairs).
    let model = fixed.scores.matmul(&fixed.loadings.transpose()).unwrap();
    let before = scores.matmul(&loadings.transpose()).unwrap();
    assert!(model.max_abs_diff(&before).unwrap() < 1e-10);
    // First factor ends up positively oriented (Perron direction).
    let col = fixed.scores.col(0);
    assert!(col.iter().sum::<f64>() > 0.0);
    assert!(fixed.signs.iter().all(|s| *s == 1.0 || s.abs() == 1.0));
    assert_eq!(fixed.s_values.rows(), 2);
}

#[test]
fn sign_flip_is_idempotent() {
    let d = random_matrix(8, 5, 17);
    let f = svd(&d, Some(3)).unwrap();
    let loadings = f.vt.transpose();
    let once = sign_flip(&f.scores(), &loadings, &d).unwrap();
    let twice = sign_flip(&once.scores, &once.loadings, &d).unwrap();
    assert_eq!(once.scores.max_abs_diff(&twice.scores).unwrap(), 0.0);
    assert!(twice.signs.iter().all(|&s| s == 1.0));
}

/// Brute-force oracle: among all sign assignments that keep the model
/// fixed, the flipped result must not have a worse total signed-squared
/// projection than any alternative.
#[test]
fn sign_flip_matches_brute_force_objective() {
    for seed in 0..5u64 {
        let d = random_matrix(7, 5, 300 + seed);
        let f = svd(&d, Some(2)).unwrap();
        let loadings = f.vt.transpose();
        let fixed = sign_flip(&f.scores(), &loadings, &d).unwrap();
        let objective = |scores: &Matrix, loadings: &Matrix| -> f64 {
            // Sum over factors of S-value of the chosen orientation in
            // both modes, recomputed independently.
            let mut total = 0.0;
            for fac in 0..2 {
                let other = 1 - fac;
                let mut resid = d.clone();
                for i in 0..d.rows() {
                    for j in 0..d.cols() {
                        resid[(i, j)] -= scores[(i, other)] * loadings[(j, other)];
                    }
                }
                let sc = scores.col(fac);
                let ld = loadings.col(fac);
                let nsc: f64 = sc.iter().map(|v| v * v).sum();
                let nld: f64 = ld.iter().map(|v| v * v).sum();
                for j in 0..d.cols() {
                    let p: f64 = (0..d.rows()).map(|i| sc[i] / nsc * resid[(i, j)]).sum();
                    total += p.signum() * p * p;
                }
                for i in 0..d.rows() {
                    let p: f64 = (0..d.cols()).map(|j| ld[j] / nld * resid[(i, j)]).sum();
                    total += p.signum() * p * p;
                }
            }
            total
        };
        let chosen = objective(&fixed.scores, &fixed.loadings);
        // Try all four pairwise sign assignments.
        for s0 in [1.0, -1.0] {
            for s1 in [1.0, -1.0] {
                let alt_s = Matrix::from_fn(7, 2, |i, j| {
                    f.scores()[(i, j)] * if j == 0 { s0 } else { s1 }
                });
                let alt_l = Matrix::from_fn(5, 2, |i, j| {
                    loadings[(i, j)] * if j == 0 { s0 } else { s1 }
                });
                assert!(chosen >= objective(&alt_s, &alt_l) - 1e-9);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// CSV round-trips
// ---------------------------------------------------------------------------

#[test]
fn csv_round_trip_is_lossless() {
    let m = random_matrix(5, 3, 55).map(|v| v * 1e-7);
    let text = m.to_csv_string(None).unwrap();
    let (back, header) = Matrix::from_csv_str(&text, false).unwrap();
    assert!(header.is_none());
    assert_eq!(back.max_abs_diff(&m).unwrap(), 0.0);
}

#[test]
fn csv_header_round_trip() {
    let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
    let header = vec!["a".to_string(), "b".to_string()];
    let text = m.to_csv_string(Some(&header)).unwrap();
    let (back, h) = Matrix::from_csv_str(&text, true).unwrap();
    assert_eq!(h.unwrap(), header);
    assert_eq!(back.max_abs_diff(&m).unwrap(), 0.0);
}

#[test]
fn csv_parse_errors_carry_line_numbers() {
    let bad = "1.0,2.0\n3.0,oops\n";
    match Matrix::from_csv_str(bad, false) {
        Err(curveres::Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("expected parse error, got {other:?}"),
    }
    let ragged = "1.0,2.0\n3.0\n";
    match Matrix::from_csv_str(ragged, false) {
        Err(curveres::Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn csv_file_round_trip() {
    let dir = std::env::temp_dir().join("curveres-matcore-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("m.csv");
    let m = random_matrix(4, 4, 77);
    m.write_csv(&path, None).unwrap();
    let (back, _) = Matrix::read_csv(&path, false).unwrap();
    assert_eq!(back.max_abs_diff(&m).unwrap(), 0.0);
}

// ---------------------------------------------------------------------------
// Matrix basics
// ---------------------------------------------------------------------------

#[test]
fn constructors_reject_non_finite_and_mismatched_data() {
    assert!(Matrix::new(2, 2, vec![1.0, 2.0, 3.0]).is_err());
    assert!(Matrix::new(2, 2, vec![1.0, f64::NAN, 3.0, 4.0]).is_err());
    assert!(Matrix::new(0, 2, vec![]).is_err());
}

#[test]
fn solve_matches_known_inverse() {
    let a = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
    let x = a.solve(&[5.0, 10.0]).unwrap();
    assert_relative_eq!(x[0], 1.0, max_relative = 1e-12);
    assert_relative_eq!(x[1], 3.0, max_relative = 1e-12);
    let singular = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
    assert!(singular.solve(&[1.0, 2.0]).is_err());
}

#[test]
fn stacking_and_selection() {
    let a = Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
    let b = Matrix::from_rows(&[vec![3.0, 4.0]]).unwrap();
    let v = Matrix::vstack(&[&a, &b]).unwrap();
    assert_eq!(v.rows(), 2);
    assert_eq!(v[(1, 1)], 4.0);
    let h = Matrix::hstack(&[&a, &b]).unwrap();
    assert_eq!(h.cols(), 4);
    let sel = v.select_cols(&[1]).unwrap();
    assert_eq!(sel.col(0), vec![2.0, 4.0]);
}
