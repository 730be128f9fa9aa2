use approx::assert_relative_eq;
use curveres::matcore::{self, Matrix};
use curveres::scf::{
    feasible_region_2comp, norm_identity_check, presets, scf_boundary_study, scf_value,
    AbstractSpace, TwoComponentRegion, DEFAULT_GRID_N,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn random_orthonormal(n: usize, k: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let m = Matrix::from_fn(n, k, |_, _| rng.random_range(-1.0..1.0));
    matcore::svd(&m, Some(k)).unwrap().u
}

/// Abstract coordinate ratio of a spectrum: the alpha/beta value at which
/// the line v1 + t*v2 passes through it (after scaling).
fn coordinate_ratio(space: &AbstractSpace, spectrum: &[f64]) -> f64 {
    let v1: f64 = (0..spectrum.len()).map(|i| space.v[(i, 0)] * spectrum[i]).sum();
    let v2: f64 = (0..spectrum.len()).map(|i| space.v[(i, 1)] * spectrum[i]).sum();
    v2 / v1
}

#[test]
fn rank_one_data_contributes_everything() {
    let c = [1.0, 2.0, 0.5];
    let s = [0.3, 0.7, 0.2, 0.9];
    let d = Matrix::from_fn(3, 4, |i, j| c[i] * s[j]);
    let val = scf_value(&c, &s, d.frobenius_norm().powi(2));
    assert_relative_eq!(val, 1.0, max_relative = 1e-14);
    assert_eq!(scf_value(&[0.0, 0.0, 0.0], &s, 1.0), 0.0);
}

#[test]
fn scf_matches_entrywise_frobenius_oracle() {
    let mut rng = ChaCha12Rng::seed_from_u64(3);
    for _ in 0..20 {
        let c: Vec<f64> = (0..7).map(|_| rng.random_range(-2.0..2.0)).collect();
        let s: Vec<f64> = (0..9).map(|_| rng.random_range(-2.0..2.0)).collect();
        let layer = Matrix::from_fn(7, 9, |i, j| c[i] * s[j]);
        let d_fro2 = 5.3;
        let oracle = layer.frobenius_norm().powi(2) / d_fro2;
        assert_relative_eq!(scf_value(&c, &s, d_fro2), oracle, max_relative = 1e-12);
    }
}

#[test]
fn scf_invariant_under_compensating_rescaling() {
    let c = [1.0, -2.0, 0.5];
    let s = [0.3, 0.7, 0.2];
    let base = scf_value(&c, &s, 2.0);
    for gamma in [0.1, -3.0, 7.5] {
        let cg: Vec<f64> = c.iter().map(|v| v * gamma).collect();
        let sg: Vec<f64> = s.iter().map(|v| v / gamma).collect();
        assert_relative_eq!(scf_value(&cg, &sg, 2.0), base, max_relative = 1e-12);
    }
}

#[test]
fn basis_vector_norms_are_one() {
    let u = Matrix::identity(4);
    let (a, b) = norm_identity_check(&u, &[1.0, 0.0, 0.0, 0.0]).unwrap();
    assert_eq!((a, b), (1.0, 1.0));
}

#[test]
fn coordinate_norms_agree_for_random_orthonormal_bases() {
    let mut rng = ChaCha12Rng::seed_from_u64(8);
    for trial in 0..50 {
        let u = random_orthonormal(12, 4, trial);
        let y: Vec<f64> = (0..4).map(|_| rng.random_range(-3.0..3.0)).collect();
        let (full, coord) = norm_identity_check(&u, &y).unwrap();
        assert!((full - coord).abs() <= 1e-12 * coord.max(1e-300), "trial {trial}");
    }
}

#[test]
fn scaled_basis_is_rejected_with_the_deviation() {
    let u = Matrix::identity(3).scale(2.0);
    let err = norm_identity_check(&u, &[1.0, 0.0, 0.0]).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("orthonormal"), "message: {msg}");
    assert!(msg.contains('3'), "deviation 3 = |4 - 1| should be reported: {msg}");
}

#[test]
fn regions_contain_the_generating_factors() {
    for (name, (c, a, d)) in
        [("chromatographic", presets::chromatographic()), ("kinetic", presets::kinetic())]
    {
        let region = feasible_region_2comp(&d).unwrap();
        let space = AbstractSpace::from_data(&d, 2).unwrap();
        let mut ratios = [coordinate_ratio(&space, &a.col(0)), coordinate_ratio(&space, &a.col(1))];
        ratios.sort_by(f64::total_cmp);
        let [lo, hi] = ratios;
        assert!(
            region.alpha.0 <= lo + 1e-10 && lo <= region.alpha.1 + 1e-10,
            "{name}: true lower ratio {lo} outside alpha {:?}",
            region.alpha
        );
        assert!(
            region.beta.0 - 1e-10 <= hi && hi <= region.beta.1 + 1e-10,
            "{name}: true upper ratio {hi} outside beta {:?}",
            region.beta
        );
        assert!(region.alpha.1 < region.beta.0, "{name}: intervals must be disjoint");
        let _ = c;
    }
}

#[test]
fn pure_concentration_rows_pin_the_inner_endpoints() {
    // Rows where only one component is present force the data-point ratio
    // bounds to coincide with that component's own coordinate ratio.
    let (_, a, _) = presets::chromatographic();
    let c = Matrix::from_rows(&[
        vec![1.0, 0.0],
        vec![0.0, 1.0],
        vec![0.6, 0.4],
        vec![0.3, 0.7],
        vec![0.8, 0.1],
    ])
    .unwrap();
    let d = c.matmul(&a.transpose()).unwrap();
    let region = feasible_region_2comp(&d).unwrap();
    let space = AbstractSpace::from_data(&d, 2).unwrap();
    let mut pure = [coordinate_ratio(&space, &a.col(0)), coordinate_ratio(&space, &a.col(1))];
    pure.sort_by(f64::total_cmp);
    assert!((region.alpha.1 - pure[0]).abs() < 1e-10);
    assert!((region.beta.0 - pure[1]).abs() < 1e-10);
}

#[test]
fn higher_rank_data_rejected() {
    let mut rng = ChaCha12Rng::seed_from_u64(14);
    let d = Matrix::from_fn(10, 8, |_, _| rng.random_range(0.1..1.0));
    let err = feasible_region_2comp(&d).unwrap_err();
    assert!(err.to_string().contains("rank"));
}

#[test]
fn zero_lines_rejected_with_cleaning_advice() {
    let (_, _, mut d) = presets::chromatographic();
    for j in 0..d.cols() {
        d[(5, j)] = 0.0;
    }
    let msg = feasible_region_2comp(&d).unwrap_err().to_string();
    assert!(msg.contains("delete zero rows"), "message: {msg}");
}

#[test]
fn negative_data_rejected() {
    let (_, _, mut d) = presets::chromatographic();
    d[(0, 0)] = -0.5;
    assert!(feasible_region_2comp(&d).is_err());
}

#[test]
fn extrema_sit_on_the_boundary_for_both_presets() {
    for (name, (_, _, d)) in
        [("chromatographic", presets::chromatographic()), ("kinetic", presets::kinetic())]
    {
        let region = feasible_region_2comp(&d).unwrap();
        let study = scf_boundary_study(&d, &region, DEFAULT_GRID_N).unwrap();
        assert!(study.extrema_on_boundary, "{name}: argmax {:?} argmin {:?}", study.argmax, study.argmin);
        assert!(study.skipped.is_empty(), "{name}: disjoint intervals cannot collide");
        assert!(study.max > study.min);
        assert!(study.max <= 1.0 + 1e-9, "{name}: single-layer weight cannot exceed the total");
    }
}

#[test]
fn collapsed_region_is_a_single_repeated_value() {
    let (_, _, d) = presets::kinetic();
    let region = feasible_region_2comp(&d).unwrap();
    let point = TwoComponentRegion {
        alpha: (region.alpha.0, region.alpha.0),
        beta: (region.beta.1, region.beta.1),
    };
    let study = scf_boundary_study(&d, &point, 16).unwrap();
    assert!(study.extrema_on_boundary);
    assert!((study.max - study.min).abs() < 1e-13);
}

#[test]
fn overlapping_intervals_skip_singular_cells() {
    let (_, _, d) = presets::kinetic();
    let region = TwoComponentRegion { alpha: (-0.5, 0.5), beta: (0.0, 1.0) };
    let study = scf_boundary_study(&d, &region, 21).unwrap();
    assert!(!study.skipped.is_empty());
    for &(i, j) in &study.skipped {
        assert!((study.alphas[i] - study.betas[j]).abs() < 1e-14);
    }
}

#[test]
fn tiny_grids_rejected() {
    let (_, _, d) = presets::kinetic();
    let region = feasible_region_2comp(&d).unwrap();
    assert!(scf_boundary_study(&d, &region, 15).is_err());
    assert!(scf_boundary_study(&d, &region, 16).is_ok());
}

#[test]
fn refinement_keeps_the_extrema_in_place() {
    let (_, _, d) = presets::chromatographic();
    let region = feasible_region_2comp(&d).unwrap();
    let coarse_n = 51;
    let coarse = scf_boundary_study(&d, &region, coarse_n).unwrap();
    let fine = scf_boundary_study(&d, &region, 4 * coarse_n).unwrap();
    let cell_a = (region.alpha.1 - region.alpha.0) / (coarse_n - 1) as f64;
    let cell_b = (region.beta.1 - region.beta.0) / (coarse_n - 1) as f64;
    for (c_idx, f_idx) in [(coarse.argmax, fine.argmax), (coarse.argmin, fine.argmin)] {
        let da = (coarse.alphas[c_idx.0] - fine.alphas[f_idx.0]).abs();
        let db = (coarse.betas[c_idx.1] - fine.betas[f_idx.1]).abs();
        assert!(da <= 2.0 * cell_a, "alpha moved {da} > two cells {cell_a}");
        assert!(db <= 2.0 * cell_b, "beta moved {db} > two cells {cell_b}");
    }
}

#[test]
fn component_contributions_do_not_sum_to_one() {
    // The cross term of non-orthogonal factors means the two rank-1
    // weights cannot partition the total signal.
    for (c, a, d) in [presets::chromatographic(), presets::kinetic()] {
        let d_fro2 = d.frobenius_norm().powi(2);
        let sum = scf_value(&c.col(0), &a.col(0), d_fro2)
            + scf_value(&c.col(1), &a.col(1), d_fro2);
        assert!((sum - 1.0).abs() > 0.01, "sum of contributions {sum}");
    }
}

#[test]
fn slices_have_no_interior_local_maximum() {
    for (_, _, d) in [presets::chromatographic(), presets::kinetic()] {
        let region = feasible_region_2comp(&d).unwrap();
        let study = scf_boundary_study(&d, &region, 101).unwrap();
        // Fixed beta, sweep alpha: monotone or single-troughed, never an
        // interior peak.
        for j in [0, 50, 100] {
            for i in 1..100 {
                let (prev, here, next) =
                    (study.values[(i - 1, j)], study.values[(i, j)], study.values[(i + 1, j)]);
                assert!(
                    here <= prev.max(next) + 1e-12,
                    "interior local max at alpha index {i}, beta index {j}"
                );
            }
        }
    }
}
