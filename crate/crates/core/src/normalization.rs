//! External and internal normalization of bilinear data, plus the iterative
//! "first scores vector to one" (fsvt1n) external algorithm.
//!
//! External normalization rescales the data rows before factorization;
//! internal normalization rescales the abstract scores afterwards. Row-sum
//! (ℓ1 on nonnegative data) normalization has both forms. The fsvt1n
//! external iteration tries to force the first score column to the constant
//! one vector by repeated row rescaling; it does not always converge, and
//! the divergent runs settle into a period-2 alternation that this module
//! detects and reports.

use crate::matcore::{self, Matrix};
use crate::{Error, Result};

/// Which row divisor `normalize_rows_sum` uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumMode {
    /// Divide by the plain row sum (= ℓ1 norm on nonnegative rows).
    PlainSum,
    /// Divide by the sum of absolute values (true ℓ1 norm).
    AbsSum,
}

/// Magnitude below which a row divisor counts as zero.
const DIVISOR_FLOOR: f64 = 1e-300;

fn scale_rows_by(m: &Matrix, divisors: impl Fn(&[f64]) -> f64) -> Result<Matrix> {
    let mut out = m.clone();
    for i in 0..m.rows() {
        let d = divisors(m.row(i));
        if d.abs() <= DIVISOR_FLOOR {
            return Err(Error::ZeroDivisor { row: i, value: d });
        }
        for v in out.row_mut(i) {
            *v /= d;
        }
    }
    Ok(out)
}

/// External row normalization: each data row divided by its (plain or
/// absolute) sum. On nonnegative data with `PlainSum` the output rows sum
/// to one.
pub fn normalize_rows_sum(m: &Matrix, mode: SumMode) -> Result<Matrix> {
    scale_rows_by(m, |row| match mode {
        SumMode::PlainSum => row.iter().sum(),
        SumMode::AbsSum => row.iter().map(|v| v.abs()).sum(),
    })
}

/// Internal pair of the row-sum normalization: rescale each score row by
/// its sum so the scores land on the unit-sum hyperplane.
pub fn internal_normalize_sum(scores: &Matrix) -> Result<Matrix> {
    scale_rows_by(scores, |row| row.iter().sum())
}

/// Internal normalization dividing each score row by its first entry; the
/// first column becomes exactly one. A zero first entry is the known
/// failure mode of this transformation and is reported with its row.
pub fn fsvt1n_internal(scores: &Matrix) -> Result<Matrix> {
    scale_rows_by(scores, |row| row[0])
}

/// Outcome of the iterative fsvt1n external normalization.
#[derive(Clone, Debug)]
pub struct Fsvt1nResult {
    /// Scores U·Σ of the truncated SVD at the final iteration.
    pub scores: Matrix,
    /// Right singular vectors (cols x rank) at the final iteration.
    pub loadings: Matrix,
    pub iterations: usize,
    pub converged: bool,
    pub cycle_detected: bool,
    pub cycle_period: Option<usize>,
    /// max |X[:,1] − 1| at the final iteration.
    pub residual: f64,
    /// The two alternating accumulation iterates (consecutive X matrices)
    /// when a period-2 cycle was detected.
    pub cycle_iterates: Option<(Matrix, Matrix)>,
}

/// Iterative external normalization forcing the first score column to one.
///
/// Each pass takes the truncated SVD of the working matrix, fixes the sign
/// of the first singular pair (flip when the largest entry of u₁ is not
/// positive), divides every row i of the working matrix by (R·v₁)[i], and
/// reads off the scores X = U·Σ. Convergence means max|X[:,1] − 1| ≤ eps.
///
/// Divergent runs alternate between two accumulation points; this is
/// detected by comparing X with the iterate two passes earlier. Detection
/// does not stop the loop — the full `max_iter` passes run so the
/// alternation history stays inspectable.
pub fn fsvt1n_external(
    r: &Matrix,
    rank: usize,
    eps: f64,
    max_iter: usize,
) -> Result<Fsvt1nResult> {
    if rank == 0 || rank > r.rows().min(r.cols()) {
        return Err(Error::InvalidInput(format!(
            "rank {rank} out of range for a {}x{} matrix",
            r.rows(),
            r.cols()
        )));
    }
    if r.max_abs() == 0.0 {
        return Err(Error::InvalidInput("input matrix is zero".into()));
    }

    let mut work = r.clone();
    let mut prev: Option<Matrix> = None; // X one pass ago
    let mut prev2: Option<Matrix> = None; // X two passes ago
    let mut x = Matrix::zeros(r.rows(), rank);
    let mut loadings = Matrix::zeros(r.cols(), rank);
    let mut iterations = 0;
    let mut converged = false;
    let mut cycle_detected = false;
    let mut cycle_iterates = None;
    let mut residual = f64::INFINITY;

    while iterations < max_iter {
        let svd = matcore::svd(&work, Some(rank))?;
        let mut u = svd.u;
        let mut vt = svd.vt;
        // The deterministic SVD already orients each pair, but guard the
        // documented condition anyway: the first left vector must have a
        // positive maximum entry.
        if (0..u.rows()).map(|i| u[(i, 0)]).fold(f64::NEG_INFINITY, f64::max) <= 0.0 {
            for i in 0..u.rows() {
                u[(i, 0)] = -u[(i, 0)];
            }
            for j in 0..vt.cols() {
                vt[(0, j)] = -vt[(0, j)];
            }
        }
        let v1: Vec<f64> = (0..vt.cols()).map(|j| vt[(0, j)]).collect();
        let rv = work.matvec(&v1)?;
        for (i, &d) in rv.iter().enumerate() {
            if d.abs() <= DIVISOR_FLOOR {
                return Err(Error::ZeroDivisor { row: i, value: d });
            }
        }
        for i in 0..work.rows() {
            for v in work.row_mut(i) {
                *v /= rv[i];
            }
        }
        x = Matrix::from_fn(u.rows(), rank, |i, j| u[(i, j)] * svd.s[j]);
        loadings = vt.transpose();
        iterations += 1;

        residual = (0..x.rows()).map(|i| (x[(i, 0)] - 1.0).abs()).fold(0.0, f64::max);
        if residual <= eps {
            converged = true;
            // A convergent approach can brush the two-steps-back comparison
            // on its way in; a converged run is by definition not cycling.
            cycle_detected = false;
            cycle_iterates = None;
            break;
        }
        if !cycle_detected {
            if let (Some(p2), Some(p1)) = (&prev2, &prev) {
                if x.max_abs_diff(p2)? <= eps && x.max_abs_diff(p1)? > eps {
                    cycle_detected = true;
                    cycle_iterates = Some((p1.clone(), x.clone()));
                }
            }
        }
        prev2 = prev.take();
        prev = Some(x.clone());
    }

    Ok(Fsvt1nResult {
        scores: x,
        loadings,
        iterations,
        converged,
        cycle_detected,
        cycle_period: if cycle_detected { Some(2) } else { None },
        residual,
        cycle_iterates,
    })
}

/// Row-sum statistics of a concentration (or data) matrix: how far the
/// rows are from closure.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct ClosureStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Sample standard deviation (n − 1 divisor); 0 for a single row.
    pub std: f64,
    /// Set when the matrix has a single row and std is 0 by convention.
    pub degenerate: bool,
}

pub fn closure_stats(c: &Matrix) -> Result<ClosureStats> {
    if c.rows() == 0 || c.cols() == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    let sums: Vec<f64> = (0..c.rows()).map(|i| c.row(i).iter().sum()).collect();
    let n = sums.len();
    let mean = sums.iter().sum::<f64>() / n as f64;
    let (min, max) = sums
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let std = if n > 1 {
        (sums.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(ClosureStats { min, max, mean, std, degenerate: n == 1 })
}

/// Small worked examples used in docs and tests.
pub mod presets {
    use crate::matcore::Matrix;

    /// The 3x3 source-apportionment-style matrix whose fsvt1n external
    /// iteration famously alternates between two accumulation points.
    pub fn alternating_matrix() -> Matrix {
        Matrix::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![2.0, 3.0, 4.0],
            vec![5.0, 6.0, 7.0],
        ])
        .expect("static preset")
    }

    /// Defaults matching the reference implementation's constants.
    pub const DEFAULT_EPS: f64 = 1e-15;
    pub const DEFAULT_MAX_ITER: usize = 100;
}
