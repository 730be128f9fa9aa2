//! Dense linear-algebra substrate: matrices, SVD with a deterministic sign
//! convention, least squares, Hölder norms, rank/scree diagnostics, the
//! two-way factor sign-flip correction, and CSV round-tripping.

use crate::{Error, Result};
use nalgebra::DMatrix;
use std::fmt;
use std::io::Write;
use std::path::Path;

/// Dense real matrix, row-major storage. All entries are finite on
/// construction; operations that could introduce non-finite values return
/// errors instead.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

// Serialized as a list of rows so matrices stay readable in JSON.
impl serde::Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = ser.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            seq.serialize_element(self.row(i))?;
        }
        seq.end()
    }
}

impl<'de> serde::Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(de)?;
        Matrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite entry {} at flat index {i}",
                data[i]
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidInput("no rows given".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Column vector from a slice.
    pub fn column(v: &[f64]) -> Result<Self> {
        Self::new(v.len(), 1, v.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::InvalidInput(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Matrix–vector product.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::InvalidInput(format!(
                "matvec length {} vs {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::InvalidInput("shape mismatch in subtraction".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self::new(self.rows, self.cols, data)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::InvalidInput("shape mismatch in addition".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self::new(self.rows, self.cols, data)
    }

    pub fn scale(&self, c: f64) -> Self {
        let data = self.data.iter().map(|v| v * c).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        let data = self.data.iter().map(|&v| f(v)).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    /// Stack matrices on top of each other (shared column count).
    pub fn vstack(mats: &[&Matrix]) -> Result<Self> {
        if mats.is_empty() {
            return Err(Error::InvalidInput("nothing to stack".into()));
        }
        let cols = mats[0].cols;
        if mats.iter().any(|m| m.cols != cols) {
            return Err(Error::InvalidInput("column count mismatch in vstack".into()));
        }
        let rows = mats.iter().map(|m| m.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for m in mats {
            data.extend_from_slice(&m.data);
        }
        Self::new(rows, cols, data)
    }

    pub fn hstack(mats: &[&Matrix]) -> Result<Self> {
        if mats.is_empty() {
            return Err(Error::InvalidInput("nothing to stack".into()));
        }
        let rows = mats[0].rows;
        if mats.iter().any(|m| m.rows != rows) {
            return Err(Error::InvalidInput("row count mismatch in hstack".into()));
        }
        let cols = mats.iter().map(|m| m.cols).sum();
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            let mut j0 = 0;
            for m in mats {
                out.row_mut(i)[j0..j0 + m.cols].copy_from_slice(m.row(i));
                j0 += m.cols;
            }
        }
        Ok(out)
    }

    pub fn select_cols(&self, idx: &[usize]) -> Result<Self> {
        if idx.iter().any(|&j| j >= self.cols) {
            return Err(Error::InvalidInput("column index out of range".into()));
        }
        Ok(Self::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])]))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    /// Solve the square system `self * x = b` by Gaussian elimination with
    /// partial pivoting. Intended for small well-scaled systems; use
    /// [`least_squares`] for anything rectangular or ill-conditioned.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if self.rows != self.cols {
            return Err(Error::InvalidInput("solve requires a square matrix".into()));
        }
        if b.len() != self.rows {
            return Err(Error::InvalidInput("rhs length mismatch".into()));
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        for k in 0..n {
            let piv = (k..n)
                .max_by(|&p, &q| a[p * n + k].abs().total_cmp(&a[q * n + k].abs()))
                .unwrap();
            if a[piv * n + k] == 0.0 {
                return Err(Error::Domain("singular matrix in solve".into()));
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                x.swap(k, piv);
            }
            for i in k + 1..n {
                let f = a[i * n + k] / a[k * n + k];
                if f == 0.0 {
                    continue;
                }
                for j in k..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
                x[i] -= f * x[k];
            }
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| a[i * n + j] * x[j]).sum();
            x[i] = (x[i] - s) / a[i * n + i];
        }
        Ok(x)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        if self.rows > 8 {
            writeln!(f, "  ...")?;
        }
        write!(f, "]")
    }
}

// ---------------------------------------------------------------------------
// CSV I/O
// ---------------------------------------------------------------------------

/// 17 significant digits: enough for a lossless f64 round-trip.
fn fmt_entry(v: f64) -> String {
    format!("{v:.16e}")
}

impl Matrix {
    /// Serialize as comma-separated values at 17 significant digits.
    pub fn to_csv_string(&self, header: Option<&[String]>) -> Result<String> {
        let mut out = String::new();
        if let Some(names) = header {
            if names.len() != self.cols {
                return Err(Error::InvalidInput(format!(
                    "header has {} names for {} columns",
                    names.len(),
                    self.cols
                )));
            }
            out.push_str(&names.join(","));
            out.push('\n');
        }
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|&v| fmt_entry(v)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        Ok(out)
    }

    /// Parse comma-separated values; `has_header` consumes (and returns) a
    /// single leading header row.
    pub fn from_csv_str(text: &str, has_header: bool) -> Result<(Self, Option<Vec<String>>)> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let header = if has_header {
            match lines.next() {
                Some((_, l)) => Some(l.split(',').map(|s| s.trim().to_string()).collect()),
                None => {
                    return Err(Error::Parse { line: 1, message: "empty input".into() })
                }
            }
        } else {
            None
        };
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in lines {
            let mut row = Vec::new();
            for field in line.split(',') {
                let v: f64 = field.trim().parse().map_err(|e| Error::Parse {
                    line: lineno + 1,
                    message: format!("bad number {field:?}: {e}"),
                })?;
                row.push(v);
            }
            if let Some(first) = rows.first() {
                if row.len() != first.len() {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        message: format!(
                            "row has {} fields, expected {}",
                            row.len(),
                            first.len()
                        ),
                    });
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse { line: 1, message: "no data rows".into() });
        }
        let m = Self::from_rows(&rows)?;
        Ok((m, header))
    }

    pub fn write_csv(&self, path: impl AsRef<Path>, header: Option<&[String]>) -> Result<()> {
        let text = self.to_csv_string(header)?;
        let mut f = std::fs::File::create(path)?;
        f.write_all(text.as_bytes())?;
        Ok(())
    }

    pub fn read_csv(
        path: impl AsRef<Path>,
        has_header: bool,
    ) -> Result<(Self, Option<Vec<String>>)> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv_str(&text, has_header)
    }
}

// ---------------------------------------------------------------------------
// SVD
// ---------------------------------------------------------------------------

/// Thin SVD with singular values sorted descending and a deterministic sign
/// convention: the largest-magnitude entry of each left singular vector is
/// positive (ties broken by lowest row index).
#[derive(Clone, Debug)]
pub struct SvdResult {
    /// m x k left singular vectors.
    pub u: Matrix,
    /// Singular values, non-increasing.
    pub s: Vec<f64>,
    /// k x n right singular vectors, transposed.
    pub vt: Matrix,
    /// Retained rank.
    pub k: usize,
}

impl SvdResult {
    /// Reassemble `u * diag(s) * vt`.
    pub fn reconstruct(&self) -> Result<Matrix> {
        let mut us = self.u.clone();
        for i in 0..us.rows() {
            for j in 0..self.k {
                us[(i, j)] *= self.s[j];
            }
        }
        us.matmul(&self.vt)
    }

    /// Scores `u * diag(s)`.
    pub fn scores(&self) -> Matrix {
        let mut x = self.u.clone();
        for i in 0..x.rows() {
            for j in 0..self.k {
                x[(i, j)] *= self.s[j];
            }
        }
        x
    }
}

/// Thin SVD of `m`, optionally truncated to the leading `k` triplets.
pub fn svd(m: &Matrix, k: Option<usize>) -> Result<SvdResult> {
    let full = m.rows().min(m.cols());
    let k = k.unwrap_or(full);
    if k == 0 || k > full {
        return Err(Error::InvalidInput(format!(
            "truncation rank {k} out of range 1..={full}"
        )));
    }
    let dec = m.to_nalgebra().svd(true, true);
    let nu = dec.u.as_ref().expect("svd requested u");
    let nvt = dec.v_t.as_ref().expect("svd requested v_t");
    // Defensive: sort triplets by descending singular value regardless of
    // what the backend guarantees.
    let mut order: Vec<usize> = (0..full).collect();
    order.sort_by(|&a, &b| dec.singular_values[b].total_cmp(&dec.singular_values[a]));

    let mut u = Matrix::zeros(m.rows(), k);
    let mut vt = Matrix::zeros(k, m.cols());
    let mut s = Vec::with_capacity(k);
    for (out_j, &src_j) in order.iter().take(k).enumerate() {
        s.push(dec.singular_values[src_j]);
        // Sign convention on the left vector, mirrored on the right.
        let mut arg = 0;
        for i in 0..m.rows() {
            if nu[(i, src_j)].abs() > nu[(arg, src_j)].abs() {
                arg = i;
            }
        }
        let flip = if nu[(arg, src_j)] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..m.rows() {
            u[(i, out_j)] = flip * nu[(i, src_j)];
        }
        for j in 0..m.cols() {
            vt[(out_j, j)] = flip * nvt[(src_j, j)];
        }
    }
    Ok(SvdResult { u, s, vt, k })
}

/// Singular values only (descending).
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    let mut s: Vec<f64> = m.to_nalgebra().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

// ---------------------------------------------------------------------------
// Least squares
// ---------------------------------------------------------------------------

/// Result of a least-squares solve, with a numerical-rank diagnosis of the
/// coefficient matrix.
#[derive(Clone, Debug)]
pub struct LeastSquares {
    /// Minimizer of ||a*x - b||_F (minimum-norm one if `a` is rank deficient).
    pub solution: Matrix,
    /// Numerical rank of `a` at the truncation tolerance used.
    pub rank: usize,
    /// Set when singular values of `a` were truncated (pseudo-inverse
    /// semantics engaged); downstream estimates are then non-unique.
    pub rank_deficient: bool,
}

/// Machine-epsilon-scaled relative tolerance used for numerical rank
/// decisions throughout: `max(rows, cols) * eps`.
pub fn default_rel_tolerance(rows: usize, cols: usize) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON
}

/// Minimize ||a*x - b||_F via SVD with singular-value truncation at the
/// default relative tolerance; rank-deficient systems get the minimum-norm
/// solution and a warning flag.
pub fn least_squares(a: &Matrix, b: &Matrix) -> Result<LeastSquares> {
    if a.rows() != b.rows() {
        return Err(Error::InvalidInput(format!(
            "least_squares: {} rows vs {} rows",
            a.rows(),
            b.rows()
        )));
    }
    let dec = svd(a, None)?;
    let tol = default_rel_tolerance(a.rows(), a.cols()) * dec.s.first().copied().unwrap_or(0.0);
    let rank = dec.s.iter().take_while(|&&sv| sv > tol).count();
    // x = V * Sr^-1 * U^T * b, using only the leading `rank` triplets.
    let utb = dec.u.transpose().matmul(b)?;
    let mut scaled = Matrix::zeros(dec.k, b.cols());
    for r in 0..rank {
        for j in 0..b.cols() {
            scaled[(r, j)] = utb[(r, j)] / dec.s[r];
        }
    }
    let solution = dec.vt.transpose().matmul(&scaled)?;
    Ok(LeastSquares { solution, rank, rank_deficient: rank < a.rows().min(a.cols()) })
}

// ---------------------------------------------------------------------------
// Hölder norms
// ---------------------------------------------------------------------------

/// (sum |v_i|^p)^(1/p); `p = f64::INFINITY` gives the sup norm.
pub fn holder_norm(v: &[f64], p: f64) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::InvalidInput("empty vector".into()));
    }
    if p.is_nan() || p < 1.0 {
        return Err(Error::Domain(format!("norm exponent must be >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(v.iter().fold(0.0, |m, x| m.max(x.abs())));
    }
    // Scale out the largest magnitude so big exponents cannot overflow.
    let m = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if m == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = v.iter().map(|x| (x.abs() / m).powf(p)).sum();
    Ok(m * sum.powf(1.0 / p))
}

// ---------------------------------------------------------------------------
// Rank / scree diagnostics
// ---------------------------------------------------------------------------

/// Numerical-rank report for a list of singular values.
#[derive(Clone, Debug, serde::Serialize)]
pub struct RankReport {
    pub singular_values: Vec<f64>,
    /// 0-based index of the first value after the largest successive gap of
    /// log10(sigma + 1e-300) — where the scree "levels off".
    pub elbow_index: usize,
    /// Count of singular values above `rel_tolerance * sigma_1`.
    pub estimated_rank: usize,
    /// sigma_1 / sigma_rank (infinite when the rank is zero).
    pub condition_number: f64,
    pub rel_tolerance: f64,
}

/// Floor added before taking log10 so exact zeros do not blow up the gaps.
const ELBOW_LOG_FLOOR: f64 = 1e-300;

/// Diagnose numerical rank from a non-increasing singular-value list.
pub fn estimate_rank(s: &[f64], rel_tolerance: f64) -> Result<RankReport> {
    if s.is_empty() {
        return Err(Error::InvalidInput("empty singular value list".into()));
    }
    if s.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidInput("singular values must be finite and >= 0".into()));
    }
    if s.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidInput("singular values must be non-increasing".into()));
    }
    let s1 = s[0];
    let estimated_rank = s.iter().take_while(|&&v| v > rel_tolerance * s1).count();
    let elbow_index = if s.len() == 1 {
        0
    } else {
        let gaps: Vec<f64> = s
            .windows(2)
            .map(|w| (w[0] + ELBOW_LOG_FLOOR).log10() - (w[1] + ELBOW_LOG_FLOOR).log10())
            .collect();
        let mut arg = 0;
        for (i, g) in gaps.iter().enumerate() {
            if *g > gaps[arg] {
                arg = i;
            }
        }
        arg + 1
    };
    let condition_number =
        if estimated_rank == 0 { f64::INFINITY } else { s1 / s[estimated_rank - 1] };
    Ok(RankReport {
        singular_values: s.to_vec(),
        elbow_index,
        estimated_rank,
        condition_number,
        rel_tolerance,
    })
}

// ---------------------------------------------------------------------------
// Two-way sign flip
// ---------------------------------------------------------------------------

/// Output of [`sign_flip`]: corrected factors and the per-factor sign that
/// was applied to both modes (flips always come in pairs so the product of
/// a factor's two mode-signs is +1).
#[derive(Clone, Debug)]
pub struct SignFlipResult {
    pub scores: Matrix,
    pub loadings: Matrix,
    /// One multiplier (+1/-1) per factor, applied to both its vectors.
    pub signs: Vec<f64>,
    /// Raw signed-squared-projection sums, per mode (row) and factor (col);
    /// useful diagnostics for borderline factors.
    pub s_values: Matrix,
}

/// Two-way sign correction for bilinear factors: orient each factor so that
/// the sum of signed squared projections of the (other-factor-deflated) data
/// onto it is positive in both modes. When the data support positive
/// orientation in only one mode, the mode with the weaker evidence (smaller
/// |S|) yields.
pub fn sign_flip(scores: &Matrix, loadings: &Matrix, data: &Matrix) -> Result<SignFlipResult> {
    let f_count = scores.cols();
    if loadings.cols() != f_count {
        return Err(Error::InvalidInput(format!(
            "factor count mismatch: {} scores vs {} loadings",
            f_count,
            loadings.cols()
        )));
    }
    if scores.rows() != data.rows() || loadings.rows() != data.cols() {
        return Err(Error::InvalidInput("factor/data shape mismatch".into()));
    }
    let model = scores.matmul(&loadings.transpose())?;
    let mut s_values = Matrix::zeros(2, f_count);

    for f in 0..f_count {
        // Data minus the contribution of every factor except f.
        let sf = scores.col(f);
        let lf = loadings.col(f);
        let mut residual = data.sub(&model)?;
        for i in 0..residual.rows() {
            for j in 0..residual.cols() {
                residual[(i, j)] += sf[i] * lf[j];
            }
        }
        for (mode, a) in [(0usize, &sf), (1usize, &lf)] {
            let nrm2: f64 = a.iter().map(|v| v * v).sum();
            if nrm2 == 0.0 {
                return Err(Error::InvalidInput(format!(
                    "factor {f} has a zero vector in mode {mode}"
                )));
            }
            let work = if mode == 0 { residual.clone() } else { residual.transpose() };
            let mut total = 0.0;
            for j in 0..work.cols() {
                let p: f64 =
                    (0..work.rows()).map(|i| a[i] * work[(i, j)]).sum::<f64>() / nrm2;
                total += p.signum() * p * p;
            }
            s_values[(mode, f)] = total;
        }
    }

    let mut scores_out = scores.clone();
    let mut loadings_out = loadings.clone();
    let mut signs = vec![1.0; f_count];
    for f in 0..f_count {
        let mut sgn = [sign_or_plus(s_values[(0, f)]), sign_or_plus(s_values[(1, f)])];
        if sgn[0] * sgn[1] < 0.0 {
            // Odd number of negative modes: the weaker mode yields.
            let weak = if s_values[(0, f)].abs() <= s_values[(1, f)].abs() { 0 } else { 1 };
            sgn[weak] = -sgn[weak];
        }
        if sgn[0] < 0.0 {
            signs[f] = -1.0;
            for i in 0..scores_out.rows() {
                scores_out[(i, f)] = -scores_out[(i, f)];
            }
            for i in 0..loadings_out.rows() {
                loadings_out[(i, f)] = -loadings_out[(i, f)];
            }
        }
    }
    Ok(SignFlipResult { scores: scores_out, loadings: loadings_out, signs, s_values })
}

fn sign_or_plus(v: f64) -> f64 {
    if v < 0.0 {
        -1.0
    } else {
        1.0
    }
}
