//! Signal contribution function (SCF) geometry on two-component feasible
//! regions.
//!
//! For a bilinear D = C·Aᵀ, the contribution of one component is
//! ‖c‖²·‖s‖² / ‖D‖²_F — the Frobenius weight of its rank-1 layer. On a
//! two-component system every feasible factorization can be written with a
//! transformation T = [[1, α], [1, β]] acting on the first-coordinate-
//! normalized abstract basis; the feasible (α, β) set is a product of two
//! intervals, and the SCF attains its extrema on the boundary of that
//! rectangle. This module computes the intervals and verifies the boundary
//! property by dense grid evaluation.

use crate::matcore::{self, Matrix};
use crate::{Error, Result};

/// SVD-based abstract coordinates of a data matrix: D = X·Vᵀ = U·Yᵀ with
/// X = U·Σ and Y = V·Σ, so concentration profiles are c = U·y and spectra
/// are s = V·x.
#[derive(Clone, Debug)]
pub struct AbstractSpace {
    pub u: Matrix,
    pub v: Matrix,
    /// Scores U·Σ, rows x k.
    pub x_coords: Matrix,
    /// Co-scores V·Σ, cols x k.
    pub y_coords: Matrix,
    pub singular_values: Vec<f64>,
    pub d_fro2: f64,
}

impl AbstractSpace {
    pub fn from_data(d: &Matrix, k: usize) -> Result<Self> {
        let svd = matcore::svd(d, Some(k))?;
        let v = svd.vt.transpose();
        let x_coords = Matrix::from_fn(svd.u.rows(), k, |i, j| svd.u[(i, j)] * svd.s[j]);
        let y_coords = Matrix::from_fn(v.rows(), k, |i, j| v[(i, j)] * svd.s[j]);
        Ok(Self {
            u: svd.u,
            v,
            x_coords,
            y_coords,
            singular_values: svd.s,
            d_fro2: d.frobenius_norm().powi(2),
        })
    }
}

/// Frobenius contribution of a rank-1 layer: ‖c‖²·‖s‖²/‖D‖²_F.
pub fn scf_value(c: &[f64], s: &[f64], d_fro2: f64) -> f64 {
    let cn: f64 = c.iter().map(|v| v * v).sum();
    let sn: f64 = s.iter().map(|v| v * v).sum();
    cn * sn / d_fro2
}

/// Largest deviation of UᵀU from the identity.
fn orthonormality_defect(u: &Matrix) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..u.cols() {
        for k in j..u.cols() {
            let dot: f64 = (0..u.rows()).map(|i| u[(i, j)] * u[(i, k)]).sum();
            let want = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((dot - want).abs());
        }
    }
    worst
}

/// The ℓ2 coordinate identity: with orthonormal U, ‖U·y‖² = ‖y‖². Returns
/// both squared norms; errors if U is not orthonormal (reporting the
/// deviation) since the identity is meaningless then.
pub fn norm_identity_check(u: &Matrix, y: &[f64]) -> Result<(f64, f64)> {
    let defect = orthonormality_defect(u);
    if defect > 1e-12 {
        return Err(Error::InvalidInput(format!(
            "basis is not orthonormal: max |U'U - I| = {defect:e}"
        )));
    }
    let uy = u.matvec(y)?;
    Ok((uy.iter().map(|v| v * v).sum(), y.iter().map(|v| v * v).sum()))
}

/// Feasible (α, β) rectangle for the two-component transformation
/// T = [[1, α], [1, β]].
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct TwoComponentRegion {
    pub alpha: (f64, f64),
    pub beta: (f64, f64),
}

fn reject_zero_lines(d: &Matrix) -> Result<()> {
    for i in 0..d.rows() {
        if d.row(i).iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidInput(format!(
                "row {i} is identically zero; delete zero rows/columns before the region analysis"
            )));
        }
    }
    for j in 0..d.cols() {
        if (0..d.rows()).all(|i| d[(i, j)] == 0.0) {
            return Err(Error::InvalidInput(format!(
                "column {j} is identically zero; delete zero rows/columns before the region analysis"
            )));
        }
    }
    Ok(())
}

/// Lawton–Sylvestre-style feasible intervals for a nonnegative rank-2
/// matrix.
///
/// With scores x₁ = σ₁u₁, x₂ = σ₂u₂ and loadings v₁, v₂, a component's
/// spectrum is v₁ + t·v₂ and its concentration profile is a combination of
/// x₁, x₂. Spectrum nonnegativity bounds t from the sign pattern of v₂;
/// profile nonnegativity bounds it by the data-point ratios x₂/x₁. The α
/// interval (first component) sits below every data ratio, the β interval
/// (second component) above.
pub fn feasible_region_2comp(d: &Matrix) -> Result<TwoComponentRegion> {
    reject_zero_lines(d)?;
    let floor = -1e-12 * d.max_abs();
    if d.data().iter().any(|&v| v < floor) {
        return Err(Error::InvalidInput("data must be nonnegative".into()));
    }
    let s_all = matcore::singular_values(d)?;
    let report = matcore::estimate_rank(&s_all, matcore::default_rel_tolerance(d.rows(), d.cols()))?;
    if report.estimated_rank != 2 {
        return Err(Error::InvalidInput(format!(
            "numerical rank is {}, need exactly 2",
            report.estimated_rank
        )));
    }

    let space = AbstractSpace::from_data(d, 2)?;
    // Perron orientation makes x1 strictly positive for a nonnegative
    // irreducible D, so the ratios below are well defined.
    let ratios: Vec<f64> =
        (0..d.rows()).map(|i| space.x_coords[(i, 1)] / space.x_coords[(i, 0)]).collect();
    let r_min = ratios.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let r_max = ratios.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));

    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for j in 0..d.cols() {
        let (v1, v2) = (space.v[(j, 0)], space.v[(j, 1)]);
        if v2 > 0.0 {
            lo = lo.max(-v1 / v2);
        } else if v2 < 0.0 {
            hi = hi.min(-v1 / v2);
        }
    }

    let region = TwoComponentRegion { alpha: (lo, r_min), beta: (r_max, hi) };
    if !(region.alpha.0 <= region.alpha.1 && region.beta.0 <= region.beta.1) {
        return Err(Error::Domain(
            "feasible region is empty (noise level too large for a 2-component description)"
                .into(),
        ));
    }
    Ok(region)
}

/// Dense SCF evaluation over the feasible rectangle.
#[derive(Clone, Debug)]
pub struct ScfGridStudy {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// values[(i, j)] = SCF of component 1 at (alphas[i], betas[j]).
    pub values: Matrix,
    pub argmax: (usize, usize),
    pub argmin: (usize, usize),
    pub max: f64,
    pub min: f64,
    /// Grid cells skipped because T was singular (α = β).
    pub skipped: Vec<(usize, usize)>,
    /// True when both extrema lie in the outermost cell ring.
    pub extrema_on_boundary: bool,
}

pub const DEFAULT_GRID_N: usize = 201;

/// Evaluate the SCF of component 1 on a grid_n x grid_n grid over the
/// region and locate its extrema. With T = [[1, α], [1, β]], the component
/// has spectrum v₁ + α·v₂ and concentration profile (β·x₁ − x₂)/(β − α).
pub fn scf_boundary_study(
    d: &Matrix,
    region: &TwoComponentRegion,
    grid_n: usize,
) -> Result<ScfGridStudy> {
    if grid_n < 16 {
        return Err(Error::InvalidInput(format!("grid_n must be at least 16, got {grid_n}")));
    }
    let space = AbstractSpace::from_data(d, 2)?;
    let lin = |(a, b): (f64, f64)| -> Vec<f64> {
        (0..grid_n).map(|i| a + (b - a) * i as f64 / (grid_n - 1) as f64).collect()
    };
    let alphas = lin(region.alpha);
    let betas = lin(region.beta);

    let mut values = Matrix::zeros(grid_n, grid_n);
    let mut skipped = Vec::new();
    let mut max = f64::NEG_INFINITY;
    let mut min = f64::INFINITY;
    let mut argmax = (0, 0);
    let mut argmin = (0, 0);
    for (i, &a) in alphas.iter().enumerate() {
        for (j, &b) in betas.iter().enumerate() {
            if (b - a).abs() < 1e-14 {
                skipped.push((i, j));
                continue;
            }
            let c: Vec<f64> = (0..space.x_coords.rows())
                .map(|r| (b * space.x_coords[(r, 0)] - space.x_coords[(r, 1)]) / (b - a))
                .collect();
            let s: Vec<f64> =
                (0..space.v.rows()).map(|r| space.v[(r, 0)] + a * space.v[(r, 1)]).collect();
            let val = scf_value(&c, &s, space.d_fro2);
            values[(i, j)] = val;
            if val > max {
                max = val;
                argmax = (i, j);
            }
            if val < min {
                min = val;
                argmin = (i, j);
            }
        }
    }
    let on_boundary =
        |(i, j): (usize, usize)| i == 0 || j == 0 || i == grid_n - 1 || j == grid_n - 1;
    Ok(ScfGridStudy {
        alphas,
        betas,
        values,
        argmax,
        argmin,
        max,
        min,
        skipped,
        extrema_on_boundary: on_boundary(argmax) && on_boundary(argmin),
    })
}

/// Two synthetic rank-2 systems for the boundary studies.
pub mod presets {
    use super::*;
    use crate::bilinear::{bilinear_data, gaussian_spectra, GaussPeak, SpectrumSet};
    use crate::kinetics::presets::linspace;

    /// Two overlapping Gaussian elution profiles with Gaussian spectra.
    pub fn chromatographic() -> (Matrix, Matrix, Matrix) {
        let t = linspace(0.0, 10.0, 40);
        let c = Matrix::from_fn(40, 2, |i, j| match j {
            0 => (-(t[i] - 3.0).powi(2) / 4.0).exp(),
            _ => (-(t[i] - 6.5).powi(2) / 6.0).exp(),
        });
        let set = SpectrumSet::new(
            (1..=50).map(|x| x as f64).collect(),
            vec![
                GaussPeak { amplitude: 1.0, center: 15.0, width: 100.0, baseline: 0.02 },
                GaussPeak { amplitude: 0.8, center: 35.0, width: 120.0, baseline: 0.02 },
            ],
        )
        .expect("static preset");
        let a = gaussian_spectra(&set);
        let d = bilinear_data(&c, &a).expect("dimensions match");
        (c, a, d)
    }

    /// First-order reactant/product kinetics with Gaussian spectra.
    pub fn kinetic() -> (Matrix, Matrix, Matrix) {
        let t = linspace(0.0, 5.0, 60);
        let c = Matrix::from_fn(60, 2, |i, j| {
            let decay = (-0.8 * t[i]).exp();
            if j == 0 {
                decay
            } else {
                1.0 - decay
            }
        });
        let set = SpectrumSet::new(
            (1..=80).map(|x| x as f64).collect(),
            vec![
                GaussPeak { amplitude: 2.0, center: 25.0, width: 150.0, baseline: 0.05 },
                GaussPeak { amplitude: 1.5, center: 55.0, width: 200.0, baseline: 0.05 },
            ],
        )
        .expect("static preset");
        let a = gaussian_spectra(&set);
        let d = bilinear_data(&c, &a).expect("dimensions match");
        (c, a, d)
    }
}
