//! Bilinear spectrokinetic data synthesis and spectral recovery.
//!
//! Data matrices follow the factor model D = C·Aᵀ (time x channel =
//! concentration profiles times spectra). Spectra are sums of a Gaussian
//! band and a flat baseline; noise is additive i.i.d. Gaussian from a
//! seeded, portable generator. Recovery is least squares, optionally with
//! some spectra known in advance, with row-augmented datasets, or from a
//! pre-mix measurement of the substrate alone.

use crate::matcore::{self, Matrix};
use crate::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

/// One Gaussian band: amplitude · exp(−(x − center)² / width) + baseline.
/// `width` is the full denominator inside the exponential, not a sigma.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct GaussPeak {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    pub baseline: f64,
}

/// A wavelength grid plus one peak description per component.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct SpectrumSet {
    pub grid: Vec<f64>,
    pub peaks: Vec<GaussPeak>,
}

impl SpectrumSet {
    pub fn new(grid: Vec<f64>, peaks: Vec<GaussPeak>) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::InvalidInput("wavelength grid is empty".into()));
        }
        for (i, p) in peaks.iter().enumerate() {
            if p.amplitude < 0.0 || p.width <= 0.0 || p.baseline < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "peak {i}: amplitude/baseline must be >= 0 and width > 0"
                )));
            }
        }
        Ok(Self { grid, peaks })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let set: SpectrumSet = serde_json::from_str(text)
            .map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
        Self::new(set.grid, set.peaks)
    }
}

/// Evaluate the spectra on the grid: channels x components.
pub fn gaussian_spectra(set: &SpectrumSet) -> Matrix {
    Matrix::from_fn(set.grid.len(), set.peaks.len(), |i, j| {
        let p = &set.peaks[j];
        let d = set.grid[i] - p.center;
        p.amplitude * (-d * d / p.width).exp() + p.baseline
    })
}

/// D = C·Aᵀ.
pub fn bilinear_data(c: &Matrix, a: &Matrix) -> Result<Matrix> {
    if c.cols() != a.cols() {
        return Err(Error::InvalidInput(format!(
            "C has {} components but A has {}",
            c.cols(),
            a.cols()
        )));
    }
    c.matmul(&a.transpose())
}

/// Additive Gaussian noise description. The generator is ChaCha12
/// (a counter-based stream cipher RNG), so a given seed produces the same
/// noise on every platform.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct NoiseSpec {
    pub sd: f64,
    pub seed: u64,
}

/// Add i.i.d. N(0, sd²) noise, row-major order. sd = 0 returns an exact copy.
pub fn add_noise(d: &Matrix, spec: &NoiseSpec) -> Result<Matrix> {
    if spec.sd < 0.0 {
        return Err(Error::InvalidInput(format!("noise sd must be >= 0, got {}", spec.sd)));
    }
    if spec.sd == 0.0 {
        return Ok(d.clone());
    }
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    Ok(d.map(|v| {
        let z: f64 = StandardNormal.sample(&mut rng);
        v + spec.sd * z
    }))
}

/// Spectral estimate plus the rank diagnostics of the solve.
#[derive(Clone, Debug)]
pub struct SpectraEstimate {
    /// channels x components.
    pub spectra: Matrix,
    pub rank: usize,
    /// True when the concentration matrix lacked full column rank; the
    /// returned spectra are then the minimum-norm solution, not the truth.
    pub rank_deficient: bool,
}

/// Least-squares spectra: A_est = argmin ‖C·Aᵀ − D‖_F, solved column by
/// column of D through one SVD of C.
pub fn estimate_spectra(d: &Matrix, c: &Matrix) -> Result<SpectraEstimate> {
    if d.rows() != c.rows() {
        return Err(Error::InvalidInput(format!(
            "D has {} rows but C has {}",
            d.rows(),
            c.rows()
        )));
    }
    let ls = matcore::least_squares(c, d)?;
    Ok(SpectraEstimate {
        spectra: ls.solution.transpose(),
        rank: ls.rank,
        rank_deficient: ls.rank_deficient,
    })
}

/// Recover the unknown spectra given the rest: solves
/// C_unknown · A_unknownᵀ = D − C_known · A_knownᵀ.
///
/// `known` lists component indices (columns of C); `a_known` holds their
/// spectra in the same order, channels x |known|. Returns the estimated
/// spectra of the remaining components in ascending component order.
pub fn estimate_with_known(
    d: &Matrix,
    c: &Matrix,
    known: &[usize],
    a_known: &Matrix,
) -> Result<SpectraEstimate> {
    let ncomp = c.cols();
    if known.iter().any(|&j| j >= ncomp) {
        return Err(Error::InvalidInput("known component index out of range".into()));
    }
    let mut seen = vec![false; ncomp];
    for &j in known {
        if seen[j] {
            return Err(Error::InvalidInput(format!("component {j} listed twice as known")));
        }
        seen[j] = true;
    }
    if a_known.cols() != known.len() || a_known.rows() != d.cols() {
        return Err(Error::InvalidInput(format!(
            "known spectra must be {} channels x {} components, got {}x{}",
            d.cols(),
            known.len(),
            a_known.rows(),
            a_known.cols()
        )));
    }
    let unknown: Vec<usize> = (0..ncomp).filter(|j| !seen[*j]).collect();
    if unknown.is_empty() {
        return Ok(SpectraEstimate {
            spectra: Matrix::zeros(d.cols(), 0),
            rank: 0,
            rank_deficient: false,
        });
    }
    let c_known = c.select_cols(known)?;
    let residual = d.sub(&bilinear_data(&c_known, a_known)?)?;
    estimate_spectra(&residual, &c.select_cols(&unknown)?)
}

/// Stack several (D, C) runs by rows and solve once. Extra runs with
/// different initial conditions can complete the rank that any single run
/// lacks.
pub fn augmented_estimate(pairs: &[(&Matrix, &Matrix)]) -> Result<SpectraEstimate> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput("no datasets to stack".into()));
    }
    let (d0, c0) = pairs[0];
    for (d, c) in pairs {
        if c.cols() != c0.cols() || d.cols() != d0.cols() {
            return Err(Error::InvalidInput(
                "stacked datasets must share component and channel counts".into(),
            ));
        }
        if d.rows() != c.rows() {
            return Err(Error::InvalidInput("each D must have as many rows as its C".into()));
        }
    }
    let ds: Vec<&Matrix> = pairs.iter().map(|(d, _)| *d).collect();
    let cs: Vec<&Matrix> = pairs.iter().map(|(_, c)| *c).collect();
    estimate_spectra(&Matrix::vstack(&ds)?, &Matrix::vstack(&cs)?)
}

/// Recover substrate and enzyme spectra from a pre-mix substrate
/// measurement and the first data row.
///
/// Before mixing, only substrate absorbs: a_measured = S0·a_S (+ noise).
/// At t = 0 the mixture row is d0 = S0·a_S + K0·a_K, so channelwise
/// a_S = a_measured/S0 and a_K = (d0 − a_measured)/K0. The division by K0
/// amplifies measurement noise by 1/K0, which is the practical limitation
/// of the approach.
pub fn premix_recovery(
    a_substrate_measured: &[f64],
    d_initial_row: &[f64],
    s0: f64,
    k0: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if a_substrate_measured.len() != d_initial_row.len() {
        return Err(Error::InvalidInput("channel counts differ".into()));
    }
    if s0 <= 0.0 || k0 <= 0.0 {
        return Err(Error::Domain(format!(
            "initial totals must be positive, got S0={s0}, K0={k0}"
        )));
    }
    let a_s: Vec<f64> = a_substrate_measured.iter().map(|v| v / s0).collect();
    let a_k: Vec<f64> = d_initial_row
        .iter()
        .zip(a_substrate_measured)
        .map(|(d, m)| (d - m) / k0)
        .collect();
    Ok((a_s, a_k))
}

/// Built-in spectrum sets and the extreme-concentration-ratio scenario.
pub mod presets {
    use super::*;

    fn channel_grid() -> Vec<f64> {
        (1..=100).map(|x| x as f64).collect()
    }

    /// Three-component set for the bimolecular system (X, Y, Z bands at
    /// channels 20, 40, 60).
    pub fn spectra3() -> SpectrumSet {
        SpectrumSet::new(
            channel_grid(),
            vec![
                GaussPeak { amplitude: 2.5, center: 20.0, width: 200.0, baseline: 0.075 },
                GaussPeak { amplitude: 12.5, center: 40.0, width: 200.0, baseline: 0.075 },
                GaussPeak { amplitude: 10.0, center: 60.0, width: 200.0, baseline: 0.065 },
            ],
        )
        .expect("static preset")
    }

    /// Four-component set for the enzyme system (S, K, SK, P bands at
    /// channels 20, 40, 60, 80).
    pub fn spectra4() -> SpectrumSet {
        SpectrumSet::new(
            channel_grid(),
            vec![
                GaussPeak { amplitude: 2.5, center: 20.0, width: 200.0, baseline: 0.075 },
                GaussPeak { amplitude: 12.5, center: 40.0, width: 200.0, baseline: 0.075 },
                GaussPeak { amplitude: 10.0, center: 60.0, width: 200.0, baseline: 0.065 },
                GaussPeak { amplitude: 1.0, center: 80.0, width: 100.0, baseline: 0.065 },
            ],
        )
        .expect("static preset")
    }

    /// Realistic-ratio scenario for pre-mix recovery: substrate in
    /// thousandfold excess over enzyme, slow run, moderate noise.
    #[derive(Clone, Copy, Debug)]
    pub struct PremixScenario {
        pub k1: f64,
        pub k1r: f64,
        pub k2: f64,
        pub s0: f64,
        pub k0: f64,
        pub stop_time: f64,
        pub sd: f64,
    }

    pub fn premix_scenario() -> PremixScenario {
        PremixScenario { k1: 20.0, k1r: 0.118, k2: 3.0, s0: 1.0, k0: 0.001, stop_time: 1000.0, sd: 0.003 }
    }
}
