//! Newton–Raphson multi-equilibria speciation and a segmented titration
//! driver.
//!
//! An equilibrium model is a components x species exponent matrix plus
//! log10 cumulative formation constants: each species concentration is
//! β_s · Π_j c_j^{model[j,s]} in the free component concentrations c. The
//! solver enforces the component mass balances Model·c_spec = c_tot with a
//! multiplicative Newton step (equivalent to Newton in log concentrations),
//! which keeps every concentration positive.

use crate::matcore::Matrix;
use crate::{Error, Result};

/// Chemical equilibrium model.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct EquilibriumModel {
    /// ncomp x nspec integer exponents (negatives allowed, e.g. −1 on H
    /// for hydroxide).
    pub model: Matrix,
    /// log10 cumulative formation constants, one per species; free
    /// components have 0.
    pub log_beta: Vec<f64>,
    pub components: Vec<String>,
    pub species: Vec<String>,
}

impl EquilibriumModel {
    pub fn new(
        model: Matrix,
        log_beta: Vec<f64>,
        components: Vec<String>,
        species: Vec<String>,
    ) -> Result<Self> {
        let (ncomp, nspec) = (model.rows(), model.cols());
        if log_beta.len() != nspec || components.len() != ncomp || species.len() != nspec {
            return Err(Error::InvalidInput(format!(
                "inconsistent model dimensions: {ncomp} components, {nspec} species, {} log_beta, {} names",
                log_beta.len(),
                species.len()
            )));
        }
        if nspec < ncomp {
            return Err(Error::InvalidInput("fewer species than components".into()));
        }
        // The leading ncomp species must be the free components themselves.
        for j in 0..ncomp {
            for k in 0..ncomp {
                let want = if j == k { 1.0 } else { 0.0 };
                if model[(j, k)] != want {
                    return Err(Error::InvalidInput(
                        "the first ncomp species columns must form the identity (free components first)"
                            .into(),
                    ));
                }
            }
        }
        Ok(Self { model, log_beta, components, species })
    }

    pub fn n_components(&self) -> usize {
        self.model.rows()
    }

    pub fn n_species(&self) -> usize {
        self.model.cols()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: EquilibriumModel = serde_json::from_str(text)
            .map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
        Self::new(m.model, m.log_beta, m.components, m.species)
    }

    /// Species concentrations from free component concentrations:
    /// β_s · Π_j c_j^{model[j,s]}, evaluated through logs so large β never
    /// overflow intermediate products.
    pub fn species_concentrations(&self, c_free: &[f64]) -> Vec<f64> {
        let ln10 = std::f64::consts::LN_10;
        (0..self.n_species())
            .map(|s| {
                let mut log_c = self.log_beta[s] * ln10;
                for j in 0..self.n_components() {
                    log_c += self.model[(j, s)] * c_free[j].ln();
                }
                log_c.exp()
            })
            .collect()
    }
}

/// Converged (or best-effort) speciation at one set of totals.
#[derive(Clone, Debug)]
pub struct SpeciationResult {
    /// All species concentrations (mol/L).
    pub c_spec: Vec<f64>,
    /// Free component concentrations (the solver variables).
    pub c_free: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// max |Model·c_spec − c_tot|.
    pub mass_balance_residual: f64,
}

const MAX_NR_ITER: usize = 100;

/// Solve the mass balances Model·c_spec(c) = c_tot for the free component
/// concentrations, starting from `guess` (strictly positive).
///
/// Zero totals are lifted to 1e-15 (a genuinely zero total has no positive
/// solution). The Newton system uses the symmetric scaled Jacobian
/// J[j,k] = Σ_s model[j,s]·model[k,s]·c_spec[s] and multiplicative update
/// c ← c + (J⁻¹ d) ∘ c, halving the step while any component would go
/// non-positive. Convergence: all |d| below 1e-15·max(1, ‖c_tot‖∞).
pub fn newton_raphson_speciation(
    model: &EquilibriumModel,
    c_tot: &[f64],
    guess: &[f64],
) -> Result<SpeciationResult> {
    let ncomp = model.n_components();
    if c_tot.len() != ncomp || guess.len() != ncomp {
        return Err(Error::InvalidInput(format!(
            "expected {ncomp} totals and guesses, got {} and {}",
            c_tot.len(),
            guess.len()
        )));
    }
    if guess.iter().any(|&g| !(g > 0.0)) {
        return Err(Error::InvalidInput("initial guess must be strictly positive".into()));
    }
    let c_tot: Vec<f64> = c_tot
        .iter()
        .map(|&v| if v == 0.0 { 1e-15 } else { v })
        .collect();
    let scale = c_tot.iter().fold(1.0f64, |m, &v| m.max(v.abs()));
    let threshold = 1e-15 * scale;

    let mut c = guess.to_vec();
    let mut c_spec = model.species_concentrations(&c);
    let mut residual = f64::INFINITY;
    for iter in 0..MAX_NR_ITER {
        let d: Vec<f64> = (0..ncomp)
            .map(|j| {
                let calc: f64 =
                    (0..model.n_species()).map(|s| model.model[(j, s)] * c_spec[s]).sum();
                c_tot[j] - calc
            })
            .collect();
        residual = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if residual < threshold {
            return Ok(SpeciationResult {
                c_spec,
                c_free: c,
                iterations: iter,
                converged: true,
                mass_balance_residual: residual,
            });
        }
        let jac = Matrix::from_fn(ncomp, ncomp, |j, k| {
            (0..model.n_species())
                .map(|s| model.model[(j, s)] * model.model[(k, s)] * c_spec[s])
                .sum()
        });
        let raw = jac.solve(&d)?;
        let mut dc: Vec<f64> = raw.iter().zip(&c).map(|(r, ci)| r * ci).collect();
        // Positivity guard: shrink the step until no component crosses zero.
        while c.iter().zip(&dc).any(|(ci, di)| ci + di <= 0.0) {
            for di in &mut dc {
                *di *= 0.5;
            }
            if dc.iter().all(|di| di.abs() < 1e-15) {
                break;
            }
        }
        for (ci, di) in c.iter_mut().zip(&dc) {
            *ci += di;
        }
        c_spec = model.species_concentrations(&c);
    }
    Ok(SpeciationResult {
        c_spec,
        c_free: c,
        iterations: MAX_NR_ITER,
        converged: false,
        mass_balance_residual: residual,
    })
}

/// Totals after adding `v_added` of titrant to `v0` of vessel contents:
/// (v0·c0 + v_added·c_added)/(v0 + v_added). The hyperbolic volume factor
/// is why diluted totals do not fall on a straight line in added volume.
pub fn dilution_totals(v0: f64, c0: &[f64], v_added: f64, c_added: &[f64]) -> Vec<f64> {
    c0.iter()
        .zip(c_added)
        .map(|(a, b)| (v0 * a + v_added * b) / (v0 + v_added))
        .collect()
}

/// One titration segment: a contiguous run of schedule indices sharing a
/// titrant composition.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct TitrationSegment {
    /// Half-open index range [start, end) into the volume schedule.
    pub start: usize,
    pub end: usize,
    /// Titrant component totals (mol/L); negative entries model a base
    /// consuming the component (e.g. NaOH as −H).
    pub c_added: Vec<f64>,
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct TitrationProtocol {
    pub v0: f64,
    /// Component totals initially in the vessel (mol/L).
    pub c0: Vec<f64>,
    /// Cumulative added volumes, non-decreasing.
    pub schedule: Vec<f64>,
    pub segments: Vec<TitrationSegment>,
}

impl TitrationProtocol {
    pub fn validate(&self, ncomp: usize) -> Result<()> {
        if self.v0 <= 0.0 {
            return Err(Error::InvalidInput("initial volume must be positive".into()));
        }
        if self.c0.len() != ncomp {
            return Err(Error::InvalidInput(format!(
                "protocol has {} component totals, model has {ncomp}",
                self.c0.len()
            )));
        }
        if self.schedule.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidInput("volume schedule must be non-decreasing".into()));
        }
        let mut covered = vec![false; self.schedule.len()];
        for seg in &self.segments {
            if seg.c_added.len() != ncomp {
                return Err(Error::InvalidInput("segment titrant length mismatch".into()));
            }
            if seg.end > self.schedule.len() || seg.start >= seg.end {
                return Err(Error::InvalidInput("segment range out of bounds".into()));
            }
            for flag in &mut covered[seg.start..seg.end] {
                if *flag {
                    return Err(Error::InvalidInput("segments overlap".into()));
                }
                *flag = true;
            }
        }
        if covered.iter().any(|f| !f) {
            return Err(Error::InvalidInput("segments do not cover the schedule".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })
    }
}

/// Full titration trace.
#[derive(Clone, Debug)]
pub struct TitrationResult {
    /// points x species concentrations.
    pub c_spec: Matrix,
    /// points x components total concentrations actually used.
    pub c_tot: Matrix,
    /// Worst mass-balance residual over all points.
    pub max_residual: f64,
    pub all_converged: bool,
    /// Indices of points that failed to converge.
    pub failed_points: Vec<usize>,
}

/// Run the titration: at each scheduled volume, compute diluted totals for
/// the active segment's titrant and solve the speciation, warm-starting
/// from the previous point's free concentrations (first point starts from
/// c0).
pub fn titrate(model: &EquilibriumModel, protocol: &TitrationProtocol) -> Result<TitrationResult> {
    let ncomp = model.n_components();
    protocol.validate(ncomp)?;
    let npts = protocol.schedule.len();
    let mut c_spec = Matrix::zeros(npts, model.n_species());
    let mut c_tot_out = Matrix::zeros(npts, ncomp);
    let mut guess: Vec<f64> = protocol.c0.iter().map(|&v| v.max(1e-15)).collect();
    let mut max_residual = 0.0f64;
    let mut failed_points = Vec::new();

    for seg in &protocol.segments {
        for i in seg.start..seg.end {
            let c_tot =
                dilution_totals(protocol.v0, &protocol.c0, protocol.schedule[i], &seg.c_added);
            let res = newton_raphson_speciation(model, &c_tot, &guess)?;
            if !res.converged {
                failed_points.push(i);
            }
            max_residual = max_residual.max(res.mass_balance_residual);
            c_spec.row_mut(i).copy_from_slice(&res.c_spec);
            c_tot_out.row_mut(i).copy_from_slice(&c_tot);
            guess = res.c_free;
        }
    }
    failed_points.sort_unstable();
    Ok(TitrationResult {
        c_spec,
        c_tot: c_tot_out,
        max_residual,
        all_converged: failed_points.is_empty(),
        failed_points,
    })
}

/// The three-dye monoprotic titration preset.
pub mod presets {
    use super::*;

    /// Species order: P⁻, M, B²⁻, H⁺, HP, HM⁺, HB⁻, OH⁻ — components
    /// first, then the protonated forms and hydroxide.
    pub fn dye_model() -> EquilibriumModel {
        EquilibriumModel::new(
            Matrix::from_rows(&[
                vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0],
                vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, -1.0],
            ])
            .expect("static preset"),
            vec![0.0, 0.0, 0.0, 0.0, 7.66, 3.43, 4.62, -14.0],
            vec!["P".into(), "M".into(), "B".into(), "H".into()],
            vec![
                "P".into(),
                "M".into(),
                "B".into(),
                "H".into(),
                "HP".into(),
                "HM".into(),
                "HB".into(),
                "OH".into(),
            ],
        )
        .expect("static preset")
    }

    /// Columns of the species matrix holding the six dye forms
    /// (P, HP, M, HM, B, HB) — the acid/base pairs, excluding H⁺ and OH⁻.
    pub const DYE_SPECIES_COLUMNS: [usize; 6] = [0, 4, 1, 5, 2, 6];

    /// The reference 60-point added-volume schedule (litres): coarse to
    /// 9 mL, then progressively finer through the equivalence region.
    pub fn dye_schedule() -> Vec<f64> {
        let mut v = Vec::with_capacity(60);
        let mut push_range = |start: f64, step: f64, count: usize| {
            for i in 0..count {
                v.push((start + step * i as f64) * 1e-3);
            }
        };
        push_range(0.0, 0.6, 16); // 0 .. 9.0 mL
        push_range(9.05, 0.05, 14); // 9.05 .. 9.70 mL
        push_range(9.725, 0.025, 8); // 9.725 .. 9.90 mL
        push_range(9.95, 0.05, 22); // 9.95 .. 11.0 mL
        v
    }

    /// Titration of the three dyes (30, 30, 20 µM) in 1 mM strong acid
    /// with 5 mM NaOH. `indicator` is the dye concentration carried by the
    /// titrant in the later segments (mol/L): zero reproduces the
    /// rank-deficient design; a trace amount (the reference run uses
    /// 1e-10) makes the six dye columns full rank.
    pub fn dye_protocol(indicator: f64) -> TitrationProtocol {
        let base = vec![0.0, 0.0, 0.0, -0.005];
        let with = |p: f64, m: f64, b: f64| vec![p, m, b, -0.005];
        TitrationProtocol {
            v0: 0.05,
            c0: vec![3e-5, 3e-5, 2e-5, 1e-3],
            schedule: dye_schedule(),
            segments: vec![
                TitrationSegment { start: 0, end: 16, c_added: base },
                TitrationSegment { start: 16, end: 30, c_added: with(indicator, 0.0, 0.0) },
                TitrationSegment { start: 30, end: 38, c_added: with(0.0, indicator, 0.0) },
                TitrationSegment {
                    start: 38,
                    end: 60,
                    c_added: with(indicator, indicator, indicator),
                },
            ],
        }
    }
}
