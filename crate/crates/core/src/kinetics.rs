//! Mass-action reaction systems, closed-form kinetic oracles, conservation
//! laws, and enzyme dose schedules.
//!
//! Covers two model systems: the bimolecular combination X + Y → Z and the
//! Michaelis–Menten mechanism S + K ⇌ SK → P + K. Both ship with closed-form
//! solutions (exact up to Lambert-W / QSSA assumptions) so integrator output
//! can be checked against an independent route.

use crate::matcore::Matrix;
use crate::odeint::{self, IntegratorConfig};
use crate::{Error, Result};
use std::collections::BTreeMap;

/// One elementary reaction with mass-action kinetics. Species are referred
/// to by index into the owning system's species list.
#[derive(Clone, Debug)]
pub struct Reaction {
    pub reactants: Vec<(usize, u32)>,
    pub products: Vec<(usize, u32)>,
    /// Rate constant; units 1/s or 1/(mol·s) depending on molecularity.
    pub k: f64,
}

/// A closed reaction network with initial concentrations (mol/L).
#[derive(Clone, Debug)]
pub struct ReactionSystem {
    pub species: Vec<String>,
    pub reactions: Vec<Reaction>,
    pub y0: Vec<f64>,
}

impl ReactionSystem {
    pub fn new(species: Vec<String>, reactions: Vec<Reaction>, y0: Vec<f64>) -> Result<Self> {
        if species.len() != y0.len() {
            return Err(Error::InvalidInput(format!(
                "{} species but {} initial concentrations",
                species.len(),
                y0.len()
            )));
        }
        for (ri, r) in reactions.iter().enumerate() {
            if r.reactants.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "reaction {ri} has no reactants"
                )));
            }
            if !(r.k > 0.0 && r.k.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "reaction {ri} has non-positive rate constant {}",
                    r.k
                )));
            }
            for &(s, _) in r.reactants.iter().chain(r.products.iter()) {
                if s >= species.len() {
                    return Err(Error::InvalidInput(format!(
                        "reaction {ri} references species index {s} out of range"
                    )));
                }
            }
        }
        Ok(Self { species, reactions, y0 })
    }

    pub fn n_species(&self) -> usize {
        self.species.len()
    }

    /// Net stoichiometric matrix, species x reactions.
    pub fn stoichiometric_matrix(&self) -> Matrix {
        let mut n = Matrix::zeros(self.species.len(), self.reactions.len());
        for (j, r) in self.reactions.iter().enumerate() {
            for &(s, c) in &r.reactants {
                n[(s, j)] -= c as f64;
            }
            for &(s, c) in &r.products {
                n[(s, j)] += c as f64;
            }
        }
        n
    }

    /// Evaluate the dose-free mass-action derivative into `dydt`.
    pub fn rhs(&self, _t: f64, y: &[f64], dydt: &mut [f64]) {
        dydt.fill(0.0);
        for r in &self.reactions {
            let mut rate = r.k;
            for &(s, c) in &r.reactants {
                for _ in 0..c {
                    rate *= y[s];
                }
            }
            for &(s, c) in &r.reactants {
                dydt[s] -= c as f64 * rate;
            }
            for &(s, c) in &r.products {
                dydt[s] += c as f64 * rate;
            }
        }
    }
}

/// Builds a standalone derivative closure for a system.
pub fn mass_action_rhs(system: &ReactionSystem) -> impl Fn(f64, &[f64], &mut [f64]) + '_ {
    move |t, y, dydt| system.rhs(t, y, dydt)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LawKind {
    /// w·c = b with b != 0.
    Affine,
    /// w·c = 0.
    Linear,
}

/// A weighted-sum conservation relation w·c(t) = b holding along trajectories.
#[derive(Clone, Debug)]
pub struct ConservationLaw {
    pub weights: Vec<f64>,
    pub constant: f64,
    pub kind: LawKind,
}

impl ConservationLaw {
    pub fn new(weights: Vec<f64>, constant: f64) -> Self {
        let kind = if constant == 0.0 { LawKind::Linear } else { LawKind::Affine };
        Self { weights, constant, kind }
    }
}

/// Per-law infinity-norm residual max_t |C(t)·w − b|.
pub fn conservation_residuals(c: &Matrix, laws: &[ConservationLaw]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(laws.len());
    for law in laws {
        if law.weights.len() != c.cols() {
            return Err(Error::InvalidInput(format!(
                "law has {} weights but trajectory has {} species",
                law.weights.len(),
                c.cols()
            )));
        }
        let mut worst = 0.0f64;
        for i in 0..c.rows() {
            let dot: f64 = c.row(i).iter().zip(&law.weights).map(|(a, w)| a * w).sum();
            worst = worst.max((dot - law.constant).abs());
        }
        out.push(worst);
    }
    Ok(out)
}

/// When and how extra material enters the reactor.
#[derive(Clone, Copy, Debug)]
pub enum DoseMode {
    /// Constant inflow `rate` starting at `start`, lasting `amount / rate`.
    Continuous { amount: f64, rate: f64, start: f64 },
    /// Instantaneous concentration jump of `amount` at `time`.
    Discrete { time: f64, amount: f64 },
}

#[derive(Clone, Copy, Debug)]
pub struct DoseSchedule {
    /// Index of the species receiving the dose.
    pub target: usize,
    pub mode: DoseMode,
}

impl DoseSchedule {
    fn validate(&self, n_species: usize, span: (f64, f64)) -> Result<()> {
        if self.target >= n_species {
            return Err(Error::InvalidInput(format!(
                "dose targets species index {} out of range",
                self.target
            )));
        }
        match self.mode {
            DoseMode::Continuous { amount, rate, .. } => {
                if amount <= 0.0 || rate <= 0.0 {
                    return Err(Error::InvalidInput(
                        "continuous dose amount and rate must be positive".into(),
                    ));
                }
            }
            DoseMode::Discrete { time, amount } => {
                if amount <= 0.0 {
                    return Err(Error::InvalidInput("discrete dose amount must be positive".into()));
                }
                if time < span.0 || time > span.1 {
                    return Err(Error::InvalidInput(format!(
                        "discrete dose time {time} outside simulation span [{}, {}]",
                        span.0, span.1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Integrate the system over `grid`, applying dose schedules.
///
/// Continuous doses add a constant rate term to the target species while the
/// dose window is active. Discrete doses apply an instantaneous jump; the
/// integration restarts at the dose time, and a grid point coinciding with a
/// dose time reports the pre-jump state. Events (dose times, window edges)
/// split the run into segments so no step straddles a discontinuity.
pub fn simulate(
    system: &ReactionSystem,
    grid: &[f64],
    cfg: &IntegratorConfig,
    doses: &[DoseSchedule],
) -> Result<Matrix> {
    if grid.len() < 2 {
        return Err(Error::InvalidInput("grid needs at least two points".into()));
    }
    let t0 = grid[0];
    let t_end = *grid.last().unwrap();
    for d in doses {
        d.validate(system.n_species(), (t0, t_end))?;
    }

    // Segment boundaries: start, end, every discontinuity in between.
    let mut events: Vec<f64> = vec![t0, t_end];
    for d in doses {
        match d.mode {
            DoseMode::Continuous { amount, rate, start } => {
                for t in [start, start + amount / rate] {
                    if t > t0 && t < t_end {
                        events.push(t);
                    }
                }
            }
            DoseMode::Discrete { time, .. } => {
                if time > t0 && time < t_end {
                    events.push(time);
                }
            }
        }
    }
    events.sort_by(f64::total_cmp);
    events.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    let n = system.n_species();
    let mut out = Matrix::zeros(grid.len(), n);
    let mut y = system.y0.clone();
    let mut next_grid = 0usize;

    let dosed_rhs = |t: f64, y: &[f64], dydt: &mut [f64]| {
        system.rhs(t, y, dydt);
        for d in doses {
            if let DoseMode::Continuous { amount, rate, start } = d.mode {
                if t >= start && t < start + amount / rate {
                    dydt[d.target] += rate;
                }
            }
        }
    };

    for w in events.windows(2) {
        let (seg_a, seg_b) = (w[0], w[1]);
        // Local grid: segment endpoints plus requested points inside.
        let mut local = vec![seg_a];
        let mut emit = Vec::new(); // (local index, output row)
        while next_grid < grid.len() && grid[next_grid] <= seg_b + 1e-12 {
            let tg = grid[next_grid];
            if (tg - seg_a).abs() < 1e-12 {
                emit.push((0, next_grid));
            } else {
                local.push(tg.min(seg_b));
                emit.push((local.len() - 1, next_grid));
            }
            next_grid += 1;
        }
        if (*local.last().unwrap() - seg_b).abs() > 1e-12 {
            local.push(seg_b);
        }

        let sol = odeint::integrate(dosed_rhs, &y, &local, cfg)
            .map_err(|e| Error::Integration(format!("{e} (dose segment [{seg_a}, {seg_b}])")))?;
        for &(li, row) in &emit {
            out.row_mut(row).copy_from_slice(sol.states.row(li));
        }
        y = sol.states.row(sol.states.rows() - 1).to_vec();

        // Apply any jump scheduled exactly at the segment end.
        for d in doses {
            if let DoseMode::Discrete { time, amount } = d.mode {
                if (time - seg_b).abs() < 1e-12 && seg_b < t_end {
                    y[d.target] += amount;
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

/// Relative gap below which the equal-initial-concentration branch is used;
/// the general formula is 0/0 at X0 = Y0.
pub const EQUAL_INITIALS_THRESHOLD: f64 = 1e-8;

/// Exact solution of X + Y → Z with rate k·X·Y.
pub fn bimolecular_closed_form(
    k: f64,
    x0: f64,
    y0: f64,
    z0: f64,
    t: f64,
) -> Result<(f64, f64, f64)> {
    if x0 <= 0.0 || y0 <= 0.0 {
        return Err(Error::Domain(format!(
            "initial concentrations must be positive, got X0={x0}, Y0={y0}"
        )));
    }
    let x = if (x0 - y0).abs() < EQUAL_INITIALS_THRESHOLD * x0.max(y0) {
        // Equal-concentration limit: dX/dt = -k X^2.
        x0 / (1.0 + x0 * k * t)
    } else {
        // Overflow in the exponential drives the ratio to the correct
        // limiting value (0 when Y is in excess), so no clamping is needed.
        x0 * (x0 - y0) / (x0 - y0 * ((y0 - x0) * k * t).exp())
    };
    Ok((x, x - x0 + y0, z0 + x0 - x))
}

/// Rate parameters for the Michaelis–Menten closed form.
#[derive(Clone, Copy, Debug)]
pub struct MmClosedFormParams {
    pub k1: f64,
    pub k1r: f64,
    pub k2: f64,
    pub s0: f64,
    pub k0: f64,
}

impl MmClosedFormParams {
    pub fn new(k1: f64, k1r: f64, k2: f64, s0: f64, k0: f64) -> Result<Self> {
        let p = Self { k1, k1r, k2, s0, k0 };
        if !(p.km() > 0.0) || !(p.vmax() > 0.0) {
            return Err(Error::Domain(format!(
                "derived K_M = {} and vmax = {} must both be positive",
                p.km(),
                p.vmax()
            )));
        }
        Ok(p)
    }

    /// Michaelis constant (k1r + k2) / k1.
    pub fn km(&self) -> f64 {
        (self.k1r + self.k2) / self.k1
    }

    /// Limiting rate k2 · K0.
    pub fn vmax(&self) -> f64 {
        self.k2 * self.k0
    }
}

/// Quasi-steady-state closed form for the Michaelis–Menten mechanism.
///
/// S comes from the Lambert-W integrated rate law; the complex follows the
/// QSSA level with an exponential burst factor; K closes the enzyme mass
/// balance and P mirrors the consumed substrate. All four columns therefore
/// live in span{S, SK, 1}, so the trajectory matrix has rank exactly 3.
pub fn mm_qssa_closed_form(p: &MmClosedFormParams, t: f64) -> Result<[f64; 4]> {
    if t < 0.0 {
        return Err(Error::Domain(format!("time must be non-negative, got {t}")));
    }
    let km = p.km();
    // S = K_M * W0((S0/K_M) * exp((-vmax t + S0)/K_M)), evaluated in log
    // domain so large t / extreme concentration ratios cannot overflow.
    let u = (p.s0 / km).ln() + (-p.vmax() * t + p.s0) / km;
    let s = km * lambert_w0_exp(u);
    let sk = (p.k0 * s / (km + s)) * (1.0 - (-(km + s) * p.k1 * t).exp());
    // W0 >= 0 and the burst factor lies in [0, 1], so every entry is
    // nonnegative without clamping: s <= s0 and sk <= k0.
    Ok([s, p.k0 - sk, sk, p.s0 - s])
}

/// Principal-branch Lambert W: returns w with w·e^w = x for x >= -1/e.
///
/// Halley iteration from a branch-aware initial guess; residual accurate to
/// ~1e-15 relative.
pub fn lambert_w0(x: f64) -> Result<f64> {
    let branch_point = -(-1.0f64).exp(); // -1/e
    if !x.is_finite() || x < branch_point - 1e-15 {
        return Err(Error::Domain(format!("Lambert W0 needs x >= -1/e, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let mut w = if x < -0.25 {
        // Series around the branch point in p = sqrt(2(e x + 1)).
        let p = (2.0 * (std::f64::consts::E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < std::f64::consts::E {
        // ln(1+x) is exact at 0 and within ~20% over the interval.
        (1.0 + x).ln()
    } else {
        let l = x.ln();
        l - l.ln()
    };
    for _ in 0..50 {
        let ew = w.exp();
        let f = w * ew - x;
        let denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
        let dw = f / denom;
        w -= dw;
        if dw.abs() <= 1e-16 * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}

/// W0(e^u) without forming e^u, valid for any real u.
///
/// For u <= 700 this defers to [`lambert_w0`]; beyond that, e^u overflows,
/// so Newton is run on w + ln w = u from the asymptotic start u - ln u.
pub fn lambert_w0_exp(u: f64) -> f64 {
    if u <= 700.0 {
        // e^u is representable (underflow to 0 for very negative u is the
        // correct limit: W0(0) = 0).
        return lambert_w0(u.exp()).expect("e^u >= 0 is always in the W0 domain");
    }
    let mut w = u - u.ln();
    for _ in 0..50 {
        let f = w + w.ln() - u;
        let dw = f / (1.0 + 1.0 / w);
        w -= dw;
        if dw.abs() <= 1e-16 * w {
            break;
        }
    }
    w
}

// ---------------------------------------------------------------------------
// Reduced two-equation Michaelis–Menten systems
// ---------------------------------------------------------------------------

/// Which pair of species is propagated by the reduced system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MmReducedVariant {
    /// Propagate (S, P); SK and K come from the mass balances.
    Sp,
    /// Propagate (S, K); SK and P come from the mass balances.
    Sk,
}

/// Two-equation reformulation of the Michaelis–Menten mechanism. Because the
/// remaining species are reconstructed from the conservation laws, the
/// resulting four-column trajectory is rank-deficient by construction.
#[derive(Clone, Copy, Debug)]
pub struct MmReduced {
    pub params: MmClosedFormParams,
    pub variant: MmReducedVariant,
}

impl MmReduced {
    pub fn new(params: MmClosedFormParams, variant: MmReducedVariant) -> Self {
        Self { params, variant }
    }

    /// Initial state of the propagated pair.
    pub fn y0(&self) -> [f64; 2] {
        match self.variant {
            MmReducedVariant::Sp => [self.params.s0, 0.0],
            MmReducedVariant::Sk => [self.params.s0, self.params.k0],
        }
    }

    pub fn rhs(&self, _t: f64, y: &[f64], dydt: &mut [f64]) {
        let p = &self.params;
        match self.variant {
            MmReducedVariant::Sp => {
                let (s, prod) = (y[0], y[1]);
                dydt[0] = -p.k1 * (s + prod + p.k0 - p.s0) * s + p.k1r * (p.s0 - s - prod);
                dydt[1] = p.k2 * (p.s0 - s - prod);
            }
            MmReducedVariant::Sk => {
                let (s, k) = (y[0], y[1]);
                dydt[0] = -p.k1 * s * k + p.k1r * (p.k0 - k);
                dydt[1] = -p.k1 * s * k + (p.k1r + p.k2) * (p.k0 - k);
            }
        }
    }

    /// Expand a propagated pair to the full (S, K, SK, P) state.
    pub fn reconstruct(&self, y: &[f64]) -> [f64; 4] {
        let p = &self.params;
        match self.variant {
            MmReducedVariant::Sp => {
                let (s, prod) = (y[0], y[1]);
                let sk = p.s0 - s - prod;
                [s, p.k0 - sk, sk, prod]
            }
            MmReducedVariant::Sk => {
                let (s, k) = (y[0], y[1]);
                let sk = p.k0 - k;
                [s, k, sk, p.s0 - sk - s]
            }
        }
    }

    /// Integrate the reduced pair and return the reconstructed 4-species
    /// trajectory.
    pub fn simulate(&self, grid: &[f64], cfg: &IntegratorConfig) -> Result<Matrix> {
        let sol = odeint::integrate(
            |t, y, dydt| self.rhs(t, y, dydt),
            &self.y0(),
            grid,
            cfg,
        )?;
        let mut out = Matrix::zeros(grid.len(), 4);
        for i in 0..grid.len() {
            out.row_mut(i).copy_from_slice(&self.reconstruct(sol.states.row(i)));
        }
        Ok(out)
    }
}

pub fn mm_reduced_systems(p: &MmClosedFormParams, variant: MmReducedVariant) -> MmReduced {
    MmReduced::new(*p, variant)
}

// ---------------------------------------------------------------------------
// JSON loading
// ---------------------------------------------------------------------------

#[derive(serde::Deserialize)]
struct ReactionDoc {
    reactants: BTreeMap<String, u32>,
    #[serde(default)]
    products: BTreeMap<String, u32>,
    k: f64,
}

#[derive(serde::Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
enum DoseDoc {
    Continuous { target: String, amount: f64, rate: f64, #[serde(default)] start: f64 },
    Discrete { target: String, time: f64, amount: f64 },
}

#[derive(serde::Deserialize)]
struct SystemDoc {
    species: Vec<String>,
    reactions: Vec<ReactionDoc>,
    y0: Vec<f64>,
    #[serde(default)]
    doses: Vec<DoseDoc>,
}

/// Parse a reaction-system document: `{"species": [...], "reactions":
/// [{"reactants": {...}, "products": {...}, "k": ...}], "y0": [...],
/// "doses": [...]}`. Species in stoichiometry maps and dose targets are
/// referenced by name.
pub fn system_from_json(text: &str) -> Result<(ReactionSystem, Vec<DoseSchedule>)> {
    let doc: SystemDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    let index_of = |name: &str| -> Result<usize> {
        doc.species
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown species name {name:?}")))
    };
    let mut reactions = Vec::with_capacity(doc.reactions.len());
    for r in &doc.reactions {
        let map = |m: &BTreeMap<String, u32>| -> Result<Vec<(usize, u32)>> {
            m.iter().map(|(name, &c)| index_of(name).map(|i| (i, c))).collect()
        };
        reactions.push(Reaction { reactants: map(&r.reactants)?, products: map(&r.products)?, k: r.k });
    }
    let mut doses = Vec::with_capacity(doc.doses.len());
    for d in &doc.doses {
        doses.push(match d {
            DoseDoc::Continuous { target, amount, rate, start } => DoseSchedule {
                target: index_of(target)?,
                mode: DoseMode::Continuous { amount: *amount, rate: *rate, start: *start },
            },
            DoseDoc::Discrete { target, time, amount } => DoseSchedule {
                target: index_of(target)?,
                mode: DoseMode::Discrete { time: *time, amount: *amount },
            },
        });
    }
    let system = ReactionSystem::new(doc.species, reactions, doc.y0)?;
    Ok((system, doses))
}

// ---------------------------------------------------------------------------
// Built-in presets
// ---------------------------------------------------------------------------

/// Named model systems and grids used throughout the workbench.
pub mod presets {
    use super::*;

    /// Uniformly spaced grid of `n` points over [a, b].
    pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    pub const BIMOLECULAR_K: f64 = 12.0;

    /// X + Y → Z with X0 = 1, Y0 = 0.7, Z0 = 0.2, k = 12.
    pub fn bimolecular() -> ReactionSystem {
        ReactionSystem::new(
            vec!["X".into(), "Y".into(), "Z".into()],
            vec![Reaction { reactants: vec![(0, 1), (1, 1)], products: vec![(2, 1)], k: BIMOLECULAR_K }],
            vec![1.0, 0.7, 0.2],
        )
        .expect("static preset")
    }

    /// Same reaction with the X and Y initial amounts swapped (X0 = 0.7,
    /// Y0 = 1.0); stacking the two runs breaks the rank-1 degeneracy of the
    /// concentration difference.
    pub fn bimolecular_swapped() -> ReactionSystem {
        ReactionSystem::new(
            vec!["X".into(), "Y".into(), "Z".into()],
            vec![Reaction { reactants: vec![(0, 1), (1, 1)], products: vec![(2, 1)], k: BIMOLECULAR_K }],
            vec![0.7, 1.0, 0.2],
        )
        .expect("static preset")
    }

    /// 78-point output grid over [0, 3.5] s, quadratically densified toward
    /// t = 0 where the transient is fast (t_i = 3.5·(i/77)^2). Mimics the
    /// point density an adaptive solver's natural output would have.
    pub fn bimolecular_grid() -> Vec<f64> {
        (0..78).map(|i| 3.5 * (i as f64 / 77.0).powi(2)).collect()
    }

    /// Michaelis–Menten mechanism S + K ⇌ SK → P + K with k1 = 20,
    /// k1r = 0.1, k2 = 3 and y0 = (1, 0.1, 0, 0).
    pub fn michaelis_menten() -> ReactionSystem {
        mm_system_with_enzyme(0.1)
    }

    fn mm_system_with_enzyme(k0: f64) -> ReactionSystem {
        ReactionSystem::new(
            vec!["S".into(), "K".into(), "SK".into(), "P".into()],
            vec![
                Reaction { reactants: vec![(0, 1), (1, 1)], products: vec![(2, 1)], k: 20.0 },
                Reaction { reactants: vec![(2, 1)], products: vec![(0, 1), (1, 1)], k: 0.1 },
                Reaction { reactants: vec![(2, 1)], products: vec![(1, 1), (3, 1)], k: 3.0 },
            ],
            vec![1.0, k0, 0.0, 0.0],
        )
        .expect("static preset")
    }

    pub fn mm_params() -> MmClosedFormParams {
        MmClosedFormParams::new(20.0, 0.1, 3.0, 1.0, 0.1).expect("static preset")
    }

    /// The two conservation laws of the mechanism: total enzyme
    /// (K + SK = 0.1) and a zero-sum linear combination of both balances.
    pub fn mm_conservation_laws() -> Vec<ConservationLaw> {
        vec![
            ConservationLaw::new(vec![0.0, 1.0, 1.0, 0.0], 0.1),
            ConservationLaw::new(vec![1.0, -10.0, -9.0, 1.0], 0.0),
        ]
    }

    /// 241-point uniform grid over the base run span [0, 7.5] s.
    pub fn mm_grid() -> Vec<f64> {
        linspace(0.0, 7.5, 241)
    }

    /// The two reference dose sizes: the main variant uses 0.005 mol
    /// with 0.095 initial enzyme; the worked code uses 0.0005 / 0.0995.
    #[derive(Clone, Copy, Debug, PartialEq, Eq)]
    pub enum DosePreset {
        Text,
        Supp,
    }

    impl DosePreset {
        pub fn amount(self) -> f64 {
            match self {
                DosePreset::Text => 0.005,
                DosePreset::Supp => 0.0005,
            }
        }

        /// Enzyme initially present (total 0.1 minus the withheld dose).
        pub fn enzyme_initial(self) -> f64 {
            0.1 - self.amount()
        }
    }

    /// Run length as a function of dose size: linear between
    /// (0.0005, 7.5 s) and (0.1, 15 s).
    pub fn dose_stop_time(amount: f64) -> f64 {
        7.5 + (15.0 - 7.5) / (0.1 - 0.0005) * (amount - 0.0005)
    }

    /// Michaelis–Menten system with the dose withheld from the initial
    /// enzyme pool.
    pub fn dosed_system(preset: DosePreset) -> ReactionSystem {
        mm_system_with_enzyme(preset.enzyme_initial())
    }

    /// Constant-rate enzyme inflow spread over the whole run.
    pub fn continuous_dose(preset: DosePreset) -> DoseSchedule {
        let amount = preset.amount();
        DoseSchedule {
            target: 1,
            mode: DoseMode::Continuous { amount, rate: amount / dose_stop_time(amount), start: 0.0 },
        }
    }

    /// Single enzyme spike at t = 3 s.
    pub fn discrete_dose(preset: DosePreset) -> DoseSchedule {
        DoseSchedule { target: 1, mode: DoseMode::Discrete { time: 3.0, amount: preset.amount() } }
    }

    /// Output grid for the continuous-dose runs (301 points over [0, 15]).
    pub fn continuous_dose_grid() -> Vec<f64> {
        linspace(0.0, 15.0, 301)
    }

    /// Output grid for the spiked runs; denser (1001 points) because the
    /// jump at the spike needs resolution for stable spectral recovery.
    pub fn discrete_dose_grid() -> Vec<f64> {
        linspace(0.0, 15.0, 1001)
    }
}
