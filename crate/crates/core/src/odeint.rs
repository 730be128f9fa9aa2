//! Adaptive explicit Runge–Kutta integration with embedded error pairs.
//!
//! Two methods are provided: the classical Dormand–Prince 5(4) pair and the
//! Hairer–Nørsett–Wanner 8th-order pair with combined 5th/3rd-order error
//! estimation (the DOP853 tableau). Output is sampled by clipping steps to
//! land exactly on a caller-supplied grid — no dense interpolation — so runs
//! are bit-reproducible.

use crate::matcore::Matrix;
use std::fmt;

/// Integration method selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Method {
    /// Dormand–Prince 5(4), 7 stages (FSAL).
    Rk45,
    /// High-order pair of nominal order 8 (DOP853 core, 12 stages).
    Rk89,
}

impl Method {
    /// Nominal propagation order.
    pub fn nominal_order(self) -> usize {
        match self {
            Method::Rk45 => 5,
            Method::Rk89 => 8,
        }
    }
}

/// Tolerances and limits for one integration run.
#[derive(Clone, Copy, Debug)]
pub struct IntegratorConfig {
    pub method: Method,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Cap on the step size (defaults to the grid span).
    pub max_step: Option<f64>,
    /// First trial step (defaults to an automatic estimate).
    pub initial_step: Option<f64>,
    /// Hard cap on accepted + rejected steps.
    pub max_steps: usize,
}

impl IntegratorConfig {
    pub fn new(method: Method, abs_tol: f64, rel_tol: f64) -> Self {
        Self { method, abs_tol, rel_tol, max_step: None, initial_step: None, max_steps: 10_000_000 }
    }

    /// Loose-tolerance profile mirroring a default-accuracy solver run
    /// (abs 1e-6, rel 1e-3 on RK45).
    pub fn low_accuracy() -> Self {
        Self::new(Method::Rk45, 1e-6, 1e-3)
    }

    /// Tight-tolerance RK45 profile (abs 1e-14, rel 1e-11).
    pub fn rk45_tight() -> Self {
        Self::new(Method::Rk45, 1e-14, 1e-11)
    }

    /// Tight-tolerance high-order profile.
    pub fn rk89_tight() -> Self {
        Self::new(Method::Rk89, 1e-13, 1e-12)
    }

    fn validate(&self) -> Result<(), String> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(format!("abs_tol must be positive and finite, got {}", self.abs_tol));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(format!("rel_tol must be positive and finite, got {}", self.rel_tol));
        }
        Ok(())
    }
}

/// Trajectory sampled on the requested output grid.
#[derive(Clone, Debug)]
pub struct OdeSolution {
    pub times: Vec<f64>,
    /// grid points x state dimension.
    pub states: Matrix,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
}

/// Failure carrying whatever part of the trajectory was completed.
#[derive(Debug)]
pub struct IntegrationError {
    pub message: String,
    /// Time at which integration stopped.
    pub t: f64,
    /// Solution up to (and including) the last completed grid point.
    pub partial: Option<OdeSolution>,
}

impl fmt::Display for IntegrationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (at t = {})", self.message, self.t)
    }
}

impl std::error::Error for IntegrationError {}

impl From<IntegrationError> for crate::Error {
    fn from(e: IntegrationError) -> Self {
        crate::Error::Integration(e.to_string())
    }
}

// ---------------------------------------------------------------------------
// Tableaux
// ---------------------------------------------------------------------------

// Dormand–Prince 5(4) (Dormand & Prince 1980; also Hairer–Nørsett–Wanner,
// Solving Ordinary Differential Equations I, DOPRI5).
const DP5_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP5_A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP5_B: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
// b - b_hat (5th minus embedded 4th order weights).
const DP5_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

// DOP853 12-stage core (Hairer, Nørsett & Wanner, Solving Ordinary
// Differential Equations I, 2nd ed., dop853.f coefficients).
const D853_C: [f64; 12] = [
    0.0,
    5.260_015_195_876_773E-2,
    7.890_022_793_815_16E-2,
    1.183_503_419_072_274E-1,
    2.816_496_580_927_726E-1,
    3.333_333_333_333_333E-1,
    0.25,
    3.076_923_076_923_077E-1,
    6.512_820_512_820_513E-1,
    0.6,
    8.571_428_571_428_571E-1,
    1.0,
];

const D853_A: [[f64; 11]; 12] = [
    [0.0; 11],
    [5.260_015_195_876_773E-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.972_505_698_453_79E-2, 5.917_517_095_361_37E-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [
        2.958_758_547_680_685E-2,
        0.0,
        8.876_275_643_042_054E-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        2.413_651_341_592_667E-1,
        0.0,
        -8.845_494_793_282_861E-1,
        9.248_340_032_617_92E-1,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.703_703_703_703_703_5E-2,
        0.0,
        0.0,
        1.708_286_087_294_738_6E-1,
        1.254_676_875_668_224_2E-1,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.7109375E-2,
        0.0,
        0.0,
        1.702_522_110_195_440_5E-1,
        6.021_653_898_045_596E-2,
        -1.7578125E-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.709_200_011_850_479E-2,
        0.0,
        0.0,
        1.703_839_257_122_399_8E-1,
        1.072_620_304_463_732_8E-1,
        -1.531_943_774_862_440_2E-2,
        8.273_789_163_814_023E-3,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        6.241_109_587_160_757E-1,
        0.0,
        0.0,
        -3.360_892_629_446_941_4,
        -8.682_193_468_417_26E-1,
        2.759_209_969_944_671E1,
        2.015_406_755_047_789_4E1,
        -4.348_988_418_106_996E1,
        0.0,
        0.0,
        0.0,
    ],
    [
        4.776_625_364_382_643_4E-1,
        0.0,
        0.0,
        -2.488_114_619_971_667_7,
        -5.902_908_268_368_43E-1,
        2.123_005_144_818_119_3E1,
        1.527_923_363_288_242_3E1,
        -3.328_821_096_898_486E1,
        -2.033_120_170_850_862_7E-2,
        0.0,
        0.0,
    ],
    [
        -9.371_424_300_859_873E-1,
        0.0,
        0.0,
        5.186_372_428_844_064,
        1.091_437_348_996_729_5,
        -8.149_787_010_746_927,
        -1.852_006_565_999_696E1,
        2.273_948_709_935_050_5E1,
        2.493_605_552_679_652_3,
        -3.046_764_471_898_219_6,
        0.0,
    ],
    [
        2.273_310_147_516_538,
        0.0,
        0.0,
        -1.053_449_546_673_725E1,
        -2.000_872_058_224_862_5,
        -1.795_893_186_311_88E1,
        2.794_888_452_941_996E1,
        -2.858_998_277_135_023_5,
        -8.872_856_933_530_63,
        1.236_056_717_579_430_3E1,
        6.433_927_460_157_636E-1,
    ],
];

const D853_B: [f64; 12] = [
    5.429_373_411_656_876_5E-2,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450_312_892_752_409,
    1.891_517_899_314_500_3,
    -5.801_203_960_010_585,
    3.111_643_669_578_199E-1,
    -1.521_609_496_625_161E-1,
    2.013_654_008_040_303_4E-1,
    4.471_061_572_777_259E-2,
];

// 3rd-order error weights.
const D853_ER: [f64; 12] = [
    1.312_004_499_419_488E-2,
    0.0,
    0.0,
    0.0,
    0.0,
    -1.225_156_446_376_204_4,
    -4.957_589_496_572_502E-1,
    1.664_377_182_454_986_4,
    -3.503_288_487_499_736_6E-1,
    3.341_791_187_130_175E-1,
    8.192_320_648_511_571E-2,
    -2.235_530_786_388_629_4E-2,
];

// 5th-order comparison weights applied to stages 1, 9, 12.
const D853_BHH: [f64; 3] =
    [2.440_944_881_889_764E-1, 7.338_466_882_816_118E-1, 2.205_882_352_941_176_6E-2];

const SAFETY: f64 = 0.9;
const SHRINK_LIMIT: f64 = 0.2;
const GROWTH_LIMIT: f64 = 5.0;

// ---------------------------------------------------------------------------
// Core stepping
// ---------------------------------------------------------------------------

struct StepOut {
    y_new: Vec<f64>,
    /// Scaled error estimate; accept when <= 1.
    err: f64,
}

fn rk_step<F>(rhs: &mut F, method: Method, t: f64, y: &[f64], f0: &[f64], h: f64, cfg: &IntegratorConfig) -> Option<StepOut>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y.len();
    match method {
        Method::Rk45 => {
            let mut k = vec![vec![0.0; n]; 7];
            k[0].copy_from_slice(f0);
            let mut yt = vec![0.0; n];
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = 0.0;
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += DP5_A[s][j] * kj[i];
                    }
                    yt[i] = y[i] + h * acc;
                }
                let (head, tail) = k.split_at_mut(s);
                let _ = head;
                rhs(t + DP5_C[s] * h, &yt, &mut tail[0]);
            }
            let mut y_new = vec![0.0; n];
            let mut err_acc = 0.0;
            for i in 0..n {
                let mut dy = 0.0;
                let mut e = 0.0;
                for s in 0..7 {
                    dy += DP5_B[s] * k[s][i];
                    e += DP5_E[s] * k[s][i];
                }
                y_new[i] = y[i] + h * dy;
                let scale = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
                let r = h * e / scale;
                err_acc += r * r;
            }
            let err = (err_acc / n as f64).sqrt();
            if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                return None;
            }
            Some(StepOut { y_new, err })
        }
        Method::Rk89 => {
            let mut k = vec![vec![0.0; n]; 12];
            k[0].copy_from_slice(f0);
            let mut yt = vec![0.0; n];
            for s in 1..12 {
                for i in 0..n {
                    let mut acc = 0.0;
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += D853_A[s][j] * kj[i];
                    }
                    yt[i] = y[i] + h * acc;
                }
                let (head, tail) = k.split_at_mut(s);
                let _ = head;
                rhs(t + D853_C[s] * h, &yt, &mut tail[0]);
            }
            let mut y_new = vec![0.0; n];
            let mut err1 = 0.0; // 8th-vs-5th order difference
            let mut err2 = 0.0; // 8th-vs-3rd order difference
            for i in 0..n {
                let mut dy = 0.0;
                let mut e2 = 0.0;
                for s in 0..12 {
                    dy += D853_B[s] * k[s][i];
                    e2 += D853_ER[s] * k[s][i];
                }
                let e1 = dy - D853_BHH[0] * k[0][i] - D853_BHH[1] * k[8][i] - D853_BHH[2] * k[11][i];
                y_new[i] = y[i] + h * dy;
                let scale = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
                err1 += (e1 / scale) * (e1 / scale);
                err2 += (e2 / scale) * (e2 / scale);
            }
            let mut deno = err1 + 0.01 * err2;
            if deno <= 0.0 {
                deno = 1.0;
            }
            let err = h.abs() * err1 * (1.0 / (n as f64 * deno)).sqrt();
            if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                return None;
            }
            Some(StepOut { y_new, err })
        }
    }
}

/// Automatic initial-step estimate (simplified from the classical scheme:
/// balance the first derivative against the tolerance scale, then refine
/// with one explicit Euler probe).
fn initial_step_guess<F>(
    rhs: &mut F,
    t0: f64,
    y0: &[f64],
    f0: &[f64],
    span: f64,
    order: usize,
    cfg: &IntegratorConfig,
) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let sc: Vec<f64> = y0.iter().map(|y| cfg.abs_tol + cfg.rel_tol * y.abs()).collect();
    let d0 = (y0.iter().zip(&sc).map(|(y, s)| (y / s) * (y / s)).sum::<f64>() / n as f64).sqrt();
    let d1 = (f0.iter().zip(&sc).map(|(f, s)| (f / s) * (f / s)).sum::<f64>() / n as f64).sqrt();
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(span);
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, f)| y + h0 * f).collect();
    let mut f1 = vec![0.0; n];
    rhs(t0 + h0, &y1, &mut f1);
    let d2 = (f1
        .iter()
        .zip(f0)
        .zip(&sc)
        .map(|((a, b), s)| ((a - b) / s) * ((a - b) / s))
        .sum::<f64>()
        / n as f64)
        .sqrt()
        / h0;
    let d_max = d1.max(d2);
    let h1 = if d_max <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d_max).powf(1.0 / (order + 1) as f64)
    };
    (100.0 * h0).min(h1).min(span)
}

/// Integrate `dy/dt = rhs(t, y)` from `grid[0]` and sample the solution at
/// every grid point. Steps never cross a grid point: the step size is
/// clipped so the integrator lands on each requested time exactly.
pub fn integrate<F>(
    mut rhs: F,
    y0: &[f64],
    grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<OdeSolution, IntegrationError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if let Err(message) = cfg.validate() {
        return Err(IntegrationError { message, t: f64::NAN, partial: None });
    }
    if grid.is_empty() || y0.is_empty() {
        return Err(IntegrationError {
            message: "empty grid or state".into(),
            t: f64::NAN,
            partial: None,
        });
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(IntegrationError {
            message: "output grid must be strictly increasing".into(),
            t: grid[0],
            partial: None,
        });
    }
    let n = y0.len();
    let t0 = grid[0];
    let t_end = *grid.last().unwrap();
    let span = t_end - t0;

    let mut states = Matrix::zeros(grid.len(), n);
    states.row_mut(0).copy_from_slice(y0);
    if grid.len() == 1 {
        return Ok(OdeSolution {
            times: grid.to_vec(),
            states,
            steps_accepted: 0,
            steps_rejected: 0,
        });
    }

    let order = cfg.method.nominal_order();
    // I/PI controller exponents (estimator-order based).
    let (expo1, beta) = match cfg.method {
        Method::Rk45 => (0.2 - 0.75 * 0.04, 0.04),
        Method::Rk89 => (1.0 / 8.0, 0.0),
    };
    let max_step = cfg.max_step.unwrap_or(span).abs().min(span);

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut f = vec![0.0; n];
    rhs(t, &y, &mut f);
    if f.iter().any(|v| !v.is_finite()) {
        return Err(IntegrationError {
            message: "non-finite derivative at the initial state".into(),
            t,
            partial: None,
        });
    }
    let mut h = cfg
        .initial_step
        .unwrap_or_else(|| initial_step_guess(&mut rhs, t0, y0, &f, span, order, cfg))
        .min(max_step);
    let mut fac_old: f64 = 1e-4;
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut next_out = 1usize;

    let make_partial = |states: &Matrix, filled: usize, accepted, rejected| {
        if filled == 0 {
            return None;
        }
        let part = Matrix::from_fn(filled, n, |i, j| states[(i, j)]);
        Some(OdeSolution {
            times: grid[..filled].to_vec(),
            states: part,
            steps_accepted: accepted,
            steps_rejected: rejected,
        })
    };

    while next_out < grid.len() {
        if accepted + rejected >= cfg.max_steps {
            return Err(IntegrationError {
                message: format!("step limit {} exceeded", cfg.max_steps),
                t,
                partial: make_partial(&states, next_out, accepted, rejected),
            });
        }
        let t_target = grid[next_out];
        let mut h_try = h.min(max_step).min(t_target - t);
        let min_h = (t.abs().max(1.0)) * f64::EPSILON * 16.0;
        if h_try < min_h {
            h_try = min_h.min(t_target - t);
        }
        let landing = t + h_try >= t_target - min_h;
        let h_use = if landing { t_target - t } else { h_try };

        let step = rk_step(&mut rhs, cfg.method, t, &y, &f, h_use, cfg);
        let step = match step {
            Some(s) => s,
            None => {
                return Err(IntegrationError {
                    message: "non-finite value produced by the right-hand side".into(),
                    t,
                    partial: make_partial(&states, next_out, accepted, rejected),
                });
            }
        };
        let err = step.err.max(1e-30);
        if step.err <= 1.0 {
            accepted += 1;
            t = if landing { t_target } else { t + h_use };
            y = step.y_new;
            rhs(t, &y, &mut f);
            if f.iter().any(|v| !v.is_finite()) {
                return Err(IntegrationError {
                    message: "non-finite derivative during integration".into(),
                    t,
                    partial: make_partial(&states, next_out, accepted, rejected),
                });
            }
            if landing {
                states.row_mut(next_out).copy_from_slice(&y);
                next_out += 1;
            }
            let fac = err.powf(expo1) / fac_old.powf(beta);
            let scale = (SAFETY / fac).clamp(SHRINK_LIMIT, GROWTH_LIMIT);
            h = (h_use * scale).min(max_step);
            fac_old = err.max(1e-4);
        } else {
            rejected += 1;
            let fac = err.powf(expo1);
            let scale = (SAFETY / fac).clamp(SHRINK_LIMIT, 1.0);
            h = h_use * scale;
            if h < min_h {
                return Err(IntegrationError {
                    message: "step size underflow".into(),
                    t,
                    partial: make_partial(&states, next_out, accepted, rejected),
                });
            }
        }
    }

    Ok(OdeSolution {
        times: grid.to_vec(),
        states,
        steps_accepted: accepted,
        steps_rejected: rejected,
    })
}

/// Advance with a fixed step count and no error control (propagation weights
/// only). Exists so empirical convergence order can be measured.
pub fn fixed_step<F>(
    mut rhs: F,
    y0: &[f64],
    t0: f64,
    t1: f64,
    n_steps: usize,
    method: Method,
) -> Vec<f64>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let cfg = IntegratorConfig::new(method, 1.0, 1.0); // tolerances unused
    let n = y0.len();
    let h = (t1 - t0) / n_steps as f64;
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut f = vec![0.0; n];
    for _ in 0..n_steps {
        rhs(t, &y, &mut f);
        if let Some(step) = rk_step(&mut rhs, method, t, &y, &f, h, &cfg) {
            y = step.y_new;
        }
        t += h;
    }
    y
}
