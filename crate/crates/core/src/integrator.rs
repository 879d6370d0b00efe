//! Explicit Runge-Kutta propagation of first-order ODE systems.
//!
//! Two methods are provided: classical fixed-step RK4, and Dormand-Prince
//! 5(4) with an embedded error estimate and adaptive step control. Both
//! report the solution on a uniform output grid; internal steps are clipped
//! so they land exactly on every output time.

use crate::{Error, Result};

/// A first-order system `dy/dt = f(t, y)`.
pub trait OdeSystem {
    fn dim(&self) -> usize;

    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]) -> Result<()>;

    /// Hook run once before every new step (rejected-step retries reuse the
    /// previous call). The right-hand side must stay fixed between calls.
    /// Returns `true` if the right-hand side changed.
    fn begin_step(&mut self, _t: f64, _y: &[f64]) -> bool {
        false
    }
}

/// Adapts a closure into an [`OdeSystem`].
pub struct FnSystem<F> {
    dim: usize,
    f: F,
}

impl<F> FnSystem<F>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> OdeSystem for FnSystem<F>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]) -> Result<()> {
        (self.f)(t, y, dydt);
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Rk4,
    Rk45,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Final time (s).
    pub t_end: f64,
    /// Spacing of the reported samples (s).
    pub output_step: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Largest adaptive step (s).
    pub max_step: f64,
    /// Largest RK4 step (s); each output interval is split into equal steps
    /// no longer than this.
    pub fixed_step: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Rk45,
            t_end: 100.0,
            output_step: 0.1,
            rel_tol: 1e-6,
            abs_tol: 1e-8,
            max_step: 0.1,
            fixed_step: 1e-4,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("t_end", self.t_end),
            ("output_step", self.output_step),
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("max_step", self.max_step),
            ("fixed_step", self.fixed_step),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("{v} must be positive")));
            }
        }
        Ok(())
    }

    /// Output timestamps `k·output_step`, ending at `t_end`.
    pub fn output_times(&self) -> Vec<f64> {
        let ratio = self.t_end / self.output_step;
        let n = ratio.round();
        let mut times: Vec<f64> = if (ratio - n).abs() <= 1e-9 * ratio.max(1.0) {
            (0..=n as usize)
                .map(|k| k as f64 * self.output_step)
                .collect()
        } else {
            (0..=ratio.floor() as usize)
                .map(|k| k as f64 * self.output_step)
                .collect()
        };
        if let Some(&last) = times.last() {
            if self.t_end - last > 1e-9 * self.output_step {
                times.push(self.t_end);
            }
        }
        times
    }
}

/// Samples of the solution on the output grid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Solution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub stats: Stats,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evaluations: usize,
}

/// An integration that stopped early; `partial` holds every sample
/// produced before the failure, the last one being the last good state.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationFailure {
    pub error: Error,
    pub partial: Solution,
}

/// Result of one explicit step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub state: Vec<f64>,
    /// Embedded local error estimate (RK45 only).
    pub error: Option<Vec<f64>>,
}

/// Takes one step of size `h` from `(t, y)`.
pub fn step<S: OdeSystem + ?Sized>(
    method: Method,
    sys: &S,
    t: f64,
    y: &[f64],
    h: f64,
) -> Result<StepResult> {
    if h.is_nan() || h <= 0.0 {
        return Err(Error::invalid("h", format!("step {h} must be positive")));
    }
    let mut work = Workspace::new(y.len());
    let mut out = vec![0.0; y.len()];
    match method {
        Method::Rk4 => {
            rk4_step(sys, t, y, h, &mut work, &mut out)?;
            Ok(StepResult {
                state: out,
                error: None,
            })
        }
        Method::Rk45 => {
            eval(sys, t, y, &mut work.k[0])?;
            let mut err = vec![0.0; y.len()];
            dopri_step(sys, t, y, h, &mut work, &mut out, &mut err)?;
            Ok(StepResult {
                state: out,
                error: Some(err),
            })
        }
    }
}

/// Propagates `y0` from `t = 0` to `config.t_end`.
pub fn integrate<S: OdeSystem + ?Sized>(
    sys: &mut S,
    y0: &[f64],
    config: &IntegratorConfig,
) -> std::result::Result<Solution, Box<IntegrationFailure>> {
    let mut solution = Solution::default();
    let fail = |error: Error, partial: Solution| Box::new(IntegrationFailure { error, partial });
    if let Err(e) = config.validate() {
        return Err(fail(e, solution));
    }
    if y0.len() != sys.dim() {
        let e = Error::invalid(
            "initial state",
            format!(
                "length {} does not match system dimension {}",
                y0.len(),
                sys.dim()
            ),
        );
        return Err(fail(e, solution));
    }
    if let Some(i) = y0.iter().position(|v| !v.is_finite()) {
        let e = Error::NonFinite {
            term: format!("initial state component {i}"),
            t: 0.0,
        };
        return Err(fail(e, solution));
    }

    let times = config.output_times();
    solution.times.push(times[0]);
    solution.states.push(y0.to_vec());
    let outcome = match config.method {
        Method::Rk4 => run_rk4(sys, y0, &times, config, &mut solution),
        Method::Rk45 => run_dopri(sys, y0, &times, config, &mut solution),
    };
    match outcome {
        Ok(()) => Ok(solution),
        Err(e) => Err(fail(e, solution)),
    }
}

struct Workspace {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
        }
    }
}

fn eval<S: OdeSystem + ?Sized>(sys: &S, t: f64, y: &[f64], out: &mut [f64]) -> Result<()> {
    sys.rhs(t, y, out).map_err(|e| stamp(e, t))?;
    if let Some(i) = out.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            term: format!("derivative component {i}"),
            t,
        });
    }
    Ok(())
}

fn stamp(e: Error, t: f64) -> Error {
    match e {
        Error::NonFinite { term, t: stamped } if stamped.is_nan() => Error::NonFinite { term, t },
        other => other,
    }
}

fn rk4_step<S: OdeSystem + ?Sized>(
    sys: &S,
    t: f64,
    y: &[f64],
    h: f64,
    w: &mut Workspace,
    out: &mut [f64],
) -> Result<()> {
    let Workspace { k, tmp } = w;
    let [k1, k2, k3, k4, ..] = k;
    eval(sys, t, y, k1)?;
    for i in 0..y.len() {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    eval(sys, t + 0.5 * h, tmp, k2)?;
    for i in 0..y.len() {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    eval(sys, t + 0.5 * h, tmp, k3)?;
    for i in 0..y.len() {
        tmp[i] = y[i] + h * k3[i];
    }
    eval(sys, t + h, tmp, k4)?;
    for i in 0..y.len() {
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(())
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Difference between the 5th- and embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One Dormand-Prince step; expects `w.k[0] = f(t, y)` and leaves
/// `w.k[6] = f(t + h, out)`.
fn dopri_step<S: OdeSystem + ?Sized>(
    sys: &S,
    t: f64,
    y: &[f64],
    h: f64,
    w: &mut Workspace,
    out: &mut [f64],
    err: &mut [f64],
) -> Result<()> {
    let n = y.len();
    for stage in 1..7 {
        let (done, rest) = w.k.split_at_mut(stage);
        for i in 0..n {
            let mut acc = 0.0;
            for (j, kj) in done.iter().enumerate() {
                acc += A[stage][j] * kj[i];
            }
            w.tmp[i] = y[i] + h * acc;
        }
        if stage == 6 {
            out.copy_from_slice(&w.tmp);
        }
        eval(sys, t + C[stage] * h, &w.tmp, &mut rest[0])?;
    }
    for i in 0..n {
        let mut acc = 0.0;
        for (j, kj) in w.k.iter().enumerate() {
            acc += E[j] * kj[i];
        }
        err[i] = h * acc;
    }
    Ok(())
}

fn error_norm(y: &[f64], y_new: &[f64], err: &[f64], config: &IntegratorConfig) -> f64 {
    let sum: f64 = y
        .iter()
        .zip(y_new)
        .zip(err)
        .map(|((a, b), e)| {
            let scale = config.abs_tol + config.rel_tol * a.abs().max(b.abs());
            (e / scale).powi(2)
        })
        .sum();
    (sum / y.len() as f64).sqrt()
}

fn run_rk4<S: OdeSystem + ?Sized>(
    sys: &mut S,
    y0: &[f64],
    times: &[f64],
    config: &IntegratorConfig,
    solution: &mut Solution,
) -> Result<()> {
    let n = y0.len();
    let mut work = Workspace::new(n);
    let mut y = y0.to_vec();
    let mut next = vec![0.0; n];
    for window in times.windows(2) {
        let (start, target) = (window[0], window[1]);
        let substeps = ((target - start) / config.fixed_step - 1e-9)
            .ceil()
            .max(1.0) as usize;
        let h = (target - start) / substeps as f64;
        for i in 0..substeps {
            let t = start + i as f64 * h;
            sys.begin_step(t, &y);
            rk4_step(sys, t, &y, h, &mut work, &mut next)?;
            std::mem::swap(&mut y, &mut next);
            solution.stats.accepted_steps += 1;
            solution.stats.rhs_evaluations += 4;
        }
        solution.times.push(target);
        solution.states.push(y.clone());
    }
    Ok(())
}

fn initial_step<S: OdeSystem + ?Sized>(
    sys: &S,
    t: f64,
    y: &[f64],
    f0: &[f64],
    config: &IntegratorConfig,
    stats: &mut Stats,
) -> Result<f64> {
    let norm = |v: &[f64]| -> f64 {
        let s: f64 = v
            .iter()
            .zip(y)
            .map(|(vi, yi)| (vi / (config.abs_tol + config.rel_tol * yi.abs())).powi(2))
            .sum();
        (s / v.len() as f64).sqrt()
    };
    let d0 = norm(y);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    }
    .min(config.max_step);
    let y1: Vec<f64> = y.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
    let mut f1 = vec![0.0; y.len()];
    eval(sys, t + h0, &y1, &mut f1)?;
    stats.rhs_evaluations += 1;
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok((100.0 * h0).min(h1).min(config.max_step))
}

fn run_dopri<S: OdeSystem + ?Sized>(
    sys: &mut S,
    y0: &[f64],
    times: &[f64],
    config: &IntegratorConfig,
    solution: &mut Solution,
) -> Result<()> {
    const SAFETY: f64 = 0.9;
    const MIN_FACTOR: f64 = 0.2;
    const MAX_FACTOR: f64 = 5.0;
    let n = y0.len();
    let h_floor = 1e-12 * config.t_end;
    let mut work = Workspace::new(n);
    let mut y = y0.to_vec();
    let mut y_new = vec![0.0; n];
    let mut err = vec![0.0; n];
    let mut t = times[0];

    sys.begin_step(t, &y);
    eval(sys, t, &y, &mut work.k[0])?;
    solution.stats.rhs_evaluations += 1;
    let mut h = initial_step(sys, t, &y, &work.k[0], config, &mut solution.stats)?;
    let mut fresh_step = false;

    for &target in &times[1..] {
        while t < target {
            if fresh_step {
                if sys.begin_step(t, &y) {
                    eval(sys, t, &y, &mut work.k[0])?;
                    solution.stats.rhs_evaluations += 1;
                }
                fresh_step = false;
            }
            let proposed = h.min(config.max_step);
            let remaining = target - t;
            let lands = proposed >= remaining * (1.0 - 1e-12);
            let h_try = if lands { remaining } else { proposed };

            dopri_step(sys, t, &y, h_try, &mut work, &mut y_new, &mut err)?;
            solution.stats.rhs_evaluations += 6;
            let norm = error_norm(&y, &y_new, &err, config);
            if !norm.is_finite() {
                return Err(Error::NonFinite {
                    term: "local error estimate".into(),
                    t,
                });
            }

            if norm <= 1.0 {
                t = if lands { target } else { t + h_try };
                std::mem::swap(&mut y, &mut y_new);
                let (first, last) = work.k.split_at_mut(6);
                first[0].copy_from_slice(&last[0]);
                solution.stats.accepted_steps += 1;
                fresh_step = true;
                let factor = if norm == 0.0 {
                    MAX_FACTOR
                } else {
                    (SAFETY * norm.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
                };
                // a step shortened to hit the grid does not shrink the proposal
                h = if lands {
                    proposed.max(h_try * factor)
                } else {
                    h_try * factor
                };
            } else {
                solution.stats.rejected_steps += 1;
                h = h_try * (SAFETY * norm.powf(-0.2)).max(MIN_FACTOR);
                if h < h_floor {
                    return Err(Error::StepUnderflow { t, h });
                }
            }
        }
        solution.times.push(target);
        solution.states.push(y.clone());
    }
    Ok(())
}
