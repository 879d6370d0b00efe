//! Closed-loop scenarios: assembly, propagation, recording and metrics.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::control::{self, ControlOutput, Gains};
use crate::dynamics::{
    self, DisturbanceModel, DisturbanceSource, ExcavatorParams, ExcavatorState, WheelForces,
    STATE_DIM,
};
use crate::integrator::{self, IntegratorConfig, OdeSystem};
use crate::regolith::ForceBreakdown;
use crate::{Error, Result, PHOBOS_ESCAPE_VELOCITY};

/// Height above the surface (m) that counts toward lift-off.
pub const LIFTOFF_HEIGHT: f64 = 1e-3;
/// How long (s) the excavator must stay above [`LIFTOFF_HEIGHT`] to be
/// flagged as lifted off.
pub const LIFTOFF_DURATION: f64 = 0.5;
/// Settling band as a fraction of the desired wheel speed.
pub const SETTLING_BAND: f64 = 0.05;

/// A complete, runnable simulation setup.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Scenario {
    pub params: ExcavatorParams,
    pub gains: Gains,
    pub disturbance: DisturbanceModel,
    pub integrator: IntegratorConfig,
    pub initial_state: ExcavatorState,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.gains.validate()?;
        self.integrator.validate()?;
        if !self.initial_state.is_finite() {
            return Err(Error::invalid(
                "initial_state",
                "all components must be finite",
            ));
        }
        Ok(())
    }

    /// The same scenario with a different disturbance seed.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.disturbance.seed = seed;
        self
    }
}

/// Everything recorded at one output sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub state: ExcavatorState,
    pub forces: [ForceBreakdown; 2],
    pub controls: ControlOutput,
    pub disturbances: [f64; 2],
}

/// Time series of a run; all series share one length.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ExcavatorState>,
    pub forces: Vec<[ForceBreakdown; 2]>,
    pub controls: Vec<ControlOutput>,
    pub disturbances: Vec<[f64; 2]>,
}

pub const TRAJECTORY_HEADER: &str =
    "t,x,y,vx,vy,theta1,omega1,theta2,omega2,Fr1,Fr2,F1,F2,tau1,tau2,dist1,dist2";

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn push(&mut self, s: Sample) {
        self.times.push(s.t);
        self.states.push(s.state);
        self.forces.push(s.forces);
        self.controls.push(s.controls);
        self.disturbances.push(s.disturbances);
    }

    pub fn sample(&self, i: usize) -> Sample {
        Sample {
            t: self.times[i],
            state: self.states[i],
            forces: self.forces[i],
            controls: self.controls[i],
            disturbances: self.disturbances[i],
        }
    }

    /// Mean shaft power `τ₁·ω₁ + τ₂·ω₂` over the samples (W).
    pub fn mean_mechanical_power(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let total: f64 = self
            .states
            .iter()
            .zip(&self.controls)
            .map(|(s, c)| c.tau1 * s.omega1 + c.tau2 * s.omega2)
            .sum();
        total / self.len() as f64
    }

    /// Writes the trajectory as CSV, one row per sample, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{TRAJECTORY_HEADER}")?;
        for i in 0..self.len() {
            let s = self.sample(i);
            let st = s.state;
            let row = [
                s.t,
                st.x,
                st.y,
                st.vx,
                st.vy,
                st.theta1,
                st.omega1,
                st.theta2,
                st.omega2,
                s.forces[0].f_total,
                s.forces[1].f_total,
                s.controls.f1,
                s.controls.f2,
                s.controls.tau1,
                s.controls.tau2,
                s.disturbances[0],
                s.disturbances[1],
            ];
            let line: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Headline metrics of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    /// max |x(t)| (m).
    pub max_abs_x: f64,
    pub min_y: f64,
    pub max_y: f64,
    /// First time both wheels enter and stay within the settling band (s);
    /// infinite if they never do.
    pub settle_time_omega: f64,
    /// Largest translational speed (m/s).
    pub max_speed: f64,
    pub liftoff: bool,
    /// `max_speed` divided by the Phobos escape velocity.
    pub escape_margin: f64,
    /// Mean `|τ₁| + |τ₂|` normalised by `K₁·ω_des`.
    pub effort: f64,
}

pub const SUMMARY_HEADER: &str =
    "max_abs_x,min_y,max_y,settle_time_omega,max_speed,liftoff,escape_margin,effort";

impl RunSummary {
    pub fn csv_fields(&self) -> String {
        [
            fmt_f64(self.max_abs_x),
            fmt_f64(self.min_y),
            fmt_f64(self.max_y),
            fmt_f64(self.settle_time_omega),
            fmt_f64(self.max_speed),
            self.liftoff.to_string(),
            fmt_f64(self.escape_margin),
            fmt_f64(self.effort),
        ]
        .join(",")
    }
}

/// Extracts the [`RunSummary`] from a recorded trajectory.
///
/// # Panics
/// On an empty trajectory.
pub fn summarize(trajectory: &Trajectory, gains: &Gains) -> RunSummary {
    assert!(
        !trajectory.is_empty(),
        "cannot summarize an empty trajectory"
    );
    let states = &trajectory.states;
    let times = &trajectory.times;

    let max_abs_x = states.iter().map(|s| s.x.abs()).fold(0.0, f64::max);
    let min_y = states.iter().map(|s| s.y).fold(f64::INFINITY, f64::min);
    let max_y = states.iter().map(|s| s.y).fold(f64::NEG_INFINITY, f64::max);
    let max_speed = states.iter().map(ExcavatorState::speed).fold(0.0, f64::max);

    let band = SETTLING_BAND * gains.omega_des.abs();
    let within = |err: f64| err < band || err == 0.0;
    let settled = |s: &ExcavatorState| {
        within((s.omega1 - gains.omega_des).abs()) && within((s.omega2 + gains.omega_des).abs())
    };
    let settle_time_omega = match states.iter().rposition(|s| !settled(s)) {
        None => times[0],
        Some(i) if i + 1 < times.len() => times[i + 1],
        Some(_) => f64::INFINITY,
    };

    let mut liftoff = false;
    let mut above_since: Option<f64> = None;
    for (t, s) in times.iter().zip(states) {
        if s.y > LIFTOFF_HEIGHT {
            let start = *above_since.get_or_insert(*t);
            if t - start > LIFTOFF_DURATION {
                liftoff = true;
                break;
            }
        } else {
            above_since = None;
        }
    }

    let mean_torque = trajectory
        .controls
        .iter()
        .map(|c| c.tau1.abs() + c.tau2.abs())
        .sum::<f64>()
        / trajectory.len() as f64;
    let scale = gains.k_1 * gains.omega_des.abs();
    let effort = if scale > 0.0 {
        mean_torque / scale
    } else {
        mean_torque
    };

    RunSummary {
        max_abs_x,
        min_y,
        max_y,
        settle_time_omega,
        max_speed,
        liftoff,
        escape_margin: max_speed / PHOBOS_ESCAPE_VELOCITY,
        effort,
    }
}

/// The closed-loop excavator as an ODE system. Each integrator step draws
/// one disturbance fraction per wheel and holds it through the stages; the
/// increment at any stage is that fraction of half the current force.
struct ClosedLoop<'a> {
    scenario: &'a Scenario,
    wheels: WheelForces,
    source: DisturbanceSource,
    fractions: [f64; 2],
    sample_times: &'a [f64],
    next_sample: usize,
    sample_fractions: Vec<[f64; 2]>,
}

impl<'a> ClosedLoop<'a> {
    fn new(scenario: &'a Scenario, sample_times: &'a [f64]) -> Result<Self> {
        Ok(Self {
            scenario,
            wheels: WheelForces::new(&scenario.params)?,
            source: DisturbanceSource::new(scenario.disturbance),
            fractions: [0.0; 2],
            sample_times,
            next_sample: 0,
            sample_fractions: vec![[0.0; 2]; sample_times.len()],
        })
    }

    fn evaluate(&self, state: &ExcavatorState, fractions: [f64; 2]) -> Result<Sample> {
        let sc = self.scenario;
        let controls = control::compute_controls(state, &sc.gains, sc.params.hold_force_limit)?;
        let forces = self.wheels.evaluate(state);
        Ok(Sample {
            t: f64::NAN,
            state: *state,
            forces,
            controls,
            disturbances: [
                fractions[0] * 0.5 * forces[0].f_total,
                fractions[1] * 0.5 * forces[1].f_total,
            ],
        })
    }
}

impl OdeSystem for ClosedLoop<'_> {
    fn dim(&self) -> usize {
        STATE_DIM
    }

    fn rhs(&self, _t: f64, y: &[f64], dydt: &mut [f64]) -> Result<()> {
        let state = ExcavatorState::from_slice(y);
        let s = self.evaluate(&state, self.fractions)?;
        let d = dynamics::derivatives_with_forces(
            &state,
            &self.scenario.params,
            &s.controls,
            [
                s.forces[0].f_total + s.disturbances[0],
                s.forces[1].f_total + s.disturbances[1],
            ],
        )?;
        dydt.copy_from_slice(&d);
        Ok(())
    }

    fn begin_step(&mut self, t: f64, _y: &[f64]) -> bool {
        if !self.scenario.disturbance.enabled {
            return false;
        }
        self.fractions = [self.source.sample_fraction(), self.source.sample_fraction()];
        while self.next_sample < self.sample_times.len() && self.sample_times[self.next_sample] <= t
        {
            self.sample_fractions[self.next_sample] = self.fractions;
            self.next_sample += 1;
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub trajectory: Trajectory,
    pub summary: RunSummary,
}

/// A failed run with every sample recorded before the failure.
#[derive(Debug, Clone, PartialEq)]
pub struct SimFailure {
    pub error: Error,
    pub partial: Trajectory,
}

impl std::fmt::Display for SimFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.partial.times.last() {
            Some(t) => write!(f, "{} (last good sample at t = {t})", self.error),
            None => write!(f, "{}", self.error),
        }
    }
}

impl std::error::Error for SimFailure {}

/// Propagates the closed-loop system and records the trajectory.
pub fn run(scenario: &Scenario) -> std::result::Result<RunOutput, Box<SimFailure>> {
    if let Err(error) = scenario.validate() {
        return Err(Box::new(SimFailure {
            error,
            partial: Trajectory::default(),
        }));
    }
    let times = scenario.integrator.output_times();
    let mut system = match ClosedLoop::new(scenario, &times) {
        Ok(system) => system,
        Err(error) => {
            return Err(Box::new(SimFailure {
                error,
                partial: Trajectory::default(),
            }))
        }
    };
    let result = integrator::integrate(
        &mut system,
        &scenario.initial_state.to_array(),
        &scenario.integrator,
    );
    let (solution, error) = match result {
        Ok(sol) => (sol, None),
        Err(failure) => (failure.partial, Some(failure.error)),
    };

    // samples after the last step start hold the final draw
    let last = system.fractions;
    for f in &mut system.sample_fractions[system.next_sample..] {
        *f = last;
    }

    let mut trajectory = Trajectory::default();
    for (k, (t, y)) in solution.times.iter().zip(&solution.states).enumerate() {
        let state = ExcavatorState::from_slice(y);
        match system.evaluate(&state, system.sample_fractions[k]) {
            Ok(mut s) => {
                s.t = *t;
                trajectory.push(s);
            }
            Err(e) => {
                return Err(Box::new(SimFailure {
                    error: e,
                    partial: trajectory,
                }))
            }
        }
    }
    if let Some(error) = error {
        return Err(Box::new(SimFailure {
            error,
            partial: trajectory,
        }));
    }
    let summary = summarize(&trajectory, &scenario.gains);
    Ok(RunOutput {
        trajectory,
        summary,
    })
}

/// min / mean / max of one metric across runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricStats {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

impl MetricStats {
    fn from_values(values: impl Iterator<Item = f64>) -> Option<Self> {
        let mut n = 0usize;
        let (mut min, mut max, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
        for v in values {
            n += 1;
            min = min.min(v);
            max = max.max(v);
            sum += v;
        }
        (n > 0).then(|| Self {
            min,
            mean: sum / n as f64,
            max,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateStats {
    pub max_abs_x: MetricStats,
    pub min_y: MetricStats,
    pub max_y: MetricStats,
    pub settle_time_omega: MetricStats,
    pub max_speed: MetricStats,
    pub escape_margin: MetricStats,
    pub effort: MetricStats,
    /// Fraction of successful runs flagged as lifted off.
    pub liftoff_frequency: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeededRun {
    pub seed: u64,
    pub outcome: std::result::Result<RunSummary, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    /// One entry per seed, in seed order.
    pub runs: Vec<SeededRun>,
    /// `None` when every run failed.
    pub stats: Option<AggregateStats>,
}

impl MonteCarloReport {
    pub fn failures(&self) -> usize {
        self.runs.iter().filter(|r| r.outcome.is_err()).count()
    }
}

/// Runs the scenario for seeds `base_seed, base_seed + 1, …` in parallel.
/// Individual failures are recorded in the report rather than aborting.
pub fn monte_carlo(scenario: &Scenario, n_runs: usize, base_seed: u64) -> Result<MonteCarloReport> {
    if n_runs == 0 {
        return Err(Error::invalid("n_runs", "at least one run is required"));
    }
    scenario.validate()?;
    let runs: Vec<SeededRun> = (0..n_runs as u64)
        .into_par_iter()
        .map(|i| {
            let seed = base_seed.wrapping_add(i);
            let outcome = run(&scenario.with_seed(seed))
                .map(|out| out.summary)
                .map_err(|f| f.to_string());
            SeededRun { seed, outcome }
        })
        .collect();
    let stats = aggregate(runs.iter().filter_map(|r| r.outcome.as_ref().ok()));
    Ok(MonteCarloReport { runs, stats })
}

/// Per-metric statistics over a set of summaries.
pub fn aggregate<'a>(
    summaries: impl Iterator<Item = &'a RunSummary> + Clone,
) -> Option<AggregateStats> {
    let stat = |f: fn(&RunSummary) -> f64| MetricStats::from_values(summaries.clone().map(f));
    let count = summaries.clone().count();
    let lifted = summaries.clone().filter(|s| s.liftoff).count();
    Some(AggregateStats {
        max_abs_x: stat(|s| s.max_abs_x)?,
        min_y: stat(|s| s.min_y)?,
        max_y: stat(|s| s.max_y)?,
        settle_time_omega: stat(|s| s.settle_time_omega)?,
        max_speed: stat(|s| s.max_speed)?,
        escape_margin: stat(|s| s.escape_margin)?,
        effort: stat(|s| s.effort)?,
        liftoff_frequency: lifted as f64 / count as f64,
    })
}
