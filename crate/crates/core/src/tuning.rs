//! Gain selection by repeated closed-loop rollouts.
//!
//! Candidate gains are scored by a weighted scalar [`cost`] of the run
//! summary in which lift-off dominates every other term. Two searches are
//! available: an exhaustive lattice ([`SearchMethod::Grid`]) and a compass
//! (pattern) search. Both work on `log10` of the gains, since useful values
//! span several orders of magnitude.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::control::Gains;
use crate::sim::{self, fmt_f64, RunSummary, Scenario};
use crate::{Error, Result};

/// Cost added by a lift-off before weighting.
pub const LIFTOFF_PENALTY: f64 = 1e6;

/// Tunable gains, in lexicographic (tie-break) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GainName {
    Kx,
    Ky,
    Kvy,
    K1,
    K2,
}

impl GainName {
    pub const ALL: [GainName; 5] = [Self::Kx, Self::Ky, Self::Kvy, Self::K1, Self::K2];

    pub fn key(self) -> &'static str {
        match self {
            Self::Kx => "k_x",
            Self::Ky => "k_y",
            Self::Kvy => "k_vy",
            Self::K1 => "k_1",
            Self::K2 => "k_2",
        }
    }

    pub fn get(self, g: &Gains) -> f64 {
        match self {
            Self::Kx => g.k_x,
            Self::Ky => g.k_y,
            Self::Kvy => g.k_vy,
            Self::K1 => g.k_1,
            Self::K2 => g.k_2,
        }
    }

    pub fn set(self, g: &mut Gains, value: f64) {
        match self {
            Self::Kx => g.k_x = value,
            Self::Ky => g.k_y = value,
            Self::Kvy => g.k_vy = value,
            Self::K1 => g.k_1 = value,
            Self::K2 => g.k_2 = value,
        }
    }
}

/// Search range for one gain. Gains without a bound keep their scenario value.
#[derive(Debug, Clone, PartialEq)]
pub struct GainBound {
    pub gain: GainName,
    pub low: f64,
    pub high: f64,
    /// Grid resolution: log-spaced points from `low` to `high`. A single
    /// point means the scenario's current value.
    pub points: usize,
    /// Explicit grid values; overrides `points` when present.
    pub values: Option<Vec<f64>>,
}

impl GainBound {
    pub fn new(gain: GainName, low: f64, high: f64) -> Self {
        Self {
            gain,
            low,
            high,
            points: 3,
            values: None,
        }
    }

    fn contains(&self, v: f64) -> bool {
        v >= self.low && v <= self.high
    }

    fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.low, self.high)
    }

    /// Sorted grid values along this axis.
    fn axis(&self, baseline: f64) -> Result<Vec<f64>> {
        let mut values = match (&self.values, self.points) {
            (Some(v), _) => v.clone(),
            (None, 1) => vec![baseline],
            (None, n) => {
                let (lo, hi) = (self.low.log10(), self.high.log10());
                let mut v: Vec<f64> = (0..n)
                    .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (n - 1) as f64))
                    .collect();
                v[0] = self.low;
                v[n - 1] = self.high;
                v
            }
        };
        if let Some(bad) = values.iter().find(|v| !self.contains(**v)) {
            return Err(Error::invalid(
                "tuning grid",
                format!(
                    "{} value {bad} outside bounds [{}, {}]",
                    self.gain.key(),
                    self.low,
                    self.high
                ),
            ));
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        Ok(values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostWeights {
    pub drift: f64,
    pub settle: f64,
    pub liftoff: f64,
    pub effort: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self {
            drift: 1.0,
            settle: 0.1,
            liftoff: 1.0,
            effort: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMethod {
    Grid,
    PatternSearch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuningSpec {
    pub bounds: Vec<GainBound>,
    pub weights: CostWeights,
    /// Maximum number of rollouts.
    pub budget: usize,
    pub method: SearchMethod,
    /// Simulated duration of each rollout (s).
    pub eval_horizon: f64,
}

impl Default for TuningSpec {
    fn default() -> Self {
        Self {
            bounds: vec![
                GainBound::new(GainName::K1, 400.0, 40_000.0),
                GainBound::new(GainName::K2, 400.0, 40_000.0),
            ],
            weights: CostWeights::default(),
            budget: 30,
            method: SearchMethod::PatternSearch,
            eval_horizon: 10.0,
        }
    }
}

impl TuningSpec {
    pub fn validate(&self) -> Result<()> {
        if self.bounds.is_empty() {
            return Err(Error::invalid(
                "tuning bounds",
                "at least one gain must be bounded",
            ));
        }
        for (i, b) in self.bounds.iter().enumerate() {
            if self.bounds[..i].iter().any(|o| o.gain == b.gain) {
                return Err(Error::invalid(
                    "tuning bounds",
                    format!("{} bounded twice", b.gain.key()),
                ));
            }
            if !(b.low > 0.0 && b.low < b.high && b.high.is_finite()) {
                return Err(Error::invalid(
                    "tuning bounds",
                    format!(
                        "{} needs 0 < low < high, got [{}, {}]",
                        b.gain.key(),
                        b.low,
                        b.high
                    ),
                ));
            }
            if b.points == 0 {
                return Err(Error::invalid("tuning bounds", "points must be at least 1"));
            }
            if matches!(&b.values, Some(v) if v.is_empty()) {
                return Err(Error::invalid(
                    "tuning bounds",
                    "explicit values must not be empty",
                ));
            }
        }
        let w = &self.weights;
        let ws = [w.drift, w.settle, w.liftoff, w.effort];
        if ws.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::invalid(
                "cost weights",
                "weights must be non-negative",
            ));
        }
        if ws.iter().all(|v| *v == 0.0) {
            return Err(Error::invalid(
                "cost weights",
                "at least one weight must be positive",
            ));
        }
        if self.budget == 0 {
            return Err(Error::invalid("budget", "at least one rollout is required"));
        }
        if !(self.eval_horizon > 0.0 && self.eval_horizon.is_finite()) {
            return Err(Error::invalid("eval_horizon", "must be positive"));
        }
        Ok(())
    }

    fn sorted_bounds(&self) -> Vec<GainBound> {
        let mut b = self.bounds.clone();
        b.sort_by_key(|b| b.gain);
        b
    }
}

/// Scalar score of a rollout; lower is better. A run that never settles
/// is charged the full evaluation horizon.
pub fn cost(summary: &RunSummary, weights: &CostWeights, eval_horizon: f64) -> f64 {
    let settle = if summary.settle_time_omega.is_finite() {
        summary.settle_time_omega
    } else {
        eval_horizon
    };
    let liftoff = if summary.liftoff {
        LIFTOFF_PENALTY
    } else {
        0.0
    };
    weights.drift * summary.max_abs_x
        + weights.settle * settle
        + weights.liftoff * liftoff
        + weights.effort * summary.effort
}

/// One rollout of the search.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub iteration: usize,
    pub gains: Gains,
    /// Infinite for a failed rollout.
    pub cost: f64,
    /// Whether the search moved to (or started from) this point.
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuningResult {
    pub best: Gains,
    pub best_cost: f64,
    pub trace: Vec<TraceEntry>,
    /// One line per failed rollout.
    pub failures: Vec<String>,
}

pub const TRACE_HEADER: &str = "iteration,k_x,k_y,k_vy,k_1,k_2,cost,accepted";

impl TuningResult {
    pub fn write_trace_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{TRACE_HEADER}")?;
        for e in &self.trace {
            let g = &e.gains;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                e.iteration,
                fmt_f64(g.k_x),
                fmt_f64(g.k_y),
                fmt_f64(g.k_vy),
                fmt_f64(g.k_1),
                fmt_f64(g.k_2),
                fmt_f64(e.cost),
                e.accepted
            )?;
        }
        Ok(())
    }
}

/// Evaluates one candidate with the rollout horizon applied.
pub fn evaluate(scenario: &Scenario, gains: Gains, spec: &TuningSpec) -> Result<f64, String> {
    let mut sc = *scenario;
    sc.gains = gains;
    sc.integrator.t_end = spec.eval_horizon;
    sim::run(&sc)
        .map(|out| cost(&out.summary, &spec.weights, spec.eval_horizon))
        .map_err(|f| f.to_string())
}

struct Evaluator<'a> {
    scenario: &'a Scenario,
    spec: &'a TuningSpec,
    trace: Vec<TraceEntry>,
    failures: Vec<String>,
}

impl Evaluator<'_> {
    fn remaining(&self) -> usize {
        self.spec.budget - self.trace.len()
    }

    /// Evaluates a batch in parallel and appends it to the trace in order.
    fn batch(&mut self, candidates: &[Gains]) -> Vec<f64> {
        let results: Vec<Result<f64, String>> = candidates
            .par_iter()
            .map(|g| evaluate(self.scenario, *g, self.spec))
            .collect();
        results
            .into_iter()
            .zip(candidates)
            .map(|(r, g)| {
                let iteration = self.trace.len();
                let cost = r.unwrap_or_else(|msg| {
                    self.failures.push(format!("rollout {iteration}: {msg}"));
                    f64::INFINITY
                });
                self.trace.push(TraceEntry {
                    iteration,
                    gains: *g,
                    cost,
                    accepted: false,
                });
                cost
            })
            .collect()
    }

    fn accept(&mut self, iteration: usize) {
        self.trace[iteration].accepted = true;
    }

    fn finish(self) -> Result<TuningResult> {
        let best = self
            .trace
            .iter()
            .rfind(|e| e.accepted)
            .filter(|e| e.cost.is_finite())
            .cloned();
        match best {
            Some(e) => Ok(TuningResult {
                best: e.gains,
                best_cost: e.cost,
                trace: self.trace,
                failures: self.failures,
            }),
            None => Err(Error::AllRolloutsFailed { log: self.failures }),
        }
    }
}

/// Searches the bounded gains of `scenario` for the lowest-cost setting.
pub fn tune(scenario: &Scenario, spec: &TuningSpec) -> Result<TuningResult> {
    spec.validate()?;
    scenario.validate()?;
    let mut ev = Evaluator {
        scenario,
        spec,
        trace: Vec::new(),
        failures: Vec::new(),
    };
    match spec.method {
        SearchMethod::Grid => grid_search(&mut ev)?,
        SearchMethod::PatternSearch => pattern_search(&mut ev),
    }
    ev.finish()
}

/// Every lattice point, in lexicographic gain order.
pub fn lattice(scenario: &Scenario, spec: &TuningSpec) -> Result<Vec<Gains>> {
    let mut points = vec![scenario.gains];
    for bound in spec.sorted_bounds() {
        let axis = bound.axis(bound.gain.get(&scenario.gains))?;
        points = points
            .into_iter()
            .flat_map(|g| {
                axis.iter().map(move |v| {
                    let mut next = g;
                    bound.gain.set(&mut next, *v);
                    next
                })
            })
            .collect();
    }
    Ok(points)
}

fn grid_search(ev: &mut Evaluator<'_>) -> Result<()> {
    let points = lattice(ev.scenario, ev.spec)?;
    if points.len() > ev.spec.budget {
        return Err(Error::invalid(
            "budget",
            format!(
                "grid has {} points but the budget allows {} rollouts",
                points.len(),
                ev.spec.budget
            ),
        ));
    }
    let costs = ev.batch(&points);
    // first strict minimum wins ties
    let mut best: Option<usize> = None;
    for (i, c) in costs.iter().enumerate() {
        if c.is_finite() && best.is_none_or(|b| *c < costs[b]) {
            best = Some(i);
        }
    }
    if let Some(i) = best {
        ev.accept(i);
    }
    Ok(())
}

/// Compass search: poll ±step along each log-gain axis, move to the best
/// improving poll point, halve the step when none improves.
fn pattern_search(ev: &mut Evaluator<'_>) {
    let bounds = ev.spec.sorted_bounds();
    let log_range: Vec<f64> = bounds
        .iter()
        .map(|b| b.high.log10() - b.low.log10())
        .collect();

    let mut current = ev.scenario.gains;
    for b in &bounds {
        let v = b.clamp(b.gain.get(&current));
        b.gain.set(&mut current, v);
    }
    let mut current_cost = ev.batch(&[current])[0];
    ev.accept(0);
    // step as a fraction of each axis' log range
    let mut step = 0.25;

    while ev.remaining() > 0 && step >= 1e-3 {
        let mut stencil = Vec::new();
        for (b, range) in bounds.iter().zip(&log_range) {
            let here = b.gain.get(&current).log10();
            for dir in [1.0, -1.0] {
                let v = b.clamp(10f64.powf(here + dir * step * range));
                if v != b.gain.get(&current) {
                    let mut g = current;
                    b.gain.set(&mut g, v);
                    stencil.push(g);
                }
            }
        }
        stencil.truncate(ev.remaining());
        if stencil.is_empty() {
            step *= 0.5;
            continue;
        }
        let first = ev.trace.len();
        let costs = ev.batch(&stencil);
        let mut best: Option<usize> = None;
        for (i, c) in costs.iter().enumerate() {
            if *c < best.map_or(current_cost, |b| costs[b]) {
                best = Some(i);
            }
        }
        match best {
            Some(i) => {
                current = stencil[i];
                current_cost = costs[i];
                ev.accept(first + i);
            }
            None => step *= 0.5,
        }
    }
}
