//! Planar rigid-body dynamics of the twin-wheel excavator.
//!
//! The body translates in `x` (horizontal) and `y` (vertical, up positive,
//! surface at `y = 0`); each wheel adds a rotation angle and spin rate.
//! Regolith resistance acts on each wheel at the angle
//! `φᵢ = |βᵢ| + (|θᵢ| mod 2π/nᵢ)`: the rake angle plus the phase of the
//! currently engaged bucket within one bucket pitch. The mirrored sign
//! structure of the horizontal equation encodes the counter-rotating
//! geometry, so symmetric operation produces exactly zero horizontal force.
//! With a single bucket the phase is the full wheel angle.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::control::ControlOutput;
use crate::regolith::{self, CuttingModel, ForceBreakdown, SoilProperties};
use crate::{Error, Result};

/// Geometry and mass properties of one bucket wheel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WheelConfig {
    /// Wheel diameter D (m).
    pub diameter: f64,
    /// Bucket (blade) width w (m).
    pub blade_width: f64,
    /// Bucket tool length l (m).
    pub tool_length: f64,
    /// Signed rake angle β (rad).
    pub rake_angle: f64,
    pub n_buckets: u32,
    /// Wheel mass (kg).
    pub wheel_mass: f64,
    /// Spin-axis moment of inertia (kg·m²).
    pub inertia: f64,
}

impl Default for WheelConfig {
    /// The first (clockwise-cutting) wheel of the reference design.
    fn default() -> Self {
        let diameter = 0.622;
        let wheel_mass = 5.0;
        Self {
            diameter,
            blade_width: 6.31e-2,
            tool_length: 0.05,
            rake_angle: 10f64.to_radians(),
            n_buckets: 24,
            wheel_mass,
            inertia: Self::solid_disc_inertia(wheel_mass, diameter),
        }
    }
}

impl WheelConfig {
    /// ½·m·(D/2)².
    pub fn solid_disc_inertia(mass: f64, diameter: f64) -> f64 {
        0.5 * mass * (0.5 * diameter).powi(2)
    }

    /// The same wheel with the rake angle sign flipped.
    pub fn mirrored(&self) -> Self {
        Self {
            rake_angle: -self.rake_angle,
            ..*self
        }
    }

    pub fn radius(&self) -> f64 {
        0.5 * self.diameter
    }

    /// Angular pitch between adjacent buckets (rad).
    pub fn bucket_pitch(&self) -> f64 {
        TAU / f64::from(self.n_buckets)
    }

    /// Direction of the resistance force, measured from the vertical.
    pub fn force_angle(&self, theta: f64) -> f64 {
        self.rake_angle.abs() + theta.abs() % self.bucket_pitch()
    }

    pub fn validate(&self) -> Result<()> {
        regolith::positive("diameter", self.diameter)?;
        regolith::positive("blade_width", self.blade_width)?;
        regolith::positive("tool_length", self.tool_length)?;
        regolith::positive("wheel_mass", self.wheel_mass)?;
        regolith::positive("inertia", self.inertia)?;
        if self.n_buckets == 0 {
            return Err(Error::invalid("n_buckets", "must be at least 1"));
        }
        let beta = self.rake_angle.abs();
        if !(beta > 0.0 && beta < std::f64::consts::FRAC_PI_2) {
            return Err(Error::invalid(
                "rake_angle",
                format!("|{}| rad must lie in (0, π/2)", self.rake_angle),
            ));
        }
        Ok(())
    }
}

/// Everything the equations of motion need besides the state and controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcavatorParams {
    /// Mass carried in addition to the two wheels (kg).
    pub chassis_mass: f64,
    pub wheel_1: WheelConfig,
    pub wheel_2: WheelConfig,
    pub soil: SoilProperties,
    /// Engagement depth limit d_max (m).
    pub max_cut_depth: f64,
    /// Number of blades the force model is applied to per wheel.
    pub engagement_multiplier: f64,
    /// Optional saturation of the total hold-down force (N).
    pub hold_force_limit: Option<f64>,
}

impl Default for ExcavatorParams {
    fn default() -> Self {
        let wheel_1 = WheelConfig::default();
        Self {
            chassis_mass: 0.0,
            wheel_1,
            wheel_2: wheel_1.mirrored(),
            soil: SoilProperties::default(),
            max_cut_depth: 0.1,
            engagement_multiplier: 1.0,
            hold_force_limit: None,
        }
    }
}

impl ExcavatorParams {
    /// Total translating mass m (kg).
    pub fn total_mass(&self) -> f64 {
        self.chassis_mass + self.wheel_1.wheel_mass + self.wheel_2.wheel_mass
    }

    pub fn wheel(&self, index: WheelIndex) -> &WheelConfig {
        match index {
            WheelIndex::First => &self.wheel_1,
            WheelIndex::Second => &self.wheel_2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        regolith::non_negative("chassis_mass", self.chassis_mass)?;
        self.wheel_1.validate()?;
        self.wheel_2.validate()?;
        self.soil.validate()?;
        regolith::positive("max_cut_depth", self.max_cut_depth)?;
        regolith::non_negative("engagement_multiplier", self.engagement_multiplier)?;
        if let Some(limit) = self.hold_force_limit {
            regolith::non_negative("hold_force_limit", limit)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WheelIndex {
    First,
    Second,
}

/// Number of scalar state components.
pub const STATE_DIM: usize = 8;

/// Excavator state. The flat layout used by the integrator is
/// `(x, y, vx, vy, θ₁, ω₁, θ₂, ω₂)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ExcavatorState {
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub theta1: f64,
    pub omega1: f64,
    pub theta2: f64,
    pub omega2: f64,
}

impl ExcavatorState {
    pub fn to_array(&self) -> [f64; STATE_DIM] {
        [
            self.x,
            self.y,
            self.vx,
            self.vy,
            self.theta1,
            self.omega1,
            self.theta2,
            self.omega2,
        ]
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Self {
            x: v[0],
            y: v[1],
            vx: v[2],
            vy: v[3],
            theta1: v[4],
            omega1: v[5],
            theta2: v[6],
            omega2: v[7],
        }
    }

    pub fn speed(&self) -> f64 {
        self.vx.hypot(self.vy)
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// Seeded uniform disturbance on the regolith force magnitude.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DisturbanceModel {
    pub enabled: bool,
    pub seed: u64,
}

/// Owns the generator state for one simulation run.
#[derive(Debug, Clone)]
pub struct DisturbanceSource {
    enabled: bool,
    rng: ChaCha8Rng,
}

impl DisturbanceSource {
    pub fn new(model: DisturbanceModel) -> Self {
        Self {
            enabled: model.enabled,
            rng: ChaCha8Rng::seed_from_u64(model.seed),
        }
    }

    /// Draws an increment uniformly from `[0, f_reg/2]`; 0 when disabled.
    pub fn sample_disturbance(&mut self, f_reg: f64) -> f64 {
        self.sample_fraction() * 0.5 * f_reg
    }

    /// Draws the unit fraction `u ∈ [0, 1)` behind one disturbance sample, so
    /// a step can hold `u` fixed while the force it scales varies between
    /// stages. Returns 0 when disabled, without advancing the generator.
    pub fn sample_fraction(&mut self) -> f64 {
        if self.enabled {
            self.rng.gen::<f64>()
        } else {
            0.0
        }
    }
}

/// Regolith resistance on both wheels at the given state. A wheel above
/// the surface (zero cut depth) carries no force.
pub fn regolith_forces(
    state: &ExcavatorState,
    params: &ExcavatorParams,
) -> Result<[ForceBreakdown; 2]> {
    Ok(WheelForces::new(params)?.evaluate(state))
}

/// Per-wheel cutting models prepared once for a parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WheelForces {
    models: [CuttingModel; 2],
    radii: [f64; 2],
    mirrored: bool,
    max_cut_depth: f64,
    multiplier: f64,
}

impl WheelForces {
    pub fn new(params: &ExcavatorParams) -> Result<Self> {
        Ok(Self {
            models: [
                CuttingModel::new(&params.soil, &params.wheel_1)?,
                CuttingModel::new(&params.soil, &params.wheel_2)?,
            ],
            radii: [params.wheel_1.radius(), params.wheel_2.radius()],
            mirrored: params.wheel_2 == params.wheel_1.mirrored(),
            max_cut_depth: params.max_cut_depth,
            multiplier: params.engagement_multiplier,
        })
    }

    pub fn evaluate(&self, state: &ExcavatorState) -> [ForceBreakdown; 2] {
        let depth = (-state.y).clamp(0.0, self.max_cut_depth);
        if depth == 0.0 {
            return [ForceBreakdown::default(); 2];
        }
        let [r1, r2] = self.radii;
        let first = self.models[0]
            .forces(depth, state.omega1.abs() * r1)
            .scaled(self.multiplier);
        // mirrored wheels at equal spin see identical magnitudes
        let second = if self.mirrored && state.omega1.abs() == state.omega2.abs() {
            first
        } else {
            self.models[1]
                .forces(depth, state.omega2.abs() * r2)
                .scaled(self.multiplier)
        };
        [first, second]
    }
}

/// Moment of the regolith resistance about the wheel axis; always opposes
/// the spin.
pub fn reaction_torque(f_r: f64, geometry: &WheelConfig, omega: f64) -> f64 {
    if omega == 0.0 {
        0.0
    } else {
        -omega.signum() * geometry.radius() * f_r
    }
}

/// Time derivative of the state. `disturbance` is added to each wheel's
/// total regolith force.
pub fn derivatives(
    state: &ExcavatorState,
    params: &ExcavatorParams,
    controls: &ControlOutput,
    disturbance: [f64; 2],
) -> Result<[f64; STATE_DIM]> {
    let forces = regolith_forces(state, params)?;
    derivatives_with_forces(
        state,
        params,
        controls,
        [
            forces[0].f_total + disturbance[0],
            forces[1].f_total + disturbance[1],
        ],
    )
}

/// Time derivative given the already-disturbed resistance magnitudes
/// `F_r1`, `F_r2`.
pub fn derivatives_with_forces(
    state: &ExcavatorState,
    params: &ExcavatorParams,
    controls: &ControlOutput,
    resistance: [f64; 2],
) -> Result<[f64; STATE_DIM]> {
    for (term, v) in [
        ("resistance F_r1", resistance[0]),
        ("resistance F_r2", resistance[1]),
        ("hold-down F1", controls.f1),
        ("hold-down F2", controls.f2),
        ("torque tau1", controls.tau1),
        ("torque tau2", controls.tau2),
    ] {
        if !v.is_finite() {
            return Err(non_finite(term));
        }
    }
    let mass = params.total_mass();
    let [fr1, fr2] = resistance;
    let phi1 = params.wheel_1.force_angle(state.theta1);
    let phi2 = params.wheel_2.force_angle(state.theta2);

    let ax = (-fr1 * phi1.sin() + fr2 * phi2.sin()) / mass;
    let ay = (fr1 * phi1.cos() + fr2 * phi2.cos()
        - mass * params.soil.gravity
        - controls.f1
        - controls.f2)
        / mass;
    let alpha1 = (controls.tau1 + reaction_torque(fr1, &params.wheel_1, state.omega1))
        / params.wheel_1.inertia;
    let alpha2 = (controls.tau2 + reaction_torque(fr2, &params.wheel_2, state.omega2))
        / params.wheel_2.inertia;

    let out = [
        state.vx,
        state.vy,
        ax,
        ay,
        state.omega1,
        alpha1,
        state.omega2,
        alpha2,
    ];
    const NAMES: [&str; STATE_DIM] = [
        "dx/dt",
        "dy/dt",
        "dvx/dt",
        "dvy/dt",
        "dtheta1/dt",
        "domega1/dt",
        "dtheta2/dt",
        "domega2/dt",
    ];
    for (name, v) in NAMES.iter().zip(out) {
        if !v.is_finite() {
            return Err(non_finite(name));
        }
    }
    Ok(out)
}

fn non_finite(term: &str) -> Error {
    Error::NonFinite {
        term: term.to_owned(),
        t: f64::NAN,
    }
}
