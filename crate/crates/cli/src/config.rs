//! TOML scenario files.
//!
//! Every dimensioned key carries its unit in the name (`_m`, `_deg`, `_rpm`,
//! ...); angles and spin rates are converted to radians at this boundary.
//! Unknown keys are rejected, and missing keys take the reference-design
//! value, so an empty file describes the default scenario.

use std::collections::BTreeMap;
use std::path::Path;

use bucketwheel::control::Gains;
use bucketwheel::dynamics::{DisturbanceModel, ExcavatorParams, ExcavatorState, WheelConfig};
use bucketwheel::integrator::{IntegratorConfig, Method};
use bucketwheel::isru::DEFAULT_POWER_BUDGET;
use bucketwheel::regolith::SoilProperties;
use bucketwheel::sim::Scenario;
use bucketwheel::tuning::{CostWeights, GainBound, GainName, SearchMethod, TuningSpec};
use bucketwheel::{rad_per_s_to_rpm, rpm_to_rad_per_s};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// The shipped reference configuration.
pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.toml");

#[derive(Debug, Clone, PartialEq, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub soil: SoilSection,
    pub wheel1: WheelSection,
    pub wheel2: WheelSection,
    pub excavator: ExcavatorSection,
    pub gains: GainsSection,
    pub disturbance: DisturbanceSection,
    pub integrator: IntegratorSection,
    pub initial_state: InitialStateSection,
    pub tuning: Option<TuningSection>,
    pub isru: IsruSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct SoilSection {
    pub density_kg_m3: f64,
    pub cohesion_pa: f64,
    pub gravity_m_s2: f64,
    pub water_fraction: f64,
    pub specific_heat_j_kg_c: f64,
    pub surface_temp_c: f64,
    pub extraction_temp_c: f64,
}

impl Default for SoilSection {
    fn default() -> Self {
        let s = SoilProperties::default();
        Self {
            density_kg_m3: s.density,
            cohesion_pa: s.cohesion,
            gravity_m_s2: s.gravity,
            water_fraction: s.water_fraction,
            specific_heat_j_kg_c: s.specific_heat,
            surface_temp_c: s.surface_temp,
            extraction_temp_c: s.extraction_temp,
        }
    }
}

impl SoilSection {
    pub fn to_soil(&self) -> SoilProperties {
        SoilProperties {
            density: self.density_kg_m3,
            cohesion: self.cohesion_pa,
            gravity: self.gravity_m_s2,
            water_fraction: self.water_fraction,
            specific_heat: self.specific_heat_j_kg_c,
            surface_temp: self.surface_temp_c,
            extraction_temp: self.extraction_temp_c,
        }
    }
}

/// One wheel. Omitted keys come from the reference wheel in that position
/// (the second wheel's default rake angle is mirrored).
#[derive(Debug, Clone, PartialEq, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct WheelSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diameter_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blade_width_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tool_length_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rake_angle_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_buckets: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass_kg: Option<f64>,
    /// Solid-disc value from mass and diameter when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inertia_kg_m2: Option<f64>,
}

impl WheelSection {
    pub fn to_wheel(&self, base: &WheelConfig) -> WheelConfig {
        let diameter = self.diameter_m.unwrap_or(base.diameter);
        let wheel_mass = self.mass_kg.unwrap_or(base.wheel_mass);
        WheelConfig {
            diameter,
            blade_width: self.blade_width_m.unwrap_or(base.blade_width),
            tool_length: self.tool_length_m.unwrap_or(base.tool_length),
            rake_angle: self.rake_angle_deg.map_or(base.rake_angle, f64::to_radians),
            n_buckets: self.n_buckets.unwrap_or(base.n_buckets),
            wheel_mass,
            inertia: self
                .inertia_kg_m2
                .unwrap_or_else(|| WheelConfig::solid_disc_inertia(wheel_mass, diameter)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExcavatorSection {
    pub chassis_mass_kg: f64,
    pub max_cut_depth_m: f64,
    pub engagement_multiplier: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hold_force_limit_n: Option<f64>,
}

impl Default for ExcavatorSection {
    fn default() -> Self {
        let p = ExcavatorParams::default();
        Self {
            chassis_mass_kg: p.chassis_mass,
            max_cut_depth_m: p.max_cut_depth,
            engagement_multiplier: p.engagement_multiplier,
            hold_force_limit_n: p.hold_force_limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct GainsSection {
    pub k_x_nm_per_m: f64,
    pub k_y_n_per_m: f64,
    pub k_vy_ns_per_m: f64,
    pub k_1_nms_per_rad: f64,
    pub k_2_nms_per_rad: f64,
    pub desired_speed_rpm: f64,
}

impl Default for GainsSection {
    fn default() -> Self {
        let g = Gains::default();
        Self {
            k_x_nm_per_m: g.k_x,
            k_y_n_per_m: g.k_y,
            k_vy_ns_per_m: g.k_vy,
            k_1_nms_per_rad: g.k_1,
            k_2_nms_per_rad: g.k_2,
            desired_speed_rpm: 3.3,
        }
    }
}

impl GainsSection {
    pub fn to_gains(&self) -> Gains {
        Gains {
            k_x: self.k_x_nm_per_m,
            k_y: self.k_y_n_per_m,
            k_vy: self.k_vy_ns_per_m,
            k_1: self.k_1_nms_per_rad,
            k_2: self.k_2_nms_per_rad,
            omega_des: rpm_to_rad_per_s(self.desired_speed_rpm),
        }
    }

    /// These settings with the five gains replaced; the speed setpoint is
    /// kept as written so it round-trips without a unit conversion.
    pub fn with_gains(&self, g: &Gains) -> Self {
        Self {
            k_x_nm_per_m: g.k_x,
            k_y_n_per_m: g.k_y,
            k_vy_ns_per_m: g.k_vy,
            k_1_nms_per_rad: g.k_1,
            k_2_nms_per_rad: g.k_2,
            desired_speed_rpm: self.desired_speed_rpm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct DisturbanceSection {
    pub enabled: bool,
    pub seed: u64,
}

impl Default for DisturbanceSection {
    fn default() -> Self {
        let d = DisturbanceModel::default();
        Self {
            enabled: d.enabled,
            seed: d.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodName {
    Rk4,
    Rk45,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorSection {
    pub method: MethodName,
    pub t_end_s: f64,
    pub output_step_s: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step_s: f64,
    pub fixed_step_s: f64,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        let c = IntegratorConfig::default();
        Self {
            method: match c.method {
                Method::Rk4 => MethodName::Rk4,
                Method::Rk45 => MethodName::Rk45,
            },
            t_end_s: c.t_end,
            output_step_s: c.output_step,
            rel_tol: c.rel_tol,
            abs_tol: c.abs_tol,
            max_step_s: c.max_step,
            fixed_step_s: c.fixed_step,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialStateSection {
    pub x_m: f64,
    pub y_m: f64,
    pub vx_m_s: f64,
    pub vy_m_s: f64,
    pub theta1_deg: f64,
    pub omega1_rpm: f64,
    pub theta2_deg: f64,
    pub omega2_rpm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchName {
    Grid,
    PatternSearch,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct TuningSection {
    pub method: SearchName,
    pub budget: usize,
    pub eval_horizon_s: f64,
    pub weights: WeightsSection,
    /// Keyed by gain: `k_x`, `k_y`, `k_vy`, `k_1`, `k_2`.
    pub bounds: BTreeMap<String, BoundSection>,
}

impl Default for TuningSection {
    fn default() -> Self {
        let spec = TuningSpec::default();
        Self {
            method: match spec.method {
                SearchMethod::Grid => SearchName::Grid,
                SearchMethod::PatternSearch => SearchName::PatternSearch,
            },
            budget: spec.budget,
            eval_horizon_s: spec.eval_horizon,
            weights: WeightsSection::default(),
            bounds: spec
                .bounds
                .iter()
                .map(|b| {
                    (
                        b.gain.key().to_owned(),
                        BoundSection {
                            low: b.low,
                            high: b.high,
                            points: b.points,
                            values: None,
                        },
                    )
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightsSection {
    pub drift: f64,
    pub settle: f64,
    pub liftoff: f64,
    pub effort: f64,
}

impl Default for WeightsSection {
    fn default() -> Self {
        let w = CostWeights::default();
        Self {
            drift: w.drift,
            settle: w.settle,
            liftoff: w.liftoff,
            effort: w.effort,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BoundSection {
    pub low: f64,
    pub high: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

fn default_points() -> usize {
    3
}

impl TuningSection {
    pub fn to_spec(&self) -> Result<TuningSpec, CliError> {
        let mut bounds = Vec::with_capacity(self.bounds.len());
        for (key, b) in &self.bounds {
            let gain = GainName::ALL
                .into_iter()
                .find(|g| g.key() == key)
                .ok_or_else(|| {
                    CliError::Config(format!(
                        "tuning.bounds: unknown gain `{key}`, expected one of k_x, k_y, k_vy, k_1, k_2"
                    ))
                })?;
            bounds.push(GainBound {
                gain,
                low: b.low,
                high: b.high,
                points: b.points,
                values: b.values.clone(),
            });
        }
        Ok(TuningSpec {
            bounds,
            weights: CostWeights {
                drift: self.weights.drift,
                settle: self.weights.settle,
                liftoff: self.weights.liftoff,
                effort: self.weights.effort,
            },
            budget: self.budget,
            method: match self.method {
                SearchName::Grid => SearchMethod::Grid,
                SearchName::PatternSearch => SearchMethod::PatternSearch,
            },
            eval_horizon: self.eval_horizon_s,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct IsruSection {
    pub power_budget_w: f64,
    pub excavation_rate_kg_s: f64,
    pub mech_power_w: f64,
}

impl Default for IsruSection {
    fn default() -> Self {
        Self {
            power_budget_w: DEFAULT_POWER_BUDGET,
            excavation_rate_kg_s: 0.0,
            mech_power_w: 0.0,
        }
    }
}

impl ConfigFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("{origin}: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn scenario(&self) -> Scenario {
        let i = &self.integrator;
        let s = &self.initial_state;
        let default_wheel = WheelConfig::default();
        Scenario {
            params: ExcavatorParams {
                chassis_mass: self.excavator.chassis_mass_kg,
                wheel_1: self.wheel1.to_wheel(&default_wheel),
                wheel_2: self.wheel2.to_wheel(&default_wheel.mirrored()),
                soil: self.soil.to_soil(),
                max_cut_depth: self.excavator.max_cut_depth_m,
                engagement_multiplier: self.excavator.engagement_multiplier,
                hold_force_limit: self.excavator.hold_force_limit_n,
            },
            gains: self.gains.to_gains(),
            disturbance: DisturbanceModel {
                enabled: self.disturbance.enabled,
                seed: self.disturbance.seed,
            },
            integrator: IntegratorConfig {
                method: match i.method {
                    MethodName::Rk4 => Method::Rk4,
                    MethodName::Rk45 => Method::Rk45,
                },
                t_end: i.t_end_s,
                output_step: i.output_step_s,
                rel_tol: i.rel_tol,
                abs_tol: i.abs_tol,
                max_step: i.max_step_s,
                fixed_step: i.fixed_step_s,
            },
            initial_state: ExcavatorState {
                x: s.x_m,
                y: s.y_m,
                vx: s.vx_m_s,
                vy: s.vy_m_s,
                theta1: s.theta1_deg.to_radians(),
                omega1: rpm_to_rad_per_s(s.omega1_rpm),
                theta2: s.theta2_deg.to_radians(),
                omega2: rpm_to_rad_per_s(s.omega2_rpm),
            },
        }
    }
}

/// Standalone tuning spec file: the body of a `[tuning]` section.
pub fn load_tuning_spec(path: &Path) -> Result<TuningSection, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// The `[gains]` fragment written after tuning.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GainsFragment {
    pub gains: GainsSection,
}

impl GainsFragment {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("gains always serialize")
    }
}

/// Wheel speed in RPM, for reports.
pub fn rpm(omega: f64) -> f64 {
    rad_per_s_to_rpm(omega)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_reference_scenario() {
        let cfg = ConfigFile::parse("", "empty").unwrap();
        assert_eq!(cfg.scenario(), Scenario::default());
    }

    #[test]
    fn shipped_default_is_the_reference_scenario() {
        let cfg = ConfigFile::parse(DEFAULT_CONFIG, "default.toml").unwrap();
        assert_eq!(cfg.scenario(), Scenario::default());
    }

    #[test]
    fn misspelled_key_names_line_and_key() {
        let err = ConfigFile::parse(
            "[soil]\ndensity_kg_m3 = 1.0\ndensty_kg_m3 = 2.0\n",
            "bad.toml",
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("densty_kg_m3"), "{err}");
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn misspelled_key_in_second_wheel_rejected() {
        assert!(ConfigFile::parse("[wheel2]\ndiameter = 1.0\n", "bad.toml").is_err());
    }

    #[test]
    fn misspelled_section_rejected() {
        assert!(ConfigFile::parse("[soill]\n", "bad.toml").is_err());
    }

    #[test]
    fn degrees_and_rpm_converted() {
        let cfg = ConfigFile::parse(
            "[wheel1]\nrake_angle_deg = 30\n[initial_state]\nomega1_rpm = 60\n",
            "t",
        )
        .unwrap();
        let sc = cfg.scenario();
        assert_eq!(sc.params.wheel_1.rake_angle, 30f64.to_radians());
        assert!((sc.initial_state.omega1 - std::f64::consts::TAU).abs() < 1e-12);
        assert_eq!(sc.params.wheel_2.rake_angle, (-10f64).to_radians());
    }

    #[test]
    fn inertia_follows_overridden_mass() {
        let cfg = ConfigFile::parse("[wheel1]\nmass_kg = 10\n", "t").unwrap();
        let w = cfg.scenario().params.wheel_1;
        assert_eq!(w.inertia, WheelConfig::solid_disc_inertia(10.0, w.diameter));
    }

    #[test]
    fn gains_fragment_round_trips() {
        let g = Gains {
            k_x: 0.1 + 0.2,
            k_y: 1.0 / 3.0,
            k_vy: 12_345.678_901_234_5,
            k_1: 4000.0 * std::f64::consts::PI,
            k_2: 1e-7,
            omega_des: 0.0,
        };
        let frag = GainsFragment {
            gains: GainsSection::default().with_gains(&g),
        };
        let cfg = ConfigFile::parse(&frag.to_toml(), "fragment").unwrap();
        let back = cfg.gains.to_gains();
        assert_eq!(
            [back.k_x, back.k_y, back.k_vy, back.k_1, back.k_2],
            [g.k_x, g.k_y, g.k_vy, g.k_1, g.k_2]
        );
        assert_eq!(back.omega_des, Gains::default().omega_des);
    }

    #[test]
    fn unknown_tuning_gain_rejected() {
        let cfg = ConfigFile::parse("[tuning.bounds.k_z]\nlow = 1\nhigh = 2\n", "t").unwrap();
        assert!(cfg.tuning.unwrap().to_spec().is_err());
    }
}
