//! Luth-Wismer cutting resistance of a blade moving through regolith.
//!
//! The resistance is split into a non-cohesive (sand) term and a purely
//! cohesive (clay) term; their sum acts normal to the cutting surface.
//! Both terms use the magnitude of the rake angle, so mirrored wheels with
//! opposite rake signs see identical force magnitudes. Direction is the
//! business of [`crate::dynamics`].

use std::f64::consts::FRAC_PI_2;

use crate::dynamics::WheelConfig;
use crate::{Error, Result};

/// Bulk regolith properties, including the thermal and volatile parameters
/// consumed by [`crate::isru`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoilProperties {
    /// Bulk density (kg/m³).
    pub density: f64,
    /// Cohesion (Pa).
    pub cohesion: f64,
    /// Surface gravity (m/s²).
    pub gravity: f64,
    /// Water mass fraction in [0, 1].
    pub water_fraction: f64,
    /// Specific heat (J/(kg·°C)).
    pub specific_heat: f64,
    /// Surface temperature of the material (°C).
    pub surface_temp: f64,
    /// Temperature the regolith is heated to for water extraction (°C).
    pub extraction_temp: f64,
}

impl Default for SoilProperties {
    /// Lunar-like regolith on Phobos.
    fn default() -> Self {
        Self {
            density: 1880.0,
            cohesion: 147.0,
            gravity: 0.0057,
            water_fraction: 0.10,
            specific_heat: 1430.0,
            surface_temp: 200.0,
            extraction_temp: 1000.0,
        }
    }
}

impl SoilProperties {
    pub fn validate(&self) -> Result<()> {
        positive("density", self.density)?;
        positive("gravity", self.gravity)?;
        non_negative("cohesion", self.cohesion)?;
        if !(0.0..=1.0).contains(&self.water_fraction) {
            return Err(Error::invalid(
                "water_fraction",
                format!("{} is outside [0, 1]", self.water_fraction),
            ));
        }
        non_negative("specific_heat", self.specific_heat)?;
        finite("surface_temp", self.surface_temp)?;
        finite("extraction_temp", self.extraction_temp)?;
        if self.extraction_temp <= self.surface_temp {
            return Err(Error::invalid(
                "extraction_temp",
                format!(
                    "{} °C must exceed the surface temperature {} °C",
                    self.extraction_temp, self.surface_temp
                ),
            ));
        }
        Ok(())
    }
}

/// Instantaneous blade engagement: the inputs of the force model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutState {
    /// Blade width w (m).
    pub blade_width: f64,
    /// Tool length l (m).
    pub tool_length: f64,
    /// Cut depth d (m).
    pub cut_depth: f64,
    /// Signed rake angle β (rad); only its magnitude enters the force.
    pub rake_angle: f64,
    /// Blade speed through the soil v (m/s).
    pub cutting_speed: f64,
}

impl CutState {
    pub fn validate(&self) -> Result<()> {
        positive("blade_width", self.blade_width)?;
        positive("tool_length", self.tool_length)?;
        non_negative("cut_depth", self.cut_depth)?;
        non_negative("cutting_speed", self.cutting_speed)?;
        let beta = self.rake_angle.abs();
        if !(beta > 0.0 && beta < FRAC_PI_2) {
            return Err(Error::invalid(
                "rake_angle",
                format!("|{}| rad must lie in (0, π/2)", self.rake_angle),
            ));
        }
        Ok(())
    }
}

/// Sand, clay and total resistance on one blade (N).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ForceBreakdown {
    pub f_sand: f64,
    pub f_clay: f64,
    pub f_total: f64,
}

impl ForceBreakdown {
    pub fn new(f_sand: f64, f_clay: f64) -> Self {
        Self {
            f_sand,
            f_clay,
            f_total: f_sand + f_clay,
        }
    }

    /// Multiplies every component by `factor` (used for multi-bucket engagement).
    pub fn scaled(self, factor: f64) -> Self {
        Self::new(self.f_sand * factor, self.f_clay * factor)
    }
}

/// Common prefactor ρ·g·w·l^1.5.
fn prefactor(soil: &SoilProperties, cut: &CutState) -> f64 {
    soil.density * soil.gravity * cut.blade_width * cut.tool_length.powf(1.5)
}

/// Non-cohesive (sand) resistance.
pub fn sand_force(soil: &SoilProperties, cut: &CutState) -> Result<f64> {
    check_inputs(soil, cut)?;
    let SoilProperties { gravity: g, .. } = *soil;
    let CutState {
        blade_width: w,
        tool_length: l,
        cut_depth: d,
        rake_angle,
        cutting_speed: v,
    } = *cut;
    let beta = rake_angle.abs();

    let geometry = beta.powf(1.73) * d.sqrt() * (d / (l * beta.sin())).powf(0.77);
    let bracket = 1.05 * (d / w).powf(1.11) + 1.26 * v * v / (g * l) + 3.91;
    checked("sand force", prefactor(soil, cut) * geometry * bracket)
}

/// Cohesive (clay) resistance. `0^0.121` is taken as 0, so a stationary
/// blade carries no cohesive term.
pub fn clay_force(soil: &SoilProperties, cut: &CutState) -> Result<f64> {
    check_inputs(soil, cut)?;
    let SoilProperties {
        density: rho,
        gravity: g,
        cohesion: c,
        ..
    } = *soil;
    let CutState {
        blade_width: w,
        tool_length: l,
        cut_depth: d,
        rake_angle,
        cutting_speed: v,
    } = *cut;
    if d == 0.0 && c > 0.0 {
        return Err(Error::invalid(
            "cut_depth",
            "must be positive when cohesion is positive",
        ));
    }
    let beta = rake_angle.abs();

    let geometry = beta.powf(1.15) * d.sqrt() * (d / (l * beta.sin())).powf(1.21);
    let cohesive = if c == 0.0 || v == 0.0 {
        0.0
    } else {
        (11.5 * c / (rho * g * d)).powf(1.21)
            * (2.0 * v / (3.0 * w)).powf(0.121)
            * (0.055 * (d / w).powf(0.78) + 0.065)
    };
    let dynamic = 0.64 * (v * v / (g * l));
    checked(
        "clay force",
        prefactor(soil, cut) * geometry * (cohesive + dynamic),
    )
}

/// Sum of the sand and clay terms.
pub fn total_resistive_force(soil: &SoilProperties, cut: &CutState) -> Result<ForceBreakdown> {
    Ok(ForceBreakdown::new(
        sand_force(soil, cut)?,
        clay_force(soil, cut)?,
    ))
}

/// Maps the excavator height and wheel speed to blade engagement.
///
/// The cut depth is the plunge below the undisturbed surface (`y = 0`),
/// clamped to `[0, max_depth]`; the cutting speed is the bucket tip speed.
pub fn cut_state_from_plunge(y: f64, wheel: &WheelConfig, omega: f64, max_depth: f64) -> CutState {
    CutState {
        blade_width: wheel.blade_width,
        tool_length: wheel.tool_length,
        cut_depth: (-y).clamp(0.0, max_depth),
        rake_angle: wheel.rake_angle,
        cutting_speed: omega.abs() * wheel.radius(),
    }
}

/// The force model with every depth- and speed-independent factor of one
/// wheel hoisted out, for repeated evaluation inside the equations of motion.
/// Agrees with [`sand_force`] and [`clay_force`] to rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuttingModel {
    sand_scale: f64,
    clay_scale: f64,
    /// (11.5c/(ρg))^1.21 / (l|sin β|)^1.21; zero for cohesionless soil.
    cohesive_scale: f64,
    ln_lever: f64,
    ln_width: f64,
    three_width: f64,
    gravity_length: f64,
}

impl CuttingModel {
    pub fn new(soil: &SoilProperties, wheel: &WheelConfig) -> Result<Self> {
        let probe = CutState {
            blade_width: wheel.blade_width,
            tool_length: wheel.tool_length,
            cut_depth: 0.0,
            rake_angle: wheel.rake_angle,
            cutting_speed: 0.0,
        };
        check_inputs(soil, &probe)?;
        let beta = wheel.rake_angle.abs();
        let lever = wheel.tool_length * beta.sin();
        let base = prefactor(soil, &probe);
        let cohesive_scale = if soil.cohesion == 0.0 {
            0.0
        } else {
            (11.5 * soil.cohesion / (soil.density * soil.gravity) / lever).powf(1.21)
        };
        Ok(Self {
            sand_scale: base * beta.powf(1.73),
            clay_scale: base * beta.powf(1.15),
            cohesive_scale,
            ln_lever: lever.ln(),
            ln_width: wheel.blade_width.ln(),
            three_width: 3.0 * wheel.blade_width,
            gravity_length: soil.gravity * wheel.tool_length,
        })
    }

    /// Resistance at cut depth `depth` and blade speed `speed`; zero for a
    /// blade that is not in the ground.
    pub fn forces(&self, depth: f64, speed: f64) -> ForceBreakdown {
        if depth <= 0.0 {
            return ForceBreakdown::default();
        }
        let ln_d = depth.ln();
        let root_d = depth.sqrt();
        let ln_rel_lever = ln_d - self.ln_lever;
        let ln_rel_width = ln_d - self.ln_width;
        let froude = speed * speed / self.gravity_length;

        let sand = self.sand_scale
            * root_d
            * (0.77 * ln_rel_lever).exp()
            * (1.05 * (1.11 * ln_rel_width).exp() + 1.26 * froude + 3.91);

        let cohesive = if self.cohesive_scale == 0.0 || speed == 0.0 {
            0.0
        } else {
            self.cohesive_scale
                * (2.0 * speed / self.three_width).powf(0.121)
                * (0.055 * (0.78 * ln_rel_width).exp() + 0.065)
        };
        let dynamic = (1.21 * ln_rel_lever).exp() * 0.64 * froude;
        let clay = self.clay_scale * root_d * (cohesive + dynamic);
        ForceBreakdown::new(sand, clay)
    }
}

fn check_inputs(soil: &SoilProperties, cut: &CutState) -> Result<()> {
    positive("density", soil.density)?;
    positive("gravity", soil.gravity)?;
    non_negative("cohesion", soil.cohesion)?;
    cut.validate()
}

fn checked(term: &str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite {
            term: term.to_owned(),
            t: f64::NAN,
        })
    }
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("{value} must be positive")))
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("{value} must be non-negative"),
        ))
    }
}

pub(crate) fn finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("{value} must be finite")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_cut(d: f64) -> CutState {
        CutState {
            blade_width: 0.0631,
            tool_length: 0.05,
            cut_depth: d,
            rake_angle: 10f64.to_radians(),
            cutting_speed: 0.12,
        }
    }

    #[test]
    fn zero_depth_gives_zero_sand_force() {
        let f = sand_force(&SoilProperties::default(), &table_cut(0.0)).unwrap();
        assert_eq!(f, 0.0);
    }

    #[test]
    fn cohesionless_still_blade_has_no_clay_force() {
        let soil = SoilProperties {
            cohesion: 0.0,
            ..Default::default()
        };
        let cut = CutState {
            cutting_speed: 0.0,
            ..table_cut(0.02)
        };
        assert_eq!(clay_force(&soil, &cut).unwrap(), 0.0);
    }

    #[test]
    fn all_zero_breakdown() {
        let soil = SoilProperties {
            cohesion: 0.0,
            ..Default::default()
        };
        let cut = CutState {
            cutting_speed: 0.0,
            ..table_cut(0.0)
        };
        assert_eq!(
            total_resistive_force(&soil, &cut).unwrap(),
            ForceBreakdown::default()
        );
    }

    #[test]
    fn deeper_cut_costs_more() {
        let soil = SoilProperties::default();
        let shallow = sand_force(&soil, &table_cut(0.01)).unwrap();
        let deep = sand_force(&soil, &table_cut(0.02)).unwrap();
        assert!(deep > shallow);
    }

    #[test]
    fn faster_cut_costs_more_clay() {
        let soil = SoilProperties::default();
        let slow = clay_force(&soil, &table_cut(0.01)).unwrap();
        let fast = clay_force(
            &soil,
            &CutState {
                cutting_speed: 0.24,
                ..table_cut(0.01)
            },
        )
        .unwrap();
        assert!(fast > slow);
    }

    #[test]
    fn negative_rake_matches_positive() {
        let soil = SoilProperties::default();
        let pos = total_resistive_force(&soil, &table_cut(0.01)).unwrap();
        let neg = total_resistive_force(
            &soil,
            &CutState {
                rake_angle: -10f64.to_radians(),
                ..table_cut(0.01)
            },
        )
        .unwrap();
        assert_eq!(pos, neg);
    }

    #[test]
    fn domain_errors() {
        let soil = SoilProperties::default();
        let bad = [
            table_cut(-0.01),
            CutState {
                rake_angle: 0.0,
                ..table_cut(0.01)
            },
            CutState {
                rake_angle: FRAC_PI_2,
                ..table_cut(0.01)
            },
            CutState {
                blade_width: 0.0,
                ..table_cut(0.01)
            },
            CutState {
                tool_length: -1.0,
                ..table_cut(0.01)
            },
        ];
        for cut in bad {
            assert!(sand_force(&soil, &cut).is_err(), "{cut:?}");
            assert!(clay_force(&soil, &cut).is_err(), "{cut:?}");
        }
        let bad_soil = SoilProperties {
            density: -1.0,
            ..soil
        };
        assert!(sand_force(&bad_soil, &table_cut(0.01)).is_err());
    }

    #[test]
    fn clay_rejects_zero_depth_with_cohesion() {
        let err = clay_force(&SoilProperties::default(), &table_cut(0.0)).unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidParameter {
                name: "cut_depth",
                ..
            }
        ));
    }

    #[test]
    fn plunge_mapping() {
        let wheel = WheelConfig::default();
        let above = cut_state_from_plunge(0.1, &wheel, 0.3456, 0.1);
        assert_eq!(above.cut_depth, 0.0);

        let dig = cut_state_from_plunge(-0.01, &wheel, 0.3456, 0.1);
        assert_eq!(dig.cut_depth, 0.01);
        // tip speed ω·D/2 = 0.3456 · 0.311
        assert!((dig.cutting_speed - 0.1074816).abs() < 1e-12);
        assert_eq!(dig.blade_width, wheel.blade_width);
        assert_eq!(dig.rake_angle, wheel.rake_angle);

        let buried = cut_state_from_plunge(-10.0, &wheel, 0.3456, 0.05);
        assert_eq!(buried.cut_depth, 0.05);
    }

    #[test]
    fn soil_validation() {
        assert!(SoilProperties::default().validate().is_ok());
        let hot = SoilProperties {
            surface_temp: 1000.0,
            ..Default::default()
        };
        assert!(hot.validate().is_err());
        let wet = SoilProperties {
            water_fraction: 1.5,
            ..Default::default()
        };
        assert!(wet.validate().is_err());
        let dense = SoilProperties {
            density: 0.0,
            ..Default::default()
        };
        let err = dense.validate().unwrap_err();
        assert!(err.to_string().contains("density"));
    }

    mod fast_path {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn cutting_model_matches_formulas(
                density in 500.0..3000.0f64,
                cohesion in prop_oneof![Just(0.0), 1.0..5000.0f64],
                gravity in 1e-3..10.0f64,
                width in 0.01..0.5f64,
                length in 0.01..0.5f64,
                rake_deg in prop_oneof![1.0..80.0f64, -80.0..-1.0f64],
                depth in 1e-5..0.2f64,
                speed in prop_oneof![Just(0.0), 1e-4..5.0f64],
            ) {
                let soil = SoilProperties { density, cohesion, gravity, ..Default::default() };
                let wheel = WheelConfig {
                    blade_width: width,
                    tool_length: length,
                    rake_angle: rake_deg.to_radians(),
                    ..Default::default()
                };
                let cut = CutState {
                    blade_width: width,
                    tool_length: length,
                    cut_depth: depth,
                    rake_angle: rake_deg.to_radians(),
                    cutting_speed: speed,
                };
                let fast = CuttingModel::new(&soil, &wheel).unwrap().forces(depth, speed);
                let sand = sand_force(&soil, &cut).unwrap();
                let clay = clay_force(&soil, &cut).unwrap();
                prop_assert!((fast.f_sand - sand).abs() <= 1e-12 * sand.abs());
                prop_assert!((fast.f_clay - clay).abs() <= 1e-12 * clay.abs());
            }
        }

        #[test]
        fn cutting_model_zero_depth() {
            let m = CuttingModel::new(&SoilProperties::default(), &WheelConfig::default()).unwrap();
            assert_eq!(m.forces(0.0, 1.0), ForceBreakdown::default());
        }
    }
}
