//! PD control laws: a gated vertical hold-down force and per-wheel spin
//! torques with a shared anti-drift term.

use crate::dynamics::ExcavatorState;
use crate::{rpm_to_rad_per_s, Error, Result};

/// Controller gains and the wheel speed setpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gains {
    /// Horizontal anti-drift torque gain (N·m/m).
    pub k_x: f64,
    /// Hold-down stiffness (N/m).
    pub k_y: f64,
    /// Hold-down damping (N·s/m).
    pub k_vy: f64,
    /// Wheel 1 speed gain (N·m·s/rad).
    pub k_1: f64,
    /// Wheel 2 speed gain (N·m·s/rad).
    pub k_2: f64,
    /// Desired wheel spin magnitude (rad/s); wheel 2 tracks its negative.
    pub omega_des: f64,
}

impl Default for Gains {
    fn default() -> Self {
        Self {
            k_x: 1.0,
            k_y: 0.9,
            k_vy: 90_000.0,
            k_1: 4000.0,
            k_2: 4000.0,
            omega_des: rpm_to_rad_per_s(3.3),
        }
    }
}

impl Gains {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("k_x", self.k_x),
            ("k_y", self.k_y),
            ("k_vy", self.k_vy),
            ("k_1", self.k_1),
            ("k_2", self.k_2),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(
                    name,
                    format!("gain {v} must be non-negative"),
                ));
            }
        }
        if !self.omega_des.is_finite() {
            return Err(Error::invalid("omega_des", "must be finite"));
        }
        Ok(())
    }
}

/// Actuator commands for one instant.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ControlOutput {
    /// Hold-down force on wheel 1, downward positive (N).
    pub f1: f64,
    /// Hold-down force on wheel 2, downward positive (N).
    pub f2: f64,
    pub tau1: f64,
    pub tau2: f64,
}

/// Total hold-down force, downward positive.
///
/// Active only above the surface (`y > 0`). The actuator can only push the
/// excavator toward the surface, so negative PD commands floor at zero.
pub fn vertical_hold_force(state: &ExcavatorState, gains: &Gains) -> f64 {
    if state.y > 0.0 {
        (gains.k_y * state.y + gains.k_vy * state.vy).max(0.0)
    } else {
        0.0
    }
}

/// Spin-rate tracking torques `(τ₁, τ₂)` with the shared `-K_x·x` term.
pub fn wheel_torques(state: &ExcavatorState, gains: &Gains) -> (f64, f64) {
    let drift = gains.k_x * state.x;
    (
        -gains.k_1 * (state.omega1 - gains.omega_des) - drift,
        -gains.k_2 * (state.omega2 + gains.omega_des) - drift,
    )
}

/// Splits a total hold-down force equally between the wheels.
pub fn split_vertical_force(total: f64) -> Result<(f64, f64)> {
    if total.is_nan() || total < 0.0 {
        return Err(Error::invalid(
            "hold-down force",
            format!("total {total} must be non-negative"),
        ));
    }
    let half = 0.5 * total;
    Ok((half, total - half))
}

/// All actuator commands, with the optional hold-down saturation applied.
pub fn compute_controls(
    state: &ExcavatorState,
    gains: &Gains,
    hold_force_limit: Option<f64>,
) -> Result<ControlOutput> {
    let mut hold = vertical_hold_force(state, gains);
    if let Some(limit) = hold_force_limit {
        hold = hold.min(limit);
    }
    let (f1, f2) = split_vertical_force(hold)?;
    let (tau1, tau2) = wheel_torques(state, gains);
    Ok(ControlOutput { f1, f2, tau1, tau2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gate_off_below_surface() {
        let state = ExcavatorState {
            y: -0.05,
            vy: 3.0,
            ..Default::default()
        };
        assert_eq!(vertical_hold_force(&state, &Gains::default()), 0.0);
    }

    #[test]
    fn proportional_hold_above_surface() {
        let state = ExcavatorState {
            y: 0.01,
            ..Default::default()
        };
        let f = vertical_hold_force(&state, &Gains::default());
        assert!((f - 0.009).abs() < 1e-15);
    }

    #[test]
    fn hold_floors_at_zero() {
        let state = ExcavatorState {
            y: 0.01,
            vy: -1.0,
            ..Default::default()
        };
        assert_eq!(vertical_hold_force(&state, &Gains::default()), 0.0);
    }

    #[test]
    fn setpoint_gives_zero_torque() {
        let g = Gains::default();
        let state = ExcavatorState {
            omega1: g.omega_des,
            omega2: -g.omega_des,
            ..Default::default()
        };
        assert_eq!(wheel_torques(&state, &g), (0.0, 0.0));
    }

    #[test]
    fn spin_up_torques_from_rest() {
        let g = Gains {
            omega_des: 0.3456,
            ..Default::default()
        };
        let (t1, t2) = wheel_torques(&ExcavatorState::default(), &g);
        assert!((t1 - 1382.4).abs() < 1e-9);
        assert!((t2 + 1382.4).abs() < 1e-9);

        let shifted = ExcavatorState {
            x: 1.0,
            ..Default::default()
        };
        let (s1, s2) = wheel_torques(&shifted, &g);
        assert!((s1 - (t1 - 1.0)).abs() < 1e-12);
        assert!((s2 - (t2 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn split_examples() {
        assert_eq!(split_vertical_force(0.0).unwrap(), (0.0, 0.0));
        assert_eq!(split_vertical_force(10.0).unwrap(), (5.0, 5.0));
        assert!(split_vertical_force(-1.0).is_err());
        assert!(split_vertical_force(f64::NAN).is_err());
    }

    #[test]
    fn saturation_caps_hold_force() {
        let state = ExcavatorState {
            y: 0.01,
            vy: 1.0,
            ..Default::default()
        };
        let c = compute_controls(&state, &Gains::default(), Some(4.0)).unwrap();
        assert_eq!(c.f1 + c.f2, 4.0);
        assert_eq!(c.f1, c.f2);
    }

    #[test]
    fn default_speed_is_3_3_rpm() {
        assert!((Gains::default().omega_des - 0.345_575_19).abs() < 1e-8);
    }

    proptest! {
        #[test]
        fn gate_holds_below_surface(y in -10.0..=0.0f64, vy in -100.0..100.0f64) {
            let state = ExcavatorState { y, vy, ..Default::default() };
            prop_assert_eq!(vertical_hold_force(&state, &Gains::default()), 0.0);
        }

        #[test]
        fn hold_force_never_negative(y in -1.0..1.0f64, vy in -10.0..10.0f64) {
            let state = ExcavatorState { y, vy, ..Default::default() };
            prop_assert!(vertical_hold_force(&state, &Gains::default()) >= 0.0);
        }

        #[test]
        fn split_is_a_partition(total in 0.0..1e9f64) {
            let (a, b) = split_vertical_force(total).unwrap();
            prop_assert_eq!(a + b, total);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn torques_antisymmetric(omega in -5.0..5.0f64, k in 0.0..1e5f64) {
            let g = Gains { k_1: k, k_2: k, ..Default::default() };
            let state = ExcavatorState { omega1: omega, omega2: -omega, ..Default::default() };
            let (t1, t2) = wheel_torques(&state, &g);
            prop_assert_eq!(t2, -t1);
        }

        #[test]
        fn zero_drift_torques_vanish_only_at_setpoint(
            w1 in -1.0..1.0f64, w2 in -1.0..1.0f64, k in 1.0..1e4f64,
        ) {
            let g = Gains { k_1: k, k_2: k, ..Default::default() };
            let state = ExcavatorState { omega1: w1, omega2: w2, ..Default::default() };
            let (t1, t2) = wheel_torques(&state, &g);
            let at_setpoint = w1 == g.omega_des && w2 == -g.omega_des;
            prop_assert_eq!(t1 == 0.0 && t2 == 0.0, at_setpoint);
        }

        #[test]
        fn controls_are_pure(y in -1.0..1.0f64, vy in -1.0..1.0f64, x in -1.0..1.0f64) {
            let state = ExcavatorState { x, y, vy, ..Default::default() };
            let g = Gains::default();
            prop_assert_eq!(compute_controls(&state, &g, None).unwrap(),
                            compute_controls(&state, &g, None).unwrap());
        }
    }
}
