//! Simulation of a dual counter-rotating bucket-wheel excavator digging
//! regolith in milligravity.
//!
//! The crate is organised bottom-up:
//!
//! * [`regolith`] evaluates the Luth-Wismer sand/clay cutting resistance.
//! * [`dynamics`] holds the rigid-body state and the equations of motion.
//! * [`control`] implements the gated PD hold-down law and wheel torque laws.
//! * [`integrator`] propagates any first-order ODE with RK4 or Dormand-Prince RK45.
//! * [`sim`] wires everything into a runnable [`sim::Scenario`], records
//!   trajectories, and extracts run metrics.
//! * [`tuning`] searches controller gains by repeated closed-loop rollouts.
//! * [`isru`] converts excavated regolith into heating energy and water yield.

pub mod control;
pub mod dynamics;
mod error;
pub mod integrator;
pub mod isru;
pub mod regolith;
pub mod sim;
pub mod tuning;

pub use error::{Error, Result};

/// Escape velocity of Phobos (m/s), the reference for the lift-off safety margin.
pub const PHOBOS_ESCAPE_VELOCITY: f64 = 11.1;

/// Converts revolutions per minute to radians per second.
pub fn rpm_to_rad_per_s(rpm: f64) -> f64 {
    rpm * std::f64::consts::TAU / 60.0
}

/// Converts radians per second to revolutions per minute.
pub fn rad_per_s_to_rpm(omega: f64) -> f64 {
    omega * 60.0 / std::f64::consts::TAU
}
