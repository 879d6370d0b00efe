//! Resource accounting for excavated regolith: sensible heat needed to bring
//! it to the extraction temperature, water recovered, and a check against the
//! operating power budget.
//!
//! Only sensible heat is counted; no latent heat of vaporisation is added.

use std::fmt;
use std::io::{self, Write};

use crate::regolith::{self, SoilProperties};
use crate::sim::fmt_f64;
use crate::{Error, Result};

/// Default total operating power budget (W).
pub const DEFAULT_POWER_BUDGET: f64 = 10_000.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsruReport {
    /// Heat per kilogram of regolith (J/kg).
    pub energy_per_kg: f64,
    /// Water recovered per kilogram of regolith (kg/kg).
    pub water_per_kg: f64,
    /// Regolith throughput (kg/s).
    pub excavation_rate: f64,
    /// Heating power at `excavation_rate` (W).
    pub heating_power: f64,
    /// Mechanical excavation power (W).
    pub mech_power: f64,
    /// Water production (kg/s).
    pub water_rate: f64,
    pub power_budget: f64,
    pub within_budget: bool,
}

/// Sensible heat to raise one kilogram from the surface to the extraction
/// temperature (J/kg).
pub fn heating_energy_per_kg(soil: &SoilProperties) -> Result<f64> {
    if soil.extraction_temp <= soil.surface_temp {
        return Err(Error::invalid(
            "extraction_temp",
            format!(
                "{} °C must exceed the surface temperature {} °C",
                soil.extraction_temp, soil.surface_temp
            ),
        ));
    }
    Ok(soil.specific_heat * (soil.extraction_temp - soil.surface_temp))
}

/// Water recovered from `excavated_mass` kilograms (kg).
pub fn water_yield(excavated_mass: f64, soil: &SoilProperties) -> Result<f64> {
    regolith::non_negative("excavated_mass", excavated_mass)?;
    Ok(soil.water_fraction * excavated_mass)
}

/// Heating plus mechanical power at a given throughput, compared to `budget`.
pub fn power_check(
    excavation_rate: f64,
    soil: &SoilProperties,
    mech_power: f64,
    budget: f64,
) -> Result<IsruReport> {
    regolith::non_negative("excavation_rate", excavation_rate)?;
    regolith::non_negative("mech_power", mech_power)?;
    regolith::positive("power_budget", budget)?;
    let energy_per_kg = heating_energy_per_kg(soil)?;
    let heating_power = excavation_rate * energy_per_kg;
    Ok(IsruReport {
        energy_per_kg,
        water_per_kg: soil.water_fraction,
        excavation_rate,
        heating_power,
        mech_power,
        water_rate: water_yield(excavation_rate, soil)?,
        power_budget: budget,
        within_budget: heating_power + mech_power <= budget,
    })
}

impl IsruReport {
    fn fields(&self) -> [(&'static str, String); 8] {
        [
            ("energy_per_kg_j", fmt_f64(self.energy_per_kg)),
            ("water_per_kg", fmt_f64(self.water_per_kg)),
            ("excavation_rate_kg_s", fmt_f64(self.excavation_rate)),
            ("heating_power_w", fmt_f64(self.heating_power)),
            ("mech_power_w", fmt_f64(self.mech_power)),
            ("water_rate_kg_s", fmt_f64(self.water_rate)),
            ("power_budget_w", fmt_f64(self.power_budget)),
            ("within_budget", self.within_budget.to_string()),
        ]
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let (keys, values): (Vec<_>, Vec<_>) = self.fields().into_iter().unzip();
        writeln!(out, "{}", keys.join(","))?;
        writeln!(out, "{}", values.join(","))
    }
}

/// Flat `key = value` block.
impl fmt::Display for IsruReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.fields() {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}
