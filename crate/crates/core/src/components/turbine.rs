//! Gas turbine with a total-to-total isentropic efficiency and an
//! always-choked corrected-flow characteristic.

use super::{ComponentError, FluidPortState, MechPortState, Residual, UnitClass};
use crate::fluids::{choked_mass_flow, gamma_function, FluidError, GasProperties};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurbineParams {
    pub eta: f64,
    /// Effective choked flow area, m².
    pub a_eff: f64,
}

/// Ideal-work fraction 1 − π^(−(γ−1)/γ) of the inlet total enthalpy.
fn expansion_fraction(pressure_ratio: f64, gamma: f64) -> f64 {
    1.0 - pressure_ratio.powf(-(gamma - 1.0) / gamma)
}

/// Delivered power ṁ·cp·T0·η·(1 − π^(−(γ−1)/γ)), W.
pub fn turbine_power(mdot: f64, cp: f64, t0_in: f64, pressure_ratio: f64, gamma: f64, eta: f64) -> f64 {
    mdot * cp * t0_in * eta * expansion_fraction(pressure_ratio, gamma)
}

/// Outlet total temperature after the actual enthalpy drop.
pub fn turbine_outlet_temperature(t0_in: f64, pressure_ratio: f64, gamma: f64, eta: f64) -> f64 {
    t0_in * (1.0 - eta * expansion_fraction(pressure_ratio, gamma))
}

/// Area that passes `mdot` choked at the given inlet total state.
pub fn choked_area(mdot: f64, p0: f64, t0: f64, gas: &GasProperties) -> Result<f64, FluidError> {
    Ok(mdot * (gas.r * t0).sqrt() / (p0 * gamma_function(gas.gamma)?))
}

pub fn turbine_residuals(
    params: &TurbineParams,
    inlet: &FluidPortState,
    outlet: &FluidPortState,
    shaft: &MechPortState,
) -> Result<Vec<Residual>, ComponentError> {
    let gas = inlet.fluid.gas().ok_or(ComponentError::LiquidInTurbine)?;
    let pr = inlet.p0 / outlet.p0;
    let power = turbine_power(inlet.mdot, gas.cp, inlet.t0, pr, gas.gamma, params.eta);
    Ok(vec![
        Residual::new("continuity", UnitClass::MassFlow, inlet.mdot - outlet.mdot),
        Residual::new("power", UnitClass::Power, shaft.power + power),
        Residual::new(
            "temperature",
            UnitClass::Temperature,
            outlet.t0 - turbine_outlet_temperature(inlet.t0, pr, gas.gamma, params.eta),
        ),
        Residual::new(
            "choked_flow",
            UnitClass::MassFlow,
            inlet.mdot - choked_mass_flow(inlet.p0, inlet.t0, params.a_eff, &gas)?,
        ),
    ])
}

pub(crate) const EQUATIONS: usize = 4;
