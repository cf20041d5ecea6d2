//! Exhaust nozzles.
//!
//! The convergent-divergent nozzle sits downstream of a choked chamber and
//! adds no equations of its own; its throat is whatever area passes the
//! inlet flow choked. The convergent nozzle owns its throat and closes the
//! mass flow of the line that feeds it, choked or pressure-matched subsonic
//! depending on the back pressure.

use serde::Serialize;

use super::{ComponentError, FluidPortState, Quantity, Residual, UnitClass};
use crate::fluids::{
    critical_pressure_ratio, gamma_function, mach_from_area_ratio,
    mach_from_pressure_ratio, pressure_ratio, temperature_ratio, GasProperties, MachBranch,
};

/// Summerfield criterion: separation is likely below this fraction of ambient.
pub const SEPARATION_RATIO: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NozzleParams {
    pub area_ratio: f64,
    /// Velocity (divergence and friction) loss factor.
    pub eta_noz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergentNozzleParams {
    pub throat_area: f64,
    pub eta_noz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NozzleExit {
    pub mach: f64,
    /// Static exit pressure, Pa.
    pub p_e: f64,
    /// Static exit temperature, K.
    pub t_e: f64,
    pub v_e: f64,
    pub a_e: f64,
    pub a_throat: f64,
    pub thrust: f64,
    /// Exit pressure below the separation threshold.
    pub separated: bool,
}

#[allow(clippy::too_many_arguments)]
fn exit_state(
    gas: &GasProperties,
    inlet: &FluidPortState,
    mach: f64,
    p_e: f64,
    a_e: f64,
    a_throat: f64,
    eta_noz: f64,
    amb: f64,
) -> NozzleExit {
    let t_e = inlet.t0 * temperature_ratio(mach, gas.gamma);
    let v_e = eta_noz * mach * (gas.gamma * gas.r * t_e).sqrt();
    NozzleExit {
        mach,
        p_e,
        t_e,
        v_e,
        a_e,
        a_throat,
        thrust: inlet.mdot * v_e + (p_e - amb) * a_e,
        separated: p_e < SEPARATION_RATIO * amb,
    }
}

/// Supersonic exit of a convergent-divergent nozzle. Thrust is
/// ṁ·v_e + (p_e − p_amb)·A_e with A_e = area_ratio·A*.
pub fn nozzle_exit(
    params: &NozzleParams,
    inlet: &FluidPortState,
    amb: f64,
) -> Result<NozzleExit, ComponentError> {
    let gas = inlet.fluid.gas().ok_or(ComponentError::LiquidInNozzle)?;
    let mach = mach_from_area_ratio(params.area_ratio, gas.gamma, MachBranch::Supersonic)?;
    let a_throat = inlet.mdot * (gas.r * inlet.t0).sqrt() / (inlet.p0 * gamma_function(gas.gamma)?);
    let p_e = inlet.p0 * pressure_ratio(mach, gas.gamma);
    Ok(exit_state(
        &gas,
        inlet,
        mach,
        p_e,
        params.area_ratio * a_throat,
        a_throat,
        params.eta_noz,
        amb,
    ))
}

/// Isentropic flow through an orifice of area `area` from total state
/// (`p_up`, `t_up`) to back pressure `p_down`, choking below the critical
/// ratio. Reverse pressure differences give reverse flow.
pub fn isentropic_orifice_flow(area: f64, p_up: f64, t_up: f64, p_down: f64, gas: &GasProperties) -> f64 {
    if p_down > p_up {
        return -isentropic_orifice_flow(area, p_down, t_up, p_up, gas);
    }
    let g = gas.gamma;
    let ratio = (p_down / p_up).max(critical_pressure_ratio(g));
    let psi = (2.0 * g / (g - 1.0) * (ratio.powf(2.0 / g) - ratio.powf((g + 1.0) / g))).max(0.0);
    area * p_up * psi.sqrt() / (gas.r * t_up).sqrt()
}

/// Convergent nozzle: mass-flow law plus the exit state.
pub fn convergent_nozzle(
    params: &ConvergentNozzleParams,
    inlet: &FluidPortState,
    amb: f64,
) -> Result<(Vec<Residual>, NozzleExit), ComponentError> {
    let gas = inlet.fluid.gas().ok_or(ComponentError::LiquidInNozzle)?;
    let mdot = isentropic_orifice_flow(params.throat_area, inlet.p0, inlet.t0, amb, &gas);
    let crit = critical_pressure_ratio(gas.gamma);
    let back = amb / inlet.p0;
    let (mach, p_e) = if back <= crit {
        (1.0, inlet.p0 * crit)
    } else if back < 1.0 {
        (mach_from_pressure_ratio(back, gas.gamma), amb)
    } else {
        (0.0, amb)
    };
    let exit = exit_state(&gas, inlet, mach, p_e, params.throat_area, params.throat_area, params.eta_noz, amb);
    let residuals = vec![Residual::new("nozzle_flow", UnitClass::MassFlow, inlet.mdot - mdot)];
    Ok((residuals, exit))
}

pub(crate) fn quantities(exit: &NozzleExit, inlet: &FluidPortState) -> Vec<Quantity> {
    vec![
        Quantity::new("thrust", UnitClass::Force, exit.thrust),
        Quantity::new("mdot", UnitClass::MassFlow, inlet.mdot),
        Quantity::new("mach_exit", UnitClass::Dimensionless, exit.mach),
        Quantity::new("p_exit", UnitClass::Pressure, exit.p_e),
        Quantity::new("v_exit", UnitClass::Velocity, exit.v_e),
        Quantity::new("a_exit", UnitClass::Area, exit.a_e),
        Quantity::new("a_throat", UnitClass::Area, exit.a_throat),
    ]
}
