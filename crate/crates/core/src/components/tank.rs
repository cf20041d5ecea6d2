//! Propellant or pressurant tank: a boundary that pins the outlet total state.

use super::{FluidPortState, Residual, UnitClass};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TankParams {
    /// Outlet total pressure, Pa. `None` leaves the pressure to the network.
    pub p_out: Option<f64>,
    /// Outlet total temperature, K.
    pub t_out: Option<f64>,
}

/// `[out.p0 − p_out, out.T0 − T_out]`, dropping the entries whose pin is absent.
/// The outflow itself is set by the downstream network.
pub fn tank_residuals(params: &TankParams, out: &FluidPortState) -> Vec<Residual> {
    let mut r = Vec::with_capacity(2);
    if let Some(p) = params.p_out {
        r.push(Residual::new("pressure", UnitClass::Pressure, out.p0 - p));
    }
    if let Some(t) = params.t_out {
        r.push(Residual::new("temperature", UnitClass::Temperature, out.t0 - t));
    }
    r
}

pub(crate) fn equation_count(params: &TankParams) -> usize {
    params.p_out.is_some() as usize + params.t_out.is_some() as usize
}
