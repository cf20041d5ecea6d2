//! Pipes and valves: quadratic pressure loss, adiabatic, no storage.

use super::{signed_square, ComponentError, FluidPortState, Residual, UnitClass};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipeParams {
    /// Loss coefficient k in Δp = k·ṁ|ṁ|/ρ.
    pub k_loss: f64,
    /// Valve opening in (0, 1]; plain pipes use 1.
    pub opening: f64,
}

impl PipeParams {
    pub fn pipe(k_loss: f64) -> Self {
        Self { k_loss, opening: 1.0 }
    }

    /// Effective loss coefficient k/opening².
    pub fn effective_k(&self) -> f64 {
        self.k_loss / (self.opening * self.opening)
    }
}

/// Pressure drop of a quadratic-loss element at mass flow `mdot` and inlet density `rho`.
pub fn pressure_drop(k_eff: f64, mdot: f64, rho: f64) -> f64 {
    k_eff * signed_square(mdot) / rho
}

/// Continuity, temperature pass-through and the loss law. A closed valve
/// (opening ≤ 0) is rejected rather than solved as a dead branch.
pub fn pipe_residuals(
    params: &PipeParams,
    inlet: &FluidPortState,
    outlet: &FluidPortState,
) -> Result<Vec<Residual>, ComponentError> {
    if !(params.opening > 0.0) {
        return Err(ComponentError::ClosedValve(params.opening));
    }
    let rho = inlet.fluid.density(inlet.p0, inlet.t0);
    Ok(vec![
        Residual::new("continuity", UnitClass::MassFlow, inlet.mdot - outlet.mdot),
        Residual::new("temperature", UnitClass::Temperature, outlet.t0 - inlet.t0),
        Residual::new(
            "pressure_loss",
            UnitClass::Pressure,
            outlet.p0 - inlet.p0 + pressure_drop(params.effective_k(), inlet.mdot, rho),
        ),
    ])
}
