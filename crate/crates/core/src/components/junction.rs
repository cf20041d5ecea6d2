//! Flow junctions (N inlets, one outlet) and splitters (one inlet, N outlets).

use super::{FluidPortState, Residual, UnitClass};

/// Enthalpy-weighted outlet temperature ΣṁᵢcpᵢTᵢ / Σṁᵢcpᵢ.
pub fn mixed_temperature(inlets: &[FluidPortState]) -> f64 {
    let (h, c) = inlets.iter().fold((0.0, 0.0), |(h, c), s| {
        (h + s.enthalpy_flux(), c + s.mdot * s.fluid.cp())
    });
    h / c
}

pub fn junction_residuals(inlets: &[FluidPortState], out: &FluidPortState) -> Vec<Residual> {
    let mut r = Vec::with_capacity(inlets.len() + 2);
    let total: f64 = inlets.iter().map(|s| s.mdot).sum();
    r.push(Residual::new("mass_balance", UnitClass::MassFlow, total - out.mdot));
    for (i, s) in inlets.iter().enumerate() {
        r.push(Residual::new(format!("pressure_in{}", i + 1), UnitClass::Pressure, s.p0 - out.p0));
    }
    let h_in: f64 = inlets.iter().map(FluidPortState::enthalpy_flux).sum();
    r.push(Residual::new("energy", UnitClass::Power, h_in - out.enthalpy_flux()));
    r
}

pub fn splitter_residuals(inlet: &FluidPortState, outlets: &[FluidPortState]) -> Vec<Residual> {
    let mut r = Vec::with_capacity(2 * outlets.len() + 1);
    let total: f64 = outlets.iter().map(|s| s.mdot).sum();
    r.push(Residual::new("mass_balance", UnitClass::MassFlow, inlet.mdot - total));
    for (i, s) in outlets.iter().enumerate() {
        r.push(Residual::new(format!("pressure_out{}", i + 1), UnitClass::Pressure, s.p0 - inlet.p0));
        r.push(Residual::new(format!("temperature_out{}", i + 1), UnitClass::Temperature, s.t0 - inlet.t0));
    }
    r
}

pub(crate) fn junction_equations(inlets: usize) -> usize {
    inlets + 2
}

pub(crate) fn splitter_equations(outlets: usize) -> usize {
    2 * outlets + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::test_fluids::water;
    use approx::assert_relative_eq;

    #[test]
    fn continuity_and_mixing() {
        let a = FluidPortState::new(1e6, 300.0, 1.0, water());
        let b = FluidPortState::new(1e6, 300.0, 2.0, water());
        let out = FluidPortState::new(1e6, 300.0, 3.0, water());
        let r = junction_residuals(&[a, b], &out);
        assert_eq!(r.len(), junction_equations(2));
        assert!(r.iter().all(|r| r.value.abs() < 1e-6));

        let hot = FluidPortState::new(1e6, 300.0, 1.0, water());
        let cold = FluidPortState::new(1e6, 400.0, 3.0, water());
        // (1·300 + 3·400)/4
        assert_relative_eq!(mixed_temperature(&[hot, cold]), 375.0, epsilon = 1e-12);
    }

    #[test]
    fn splitter_branches_share_state() {
        let inlet = FluidPortState::new(2e6, 150.0, 3.0, water());
        let outs = [
            FluidPortState::new(2e6, 150.0, 1.2, water()),
            FluidPortState::new(2e6, 150.0, 1.8, water()),
        ];
        let r = splitter_residuals(&inlet, &outs);
        assert_eq!(r.len(), splitter_equations(2));
        assert!(r.iter().all(|r| r.value.abs() < 1e-12));
    }
}
