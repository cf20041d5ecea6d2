//! Injector orifice: incompressible law for liquids, isentropic
//! (choking) orifice law for gases.

use super::nozzle::isentropic_orifice_flow;
use super::{signed_sqrt, ComponentError, FluidPortState, Residual, UnitClass};
use crate::fluids::FluidProps;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InjectorParams {
    pub cd: f64,
    /// Discharge area, m².
    pub area: f64,
}

/// Liquid orifice law ṁ = Cd·A·√(2·ρ·Δp), signed with Δp.
pub fn liquid_orifice_flow(cd: f64, area: f64, density: f64, dp: f64) -> f64 {
    cd * area * signed_sqrt(2.0 * density * dp)
}

/// Mass flow the injector passes from `inlet` into a plenum at `p_out`.
pub fn injector_mass_flow(params: &InjectorParams, inlet: &FluidPortState, p_out: f64) -> f64 {
    match inlet.fluid.props {
        FluidProps::Liquid(l) => liquid_orifice_flow(params.cd, params.area, l.density, inlet.p0 - p_out),
        FluidProps::Gas(g) => params.cd * isentropic_orifice_flow(params.area, inlet.p0, inlet.t0, p_out, &g),
    }
}

pub fn injector_residuals(params: &InjectorParams, inlet: &FluidPortState, outlet: &FluidPortState) -> Vec<Residual> {
    vec![
        Residual::new("continuity", UnitClass::MassFlow, inlet.mdot - outlet.mdot),
        Residual::new("temperature", UnitClass::Temperature, outlet.t0 - inlet.t0),
        Residual::new(
            "orifice_flow",
            UnitClass::MassFlow,
            inlet.mdot - injector_mass_flow(params, inlet, outlet.p0),
        ),
    ]
}

pub(crate) const EQUATIONS: usize = 3;

pub(crate) fn check(inlet: &FluidPortState, outlet: &FluidPortState) -> Result<(), ComponentError> {
    if inlet.p0 <= outlet.p0 {
        Err(ComponentError::ReversePressureGradient {
            p_in: inlet.p0,
            p_out: outlet.p0,
        })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::test_fluids::{gh2, water_like};
    use approx::assert_relative_eq;

    #[test]
    fn liquid_orifice_reference() {
        // 1e-4·√(2·1000·5e5)
        assert!((liquid_orifice_flow(1.0, 1e-4, 1000.0, 5e5) - 3.1623).abs() <= 1e-3);
        assert_eq!(liquid_orifice_flow(1.0, 1e-4, 1000.0, 0.0), 0.0);
        assert!(liquid_orifice_flow(1.0, 1e-4, 1000.0, -5e5) < 0.0);
    }

    #[test]
    fn residuals_at_consistent_state() {
        let params = InjectorParams { cd: 0.8, area: 5e-4 };
        let f = water_like(1141.0);
        let mdot = liquid_orifice_flow(0.8, 5e-4, 1141.0, 4e5);
        let inlet = FluidPortState::new(3.6e6, 94.0, mdot, f.clone());
        let outlet = FluidPortState::new(3.2e6, 94.0, mdot, f);
        let r = injector_residuals(&params, &inlet, &outlet);
        assert!(r.iter().all(|r| r.value.abs() < 1e-10));
        assert!(check(&inlet, &outlet).is_ok());
        assert!(check(&outlet, &inlet).is_err());
    }

    #[test]
    fn gas_branch_tends_to_incompressible_at_small_drop() {
        let f = gh2();
        let gas = f.gas().unwrap();
        let params = InjectorParams { cd: 0.8, area: 1e-3 };
        let inlet = FluidPortState::new(4e6, 150.0, 0.0, f);
        let dp = 1e3;
        let rho = 4e6 / (gas.r * 150.0);
        let compressible = injector_mass_flow(&params, &inlet, 4e6 - dp);
        assert_relative_eq!(compressible, liquid_orifice_flow(0.8, 1e-3, rho, dp), max_relative = 1e-3);
        assert!(injector_mass_flow(&params, &inlet, 1e6) > compressible);
    }
}
