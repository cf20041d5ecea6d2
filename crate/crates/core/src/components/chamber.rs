//! Combustion chamber and gas generator.
//!
//! Both mix a fuel and an oxidizer stream at a common pressure and release
//! heat through the fixed-product energy balance. The main chamber also
//! carries the choked throat; a gas generator discharges through whatever
//! component follows it (usually a turbine and a convergent nozzle).

use super::{ComponentError, FluidPortState, Quantity, Residual, UnitClass};
use crate::fluids::{choked_mass_flow, flame_temperature, gamma_function, GasProperties};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChamberParams {
    pub eta_comb: f64,
    /// Throat area, m². `None` for a gas generator.
    pub a_throat: Option<f64>,
}

/// Combustion temperature for the inlet streams feeding `out`.
pub fn chamber_temperature(
    params: &ChamberParams,
    products: &GasProperties,
    fuel_in: &FluidPortState,
    ox_in: &FluidPortState,
) -> f64 {
    let fuel_fraction = fuel_in.mdot / (fuel_in.mdot + ox_in.mdot);
    flame_temperature(
        fuel_fraction,
        fuel_in.t0,
        ox_in.t0,
        fuel_in.fluid.mixture.heat_of_combustion(),
        params.eta_comb,
        products.cp,
    )
}

pub fn chamber_residuals(
    params: &ChamberParams,
    fuel_in: &FluidPortState,
    ox_in: &FluidPortState,
    out: &FluidPortState,
) -> Result<Vec<Residual>, ComponentError> {
    let products = out.fluid.gas().ok_or(ComponentError::LiquidProducts)?;
    let tc = chamber_temperature(params, &products, fuel_in, ox_in);
    let mut r = vec![
        Residual::new("mass_balance", UnitClass::MassFlow, out.mdot - fuel_in.mdot - ox_in.mdot),
        Residual::new("combustion_temperature", UnitClass::Temperature, out.t0 - tc),
        Residual::new("fuel_pressure", UnitClass::Pressure, fuel_in.p0 - out.p0),
        Residual::new("oxidizer_pressure", UnitClass::Pressure, ox_in.p0 - out.p0),
    ];
    if let Some(a_throat) = params.a_throat {
        r.push(Residual::new(
            "choked_throat",
            UnitClass::MassFlow,
            out.mdot - choked_mass_flow(out.p0, out.t0, a_throat, &products)?,
        ));
    }
    Ok(r)
}

pub(crate) fn equation_count(has_throat: bool) -> usize {
    4 + has_throat as usize
}

pub(crate) fn quantities(
    params: &ChamberParams,
    fuel_in: &FluidPortState,
    ox_in: &FluidPortState,
    out: &FluidPortState,
) -> Vec<Quantity> {
    let gas = out.fluid.gas();
    let mut q = vec![
        Quantity::new(if params.a_throat.is_some() { "p_c" } else { "p" }, UnitClass::Pressure, out.p0),
        Quantity::new("of", UnitClass::Dimensionless, ox_in.mdot / fuel_in.mdot),
        Quantity::new("mdot", UnitClass::MassFlow, out.mdot),
        Quantity::new(
            if params.a_throat.is_some() { "t_c" } else { "t" },
            UnitClass::Temperature,
            out.t0,
        ),
    ];
    if params.a_throat.is_some() {
        let c_star = gas
            .and_then(|g| gamma_function(g.gamma).ok().map(|gf| (g.r * out.t0).sqrt() / gf))
            .unwrap_or(f64::NAN);
        q.push(Quantity::new("c_star", UnitClass::Velocity, c_star));
    }
    q
}

/// Post-solve checks on the inlet flows.
pub(crate) fn check(fuel_in: &FluidPortState, ox_in: &FluidPortState) -> Result<(), ComponentError> {
    if fuel_in.mdot < 0.0 {
        return Err(ComponentError::NegativeFuelFlow(fuel_in.mdot));
    }
    if ox_in.mdot < 0.0 {
        return Err(ComponentError::ReverseFlow(ox_in.mdot));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::test_fluids::{air, lh2, lox, lox_h2_products};

    #[test]
    fn cold_flow_choked_throat() {
        // Γ(1.4)·1e6·1e-3/√(287·300)
        let gas = GasProperties { cp: 1004.5, gamma: 1.4, r: 287.0 };
        let mdot = choked_mass_flow(1e6, 300.0, 1e-3, &gas).unwrap();
        assert!((mdot - 2.333).abs() <= 1e-3);
        let params = ChamberParams { eta_comb: 1.0, a_throat: Some(1e-3) };
        let fuel = FluidPortState::new(1e6, 300.0, 0.0, air());
        let ox = FluidPortState::new(1e6, 300.0, mdot, air());
        let out = FluidPortState::new(1e6, 300.0, mdot, air());
        let r = chamber_residuals(&params, &fuel, &ox, &out).unwrap();
        assert_eq!(r.len(), 5);
        assert!(r.iter().all(|r| r.value.abs() < 1e-9), "{r:?}");
    }

    #[test]
    fn zero_fuel_releases_no_heat() {
        let params = ChamberParams { eta_comb: 1.0, a_throat: None };
        let fuel = FluidPortState::new(3e6, 20.0, 0.0, lh2());
        let ox = FluidPortState::new(3e6, 90.0, 10.0, lox());
        let products = lox_h2_products().gas().unwrap();
        assert_eq!(chamber_temperature(&params, &products, &fuel, &ox), 90.0);
    }

    #[test]
    fn energy_balance_in_chamber() {
        let products = lox_h2_products();
        let gas = products.gas().unwrap();
        let params = ChamberParams { eta_comb: 0.65, a_throat: None };
        let fuel = FluidPortState::new(3e6, 150.0, 2.8, lh2());
        let ox = FluidPortState::new(3e6, 94.0, 14.0, lox());
        let tc = chamber_temperature(&params, &gas, &fuel, &ox);
        let t_in = (2.8 * 150.0 + 14.0 * 94.0) / 16.8;
        let by_hand = t_in + 0.65 * 1.2e8 / (6.0 * gas.cp);
        assert!((tc - by_hand).abs() < 1e-9);
        let out = FluidPortState::new(3e6, tc, 16.8, products);
        let r = chamber_residuals(&params, &fuel, &ox, &out).unwrap();
        assert_eq!(r.len(), equation_count(false));
        assert!(r.iter().all(|r| r.value.abs() < 1e-9));
    }

    #[test]
    fn flow_direction_checks() {
        let fuel = FluidPortState::new(1e6, 20.0, -0.1, lh2());
        let ox = FluidPortState::new(1e6, 90.0, 1.0, lox());
        assert!(matches!(check(&fuel, &ox), Err(ComponentError::NegativeFuelFlow(_))));
        let fuel = FluidPortState::new(1e6, 20.0, 0.1, lh2());
        let ox = FluidPortState::new(1e6, 90.0, -1.0, lox());
        assert!(matches!(check(&fuel, &ox), Err(ComponentError::ReverseFlow(_))));
    }
}
