//! Regenerative cooling jacket.
//!
//! The coolant is treated as an ideal liquid with constant cp through the
//! jacket. Heat pickup scales with the cooled chamber's mass flow to the
//! 0.8 power; the design run records the reference chamber flow.

use super::{signed_square, ComponentError, FluidPortState, Mode, Residual, UnitClass};

pub const HEAT_FLOW_EXPONENT: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacketParams {
    /// Heat load at the design point, W.
    pub q_design: f64,
    pub k_loss: f64,
    /// Chamber mass flow at the design point, kg/s.
    pub mdot_ref: Option<f64>,
}

/// Q = Q_design·(ṁ_chamber/ṁ_chamber,design)^0.8. In design mode the
/// current chamber flow is the reference, so Q = Q_design.
pub fn heat_load(params: &JacketParams, chamber_mdot: f64, mode: Mode) -> Result<f64, ComponentError> {
    match mode {
        Mode::Design => Ok(params.q_design),
        Mode::Offdesign => {
            let reference = params.mdot_ref.ok_or(ComponentError::MissingReference("cooling_jacket"))?;
            Ok(params.q_design * (chamber_mdot.abs() / reference).powf(HEAT_FLOW_EXPONENT))
        }
    }
}

/// ΔT = Q/(ṁ·cp).
pub fn temperature_rise(q: f64, mdot: f64, cp: f64) -> f64 {
    q / (mdot * cp)
}

pub fn cooling_jacket_residuals(
    params: &JacketParams,
    cold_in: &FluidPortState,
    cold_out: &FluidPortState,
    chamber_mdot: f64,
    mode: Mode,
) -> Result<Vec<Residual>, ComponentError> {
    let coolant = cold_in.fluid.liquid().ok_or(ComponentError::CoolantNotLiquid)?;
    let q = heat_load(params, chamber_mdot, mode)?;
    Ok(vec![
        Residual::new("continuity", UnitClass::MassFlow, cold_in.mdot - cold_out.mdot),
        Residual::new(
            "heat_pickup",
            UnitClass::Power,
            cold_in.mdot * coolant.cp * (cold_out.t0 - cold_in.t0) - q,
        ),
        Residual::new(
            "pressure_loss",
            UnitClass::Pressure,
            cold_out.p0 - cold_in.p0 + params.k_loss * signed_square(cold_in.mdot) / coolant.density,
        ),
    ])
}

pub(crate) const EQUATIONS: usize = 3;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::test_fluids::{air, lh2};
    use approx::assert_relative_eq;

    #[test]
    fn hand_temperature_rise() {
        // 7e6/(2.1·14300)
        assert!((temperature_rise(7e6, 2.1, 14300.0) - 233.1).abs() < 0.05);
    }

    #[test]
    fn adiabatic_limit_only_drops_pressure() {
        let params = JacketParams { q_design: 0.0, k_loss: 1e6, mdot_ref: Some(16.0) };
        let inlet = FluidPortState::new(8e6, 21.0, 2.8, lh2());
        let dp = 1e6 * 2.8 * 2.8 / 70.85;
        let outlet = FluidPortState::new(8e6 - dp, 21.0, 2.8, lh2());
        for mode in [Mode::Design, Mode::Offdesign] {
            let r = cooling_jacket_residuals(&params, &inlet, &outlet, 16.0, mode).unwrap();
            assert_eq!(r.len(), EQUATIONS);
            assert!(r.iter().all(|r| r.value.abs() < 1e-6), "{r:?}");
        }
    }

    #[test]
    fn heat_scales_with_chamber_flow() {
        let params = JacketParams { q_design: 5e6, k_loss: 0.0, mdot_ref: Some(10.0) };
        assert_eq!(heat_load(&params, 10.0, Mode::Offdesign).unwrap(), 5e6);
        assert_relative_eq!(heat_load(&params, 20.0, Mode::Offdesign).unwrap(), 5e6 * 2f64.powf(0.8));
        assert_eq!(heat_load(&params, 20.0, Mode::Design).unwrap(), 5e6);
        let no_ref = JacketParams { mdot_ref: None, ..params };
        assert!(heat_load(&no_ref, 20.0, Mode::Offdesign).is_err());
    }

    #[test]
    fn gas_coolant_rejected() {
        let params = JacketParams { q_design: 1.0, k_loss: 0.0, mdot_ref: None };
        let s = FluidPortState::new(1e6, 300.0, 1.0, air());
        assert_eq!(
            cooling_jacket_residuals(&params, &s, &s, 1.0, Mode::Design),
            Err(ComponentError::CoolantNotLiquid)
        );
    }
}
