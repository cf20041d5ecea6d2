//! Liquid pump: shaft power from the ideal hydraulic power over an
//! efficiency, with an affinity-scaled quadratic head curve off-design.

use super::{ComponentError, FluidPortState, MechPortState, Mode, Residual, UnitClass};

/// Pump reference point captured from the design solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpReference {
    /// Volume flow, m³/s.
    pub q: f64,
    /// Pressure rise, Pa.
    pub dp: f64,
    /// Shaft speed, rad/s.
    pub speed: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpParams {
    pub eta: f64,
    /// Head-curve coefficients (a, b, c); the design point lies on the curve
    /// when a + b + c = 1.
    pub curve: (f64, f64, f64),
    pub reference: Option<PumpReference>,
}

pub const DEFAULT_CURVE: (f64, f64, f64) = (1.5, 0.0, -0.5);

/// Shaft power drawn at mass flow `mdot` and pressure rise `dp`: ṁ·Δp/(ρ·η).
pub fn pump_power(mdot: f64, dp: f64, density: f64, eta: f64) -> f64 {
    mdot * dp / (density * eta)
}

/// Pressure rise from the head curve Δp/Δp_d = a·n² + b·n·φ + c·φ², with
/// n = N/N_d and φ = q/q_d.
pub fn head_curve_rise(curve: (f64, f64, f64), reference: &PumpReference, speed: f64, q: f64) -> f64 {
    let (a, b, c) = curve;
    let n = speed / reference.speed;
    let phi = q / reference.q;
    reference.dp * (a * n * n + b * n * phi + c * phi * phi)
}

pub fn pump_residuals(
    params: &PumpParams,
    inlet: &FluidPortState,
    outlet: &FluidPortState,
    shaft: &MechPortState,
    mode: Mode,
) -> Result<Vec<Residual>, ComponentError> {
    let liquid = inlet.fluid.liquid().ok_or(ComponentError::GasInPump)?;
    let dp = outlet.p0 - inlet.p0;
    let mut r = vec![
        Residual::new("continuity", UnitClass::MassFlow, inlet.mdot - outlet.mdot),
        Residual::new("temperature", UnitClass::Temperature, outlet.t0 - inlet.t0),
        Residual::new(
            "power",
            UnitClass::Power,
            shaft.power - pump_power(inlet.mdot, dp, liquid.density, params.eta),
        ),
    ];
    if mode == Mode::Offdesign {
        let reference = params.reference.as_ref().ok_or(ComponentError::MissingReference("pump"))?;
        let q = inlet.mdot / liquid.density;
        r.push(Residual::new(
            "head_curve",
            UnitClass::Pressure,
            dp - head_curve_rise(params.curve, reference, shaft.speed, q),
        ));
    }
    Ok(r)
}

pub(crate) fn equation_count(mode: Mode) -> usize {
    match mode {
        Mode::Design => 3,
        Mode::Offdesign => 4,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::test_fluids::{air, water_like};
    use approx::assert_relative_eq;

    #[test]
    fn hydraulic_power() {
        // 10·1e7/(1000·1)
        assert_relative_eq!(pump_power(10.0, 1e7, 1000.0, 1.0), 1e5);
        assert_relative_eq!(pump_power(10.0, 1e7, 1000.0, 0.5), 2e5);
    }

    #[test]
    fn residuals_vanish_at_consistent_state() {
        let f = water_like(1000.0);
        let params = PumpParams { eta: 0.5, curve: DEFAULT_CURVE, reference: None };
        let inlet = FluidPortState::new(2e5, 90.0, 10.0, f.clone());
        let outlet = FluidPortState::new(2e5 + 1e7, 90.0, 10.0, f);
        let shaft = MechPortState { power: 2e5, speed: 3000.0 };
        let r = pump_residuals(&params, &inlet, &outlet, &shaft, Mode::Design).unwrap();
        assert_eq!(r.len(), equation_count(Mode::Design));
        assert!(r.iter().all(|r| r.value.abs() < 1e-9), "{r:?}");
    }

    #[test]
    fn curve_anchored_at_design_point() {
        let reference = PumpReference { q: 0.01, dp: 1e7, speed: 3000.0 };
        assert_relative_eq!(head_curve_rise(DEFAULT_CURVE, &reference, 3000.0, 0.01), 1e7);
        assert_relative_eq!(head_curve_rise((0.8, 0.5, -0.3), &reference, 3000.0, 0.01), 1e7, epsilon = 1e-6);
        // drooping: more flow at fixed speed gives less rise
        assert!(head_curve_rise(DEFAULT_CURVE, &reference, 3000.0, 0.012) < 1e7);
        let f = water_like(1000.0);
        let params = PumpParams { eta: 0.7, curve: DEFAULT_CURVE, reference: Some(reference) };
        let inlet = FluidPortState::new(1e5, 300.0, 10.0, f.clone());
        let outlet = FluidPortState::new(1e5 + 1e7, 300.0, 10.0, f);
        let shaft = MechPortState { power: pump_power(10.0, 1e7, 1000.0, 0.7), speed: 3000.0 };
        let r = pump_residuals(&params, &inlet, &outlet, &shaft, Mode::Offdesign).unwrap();
        assert_eq!(r.len(), 4);
        assert!(r.iter().all(|r| r.value.abs() < 1e-9));
    }

    #[test]
    fn rejects_gas_and_missing_reference() {
        let params = PumpParams { eta: 0.7, curve: DEFAULT_CURVE, reference: None };
        let g = FluidPortState::new(1e5, 300.0, 1.0, air());
        let shaft = MechPortState { power: 0.0, speed: 1.0 };
        assert_eq!(pump_residuals(&params, &g, &g, &shaft, Mode::Design), Err(ComponentError::GasInPump));
        let l = FluidPortState::new(1e5, 300.0, 1.0, water_like(1000.0));
        assert_eq!(
            pump_residuals(&params, &l, &l, &shaft, Mode::Offdesign),
            Err(ComponentError::MissingReference("pump"))
        );
    }
}
