//! Rigid shaft coupling turbines to pumps: common speed and a power balance.

use super::{MechPortState, Residual, UnitClass};

/// Role of the machine attached to a shaft port.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MechRole {
    /// Delivers power (turbine).
    Driver,
    /// Absorbs power (pump).
    Load,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShaftParams {
    pub eta_mech: f64,
    /// External power extraction, W.
    pub load: f64,
}

impl Default for ShaftParams {
    fn default() -> Self {
        Self { eta_mech: 1.0, load: 0.0 }
    }
}

/// η_mech·Σ driver power − Σ load power − external load, W.
pub fn power_balance(params: &ShaftParams, ports: &[(MechPortState, MechRole)]) -> f64 {
    let (delivered, absorbed) = ports.iter().fold((0.0, 0.0), |(d, a), (s, role)| match role {
        MechRole::Driver => (d - s.power, a),
        MechRole::Load => (d, a + s.power),
    });
    params.eta_mech * delivered - absorbed - params.load
}

/// n − 1 speed equalities followed by the power balance.
pub fn shaft_residuals(params: &ShaftParams, ports: &[(MechPortState, MechRole)]) -> Vec<Residual> {
    let mut r = Vec::with_capacity(ports.len());
    if let Some((first, _)) = ports.first() {
        for (i, (s, _)) in ports.iter().enumerate().skip(1) {
            r.push(Residual::new(format!("speed_{}", i + 1), UnitClass::Speed, s.speed - first.speed));
        }
    }
    r.push(Residual::new("power_balance", UnitClass::Power, power_balance(params, ports)));
    r
}

pub(crate) fn equation_count(ports: usize) -> usize {
    ports.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn port(power: f64, role: MechRole) -> (MechPortState, MechRole) {
        (MechPortState { power, speed: 3000.0 }, role)
    }

    #[test]
    fn single_pump_balance() {
        let ports = [port(-100e3, MechRole::Driver), port(100e3, MechRole::Load)];
        let r = shaft_residuals(&ShaftParams::default(), &ports);
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|r| r.value == 0.0));
    }

    #[test]
    fn mechanical_efficiency() {
        let params = ShaftParams { eta_mech: 0.95, load: 0.0 };
        let ports = [port(-100e3, MechRole::Driver), port(95e3, MechRole::Load)];
        assert_relative_eq!(power_balance(&params, &ports), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn pumps_add_up() {
        let ports = [
            port(-100e3, MechRole::Driver),
            port(60e3, MechRole::Load),
            port(40e3, MechRole::Load),
        ];
        assert_eq!(power_balance(&ShaftParams::default(), &ports), 0.0);
        assert_eq!(shaft_residuals(&ShaftParams::default(), &ports).len(), 3);
    }

    #[test]
    fn speeds_must_match() {
        let mut ports = [port(-1.0, MechRole::Driver), port(1.0, MechRole::Load)];
        ports[1].0.speed = 3100.0;
        let r = shaft_residuals(&ShaftParams::default(), &ports);
        assert_eq!(r[0].value, 100.0);
    }
}
