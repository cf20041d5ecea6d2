//! Engine-level metering: thrust, specific impulse and mixture ratio.

use serde::{Deserialize, Serialize};

/// Standard gravity, m/s².
pub const G0: f64 = 9.80665;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerformanceMetrics {
    /// Sum over all nozzles, N.
    pub thrust: f64,
    /// thrust/(ṁ_total·g0), s.
    pub isp: f64,
    /// Propellant drawn from all tanks, kg/s.
    pub mdot_total: f64,
    /// Mixture ratio of the main combustion chamber, if any.
    pub of_ratio: Option<f64>,
    /// Largest shaft power-balance residual, W.
    pub power_balance_residual: f64,
}

impl PerformanceMetrics {
    pub fn new(thrust: f64, mdot_total: f64, of_ratio: Option<f64>, power_balance_residual: f64) -> Self {
        let isp = if mdot_total != 0.0 { thrust / (mdot_total * G0) } else { 0.0 };
        Self {
            thrust,
            isp,
            mdot_total,
            of_ratio,
            power_balance_residual,
        }
    }
}
