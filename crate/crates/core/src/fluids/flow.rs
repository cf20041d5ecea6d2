//! Isentropic compressible-flow relations for calorically perfect gases.

use super::{FluidError, GasProperties};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MachBranch {
    Subsonic,
    Supersonic,
}

fn check_gamma(gamma: f64) -> Result<(), FluidError> {
    if gamma > 1.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(FluidError::InvalidGamma(gamma))
    }
}

/// Vandenkerckhove function Γ(γ) = √γ·(2/(γ+1))^((γ+1)/(2(γ−1))).
pub fn gamma_function(gamma: f64) -> Result<f64, FluidError> {
    check_gamma(gamma)?;
    let exponent = (gamma + 1.0) / (2.0 * (gamma - 1.0));
    Ok(gamma.sqrt() * (2.0 / (gamma + 1.0)).powf(exponent))
}

/// Static-to-total temperature ratio T/T0 at Mach `mach`.
pub fn temperature_ratio(mach: f64, gamma: f64) -> f64 {
    1.0 / (1.0 + 0.5 * (gamma - 1.0) * mach * mach)
}

/// Static-to-total pressure ratio p/p0 at Mach `mach`.
pub fn pressure_ratio(mach: f64, gamma: f64) -> f64 {
    temperature_ratio(mach, gamma).powf(gamma / (gamma - 1.0))
}

/// p*/p0, the static-to-total pressure ratio at a sonic throat.
pub fn critical_pressure_ratio(gamma: f64) -> f64 {
    (2.0 / (gamma + 1.0)).powf(gamma / (gamma - 1.0))
}

/// Mach number reached by isentropic expansion to static-to-total ratio `p_over_p0`.
pub fn mach_from_pressure_ratio(p_over_p0: f64, gamma: f64) -> f64 {
    let t = p_over_p0.powf(-(gamma - 1.0) / gamma);
    (2.0 / (gamma - 1.0) * (t - 1.0)).max(0.0).sqrt()
}

/// A/A* at Mach `mach`.
pub fn area_ratio_from_mach(mach: f64, gamma: f64) -> Result<f64, FluidError> {
    check_gamma(gamma)?;
    if !(mach > 0.0) {
        return Err(FluidError::NoSolution(format!("Mach number {mach} must be positive")));
    }
    let exponent = (gamma + 1.0) / (2.0 * (gamma - 1.0));
    let base = 2.0 / (gamma + 1.0) * (1.0 + 0.5 * (gamma - 1.0) * mach * mach);
    Ok(base.powf(exponent) / mach)
}

/// Inverts [`area_ratio_from_mach`] on the requested branch by bisection.
/// The bracket is iterated down to adjacent floats, so the returned Mach
/// number satisfies |AR(M) − AR| ≤ 1e-10·AR wherever AR is representable.
pub fn mach_from_area_ratio(
    area_ratio: f64,
    gamma: f64,
    branch: MachBranch,
) -> Result<f64, FluidError> {
    check_gamma(gamma)?;
    if !(area_ratio >= 1.0) || !area_ratio.is_finite() {
        return Err(FluidError::NoSolution(format!(
            "area ratio {area_ratio} is below the sonic minimum of 1"
        )));
    }
    if area_ratio == 1.0 {
        return Ok(1.0);
    }
    let ar = |m: f64| area_ratio_from_mach(m, gamma).unwrap_or(f64::INFINITY);
    // `f(lo) > 0` and `f(hi) < 0` on the subsonic branch; reversed on the supersonic one.
    let (mut lo, mut hi) = match branch {
        MachBranch::Subsonic => {
            let mut lo = 0.5;
            while ar(lo) < area_ratio {
                lo *= 0.5;
                if lo < 1e-300 {
                    return Err(FluidError::NoSolution("subsonic bracket underflow".into()));
                }
            }
            (lo, 1.0)
        }
        MachBranch::Supersonic => {
            let mut hi = 2.0;
            while ar(hi) < area_ratio {
                hi *= 2.0;
                if hi > 1e6 {
                    return Err(FluidError::NoSolution("supersonic bracket overflow".into()));
                }
            }
            (1.0, hi)
        }
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let above = ar(mid) > area_ratio;
        match (branch, above) {
            (MachBranch::Subsonic, true) | (MachBranch::Supersonic, false) => lo = mid,
            _ => hi = mid,
        }
    }
    let mid = 0.5 * (lo + hi);
    let residual = (ar(mid) - area_ratio).abs();
    if residual <= 1e-10 * area_ratio {
        Ok(mid)
    } else {
        Err(FluidError::NoSolution(format!(
            "bisection stalled with |AR(M) - AR| = {residual:e}"
        )))
    }
}

/// Choked mass flow ṁ = Γ(γ)·p0·A*/√(R·T0).
pub fn choked_mass_flow(p0: f64, t0: f64, area: f64, gas: &GasProperties) -> Result<f64, FluidError> {
    Ok(gamma_function(gas.gamma)? * p0 * area / (gas.r * t0).sqrt())
}
