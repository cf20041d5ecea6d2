//! Ideal-fluid property database and thermodynamic identities.
//!
//! Every fluid is either a calorically perfect gas or an incompressible
//! liquid with constant heat capacity. Combustion products are fixed
//! pseudo-species looked up per propellant pair.

mod combustion;
mod database;
mod flow;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use combustion::{combustion, flame_temperature, CombustionResult};
pub use database::{CombustionPair, FluidDatabase, FLUIDS_ENV_VAR};
pub use flow::{
    area_ratio_from_mach, choked_mass_flow, critical_pressure_ratio, gamma_function,
    mach_from_area_ratio, mach_from_pressure_ratio, pressure_ratio, temperature_ratio,
    MachBranch,
};

/// Errors raised by property lookups and compressible-flow relations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FluidError {
    #[error("mixture has no components")]
    EmptyMixture,
    #[error("species {0} is a liquid and cannot enter a gas mixture")]
    LiquidInGasMixture(String),
    #[error("species {0} is a gas and cannot enter a liquid mixture")]
    GasInLiquidMixture(String),
    #[error("mixture combines gas and liquid species")]
    MixedPhase,
    #[error("mass fractions must be non-negative and sum to 1 (sum = {0})")]
    BadMassFractions(f64),
    #[error("invalid specific heat ratio {0}: must be > 1")]
    InvalidGamma(f64),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("no combustion products for fuel {fuel} with oxidizer {oxidizer}")]
    UnknownPropellantPair { fuel: String, oxidizer: String },
    #[error("unknown species {0}")]
    UnknownSpecies(String),
    #[error("invalid species {name}: {reason}")]
    InvalidSpecies { name: String, reason: String },
    #[error("invalid combustion input: {0}")]
    InvalidCombustionInput(String),
    #[error("fluid database: {0}")]
    Database(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    IdealGas,
    IdealLiquid,
}

/// A pure substance entry in the property database.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Species {
    pub name: String,
    pub phase: Phase,
    /// J/(kg·K)
    pub cp: f64,
    /// Gas only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// kg/m³, liquid only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
    /// kg/mol, informational for gases.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub molar_mass: Option<f64>,
    /// J per kg of fuel; zero for non-fuels.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub heat_of_combustion: f64,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

impl Species {
    pub fn check(&self) -> Result<(), FluidError> {
        let bad = |reason: &str| FluidError::InvalidSpecies {
            name: self.name.clone(),
            reason: reason.to_string(),
        };
        if !(self.cp > 0.0) {
            return Err(bad("cp must be positive"));
        }
        if !(self.heat_of_combustion >= 0.0) {
            return Err(bad("heat_of_combustion must be non-negative"));
        }
        match self.phase {
            Phase::IdealGas => match self.gamma {
                Some(g) if g > 1.0 => Ok(()),
                Some(_) => Err(bad("gamma must exceed 1")),
                None => Err(bad("gas species need gamma")),
            },
            Phase::IdealLiquid => match self.density {
                Some(d) if d > 0.0 => Ok(()),
                Some(_) => Err(bad("density must be positive")),
                None => Err(bad("liquid species need density")),
            },
        }
    }

    pub fn is_gas(&self) -> bool {
        self.phase == Phase::IdealGas
    }

    /// Specific gas constant, R = cp·(γ−1)/γ. Liquids return `None`.
    pub fn gas_constant(&self) -> Option<f64> {
        self.gamma.filter(|_| self.is_gas()).map(|g| self.cp * (g - 1.0) / g)
    }
}

/// Mass-fraction blend of species.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    pub components: Vec<(Arc<Species>, f64)>,
}

const FRACTION_TOL: f64 = 1e-12;

impl Mixture {
    pub fn new(components: Vec<(Arc<Species>, f64)>) -> Result<Self, FluidError> {
        if components.is_empty() {
            return Err(FluidError::EmptyMixture);
        }
        let sum: f64 = components.iter().map(|(_, y)| *y).sum();
        if components.iter().any(|(_, y)| !(*y >= 0.0)) || (sum - 1.0).abs() > FRACTION_TOL {
            return Err(FluidError::BadMassFractions(sum));
        }
        Ok(Self { components })
    }

    pub fn pure(species: Arc<Species>) -> Self {
        Self {
            components: vec![(species, 1.0)],
        }
    }

    /// Species with the largest mass fraction; ties go to the first listed.
    pub fn dominant(&self) -> Option<&Species> {
        self.components
            .iter()
            .fold(None::<&(Arc<Species>, f64)>, |best, c| match best {
                Some(b) if b.1 >= c.1 => Some(b),
                _ => Some(c),
            })
            .map(|(s, _)| s.as_ref())
    }

    pub fn label(&self) -> String {
        if self.components.len() == 1 {
            return self.components[0].0.name.clone();
        }
        self.components
            .iter()
            .map(|(s, y)| format!("{}:{y}", s.name))
            .collect::<Vec<_>>()
            .join("+")
    }

    pub fn is_gas(&self) -> bool {
        self.components.iter().all(|(s, _)| s.is_gas())
    }

    /// Mass-weighted heat of combustion, J/kg.
    pub fn heat_of_combustion(&self) -> f64 {
        self.components
            .iter()
            .map(|(s, y)| y * s.heat_of_combustion)
            .sum()
    }
}

/// Derived ideal-gas view of a mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasProperties {
    pub cp: f64,
    pub gamma: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

impl GasProperties {
    pub fn cv(&self) -> f64 {
        self.cp - self.r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiquidProperties {
    pub cp: f64,
    pub density: f64,
}

/// Mass-fraction-weighted cp and cv; γ = cp/cv, R = cp − cv.
pub fn gas_props(mix: &Mixture) -> Result<GasProperties, FluidError> {
    if mix.components.is_empty() {
        return Err(FluidError::EmptyMixture);
    }
    let mut cp = 0.0;
    let mut cv = 0.0;
    for (s, y) in &mix.components {
        let gamma = match (s.phase, s.gamma) {
            (Phase::IdealGas, Some(g)) => g,
            (Phase::IdealGas, None) => return Err(FluidError::InvalidGamma(f64::NAN)),
            (Phase::IdealLiquid, _) => return Err(FluidError::LiquidInGasMixture(s.name.clone())),
        };
        cp += y * s.cp;
        cv += y * s.cp / gamma;
    }
    Ok(GasProperties {
        cp,
        gamma: cp / cv,
        r: cp - cv,
    })
}

/// Mass-weighted cp; density from additive specific volumes.
pub fn liquid_props(mix: &Mixture) -> Result<LiquidProperties, FluidError> {
    if mix.components.is_empty() {
        return Err(FluidError::EmptyMixture);
    }
    let mut cp = 0.0;
    let mut volume = 0.0;
    for (s, y) in &mix.components {
        let density = match (s.phase, s.density) {
            (Phase::IdealLiquid, Some(d)) => d,
            (Phase::IdealLiquid, None) => {
                return Err(FluidError::InvalidSpecies {
                    name: s.name.clone(),
                    reason: "missing density".into(),
                })
            }
            (Phase::IdealGas, _) => return Err(FluidError::GasInLiquidMixture(s.name.clone())),
        };
        cp += y * s.cp;
        volume += y / density;
    }
    Ok(LiquidProperties {
        cp,
        density: 1.0 / volume,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FluidProps {
    Gas(GasProperties),
    Liquid(LiquidProperties),
}

/// A mixture together with its resolved properties, as carried by a node.
#[derive(Debug, Clone, PartialEq)]
pub struct Fluid {
    pub mixture: Mixture,
    pub props: FluidProps,
}

impl Fluid {
    pub fn new(mixture: Mixture) -> Result<Self, FluidError> {
        let gases = mixture.components.iter().filter(|(s, _)| s.is_gas()).count();
        let props = if gases == mixture.components.len() {
            FluidProps::Gas(gas_props(&mixture)?)
        } else if gases == 0 {
            FluidProps::Liquid(liquid_props(&mixture)?)
        } else {
            return Err(FluidError::MixedPhase);
        };
        Ok(Self { mixture, props })
    }

    pub fn cp(&self) -> f64 {
        match self.props {
            FluidProps::Gas(g) => g.cp,
            FluidProps::Liquid(l) => l.cp,
        }
    }

    pub fn is_gas(&self) -> bool {
        matches!(self.props, FluidProps::Gas(_))
    }

    pub fn gas(&self) -> Option<GasProperties> {
        match self.props {
            FluidProps::Gas(g) => Some(g),
            FluidProps::Liquid(_) => None,
        }
    }

    pub fn liquid(&self) -> Option<LiquidProperties> {
        match self.props {
            FluidProps::Liquid(l) => Some(l),
            FluidProps::Gas(_) => None,
        }
    }

    /// Density at the given total state (ideal-gas law for gases).
    pub fn density(&self, p0: f64, t0: f64) -> f64 {
        match self.props {
            FluidProps::Gas(g) => p0 / (g.r * t0),
            FluidProps::Liquid(l) => l.density,
        }
    }

    pub fn label(&self) -> String {
        self.mixture.label()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn gas(name: &str, cp: f64, gamma: f64) -> Arc<Species> {
        Arc::new(Species {
            name: name.into(),
            phase: Phase::IdealGas,
            cp,
            gamma: Some(gamma),
            density: None,
            molar_mass: None,
            heat_of_combustion: 0.0,
        })
    }

    fn liquid(name: &str) -> Arc<Species> {
        Arc::new(Species {
            name: name.into(),
            phase: Phase::IdealLiquid,
            cp: 4186.0,
            gamma: None,
            density: Some(998.0),
            molar_mass: None,
            heat_of_combustion: 0.0,
        })
    }

    #[test]
    fn pure_gas_identity() {
        let p = gas_props(&Mixture::pure(gas("air", 1004.5, 1.4))).unwrap();
        assert_relative_eq!(p.cp, 1004.5);
        assert_relative_eq!(p.gamma, 1.4, epsilon = 1e-12);
        assert_relative_eq!(p.r, 287.0, epsilon = 1e-9);
    }

    #[test]
    fn fifty_fifty_blend() {
        let mix = Mixture::new(vec![(gas("a", 1000.0, 1.4), 0.5), (gas("b", 2000.0, 1.3), 0.5)])
            .unwrap();
        let p = gas_props(&mix).unwrap();
        // cv = 0.5·1000/1.4 + 0.5·2000/1.3
        let cv = 0.5 * (1000.0 / 1.4) + 0.5 * (2000.0 / 1.3);
        assert_relative_eq!(cv, 1126.37, epsilon = 5e-3);
        assert_relative_eq!(p.cp, 1500.0);
        assert_relative_eq!(p.gamma, 1.33170, epsilon = 1e-5);
        assert_relative_eq!(p.r, 373.63, epsilon = 5e-3);
        assert_relative_eq!(p.r, p.cp - p.cp / p.gamma, epsilon = 1e-9);
    }

    #[test]
    fn empty_and_liquid_mixtures_rejected() {
        let empty = Mixture { components: vec![] };
        assert_eq!(gas_props(&empty), Err(FluidError::EmptyMixture));
        assert_eq!(Mixture::new(vec![]), Err(FluidError::EmptyMixture));
        let wet = Mixture::new(vec![(gas("a", 1000.0, 1.4), 0.5), (liquid("w"), 0.5)]).unwrap();
        assert_eq!(gas_props(&wet), Err(FluidError::LiquidInGasMixture("w".into())));
        assert_eq!(Fluid::new(wet).unwrap_err(), FluidError::MixedPhase);
    }

    #[test]
    fn fractions_must_close() {
        let r = Mixture::new(vec![(gas("a", 1000.0, 1.4), 0.5), (gas("b", 1000.0, 1.4), 0.4)]);
        assert!(matches!(r, Err(FluidError::BadMassFractions(_))));
    }

    proptest! {
        #[test]
        fn blend_is_continuous_and_matches_endpoints(x in 0.0f64..=1.0) {
            let a = gas("a", 1000.0, 1.4);
            let b = gas("b", 2000.0, 1.3);
            let mix = Mixture { components: vec![(a.clone(), x), (b.clone(), 1.0 - x)] };
            let p = gas_props(&mix).unwrap();
            // cp linear in x
            prop_assert!((p.cp - (1000.0 * x + 2000.0 * (1.0 - x))).abs() < 1e-9);
            prop_assert!(p.gamma > 1.3 - 1e-12 && p.gamma < 1.4 + 1e-12);
            let near = Mixture { components: vec![(a, (x + 1e-9).min(1.0)), (b, 1.0 - (x + 1e-9).min(1.0))] };
            let q = gas_props(&near).unwrap();
            prop_assert!((q.gamma - p.gamma).abs() < 1e-6);
        }
    }

    #[test]
    fn blend_endpoints_are_pure_species() {
        let a = gas("a", 1000.0, 1.4);
        let b = gas("b", 2000.0, 1.3);
        let at0 = gas_props(&Mixture { components: vec![(a.clone(), 0.0), (b.clone(), 1.0)] }).unwrap();
        let at1 = gas_props(&Mixture { components: vec![(a, 1.0), (b, 0.0)] }).unwrap();
        assert_relative_eq!(at0.gamma, 1.3, epsilon = 1e-12);
        assert_relative_eq!(at1.gamma, 1.4, epsilon = 1e-12);
    }
}
