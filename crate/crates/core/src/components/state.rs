use std::borrow::Cow;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::fluids::Fluid;

/// Solve mode of a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Operational specs fixed, geometry (and optionally calibration) solved.
    Design,
    /// Geometry and calibration frozen, boundary conditions varied.
    Offdesign,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Design => "design",
            Mode::Offdesign => "offdesign",
        })
    }
}

/// Physical unit class of a variable, residual, or parameter. Drives the
/// scaling the solver applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitClass {
    Pressure,
    Temperature,
    MassFlow,
    Speed,
    Area,
    Power,
    LossCoefficient,
    VolumeFlow,
    Velocity,
    Force,
    Time,
    Dimensionless,
}

impl UnitClass {
    pub fn scale(self) -> f64 {
        match self {
            UnitClass::Pressure => 1e6,
            UnitClass::Temperature => 1e3,
            UnitClass::MassFlow => 1e1,
            UnitClass::Speed => 1e3,
            UnitClass::Area => 1e-3,
            UnitClass::Power => 1e6,
            UnitClass::LossCoefficient => 1e6,
            UnitClass::VolumeFlow => 1e-2,
            UnitClass::Velocity => 1e3,
            UnitClass::Force => 1e5,
            UnitClass::Time => 1e2,
            UnitClass::Dimensionless => 1.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            UnitClass::Pressure => "Pa",
            UnitClass::Temperature => "K",
            UnitClass::MassFlow => "kg/s",
            UnitClass::Speed => "rad/s",
            UnitClass::Area => "m2",
            UnitClass::Power => "W",
            UnitClass::LossCoefficient => "Pa.s2.m3/kg2",
            UnitClass::VolumeFlow => "m3/s",
            UnitClass::Velocity => "m/s",
            UnitClass::Force => "N",
            UnitClass::Time => "s",
            UnitClass::Dimensionless => "-",
        }
    }
}

/// Unknowns carried on a fluid connection. `mdot` is positive in the
/// connection's direction, from the upstream outlet to the downstream inlet.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidPortState {
    pub p0: f64,
    pub t0: f64,
    pub mdot: f64,
    pub fluid: Arc<Fluid>,
}

impl FluidPortState {
    pub fn new(p0: f64, t0: f64, mdot: f64, fluid: Arc<Fluid>) -> Self {
        Self { p0, t0, mdot, fluid }
    }

    /// Total enthalpy flux ṁ·cp·T0 relative to 0 K, W.
    pub fn enthalpy_flux(&self) -> f64 {
        self.mdot * self.fluid.cp() * self.t0
    }
}

/// Unknowns carried on a mechanical connection. `power` is the power the
/// shaft delivers to the attached machine: positive into a pump, negative
/// out of a turbine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechPortState {
    pub power: f64,
    pub speed: f64,
}

/// One residual equation value in physical units.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub name: Cow<'static, str>,
    pub unit: UnitClass,
    pub value: f64,
}

impl Residual {
    pub fn new(name: impl Into<Cow<'static, str>>, unit: UnitClass, value: f64) -> Self {
        Self {
            name: name.into(),
            unit,
            value,
        }
    }
}

/// A named derived quantity of a component (spec target or reported output).
#[derive(Debug, Clone, PartialEq)]
pub struct Quantity {
    pub name: &'static str,
    pub unit: UnitClass,
    pub value: f64,
}

impl Quantity {
    pub fn new(name: &'static str, unit: UnitClass, value: f64) -> Self {
        Self { name, unit, value }
    }
}

/// x·|x|, the sign-preserving square used by quadratic loss laws.
pub(crate) fn signed_square(x: f64) -> f64 {
    x * x.abs()
}

/// sign(x)·√|x|.
pub(crate) fn signed_sqrt(x: f64) -> f64 {
    x.signum() * x.abs().sqrt()
}
