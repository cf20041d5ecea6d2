//! The component palette.
//!
//! Each family declares its ports, its parameters (split into calibration,
//! geometry, boundary, and reference classes), the derived quantities that
//! specifications may target, and the residual equations it contributes in
//! each mode. Residual functions are pure: they map port states and
//! parameter values to residuals, with no shared state.

mod chamber;
mod injector;
mod jacket;
mod junction;
mod monitor;
mod nozzle;
mod pipe;
mod pump;
mod shaft;
mod state;
mod tank;
mod turbine;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fluids::FluidError;

pub use chamber::{chamber_residuals, chamber_temperature, ChamberParams};
pub use injector::{injector_mass_flow, injector_residuals, liquid_orifice_flow, InjectorParams};
pub use jacket::{cooling_jacket_residuals, heat_load, temperature_rise, JacketParams, HEAT_FLOW_EXPONENT};
pub use junction::{junction_residuals, mixed_temperature, splitter_residuals};
pub use monitor::{PerformanceMetrics, G0};
pub use nozzle::{
    convergent_nozzle, isentropic_orifice_flow, nozzle_exit, ConvergentNozzleParams, NozzleExit,
    NozzleParams, SEPARATION_RATIO,
};
pub use pipe::{pipe_residuals, pressure_drop, PipeParams};
pub use pump::{head_curve_rise, pump_power, pump_residuals, PumpParams, PumpReference, DEFAULT_CURVE};
pub use shaft::{power_balance, shaft_residuals, MechRole, ShaftParams};
pub use state::{FluidPortState, MechPortState, Mode, Quantity, Residual, UnitClass};
pub(crate) use state::{signed_sqrt, signed_square};
pub use tank::{tank_residuals, TankParams};
pub use turbine::{choked_area, turbine_outlet_temperature, turbine_power, turbine_residuals, TurbineParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComponentError {
    #[error("pump working fluid must be a liquid")]
    GasInPump,
    #[error("turbine working fluid must be a gas")]
    LiquidInTurbine,
    #[error("nozzle flow must be a gas")]
    LiquidInNozzle,
    #[error("combustion products must be a gas")]
    LiquidProducts,
    #[error("cooling jacket coolant must be a liquid at the inlet")]
    CoolantNotLiquid,
    #[error("valve opening {0} is not positive; a closed valve is not a solvable branch")]
    ClosedValve(f64),
    #[error("{0} has no design reference point; run the design step first")]
    MissingReference(&'static str),
    #[error("missing parameter {0}")]
    MissingParameter(&'static str),
    #[error("turbine outlet pressure {p_out} Pa is not below inlet pressure {p_in} Pa")]
    PressureRise { p_in: f64, p_out: f64 },
    #[error("injector inlet pressure {p_in} Pa does not exceed outlet pressure {p_out} Pa")]
    ReversePressureGradient { p_in: f64, p_out: f64 },
    #[error("fuel mass flow {0} kg/s is negative")]
    NegativeFuelFlow(f64),
    #[error("reverse flow of {0} kg/s")]
    ReverseFlow(f64),
    #[error(transparent)]
    Fluid(#[from] FluidError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Tank,
    Pipe,
    Valve,
    Pump,
    Turbine,
    Shaft,
    CombustionChamber,
    GasGenerator,
    Nozzle,
    ConvergentNozzle,
    CoolingJacket,
    Injector,
    Junction,
    Splitter,
    Monitor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamClass {
    /// Efficiency-type degree of freedom used to align the model.
    Calibration,
    /// Characteristic area, loss coefficient or ratio; sized at design.
    Geometry,
    /// Operating condition that off-design runs may override.
    Boundary,
    /// Captured from the design solution; never user-tuned.
    Reference,
    /// Port-count setting.
    Structure,
    /// Text setting (fluid name, referenced component).
    Setting,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Requirement {
    Required,
    /// May be omitted; omission drops the equation that uses it.
    Optional,
    Default(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamDef {
    pub name: &'static str,
    pub class: ParamClass,
    pub unit: UnitClass,
    pub requirement: Requirement,
    pub doc: &'static str,
}

const fn num(name: &'static str, class: ParamClass, unit: UnitClass, requirement: Requirement, doc: &'static str) -> ParamDef {
    ParamDef { name, class, unit, requirement, doc }
}

const fn text(name: &'static str, requirement: Requirement, doc: &'static str) -> ParamDef {
    ParamDef { name, class: ParamClass::Setting, unit: UnitClass::Dimensionless, requirement, doc }
}

use ParamClass::*;
use Requirement::{Default as Dflt, Optional, Required};

const TANK_PARAMS: &[ParamDef] = &[
    text("fluid", Required, "stored species"),
    num("p_out", Boundary, UnitClass::Pressure, Optional, "outlet total pressure"),
    num("t_out", Boundary, UnitClass::Temperature, Optional, "outlet total temperature"),
];
const PIPE_PARAMS: &[ParamDef] = &[num("k_loss", Geometry, UnitClass::LossCoefficient, Required, "loss coefficient in dp = k*mdot^2/rho")];
const VALVE_PARAMS: &[ParamDef] = &[
    num("k_loss", Geometry, UnitClass::LossCoefficient, Required, "fully open loss coefficient"),
    num("opening", Boundary, UnitClass::Dimensionless, Dflt(1.0), "opening fraction; loss scales with 1/opening^2"),
];
const PUMP_PARAMS: &[ParamDef] = &[
    num("eta", Calibration, UnitClass::Dimensionless, Required, "hydraulic efficiency"),
    num("a", Calibration, UnitClass::Dimensionless, Dflt(DEFAULT_CURVE.0), "head curve speed^2 coefficient"),
    num("b", Calibration, UnitClass::Dimensionless, Dflt(DEFAULT_CURVE.1), "head curve speed*flow coefficient"),
    num("c", Calibration, UnitClass::Dimensionless, Dflt(DEFAULT_CURVE.2), "head curve flow^2 coefficient"),
    num("q_ref", Reference, UnitClass::VolumeFlow, Optional, "design volume flow"),
    num("dp_ref", Reference, UnitClass::Pressure, Optional, "design pressure rise"),
    num("speed_ref", Reference, UnitClass::Speed, Optional, "design shaft speed"),
];
const TURBINE_PARAMS: &[ParamDef] = &[
    num("eta", Calibration, UnitClass::Dimensionless, Required, "total-to-total isentropic efficiency"),
    num("a_eff", Geometry, UnitClass::Area, Required, "effective choked flow area"),
];
const SHAFT_PARAMS: &[ParamDef] = &[
    num("ports", Structure, UnitClass::Dimensionless, Dflt(2.0), "number of attached machines"),
    num("eta_mech", Calibration, UnitClass::Dimensionless, Dflt(1.0), "mechanical efficiency on driver power"),
    num("load", Boundary, UnitClass::Power, Dflt(0.0), "external power extraction"),
];
const CHAMBER_PARAMS: &[ParamDef] = &[
    num("eta_comb", Calibration, UnitClass::Dimensionless, Dflt(1.0), "combustion efficiency on heat release"),
    num("a_throat", Geometry, UnitClass::Area, Required, "nozzle throat area"),
];
const GG_PARAMS: &[ParamDef] = &[num("eta_comb", Calibration, UnitClass::Dimensionless, Dflt(1.0), "combustion efficiency on heat release")];
const NOZZLE_PARAMS: &[ParamDef] = &[
    num("area_ratio", Geometry, UnitClass::Dimensionless, Required, "exit-to-throat area ratio"),
    num("eta_noz", Calibration, UnitClass::Dimensionless, Dflt(1.0), "exit velocity loss factor"),
];
const CONVERGENT_PARAMS: &[ParamDef] = &[
    num("throat_area", Geometry, UnitClass::Area, Required, "throat (exit) area"),
    num("eta_noz", Calibration, UnitClass::Dimensionless, Dflt(1.0), "exit velocity loss factor"),
];
const JACKET_PARAMS: &[ParamDef] = &[
    text("chamber", Required, "combustion chamber whose flow sets the heat load"),
    text("outlet_fluid", Optional, "species label carried downstream (coolant leaving as gas)"),
    num("q_design", Calibration, UnitClass::Power, Required, "heat load at the design point"),
    num("k_loss", Geometry, UnitClass::LossCoefficient, Required, "coolant loss coefficient"),
    num("mdot_ref", Reference, UnitClass::MassFlow, Optional, "chamber flow at the design point"),
];
const INJECTOR_PARAMS: &[ParamDef] = &[
    num("cd", Calibration, UnitClass::Dimensionless, Dflt(1.0), "discharge coefficient"),
    num("area", Geometry, UnitClass::Area, Required, "discharge area"),
];
const JUNCTION_PARAMS: &[ParamDef] = &[num("inlets", Structure, UnitClass::Dimensionless, Dflt(2.0), "number of inlets")];
const SPLITTER_PARAMS: &[ParamDef] = &[num("outlets", Structure, UnitClass::Dimensionless, Dflt(2.0), "number of outlets")];
const MONITOR_PARAMS: &[ParamDef] = &[num("p_amb", Boundary, UnitClass::Pressure, Dflt(0.0), "ambient pressure seen by every nozzle")];

type QuantityDef = (&'static str, UnitClass);
const TANK_Q: &[QuantityDef] = &[("mdot", UnitClass::MassFlow), ("p", UnitClass::Pressure), ("t", UnitClass::Temperature)];
const PIPE_Q: &[QuantityDef] = &[("dp", UnitClass::Pressure), ("mdot", UnitClass::MassFlow)];
const PUMP_Q: &[QuantityDef] = &[
    ("dp", UnitClass::Pressure),
    ("mdot", UnitClass::MassFlow),
    ("power", UnitClass::Power),
    ("p_out", UnitClass::Pressure),
];
const TURBINE_Q: &[QuantityDef] = &[
    ("pressure_ratio", UnitClass::Dimensionless),
    ("mdot", UnitClass::MassFlow),
    ("power", UnitClass::Power),
    ("t_out", UnitClass::Temperature),
    ("p_in", UnitClass::Pressure),
];
const SHAFT_Q: &[QuantityDef] = &[("speed", UnitClass::Speed), ("power_balance", UnitClass::Power)];
const CHAMBER_Q: &[QuantityDef] = &[
    ("p_c", UnitClass::Pressure),
    ("of", UnitClass::Dimensionless),
    ("mdot", UnitClass::MassFlow),
    ("t_c", UnitClass::Temperature),
    ("c_star", UnitClass::Velocity),
];
const GG_Q: &[QuantityDef] = &[
    ("p", UnitClass::Pressure),
    ("of", UnitClass::Dimensionless),
    ("mdot", UnitClass::MassFlow),
    ("t", UnitClass::Temperature),
];
const NOZZLE_Q: &[QuantityDef] = &[
    ("thrust", UnitClass::Force),
    ("mdot", UnitClass::MassFlow),
    ("mach_exit", UnitClass::Dimensionless),
    ("p_exit", UnitClass::Pressure),
    ("v_exit", UnitClass::Velocity),
    ("a_exit", UnitClass::Area),
    ("a_throat", UnitClass::Area),
];
const JACKET_Q: &[QuantityDef] = &[
    ("dp", UnitClass::Pressure),
    ("t_out", UnitClass::Temperature),
    ("p_out", UnitClass::Pressure),
    ("mdot", UnitClass::MassFlow),
    ("heat", UnitClass::Power),
];
const JUNCTION_Q: &[QuantityDef] = &[("mdot", UnitClass::MassFlow), ("t_out", UnitClass::Temperature)];
const SPLITTER_Q: &[QuantityDef] = &[("mdot", UnitClass::MassFlow)];
const MONITOR_Q: &[QuantityDef] = &[("thrust", UnitClass::Force), ("isp", UnitClass::Time), ("mdot_total", UnitClass::MassFlow)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PortKind {
    Fluid,
    Mech,
}

impl fmt::Display for PortKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PortKind::Fluid => "fluid",
            PortKind::Mech => "mech",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PortDirection {
    Inlet,
    Outlet,
    /// Machine side of a mechanical link.
    Machine,
    /// Shaft side of a mechanical link.
    Hub,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PortDef {
    pub name: String,
    pub kind: PortKind,
    pub direction: PortDirection,
}

impl PortDef {
    fn fluid(name: impl Into<String>, direction: PortDirection) -> Self {
        Self { name: name.into(), kind: PortKind::Fluid, direction }
    }

    fn mech(name: impl Into<String>, direction: PortDirection) -> Self {
        Self { name: name.into(), kind: PortKind::Mech, direction }
    }
}

impl Family {
    pub const ALL: [Family; 15] = [
        Family::Tank,
        Family::Pipe,
        Family::Valve,
        Family::Pump,
        Family::Turbine,
        Family::Shaft,
        Family::CombustionChamber,
        Family::GasGenerator,
        Family::Nozzle,
        Family::ConvergentNozzle,
        Family::CoolingJacket,
        Family::Injector,
        Family::Junction,
        Family::Splitter,
        Family::Monitor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Tank => "tank",
            Family::Pipe => "pipe",
            Family::Valve => "valve",
            Family::Pump => "pump",
            Family::Turbine => "turbine",
            Family::Shaft => "shaft",
            Family::CombustionChamber => "combustion_chamber",
            Family::GasGenerator => "gas_generator",
            Family::Nozzle => "nozzle",
            Family::ConvergentNozzle => "convergent_nozzle",
            Family::CoolingJacket => "cooling_jacket",
            Family::Injector => "injector",
            Family::Junction => "junction",
            Family::Splitter => "splitter",
            Family::Monitor => "monitor",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn description(self) -> &'static str {
        match self {
            Family::Tank => "Propellant tank pinning outlet total pressure and temperature",
            Family::Pipe => "Line with quadratic pressure loss",
            Family::Valve => "Line with quadratic loss scaled by opening",
            Family::Pump => "Liquid pump with affinity-scaled head curve",
            Family::Turbine => "Choked gas turbine with isentropic efficiency",
            Family::Shaft => "Rigid shaft: common speed, power balance",
            Family::CombustionChamber => "Fixed-product combustion chamber with choked throat",
            Family::GasGenerator => "Fixed-product combustor without throat",
            Family::Nozzle => "Convergent-divergent nozzle after a choked throat",
            Family::ConvergentNozzle => "Convergent nozzle, choked or pressure-matched",
            Family::CoolingJacket => "Regenerative cooling circuit, heat pickup scaled by chamber flow",
            Family::Injector => "Injector orifice, liquid or gas",
            Family::Junction => "Flow junction, enthalpy-weighted mixing",
            Family::Splitter => "Flow splitter",
            Family::Monitor => "Thrust and specific impulse meter; holds ambient pressure",
        }
    }

    pub fn params(self) -> &'static [ParamDef] {
        match self {
            Family::Tank => TANK_PARAMS,
            Family::Pipe => PIPE_PARAMS,
            Family::Valve => VALVE_PARAMS,
            Family::Pump => PUMP_PARAMS,
            Family::Turbine => TURBINE_PARAMS,
            Family::Shaft => SHAFT_PARAMS,
            Family::CombustionChamber => CHAMBER_PARAMS,
            Family::GasGenerator => GG_PARAMS,
            Family::Nozzle => NOZZLE_PARAMS,
            Family::ConvergentNozzle => CONVERGENT_PARAMS,
            Family::CoolingJacket => JACKET_PARAMS,
            Family::Injector => INJECTOR_PARAMS,
            Family::Junction => JUNCTION_PARAMS,
            Family::Splitter => SPLITTER_PARAMS,
            Family::Monitor => MONITOR_PARAMS,
        }
    }

    pub fn param(self, name: &str) -> Option<&'static ParamDef> {
        self.params().iter().find(|p| p.name == name)
    }

    /// Quantities a specification may target.
    pub fn quantities(self) -> &'static [(&'static str, UnitClass)] {
        match self {
            Family::Tank => TANK_Q,
            Family::Pipe | Family::Valve | Family::Injector => PIPE_Q,
            Family::Pump => PUMP_Q,
            Family::Turbine => TURBINE_Q,
            Family::Shaft => SHAFT_Q,
            Family::CombustionChamber => CHAMBER_Q,
            Family::GasGenerator => GG_Q,
            Family::Nozzle | Family::ConvergentNozzle => NOZZLE_Q,
            Family::CoolingJacket => JACKET_Q,
            Family::Junction => JUNCTION_Q,
            Family::Splitter => SPLITTER_Q,
            Family::Monitor => MONITOR_Q,
        }
    }

    /// Name of the parameter that sets the port count, for variadic families.
    pub fn structural_param(self) -> Option<&'static str> {
        match self {
            Family::Shaft => Some("ports"),
            Family::Junction => Some("inlets"),
            Family::Splitter => Some("outlets"),
            _ => None,
        }
    }

    /// Ports for an instance with `count` variadic ports (ignored by fixed families).
    pub fn ports(self, count: usize) -> Vec<PortDef> {
        use PortDirection::*;
        match self {
            Family::Tank => vec![PortDef::fluid("out", Outlet)],
            Family::Pipe | Family::Valve | Family::CoolingJacket | Family::Injector => {
                vec![PortDef::fluid("in", Inlet), PortDef::fluid("out", Outlet)]
            }
            Family::Pump | Family::Turbine => vec![
                PortDef::fluid("in", Inlet),
                PortDef::fluid("out", Outlet),
                PortDef::mech("shaft", Machine),
            ],
            Family::Shaft => (1..=count).map(|i| PortDef::mech(format!("m{i}"), Hub)).collect(),
            Family::CombustionChamber | Family::GasGenerator => vec![
                PortDef::fluid("fuel_in", Inlet),
                PortDef::fluid("ox_in", Inlet),
                PortDef::fluid("out", Outlet),
            ],
            Family::Nozzle | Family::ConvergentNozzle => vec![PortDef::fluid("in", Inlet)],
            Family::Junction => (1..=count)
                .map(|i| PortDef::fluid(format!("in{i}"), Inlet))
                .chain(std::iter::once(PortDef::fluid("out", Outlet)))
                .collect(),
            Family::Splitter => std::iter::once(PortDef::fluid("in", Inlet))
                .chain((1..=count).map(|i| PortDef::fluid(format!("out{i}"), Outlet)))
                .collect(),
            Family::Monitor => vec![],
        }
    }

    /// Role a machine plays on the shaft it drives or is driven by.
    pub fn mech_role(self) -> Option<MechRole> {
        match self {
            Family::Turbine => Some(MechRole::Driver),
            Family::Pump => Some(MechRole::Load),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Numeric parameter values of one instance, keyed by definition name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamValues {
    values: Vec<(&'static str, f64)>,
}

impl ParamValues {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &'static str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &'static str, value: f64) {
        match self.values.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = value,
            None => self.values.push((name, value)),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }

    fn req(&self, name: &'static str) -> Result<f64, ComponentError> {
        self.get(name).ok_or(ComponentError::MissingParameter(name))
    }

    fn or(&self, name: &'static str, default: f64) -> f64 {
        self.get(name).unwrap_or(default)
    }
}

/// Everything a family needs to evaluate one instance.
#[derive(Debug, Clone, Copy)]
pub struct ComponentView<'a> {
    pub family: Family,
    pub mode: Mode,
    /// Fluid port states, in the family's port order.
    pub fluid: &'a [FluidPortState],
    /// Mechanical port states, in the family's port order.
    pub mech: &'a [MechPortState],
    /// For shafts: the role of the machine on each port.
    pub mech_roles: &'a [MechRole],
    pub params: &'a ParamValues,
    /// Mass flow of the chamber a cooling jacket references.
    pub chamber_mdot: f64,
    /// Ambient pressure for nozzles.
    pub ambient: f64,
}

fn tank_params(p: &ParamValues) -> TankParams {
    TankParams { p_out: p.get("p_out"), t_out: p.get("t_out") }
}

fn pipe_params(family: Family, p: &ParamValues) -> Result<PipeParams, ComponentError> {
    Ok(PipeParams {
        k_loss: p.req("k_loss")?,
        opening: if family == Family::Valve { p.or("opening", 1.0) } else { 1.0 },
    })
}

fn pump_params(p: &ParamValues) -> Result<PumpParams, ComponentError> {
    let reference = match (p.get("q_ref"), p.get("dp_ref"), p.get("speed_ref")) {
        (Some(q), Some(dp), Some(speed)) => Some(PumpReference { q, dp, speed }),
        _ => None,
    };
    Ok(PumpParams {
        eta: p.req("eta")?,
        curve: (p.or("a", DEFAULT_CURVE.0), p.or("b", DEFAULT_CURVE.1), p.or("c", DEFAULT_CURVE.2)),
        reference,
    })
}

fn chamber_params(family: Family, p: &ParamValues) -> Result<ChamberParams, ComponentError> {
    Ok(ChamberParams {
        eta_comb: p.or("eta_comb", 1.0),
        a_throat: if family == Family::CombustionChamber { Some(p.req("a_throat")?) } else { None },
    })
}

fn jacket_params(p: &ParamValues) -> Result<JacketParams, ComponentError> {
    Ok(JacketParams { q_design: p.req("q_design")?, k_loss: p.req("k_loss")?, mdot_ref: p.get("mdot_ref") })
}

fn shaft_ports<'a>(view: &ComponentView<'a>) -> Vec<(MechPortState, MechRole)> {
    view.mech.iter().copied().zip(view.mech_roles.iter().copied()).collect()
}

/// Residual equations of one instance.
pub fn evaluate_residuals(view: &ComponentView<'_>) -> Result<Vec<Residual>, ComponentError> {
    let f = view.fluid;
    let p = view.params;
    Ok(match view.family {
        Family::Tank => tank_residuals(&tank_params(p), &f[0]),
        Family::Pipe | Family::Valve => pipe_residuals(&pipe_params(view.family, p)?, &f[0], &f[1])?,
        Family::Pump => pump_residuals(&pump_params(p)?, &f[0], &f[1], &view.mech[0], view.mode)?,
        Family::Turbine => turbine_residuals(
            &TurbineParams { eta: p.req("eta")?, a_eff: p.req("a_eff")? },
            &f[0],
            &f[1],
            &view.mech[0],
        )?,
        Family::Shaft => shaft_residuals(
            &ShaftParams { eta_mech: p.or("eta_mech", 1.0), load: p.or("load", 0.0) },
            &shaft_ports(view),
        ),
        Family::CombustionChamber | Family::GasGenerator => {
            chamber_residuals(&chamber_params(view.family, p)?, &f[0], &f[1], &f[2])?
        }
        Family::Nozzle | Family::Monitor => vec![],
        Family::ConvergentNozzle => {
            let params = ConvergentNozzleParams { throat_area: p.req("throat_area")?, eta_noz: p.or("eta_noz", 1.0) };
            convergent_nozzle(&params, &f[0], view.ambient)?.0
        }
        Family::CoolingJacket => {
            cooling_jacket_residuals(&jacket_params(p)?, &f[0], &f[1], view.chamber_mdot, view.mode)?
        }
        Family::Injector => injector_residuals(&InjectorParams { cd: p.or("cd", 1.0), area: p.req("area")? }, &f[0], &f[1]),
        Family::Junction => {
            let (out, inlets) = f.split_last().expect("junction has an outlet");
            junction_residuals(inlets, out)
        }
        Family::Splitter => {
            let (inlet, outlets) = f.split_first().expect("splitter has an inlet");
            splitter_residuals(inlet, outlets)
        }
    })
}

/// Number of residuals an instance contributes, without evaluating it.
/// `present` tells whether an optional parameter was supplied.
pub fn equation_count(family: Family, mode: Mode, present: &dyn Fn(&str) -> bool, ports: usize) -> usize {
    match family {
        Family::Tank => tank::equation_count(&TankParams {
            p_out: present("p_out").then_some(0.0),
            t_out: present("t_out").then_some(0.0),
        }),
        Family::Pipe | Family::Valve | Family::Injector => injector::EQUATIONS,
        Family::Pump => pump::equation_count(mode),
        Family::Turbine => turbine::EQUATIONS,
        Family::Shaft => shaft::equation_count(ports),
        Family::CombustionChamber => chamber::equation_count(true),
        Family::GasGenerator => chamber::equation_count(false),
        Family::Nozzle | Family::Monitor => 0,
        Family::ConvergentNozzle => 1,
        Family::CoolingJacket => jacket::EQUATIONS,
        Family::Junction => junction::junction_equations(ports),
        Family::Splitter => junction::splitter_equations(ports),
    }
}

/// Derived quantities of one instance, in the order of [`Family::quantities`].
/// Monitor quantities are network-wide and are not produced here.
pub fn evaluate_quantities(view: &ComponentView<'_>) -> Result<Vec<Quantity>, ComponentError> {
    use UnitClass as U;
    let f = view.fluid;
    let p = view.params;
    Ok(match view.family {
        Family::Tank => vec![
            Quantity::new("mdot", U::MassFlow, f[0].mdot),
            Quantity::new("p", U::Pressure, f[0].p0),
            Quantity::new("t", U::Temperature, f[0].t0),
        ],
        Family::Pipe | Family::Valve | Family::Injector => vec![
            Quantity::new("dp", U::Pressure, f[0].p0 - f[1].p0),
            Quantity::new("mdot", U::MassFlow, f[0].mdot),
        ],
        Family::Pump => vec![
            Quantity::new("dp", U::Pressure, f[1].p0 - f[0].p0),
            Quantity::new("mdot", U::MassFlow, f[0].mdot),
            Quantity::new("power", U::Power, view.mech[0].power),
            Quantity::new("p_out", U::Pressure, f[1].p0),
        ],
        Family::Turbine => vec![
            Quantity::new("pressure_ratio", U::Dimensionless, f[0].p0 / f[1].p0),
            Quantity::new("mdot", U::MassFlow, f[0].mdot),
            Quantity::new("power", U::Power, -view.mech[0].power),
            Quantity::new("t_out", U::Temperature, f[1].t0),
            Quantity::new("p_in", U::Pressure, f[0].p0),
        ],
        Family::Shaft => {
            let params = ShaftParams { eta_mech: p.or("eta_mech", 1.0), load: p.or("load", 0.0) };
            vec![
                Quantity::new("speed", U::Speed, view.mech.first().map_or(f64::NAN, |m| m.speed)),
                Quantity::new("power_balance", U::Power, power_balance(&params, &shaft_ports(view))),
            ]
        }
        Family::CombustionChamber | Family::GasGenerator => {
            chamber::quantities(&chamber_params(view.family, p)?, &f[0], &f[1], &f[2])
        }
        Family::Nozzle => {
            let params = NozzleParams { area_ratio: p.req("area_ratio")?, eta_noz: p.or("eta_noz", 1.0) };
            nozzle::quantities(&nozzle_exit(&params, &f[0], view.ambient)?, &f[0])
        }
        Family::ConvergentNozzle => {
            let params = ConvergentNozzleParams { throat_area: p.req("throat_area")?, eta_noz: p.or("eta_noz", 1.0) };
            nozzle::quantities(&convergent_nozzle(&params, &f[0], view.ambient)?.1, &f[0])
        }
        Family::CoolingJacket => vec![
            Quantity::new("dp", U::Pressure, f[0].p0 - f[1].p0),
            Quantity::new("t_out", U::Temperature, f[1].t0),
            Quantity::new("p_out", U::Pressure, f[1].p0),
            Quantity::new("mdot", U::MassFlow, f[0].mdot),
            Quantity::new("heat", U::Power, heat_load(&jacket_params(p)?, view.chamber_mdot, view.mode)?),
        ],
        Family::Junction => {
            let out = f.last().expect("junction has an outlet");
            vec![Quantity::new("mdot", U::MassFlow, out.mdot), Quantity::new("t_out", U::Temperature, out.t0)]
        }
        Family::Splitter => vec![Quantity::new("mdot", U::MassFlow, f[0].mdot)],
        Family::Monitor => vec![],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

/// A post-solve physical check result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub severity: Severity,
    pub message: String,
}

impl Finding {
    fn error(e: ComponentError) -> Self {
        Self { severity: Severity::Error, message: e.to_string() }
    }

    fn warning(message: impl Into<String>) -> Self {
        Self { severity: Severity::Warning, message: message.into() }
    }
}

/// Physical consistency checks on a converged state.
pub fn post_checks(view: &ComponentView<'_>) -> Vec<Finding> {
    let f = view.fluid;
    let mut out = Vec::new();
    match view.family {
        Family::Turbine if f[1].p0 >= f[0].p0 => {
            out.push(Finding::error(ComponentError::PressureRise { p_in: f[0].p0, p_out: f[1].p0 }));
        }
        Family::Injector => {
            if let Err(e) = injector::check(&f[0], &f[1]) {
                out.push(Finding::error(e));
            }
        }
        Family::CombustionChamber | Family::GasGenerator => {
            if let Err(e) = chamber::check(&f[0], &f[1]) {
                out.push(Finding::error(e));
            }
        }
        Family::Nozzle => {
            if let Ok(params) = view.params.req("area_ratio") {
                let params = NozzleParams { area_ratio: params, eta_noz: view.params.or("eta_noz", 1.0) };
                if let Ok(exit) = nozzle_exit(&params, &f[0], view.ambient) {
                    if exit.separated {
                        out.push(Finding::warning(format!(
                            "exit pressure {:.0} Pa below {SEPARATION_RATIO} of ambient: flow separation likely",
                            exit.p_e
                        )));
                    }
                }
            }
        }
        Family::Junction | Family::Splitter if f.iter().all(|s| s.mdot == 0.0) => {
            out.push(Finding::warning("all flows are zero (degenerate solution)"));
        }
        Family::Valve if view.params.or("opening", 1.0) > 1.0 => {
            out.push(Finding::warning(format!("valve opening {} exceeds 1", view.params.or("opening", 1.0))));
        }
        _ => {}
    }
    out
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(Family::from_name(f.name()), Some(f));
            let json = serde_json::to_string(&f).unwrap();
            assert_eq!(json, format!("\"{}\"", f.name()));
        }
        assert_eq!(Family::from_name("pmup"), None);
    }

    #[test]
    fn every_efficiency_is_calibration_class() {
        for f in Family::ALL {
            for p in f.params() {
                if p.name.starts_with("eta") || p.name == "cd" {
                    assert_eq!(p.class, ParamClass::Calibration, "{f}.{}", p.name);
                }
            }
        }
    }

    #[test]
    fn variadic_ports() {
        assert_eq!(Family::Junction.ports(3).len(), 4);
        assert_eq!(Family::Splitter.ports(2)[2].name, "out2");
        assert_eq!(Family::Shaft.ports(3).iter().filter(|p| p.kind == PortKind::Mech).count(), 3);
    }
}
