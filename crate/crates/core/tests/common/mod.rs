//! Helpers shared by the integration tests.

#![allow(dead_code)]

use cyclekit::components::Family;
use cyclekit::models::bundled;
use cyclekit::network::{assemble, AssembledSystem, Model};
use cyclekit::workflow::SolveReport;

pub const MODELS: [&str; 4] = ["cold_gas", "pressure_fed", "gas_generator", "expander_rl10"];

pub fn model(name: &str) -> Model {
    bundled(name).expect("bundled model exists").expect("bundled model parses")
}

/// Solution vector of `report` in the variable order of `sys`.
pub fn state_vector(sys: &AssembledSystem, report: &SolveReport) -> Vec<f64> {
    sys.variable_names().map(|n| report.variable(n).expect("same variables")).collect()
}

/// Largest relative imbalances at a converged solution.
#[derive(Debug, Default, Clone, Copy)]
pub struct Imbalance {
    pub mass: f64,
    pub enthalpy: f64,
    pub shaft: f64,
}

fn rel(defect: f64, reference: f64) -> f64 {
    defect.abs() / reference.abs().max(f64::MIN_POSITIVE)
}

/// Mass balance of junctions and splitters, total enthalpy flux of
/// adiabatic elements and shaft power balance, relative to the through
/// flow or the driver power.
pub fn imbalance(model: &Model, report: &SolveReport) -> Imbalance {
    let sys = assemble(model).expect("model assembles");
    let x = state_vector(&sys, report);
    let mut out = Imbalance::default();
    for c in &model.components {
        let Some((family, fluid, mech)) = sys.component_ports(&c.name, &x) else { continue };
        match family {
            Family::Junction | Family::Splitter => {
                let (ins, outs): (Vec<_>, Vec<_>) = if family == Family::Junction {
                    (fluid[..fluid.len() - 1].to_vec(), vec![fluid[fluid.len() - 1].clone()])
                } else {
                    (vec![fluid[0].clone()], fluid[1..].to_vec())
                };
                let m_in: f64 = ins.iter().map(|s| s.mdot).sum();
                let m_out: f64 = outs.iter().map(|s| s.mdot).sum();
                let h_in: f64 = ins.iter().map(|s| s.enthalpy_flux()).sum();
                let h_out: f64 = outs.iter().map(|s| s.enthalpy_flux()).sum();
                out.mass = out.mass.max(rel(m_in - m_out, m_in));
                out.enthalpy = out.enthalpy.max(rel(h_in - h_out, h_in));
            }
            Family::Pipe | Family::Valve | Family::Injector => {
                let h_in = fluid[0].enthalpy_flux();
                out.enthalpy = out.enthalpy.max(rel(h_in - fluid[1].enthalpy_flux(), h_in));
                out.mass = out.mass.max(rel(fluid[0].mdot - fluid[1].mdot, fluid[0].mdot));
            }
            Family::Shaft => {
                let eta = sys.component_params(&c.name, &x).and_then(|p| p.get("eta_mech")).unwrap_or(1.0);
                let load = sys.component_params(&c.name, &x).and_then(|p| p.get("load")).unwrap_or(0.0);
                let mut driver = 0.0;
                let mut absorbed = load;
                for (i, m) in mech.iter().enumerate() {
                    let port = format!("m{}", i + 1);
                    let machine = model
                        .connections
                        .iter()
                        .find(|k| k.to.component == c.name && k.to.port == port)
                        .map(|k| k.from.component.clone())
                        .expect("shaft port connected");
                    match model.component(&machine).map(|m| m.family) {
                        Some(Family::Turbine) => driver += -m.power,
                        _ => absorbed += m.power,
                    }
                }
                out.shaft = out.shaft.max(rel(eta * driver - absorbed, driver));
            }
            _ => {}
        }
    }
    out
}
