//! The two-step method: a design run that sizes geometry and freezes the
//! calibration, then off-design runs on the frozen model.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::components::{Family, Mode, ParamClass, PerformanceMetrics, UnitClass};
use crate::network::{
    assemble, AssembledSystem, ComponentFinding, DesignPoint, Model, NetworkError, Param, ParamValue, Provenance,
    QuantityValue,
};
use crate::solver::{newton_solve, ConfigError, SolveResult, SolveStatus, SolverConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorkflowError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("model is in {found} mode; this step needs {expected} mode")]
    WrongMode { expected: Mode, found: Mode },
    #[error("solver did not converge: {}", .0.status)]
    SolverFailed(Box<SolveReport>),
    #[error("design sized {component}.{parameter} to {value}, which is not physical")]
    NonPhysicalSizing { component: String, parameter: String, value: f64 },
    #[error("{0} is not a boundary value or specification and cannot be overridden off-design")]
    OverrideNotBoundary(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariableValue {
    pub name: String,
    pub unit: UnitClass,
    pub value: f64,
}

/// Solver outcome together with everything derived from the final state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub iterations: usize,
    pub residual_norm: f64,
    pub trace: Vec<f64>,
    pub variables: Vec<VariableValue>,
    pub quantities: Vec<QuantityValue>,
    pub metrics: Option<PerformanceMetrics>,
    pub findings: Vec<ComponentFinding>,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.status.is_converged()
    }

    pub fn variable(&self, name: &str) -> Option<f64> {
        self.variables.iter().find(|v| v.name == name).map(|v| v.value)
    }

    /// Value of `component.quantity`.
    pub fn quantity(&self, target: &str) -> Option<f64> {
        let (c, q) = target.rsplit_once('.')?;
        self.quantities.iter().find(|v| v.component == c && v.name == q).map(|v| v.value)
    }

    pub fn values(&self) -> BTreeMap<String, f64> {
        self.variables.iter().map(|v| (v.name.clone(), v.value)).collect()
    }
}

pub(crate) fn report(sys: &AssembledSystem, res: &SolveResult) -> SolveReport {
    let variables = sys
        .system
        .variables
        .iter()
        .zip(&res.x)
        .map(|(v, &value)| VariableValue { name: v.name.clone(), unit: v.unit, value })
        .collect();
    SolveReport {
        status: res.status.clone(),
        iterations: res.iterations,
        residual_norm: res.residual_norm,
        trace: res.trace.clone(),
        variables,
        quantities: sys.quantities(&res.x).unwrap_or_default(),
        metrics: sys.metrics(&res.x).ok(),
        findings: sys.findings(&res.x),
    }
}

/// Assembles and solves the model as it stands.
pub fn solve(model: &Model, config: &SolverConfig) -> Result<(AssembledSystem, SolveResult, SolveReport), WorkflowError> {
    config.check()?;
    let sys = assemble(model)?;
    let res = newton_solve(&sys.system, config);
    let rep = report(&sys, &res);
    Ok((sys, res, rep))
}

fn solve_converged(model: &Model, config: &SolverConfig) -> Result<(AssembledSystem, SolveResult, SolveReport), WorkflowError> {
    let out = solve(model, config)?;
    if !out.1.status.is_converged() {
        return Err(WorkflowError::SolverFailed(Box::new(out.2)));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct DesignOutcome {
    /// The frozen model, in off-design mode.
    pub sized: Model,
    pub report: SolveReport,
}

fn captured(value: f64) -> Param {
    Param { value: Some(ParamValue::Number(value)), free: false, provenance: Provenance::Captured }
}

/// Solves the design problem and freezes the result into a sized model.
pub fn run_design(model: &Model, config: &SolverConfig) -> Result<DesignOutcome, WorkflowError> {
    if model.mode != Mode::Design {
        return Err(WorkflowError::WrongMode { expected: Mode::Design, found: model.mode });
    }
    let (sys, res, rep) = solve_converged(model, config)?;
    let x = &res.x;

    let mut sized = model.clone();
    for comp in &model.components {
        for def in comp.family.params() {
            if !comp.params.get(def.name).is_some_and(|p| p.free) {
                continue;
            }
            let path = format!("{}.{}", comp.name, def.name);
            let value = rep.variable(&path).expect("free parameter is a variable");
            let efficiency = def.name.starts_with("eta") || def.name == "cd";
            let physical = match def.class {
                ParamClass::Geometry => value > 0.0,
                ParamClass::Calibration if efficiency => value > 0.0 && value <= 1.0,
                _ => value.is_finite(),
            };
            if !physical {
                return Err(WorkflowError::NonPhysicalSizing {
                    component: comp.name.clone(),
                    parameter: def.name.to_string(),
                    value,
                });
            }
            let p = sized.component_mut(&comp.name).expect("same components").params.get_mut(def.name).expect("present");
            *p = Param { value: Some(ParamValue::Number(value)), free: false, provenance: Provenance::Solved };
        }
    }

    // Reference points for the off-design laws.
    for comp in &model.components {
        match comp.family {
            Family::Pump => {
                let (_, fluid, mech) = sys.component_ports(&comp.name, x).expect("pump is connected");
                let (inlet, outlet) = (&fluid[0], &fluid[1]);
                let q = inlet.mdot / inlet.fluid.density(inlet.p0, inlet.t0);
                let c = sized.component_mut(&comp.name).expect("same components");
                c.params.insert("q_ref".into(), captured(q));
                c.params.insert("dp_ref".into(), captured(outlet.p0 - inlet.p0));
                c.params.insert("speed_ref".into(), captured(mech[0].speed));
            }
            Family::CoolingJacket => {
                let chamber = comp.text("chamber").expect("validated");
                let mdot = rep.quantity(&format!("{chamber}.mdot")).expect("chamber reports mdot");
                sized.component_mut(&comp.name).expect("same components").params.insert("mdot_ref".into(), captured(mdot));
            }
            _ => {}
        }
    }

    sized.mode = Mode::Offdesign;
    sized.design_point = Some(DesignPoint {
        values: rep.values(),
        specs: std::mem::take(&mut sized.specs),
        metrics: rep.metrics.unwrap_or_else(|| PerformanceMetrics::new(0.0, 0.0, None, 0.0)),
    });
    sized.initial_guess.clear();
    Ok(DesignOutcome { sized, report: rep })
}

/// Applies an off-design override: a boundary parameter or the value of
/// an existing specification.
pub fn apply_override(model: &mut Model, path: &str, value: f64) -> Result<(), WorkflowError> {
    if let Some(s) = model.specs.iter_mut().find(|s| s.target == path) {
        s.value = value;
        return Ok(());
    }
    match model.param_class(path) {
        Ok(ParamClass::Boundary) => {
            model.set_param(path, value)?;
            Ok(())
        }
        Ok(_) | Err(NetworkError::UnknownParameter(_)) => Err(WorkflowError::OverrideNotBoundary(path.to_string())),
        Err(e) => Err(e.into()),
    }
}

/// Solves a sized model with geometry and calibration frozen.
pub fn run_offdesign(sized: &Model, overrides: &BTreeMap<String, f64>, config: &SolverConfig) -> Result<SolveReport, WorkflowError> {
    if sized.mode != Mode::Offdesign {
        return Err(WorkflowError::WrongMode { expected: Mode::Offdesign, found: sized.mode });
    }
    let mut model = sized.clone();
    for (path, value) in overrides {
        apply_override(&mut model, path, *value)?;
    }
    Ok(solve_converged(&model, config)?.2)
}
