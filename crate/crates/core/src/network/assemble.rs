use std::sync::Arc;

use serde::Serialize;

use super::compile::{CompiledNetwork, VarInfo};
use super::{compile, guess, DofReport, Model, NetworkError};
use crate::components::{
    evaluate_quantities, evaluate_residuals, post_checks, ComponentView, Family, FluidPortState, MechPortState,
    ParamValues, PerformanceMetrics, Severity, UnitClass,
};
use crate::solver::{EvalError, NonlinearSystem, Variable};

/// Port states of every node at a given variable vector.
struct States {
    fluid: Vec<Option<FluidPortState>>,
    mech: Vec<Option<MechPortState>>,
}

fn states(net: &CompiledNetwork, x: &[f64]) -> States {
    let mut fluid = vec![None; net.nodes.len()];
    let mut mech = vec![None; net.nodes.len()];
    for (k, node) in net.nodes.iter().enumerate() {
        let v = node.var0;
        match node.kind {
            crate::components::PortKind::Fluid => {
                if let Some(f) = &node.fluid {
                    fluid[k] = Some(FluidPortState::new(x[v], x[v + 1], x[v + 2], f.clone()));
                }
            }
            crate::components::PortKind::Mech => mech[k] = Some(MechPortState { power: x[v], speed: x[v + 1] }),
        }
    }
    States { fluid, mech }
}

fn params(net: &CompiledNetwork, ci: usize, x: &[f64]) -> ParamValues {
    let c = &net.comps[ci];
    let mut p = c.base.clone();
    for &(name, i) in &c.free {
        p.set(name, x[i]);
    }
    p
}

fn ambient(net: &CompiledNetwork, x: &[f64]) -> f64 {
    net.monitor.and_then(|m| params(net, m, x).get("p_amb")).unwrap_or(0.0)
}

fn eval_err(name: &str, e: impl ToString) -> EvalError {
    EvalError { source_name: name.to_string(), message: e.to_string() }
}

/// Calls `f` with the view of component `ci`.
fn with_view<R>(
    net: &CompiledNetwork,
    st: &States,
    ci: usize,
    x: &[f64],
    amb: f64,
    f: impl FnOnce(&ComponentView<'_>) -> R,
) -> Result<R, EvalError> {
    let c = &net.comps[ci];
    let fluid: Option<Vec<FluidPortState>> = c.fluid_nodes.iter().map(|n| n.and_then(|n| st.fluid[n].clone())).collect();
    let mech: Option<Vec<MechPortState>> = c.mech_nodes.iter().map(|n| n.and_then(|n| st.mech[n])).collect();
    let (Some(fluid), Some(mech)) = (fluid, mech) else {
        return Err(eval_err(&c.name, "component has unresolved ports"));
    };
    let params = params(net, ci, x);
    let chamber_mdot = c.chamber_node.map_or(0.0, |k| x[net.nodes[k].var0 + 2]);
    let view = ComponentView {
        family: c.family,
        mode: net.mode,
        fluid: &fluid,
        mech: &mech,
        mech_roles: &c.mech_roles,
        params: &params,
        chamber_mdot,
        ambient: amb,
    };
    Ok(f(&view))
}

fn component_quantities(net: &CompiledNetwork, st: &States, ci: usize, x: &[f64], amb: f64) -> Result<Vec<(&'static str, UnitClass, f64)>, EvalError> {
    let name = &net.comps[ci].name;
    if net.comps[ci].family == Family::Monitor {
        let m = metrics(net, st, x, amb)?;
        return Ok(vec![
            ("thrust", UnitClass::Force, m.thrust),
            ("isp", UnitClass::Time, m.isp),
            ("mdot_total", UnitClass::MassFlow, m.mdot_total),
        ]);
    }
    with_view(net, st, ci, x, amb, evaluate_quantities)?
        .map(|qs| qs.into_iter().map(|q| (q.name, q.unit, q.value)).collect())
        .map_err(|e| eval_err(name, e))
}

fn quantity(net: &CompiledNetwork, st: &States, ci: usize, x: &[f64], amb: f64, q: &str) -> Result<f64, EvalError> {
    component_quantities(net, st, ci, x, amb)?
        .into_iter()
        .find(|(n, _, _)| *n == q)
        .map(|(_, _, v)| v)
        .ok_or_else(|| eval_err(&net.comps[ci].name, format!("quantity {q} unavailable")))
}

fn metrics(net: &CompiledNetwork, st: &States, x: &[f64], amb: f64) -> Result<PerformanceMetrics, EvalError> {
    let mut thrust = 0.0;
    let mut nozzle_mdot = 0.0;
    let mut tank_mdot = 0.0;
    let mut tanks = 0;
    let mut of = None;
    let mut power = 0.0f64;
    for (ci, c) in net.comps.iter().enumerate() {
        match c.family {
            Family::Nozzle | Family::ConvergentNozzle => {
                thrust += quantity(net, st, ci, x, amb, "thrust")?;
                nozzle_mdot += quantity(net, st, ci, x, amb, "mdot")?;
            }
            Family::Tank => {
                tanks += 1;
                tank_mdot += quantity(net, st, ci, x, amb, "mdot")?;
            }
            Family::CombustionChamber if of.is_none() => of = Some(quantity(net, st, ci, x, amb, "of")?),
            Family::Shaft => {
                let r = quantity(net, st, ci, x, amb, "power_balance")?;
                if r.abs() > power.abs() {
                    power = r;
                }
            }
            _ => {}
        }
    }
    let mdot_total = if tanks > 0 { tank_mdot } else { nozzle_mdot };
    Ok(PerformanceMetrics::new(thrust, mdot_total, of, power))
}

fn evaluate(net: &CompiledNetwork, x: &[f64], r: &mut [f64]) -> Result<(), EvalError> {
    let st = states(net, x);
    let amb = ambient(net, x);
    let mut k = 0;
    for (ci, c) in net.comps.iter().enumerate() {
        let res = with_view(net, &st, ci, x, amb, evaluate_residuals)?.map_err(|e| eval_err(&c.name, e))?;
        if res.len() != c.n_eqs {
            return Err(eval_err(&c.name, format!("produced {} residuals, expected {}", res.len(), c.n_eqs)));
        }
        for res in res {
            r[k] = res.value;
            k += 1;
        }
    }
    for s in &net.specs {
        r[k] = quantity(net, &st, s.comp, x, amb, s.quantity)? - s.value;
        k += 1;
    }
    Ok(())
}

/// Names and units of all residuals, read from one evaluation.
fn residual_layout(net: &CompiledNetwork, x: &[f64]) -> Result<Vec<(String, UnitClass)>, EvalError> {
    let st = states(net, x);
    let amb = ambient(net, x);
    let mut out = Vec::new();
    for (ci, c) in net.comps.iter().enumerate() {
        let res = with_view(net, &st, ci, x, amb, evaluate_residuals)?.map_err(|e| eval_err(&c.name, e))?;
        out.extend(res.into_iter().map(|r| (format!("{}.{}", c.name, r.name), r.unit)));
    }
    for s in &net.specs {
        out.push((format!("spec:{}", s.target), s.unit));
    }
    Ok(out)
}

fn sparsity(net: &CompiledNetwork) -> Vec<Vec<usize>> {
    let monitor_free: Vec<usize> = net.monitor.map(|m| net.comps[m].free.iter().map(|f| f.1).collect()).unwrap_or_default();
    let comp_vars = |ci: usize| -> Vec<usize> {
        let c = &net.comps[ci];
        let mut v: Vec<usize> = Vec::new();
        for n in c.fluid_nodes.iter().chain(&c.mech_nodes).flatten() {
            let width = if net.nodes[*n].kind == crate::components::PortKind::Fluid { 3 } else { 2 };
            v.extend(net.nodes[*n].var0..net.nodes[*n].var0 + width);
        }
        v.extend(c.free.iter().map(|f| f.1));
        if let Some(k) = c.chamber_node {
            v.push(net.nodes[k].var0 + 2);
        }
        if matches!(c.family, Family::Nozzle | Family::ConvergentNozzle) {
            v.extend(&monitor_free);
        }
        v
    };
    let mut rows = Vec::new();
    for (ci, c) in net.comps.iter().enumerate() {
        let v = comp_vars(ci);
        rows.extend(std::iter::repeat_n(v, c.n_eqs));
    }
    for s in &net.specs {
        let v = if net.comps[s.comp].family == Family::Monitor {
            let mut all: Vec<usize> = (0..net.comps.len()).flat_map(comp_vars).collect();
            all.sort_unstable();
            all.dedup();
            all
        } else {
            comp_vars(s.comp)
        };
        rows.push(v);
    }
    rows
}

/// A component quantity evaluated at a solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantityValue {
    pub component: String,
    pub name: String,
    pub unit: UnitClass,
    pub value: f64,
}

/// A physical check raised at a solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentFinding {
    pub component: String,
    pub severity: Severity,
    pub message: String,
}

/// The flattened system plus what is needed to interpret its solutions.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub system: NonlinearSystem,
    pub report: DofReport,
    net: Arc<CompiledNetwork>,
}

impl AssembledSystem {
    pub fn variable_names(&self) -> impl Iterator<Item = &str> {
        self.system.variables.iter().map(|v| v.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.system.variables.iter().position(|v| v.name == name)
    }

    /// All component quantities at `x`.
    pub fn quantities(&self, x: &[f64]) -> Result<Vec<QuantityValue>, EvalError> {
        let net = &self.net;
        let st = states(net, x);
        let amb = ambient(net, x);
        let mut out = Vec::new();
        for (ci, c) in net.comps.iter().enumerate() {
            if c.family == Family::Monitor && net.comps.iter().all(|c| !matches!(c.family, Family::Nozzle | Family::ConvergentNozzle)) {
                continue;
            }
            for (name, unit, value) in component_quantities(net, &st, ci, x, amb)? {
                out.push(QuantityValue { component: c.name.clone(), name: name.to_string(), unit, value });
            }
        }
        Ok(out)
    }

    pub fn metrics(&self, x: &[f64]) -> Result<PerformanceMetrics, EvalError> {
        let st = states(&self.net, x);
        metrics(&self.net, &st, x, ambient(&self.net, x))
    }

    /// Physical consistency checks at `x`.
    pub fn findings(&self, x: &[f64]) -> Vec<ComponentFinding> {
        let net = &self.net;
        let st = states(net, x);
        let amb = ambient(net, x);
        let mut out = Vec::new();
        for (k, node) in net.nodes.iter().enumerate() {
            let owner = &net.comps[node.from.0].name;
            let bad = match (&st.fluid[k], &st.mech[k]) {
                (Some(f), _) if !(f.p0 > 0.0 && f.t0 > 0.0) => {
                    Some(format!("non-physical state at {owner}.{}: p0 = {}, T0 = {}", node.from.1, f.p0, f.t0))
                }
                (_, Some(m)) if !(m.speed > 0.0) => Some(format!("shaft speed at {owner}.{} is {}", node.from.1, m.speed)),
                _ => None,
            };
            if let Some(message) = bad {
                out.push(ComponentFinding { component: owner.clone(), severity: Severity::Error, message });
            }
        }
        for ci in 0..net.comps.len() {
            if let Ok(fs) = with_view(net, &st, ci, x, amb, post_checks) {
                out.extend(fs.into_iter().map(|f| ComponentFinding {
                    component: net.comps[ci].name.clone(),
                    severity: f.severity,
                    message: f.message,
                }));
            }
        }
        out
    }

    /// Fluid port states by node, named `<component>.<port>` of the upstream end.
    pub fn fluid_states(&self, x: &[f64]) -> Vec<(String, FluidPortState)> {
        let st = states(&self.net, x);
        self.net
            .nodes
            .iter()
            .zip(st.fluid)
            .filter_map(|(n, s)| s.map(|s| (format!("{}.{}", self.net.comps[n.from.0].name, n.from.1), s)))
            .collect()
    }

    /// Fluid states on the ports of one component, in port order.
    pub fn component_ports(&self, component: &str, x: &[f64]) -> Option<(Family, Vec<FluidPortState>, Vec<MechPortState>)> {
        let ci = self.net.comps.iter().position(|c| c.name == component)?;
        let c = &self.net.comps[ci];
        let st = states(&self.net, x);
        let fluid = c.fluid_nodes.iter().map(|n| n.and_then(|n| st.fluid[n].clone())).collect::<Option<Vec<_>>>()?;
        let mech = c.mech_nodes.iter().map(|n| n.and_then(|n| st.mech[n])).collect::<Option<Vec<_>>>()?;
        Some((c.family, fluid, mech))
    }

    pub fn component_params(&self, component: &str, x: &[f64]) -> Option<ParamValues> {
        let ci = self.net.comps.iter().position(|c| c.name == component)?;
        Some(params(&self.net, ci, x))
    }
}

fn variables(vars: &[VarInfo], x0: &[f64]) -> Vec<Variable> {
    vars.iter()
        .zip(x0)
        .map(|(v, &x)| Variable { name: v.name.clone(), unit: v.unit, scale: v.unit.scale(), initial: x, positive: v.positive })
        .collect()
}

pub(crate) fn assemble(model: &Model) -> Result<AssembledSystem, NetworkError> {
    let (net, diags) = compile::compile(model);
    let report = compile::dof_report(model, &net, diags);
    if !report.is_solvable() {
        return Err(NetworkError::NotWellPosed(report));
    }
    let x0 = guess::initial_guess(model, &net);
    let layout = residual_layout(&net, &x0).map_err(|e| NetworkError::Evaluation(e.to_string()))?;
    if layout.len() != net.n_eqs {
        return Err(NetworkError::Evaluation(format!("{} residuals produced, {} counted", layout.len(), net.n_eqs)));
    }
    let sparsity = sparsity(&net);
    let net = Arc::new(net);
    let eval_net = net.clone();
    let system = NonlinearSystem::new(
        variables(&net.vars, &x0),
        layout.iter().map(|(n, _)| n.clone()).collect(),
        layout.iter().map(|(_, u)| u.scale()).collect(),
        Some(sparsity),
        Arc::new(move |x: &[f64], r: &mut [f64]| evaluate(&eval_net, x, r)),
    );
    Ok(AssembledSystem { system, report, net })
}
