//! Flattening a model into nodes, variables and equation slots, with the
//! structural checks and degree-of-freedom bookkeeping that go with it.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::model::{Model, ParamValue};
use crate::components::{
    equation_count, Family, MechRole, Mode, ParamClass, ParamValues, PortDirection, PortKind, Requirement, Severity,
    UnitClass,
};
use crate::fluids::{Fluid, FluidDatabase, Mixture};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component: Option<String>,
    pub message: String,
}

impl Diagnostic {
    fn error(component: Option<&str>, message: impl Into<String>) -> Self {
        Self { severity: Severity::Error, component: component.map(str::to_string), message: message.into() }
    }

    fn warning(component: Option<&str>, message: impl Into<String>) -> Self {
        Self { severity: Severity::Warning, component: component.map(str::to_string), message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "count")]
pub enum DofStatus {
    WellPosed,
    UnderDetermined(usize),
    OverDetermined(usize),
}

impl std::fmt::Display for DofStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DofStatus::WellPosed => f.write_str("WellPosed"),
            DofStatus::UnderDetermined(k) => write!(f, "UnderDetermined({k})"),
            DofStatus::OverDetermined(k) => write!(f, "OverDetermined({k})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DofReport {
    pub n_vars: usize,
    pub n_eqs: usize,
    pub status: DofStatus,
    pub diagnostics: Vec<Diagnostic>,
}

impl DofReport {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.severity == Severity::Error)
    }

    /// Well posed and free of structural errors.
    pub fn is_solvable(&self) -> bool {
        self.status == DofStatus::WellPosed && !self.has_errors()
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Node {
    pub kind: PortKind,
    pub from: (usize, String),
    pub to: (usize, String),
    /// Index of the first variable of the node.
    pub var0: usize,
    pub fluid: Option<Arc<Fluid>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum VarSource {
    /// Field 0..3 of a fluid node (p0, t0, mdot) or 0..2 of a mech node (power, speed).
    Node { node: usize, field: usize },
    Param { comp: usize, param: &'static str },
}

#[derive(Debug, Clone)]
pub(crate) struct VarInfo {
    pub name: String,
    pub unit: UnitClass,
    pub positive: bool,
    pub source: VarSource,
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledComponent {
    pub name: String,
    pub family: Family,
    /// Node of each fluid port, in port order.
    pub fluid_nodes: Vec<Option<usize>>,
    pub fluid_dirs: Vec<PortDirection>,
    pub mech_nodes: Vec<Option<usize>>,
    pub mech_roles: Vec<MechRole>,
    pub base: ParamValues,
    /// Free parameters and their variable index.
    pub free: Vec<(&'static str, usize)>,
    /// Outlet node of the chamber a cooling jacket references.
    pub chamber_node: Option<usize>,
    pub n_eqs: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledSpec {
    pub target: String,
    pub comp: usize,
    pub quantity: &'static str,
    pub unit: UnitClass,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledNetwork {
    pub mode: Mode,
    pub nodes: Vec<Node>,
    pub comps: Vec<CompiledComponent>,
    pub specs: Vec<CompiledSpec>,
    pub vars: Vec<VarInfo>,
    pub monitor: Option<usize>,
    pub n_eqs: usize,
}

const FLUID_FIELDS: [(&str, UnitClass); 3] =
    [("p0", UnitClass::Pressure), ("t0", UnitClass::Temperature), ("mdot", UnitClass::MassFlow)];
const MECH_FIELDS: [(&str, UnitClass); 2] = [("power", UnitClass::Power), ("speed", UnitClass::Speed)];

/// Parses a tank contents string: `NAME` or `A:0.7+B:0.3`.
pub(crate) fn parse_mixture(db: &FluidDatabase, text: &str) -> Result<Mixture, String> {
    let parts: Vec<&str> = text.split('+').map(str::trim).collect();
    if parts.len() == 1 && !parts[0].contains(':') {
        return db.species(parts[0]).map(Mixture::pure).map_err(|e| e.to_string());
    }
    let mut comps = Vec::new();
    for p in parts {
        let (name, y) = p.split_once(':').ok_or_else(|| format!("mixture entry {p:?} lacks a mass fraction"))?;
        let y: f64 = y.trim().parse().map_err(|_| format!("bad mass fraction in {p:?}"))?;
        comps.push((db.species(name.trim()).map_err(|e| e.to_string())?, y));
    }
    Mixture::new(comps).map_err(|e| e.to_string())
}

fn make_fluid(mixture: Mixture) -> Result<Arc<Fluid>, String> {
    Fluid::new(mixture).map(Arc::new).map_err(|e| e.to_string())
}

fn check_value(family: Family, param: &str, class: ParamClass, v: f64) -> Option<String> {
    if !v.is_finite() {
        return Some(format!("{param} = {v} is not finite"));
    }
    let efficiency = param.starts_with("eta") || param == "cd";
    if efficiency && !(v > 0.0 && v <= 1.0) {
        return Some(format!("{param} = {v} must lie in (0, 1]"));
    }
    match (family, param) {
        (Family::Valve, "opening") if v <= 0.0 => Some(format!("valve opening {v} is not positive; a closed valve is not a solvable branch")),
        (_, "k_loss" | "q_design") if v < 0.0 => Some(format!("{param} = {v} must not be negative")),
        (Family::Nozzle, "area_ratio") if v < 1.0 => Some(format!("area ratio {v} is below 1")),
        (_, "p_out" | "t_out" | "p_amb") if v < 0.0 || (param != "p_amb" && v == 0.0) => {
            Some(format!("{param} = {v} must be positive"))
        }
        _ if class == ParamClass::Geometry && param != "k_loss" && v <= 0.0 => {
            Some(format!("{param} = {v} must be positive"))
        }
        _ => None,
    }
}

fn min_ports(family: Family) -> usize {
    match family {
        Family::Shaft => 1,
        Family::Junction | Family::Splitter => 2,
        _ => 0,
    }
}

/// Builds the network and collects every structural problem found.
pub(crate) fn compile(model: &Model) -> (CompiledNetwork, Vec<Diagnostic>) {
    let mut diags = Vec::new();
    let db = model.database();
    let index: BTreeMap<&str, usize> =
        model.components.iter().enumerate().rev().map(|(i, c)| (c.name.as_str(), i)).collect();
    let mut seen = BTreeSet::new();
    for c in &model.components {
        if !seen.insert(c.name.as_str()) {
            diags.push(Diagnostic::error(Some(&c.name), format!("duplicate component name {}", c.name)));
        }
        if c.name.is_empty() || c.name.contains('.') || c.name.contains(char::is_whitespace) {
            diags.push(Diagnostic::error(Some(&c.name), "component names must be non-empty without dots or spaces"));
        }
    }

    // Parameters.
    let mut comps: Vec<CompiledComponent> = Vec::new();
    for c in &model.components {
        let n = &c.name;
        for (pname, p) in &c.params {
            let Some(def) = c.family.param(pname) else {
                diags.push(Diagnostic::error(Some(n), format!("{} has no parameter {pname}", c.family)));
                continue;
            };
            match (&p.value, def.class) {
                (Some(ParamValue::Text(_)), ParamClass::Setting) | (None, _) => {}
                (Some(ParamValue::Text(t)), _) => {
                    diags.push(Diagnostic::error(Some(n), format!("{pname} must be a number, got {t:?}")))
                }
                (Some(ParamValue::Number(v)), ParamClass::Setting) => {
                    diags.push(Diagnostic::error(Some(n), format!("{pname} must be text, got {v}")))
                }
                (Some(ParamValue::Number(v)), class) => {
                    if let Some(msg) = check_value(c.family, pname, class, *v) {
                        if !p.free {
                            diags.push(Diagnostic::error(Some(n), msg));
                        }
                    }
                }
            }
            if p.free {
                match def.class {
                    ParamClass::Setting | ParamClass::Structure | ParamClass::Reference => {
                        diags.push(Diagnostic::error(Some(n), format!("{pname} ({:?}) cannot be free", def.class)))
                    }
                    ParamClass::Geometry | ParamClass::Calibration if model.mode == Mode::Offdesign => {
                        diags.push(Diagnostic::error(
                            Some(n),
                            format!("{pname} is frozen in off-design mode; only boundary parameters may be free"),
                        ))
                    }
                    _ => {}
                }
            }
        }
        for def in c.family.params() {
            let p = c.params.get(def.name);
            let present = p.is_some_and(|p| p.value.is_some() || p.free);
            if def.requirement == Requirement::Required && !present {
                diags.push(Diagnostic::error(Some(n), format!("missing required parameter {}", def.name)));
            }
        }
        if let Some(sp) = c.family.structural_param() {
            let count = c.port_count();
            if count < min_ports(c.family) {
                diags.push(Diagnostic::error(
                    Some(n),
                    format!("{sp} must be an integer of at least {}", min_ports(c.family)),
                ));
            }
        }
        let mut base = ParamValues::new();
        for def in c.family.params() {
            if let Some(v) = c.number(def.name) {
                base.set(def.name, v);
            }
        }
        let ports = c.ports();
        let fluid_dirs: Vec<PortDirection> =
            ports.iter().filter(|p| p.kind == PortKind::Fluid).map(|p| p.direction).collect();
        let n_mech = ports.iter().filter(|p| p.kind == PortKind::Mech).count();
        let present = |name: &str| c.params.get(name).is_some_and(|p| p.value.is_some() || p.free);
        comps.push(CompiledComponent {
            name: c.name.clone(),
            family: c.family,
            fluid_nodes: vec![None; fluid_dirs.len()],
            fluid_dirs,
            mech_nodes: vec![None; n_mech],
            mech_roles: vec![],
            base,
            free: vec![],
            chamber_node: None,
            n_eqs: equation_count(c.family, model.mode, &present, c.port_count()),
        });
    }

    // Connections.
    let mut nodes: Vec<Node> = Vec::new();
    let mut used: BTreeSet<(usize, String)> = BTreeSet::new();
    for conn in &model.connections {
        let ends = [&conn.from, &conn.to].map(|r| {
            let ci = index.get(r.component.as_str()).copied();
            let def = ci.and_then(|ci| model.components[ci].port(&r.port));
            (r, ci, def)
        });
        let mut ok = true;
        for (r, ci, def) in &ends {
            match (ci, def) {
                (None, _) => {
                    diags.push(Diagnostic::error(None, format!("connection {conn}: unknown component {}", r.component)));
                    ok = false;
                }
                (Some(_), None) => {
                    diags.push(Diagnostic::error(Some(&r.component), format!("connection {conn}: unknown port {r}")));
                    ok = false;
                }
                _ => {}
            }
        }
        if !ok {
            continue;
        }
        let [(fr, Some(fi), Some(fd)), (tr, Some(ti), Some(td))] = ends else { unreachable!() };
        if fd.kind != td.kind {
            diags.push(Diagnostic::error(
                Some(&fr.component),
                format!("connection {conn}: port kinds differ ({} vs {})", fd.kind, td.kind),
            ));
            continue;
        }
        let directed = matches!(
            (fd.direction, td.direction),
            (PortDirection::Outlet, PortDirection::Inlet) | (PortDirection::Machine, PortDirection::Hub)
        );
        if !directed {
            diags.push(Diagnostic::error(
                Some(&fr.component),
                format!("connection {conn} must run from an outlet to an inlet (or a machine to a shaft)"),
            ));
            continue;
        }
        let mut dup = false;
        for key in [(fi, fr.port.clone()), (ti, tr.port.clone())] {
            if !used.insert(key.clone()) {
                diags.push(Diagnostic::error(
                    Some(&model.components[key.0].name),
                    format!("port {}.{} is connected more than once", model.components[key.0].name, key.1),
                ));
                dup = true;
            }
        }
        if dup {
            continue;
        }
        nodes.push(Node { kind: fd.kind, from: (fi, fr.port.clone()), to: (ti, tr.port.clone()), var0: 0, fluid: None });
    }

    let mut vars: Vec<VarInfo> = Vec::new();
    for (k, node) in nodes.iter_mut().enumerate() {
        node.var0 = vars.len();
        let prefix = format!("{}.{}", model.components[node.from.0].name, node.from.1);
        let fields: &[(&str, UnitClass)] = match node.kind {
            PortKind::Fluid => &FLUID_FIELDS,
            PortKind::Mech => &MECH_FIELDS,
        };
        for (field, (fname, unit)) in fields.iter().enumerate() {
            vars.push(VarInfo {
                name: format!("{prefix}.{fname}"),
                unit: *unit,
                positive: !matches!(fname, &"mdot" | &"power"),
                source: VarSource::Node { node: k, field },
            });
        }
        for (ci, port) in [&node.from, &node.to] {
            let ports = model.components[*ci].ports();
            let kind_ports: Vec<&str> = ports.iter().filter(|p| p.kind == node.kind).map(|p| p.name.as_str()).collect();
            let slot = kind_ports.iter().position(|p| p == port).expect("port validated above");
            match node.kind {
                PortKind::Fluid => comps[*ci].fluid_nodes[slot] = Some(k),
                PortKind::Mech => comps[*ci].mech_nodes[slot] = Some(k),
            }
        }
    }
    for (c, cc) in model.components.iter().zip(&comps) {
        let ports = c.ports();
        let mut fi = 0;
        let mut mi = 0;
        for p in &ports {
            let connected = match p.kind {
                PortKind::Fluid => {
                    fi += 1;
                    cc.fluid_nodes[fi - 1].is_some()
                }
                PortKind::Mech => {
                    mi += 1;
                    cc.mech_nodes[mi - 1].is_some()
                }
            };
            if !connected {
                diags.push(Diagnostic::error(Some(&c.name), format!("port {}.{} is not connected", c.name, p.name)));
            }
        }
    }

    // Shaft port roles from the attached machine.
    for c in comps.iter_mut().filter(|c| c.family == Family::Shaft) {
        c.mech_roles = c
            .mech_nodes
            .iter()
            .map(|n| n.and_then(|n| model.components[nodes[n].from.0].family.mech_role()).unwrap_or(MechRole::Load))
            .collect();
    }

    resolve_fluids(model, db, &comps, &mut nodes, &mut diags);
    check_phases(&comps, &nodes, &mut diags);

    // Jacket chamber references.
    for (ci, c) in model.components.iter().enumerate() {
        if c.family != Family::CoolingJacket {
            continue;
        }
        if let Some(target) = c.text("chamber") {
            match index.get(target) {
                Some(&ti)
                    if matches!(model.components[ti].family, Family::CombustionChamber | Family::GasGenerator) =>
                {
                    comps[ci].chamber_node = comps[ti].fluid_nodes[2];
                }
                _ => diags.push(Diagnostic::error(
                    Some(&c.name),
                    format!("chamber setting {target:?} does not name a combustion chamber or gas generator"),
                )),
            }
        }
        if let Some(label) = c.text("outlet_fluid") {
            if let Err(e) = parse_mixture(db, label) {
                diags.push(Diagnostic::error(Some(&c.name), e));
            }
        }
    }

    // Free parameters, in component then definition order.
    for (ci, c) in model.components.iter().enumerate() {
        for def in c.family.params() {
            if c.params.get(def.name).is_some_and(|p| p.free) {
                comps[ci].free.push((def.name, vars.len()));
                vars.push(VarInfo {
                    name: format!("{}.{}", c.name, def.name),
                    unit: def.unit,
                    // Loss coefficients enter linearly and may cross zero so the
                    // sizing check can report a wrongly signed pressure drop.
                    positive: !matches!(def.name, "load" | "p_amb") && def.unit != UnitClass::LossCoefficient,
                    source: VarSource::Param { comp: ci, param: def.name },
                });
            }
        }
    }

    let monitors: Vec<usize> =
        model.components.iter().enumerate().filter(|(_, c)| c.family == Family::Monitor).map(|(i, _)| i).collect();
    if monitors.len() > 1 {
        diags.push(Diagnostic::error(Some(&model.components[monitors[1]].name), "at most one monitor is allowed"));
    }

    // Specifications.
    let mut specs = Vec::new();
    let mut targets = BTreeSet::new();
    for s in &model.specs {
        if !targets.insert(s.target.as_str()) {
            diags.push(Diagnostic::error(None, format!("specification {} is given twice", s.target)));
            continue;
        }
        let Some((cname, q)) = s.split() else {
            diags.push(Diagnostic::error(None, format!("specification target {:?} is not component.quantity", s.target)));
            continue;
        };
        let Some(&ci) = index.get(cname) else {
            diags.push(Diagnostic::error(None, format!("specification {} names unknown component {cname}", s.target)));
            continue;
        };
        let family = model.components[ci].family;
        let Some(&(quantity, unit)) = family.quantities().iter().find(|(n, _)| *n == q) else {
            let known: Vec<&str> = family.quantities().iter().map(|(n, _)| *n).collect();
            diags.push(Diagnostic::error(
                Some(cname),
                format!("{family} has no quantity {q}; available: {}", known.join(", ")),
            ));
            continue;
        };
        if !s.value.is_finite() {
            diags.push(Diagnostic::error(Some(cname), format!("specification {} value is not finite", s.target)));
        }
        specs.push(CompiledSpec { target: s.target.clone(), comp: ci, quantity, unit, value: s.value });
    }

    let n_eqs = comps.iter().map(|c| c.n_eqs).sum::<usize>() + specs.len();
    let net = CompiledNetwork { mode: model.mode, nodes, comps, specs, vars, monitor: monitors.first().copied(), n_eqs };
    (net, diags)
}

/// Composition at each outlet of `comp`, given the fluids at its inlets.
fn outlet_fluid(
    model: &Model,
    db: &FluidDatabase,
    ci: usize,
    cc: &CompiledComponent,
    nodes: &[Node],
) -> Result<Option<Arc<Fluid>>, String> {
    let c = &model.components[ci];
    let inlet = |slot: usize| cc.fluid_nodes[slot].and_then(|n| nodes[n].fluid.clone());
    let inlets: Vec<Option<Arc<Fluid>>> = cc
        .fluid_dirs
        .iter()
        .zip(&cc.fluid_nodes)
        .filter(|(d, _)| **d == PortDirection::Inlet)
        .map(|(_, n)| n.and_then(|n| nodes[n].fluid.clone()))
        .collect();
    Ok(match c.family {
        Family::Tank => {
            let text = c.text("fluid").ok_or("tank has no fluid")?;
            Some(make_fluid(parse_mixture(db, text)?)?)
        }
        Family::CoolingJacket => match c.text("outlet_fluid") {
            Some(label) => Some(make_fluid(parse_mixture(db, label)?)?),
            None => inlet(0),
        },
        Family::CombustionChamber | Family::GasGenerator => match (inlet(0), inlet(1)) {
            (Some(f), Some(o)) => {
                let products = db.products_for(&f.mixture, &o.mixture).map_err(|e| e.to_string())?;
                Some(make_fluid(Mixture::pure(products))?)
            }
            _ => None,
        },
        Family::Junction => {
            if inlets.iter().any(Option::is_none) {
                return Ok(None);
            }
            let labels: BTreeSet<String> = inlets.iter().flatten().map(|f| f.label()).collect();
            if labels.len() > 1 {
                let list: Vec<String> = labels.into_iter().collect();
                return Err(format!("junction mixes different fluids ({})", list.join(", ")));
            }
            inlets[0].clone()
        }
        _ => inlets.first().cloned().flatten(),
    })
}

fn resolve_fluids(
    model: &Model,
    db: &FluidDatabase,
    comps: &[CompiledComponent],
    nodes: &mut [Node],
    diags: &mut Vec<Diagnostic>,
) {
    let fluid_nodes: Vec<usize> = (0..nodes.len()).filter(|&k| nodes[k].kind == PortKind::Fluid).collect();
    let mut failed = BTreeSet::new();
    let mut queue: VecDeque<usize> = (0..comps.len()).collect();
    let mut budget = comps.len() * (comps.len() + 2);
    while let Some(ci) = queue.pop_front() {
        if budget == 0 {
            break;
        }
        budget -= 1;
        let cc = &comps[ci];
        let outlets: Vec<usize> = cc
            .fluid_dirs
            .iter()
            .zip(&cc.fluid_nodes)
            .filter(|(d, n)| **d == PortDirection::Outlet && n.is_some())
            .map(|(_, n)| n.expect("filtered"))
            .filter(|&n| nodes[n].fluid.is_none())
            .collect();
        if outlets.is_empty() || failed.contains(&ci) {
            continue;
        }
        match outlet_fluid(model, db, ci, cc, nodes) {
            Ok(Some(f)) => {
                for n in outlets {
                    nodes[n].fluid = Some(f.clone());
                    queue.push_back(nodes[n].to.0);
                }
            }
            Ok(None) => {}
            Err(e) => {
                failed.insert(ci);
                diags.push(Diagnostic::error(Some(&cc.name), e));
            }
        }
    }
    for k in fluid_nodes {
        if nodes[k].fluid.is_none() && !failed.contains(&nodes[k].from.0) {
            let name = &model.components[nodes[k].from.0].name;
            diags.push(Diagnostic::error(
                Some(name),
                format!("fluid at {name}.{} cannot be traced back to a tank", nodes[k].from.1),
            ));
        }
    }
}

fn check_phases(comps: &[CompiledComponent], nodes: &[Node], diags: &mut Vec<Diagnostic>) {
    for cc in comps {
        let Some(Some(first)) = cc.fluid_nodes.first().map(|n| n.and_then(|n| nodes[n].fluid.clone())) else {
            continue;
        };
        let problem = match cc.family {
            Family::Pump if first.is_gas() => Some("pump working fluid must be a liquid"),
            Family::Turbine if !first.is_gas() => Some("turbine working fluid must be a gas"),
            Family::Nozzle | Family::ConvergentNozzle if !first.is_gas() => Some("nozzle flow must be a gas"),
            Family::CoolingJacket if first.is_gas() => Some("cooling jacket coolant must be a liquid at the inlet"),
            _ => None,
        };
        if let Some(p) = problem {
            diags.push(Diagnostic::error(Some(&cc.name), format!("{p} (found {})", first.label())));
        }
    }
}

/// Component-graph distances, for pairing specifications with free parameters.
fn distances(net: &CompiledNetwork, from: usize) -> Vec<usize> {
    let n = net.comps.len();
    let mut adj = vec![Vec::new(); n];
    for node in &net.nodes {
        adj[node.from.0].push(node.to.0);
        adj[node.to.0].push(node.from.0);
    }
    for (ci, c) in net.comps.iter().enumerate() {
        if let Some(k) = c.chamber_node {
            let t = net.nodes[k].from.0;
            adj[ci].push(t);
            adj[t].push(ci);
        }
    }
    let mut d = vec![usize::MAX; n];
    let mut q = VecDeque::from([from]);
    d[from] = 0;
    while let Some(u) = q.pop_front() {
        for &v in &adj[u] {
            if d[v] == usize::MAX {
                d[v] = d[u] + 1;
                q.push_back(v);
            }
        }
    }
    d
}

/// Counts and names the likely source of any imbalance.
pub(crate) fn dof_report(model: &Model, net: &CompiledNetwork, mut diags: Vec<Diagnostic>) -> DofReport {
    let n_vars = net.vars.len();
    let n_eqs = net.n_eqs;
    let status = match n_vars.cmp(&n_eqs) {
        std::cmp::Ordering::Equal => DofStatus::WellPosed,
        std::cmp::Ordering::Greater => DofStatus::UnderDetermined(n_vars - n_eqs),
        std::cmp::Ordering::Less => DofStatus::OverDetermined(n_eqs - n_vars),
    };
    if status != DofStatus::WellPosed {
        diags.push(Diagnostic::error(None, format!("{n_vars} unknowns against {n_eqs} equations: {status}")));
        let mut free: Vec<(usize, String)> = net
            .vars
            .iter()
            .filter_map(|v| match v.source {
                VarSource::Param { comp, .. } => Some((comp, v.name.clone())),
                _ => None,
            })
            .collect();
        // Design-mode bookkeeping: a pump's pressure rise and a shaft's speed
        // are open unknowns, and each shaft power balance is an equation
        // that sizes something other than the speed.
        let n_free = free.len();
        let mut specs: Vec<(usize, String, Option<usize>)> =
            net.specs.iter().map(|s| (s.comp, s.target.clone(), None)).collect();
        let n_specs = specs.len();
        if model.mode == Mode::Design {
            for (ci, c) in net.comps.iter().enumerate() {
                match c.family {
                    Family::Pump => free.push((ci, format!("pressure rise of {}", c.name))),
                    Family::Shaft => {
                        free.push((ci, format!("speed of {}", c.name)));
                        specs.push((ci, format!("power balance of {}", c.name), Some(free.len() - 1)));
                    }
                    _ => {}
                }
            }
        }
        // Greedy nearest pairing of specifications with free unknowns.
        let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
        for (si, (comp, _, forbid)) in specs.iter().enumerate() {
            let d = distances(net, *comp);
            for (fi, (fcomp, _)) in free.iter().enumerate() {
                if *forbid != Some(fi) {
                    pairs.push((d[*fcomp], si, fi));
                }
            }
        }
        pairs.sort_unstable();
        let mut spec_used = vec![false; specs.len()];
        let mut free_used = vec![false; free.len()];
        for (_, si, fi) in pairs {
            if !spec_used[si] && !free_used[fi] {
                spec_used[si] = true;
                free_used[fi] = true;
            }
        }
        for (fi, (comp, name)) in free.iter().enumerate() {
            if free_used[fi] {
                continue;
            }
            let message = if fi < n_free {
                format!("free parameter {name} has no specification to balance it; add one or fix the parameter")
            } else {
                format!("the {name} is not set by any specification")
            };
            diags.push(Diagnostic::warning(Some(&net.comps[*comp].name), message));
        }
        for (si, (comp, target, _)) in specs.iter().enumerate() {
            if spec_used[si] {
                continue;
            }
            let message = if si < n_specs {
                format!("specification {target} has no free parameter to balance it; remove it or free a parameter")
            } else {
                format!("the {target} has no free parameter to balance it; free a parameter")
            };
            diags.push(Diagnostic::warning(Some(&net.comps[*comp].name), message));
        }
        for c in &model.components {
            if c.family != Family::Tank {
                continue;
            }
            for (p, what) in [("p_out", "pressure"), ("t_out", "temperature")] {
                if !c.params.get(p).is_some_and(|p| p.value.is_some() || p.free) {
                    diags.push(Diagnostic::warning(
                        Some(&c.name),
                        format!("tank {} does not pin its outlet {what} ({p})", c.name),
                    ));
                }
            }
        }
    }
    DofReport { n_vars, n_eqs, status, diagnostics: diags }
}
