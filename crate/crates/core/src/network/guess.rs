//! Starting point heuristics.
//!
//! Anchors come from tank pins and specifications; pressures, flows and
//! temperatures are then propagated through the graph with each family's
//! simplest relation. Free parameters are sized from the propagated state.

use super::compile::{CompiledNetwork, VarSource};
use super::model::Model;
use crate::components::{
    chamber_temperature, choked_area, isentropic_orifice_flow, turbine_outlet_temperature, ChamberParams, Family,
    FluidPortState, PortDirection, PortKind,
};

const P_DEFAULT: f64 = 1e6;
const T_DEFAULT: f64 = 300.0;
const T_CHAMBER: f64 = 3000.0;
const MDOT_DEFAULT: f64 = 1.0;
const SPEED_DEFAULT: f64 = 3000.0;
/// Pressure ratio assumed across a line element with no drop specified.
const LINE_RATIO: f64 = 0.9;
/// Injector upstream-to-chamber pressure ratio assumed when no drop is specified.
const INJECTOR_RATIO: f64 = 1.25;
const PUMP_RISE: f64 = 5e6;
const TURBINE_RATIO: f64 = 2.0;

#[derive(Clone, Copy)]
enum Field {
    P = 0,
    T = 1,
    M = 2,
}

struct State<'a> {
    net: &'a CompiledNetwork,
    val: Vec<Option<f64>>,
}

impl<'a> State<'a> {
    fn get(&self, node: Option<usize>, f: Field) -> Option<f64> {
        node.and_then(|n| self.val[self.net.nodes[n].var0 + f as usize])
    }

    /// Sets a value if still unknown; returns whether anything changed.
    fn put(&mut self, node: Option<usize>, f: Field, v: f64) -> bool {
        match node {
            Some(n) if v.is_finite() => {
                let slot = &mut self.val[self.net.nodes[n].var0 + f as usize];
                if slot.is_none() {
                    *slot = Some(v);
                    true
                } else {
                    false
                }
            }
            _ => false,
        }
    }
}

fn spec(model: &Model, comp: &str, q: &str) -> Option<f64> {
    let target = format!("{comp}.{q}");
    model.specs.iter().find(|s| s.target == target).map(|s| s.value)
}

fn inlets_outlets(net: &CompiledNetwork, ci: usize) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let c = &net.comps[ci];
    let mut ins = Vec::new();
    let mut outs = Vec::new();
    for (d, n) in c.fluid_dirs.iter().zip(&c.fluid_nodes) {
        match d {
            PortDirection::Inlet => ins.push(*n),
            _ => outs.push(*n),
        }
    }
    (ins, outs)
}

fn is_line(f: Family) -> bool {
    matches!(f, Family::Pipe | Family::Valve | Family::Injector | Family::CoolingJacket)
}

fn propagate_flows(model: &Model, st: &mut State) {
    let net = st.net;
    for (ci, c) in net.comps.iter().enumerate() {
        let (ins, outs) = inlets_outlets(net, ci);
        let name = &c.name;
        let seed = match c.family {
            Family::Tank => spec(model, name, "mdot").map(|v| (outs[0], v)),
            Family::Nozzle | Family::ConvergentNozzle => spec(model, name, "mdot").map(|v| (ins[0], v)),
            Family::CombustionChamber | Family::GasGenerator => spec(model, name, "mdot").map(|v| (outs[0], v)),
            Family::Monitor => None,
            Family::Pump => spec(model, name, "mdot")
                .or_else(|| {
                    let rho = ins[0].and_then(|n| net.nodes[n].fluid.as_ref())?.density(P_DEFAULT, T_DEFAULT);
                    c.base.get("q_ref").map(|q| q * rho)
                })
                .map(|v| (ins[0], v)),
            _ => spec(model, name, "mdot").map(|v| (ins.first().copied().flatten().or(outs[0]), v)),
        };
        if let Some((n, v)) = seed {
            st.put(n, Field::M, v);
        }
    }
    for _ in 0..4 * net.comps.len() + 4 {
        let mut changed = false;
        for (ci, c) in net.comps.iter().enumerate() {
            let (ins, outs) = inlets_outlets(net, ci);
            match c.family {
                f if is_line(f) || matches!(f, Family::Pump | Family::Turbine) => {
                    if let Some(v) = st.get(ins[0], Field::M) {
                        changed |= st.put(outs[0], Field::M, v);
                    } else if let Some(v) = st.get(outs[0], Field::M) {
                        changed |= st.put(ins[0], Field::M, v);
                    }
                }
                Family::CombustionChamber | Family::GasGenerator => {
                    let of = spec(model, &c.name, "of").unwrap_or(if c.family == Family::GasGenerator { 1.0 } else { 5.0 });
                    match (st.get(ins[0], Field::M), st.get(ins[1], Field::M), st.get(outs[0], Field::M)) {
                        (_, _, Some(m)) => {
                            changed |= st.put(ins[0], Field::M, m / (1.0 + of));
                            changed |= st.put(ins[1], Field::M, m * of / (1.0 + of));
                        }
                        (Some(f), Some(o), None) => changed |= st.put(outs[0], Field::M, f + o),
                        (Some(f), None, None) => {
                            changed |= st.put(ins[1], Field::M, f * of);
                        }
                        (None, Some(o), None) => {
                            changed |= st.put(ins[0], Field::M, o / of);
                        }
                        _ => {}
                    }
                }
                Family::Splitter | Family::Junction => {
                    let (one, many) = if c.family == Family::Splitter { (ins[0], &outs) } else { (outs[0], &ins) };
                    let known: Vec<Option<f64>> = many.iter().map(|n| st.get(*n, Field::M)).collect();
                    match st.get(one, Field::M) {
                        Some(total) => {
                            let unknown = known.iter().filter(|k| k.is_none()).count();
                            if unknown > 0 {
                                let rest = total - known.iter().flatten().sum::<f64>();
                                let share = if rest > 0.0 { rest / unknown as f64 } else { total / many.len() as f64 };
                                for (n, k) in many.iter().zip(&known) {
                                    if k.is_none() {
                                        changed |= st.put(*n, Field::M, share);
                                    }
                                }
                            }
                        }
                        None if known.iter().all(Option::is_some) => {
                            changed |= st.put(one, Field::M, known.iter().flatten().sum());
                        }
                        None => {}
                    }
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
}

/// One round of pressure propagation. With `approximate`, relations with
/// assumed drops are used too.
fn pressure_round(model: &Model, st: &mut State, approximate: bool) -> bool {
    let net = st.net;
    let mut changed = false;
    for (ci, c) in net.comps.iter().enumerate() {
        let (ins, outs) = inlets_outlets(net, ci);
        let name = &c.name;
        let pin = ins.first().and_then(|n| st.get(*n, Field::P));
        let pout = outs.first().and_then(|n| st.get(*n, Field::P));
        match c.family {
            Family::Pump => {
                let dp = spec(model, name, "dp").or_else(|| c.base.get("dp_ref"));
                match (pin, pout, dp) {
                    (Some(p), None, Some(dp)) => changed |= st.put(outs[0], Field::P, p + dp),
                    (None, Some(p), Some(dp)) => changed |= st.put(ins[0], Field::P, p - dp),
                    (Some(p), None, None) if approximate => changed |= st.put(outs[0], Field::P, p + PUMP_RISE),
                    (None, Some(p), None) if approximate => {
                        changed |= st.put(ins[0], Field::P, (p - PUMP_RISE).max(0.1 * p))
                    }
                    _ => {}
                }
            }
            Family::Turbine => {
                let pr = spec(model, name, "pressure_ratio");
                let ratio = pr.unwrap_or(TURBINE_RATIO);
                if pr.is_some() || approximate {
                    match (pin, pout) {
                        (Some(p), None) => changed |= st.put(outs[0], Field::P, p / ratio),
                        (None, Some(p)) => changed |= st.put(ins[0], Field::P, p * ratio),
                        _ => {}
                    }
                }
            }
            f if is_line(f) => {
                let dp = spec(model, name, "dp");
                let out_spec = if f == Family::CoolingJacket { spec(model, name, "p_out") } else { None };
                if let Some(p) = out_spec {
                    changed |= st.put(outs[0], Field::P, p);
                }
                let ratio = if f == Family::Injector { 1.0 / INJECTOR_RATIO } else { LINE_RATIO };
                match (pin, pout, dp) {
                    (Some(p), None, Some(dp)) => changed |= st.put(outs[0], Field::P, p - dp),
                    (None, Some(p), Some(dp)) => changed |= st.put(ins[0], Field::P, p + dp),
                    (Some(p), None, None) if approximate => changed |= st.put(outs[0], Field::P, p * ratio),
                    (None, Some(p), None) if approximate => changed |= st.put(ins[0], Field::P, p / ratio),
                    _ => {}
                }
            }
            Family::Splitter | Family::Junction | Family::CombustionChamber | Family::GasGenerator => {
                let key = if c.family == Family::CombustionChamber { "p_c" } else { "p" };
                if let Some(p) = spec(model, name, key).filter(|_| !matches!(c.family, Family::Splitter | Family::Junction)) {
                    changed |= st.put(outs[0], Field::P, p);
                }
                let all: Vec<Option<usize>> = ins.iter().chain(&outs).copied().collect();
                if let Some(p) = all.iter().find_map(|n| st.get(*n, Field::P)) {
                    for n in &all {
                        changed |= st.put(*n, Field::P, p);
                    }
                }
            }
            _ => {}
        }
    }
    changed
}

fn propagate_pressures(model: &Model, st: &mut State) {
    for _ in 0..4 * st.net.comps.len() + 4 {
        while pressure_round(model, st, false) {}
        if !pressure_round(model, st, true) {
            break;
        }
    }
}

fn fluid_state(st: &State, n: Option<usize>) -> Option<FluidPortState> {
    let k = n?;
    let fluid = st.net.nodes[k].fluid.clone()?;
    Some(FluidPortState::new(
        st.get(n, Field::P).unwrap_or(P_DEFAULT),
        st.get(n, Field::T)?,
        st.get(n, Field::M).unwrap_or(MDOT_DEFAULT),
        fluid,
    ))
}

fn propagate_temperatures(model: &Model, st: &mut State) {
    let net = st.net;
    for (ci, c) in net.comps.iter().enumerate() {
        if c.family == Family::CoolingJacket {
            if let Some(t) = spec(model, &c.name, "t_out") {
                let (_, outs) = inlets_outlets(net, ci);
                st.put(outs[0], Field::T, t);
            }
        }
    }
    for _ in 0..4 * net.comps.len() + 4 {
        let mut changed = false;
        for (ci, c) in net.comps.iter().enumerate() {
            let (ins, outs) = inlets_outlets(net, ci);
            let tin = ins.first().and_then(|n| st.get(*n, Field::T));
            match c.family {
                Family::Pipe | Family::Valve | Family::Injector | Family::Pump | Family::Splitter => {
                    if let Some(t) = tin {
                        for n in &outs {
                            changed |= st.put(*n, Field::T, t);
                        }
                    }
                }
                Family::Junction => {
                    let states: Option<Vec<FluidPortState>> = ins.iter().map(|n| fluid_state(st, *n)).collect();
                    if let Some(states) = states {
                        let m: f64 = states.iter().map(|s| s.mdot.abs()).sum();
                        let t = if m > 0.0 {
                            states.iter().map(|s| s.mdot.abs() * s.t0).sum::<f64>() / m
                        } else {
                            states[0].t0
                        };
                        changed |= st.put(outs[0], Field::T, t);
                    }
                }
                Family::CoolingJacket => {
                    if let Some(s) = fluid_state(st, ins[0]) {
                        let q = c.base.get("q_design").unwrap_or(0.0);
                        let rise = if s.mdot.abs() > 1e-9 { q / (s.mdot.abs() * s.fluid.cp()) } else { 0.0 };
                        changed |= st.put(outs[0], Field::T, s.t0 + rise.min(10.0 * s.t0));
                    }
                }
                Family::Turbine => {
                    if let (Some(s), Some(pout)) = (fluid_state(st, ins[0]), st.get(outs[0], Field::P)) {
                        let gamma = s.fluid.gas().map_or(1.4, |g| g.gamma);
                        let eta = c.base.get("eta").unwrap_or(0.7);
                        let t = turbine_outlet_temperature(s.t0, s.p0 / pout, gamma, eta);
                        changed |= st.put(outs[0], Field::T, if t > 0.0 { t } else { s.t0 });
                    }
                }
                Family::CombustionChamber | Family::GasGenerator => {
                    if let (Some(f), Some(o), Some(k)) = (fluid_state(st, ins[0]), fluid_state(st, ins[1]), outs[0]) {
                        let t = net.nodes[k].fluid.as_ref().and_then(|products| {
                            let params = ChamberParams { eta_comb: c.base.get("eta_comb").unwrap_or(1.0), a_throat: None };
                            products.gas().map(|g| chamber_temperature(&params, &g, &f, &o))
                        });
                        changed |= st.put(outs[0], Field::T, t.filter(|t| *t > 0.0).unwrap_or(T_CHAMBER));
                    }
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
}

fn free_param_guess(st: &State, ci: usize, param: &str) -> Option<f64> {
    let net = st.net;
    let c = &net.comps[ci];
    let (ins, outs) = inlets_outlets(net, ci);
    let inlet = ins.first().and_then(|n| fluid_state(st, *n));
    let outlet = outs.first().and_then(|n| fluid_state(st, *n));
    match (c.family, param) {
        (Family::Injector, "area") => {
            let (i, o) = (inlet?, outlet?);
            let cd = c.base.get("cd").unwrap_or(1.0);
            let per_area = match i.fluid.gas() {
                Some(g) => isentropic_orifice_flow(1.0, i.p0, i.t0, o.p0, &g),
                None => (2.0 * i.fluid.density(i.p0, i.t0) * (i.p0 - o.p0).max(1e3)).sqrt(),
            };
            Some(i.mdot.abs() / (cd * per_area))
        }
        (Family::Turbine, "a_eff") => {
            let i = inlet?;
            choked_area(i.mdot.abs(), i.p0, i.t0, &i.fluid.gas()?).ok()
        }
        (Family::CombustionChamber, "a_throat") => {
            let o = outlet?;
            choked_area(o.mdot.abs(), o.p0, o.t0, &o.fluid.gas()?).ok()
        }
        (Family::ConvergentNozzle, "throat_area") => {
            let i = inlet?;
            choked_area(i.mdot.abs(), i.p0, i.t0, &i.fluid.gas()?).ok()
        }
        (Family::Pipe | Family::Valve | Family::CoolingJacket, "k_loss") => {
            let (i, o) = (inlet?, outlet?);
            let opening = c.base.get("opening").unwrap_or(1.0);
            let dp = (i.p0 - o.p0).max(1e3);
            Some(dp * i.fluid.density(i.p0, i.t0) / (i.mdot * i.mdot).max(1e-6) * opening * opening)
        }
        (Family::CoolingJacket, "q_design") => {
            let (i, o) = (inlet?, outlet?);
            Some((i.mdot * i.fluid.cp() * (o.t0 - i.t0)).max(0.0))
        }
        (Family::Valve, "opening") => Some(1.0),
        (_, p) if p.starts_with("eta") || p == "cd" => Some(0.8),
        _ => None,
    }
}

/// Starting values for every variable of the compiled network.
pub(crate) fn initial_guess(model: &Model, net: &CompiledNetwork) -> Vec<f64> {
    let mut st = State { net, val: vec![None; net.vars.len()] };

    for (ci, c) in net.comps.iter().enumerate() {
        if c.family == Family::Tank {
            let (_, outs) = inlets_outlets(net, ci);
            if let Some(p) = c.base.get("p_out").or_else(|| spec(model, &c.name, "p")) {
                st.put(outs[0], Field::P, p);
            }
            if let Some(t) = c.base.get("t_out").or_else(|| spec(model, &c.name, "t")) {
                st.put(outs[0], Field::T, t);
            }
        }
    }
    propagate_flows(model, &mut st);
    propagate_pressures(model, &mut st);
    propagate_temperatures(model, &mut st);

    let mut x = vec![0.0; net.vars.len()];
    for (k, node) in net.nodes.iter().enumerate() {
        let v = node.var0;
        match node.kind {
            PortKind::Fluid => {
                let hot = matches!(net.comps[node.from.0].family, Family::CombustionChamber | Family::GasGenerator);
                x[v] = st.val[v].unwrap_or(P_DEFAULT);
                x[v + 1] = st.val[v + 1].unwrap_or(if hot { T_CHAMBER } else { T_DEFAULT });
                x[v + 2] = st.val[v + 2].unwrap_or(MDOT_DEFAULT);
                for i in 0..3 {
                    st.val[v + i] = Some(x[v + i]);
                }
            }
            PortKind::Mech => {
                let shaft = &net.comps[node.to.0];
                let machine = &net.comps[node.from.0];
                x[v + 1] = spec(model, &shaft.name, "speed")
                    .or_else(|| machine.base.get("speed_ref"))
                    .unwrap_or(SPEED_DEFAULT);
                let _ = k;
            }
        }
    }

    // Machine powers: pumps from their duty, drivers share the shaft demand.
    for (si, shaft) in net.comps.iter().enumerate() {
        if shaft.family != Family::Shaft {
            continue;
        }
        let mut demand = shaft.base.get("load").unwrap_or(0.0);
        let mut drivers = Vec::new();
        for (port, role) in shaft.mech_nodes.iter().zip(&shaft.mech_roles) {
            let Some(n) = port else { continue };
            let machine = net.nodes[*n].from.0;
            match role {
                crate::components::MechRole::Load => {
                    let (ins, outs) = inlets_outlets(net, machine);
                    let p = match (fluid_state(&st, ins[0]), fluid_state(&st, outs[0])) {
                        (Some(i), Some(o)) => {
                            let eta = net.comps[machine].base.get("eta").unwrap_or(0.7);
                            i.mdot * (o.p0 - i.p0) / (i.fluid.density(i.p0, i.t0) * eta)
                        }
                        _ => 1e5,
                    };
                    x[net.nodes[*n].var0] = p;
                    demand += p;
                }
                crate::components::MechRole::Driver => drivers.push(*n),
            }
        }
        let eta = shaft.base.get("eta_mech").unwrap_or(1.0);
        for n in &drivers {
            x[net.nodes[*n].var0] = -demand / (eta * drivers.len() as f64);
        }
        let _ = si;
    }

    for (i, v) in net.vars.iter().enumerate() {
        if let VarSource::Param { comp, param } = v.source {
            x[i] = net.comps[comp]
                .base
                .get(param)
                .or_else(|| free_param_guess(&st, comp, param))
                .filter(|g| g.is_finite() && (!v.positive || *g > 0.0))
                .unwrap_or(v.unit.scale());
        }
    }

    if let Some(dp) = &model.design_point {
        for (i, v) in net.vars.iter().enumerate() {
            if let Some(val) = dp.values.get(&v.name) {
                x[i] = *val;
            }
        }
    }
    for (i, v) in net.vars.iter().enumerate() {
        if let Some(val) = model.initial_guess.get(&v.name) {
            x[i] = *val;
        }
    }
    x
}
