use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::NetworkError;
use crate::components::{Family, Mode, ParamClass, PerformanceMetrics, PortDef, PortDirection, Requirement};
use crate::fluids::{CombustionPair, FluidDatabase, Species};
use crate::solver::SolverConfig;

/// Where a parameter value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Written by the user.
    Specified,
    /// Filled from the family default.
    Default,
    /// Solved as a design unknown.
    Solved,
    /// Captured from the design-point solution.
    Captured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub value: Option<ParamValue>,
    /// Treated as an unknown of the system.
    pub free: bool,
    pub provenance: Provenance,
}

impl Param {
    pub fn number(value: f64) -> Self {
        Self { value: Some(ParamValue::Number(value)), free: false, provenance: Provenance::Specified }
    }

    pub fn text(value: impl Into<String>) -> Self {
        Self { value: Some(ParamValue::Text(value.into())), free: false, provenance: Provenance::Specified }
    }

    pub fn free(guess: Option<f64>) -> Self {
        Self { value: guess.map(ParamValue::Number), free: true, provenance: Provenance::Specified }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self.value {
            Some(ParamValue::Number(v)) => Some(v),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match &self.value {
            Some(ParamValue::Text(s)) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentInstance {
    pub name: String,
    pub family: Family,
    pub params: BTreeMap<String, Param>,
}

impl ComponentInstance {
    /// New instance with family defaults materialized.
    pub fn new(name: impl Into<String>, family: Family) -> Self {
        let mut c = Self { name: name.into(), family, params: BTreeMap::new() };
        c.fill_defaults();
        c
    }

    pub fn with(mut self, param: &str, value: Param) -> Self {
        self.params.insert(param.to_string(), value);
        self
    }

    pub(crate) fn fill_defaults(&mut self) {
        for def in self.family.params() {
            if let Requirement::Default(v) = def.requirement {
                self.params.entry(def.name.to_string()).or_insert(Param {
                    value: Some(ParamValue::Number(v)),
                    free: false,
                    provenance: Provenance::Default,
                });
            }
        }
    }

    pub fn number(&self, param: &str) -> Option<f64> {
        self.params.get(param).and_then(Param::as_number)
    }

    pub fn text(&self, param: &str) -> Option<&str> {
        self.params.get(param).and_then(Param::as_text)
    }

    /// Variadic port count, or 0 for fixed-port families.
    pub fn port_count(&self) -> usize {
        self.family
            .structural_param()
            .and_then(|p| self.number(p))
            .map_or(0, |n| if n >= 0.0 && n.fract() == 0.0 { n as usize } else { 0 })
    }

    pub fn ports(&self) -> Vec<PortDef> {
        self.family.ports(self.port_count())
    }

    pub fn port(&self, name: &str) -> Option<PortDef> {
        self.ports().into_iter().find(|p| p.name == name)
    }
}

/// A `component.port` reference.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PortRef {
    pub component: String,
    pub port: String,
}

impl PortRef {
    pub fn new(component: impl Into<String>, port: impl Into<String>) -> Self {
        Self { component: component.into(), port: port.into() }
    }
}

impl fmt::Display for PortRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.component, self.port)
    }
}

impl FromStr for PortRef {
    type Err = NetworkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (c, p) = s.trim().rsplit_once('.').ok_or_else(|| NetworkError::BadReference(s.to_string()))?;
        if c.is_empty() || p.is_empty() {
            return Err(NetworkError::BadReference(s.to_string()));
        }
        Ok(Self::new(c, p))
    }
}

/// A joined pair of ports. Fluid connections run from an outlet to an
/// inlet; mechanical ones from a machine to a shaft.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connection {
    pub from: PortRef,
    pub to: PortRef,
}

impl fmt::Display for Connection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.from, self.to)
    }
}

/// An extra equation `quantity(component) = value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Spec {
    /// `component.quantity`.
    pub target: String,
    pub value: f64,
}

impl Spec {
    pub fn new(target: impl Into<String>, value: f64) -> Self {
        Self { target: target.into(), value }
    }

    pub fn split(&self) -> Option<(&str, &str)> {
        self.target.rsplit_once('.')
    }
}

/// Species and combustion pairs added on top of the base database.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidsSection {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub species: Vec<Species>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub combustion_pairs: Vec<CombustionPair>,
}

/// Solution recorded by the design step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignPoint {
    /// Every system variable by name.
    pub values: BTreeMap<String, f64>,
    /// The specifications the design was solved against.
    pub specs: Vec<Spec>,
    pub metrics: PerformanceMetrics,
}

#[derive(Debug, Clone)]
pub struct Model {
    pub name: String,
    pub description: String,
    pub mode: Mode,
    pub components: Vec<ComponentInstance>,
    pub connections: Vec<Connection>,
    pub specs: Vec<Spec>,
    /// Per-variable starting values, applied after the heuristics.
    pub initial_guess: BTreeMap<String, f64>,
    pub solver: SolverConfig,
    pub fluids: FluidsSection,
    pub design_point: Option<DesignPoint>,
    db: Arc<FluidDatabase>,
}

impl PartialEq for Model {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.description == other.description
            && self.mode == other.mode
            && self.components == other.components
            && self.connections == other.connections
            && self.specs == other.specs
            && self.initial_guess == other.initial_guess
            && self.solver == other.solver
            && self.fluids == other.fluids
            && self.design_point == other.design_point
    }
}

impl Model {
    pub fn new(name: impl Into<String>, mode: Mode) -> Self {
        Self::with_database(name, mode, Arc::new(FluidDatabase::builtin()))
    }

    pub fn with_database(name: impl Into<String>, mode: Mode, db: Arc<FluidDatabase>) -> Self {
        Self {
            name: name.into(),
            description: String::new(),
            mode,
            components: Vec::new(),
            connections: Vec::new(),
            specs: Vec::new(),
            initial_guess: BTreeMap::new(),
            solver: SolverConfig::default(),
            fluids: FluidsSection::default(),
            design_point: None,
            db,
        }
    }

    pub fn database(&self) -> &Arc<FluidDatabase> {
        &self.db
    }

    /// Adds the model-local species and pairs to the database.
    pub fn set_fluids(&mut self, base: &FluidDatabase, fluids: FluidsSection) -> Result<(), crate::fluids::FluidError> {
        let mut db = base.clone();
        for s in &fluids.species {
            db.insert_species(s.clone())?;
        }
        for p in &fluids.combustion_pairs {
            db.insert_pair(p.clone())?;
        }
        self.db = Arc::new(db);
        self.fluids = fluids;
        Ok(())
    }

    pub fn add(&mut self, component: ComponentInstance) -> Result<(), NetworkError> {
        if self.component(&component.name).is_some() {
            return Err(NetworkError::DuplicateComponent(component.name));
        }
        self.components.push(component);
        Ok(())
    }

    pub fn component(&self, name: &str) -> Option<&ComponentInstance> {
        self.components.iter().find(|c| c.name == name)
    }

    pub fn component_mut(&mut self, name: &str) -> Option<&mut ComponentInstance> {
        self.components.iter_mut().find(|c| c.name == name)
    }

    fn port_def(&self, r: &PortRef) -> Result<PortDef, NetworkError> {
        let comp = self.component(&r.component).ok_or_else(|| NetworkError::UnknownComponent(r.component.clone()))?;
        comp.port(&r.port).ok_or_else(|| NetworkError::UnknownPort(r.clone()))
    }

    fn is_connected(&self, r: &PortRef) -> bool {
        self.connections.iter().any(|c| &c.from == r || &c.to == r)
    }

    /// Joins two ports into one node. Order does not matter; the
    /// connection is stored in flow (or machine-to-shaft) direction.
    pub fn connect(&mut self, a: &str, b: &str) -> Result<(), NetworkError> {
        let (a, b): (PortRef, PortRef) = (a.parse()?, b.parse()?);
        let (da, db) = (self.port_def(&a)?, self.port_def(&b)?);
        if da.kind != db.kind {
            return Err(NetworkError::KindMismatch { a, a_kind: da.kind, b, b_kind: db.kind });
        }
        for r in [&a, &b] {
            if self.is_connected(r) {
                return Err(NetworkError::AlreadyConnected(r.clone()));
            }
        }
        use PortDirection::*;
        let (from, to) = match (da.direction, db.direction) {
            (Outlet, Inlet) | (Machine, Hub) => (a, b),
            (Inlet, Outlet) | (Hub, Machine) => (b, a),
            _ => return Err(NetworkError::DirectionMismatch { a, b }),
        };
        if from.component == to.component {
            return Err(NetworkError::SelfLoop(from.component));
        }
        self.connections.push(Connection { from, to });
        Ok(())
    }

    fn param_mut(&mut self, path: &str) -> Result<(&mut Param, ParamClass), NetworkError> {
        let (c, p) = path.rsplit_once('.').ok_or_else(|| NetworkError::BadReference(path.to_string()))?;
        let comp = self.component_mut(c).ok_or_else(|| NetworkError::UnknownComponent(c.to_string()))?;
        let def = comp.family.param(p).ok_or_else(|| NetworkError::UnknownParameter(path.to_string()))?;
        let entry = comp.params.entry(p.to_string()).or_insert(Param { value: None, free: false, provenance: Provenance::Specified });
        Ok((entry, def.class))
    }

    /// Class of the parameter at `component.param`.
    pub fn param_class(&self, path: &str) -> Result<ParamClass, NetworkError> {
        let (c, p) = path.rsplit_once('.').ok_or_else(|| NetworkError::BadReference(path.to_string()))?;
        let comp = self.component(c).ok_or_else(|| NetworkError::UnknownComponent(c.to_string()))?;
        comp.family.param(p).map(|d| d.class).ok_or_else(|| NetworkError::UnknownParameter(path.to_string()))
    }

    pub fn param_value(&self, path: &str) -> Option<f64> {
        let (c, p) = path.rsplit_once('.')?;
        self.component(c)?.number(p)
    }

    /// Fixes a numeric parameter to `value`.
    pub fn set_param(&mut self, path: &str, value: f64) -> Result<(), NetworkError> {
        let (entry, class) = self.param_mut(path)?;
        if matches!(class, ParamClass::Setting) {
            return Err(NetworkError::NotNumeric(path.to_string()));
        }
        *entry = Param::number(value);
        Ok(())
    }

    /// Marks a numeric parameter as an unknown, keeping its value as the guess.
    pub fn set_free(&mut self, path: &str, free: bool) -> Result<(), NetworkError> {
        let (entry, class) = self.param_mut(path)?;
        if matches!(class, ParamClass::Setting | ParamClass::Structure | ParamClass::Reference) {
            return Err(NetworkError::CannotFree(path.to_string()));
        }
        entry.free = free;
        Ok(())
    }

    /// Sets the value of the spec on `target`, adding it if absent.
    pub fn set_spec(&mut self, target: &str, value: f64) {
        match self.specs.iter_mut().find(|s| s.target == target) {
            Some(s) => s.value = value,
            None => self.specs.push(Spec::new(target, value)),
        }
    }

    pub fn remove_spec(&mut self, target: &str) -> Option<Spec> {
        let i = self.specs.iter().position(|s| s.target == target)?;
        Some(self.specs.remove(i))
    }

    /// Renames a component and every reference to it.
    pub fn rename(&mut self, old: &str, new: &str) -> Result<(), NetworkError> {
        if self.component(new).is_some() {
            return Err(NetworkError::DuplicateComponent(new.to_string()));
        }
        let comp = self.component_mut(old).ok_or_else(|| NetworkError::UnknownComponent(old.to_string()))?;
        comp.name = new.to_string();
        for c in &mut self.connections {
            for r in [&mut c.from, &mut c.to] {
                if r.component == old {
                    r.component = new.to_string();
                }
            }
        }
        let retarget = |t: &mut String| {
            if let Some((c, q)) = t.rsplit_once('.') {
                if c == old {
                    *t = format!("{new}.{q}");
                }
            }
        };
        for s in &mut self.specs {
            retarget(&mut s.target);
        }
        for c in &mut self.components {
            if let Some(Param { value: Some(ParamValue::Text(t)), .. }) = c.params.get_mut("chamber") {
                if t == old {
                    *t = new.to_string();
                }
            }
        }
        let rename_key = |k: &String| match k.split_once('.') {
            Some((c, rest)) if c == old => format!("{new}.{rest}"),
            _ => k.clone(),
        };
        self.initial_guess = self.initial_guess.iter().map(|(k, v)| (rename_key(k), *v)).collect();
        if let Some(dp) = &mut self.design_point {
            dp.values = dp.values.iter().map(|(k, v)| (rename_key(k), *v)).collect();
            for s in &mut dp.specs {
                retarget(&mut s.target);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Model {
        let mut m = Model::new("t", Mode::Design);
        m.add(ComponentInstance::new("tank", Family::Tank).with("fluid", Param::text("LOX"))).unwrap();
        m.add(ComponentInstance::new("pump", Family::Pump)).unwrap();
        m.add(ComponentInstance::new("shaft", Family::Shaft)).unwrap();
        m
    }

    #[test]
    fn connect_single_node() {
        let mut m = small();
        m.connect("pump.in", "tank.out").unwrap();
        assert_eq!(m.connections[0].to_string(), "tank.out -> pump.in");
    }

    #[test]
    fn connect_errors() {
        let mut m = small();
        assert!(matches!(m.connect("tank.out", "shaft.m1"), Err(NetworkError::KindMismatch { .. })));
        m.connect("tank.out", "pump.in").unwrap();
        assert_eq!(m.connect("tank.out", "pump.in"), Err(NetworkError::AlreadyConnected(PortRef::new("tank", "out"))));
        assert_eq!(m.connect("tank.nope", "pump.out"), Err(NetworkError::UnknownPort(PortRef::new("tank", "nope"))));
        assert!(matches!(m.connect("pump.out", "pump.in"), Err(NetworkError::AlreadyConnected(_))));
        assert_eq!(m.connect("ghost.out", "pump.out"), Err(NetworkError::UnknownComponent("ghost".into())));
    }

    #[test]
    fn defaults_are_materialized_with_provenance() {
        let c = ComponentInstance::new("v", Family::Valve);
        assert_eq!(c.number("opening"), Some(1.0));
        assert_eq!(c.params["opening"].provenance, Provenance::Default);
        assert!(c.number("k_loss").is_none());
    }

    #[test]
    fn rename_updates_references() {
        let mut m = small();
        m.connect("tank.out", "pump.in").unwrap();
        m.set_spec("pump.dp", 1e6);
        m.rename("pump", "p1").unwrap();
        assert_eq!(m.connections[0].to.component, "p1");
        assert_eq!(m.specs[0].target, "p1.dp");
    }
}
