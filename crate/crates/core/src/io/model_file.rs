//! JSON model files.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "name": "cold_gas",
//!   "mode": "design",
//!   "components": [
//!     {"name": "tank", "family": "tank", "params": {"fluid": "AIR", "p_out": 1e6, "t_out": 300}},
//!     {"name": "nozzle", "family": "convergent_nozzle", "params": {"throat_area": {"free": true}}}
//!   ],
//!   "connections": ["tank.out -> nozzle.in"],
//!   "specs": [{"target": "nozzle.mdot", "value": 2.333}]
//! }
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::components::{Family, Mode, ParamClass};
use crate::fluids::FluidDatabase;
use crate::network::{
    ComponentInstance, DesignPoint, FluidsSection, Model, NetworkError, Param, ParamValue, Provenance, Spec,
};
use crate::solver::SolverConfig;

pub const FORMAT_VERSION: u32 = 1;

/// One problem found while loading, with where it was found.
#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LoadError {
    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError { line: usize, column: usize, message: String },
    #[error("unsupported format_version {found} (expected {FORMAT_VERSION})")]
    UnsupportedVersion { found: u32 },
    #[error("components[{index}] ({name}): unknown component family {family:?}")]
    UnknownComponentFamily { index: usize, name: String, family: String },
    #[error("components[{index}] ({name}): unknown species {species:?}")]
    UnknownSpecies { index: usize, name: String, species: String },
    #[error("duplicate component name {name:?} at components[{first}] and components[{second}]")]
    DuplicateName { name: String, first: usize, second: usize },
    #[error("components[{index}] ({name}): {message}")]
    BadParameter { index: usize, name: String, message: String },
    #[error("connections[{index}]: {message}")]
    BadConnection { index: usize, message: String },
    #[error("fluids: {0}")]
    Fluids(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// Every error found in a file.
#[derive(Debug, Clone, PartialEq, Error, Serialize)]
pub struct LoadErrors(pub Vec<LoadError>);

impl fmt::Display for LoadErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum ParamEntry {
    Number(f64),
    Text(String),
    Full(FullParam),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FullParam {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<ParamValue>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    free: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentEntry {
    name: String,
    family: String,
    #[serde(default)]
    params: BTreeMap<String, ParamEntry>,
}

fn default_version() -> u32 {
    FORMAT_VERSION
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    #[serde(default = "default_version")]
    format_version: u32,
    name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    description: String,
    mode: Mode,
    #[serde(default, skip_serializing_if = "is_empty_fluids")]
    fluids: FluidsSection,
    components: Vec<ComponentEntry>,
    #[serde(default)]
    connections: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    specs: Vec<Spec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    initial_guess: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "is_default_solver")]
    solver: SolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    design_point: Option<DesignPoint>,
}

fn is_empty_fluids(f: &FluidsSection) -> bool {
    f.species.is_empty() && f.combustion_pairs.is_empty()
}

fn is_default_solver(s: &SolverConfig) -> bool {
    *s == SolverConfig::default()
}

fn parse_error(text: &str, e: serde_json::Error) -> LoadError {
    let _ = text;
    LoadError::ParseError { line: e.line(), column: e.column(), message: e.to_string() }
}

fn to_param(entry: ParamEntry) -> Param {
    match entry {
        ParamEntry::Number(v) => Param::number(v),
        ParamEntry::Text(s) => Param::text(s),
        ParamEntry::Full(f) => Param { value: f.value, free: f.free, provenance: f.provenance.unwrap_or(Provenance::Specified) },
    }
}

fn from_param(p: &Param) -> ParamEntry {
    match (&p.value, p.free, p.provenance) {
        (Some(ParamValue::Number(v)), false, Provenance::Specified) => ParamEntry::Number(*v),
        (Some(ParamValue::Text(s)), false, Provenance::Specified) => ParamEntry::Text(s.clone()),
        _ => ParamEntry::Full(FullParam {
            value: p.value.clone(),
            free: p.free,
            provenance: (p.provenance != Provenance::Specified).then_some(p.provenance),
        }),
    }
}

/// Parses a model from JSON text against `base`, collecting every error.
pub fn parse_model(text: &str, base: &FluidDatabase) -> Result<Model, LoadErrors> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| LoadErrors(vec![parse_error(text, e)]))?;
    let mut errors = Vec::new();
    if file.format_version != FORMAT_VERSION {
        errors.push(LoadError::UnsupportedVersion { found: file.format_version });
    }
    let mut model = Model::new(file.name, file.mode);
    model.description = file.description;
    if let Err(e) = model.set_fluids(base, file.fluids) {
        errors.push(LoadError::Fluids(e.to_string()));
    }
    let db = model.database().clone();

    let mut first_index: BTreeMap<String, usize> = BTreeMap::new();
    for (index, entry) in file.components.into_iter().enumerate() {
        if let Some(&first) = first_index.get(&entry.name) {
            errors.push(LoadError::DuplicateName { name: entry.name.clone(), first, second: index });
            continue;
        }
        first_index.insert(entry.name.clone(), index);
        let Some(family) = Family::from_name(&entry.family) else {
            errors.push(LoadError::UnknownComponentFamily { index, name: entry.name, family: entry.family });
            continue;
        };
        let mut comp = ComponentInstance { name: entry.name.clone(), family, params: BTreeMap::new() };
        for (pname, value) in entry.params {
            let Some(def) = family.param(&pname) else {
                let known: Vec<&str> = family.params().iter().map(|d| d.name).collect();
                errors.push(LoadError::BadParameter {
                    index,
                    name: entry.name.clone(),
                    message: format!("{family} has no parameter {pname:?}; available: {}", known.join(", ")),
                });
                continue;
            };
            let param = to_param(value);
            let text_ok = matches!(param.value, Some(ParamValue::Text(_))) == (def.class == ParamClass::Setting)
                || param.value.is_none();
            if !text_ok {
                errors.push(LoadError::BadParameter {
                    index,
                    name: entry.name.clone(),
                    message: if def.class == ParamClass::Setting {
                        format!("{pname} must be text")
                    } else {
                        format!("{pname} must be a number")
                    },
                });
                continue;
            }
            if let (Some(ParamValue::Text(t)), "fluid" | "outlet_fluid") = (&param.value, pname.as_str()) {
                for species in t.split('+').map(|s| s.split(':').next().unwrap_or("").trim()) {
                    if db.species(species).is_err() {
                        errors.push(LoadError::UnknownSpecies { index, name: entry.name.clone(), species: species.into() });
                    }
                }
            }
            comp.params.insert(pname, param);
        }
        comp.fill_defaults();
        model.components.push(comp);
    }

    for (index, line) in file.connections.iter().enumerate() {
        let Some((a, b)) = line.split_once("->") else {
            errors.push(LoadError::BadConnection { index, message: format!("{line:?} is not \"a.port -> b.port\"") });
            continue;
        };
        match model.connect(a.trim(), b.trim()) {
            Ok(()) => {}
            // Missing components were already reported against the component list.
            Err(NetworkError::UnknownComponent(c)) if first_index.contains_key(&c) => {}
            Err(e) => errors.push(LoadError::BadConnection { index, message: e.to_string() }),
        }
    }

    model.specs = file.specs;
    model.initial_guess = file.initial_guess;
    model.solver = file.solver;
    model.design_point = file.design_point;
    if errors.is_empty() {
        Ok(model)
    } else {
        Err(LoadErrors(errors))
    }
}

/// Loads a model file; the base fluid database honours the environment override.
pub fn load_model(path: &Path) -> Result<Model, LoadErrors> {
    let io_err = |message: String| LoadErrors(vec![LoadError::Io { path: path.display().to_string(), message }]);
    let text = std::fs::read_to_string(path).map_err(|e| io_err(e.to_string()))?;
    let base = FluidDatabase::from_env().map_err(|e| LoadErrors(vec![LoadError::Fluids(e.to_string())]))?;
    parse_model(&text, &base)
}

/// Serializes a model; `parse_model(&to_json(m))` is semantically equal to `m`.
pub fn model_to_json(model: &Model) -> String {
    let file = ModelFile {
        format_version: FORMAT_VERSION,
        name: model.name.clone(),
        description: model.description.clone(),
        mode: model.mode,
        fluids: model.fluids.clone(),
        components: model
            .components
            .iter()
            .map(|c| ComponentEntry {
                name: c.name.clone(),
                family: c.family.name().to_string(),
                params: c.params.iter().map(|(k, p)| (k.clone(), from_param(p))).collect(),
            })
            .collect(),
        connections: model.connections.iter().map(ToString::to_string).collect(),
        specs: model.specs.clone(),
        initial_guess: model.initial_guess.clone(),
        solver: model.solver.clone(),
        design_point: model.design_point.clone(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("model file serializes");
    s.push('\n');
    s
}

pub fn save_model(model: &Model, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, model_to_json(model))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
        "name": "t", "mode": "design",
        "components": [
            {"name": "tank", "family": "tank", "params": {"fluid": "AIR", "p_out": 1e6, "t_out": 300}},
            {"name": "nozzle", "family": "convergent_nozzle", "params": {"throat_area": {"free": true}}}
        ],
        "connections": ["tank.out -> nozzle.in"],
        "specs": [{"target": "nozzle.mdot", "value": 2.333}]
    }"#;

    #[test]
    fn parses_and_round_trips() {
        let db = FluidDatabase::builtin();
        let m = parse_model(SMALL, &db).unwrap();
        assert_eq!(m.components.len(), 2);
        assert!(m.component("nozzle").unwrap().params["throat_area"].free);
        assert_eq!(m.component("nozzle").unwrap().number("eta_noz"), Some(1.0));
        let again = parse_model(&model_to_json(&m), &db).unwrap();
        assert_eq!(again, m);
        assert_eq!(model_to_json(&again), model_to_json(&m));
    }

    #[test]
    fn unknown_fields_are_located() {
        let bad = SMALL.replace("\"mode\"", "\"colour\": 1, \"mode\"");
        let errs = parse_model(&bad, &FluidDatabase::builtin()).unwrap_err();
        assert!(matches!(&errs.0[0], LoadError::ParseError { line: 2, message, .. } if message.contains("colour")));
    }

    #[test]
    fn collects_every_error() {
        let bad = SMALL.replace("\"family\": \"tank\"", "\"family\": \"tnak\"").replace(
            "\"name\": \"nozzle\", \"family\": \"convergent_nozzle\", \"params\": {\"throat_area\": {\"free\": true}}",
            "\"name\": \"nozzle\", \"family\": \"tank\", \"params\": {\"fluid\": \"XENON\"}",
        );
        let errs = parse_model(&bad, &FluidDatabase::builtin()).unwrap_err().0;
        assert!(errs.iter().any(|e| matches!(e, LoadError::UnknownComponentFamily { family, .. } if family == "tnak")));
        assert!(errs.iter().any(|e| matches!(e, LoadError::UnknownSpecies { species, .. } if species == "XENON")));
    }
}
