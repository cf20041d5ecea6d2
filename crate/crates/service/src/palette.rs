//! Machine-readable component palette, generated from the family registry.

use cyclekit::components::{Family, ParamClass, ParamDef, PortDef, Requirement, UnitClass};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct FamilyEntry {
    pub family: &'static str,
    pub description: &'static str,
    /// Ports at the default port count.
    pub ports: Vec<PortDef>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variadic: Option<Variadic>,
    pub params: Vec<ParamEntry>,
    /// Quantities a specification may target.
    pub quantities: Vec<QuantityEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Variadic {
    pub param: &'static str,
    pub default: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamEntry {
    #[serde(flatten)]
    pub def: ParamDef,
    pub symbol: &'static str,
    /// Whether design runs may free it as an unknown; all start fixed.
    pub freeable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuantityEntry {
    pub name: &'static str,
    pub unit: UnitClass,
    pub symbol: &'static str,
}

fn entry(family: Family) -> FamilyEntry {
    let variadic = family.structural_param().map(|param| {
        let default = match family.param(param).map(|d| d.requirement) {
            Some(Requirement::Default(v)) => v as usize,
            _ => 1,
        };
        Variadic { param, default }
    });
    FamilyEntry {
        family: family.name(),
        description: family.description(),
        ports: family.ports(variadic.as_ref().map_or(0, |v| v.default)),
        variadic,
        params: family
            .params()
            .iter()
            .map(|&def| ParamEntry {
                def,
                symbol: def.unit.symbol(),
                freeable: matches!(def.class, ParamClass::Calibration | ParamClass::Geometry | ParamClass::Boundary),
            })
            .collect(),
        quantities: family.quantities().iter().map(|&(name, unit)| QuantityEntry { name, unit, symbol: unit.symbol() }).collect(),
    }
}

/// One entry per registered family, in registry order.
pub fn palette() -> Vec<FamilyEntry> {
    Family::ALL.iter().map(|&f| entry(f)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn junction_defaults_to_two_inlets() {
        let j = palette().into_iter().find(|e| e.family == "junction").unwrap();
        let names: Vec<_> = j.ports.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, ["in1", "in2", "out"]);
        assert_eq!(j.variadic.unwrap().param, "inlets");
    }

    #[test]
    fn settings_cannot_be_freed() {
        let tank = palette().into_iter().find(|e| e.family == "tank").unwrap();
        assert!(!tank.params.iter().find(|p| p.def.name == "fluid").unwrap().freeable);
    }
}
