use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{FluidError, Mixture, Phase, Species};

/// Environment variable that points the loaders at an alternative database file.
pub const FLUIDS_ENV_VAR: &str = "CYCLEKIT_FLUIDS";

const BUILTIN: &str = include_str!("../../data/fluids.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombustionPair {
    pub fuel: String,
    pub oxidizer: String,
    pub products: String,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatabaseFile {
    species: Vec<Species>,
    #[serde(default)]
    combustion_pairs: Vec<CombustionPair>,
}

/// Species table plus the propellant-pair product map.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidDatabase {
    species: BTreeMap<String, Arc<Species>>,
    pairs: Vec<CombustionPair>,
}

impl FluidDatabase {
    /// The database shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_json(BUILTIN).expect("bundled fluid database is valid")
    }

    /// Loads from `$CYCLEKIT_FLUIDS` when set, else the builtin table.
    pub fn from_env() -> Result<Self, FluidError> {
        match std::env::var_os(FLUIDS_ENV_VAR) {
            Some(path) => Self::from_path(Path::new(&path)),
            None => Ok(Self::builtin()),
        }
    }

    pub fn from_path(path: &Path) -> Result<Self, FluidError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| FluidError::Database(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, FluidError> {
        let file: DatabaseFile =
            serde_json::from_str(text).map_err(|e| FluidError::Database(e.to_string()))?;
        let mut db = Self {
            species: BTreeMap::new(),
            pairs: Vec::new(),
        };
        for s in file.species {
            db.insert_species(s)?;
        }
        for pair in file.combustion_pairs {
            db.insert_pair(pair)?;
        }
        Ok(db)
    }

    pub fn insert_species(&mut self, species: Species) -> Result<(), FluidError> {
        species.check()?;
        self.species.insert(species.name.clone(), Arc::new(species));
        Ok(())
    }

    pub fn insert_pair(&mut self, pair: CombustionPair) -> Result<(), FluidError> {
        for name in [&pair.fuel, &pair.oxidizer] {
            self.species(name)?;
        }
        if self.species(&pair.products)?.phase != Phase::IdealGas {
            return Err(FluidError::Database(format!(
                "combustion products {} must be a gas",
                pair.products
            )));
        }
        self.pairs
            .retain(|p| !(p.fuel == pair.fuel && p.oxidizer == pair.oxidizer));
        self.pairs.push(pair);
        Ok(())
    }

    pub fn species(&self, name: &str) -> Result<Arc<Species>, FluidError> {
        self.species
            .get(name)
            .cloned()
            .ok_or_else(|| FluidError::UnknownSpecies(name.to_string()))
    }

    pub fn species_names(&self) -> impl Iterator<Item = &str> {
        self.species.keys().map(String::as_str)
    }

    pub fn pairs(&self) -> &[CombustionPair] {
        &self.pairs
    }

    /// Product pseudo-gas for the dominant species of each propellant stream.
    pub fn products_for(&self, fuel: &Mixture, oxidizer: &Mixture) -> Result<Arc<Species>, FluidError> {
        let f = fuel.dominant().ok_or(FluidError::EmptyMixture)?;
        let o = oxidizer.dominant().ok_or(FluidError::EmptyMixture)?;
        let pair = self
            .pairs
            .iter()
            .find(|p| p.fuel == f.name && p.oxidizer == o.name)
            .ok_or_else(|| FluidError::UnknownPropellantPair {
                fuel: f.name.clone(),
                oxidizer: o.name.clone(),
            })?;
        self.species(&pair.products)
    }
}

impl Default for FluidDatabase {
    fn default() -> Self {
        Self::builtin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_table_is_consistent() {
        let db = FluidDatabase::builtin();
        for name in ["LOX", "LH2", "RP1", "LCH4", "N2", "HE", "WATER", "AIR"] {
            db.species(name).unwrap();
        }
        for pair in db.pairs() {
            assert!(db.species(&pair.products).unwrap().is_gas());
        }
        let air = db.species("AIR").unwrap();
        assert!((air.gas_constant().unwrap() - 287.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(matches!(
            FluidDatabase::from_json(r#"{"species":[{"name":"X","phase":"ideal_gas","cp":1000,"gamma":0.9}]}"#),
            Err(FluidError::InvalidSpecies { .. })
        ));
        assert!(matches!(
            FluidDatabase::from_json(r#"{"species":[{"name":"X","phase":"ideal_liquid","cp":1000,"colour":1}]}"#),
            Err(FluidError::Database(_))
        ));
        assert!(matches!(
            FluidDatabase::from_json(r#"{"species":[],"combustion_pairs":[{"fuel":"A","oxidizer":"B","products":"C"}]}"#),
            Err(FluidError::UnknownSpecies(_))
        ));
    }
}
