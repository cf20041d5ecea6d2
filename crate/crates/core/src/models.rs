//! Example models shipped with the crate.

use crate::fluids::FluidDatabase;
use crate::io::{parse_model, LoadErrors};
use crate::network::Model;

/// Name and JSON source of every bundled model.
pub const BUNDLED: &[(&str, &str)] = &[
    ("cold_gas", include_str!("../models/cold_gas.json")),
    ("pressure_fed", include_str!("../models/pressure_fed.json")),
    ("gas_generator", include_str!("../models/gas_generator.json")),
    ("expander_rl10", include_str!("../models/expander_rl10.json")),
];

/// Parses a bundled model against the builtin fluid database.
pub fn bundled(name: &str) -> Option<Result<Model, LoadErrors>> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, src)| parse_model(src, &FluidDatabase::builtin()))
}
