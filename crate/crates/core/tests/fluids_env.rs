//! Runs in its own binary because it mutates the process environment.

use std::path::PathBuf;

use cyclekit::fluids::FLUIDS_ENV_VAR;
use cyclekit::io::{load_model, LoadError};

#[test]
fn database_path_from_environment() {
    let dir = std::env::temp_dir();
    let db_path = dir.join(format!("cyclekit-fluids-{}.json", std::process::id()));
    std::fs::write(
        &db_path,
        r#"{"species": [{"name": "AIR", "phase": "ideal_gas", "cp": 1100.0, "gamma": 1.38}], "combustion_pairs": []}"#,
    )
    .unwrap();
    let models = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models");

    std::env::set_var(FLUIDS_ENV_VAR, &db_path);
    let m = load_model(&models.join("cold_gas.json")).unwrap();
    let air = m.database().species("AIR").unwrap();
    assert_eq!(air.cp, 1100.0);
    assert_eq!(air.gamma, Some(1.38));

    let errs = load_model(&models.join("pressure_fed.json")).unwrap_err();
    assert!(errs.0.iter().any(|e| matches!(e, LoadError::UnknownSpecies { species, .. } if species == "LOX")), "{errs}");

    std::env::set_var(FLUIDS_ENV_VAR, dir.join("cyclekit-no-such-db.json"));
    let errs = load_model(&models.join("cold_gas.json")).unwrap_err();
    assert!(matches!(errs.0[0], LoadError::Fluids(_)), "{errs}");

    std::env::remove_var(FLUIDS_ENV_VAR);
    std::fs::remove_file(&db_path).ok();
    let m = load_model(&models.join("cold_gas.json")).unwrap();
    assert_eq!(m.database().species("AIR").unwrap().cp, 1004.5);
}
