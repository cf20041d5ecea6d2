mod common;

use std::collections::BTreeMap;

use common::{model, MODELS};
use cyclekit::components::Mode;
use cyclekit::network::{validate, NetworkError, Provenance};
use cyclekit::solver::{sweep, SolverConfig, SweepRowStatus};
use cyclekit::workflow::{run_design, run_offdesign, solve, WorkflowError};

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

#[test]
fn cold_gas_throat_matches_choked_flow_identity() {
    let out = run_design(&model("cold_gas"), &cfg()).unwrap();
    let (g, r, p0, t0, mdot): (f64, f64, f64, f64, f64) = (1.4, 1004.5 * 0.4 / 1.4, 1e6, 300.0, 2.333);
    let gamma_fn = g.sqrt() * (2.0 / (g + 1.0)).powf((g + 1.0) / (2.0 * (g - 1.0)));
    let expected = mdot * (r * t0).sqrt() / (gamma_fn * p0);
    let a = out.report.variable("nozzle.throat_area").unwrap();
    assert!((a - expected).abs() < 1e-12, "{a} vs {expected}");
    assert!((a - 1e-3).abs() < 1e-6);
}

#[test]
fn sized_model_provenance() {
    let m = model("expander_rl10");
    let out = run_design(&m, &cfg()).unwrap();
    let s = &out.sized;
    assert_eq!(s.mode, Mode::Offdesign);
    for comp in &m.components {
        for (name, p) in &comp.params {
            let sized = &s.component(&comp.name).unwrap().params[name];
            assert!(!sized.free, "{}.{name} still free", comp.name);
            if p.free {
                assert_eq!(sized.provenance, Provenance::Solved, "{}.{name}", comp.name);
            } else {
                assert_eq!(sized.provenance, p.provenance, "{}.{name}", comp.name);
            }
        }
    }
    for pump in ["fuel_pump", "lox_pump"] {
        for r in ["q_ref", "dp_ref", "speed_ref"] {
            assert_eq!(s.component(pump).unwrap().params[r].provenance, Provenance::Captured);
        }
    }
    assert_eq!(s.component("jacket").unwrap().params["mdot_ref"].provenance, Provenance::Captured);
    let dp = s.design_point.as_ref().unwrap();
    assert_eq!(dp.specs, m.specs);
    assert!(s.specs.is_empty());
    assert_eq!(dp.values, out.report.values());
}

#[test]
fn design_round_trip_every_model() {
    for name in MODELS {
        let out = run_design(&model(name), &cfg()).unwrap();
        let off = run_offdesign(&out.sized, &BTreeMap::new(), &cfg()).unwrap();
        for v in &off.variables {
            let d = out.report.variable(&v.name).unwrap();
            assert!((v.value - d).abs() <= 1e-6 * d.abs().max(1e-9), "{name} {}: {} vs {d}", v.name, v.value);
        }
    }
}

#[test]
fn wrong_mode_is_rejected() {
    let sized = run_design(&model("cold_gas"), &cfg()).unwrap().sized;
    assert!(matches!(run_design(&sized, &cfg()), Err(WorkflowError::WrongMode { .. })));
    assert!(matches!(run_offdesign(&model("cold_gas"), &BTreeMap::new(), &cfg()), Err(WorkflowError::WrongMode { .. })));
}

#[test]
fn geometry_override_is_refused() {
    let sized = run_design(&model("cold_gas"), &cfg()).unwrap().sized;
    let o = BTreeMap::from([("nozzle.throat_area".to_string(), 2e-3)]);
    assert!(matches!(run_offdesign(&sized, &o, &cfg()), Err(WorkflowError::OverrideNotBoundary(p)) if p == "nozzle.throat_area"));
}

#[test]
fn unknown_spec_component_fails_before_solving() {
    let mut m = model("cold_gas");
    m.set_spec("ghost.mdot", 1.0);
    let r = validate(&m);
    assert!(r.has_errors());
    assert!(matches!(run_design(&m, &cfg()), Err(WorkflowError::Network(NetworkError::NotWellPosed(_)))));
}

#[test]
fn negative_valve_loss_is_non_physical() {
    let mut m = model("pressure_fed");
    m.set_spec("lox_valve.dp", -2e5);
    match run_design(&m, &cfg()) {
        Err(WorkflowError::NonPhysicalSizing { component, parameter, value }) => {
            assert_eq!(component, "lox_valve");
            assert_eq!(parameter, "k_loss");
            assert!(value <= 0.0);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn expander_trends_near_design() {
    let mut sized = run_design(&model("expander_rl10"), &cfg()).unwrap().sized;
    let base = run_offdesign(&sized, &BTreeMap::new(), &cfg()).unwrap().metrics.unwrap();
    let amb = run_offdesign(&sized, &BTreeMap::from([("monitor.p_amb".to_string(), 1e4)]), &cfg()).unwrap().metrics.unwrap();
    assert!(amb.isp < base.isp, "{} vs {}", amb.isp, base.isp);

    sized.set_free("bypass_valve.opening", true).unwrap();
    sized.set_spec("chamber.p_c", 3.275e6);
    let up = run_offdesign(&sized, &BTreeMap::from([("chamber.p_c".to_string(), 3.4e6)]), &cfg()).unwrap().metrics.unwrap();
    assert!(up.thrust > base.thrust);
}

#[test]
fn single_point_sweep_is_a_plain_solve() {
    let sized = run_design(&model("pressure_fed"), &cfg()).unwrap().sized;
    let table = sweep(&sized, "lox_tank.p_out", &[3.8e6], &cfg(), &mut |_, _| {}).unwrap();
    assert_eq!(table.rows.len(), 1);
    let mut m = sized.clone();
    m.set_param("lox_tank.p_out", 3.8e6).unwrap();
    let direct = solve(&m, &cfg()).unwrap().2;
    let row = table.rows[0].report.as_ref().unwrap();
    for v in &direct.variables {
        let w = row.variable(&v.name).unwrap();
        assert!((v.value - w).abs() <= 1e-9 * v.value.abs().max(1e-9), "{}", v.name);
    }
}

#[test]
fn closed_valve_point_fails_alone() {
    let sized = run_design(&model("pressure_fed"), &cfg()).unwrap().sized;
    let values = [1.0, 0.9, 0.0, 0.8];
    let mut calls = Vec::new();
    let table = sweep(&sized, "lox_valve.opening", &values, &cfg(), &mut |i, n| calls.push((i, n))).unwrap();
    let status: Vec<_> = table.rows.iter().map(|r| r.status).collect();
    assert_eq!(status, [SweepRowStatus::Converged, SweepRowStatus::Converged, SweepRowStatus::Failed, SweepRowStatus::Converged]);
    assert!(table.rows[2].message.is_some());
    assert_eq!(calls, [(1, 4), (2, 4), (3, 4), (4, 4)]);
}

#[test]
fn warm_and_cold_sweep_points_agree() {
    let mut sized = run_design(&model("expander_rl10"), &cfg()).unwrap().sized;
    sized.set_free("bypass_valve.opening", true).unwrap();
    sized.set_spec("chamber.p_c", 3.275e6);
    let values = [3.0e6, 3.1e6, 3.5e6];
    let table = sweep(&sized, "chamber.p_c", &values, &cfg(), &mut |_, _| {}).unwrap();
    for (row, v) in table.rows.iter().zip(values) {
        let warm = row.report.as_ref().unwrap();
        let cold = run_offdesign(&sized, &BTreeMap::from([("chamber.p_c".to_string(), v)]), &cfg()).unwrap();
        for c in &cold.variables {
            let w = warm.variable(&c.name).unwrap();
            assert!((c.value - w).abs() <= 1e-7 * c.value.abs().max(1e-9), "{v} {}: {} vs {w}", c.name, c.value);
        }
    }
}

#[test]
fn sweep_rejects_design_mode_and_geometry() {
    let m = model("cold_gas");
    assert!(matches!(sweep(&m, "tank.p_out", &[1e6], &cfg(), &mut |_, _| {}), Err(WorkflowError::WrongMode { .. })));
    let sized = run_design(&m, &cfg()).unwrap().sized;
    assert!(sweep(&sized, "tank.fluid", &[1.0], &cfg(), &mut |_, _| {}).is_err());
}

#[test]
fn isp_definition_holds() {
    const G0: f64 = 9.80665;
    for name in MODELS {
        let r = run_design(&model(name), &cfg()).unwrap().report;
        let m = r.metrics.unwrap();
        assert!((m.isp * G0 * m.mdot_total - m.thrust).abs() <= 1e-9 * m.thrust, "{name}");
    }
}

#[test]
fn converged_states_are_physical() {
    for name in MODELS {
        let r = run_design(&model(name), &cfg()).unwrap().report;
        for v in &r.variables {
            if v.name.ends_with(".p0") || v.name.ends_with(".t0") || v.name.ends_with(".speed") {
                assert!(v.value > 0.0, "{name} {} = {}", v.name, v.value);
            }
            if v.name.ends_with("shaft.power") {
                let turbine = v.name.starts_with("turbine");
                assert_eq!(v.value < 0.0, turbine, "{name} {}", v.name);
            }
        }
        assert!(r.findings.iter().all(|f| f.severity != cyclekit::components::Severity::Error), "{name}: {:?}", r.findings);
    }
}
