use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

use cyclekit::fluids::FLUIDS_ENV_VAR;
use cyclekit::io::{load_model, model_to_json};
use cyclekit::models::bundled;
use cyclekit::network::Model;

fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/models")
}

fn scratch(tag: &str) -> PathBuf {
    std::env::temp_dir().join(format!("cyclekit-cli-{}-{tag}.json", std::process::id()))
}

fn write_model(m: &Model, tag: &str) -> PathBuf {
    let p = scratch(tag);
    std::fs::write(&p, model_to_json(m)).unwrap();
    p
}

fn cyclekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclekit")).args(args).env_remove(FLUIDS_ENV_VAR).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn sized(name: &str, test: &str) -> PathBuf {
    let out = scratch(&format!("{name}-{test}-sized"));
    let o = cyclekit(&["design", path(&models_dir().join(format!("{name}.json"))), "--out", path(&out)]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    out
}

#[test]
fn validate_exit_codes() {
    let o = cyclekit(&["validate", path(&models_dir().join("expander_rl10.json"))]);
    assert_eq!(code(&o), 0);
    assert!(text(&o.stdout).starts_with("status,WellPosed\n"));

    let mut m = bundled("pressure_fed").unwrap().unwrap();
    m.remove_spec("lox_valve.dp");
    let p = write_model(&m, "under");
    let o = cyclekit(&["validate", path(&p), "--format", "json"]);
    assert_eq!(code(&o), 2);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["status"]["kind"], "UnderDetermined");
    assert!(text(&o.stderr).contains("lox_valve"));

    let bad = scratch("malformed");
    std::fs::write(&bad, "{ \"format_version\": 1,").unwrap();
    assert_eq!(code(&cyclekit(&["validate", path(&bad)])), 2);
    assert_eq!(code(&cyclekit(&["validate", "/nonexistent/model.json"])), 4);
}

#[test]
fn design_writes_loadable_sized_model() {
    let out = sized("cold_gas", "design");
    let m = load_model(&out).unwrap();
    assert_eq!(m.mode, cyclekit::components::Mode::Offdesign);
    let o = cyclekit(&["design", path(&models_dir().join("cold_gas.json")), "--out", path(&scratch("cg-json")), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"]["kind"], "converged");
    assert_eq!(code(&cyclekit(&["design", path(&out), "--out", path(&scratch("again"))])), 2);
    assert_eq!(code(&cyclekit(&["design", path(&models_dir().join("cold_gas.json")), "--out", "/nonexistent/dir/x.json"])), 4);
}

#[test]
fn simulate_with_overrides_is_repeatable() {
    let s = sized("expander_rl10", "simulate");
    let args = ["simulate", path(&s), "--set", "monitor.p_amb=1e4", "--set", "fuel_tank.p_out=2.0e5"];
    let a = cyclekit(&args);
    assert_eq!(code(&a), 0, "{}", text(&a.stderr));
    let out = text(&a.stdout);
    assert!(out.starts_with("variable,unit,value\n"));
    assert!(out.contains("\nmetrics.isp,s,"));
    assert_eq!(a.stdout, cyclekit(&args).stdout);
    assert_eq!(code(&cyclekit(&["simulate", path(&s), "--set", "nozzle.area_ratio=30"])), 2);
    assert_eq!(code(&cyclekit(&["simulate", path(&s), "--set", "nonsense"])), 2);
}

#[test]
fn solver_failures_exit_three() {
    let mut m = load_model(&sized("pressure_fed", "starved")).unwrap();
    m.solver.max_iters = 1;
    let p = write_model(&m, "starved");
    let o = cyclekit(&["simulate", path(&p), "--set", "lox_tank.p_out=2.5e6", "--set", "fuel_tank.p_out=3e6"]);
    assert_eq!(code(&o), 3, "{}", text(&o.stderr));

    let mut m = bundled("pressure_fed").unwrap().unwrap();
    m.set_spec("lox_valve.dp", -2e5);
    let p = write_model(&m, "negative");
    let o = cyclekit(&["design", path(&p), "--out", path(&scratch("negative-out"))]);
    assert_eq!(code(&o), 3);
    assert!(text(&o.stderr).contains("lox_valve.k_loss"));
}

#[test]
fn sweep_emits_one_row_per_step() {
    let s = sized("expander_rl10", "sweep");
    let o = cyclekit(&[
        "sweep", path(&s), "--free", "bypass_valve.opening", "--spec", "chamber.p_c=3.275e6",
        "--param", "chamber.p_c", "--from", "2.62e6", "--to", "3.93e6", "--steps", "9",
    ]);
    assert_eq!(code(&o), 0, "{}", text(&o.stderr));
    let out = text(&o.stdout);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 10);
    assert!(lines[0].starts_with("chamber.p_c,status,thrust,isp,mdot_total,"));
    assert!(lines[1..].iter().all(|l| l.split(',').nth(1) == Some("converged")));
    let o = cyclekit(&["sweep", path(&s), "--param", "nozzle.area_ratio", "--from", "1", "--to", "2", "--steps", "0"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn fluid_database_override() {
    let missing = scratch("no-such-fluids");
    let o = Command::new(env!("CARGO_BIN_EXE_cyclekit"))
        .args(["validate", path(&models_dir().join("cold_gas.json"))])
        .env(FLUIDS_ENV_VAR, &missing)
        .output()
        .unwrap();
    assert_eq!(code(&o), 4);
}

#[test]
fn serve_answers_palette_requests() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let mut child = Command::new(env!("CARGO_BIN_EXE_cyclekit"))
        .args(["serve", "--port", &port.to_string()])
        .env_remove(FLUIDS_ENV_VAR)
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let deadline = Instant::now() + Duration::from_secs(10);
    let mut stream = loop {
        match TcpStream::connect(("127.0.0.1", port)) {
            Ok(s) => break s,
            Err(_) if Instant::now() < deadline => std::thread::sleep(Duration::from_millis(50)),
            Err(e) => panic!("server did not start: {e}"),
        }
    };
    stream.write_all(b"GET /api/v1/components HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n").unwrap();
    let mut response = String::new();
    stream.read_to_string(&mut response).unwrap();
    child.kill().ok();
    child.wait().ok();
    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    assert!(response.contains("\"combustion_chamber\""));
}
