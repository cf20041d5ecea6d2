//! `cyclekit`: validate, size, simulate and sweep engine models from the
//! command line, or serve the HTTP API.
//!
//! Exit codes: 0 success, 2 validation failure, 3 solver failure, 4 file error.

mod error;

use std::io::{IsTerminal, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cyclekit::fluids::FluidDatabase;
use cyclekit::io::{export_solve, export_sweep, load_model, save_model, Format, LoadError, LoadErrors};
use cyclekit::network::{validate, Model};
use cyclekit::solver::{linspace, sweep};
use cyclekit::workflow::{run_design, run_offdesign};

use error::CliError;

#[derive(Parser)]
#[command(name = "cyclekit", version, about = "Steady-state liquid rocket engine cycle models")]
struct Cli {
    /// Output format for reports and tables.
    #[arg(long, value_enum, global = true, default_value = "csv")]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check the degree-of-freedom balance and report diagnostics.
    Validate { model: PathBuf },
    /// Size a design-mode model and write the frozen off-design model.
    Design {
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve a sized model, optionally at overridden boundary values.
    Simulate {
        model: PathBuf,
        /// Boundary value or specification override, `component.param=value`.
        #[arg(long = "set", value_name = "KEY=VALUE", value_parser = assignment)]
        set: Vec<(String, f64)>,
        #[command(flatten)]
        edits: Edits,
    },
    /// Continuation sweep of one parameter over an evenly spaced range.
    Sweep {
        model: PathBuf,
        #[arg(long)]
        param: String,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=10000))]
        steps: u32,
        #[command(flatten)]
        edits: Edits,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
    },
}

/// Model edits applied before solving, for off-design specifications
/// balanced by a freed parameter.
#[derive(Args)]
struct Edits {
    /// Add or change a specification, `component.quantity=value`.
    #[arg(long = "spec", value_name = "TARGET=VALUE", value_parser = assignment)]
    specs: Vec<(String, f64)>,
    /// Free a parameter as an unknown, `component.param`.
    #[arg(long = "free", value_name = "PATH")]
    free: Vec<String>,
}

impl Edits {
    fn apply(&self, model: &mut Model) -> Result<(), CliError> {
        for path in &self.free {
            model.set_free(path, true).map_err(|e| CliError::Invalid(e.to_string()))?;
        }
        for (target, value) in &self.specs {
            model.set_spec(target, *value);
        }
        Ok(())
    }
}

fn assignment(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected KEY=VALUE, got {s:?}"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("{v:?}: {e}"))?;
    if !v.is_finite() {
        return Err(format!("{v} is not finite"));
    }
    Ok((k.trim().to_string(), v))
}

fn load(path: &Path) -> Result<Model, CliError> {
    load_model(path).map_err(CliError::Load)
}

fn emit(bytes: &[u8]) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    out.write_all(bytes).and_then(|_| out.flush()).map_err(|source| CliError::Write { path: "<stdout>".into(), source })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let format = Format::from(cli.format);
    match cli.command {
        Command::Validate { model } => {
            let report = validate(&load(&model)?);
            let bytes = match format {
                Format::Json => serde_json::to_vec_pretty(&report).expect("report serializes"),
                Format::Csv => {
                    let mut s = format!("status,{}\nvariables,{}\nequations,{}\n", report.status, report.n_vars, report.n_eqs);
                    for d in &report.diagnostics {
                        s += &format!("{:?},{},{}\n", d.severity, d.component.as_deref().unwrap_or(""), d.message.replace(',', ";"));
                    }
                    s.into_bytes()
                }
            };
            emit(&bytes)?;
            if !report.is_solvable() {
                return Err(CliError::NotWellPosed(Box::new(report)));
            }
        }
        Command::Design { model, out } => {
            let m = load(&model)?;
            let outcome = run_design(&m, &m.solver)?;
            save_model(&outcome.sized, &out).map_err(|source| CliError::Write { path: out.display().to_string(), source })?;
            emit(&export_solve(&outcome.report, format))?;
        }
        Command::Simulate { model, set, edits } => {
            let mut m = load(&model)?;
            edits.apply(&mut m)?;
            let report = run_offdesign(&m, &set.into_iter().collect(), &m.solver)?;
            emit(&export_solve(&report, format))?;
            if !report.converged() {
                return Err(CliError::Solver(format!("solver did not converge: {}", report.status)));
            }
        }
        Command::Sweep { model, param, from, to, steps, edits } => {
            let mut m = load(&model)?;
            edits.apply(&mut m)?;
            let report = validate(&m);
            if !report.is_solvable() {
                return Err(CliError::NotWellPosed(Box::new(report)));
            }
            let tty = std::io::stderr().is_terminal();
            let mut progress = |i: usize, n: usize| {
                if tty {
                    eprint!("\rpoint {i}/{n}");
                }
            };
            let table = sweep(&m, &param, &linspace(from, to, steps as usize), &m.solver, &mut progress)?;
            if tty {
                eprintln!();
            }
            emit(&export_sweep(&table, format))?;
            if table.rows.iter().all(|r| r.report.is_none()) {
                return Err(CliError::Solver("no sweep point converged".into()));
            }
        }
        Command::Serve { port, host } => {
            let db = FluidDatabase::from_env().map_err(|e| CliError::Load(LoadErrors(vec![LoadError::Fluids(e.to_string())])))?;
            let addr = SocketAddr::new(host, port);
            let rt = tokio::runtime::Runtime::new().map_err(CliError::Serve)?;
            eprintln!("listening on http://{addr}/api/v1");
            rt.block_on(cyclekit_service::serve(addr, db)).map_err(CliError::Serve)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Load(errs) => errs.0.iter().for_each(|err| eprintln!("error: {err}")),
                CliError::NotWellPosed(r) => {
                    eprintln!("error: {e}");
                    r.diagnostics.iter().for_each(|d| eprintln!("  {}: {}", d.component.as_deref().unwrap_or("model"), d.message));
                }
                _ => eprintln!("error: {e}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
