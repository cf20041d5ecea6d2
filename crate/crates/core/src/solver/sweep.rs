//! Continuation sweeps over one parameter or specification value.

use serde::Serialize;

use crate::components::{Mode, ParamClass};
use crate::network::Model;
use crate::solver::SolverConfig;
use crate::workflow::{solve, SolveReport, WorkflowError};

/// Step halvings tried before a point is recorded as failed.
const MAX_BISECTIONS: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepRowStatus {
    Converged,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub status: SweepRowStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<SolveReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub parameter: String,
    pub rows: Vec<SweepRow>,
}

enum Target {
    Spec,
    Param,
}

fn target(model: &Model, path: &str) -> Result<Target, WorkflowError> {
    if model.specs.iter().any(|s| s.target == path) {
        return Ok(Target::Spec);
    }
    let class = model.param_class(path).map_err(|_| WorkflowError::OverrideNotBoundary(path.to_string()))?;
    let free = model
        .component(path.rsplit_once('.').map_or("", |p| p.0))
        .and_then(|c| c.params.get(path.rsplit_once('.').map_or("", |p| p.1)))
        .is_some_and(|p| p.free);
    match class {
        ParamClass::Boundary | ParamClass::Geometry | ParamClass::Calibration if !free => Ok(Target::Param),
        _ => Err(WorkflowError::OverrideNotBoundary(path.to_string())),
    }
}

fn set(model: &mut Model, path: &str, t: &Target, value: f64) -> Result<(), WorkflowError> {
    match t {
        Target::Spec => {
            model.set_spec(path, value);
            Ok(())
        }
        Target::Param => model.set_param(path, value).map_err(Into::into),
    }
}

/// Solves at `value` warm-started from `warm`; returns the report on convergence.
fn attempt(base: &Model, path: &str, t: &Target, value: f64, config: &SolverConfig) -> Result<SolveReport, String> {
    let mut m = base.clone();
    set(&mut m, path, t, value).map_err(|e| e.to_string())?;
    match solve(&m, config) {
        Ok((_, _, rep)) if rep.converged() => Ok(rep),
        Ok((_, _, rep)) => Err(format!("solver: {}", rep.status)),
        Err(e) => Err(e.to_string()),
    }
}

/// Solves `values` in order with continuation. A failing point is retried
/// by halving the step from the last converged value; if that fails too,
/// the row is marked failed and the sweep continues from the last
/// converged state. `progress` is called after each point.
pub fn sweep(
    model: &Model,
    path: &str,
    values: &[f64],
    config: &SolverConfig,
    progress: &mut dyn FnMut(usize, usize),
) -> Result<SweepTable, WorkflowError> {
    if model.mode != Mode::Offdesign {
        return Err(WorkflowError::WrongMode { expected: Mode::Offdesign, found: model.mode });
    }
    config.check()?;
    let t = target(model, path)?;
    let mut warm = model.clone();
    let mut last: Option<f64> = None;
    let mut rows = Vec::with_capacity(values.len());
    for (i, &value) in values.iter().enumerate() {
        let mut outcome = attempt(&warm, path, &t, value, config);
        if let (Err(_), Some(from)) = (&outcome, last) {
            'bisect: for depth in 1..=MAX_BISECTIONS {
                let n = 1u32 << depth;
                let mut stage = warm.clone();
                for k in 1..=n {
                    let v = from + (value - from) * k as f64 / n as f64;
                    match attempt(&stage, path, &t, v, config) {
                        Ok(rep) if k == n => {
                            outcome = Ok(rep);
                            break 'bisect;
                        }
                        Ok(rep) => stage.initial_guess = rep.values(),
                        Err(_) => continue 'bisect,
                    }
                }
            }
        }
        rows.push(match outcome {
            Ok(rep) => {
                warm.initial_guess = rep.values();
                set(&mut warm, path, &t, value)?;
                last = Some(value);
                SweepRow { value, status: SweepRowStatus::Converged, message: None, report: Some(rep) }
            }
            Err(message) => SweepRow { value, status: SweepRowStatus::Failed, message: Some(message), report: None },
        });
        progress(i + 1, values.len());
    }
    Ok(SweepTable { parameter: path.to_string(), rows })
}

/// `steps` evenly spaced values from `from` to `to` inclusive; one step yields `from`.
pub fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![from],
        n => (0..n).map(|i| if i == n - 1 { to } else { from + (to - from) * i as f64 / (n - 1) as f64 }).collect(),
    }
}

impl SweepTable {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.status == SweepRowStatus::Converged)
    }
}

#[cfg(test)]
mod tests {
    use super::linspace;

    #[test]
    fn linspace_endpoints_and_count() {
        assert_eq!(linspace(1.0, 2.0, 5), [1.0, 1.25, 1.5, 1.75, 2.0]);
        assert_eq!(linspace(3.0, 9.0, 1), [3.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
        let v = linspace(0.8 * 3.275e6, 1.2 * 3.275e6, 9);
        assert_eq!(v[8], 1.2 * 3.275e6);
    }
}
