//! Damped Newton solution of square nonlinear systems.
//!
//! Variables and residuals are scaled by their unit class before the
//! solver sees them. The Jacobian is a forward-difference approximation,
//! optionally compressed by column grouping when a sparsity pattern is
//! known, and the linear step is solved with partially pivoted LU.

mod jacobian;
mod linalg;
mod newton;
mod sweep;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::components::UnitClass;

pub use jacobian::{jacobian, jacobian_central, Jacobian};
pub use linalg::{lu_solve, DenseMatrix, LuError};
pub use newton::newton_solve;
pub use sweep::{linspace, sweep, SweepRow, SweepRowStatus, SweepTable};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Convergence threshold on the scaled residual infinity-norm.
    pub tol_residual: f64,
    /// Scaled step infinity-norm below which iteration stops.
    pub tol_step: f64,
    pub max_iters: usize,
    /// Relative forward-difference step on scaled variables.
    pub fd_rel_step: f64,
    /// Maximum step halvings per line search.
    pub max_backtracks: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol_residual: 1e-10, tol_step: 1e-12, max_iters: 50, fd_rel_step: 1e-7, max_backtracks: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("solver tolerance {name} = {value} must be positive")]
    NonPositiveTolerance { name: &'static str, value: f64 },
    #[error("max_iters must be at least 1")]
    NoIterations,
}

impl SolverConfig {
    pub fn check(&self) -> Result<(), ConfigError> {
        for (name, value) in
            [("tol_residual", self.tol_residual), ("tol_step", self.tol_step), ("fd_rel_step", self.fd_rel_step)]
        {
            if !(value > 0.0) {
                return Err(ConfigError::NonPositiveTolerance { name, value });
            }
        }
        if self.max_iters == 0 {
            return Err(ConfigError::NoIterations);
        }
        Ok(())
    }
}

/// One unknown of the system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Variable {
    pub name: String,
    pub unit: UnitClass,
    pub scale: f64,
    pub initial: f64,
    /// Keep the variable strictly positive by truncating Newton steps.
    pub positive: bool,
}

/// A residual evaluation failure at a given point.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{source_name}: {message}")]
pub struct EvalError {
    pub source_name: String,
    pub message: String,
}

pub type ResidualFn = dyn Fn(&[f64], &mut [f64]) -> Result<(), EvalError> + Send + Sync;

/// A square system r(x) = 0 in physical units, plus the scaling the solver applies.
#[derive(Clone)]
pub struct NonlinearSystem {
    pub variables: Vec<Variable>,
    pub residual_names: Vec<String>,
    pub residual_scales: Vec<f64>,
    /// For each residual, the variables it can depend on.
    pub sparsity: Option<Vec<Vec<usize>>>,
    eval: Arc<ResidualFn>,
}

impl fmt::Debug for NonlinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonlinearSystem")
            .field("variables", &self.variables)
            .field("residual_names", &self.residual_names)
            .field("sparsity", &self.sparsity.is_some())
            .finish_non_exhaustive()
    }
}

impl NonlinearSystem {
    pub fn new(
        variables: Vec<Variable>,
        residual_names: Vec<String>,
        residual_scales: Vec<f64>,
        sparsity: Option<Vec<Vec<usize>>>,
        eval: Arc<ResidualFn>,
    ) -> Self {
        assert_eq!(residual_names.len(), residual_scales.len());
        Self { variables, residual_names, residual_scales, sparsity, eval }
    }

    /// Unscaled system with unit scales, for tests and small problems.
    pub fn from_fn<F>(initial: &[f64], f: F) -> Self
    where
        F: Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    {
        let variables = initial
            .iter()
            .enumerate()
            .map(|(i, &x)| Variable {
                name: format!("x{i}"),
                unit: UnitClass::Dimensionless,
                scale: 1.0,
                initial: x,
                positive: false,
            })
            .collect();
        let n = initial.len();
        Self::new(
            variables,
            (0..n).map(|i| format!("r{i}")).collect(),
            vec![1.0; n],
            None,
            Arc::new(move |x: &[f64], r: &mut [f64]| {
                f(x, r);
                Ok(())
            }),
        )
    }

    pub fn n_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn n_residuals(&self) -> usize {
        self.residual_names.len()
    }

    pub fn initial(&self) -> Vec<f64> {
        self.variables.iter().map(|v| v.initial).collect()
    }

    /// Physical residuals at physical `x`.
    pub fn eval(&self, x: &[f64], r: &mut [f64]) -> Result<(), EvalError> {
        (self.eval)(x, r)
    }

    /// Scaled residuals at scaled `u`.
    pub(crate) fn eval_scaled(&self, u: &[f64], r: &mut [f64]) -> Result<(), EvalError> {
        let x: Vec<f64> = u.iter().zip(&self.variables).map(|(u, v)| u * v.scale).collect();
        self.eval(&x, r)?;
        for (ri, s) in r.iter_mut().zip(&self.residual_scales) {
            *ri /= s;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SolveStatus {
    Converged,
    MaxIters,
    SingularJacobian { variable: String },
    LineSearchStall,
    NonFiniteResidual { residual: String },
}

impl SolveStatus {
    pub fn is_converged(&self) -> bool {
        matches!(self, SolveStatus::Converged)
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveStatus::Converged => f.write_str("converged"),
            SolveStatus::MaxIters => f.write_str("maximum iterations reached"),
            SolveStatus::SingularJacobian { variable } => write!(f, "singular Jacobian at variable {variable}"),
            SolveStatus::LineSearchStall => f.write_str("line search stalled"),
            SolveStatus::NonFiniteResidual { residual } => write!(f, "non-finite residual {residual}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveResult {
    /// Physical variable values at the last iterate.
    pub x: Vec<f64>,
    /// Scaled residual infinity-norm at `x`.
    pub residual_norm: f64,
    pub iterations: usize,
    /// Scaled residual infinity-norm at each iterate, starting with the initial point.
    pub trace: Vec<f64>,
    pub status: SolveStatus,
}
