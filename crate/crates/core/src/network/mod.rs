//! Model graphs and their flattening into one algebraic system.
//!
//! A connection joins two ports into a node that carries one port state
//! worth of unknowns. Unknowns are node states plus parameters flagged
//! free; equations are the component residuals plus the specifications.

mod assemble;
mod compile;
mod guess;
mod model;

use thiserror::Error;

use crate::components::PortKind;

pub use assemble::{AssembledSystem, ComponentFinding, QuantityValue};
pub use compile::{Diagnostic, DofReport, DofStatus};
pub use model::{
    ComponentInstance, Connection, DesignPoint, FluidsSection, Model, Param, ParamValue, PortRef, Provenance, Spec,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("unknown component {0}")]
    UnknownComponent(String),
    #[error("unknown port {0}")]
    UnknownPort(PortRef),
    #[error("unknown parameter {0}")]
    UnknownParameter(String),
    #[error("{0:?} is not a component.port or component.param reference")]
    BadReference(String),
    #[error("cannot connect {a} ({a_kind}) to {b} ({b_kind})")]
    KindMismatch { a: PortRef, a_kind: PortKind, b: PortRef, b_kind: PortKind },
    #[error("port {0} is already connected")]
    AlreadyConnected(PortRef),
    #[error("{a} and {b} cannot be joined: a connection runs from an outlet to an inlet or from a machine to a shaft")]
    DirectionMismatch { a: PortRef, b: PortRef },
    #[error("component {0} cannot be connected to itself")]
    SelfLoop(String),
    #[error("duplicate component name {0}")]
    DuplicateComponent(String),
    #[error("parameter {0} is text, not a number")]
    NotNumeric(String),
    #[error("parameter {0} cannot be made free")]
    CannotFree(String),
    #[error("model is not solvable: {}", .0.status)]
    NotWellPosed(DofReport),
    #[error("residual evaluation failed at the initial guess: {0}")]
    Evaluation(String),
}

/// Counts unknowns and equations and reports structural problems.
pub fn validate(model: &Model) -> DofReport {
    let (net, diags) = compile::compile(model);
    compile::dof_report(model, &net, diags)
}

/// Flattens a well-posed model into a nonlinear system.
pub fn assemble(model: &Model) -> Result<AssembledSystem, NetworkError> {
    assemble::assemble(model)
}
