//! Steady-state component-network modelling of liquid rocket engine cycles.
//!
//! A [`network::Model`] is a graph of components from the
//! [`components`] palette. It is flattened into one nonlinear system and
//! solved by damped Newton. [`workflow::run_design`] sizes geometry
//! against operational specifications and freezes the result;
//! [`workflow::run_offdesign`] and [`solver::sweep`] then explore the
//! frozen model.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod components;
pub mod fluids;
pub mod io;
pub mod models;
pub mod network;
pub mod solver;
pub mod workflow;
