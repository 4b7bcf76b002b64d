//! Steady-state analysis of DC voltage-controlled circuits and a small DC
//! power network, centred on one question: what does adding a link cost?
//!
//! * [`circuit`] — multigraph circuit model (resistors, voltage sources,
//!   capacitors, inductors) with value-semantic edits and a JSON file format.
//! * [`solver`] — steady-state reduction, source-component node bases, and
//!   the loss-potential solve that yields node voltages, branch currents and
//!   dissipation.
//! * [`braess`] — loss cost of an added link (the after/before dissipation
//!   ratio), closed forms for the two-source diamond network, cross-link
//!   sweeps, and the road-network congestion analogue.
//! * [`dcopf`] — unconstrained optimal power flow on a three-bus network,
//!   congestion classification, and injection-to-flow sensitivities.
//! * [`verify`] — seeded randomized suites behind `linkloss verify`.
//! * [`cli`] — the `linkloss` command-line tool.

pub mod braess;
pub mod circuit;
pub mod cli;
pub mod dcopf;
pub mod error;
pub mod solver;
pub mod verify;

pub use circuit::{Circuit, Element, ElementKind, LinkKind, LinkSpec, NodeId};
pub use error::{Error, Result};
pub use solver::{
    evaluate_potential, node_basis, reduce_steady_state, solve_circuit, solve_dc, SolvedState,
};
