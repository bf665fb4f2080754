//! Constraint ordering for truth-table invariant cylindrical algebraic
//! decomposition built incrementally by constraint.
//!
//! The crate is organised bottom-up:
//!
//! * [`poly`]: exact sparse multivariate polynomials over Z.
//! * [`elim`]: resultants, discriminants, gcds and square-free parts.
//! * [`realroot`]: real root isolation and real algebraic numbers.
//! * [`formulation`]: problems, constraint orderings, the constraint
//!   ordering set and the ordering heuristics.
//! * [`ccd`]: an order-sensitive model of the complex cylindrical tree.
//! * [`cad`]: lifting the tree to a CAD of real space, plus checks.
//! * [`bench`]: random systems and the heuristic evaluation harness.
//! * [`cli`]: the command-line surface.

pub mod bench;
pub mod cad;
pub mod ccd;
pub mod cli;
pub mod deadline;
pub mod elim;
pub mod formulation;
pub mod poly;
pub mod realroot;
