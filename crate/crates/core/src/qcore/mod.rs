//! Exact state algebra over small composite registers.
//!
//! Pure states are dense amplitude vectors; mixed states are weighted lists of
//! pure states. Heralded (lossy) maps return unnormalized states whose squared
//! norm is the branch probability, so efficiencies can be read off directly.

mod ensemble;
mod map;
mod register;
mod state;

pub use ensemble::{fidelity, Ensemble};
pub use map::LinearMap;
pub use register::{levels, Register, Subsystem, SubsystemKind};
pub use state::{Basis, Outcome, StateVector};

/// Tolerance for algebraic identities.
pub const TOL: f64 = 1e-12;

/// Branches lighter than this are treated as dead.
pub const PRUNE_TOL: f64 = 1e-14;
