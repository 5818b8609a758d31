//! Simulator for a heralded quantum repeater built from quantum-dot spins in
//! double-sided optical microcavities.
//!
//! The crate is organised bottom-up:
//!
//! * [`qcore`]: exact complex state algebra, heralded maps and measurement.
//! * [`cavity`]: reflection/transmission/leak/noise coefficients of a
//!   spin-cavity unit.
//! * [`interface`]: the spin-conditioned photon scattering map.
//! * [`timebin`]: optical elements, time-bin encoder, fiber noise, decoder.
//! * [`protocols`]: entanglement distribution, parity-check detection, chain
//!   extension, purification and end-to-end chains.
//! * [`metrics`]: closed-form fidelities and efficiencies and their
//!   cross-validation against state evolution.

pub mod cavity;
pub mod error;
pub mod interface;
pub mod metrics;
pub mod protocols;
pub mod qcore;
pub mod timebin;

pub use error::{Error, Result};
