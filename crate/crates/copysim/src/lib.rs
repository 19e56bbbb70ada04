//! Simulation toolkit for inter-copy collapse models of quantum measurement.
//!
//! The crate covers four layers:
//!
//! * [`qmath`]: dense complex linear algebra and quantum primitives;
//! * [`povm`]: joint-measurability feasibility frontiers for unsharp and
//!   faulty qubit observables, with explicit joint-POVM constructions;
//! * [`copyspace`] / [`dynamics`]: index algebra for N copies of a d-level
//!   system, the inter-copy collapse jump operators, Lindblad integration
//!   (dense and structured), quantum-jump Monte Carlo, and a discretized-bath
//!   Hamiltonian model with its golden-rule reduction;
//! * [`experiments`]: sequential-measurement bounds and their many-copy
//!   violation, harmonic analysis of rotation signals, and the three-state
//!   interference functional.
//!
//! Everything is deterministic under a fixed seed; fan-out loops run on
//! rayon when the `parallel` feature (default) is enabled and sequentially
//! otherwise.

pub mod config;
pub mod copyspace;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod povm;
pub mod qmath;

pub use error::{Error, Result};
