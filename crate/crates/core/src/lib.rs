//! Heisenberg-picture simulator for the photon-box thought experiment.
//!
//! The box centre of mass, its momentum and the internal clock are carried
//! back from the final measurement to the photon emission. Along the way
//! the clock develops non-zero commutators with the box coordinates, which
//! is what keeps inferred photon energy and emission time from beating
//! `ΔE·ΔT ≥ ħ/2`.

pub mod algebra;
pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod inference;
pub mod ode;
pub mod oracle;
pub mod scenario;

pub use error::{Error, Result};
