//! Multi-level Hermite-Pade polynomials of Nikishin systems.

pub mod asymptotics;
pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod hermitepade;
pub mod measures;
pub mod numerics;
pub mod szego;

pub use error::{Error, Result};
