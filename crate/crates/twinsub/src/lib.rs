//! Two-mode Fock-space simulator for photon-subtracted twin-beam
//! interferometry: heralded subtraction protocols, Mach-Zehnder phase
//! estimation in the Schwinger-spin picture, loss modelling, and
//! Fisher-information comparisons across interferometer input states.

pub mod error;
pub mod linalg;
pub mod fock;
pub mod optics;
pub mod subtraction;
pub mod estimation;
pub mod catalog;
pub mod sweep;

pub use error::{Error, Result};
