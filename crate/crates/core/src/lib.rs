//! Spectrum, level crossings and exact degenerate eigenstates of the
//! two-photon Rabi model in its squeezed-frame form
//! `K = 2x a†a + μσx + [(a†)² + a²]σz`.

pub mod crossing;
pub mod dfamily;
pub mod error;
pub mod fock;
pub mod model;
pub mod states;
pub mod tridiag;
pub mod verify;

pub use error::{Error, Result};
pub use model::{ModelParams, Parity};
