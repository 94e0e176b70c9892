//! Simulation and synthesis of frequency-bin qudit gates built from RF-driven
//! electro-optic mixers arranged in parallel branches.
//!
//! The pipeline runs from [`specfun`] (Bessel functions) through
//! [`modulator`] (mixer spectra) and [`processor`] (transfer matrices and
//! costs) to [`optimizer`] (genetic search over drive parameters).
//! [`oracle`] is an independent time-domain check of the modulator, and
//! [`sensitivity`] differentiates the truncated first-sideband coefficient.

pub mod error;
pub mod gates;
pub mod modulator;
pub mod optimizer;
pub mod oracle;
pub mod processor;
pub mod sensitivity;
pub mod specfun;

pub use error::{Error, Result};
