//! Numerical toolkit for wave packets of finite coherence: packet
//! construction and moments, stationary scattering off 1D rectangular
//! potentials, width transformations across boosts, potentials and material
//! interfaces, mean-free-path coherence estimates, and momentum correlation
//! functions for thermal and few-body processes.

pub mod correlations;
pub mod error;
pub mod medium;
pub mod numerics;
pub mod packets;
pub mod scattering1d;
pub mod transforms;
pub mod units;

pub mod cli;

pub use error::{Error, Result};
pub use units::UnitSystem;
