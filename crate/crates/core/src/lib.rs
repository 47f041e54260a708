//! Effective quantum dynamics of a particle confined in a twisted tube whose
//! cross section is slightly rotated, scaled or sheared along the axis.
//!
//! Units are natural: ħ = m = 1 and the cross-section scale a₀ = 1.

pub mod cli;
pub mod dynamics;
pub mod effective;
pub mod error;
pub mod geometry;
pub mod qgt;
pub mod quadrature;
pub mod scalar;
pub mod transverse;

pub use error::{Error, Result};
