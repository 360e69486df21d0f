//! Finite-volume spectral laboratory for random divergence-form operators
//! `H_ω = -∇·ρ_ω∇` with Anderson-type coefficients.

pub mod anderson;
pub mod disorder;
pub mod error;
pub mod ids;
pub mod lattice;
pub mod linalg;
pub mod numerics;
pub mod spectral;

pub use error::{Error, Result};
