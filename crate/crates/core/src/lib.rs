//! Geometry of the space of degree-one holomorphic maps `S^2 -> CP^k`
//! (charge-one `CP^k` lumps): metric profiles, the homogeneous-space Lie
//! structure, Ricci data, and the volume and Einstein-Hilbert actions.

pub mod actions;
pub mod cli;
pub mod error;
pub mod exact;
pub mod jet;
pub mod lie_structure;
pub mod metric_profiles;
pub mod quadrature;
pub mod real;
pub mod ricci;
pub mod verify;

pub use error::{Error, Result};
