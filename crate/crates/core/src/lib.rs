//! Exact construction and checking of the self-similar tripole-star
//! microstructure: a three-well Landau energy, a piecewise-affine
//! displacement field on an infinite kite tiling, and rank-one compatibility
//! of its gradients across every interface.

pub mod analysis;
pub mod cli;
pub mod clip;
pub mod compat;
pub mod error;
pub mod exactnum;
pub mod field;
pub mod geometry;
pub mod linalg;
pub mod wells;

pub use error::{Error, Result};
