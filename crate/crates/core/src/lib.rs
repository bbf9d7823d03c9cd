//! Linear and semilinear parabolic and elliptic equations on finite weighted graphs.
//!
//! The crate provides the discrete operators of a weighted graph, spectral
//! decompositions of its Laplacians, spectral solvers for linear heat-type
//! problems, upper/lower-solution iterations for semilinear problems, residual
//! certificates for the maximum principles, and long-time classifiers for
//! logistic, KPP and Allen–Cahn dynamics.

pub mod comparison;
pub mod demo;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod linear;
pub mod monotone;
pub mod reaction;
pub mod series;
pub mod spectral;
pub mod suite;

pub use error::{Error, Result};
