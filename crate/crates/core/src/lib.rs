//! Euler characteristic profiles and hybrid transforms of one-critical
//! multi-parameter filtrations, with the builders, distances and small-scale
//! persistence machinery needed to use and check them.
//!
//! The usual pipeline is: build a [`complex::MultiFiltration`] (from points
//! with [`builders`], from graphs with [`graph`], or from a file with
//! [`formats`]), choose a grid, then sample it with [`euler::compute_ecp`] or
//! [`transforms::hybrid_transform`].

pub mod builders;
pub mod complex;
pub mod error;
pub mod euler;
pub mod formats;
pub mod graph;
pub mod linalg;
pub mod matching;
pub mod persistence;
pub mod signed;
pub mod synth;
pub mod transforms;

pub use complex::{MultiFiltration, Simplex};
pub use error::{Error, Result};
