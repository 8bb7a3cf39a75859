//! Core algorithms for certifying the local robustness of deep ReLU networks
//! with a single Heaviside output unit against uniform random perturbations
//! drawn from a sphere around the input.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs plus an explicit random source; IO, file formats
//! and the command line live in the `spherecert` crate.
//!
//! - [`geometry`]: hyperplanes, spherical cap measures, sphere sampling.
//! - [`network`]: ReLU networks with a Heaviside output unit.
//! - [`region`]: the convex cell of the input-space partition containing a point.
//! - [`certify`]: margin-based lower bounds on local robustness.
//! - [`montecarlo`]: sampling estimates used to validate certificates.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
mod linalg;

pub mod certify;
pub mod geometry;
pub mod montecarlo;
pub mod network;
pub mod region;

pub use error::{Error, Result};
