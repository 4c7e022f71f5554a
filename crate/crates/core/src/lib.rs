//! Gradient maps of isoparametric polynomials on spheres.
//!
//! The crate evaluates the explicit isoparametric polynomials with closed
//! forms (`g2:m`, `g3m1`, `g4m1`, `g6m1`), checks the Cartan-Münzner
//! identities and the level-mapping law of the gradient map
//! `Phi = grad F / g`, computes Brouwer degrees by signed preimage counting,
//! and builds radial Ginzburg-Landau solutions `u(x) = Phi(x/|x|) h(|x|)`.

pub mod cartan_munzner;
pub mod catalog;
pub mod cli;
pub mod degree;
pub mod error;
pub mod format;
pub mod geometry;
pub mod gradient_map;
pub mod profile;
pub mod quaternion;
pub mod sampling;
pub mod solution;

pub use catalog::{make_family, Family, FamilyId};
pub use error::{Error, Result};
