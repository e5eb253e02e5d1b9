//! Spherical-derivative invariants of rational self-maps of the Riemann sphere.
//!
//! For a rational map `f` the spherical derivative norm is
//! `‖f'‖(z) = |f'(z)| (1 + |z|²) / (1 + |f(z)|²)`. This crate computes its
//! global maximum `K(f)`, the growth rate `k∞(f) = lim (1/n) log K(fⁿ)`, the
//! maximal characteristic exponent over periodic cycles and the average
//! exponent against the measure of maximal entropy, and checks how these
//! quantities relate on concrete map families.
//!
//! Everything is computed in two charts of the sphere (`z` and `u = 1/z`) so
//! that poles and the point at infinity need no special casing.

pub mod cli;
pub mod ergodic;
pub mod knorm;
pub mod lab;
pub mod periodic;
pub mod poly;
pub mod rational;
pub mod report;
pub mod roots;
pub mod simplex;
pub mod sphere;
pub mod zoo;

mod error;
mod sum;

pub use error::{Error, Result};
pub use poly::Poly;
pub use rational::RationalMap;
pub use sphere::{Chart, SphereGrid, SpherePoint};

pub use num_complex::Complex64;
