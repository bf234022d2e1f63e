//! Numerics for the (q; l, λ)-deformed Heisenberg algebra.
//!
//! The algebra is generated by `a`, `a†`, `N` with `a a† − a† a = l² q^{λ−N−1}`
//! and structure function `a† a = φ(N)`. Everything here is built on a truncated
//! Fock space, and each closed form has an independent brute-force counterpart.

pub mod coherent;
pub mod error;
pub mod fock;
pub mod hermite;
pub mod hopf;
pub mod qkernel;
pub mod quad;
pub mod quantize;
pub mod report;
pub mod verify;

pub mod cli;

pub use error::{Error, Result};
pub use qkernel::{DeformationParams, Regime, SeriesValue};

pub use num_complex::Complex64;
