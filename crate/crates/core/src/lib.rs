//! Exact-arithmetic decision procedures for residual properties of the
//! semidirect products Z ⋉_φ Z^d built from an integer matrix φ, together
//! with the supporting computer-algebra kernels: integer polynomial
//! factorization, Hermite/Smith normal forms, and a desk-scale permutation
//! group engine.

pub mod corpus;
pub mod engine;
pub mod factor;
pub mod io;
pub mod lattice;
pub mod matrix;
pub mod modp;
pub mod perm;
pub mod poly;
pub mod primes;
pub mod qpoly;
pub mod torus;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("matrix is not an automorphism of Z^d (det = {0})")]
    NotAutomorphism(String),
    #[error("internal cross-check failed: {0}")]
    Inconsistency(String),
    #[error("group order cap exceeded: {0}")]
    OrderCap(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;


pub use engine::{analyze, ResidualReport};
pub use factor::{factor_over_z, Factorization};
pub use lattice::Lattice;
pub use matrix::{IntMatrix, ModPMatrix};
pub use poly::IntPoly;
pub use primes::PrimeSet;
